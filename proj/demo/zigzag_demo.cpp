// Prints Phi, the optimal partition and the stop-time trace of a small zigzag,
// then the same quantities for one Brownian sample.

#include <iostream>

#include "regtv/brownian.hpp"
#include "regtv/oracle.hpp"
#include "regtv/report.hpp"
#include "regtv/stops.hpp"

int main() {
  const auto zigzag = regtv::validate_path({0, 1.0 / 3, 2.0 / 3, 1}, {0, 1, 0, 1});
  for (double lambda : {0.5, 1.5, 3.0}) {
    const auto fast = regtv::phi_fast(zigzag, lambda);
    const auto dp = regtv::dp_optimal(zigzag, lambda);
    std::cout << "zigzag lambda=" << lambda << " phi=" << fast.value << " k=" << fast.partition.k()
              << " dp=" << dp.value << '\n';
  }
  std::cout << regtv::to_json(regtv::scan_stops(zigzag, 0.5)).dump(2) << '\n';

  const auto w = regtv::sample_brownian(100000, 1.0, 7);
  const auto r = regtv::phi_fast(w, 0.5);
  std::cout << "brownian lambda=0.5 phi=" << r.value << " k=" << r.partition.k() << '\n';
}
