#pragma once

// Seeded Brownian Monte Carlo experiments for the regularized total variation.
//
// Every ensemble draws its paths from derive_seed(derive_seed(master_seed,
// stream), path_index), and per-path results are reduced in path order, so the
// output does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "regtv/brownian.hpp"
#include "regtv/error.hpp"
#include "regtv/path.hpp"
#include "regtv/stats.hpp"
#include "regtv/stops.hpp"

namespace regtv {

// Smallest lambda * sqrt(steps per unit time) accepted for simulation.
inline constexpr double kDiscretizationGuard = 20.0;

struct SimConfig {
  double lambda = 0.5;
  std::size_t n_paths = 1000;
  std::size_t n_steps = 10000;  // grid steps per unit time
  double horizon = 1.0;
  std::uint64_t master_seed = 1;
  double z = 3.0;
  unsigned workers = 1;         // wall time only; never changes results

  void validate() const {
    if (!std::isfinite(lambda) || !(lambda > 0)) {
      throw Error(ErrorCode::InvalidParameter, "lambda must be positive");
    }
    if (n_paths < 2) throw Error(ErrorCode::InvalidParameter, "need at least two paths");
    if (n_steps < 1) throw Error(ErrorCode::InvalidParameter, "need at least one step");
    if (!std::isfinite(horizon) || !(horizon > 0)) {
      throw Error(ErrorCode::InvalidParameter, "horizon must be positive");
    }
    if (!std::isfinite(z) || !(z > 0)) throw Error(ErrorCode::InvalidParameter, "z must be positive");
    check_guard(lambda);
  }

  void check_guard(double effective_lambda) const {
    if (effective_lambda * std::sqrt(static_cast<double>(n_steps)) < kDiscretizationGuard) {
      throw Error(ErrorCode::InvalidParameter,
                  "lambda * sqrt(n_steps) = " +
                      std::to_string(effective_lambda * std::sqrt(static_cast<double>(n_steps))) +
                      " is below " + std::to_string(kDiscretizationGuard));
    }
  }

  // Grid size for a path on [0, length].
  std::size_t steps_for(double length) const {
    const double s = std::round(static_cast<double>(n_steps) * length);
    return s < 1 ? 1 : static_cast<std::size_t>(s);
  }
};

struct EstimateSummary {
  std::string name;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> target;
  std::optional<bool> verdict;
  SimConfig config;
};

struct Margin {
  std::string name;
  double value;  // >= 0 when the condition holds
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::vector<Margin> margins;
};

// Ensemble identifiers; each feeds derive_seed(master_seed, id).
enum class Stream : std::uint64_t {
  ExpectedPhi = 1,
  StopMoments = 2,
  Martingale = 3,
  ScalingLong = 4,
  ScalingShort = 5,
  EpsilonUnit = 6,
  EpsilonUnitCheck = 7,
  Refinement = 8,
  Subadditivity = 9,
  EpsilonLong = 16,  // + log2(L) or L
};

inline std::uint64_t path_seed(const SimConfig& cfg, std::uint64_t stream, std::size_t index) {
  return derive_seed(derive_seed(cfg.master_seed, stream), index);
}

inline std::uint64_t path_seed(const SimConfig& cfg, Stream stream, std::size_t index) {
  return path_seed(cfg, static_cast<std::uint64_t>(stream), index);
}

// Evaluates fn(i) for i in [0, n) on `workers` threads; results are stored by index.
template <class T, class Fn>
std::vector<T> map_paths(std::size_t n, unsigned workers, Fn fn) {
  std::vector<T> out(n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(workers, static_cast<unsigned>(n));
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline EstimateSummary summarize(std::string name, std::span<const double> values,
                                 const SimConfig& cfg, std::optional<double> target = {}) {
  const auto m = stats::moments(values);
  EstimateSummary s;
  s.name = std::move(name);
  s.mean = m.mean;
  s.stderr_ = m.stderr_;
  s.n = m.n;
  s.ci_low = m.mean - cfg.z * m.stderr_;
  s.ci_high = m.mean + cfg.z * m.stderr_;
  s.target = target;
  s.config = cfg;
  return s;
}

// Per-path regularized TV of Brownian samples on [0, length].
inline std::vector<double> sample_phi(const SimConfig& cfg, std::uint64_t stream, double length,
                                      double lambda, double factor = 1.0) {
  const std::size_t steps = cfg.steps_for(length);
  return map_paths<double>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    return factor * phi_explicit(brownian_trace(steps, length, path_seed(cfg, stream, i), lambda));
  });
}

// ---------------------------------------------------------------------------
// Expected value of Phi on [0, b] and the bracket 1/lambda <= E Phi <= 1/lambda + lambda.

// per_path, when given, receives the individual samples in path order.
inline EstimateSummary estimate_expected_phi(const SimConfig& cfg,
                                             std::vector<double>* per_path = nullptr) {
  cfg.validate();
  auto values = sample_phi(cfg, static_cast<std::uint64_t>(Stream::ExpectedPhi), cfg.horizon,
                           cfg.lambda);
  std::optional<double> target;
  if (cfg.horizon == 1.0) target = 1.0 / cfg.lambda;
  auto summary = summarize("phi_mean", values, cfg, target);
  if (per_path) *per_path = std::move(values);
  return summary;
}

// Allowance for the downward bias of the grid estimator.
inline double bracket_allowance(double lambda, std::size_t n_steps) {
  return 5.0 / (lambda * std::sqrt(static_cast<double>(n_steps)));
}

inline Verdict verify_bracket(const EstimateSummary& summary, double lambda) {
  const double beta = bracket_allowance(lambda, summary.config.n_steps);
  const double lower = 1.0 / lambda - beta;
  const double upper = 1.0 / lambda + lambda;
  Verdict v;
  v.name = "bracket";
  v.margins = {{"lower_margin", summary.ci_high - lower},
               {"upper_margin", upper - summary.ci_low},
               {"beta", beta}};  // the allowance itself, not a margin
  v.pass = summary.ci_high >= lower && summary.ci_low <= upper;
  return v;
}

// ---------------------------------------------------------------------------
// Stopping-time moments: E tau_0 = (lambda/2)^2, E(tau_j - tau_{j-1}) = lambda^2,
// k'(b)/b -> 1/lambda^2.

inline constexpr std::size_t kMinPooledStops = 100;

struct StopMoments {
  EstimateSummary tau0;
  EstimateSummary dtau;
  EstimateSummary renewal_rate;
  std::size_t pooled_count = 0;
  bool too_few_stops = false;
};

inline StopMoments estimate_stop_moments(const SimConfig& cfg) {
  cfg.validate();
  struct PathStops {
    std::optional<double> tau0;
    std::vector<double> gaps;
    double rate = 0.0;
  };
  const std::size_t steps = cfg.steps_for(cfg.horizon);
  const auto per_path = map_paths<PathStops>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    const auto trace =
        brownian_trace(steps, cfg.horizon, path_seed(cfg, Stream::StopMoments, i), cfg.lambda);
    PathStops out;
    const auto& s = trace.stops;
    if (!s.front().beyond_end && s.front().time < trace.end) out.tau0 = s.front().time;
    for (std::size_t j = 1; j <= trace.k_prime; ++j) out.gaps.push_back(s[j].time - s[j - 1].time);
    out.rate = static_cast<double>(trace.k_prime) / cfg.horizon;
    return out;
  });

  std::vector<double> tau0;
  std::vector<double> gaps;
  std::vector<double> rates;
  for (const auto& p : per_path) {
    if (p.tau0) tau0.push_back(*p.tau0);
    gaps.insert(gaps.end(), p.gaps.begin(), p.gaps.end());
    rates.push_back(p.rate);
  }
  const double l2 = cfg.lambda * cfg.lambda;
  StopMoments out;
  out.tau0 = summarize("tau0_mean", tau0, cfg, l2 / 4);
  out.dtau = summarize("dtau_mean", gaps, cfg, l2);
  out.renewal_rate = summarize("renewal_rate", rates, cfg, 1.0 / l2);
  out.pooled_count = gaps.size();
  out.too_few_stops = gaps.size() < kMinPooledStops;
  return out;
}

// |mean - target| <= z * stderr for each moment.
inline Verdict check_stop_moments(StopMoments& m) {
  Verdict v;
  v.name = "stop_moments";
  v.pass = !m.too_few_stops;
  for (EstimateSummary* s : {&m.tau0, &m.dtau, &m.renewal_rate}) {
    const double margin = s->config.z * s->stderr_ - std::abs(s->mean - *s->target);
    s->verdict = margin >= 0;
    v.pass = v.pass && margin >= 0;
    v.margins.push_back({s->name, margin});
  }
  return v;
}

// ---------------------------------------------------------------------------
// Martingale diagnostics for S = sum_{j>=1} (-1)^{j+alpha} (W_{tau_j ^ b} - W_{tau_{j-1} ^ b}):
// E S = 0 and E S^2 <= b.

struct MartingaleReport {
  EstimateSummary signed_sum;
  EstimateSummary signed_sum_sq;
};

inline MartingaleReport martingale_diag(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t steps = cfg.steps_for(cfg.horizon);
  const auto s = map_paths<double>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    return signed_increment_sum(
        brownian_trace(steps, cfg.horizon, path_seed(cfg, Stream::Martingale, i), cfg.lambda));
  });
  std::vector<double> sq(s.size());
  std::transform(s.begin(), s.end(), sq.begin(), [](double x) { return x * x; });
  return {summarize("signed_sum_mean", s, cfg, 0.0),
          summarize("signed_sum_msq", sq, cfg, cfg.horizon)};
}

inline Verdict check_martingale(MartingaleReport& r) {
  const double z = r.signed_sum.config.z;
  const double mean_margin = z * r.signed_sum.stderr_ - std::abs(r.signed_sum.mean);
  const double bound_margin =
      r.signed_sum.config.horizon + z * r.signed_sum_sq.stderr_ - r.signed_sum_sq.mean;
  r.signed_sum.verdict = mean_margin >= 0;
  r.signed_sum_sq.verdict = bound_margin >= 0;
  return {"martingale", mean_margin >= 0 && bound_margin >= 0,
          {{"mean_margin", mean_margin}, {"l2_bound_margin", bound_margin}}};
}

// ---------------------------------------------------------------------------
// Scaling: Phi_{[0, mu b], lambda}(W) has the law of sqrt(mu) Phi_{[0, b], lambda/sqrt(mu)}(W).
//
// Both ensembles use the same number of grid steps, so the grid estimators are
// themselves equal in law and discretization bias does not enter the test.

struct ScalingReport {
  EstimateSummary long_interval;  // Phi on [0, mu b] at lambda
  EstimateSummary rescaled;       // sqrt(mu) Phi on [0, b] at lambda'
  double ks = 0.0;
  double ks_critical = 0.0;
  Verdict verdict;
};

inline constexpr double kScalingKsAlpha = 0.01;

// With mismatched = true the short ensemble keeps lambda instead of
// lambda/sqrt(mu); the scaling law then predicts a different distribution.
inline ScalingReport check_scaling(const SimConfig& cfg, double mu, bool mismatched = false) {
  cfg.validate();
  if (!std::isfinite(mu) || !(mu > 0)) throw Error(ErrorCode::InvalidParameter, "mu must be positive");
  const double root = std::sqrt(mu);
  const double short_lambda = mismatched ? cfg.lambda : cfg.lambda / root;
  cfg.check_guard(std::min(cfg.lambda, cfg.lambda / root));

  const std::size_t steps = cfg.steps_for(cfg.horizon);
  const double long_horizon = mu * cfg.horizon;
  const auto lhs = map_paths<double>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    return phi_explicit(
        brownian_trace(steps, long_horizon, path_seed(cfg, Stream::ScalingLong, i), cfg.lambda));
  });
  const auto rhs = map_paths<double>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    return root * phi_explicit(brownian_trace(steps, cfg.horizon,
                                              path_seed(cfg, Stream::ScalingShort, i), short_lambda));
  });

  ScalingReport r;
  r.long_interval = summarize("phi_long_interval", lhs, cfg);
  r.rescaled = summarize("phi_rescaled", rhs, cfg);
  r.ks = stats::ks_statistic(lhs, rhs);
  r.ks_critical = stats::ks_critical_value(lhs.size(), rhs.size(), kScalingKsAlpha);
  const double combined = std::sqrt(r.long_interval.stderr_ * r.long_interval.stderr_ +
                                    r.rescaled.stderr_ * r.rescaled.stderr_);
  const double mean_margin = cfg.z * combined - std::abs(r.long_interval.mean - r.rescaled.mean);
  const double ks_margin = r.ks_critical - r.ks;
  r.verdict = {mismatched ? "scaling_mismatched_control" : "scaling",
               mean_margin >= 0 && ks_margin > 0,
               {{"mean_margin", mean_margin}, {"ks_margin", ks_margin}}};
  return r;
}

// ---------------------------------------------------------------------------
// Near-additivity: Phi_[a,s] + Phi_[s,c] - lambda <= Phi_[a,c] <= Phi_[a,s] + Phi_[s,c].

inline constexpr double kSubadditivitySlack = 1e-9;

struct SplitCheck {
  double split = 0.0;
  double phi_left = 0.0;
  double phi_right = 0.0;
  double phi_full = 0.0;
  double lower_margin = 0.0;  // phi_full - (phi_left + phi_right - lambda)
  double upper_margin = 0.0;  // phi_left + phi_right - phi_full
  bool pass = false;
};

struct SubadditivityReport {
  std::vector<SplitCheck> splits;
  bool pass = true;
};

inline SubadditivityReport check_subadditivity(const SampledPath& path, double lambda,
                                               std::span<const double> split_times) {
  check_lambda(lambda);
  SubadditivityReport report;
  const double full = phi_explicit(scan_stops(path, lambda));
  for (double s : split_times) {
    if (!(s > path.start() && s < path.end())) {
      throw Error(ErrorCode::OutOfRange, "split " + std::to_string(s) + " not inside the path");
    }
    SplitCheck c;
    c.split = s;
    c.phi_left = phi_explicit(scan_stops(restrict_path(path, path.start(), s), lambda));
    c.phi_right = phi_explicit(scan_stops(restrict_path(path, s, path.end()), lambda));
    c.phi_full = full;
    c.lower_margin = full - (c.phi_left + c.phi_right - lambda);
    c.upper_margin = c.phi_left + c.phi_right - full;
    c.pass = c.lower_margin >= -kSubadditivitySlack && c.upper_margin >= -kSubadditivitySlack;
    report.pass = report.pass && c.pass;
    report.splits.push_back(c);
  }
  return report;
}

// Subadditivity on Brownian samples: one uniformly random split per path.
struct SubadditivitySweep {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_lower_margin = std::numeric_limits<double>::infinity();
  double worst_upper_margin = std::numeric_limits<double>::infinity();
  Verdict verdict;
};

inline SubadditivitySweep subadditivity_sweep(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t steps = cfg.steps_for(cfg.horizon);
  const auto checks = map_paths<SplitCheck>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    const std::uint64_t seed = path_seed(cfg, Stream::Subadditivity, i);
    const auto path = sample_brownian(steps, cfg.horizon, seed);
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> where(0.0, cfg.horizon);
    double split = where(rng);
    while (!(split > 0.0 && split < cfg.horizon)) split = where(rng);
    const double splits[] = {split};
    return check_subadditivity(path, cfg.lambda, splits).splits.front();
  });
  SubadditivitySweep out;
  for (const auto& c : checks) {
    ++out.checked;
    if (!c.pass) ++out.violations;
    out.worst_lower_margin = std::min(out.worst_lower_margin, c.lower_margin);
    out.worst_upper_margin = std::min(out.worst_upper_margin, c.upper_margin);
  }
  out.verdict = {"subadditivity", out.violations == 0,
                 {{"worst_lower_margin", out.worst_lower_margin},
                  {"worst_upper_margin", out.worst_upper_margin}}};
  return out;
}

// ---------------------------------------------------------------------------
// epsilon_{lambda,L} = E Phi_[0,1] - E Phi_[0,L] / L, which lies in [0, lambda]
// and is nondecreasing along L = 2^r.

struct EpsilonEstimate {
  double lambda = 0.0;
  std::size_t L = 2;
  double epsilon_hat = 0.0;
  double stderr_ = 0.0;
  EstimateSummary long_interval;  // Phi on [0, L] (not divided by L)
};

struct EpsilonStudy {
  EstimateSummary unit;        // E Phi_[0,1] used inside every epsilon estimate
  EstimateSummary unit_check;  // independent E Phi_[0,1] for the consistency test
  std::vector<EpsilonEstimate> series;  // L = 2, 4, ..., or a single L
};

inline EpsilonEstimate epsilon_from(const EstimateSummary& unit, const SimConfig& cfg,
                                    std::size_t L, std::uint64_t stream) {
  auto long_values = sample_phi(cfg, stream, static_cast<double>(L), cfg.lambda);
  EpsilonEstimate e;
  e.lambda = cfg.lambda;
  e.L = L;
  e.long_interval = summarize("phi_L" + std::to_string(L), long_values, cfg);
  const double scale = 1.0 / static_cast<double>(L);
  e.epsilon_hat = unit.mean - scale * e.long_interval.mean;
  e.stderr_ = std::sqrt(unit.stderr_ * unit.stderr_ +
                        scale * scale * e.long_interval.stderr_ * e.long_interval.stderr_);
  return e;
}

// Independent ensembles on [0, 1] and [0, L]. cfg.horizon is ignored.
inline EpsilonEstimate estimate_epsilon(const SimConfig& cfg, std::size_t L) {
  cfg.validate();
  if (L < 2) throw Error(ErrorCode::InvalidParameter, "L must be at least 2");
  const auto unit_values =
      sample_phi(cfg, static_cast<std::uint64_t>(Stream::EpsilonUnit), 1.0, cfg.lambda);
  const auto unit = summarize("phi_unit", unit_values, cfg, 1.0 / cfg.lambda);
  return epsilon_from(unit, cfg, L, static_cast<std::uint64_t>(Stream::EpsilonLong) + L);
}

// Series over L = 2^r, r = 1..r_max, sharing one unit-interval ensemble.
inline EpsilonStudy estimate_epsilon_series(const SimConfig& cfg, unsigned r_max) {
  cfg.validate();
  if (r_max < 1) throw Error(ErrorCode::InvalidParameter, "r_max must be at least 1");
  EpsilonStudy study;
  study.unit = summarize(
      "phi_unit", sample_phi(cfg, static_cast<std::uint64_t>(Stream::EpsilonUnit), 1.0, cfg.lambda),
      cfg, 1.0 / cfg.lambda);
  study.unit_check = summarize(
      "phi_unit_check",
      sample_phi(cfg, static_cast<std::uint64_t>(Stream::EpsilonUnitCheck), 1.0, cfg.lambda), cfg,
      1.0 / cfg.lambda);
  for (unsigned r = 1; r <= r_max; ++r) {
    const std::size_t L = std::size_t{1} << r;
    study.series.push_back(
        epsilon_from(study.unit, cfg, L, static_cast<std::uint64_t>(Stream::EpsilonLong) + L));
  }
  return study;
}

// Bounds on every entry, monotonicity between neighbours, and agreement of
// 1/lambda + eps_hat at the largest L with the independent unit estimate.
inline Verdict check_epsilon(const EpsilonStudy& study) {
  const SimConfig& cfg = study.unit.config;
  const double z = cfg.z;
  Verdict v;
  v.name = "epsilon";
  v.pass = true;
  auto add = [&](std::string name, double margin) {
    v.pass = v.pass && margin >= 0;
    v.margins.push_back({std::move(name), margin});
  };
  for (const auto& e : study.series) {
    const std::string tag = "L" + std::to_string(e.L);
    add(tag + "_lower", e.epsilon_hat + z * e.stderr_);
    add(tag + "_upper", e.lambda + z * e.stderr_ - e.epsilon_hat);
  }
  for (std::size_t i = 1; i < study.series.size(); ++i) {
    const auto& lo = study.series[i - 1];
    const auto& hi = study.series[i];
    // The unit-interval term is shared, so only the long ensembles contribute noise.
    const double a = lo.long_interval.stderr_ / static_cast<double>(lo.L);
    const double b = hi.long_interval.stderr_ / static_cast<double>(hi.L);
    add("monotone_L" + std::to_string(hi.L), hi.epsilon_hat - lo.epsilon_hat + z * std::sqrt(a * a + b * b));
  }
  if (!study.series.empty()) {
    const auto& last = study.series.back();
    const double predicted = 1.0 / last.lambda + last.epsilon_hat;
    const double combined = std::sqrt(last.stderr_ * last.stderr_ +
                                      study.unit_check.stderr_ * study.unit_check.stderr_);
    add("consistency", z * combined - std::abs(predicted - study.unit_check.mean));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Refinement on common random numbers: a path with 2N steps and its subsample at
// every other knot. The coarse knots are a subset of the fine ones, so the grid
// estimator can only grow under refinement.

struct RefinementReport {
  EstimateSummary coarse;
  EstimateSummary fine;
  EstimateSummary gain;              // fine - coarse, per path
  double worst_decrease = 0.0;       // max over paths of coarse - fine
  Verdict verdict;
};

inline RefinementReport refinement_study(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t coarse_steps = cfg.steps_for(cfg.horizon);
  struct Pair {
    double coarse;
    double fine;
  };
  const auto pairs = map_paths<Pair>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    StopScanner fine(cfg.lambda);
    StopScanner coarse(cfg.lambda);
    std::size_t k = 0;
    walk_brownian(2 * coarse_steps, cfg.horizon, path_seed(cfg, Stream::Refinement, i),
                  [&](double t, double w) {
                    fine.push(t, w);
                    if (k++ % 2 == 0) coarse.push(t, w);
                  });
    return Pair{phi_explicit(coarse.finish()), phi_explicit(fine.finish())};
  });
  std::vector<double> c;
  std::vector<double> f;
  std::vector<double> g;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    c.push_back(p.coarse);
    f.push_back(p.fine);
    g.push_back(p.fine - p.coarse);
    worst = std::max(worst, p.coarse - p.fine);
  }
  RefinementReport r;
  r.coarse = summarize("phi_coarse", c, cfg);
  r.fine = summarize("phi_fine", f, cfg);
  r.gain = summarize("refinement_gain", g, cfg);
  r.worst_decrease = worst;
  const double pathwise = kSubadditivitySlack - worst;
  const double mean_margin = r.gain.mean + cfg.z * r.gain.stderr_;
  r.verdict = {"refinement", pathwise >= 0 && mean_margin >= 0,
               {{"pathwise_margin", pathwise}, {"mean_margin", mean_margin}}};
  return r;
}

}  // namespace regtv
