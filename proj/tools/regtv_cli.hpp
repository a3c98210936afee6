#pragma once

// Command-line front end. Results go to `out` as JSON, diagnostics to `err`.
// Exit status: 0 success or PASS, 1 FAIL verdict, 2 usage or input error.

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regtv/csv.hpp"
#include "regtv/montecarlo.hpp"
#include "regtv/oracle.hpp"
#include "regtv/report.hpp"
#include "regtv/stops.hpp"

namespace regtv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr double kSolverAgreement = 1e-9;

namespace detail {

inline SampledPath load_path(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + file);
  try {
    return read_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), file + ": " + e.what());
  }
}

inline void write_json_file(const std::string& file, const Json& j) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + file);
  out << j.dump(2) << '\n';
}

inline void check_positive_lambda(double lambda) {
  if (!std::isfinite(lambda) || !(lambda > 0)) {
    throw Error(ErrorCode::InvalidParameter, "--lambda must be positive");
  }
}

inline ExperimentReport bracket(const SimConfig& cfg, const std::string& per_path_csv) {
  SimConfig c = cfg;
  c.horizon = 1.0;
  std::vector<double> samples;
  ExperimentReport r{"bracket", c};
  auto summary = estimate_expected_phi(c, per_path_csv.empty() ? nullptr : &samples);
  auto verdict = verify_bracket(summary, c.lambda);
  summary.verdict = verdict.pass;
  r.estimates.push_back(summary);
  r.checks.push_back(verdict);
  if (!per_path_csv.empty()) {
    std::ofstream out(per_path_csv);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + per_path_csv);
    out << "path,phi\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out << i << ',' << regtv::detail::format_double(samples[i]) << '\n';
    }
  }
  return r;
}

inline ExperimentReport moments(const SimConfig& cfg) {
  ExperimentReport r{"moments", cfg};
  auto m = estimate_stop_moments(cfg);
  auto verdict = check_stop_moments(m);
  r.estimates = {m.tau0, m.dtau, m.renewal_rate};
  r.checks.push_back(verdict);
  r.details["pooled_count"] = m.pooled_count;
  if (m.too_few_stops) {
    r.warnings.push_back("TooFewStops: only " + std::to_string(m.pooled_count) +
                         " pooled stop increments");
  }
  return r;
}

inline ExperimentReport martingale(const SimConfig& cfg) {
  ExperimentReport r{"martingale", cfg};
  auto m = martingale_diag(cfg);
  auto verdict = check_martingale(m);
  r.estimates = {m.signed_sum, m.signed_sum_sq};
  r.checks.push_back(verdict);
  return r;
}

inline ExperimentReport scaling(const SimConfig& cfg, double mu) {
  ExperimentReport r{"scaling", cfg};
  r.extra_config["mu"] = mu;
  auto main = check_scaling(cfg, mu);
  auto control = check_scaling(cfg, mu, true);
  main.long_interval.verdict = main.verdict.pass;
  main.rescaled.verdict = main.verdict.pass;
  r.estimates = {main.long_interval, main.rescaled};
  r.checks.push_back(main.verdict);
  // The mismatched control must be rejected for the test to have any power.
  Verdict rejected{"mismatched_control_rejected", !control.verdict.pass, control.verdict.margins};
  r.checks.push_back(rejected);
  r.details["ks"] = main.ks;
  r.details["ks_critical"] = main.ks_critical;
  r.details["control_ks"] = control.ks;
  r.details["control_mean"] = control.rescaled.mean;
  return r;
}

inline ExperimentReport subadditivity(const SimConfig& cfg) {
  ExperimentReport r{"subadditivity", cfg};
  auto sweep = subadditivity_sweep(cfg);
  r.checks.push_back(sweep.verdict);
  r.details["checked"] = sweep.checked;
  r.details["violations"] = sweep.violations;
  return r;
}

inline ExperimentReport epsilon(const SimConfig& cfg, std::size_t L) {
  ExperimentReport r{"epsilon", cfg};
  r.extra_config["L"] = L;
  EpsilonStudy study;
  if (std::has_single_bit(L)) {
    study = estimate_epsilon_series(cfg, static_cast<unsigned>(std::countr_zero(L)));
  } else {
    cfg.validate();
    if (L < 2) throw Error(ErrorCode::InvalidParameter, "L must be at least 2");
    // A single L: no independent check ensemble is drawn.
    study.unit = summarize("phi_unit",
                           sample_phi(cfg, static_cast<std::uint64_t>(Stream::EpsilonUnit), 1.0,
                                      cfg.lambda),
                           cfg, 1.0 / cfg.lambda);
    study.series.push_back(
        epsilon_from(study.unit, cfg, L, static_cast<std::uint64_t>(Stream::EpsilonLong) + L));
  }
  r.estimates.push_back(study.unit);
  if (study.unit_check.n > 0) r.estimates.push_back(study.unit_check);
  Json series = Json::array();
  for (const auto& e : study.series) {
    EstimateSummary s = e.long_interval;
    r.estimates.push_back(s);
    series.push_back(Json{{"L", e.L}, {"epsilon_hat", e.epsilon_hat}, {"stderr", e.stderr_}});
  }
  r.details["series"] = std::move(series);
  Verdict v = check_epsilon(study);
  if (study.unit_check.n == 0) {
    std::erase_if(v.margins, [](const Margin& m) { return m.name == "consistency"; });
    v.pass = std::all_of(v.margins.begin(), v.margins.end(),
                         [](const Margin& m) { return m.value >= 0; });
  }
  r.checks.push_back(v);
  return r;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized total variation of sampled signals"};
  app.require_subcommand(1);

  double lambda = 0.0;
  std::string input;
  std::string solver = "fast";
  std::string trace_file;
  bool cross_check = false;

  auto* phi = app.add_subcommand("phi", "Compute Phi for a CSV signal");
  phi->add_option("--lambda", lambda, "Penalty per interior point")->required();
  phi->add_option("--input", input, "CSV file with header time,value")->required();
  phi->add_option("--solver", solver, "fast or dp")->check(CLI::IsMember({"fast", "dp"}));
  phi->add_option("--trace", trace_file, "Write the stop-time trace as JSON");

  auto* oracle = app.add_subcommand("oracle", "Compute Phi with the exact DP solver");
  oracle->add_option("--lambda", lambda, "Penalty per interior point")->required();
  oracle->add_option("--input", input, "CSV file with header time,value")->required();
  oracle->add_flag("--cross-check", cross_check, "Compare against the fast and brute-force solvers");

  std::size_t steps = 0;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Write Brownian sample paths as CSV");
  simulate->add_option("--steps", steps, "Grid steps per path")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", horizon, "Path length")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Master seed")->required();
  simulate->add_option("--paths", paths, "Number of paths")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_dir, "Output directory")->required();

  std::string name;
  double mu = 4.0;
  std::size_t big_l = 16;
  double z = 3.0;
  unsigned workers = 1;
  std::string per_path_csv;
  bool horizon_given = false;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  experiment->add_option("--name", name, "Experiment")
      ->required()
      ->check(CLI::IsMember(
          {"bracket", "moments", "scaling", "subadditivity", "epsilon", "martingale"}));
  experiment->add_option("--lambda", lambda, "Penalty per interior point")->required();
  experiment->add_option("--paths", paths, "Paths per ensemble")->required();
  experiment->add_option("--steps", steps, "Grid steps per unit time")->required();
  experiment->add_option("--seed", seed, "Master seed")->required();
  experiment->add_option("--mu", mu, "Time scale for the scaling experiment");
  experiment->add_option("--L", big_l, "Interval length for epsilon; powers of two give a series");
  auto* horizon_opt = experiment->add_option("--horizon", horizon, "Interval length b");
  experiment->add_option("--z", z, "Confidence multiplier");
  experiment->add_option("--workers", workers, "Worker threads; does not change results");
  experiment->add_option("--per-path-csv", per_path_csv, "bracket: write per-path Phi values");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (phi->parsed()) {
      detail::check_positive_lambda(lambda);
      const auto path = detail::load_path(input);
      PhiResult result = solver == "dp" ? dp_optimal(path, lambda) : phi_fast(path, lambda);
      Json j = to_json(result);
      j["solver"] = solver;
      out << j.dump(2) << '\n';
      if (!trace_file.empty()) detail::write_json_file(trace_file, to_json(scan_stops(path, lambda)));
      return kExitOk;
    }

    if (oracle->parsed()) {
      detail::check_positive_lambda(lambda);
      const auto path = detail::load_path(input);
      const auto dp = dp_optimal(path, lambda);
      Json j = to_json(dp);
      j["solver"] = "dp";
      j["structure"] = to_json(check_structure(path, lambda, dp.partition));
      bool agree = true;
      if (cross_check) {
        const auto fast = phi_fast(path, lambda);
        Json cc{{"fast", fast.value}, {"fast_difference", fast.value - dp.value}};
        agree = std::abs(fast.value - dp.value) <= kSolverAgreement;
        if (path.size() - 2 <= kExhaustiveMaxInterior) {
          const auto ex = exhaustive_optimal(path, lambda);
          cc["exhaustive"] = ex.value;
          cc["exhaustive_difference"] = ex.value - dp.value;
          agree = agree && std::abs(ex.value - dp.value) <= kSolverAgreement;
        }
        cc["verdict"] = verdict_label(agree);
        j["cross_check"] = std::move(cc);
      }
      out << j.dump(2) << '\n';
      return agree ? kExitOk : kExitFail;
    }

    if (simulate->parsed()) {
      std::filesystem::create_directories(out_dir);
      const int width = std::max<int>(5, static_cast<int>(std::to_string(paths - 1).size()));
      Json files = Json::array();
      for (std::size_t i = 0; i < paths; ++i) {
        std::ostringstream fname;
        fname << "path_" << std::setw(width) << std::setfill('0') << i << ".csv";
        const auto file = std::filesystem::path(out_dir) / fname.str();
        std::ofstream f(file);
        if (!f) throw Error(ErrorCode::ParseError, "cannot write " + file.string());
        write_csv(f, sample_brownian(steps, horizon, derive_seed(seed, i)));
        files.push_back(fname.str());
      }
      out << Json{{"steps", steps}, {"horizon", horizon}, {"seed", seed}, {"paths", paths},
                  {"files", files}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    // experiment
    detail::check_positive_lambda(lambda);
    horizon_given = horizon_opt->count() > 0;
    SimConfig cfg;
    cfg.lambda = lambda;
    cfg.n_paths = paths;
    cfg.n_steps = steps;
    cfg.master_seed = seed;
    cfg.z = z;
    cfg.workers = workers;
    cfg.horizon = horizon;
    if (name == "moments" && !horizon_given) cfg.horizon = 100 * lambda * lambda;

    ExperimentReport report;
    if (name == "bracket") {
      report = detail::bracket(cfg, per_path_csv);
    } else if (name == "moments") {
      report = detail::moments(cfg);
    } else if (name == "scaling") {
      report = detail::scaling(cfg, mu);
    } else if (name == "subadditivity") {
      report = detail::subadditivity(cfg);
    } else if (name == "epsilon") {
      report = detail::epsilon(cfg, big_l);
    } else {
      report = detail::martingale(cfg);
    }
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    out << report.to_json().dump(2) << '\n';
    return report.pass() ? kExitOk : kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace regtv::cli
