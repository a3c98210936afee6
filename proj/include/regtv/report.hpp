#pragma once

// JSON views of results. Reports carry no timestamps or host data, so equal
// inputs give byte-identical output.

#include <string>
#include <vector>

#include <json.hpp>

#include "regtv/montecarlo.hpp"
#include "regtv/oracle.hpp"
#include "regtv/path.hpp"
#include "regtv/stops.hpp"

namespace regtv {

using Json = nlohmann::ordered_json;

inline Json to_json(const PhiResult& r) {
  return Json{{"value", r.value},
              {"k", r.partition.k()},
              {"partition", r.partition.interior},
              {"lambda", r.lambda}};
}

inline Json to_json(const StopTimeTrace& trace) {
  Json stops = Json::array();
  for (const auto& s : trace.stops) {
    Json stop{{"tau", s.beyond_end ? Json(nullptr) : Json(s.time)},
              {"label", s.kind == StopKind::Upstop ? "upstop" : "downstop"},
              {"beyond_end", s.beyond_end},
              {"value", s.value}};
    stops.push_back(std::move(stop));
  }
  return Json{{"lambda", trace.lambda},
              {"alpha", trace.alpha},
              {"k_prime", trace.k_prime},
              {"stops", std::move(stops)},
              {"m_levels", trace.m_levels}};
}

inline Json to_json(const StructureReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back(Json{{"condition", std::string(to_string(v.condition))}, {"index", v.index}});
  }
  return Json{{"alternation_ok", r.alternation_ok},
              {"interior_magnitude_ok", r.interior_magnitude_ok},
              {"terminal_magnitude_ok", r.terminal_magnitude_ok},
              {"extremum_attainment_ok", r.extremum_attainment_ok},
              {"end_band_ok", r.end_band_ok},
              {"no_reverse_tick_ok", r.no_reverse_tick_ok},
              {"violations", std::move(violations)}};
}

inline const char* verdict_label(bool pass) { return pass ? "PASS" : "FAIL"; }

inline Json to_json(const EstimateSummary& s) {
  return Json{{"name", s.name},
              {"mean", s.mean},
              {"stderr", s.stderr_},
              {"n", s.n},
              {"ci_low", s.ci_low},
              {"ci_high", s.ci_high},
              {"target", s.target ? Json(*s.target) : Json(nullptr)},
              {"verdict", s.verdict ? Json(verdict_label(*s.verdict)) : Json(nullptr)}};
}

inline Json to_json(const Verdict& v) {
  Json margins = Json::object();
  for (const auto& m : v.margins) margins[m.name] = m.value;
  return Json{{"name", v.name}, {"verdict", verdict_label(v.pass)}, {"margins", std::move(margins)}};
}

inline Json to_json(const SimConfig& cfg) {
  return Json{{"lambda", cfg.lambda},
              {"n_paths", cfg.n_paths},
              {"n_steps", cfg.n_steps},
              {"horizon", cfg.horizon},
              {"z", cfg.z}};
}

// Experiment report: {experiment, config, estimates, checks, verdict, seed}.
struct ExperimentReport {
  ExperimentReport() = default;
  ExperimentReport(std::string name, SimConfig cfg) : experiment(std::move(name)), config(cfg) {}

  std::string experiment;
  SimConfig config;
  Json extra_config = Json::object();
  std::vector<EstimateSummary> estimates;
  std::vector<Verdict> checks;
  std::vector<std::string> warnings;
  Json details = Json::object();

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  Json to_json() const {
    Json cfg = regtv::to_json(config);
    for (auto it = extra_config.begin(); it != extra_config.end(); ++it) cfg[it.key()] = it.value();
    Json est = Json::array();
    for (const auto& e : estimates) est.push_back(regtv::to_json(e));
    Json chk = Json::array();
    for (const auto& c : checks) chk.push_back(regtv::to_json(c));
    Json out{{"experiment", experiment},
             {"config", std::move(cfg)},
             {"estimates", std::move(est)},
             {"checks", std::move(chk)},
             {"verdict", verdict_label(pass())},
             {"seed", config.master_seed}};
    if (!details.empty()) out["details"] = details;
    if (!warnings.empty()) out["warnings"] = warnings;
    return out;
  }
};

}  // namespace regtv
