#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>

#include <json.hpp>

#include "mdsampler/engine.hpp"

namespace md {

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::md: return "md";
    case Variant::md0: return "md0";
    case Variant::wl: return "wl";
  }
  return "md";
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "md") return Variant::md;
  if (name == "md0") return Variant::md0;
  if (name == "wl") return Variant::wl;
  throw ConfigError("unknown variant: " + name + " (md, md0, wl)");
}

inline nlohmann::json config_json(const SamplerConfig& cfg) {
  nlohmann::json j;
  j["L"] = cfg.levels;
  j["delta_h"] = cfg.delta_h;
  j["p_mx"] = cfg.p_mix;
  j["kstar"] = cfg.max_modes;
  j["burnin"] = cfg.burn_in;
  j["iters"] = cfg.total_iters;
  j["seed"] = cfg.seed;
  j["variant"] = variant_name(cfg.variant);
  j["sigma"] = cfg.local_scale;
  j["prior_count_b"] = cfg.prior_count;
  j["mode_tol"] = cfg.mode_tol;
  j["gamma_rho"] = cfg.gamma_rho;
  j["gamma_eta"] = cfg.gamma_eta;
  j["gamma_eps"] = cfg.gamma_eps;
  return j;
}

inline nlohmann::json dr_entry_json(const DrEntry& entry) {
  nlohmann::json j;
  j["lambda"] = entry.lambda;
  j["log_lambda"] = entry.lambda > 0.0 ? nlohmann::json(std::log(entry.lambda)) : nlohmann::json();
  j["samples"] = entry.samples;
  if (entry.mu_defined)
    j["mu"] = entry.mu;
  else
    j["mu"] = nullptr;
  return j;
}

inline nlohmann::json diagnostics_json(const DiagnosticsReport& d) {
  nlohmann::json j;
  j["run_length_flag"] = d.run_length_flag;
  j["stability_flag"] = d.stability_flag;
  j["stat_range_flag"] = d.stat_range_flag;
  j["max_visit_deviation"] = d.max_visit_deviation;
  j["max_weight_change"] = d.max_weight_change;
  j["max_stat_change"] = d.max_stat_change;
  j["stat_min"] = d.stat_min;
  j["stat_max"] = d.stat_max;
  j["recommendations"] = d.recommendations;
  return j;
}

// Full run report. Mode states are serialized by the caller-provided
// function; payload bindings give the representation names.
template <StateSpaceModel Model>
nlohmann::json sampler_report_json(
    const SamplerConfig& cfg, const RunResult<Model>& run,
    const std::function<nlohmann::json(const typename Model::State&)>& mode_to_json,
    const std::vector<PayloadBinding<typename Model::State>>& bindings,
    bool with_timestamp = true) {
  nlohmann::json j;
  j["config"] = config_json(cfg);
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    j["timestamp"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
  }
  j["gamma_n"] = run.schedule.gamma;
  j["acceptance"] = {{"local_proposals", run.acceptance.local_proposals},
                     {"local_accepts", run.acceptance.local_accepts},
                     {"local_rate", run.acceptance.local_rate()},
                     {"mixed_proposals", run.acceptance.mixed_proposals},
                     {"mixed_accepts", run.acceptance.mixed_accepts},
                     {"mixed_rate", run.acceptance.mixed_rate()}};
  j["best_mode"] = mode_to_json(run.best_mode);
  j["best_mode_log_density"] = run.best_mode_log_density;
  j["registered_modes"] = run.registry.size();

  nlohmann::json modes = nlohmann::json::array();
  for (int k = 1; k <= run.registry.size(); ++k) {
    const auto& entry = run.registry.entry(k);
    nlohmann::json mj;
    mj["k"] = k;
    mj["mode"] = mode_to_json(entry.mode);
    mj["log_density"] = entry.log_density;
    mj["stat"] = entry.stat;
    for (std::size_t b = 0; b < bindings.size(); ++b) {
      const auto& e = run.representations[b].entries[static_cast<std::size_t>(k)];
      mj["dr"][bindings[b].name] = dr_entry_json(e);
    }
    modes.push_back(std::move(mj));
  }
  j["modes"] = std::move(modes);
  for (std::size_t b = 0; b < bindings.size(); ++b) {
    const auto& dr = run.representations[b];
    j["dr"][bindings[b].name] = {{"residual", dr_entry_json(dr.entries[0])},
                                 {"overall_mu", dr.overall_mu},
                                 {"rows", dr.payload_rows},
                                 {"cols", dr.payload_cols}};
  }

  nlohmann::json visits = nlohmann::json::array();
  for (int k = 0; k <= run.registry.size(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int jj = 1; jj <= run.weights.levels(); ++jj) row.push_back(run.weights.visits(k, jj));
    visits.push_back(std::move(row));
  }
  j["cell_visits"] = std::move(visits);
  j["ladder"] = {{"L", run.ladder.levels()}, {"delta_h", run.ladder.spacing()}, {"H1", run.ladder.cut(1)}};
  j["diagnostics"] = diagnostics_json(run.diagnostics);
  j["burnin_iterations"] = run.burnin_iterations;
  j["main_iterations"] = run.main_iterations;
  return j;
}

}  // namespace md
