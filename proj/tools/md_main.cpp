// Command-line experiment runner for the multi-domain sampler.
//
// Subcommands: rastrigin, simulate, bn-sim, bn-enumerate, bn-learn, crossval.
// Exit codes: 0 success, 2 flag error, 3 data error, 4 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "mdsampler/continuous/model.hpp"
#include "mdsampler/continuous/quadrature.hpp"
#include "mdsampler/dag/model.hpp"
#include "mdsampler/engine.hpp"
#include "mdsampler/io/dataset_io.hpp"
#include "mdsampler/io/evaluate.hpp"
#include "mdsampler/io/predictive.hpp"
#include "mdsampler/io/simulate.hpp"
#include "mdsampler/oracle/enumerate.hpp"
#include "mdsampler/oracle/landscape.hpp"
#include "mdsampler/report.hpp"

namespace {

using nlohmann::json;

// Buffered outputs: nothing touches the disk until the whole command has
// succeeded.
struct OutputSet {
  std::vector<std::pair<std::filesystem::path, std::string>> files;

  void add(const std::filesystem::path& path, std::string content) {
    files.emplace_back(path, std::move(content));
  }
  void add_json(const std::filesystem::path& path, const json& j) { add(path, j.dump(2) + "\n"); }

  void flush() const {
    for (const auto& [path, content] : files) {
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      const auto tmp = path.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw md::DataError("cannot write " + path.string());
        out << content;
      }
      std::filesystem::rename(tmp, path);
    }
  }
};

struct CommonFlags {
  md::SamplerConfig cfg;
  std::string variant = "md";
  std::string out_dir = "out";

  void attach(CLI::App* app, int default_levels, double default_dh, int default_kstar,
              std::int64_t default_iters, std::int64_t default_burnin) {
    cfg.levels = default_levels;
    cfg.delta_h = default_dh;
    cfg.max_modes = default_kstar;
    cfg.total_iters = default_iters;
    cfg.burn_in = default_burnin;
    app->add_option("--L", cfg.levels, "density partition intervals");
    app->add_option("--delta-h", cfg.delta_h, "ladder spacing in log density");
    app->add_option("--p-mx", cfg.p_mix, "mixed jump probability");
    app->add_option("--kstar", cfg.max_modes, "maximum number of recorded modes");
    app->add_option("--iters", cfg.total_iters, "total iterations including burn-in");
    app->add_option("--burnin", cfg.burn_in, "burn-in iterations");
    app->add_option("--seed", cfg.seed, "root seed");
    app->add_option("--sigma", cfg.local_scale, "local proposal scale (continuous)");
    app->add_option("--prior-count", cfg.prior_count, "mixed-jump prior count b (DAG)");
    app->add_option("--variant", variant, "sampler variant: md, md0, wl");
    app->add_option("--rho", cfg.gamma_rho, "gamma shrink factor");
    app->add_option("--eta", cfg.gamma_eta, "uniformity threshold for gamma shrinks");
    app->add_option("--eps-gamma", cfg.gamma_eps, "deterministic-phase entry threshold");
    app->add_option("--out", out_dir, "output directory");
  }

  md::SamplerConfig resolve() const {
    md::SamplerConfig c = cfg;
    c.variant = md::variant_from_name(variant);
    if (c.variant != md::Variant::md) c.p_mix = 0.0;
    c.validate();
    return c;
  }
};

template <class Fn>
void parallel_indexed(int n, std::vector<std::exception_ptr>& errors, Fn&& fn) {
  errors.assign(static_cast<std::size_t>(n), nullptr);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

json euclidean_state_json(const std::vector<double>& x) { return json(x); }

json dag_state_json(const md::Dag& g) {
  json edges = json::array();
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j < g.nodes(); ++j)
      if (g.has_edge(i, j)) edges.push_back({i + 1, j + 1});
  return json{{"m", g.nodes()}, {"edges", edges}};
}

std::string adjacency_tsv(const std::vector<double>& a, int m) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out << (j ? "\t" : "") << a[static_cast<std::size_t>(i) * m + j];
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// rastrigin

struct RastriginRepResult {
  json report;
  std::map<int, double> log_lambda_by_domain;   // oracle domain id -> log lambda
  std::map<int, std::vector<double>> mu_by_domain;
  std::vector<double> overall_mu;
  std::map<std::string, double> scalar_estimates;
  int registered = 0;
  int matched = 0;
  double local_rate = 0.0;
  double mixed_rate = 0.0;
};

std::vector<md::PayloadBinding<std::vector<double>>> rastrigin_bindings(int m) {
  using State = std::vector<double>;
  std::vector<md::PayloadBinding<State>> bindings;
  bindings.push_back({"coords", static_cast<std::size_t>(m), 1,
                      [](const State& x, std::span<double> out) {
                        std::copy(x.begin(), x.end(), out.begin());
                      }});
  bindings.push_back({"e2s", 1, 1, [](const State& x, std::span<double> out) {
                        double s = 0.0;
                        for (double v : x) s += v;
                        out[0] = std::exp(2.0 * s);
                      }});
  bindings.push_back({"prod", 1, 1, [](const State& x, std::span<double> out) {
                        double p = 1.0;
                        for (double v : x) p *= v;
                        out[0] = p;
                      }});
  bindings.push_back({"pow5", 1, 1, [](const State& x, std::span<double> out) {
                        double s = 0.0;
                        for (double v : x) s += v * v * v * v * v;
                        out[0] = s;
                      }});
  bindings.push_back({"pow6", 1, 1, [](const State& x, std::span<double> out) {
                        double s = 0.0;
                        for (double v : x) s += v * v * v * v * v * v;
                        out[0] = s;
                      }});
  return bindings;
}

RastriginRepResult run_rastrigin_rep(const md::SamplerConfig& cfg, int m, double amplitude,
                                     const md::ProductOracle& oracle, std::uint64_t rep) {
  md::RastriginTarget target(m, amplitude);
  md::ContinuousModel model(target, cfg.local_scale, cfg.mode_tol);
  const auto bindings = rastrigin_bindings(m);
  md::RngStream rng = md::RngStream(cfg.seed).split(rep);
  // Start away from any exact mode: the anchored top band has measure zero.
  std::vector<double> start(static_cast<std::size_t>(m));
  for (auto& v : start) v = rng.normal();
  const auto run = md::run_sampler(model, cfg, start, bindings, rng);

  RastriginRepResult result;
  result.registered = run.registry.size();
  result.local_rate = run.acceptance.local_rate();
  result.mixed_rate = run.acceptance.mixed_rate();
  const auto& coords_dr = run.representations[0];
  for (int k = 1; k <= run.registry.size(); ++k) {
    const int dom = oracle.classify_mode(run.registry.entry(k).mode, 1e-3);
    if (dom < 0) continue;
    ++result.matched;
    const auto& entry = coords_dr.entries[static_cast<std::size_t>(k)];
    if (entry.lambda > 0.0) result.log_lambda_by_domain[dom] = std::log(entry.lambda);
    if (entry.mu_defined) result.mu_by_domain[dom] = entry.mu;
  }
  result.overall_mu = coords_dr.overall_mu;
  for (std::size_t b = 1; b < bindings.size(); ++b)
    result.scalar_estimates[bindings[b].name] = run.representations[b].overall_mu[0];

  result.report = md::sampler_report_json<md::ContinuousModel>(
      cfg, run, euclidean_state_json, bindings);
  result.report["rep"] = rep;
  return result;
}

int cmd_rastrigin(const CommonFlags& common, int m, double amplitude, int reps) {
  const md::SamplerConfig cfg = common.resolve();
  if (m < 1 || m > 12) throw md::ConfigError("rastrigin dimension must lie in 1..12");
  if (reps < 1) throw md::ConfigError("reps must be >= 1");

  const auto oracle = md::rastrigin_oracle(m, amplitude, 1e-12);
  const auto log_density_1d = [amplitude](double x) {
    return -(x * x + amplitude * (1.0 - std::cos(3.14159265358979323846 * x)));
  };

  std::vector<RastriginRepResult> results(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> errors;
  parallel_indexed(reps, errors, [&](int rep) {
    results[static_cast<std::size_t>(rep)] =
        run_rastrigin_rep(cfg, m, amplitude, oracle, static_cast<std::uint64_t>(rep));
  });

  // Layer structure: domains grouped by the number of off-center coordinates.
  const int basins = static_cast<int>(oracle.coordinate.basins.size());
  const int center = basins / 2;
  std::map<int, std::vector<int>> layers;
  for (std::size_t d = 0; d < oracle.domains.size(); ++d) {
    int off = 0;
    for (int p : oracle.domains[d].pattern)
      if (p != center) ++off;
    layers[off].push_back(static_cast<int>(d));
  }

  // Scalar references by separable quadrature.
  std::map<std::string, double> scalar_truth;
  scalar_truth["e2s"] = std::pow(
      md::expect_coordinate(log_density_1d, [](double x) { return std::exp(2.0 * x); },
                            oracle.coordinate),
      m);
  scalar_truth["prod"] = std::pow(
      md::expect_coordinate(log_density_1d, [](double x) { return x; }, oracle.coordinate), m);
  scalar_truth["pow5"] =
      m * md::expect_coordinate(log_density_1d, [](double x) { return std::pow(x, 5); },
                                oracle.coordinate);
  scalar_truth["pow6"] =
      m * md::expect_coordinate(log_density_1d, [](double x) { return std::pow(x, 6); },
                                oracle.coordinate);

  json table;
  std::printf("rastrigin m=%d A=%g variant=%s reps=%d iters=%lld\n", m, amplitude,
              common.variant.c_str(), reps, static_cast<long long>(cfg.total_iters));
  std::printf("%-8s %-18s %-18s\n", "layer", "mse(log lambda)", "mse(mu)");
  for (const auto& [off, domain_ids] : layers) {
    double mse_log = 0.0, mse_mu = 0.0;
    std::int64_t n_log = 0, n_mu = 0;
    for (const auto& rep : results) {
      for (int d : domain_ids) {
        const double truth = std::log(oracle.domains[static_cast<std::size_t>(d)].lambda);
        const auto it = rep.log_lambda_by_domain.find(d);
        if (it != rep.log_lambda_by_domain.end()) {
          mse_log += (it->second - truth) * (it->second - truth);
          ++n_log;
        }
        const auto mu_it = rep.mu_by_domain.find(d);
        if (mu_it != rep.mu_by_domain.end()) {
          const auto& mu_truth = oracle.domains[static_cast<std::size_t>(d)].mean;
          for (int c = 0; c < m; ++c) {
            const double err = mu_it->second[static_cast<std::size_t>(c)] - mu_truth[static_cast<std::size_t>(c)];
            mse_mu += err * err;
            ++n_mu;
          }
        }
      }
    }
    const double v_log = n_log ? mse_log / static_cast<double>(n_log) : std::nan("");
    const double v_mu = n_mu ? mse_mu / static_cast<double>(n_mu) : std::nan("");
    std::printf("%-8d %-18.6g %-18.6g\n", off + 1, v_log, v_mu);
    table["layers"][std::to_string(off + 1)] = {{"mse_log_lambda", v_log}, {"mse_mu", v_mu}};
  }
  std::printf("%-8s %-18s\n", "h", "mse");
  for (const auto& [name, truth] : scalar_truth) {
    double mse = 0.0;
    for (const auto& rep : results) {
      const double err = rep.scalar_estimates.at(name) - truth;
      mse += err * err;
    }
    mse /= static_cast<double>(reps);
    std::printf("%-8s %-18.6g\n", name.c_str(), mse);
    table["functions"][name] = {{"mse", mse}, {"truth", truth}};
  }
  double mean_local = 0.0, mean_mixed = 0.0, mean_registered = 0.0;
  for (const auto& rep : results) {
    mean_local += rep.local_rate;
    mean_mixed += rep.mixed_rate;
    mean_registered += rep.registered;
  }
  table["mean_local_rate"] = mean_local / reps;
  table["mean_mixed_rate"] = mean_mixed / reps;
  table["mean_registered_modes"] = mean_registered / reps;
  std::printf("mean registered modes %.2f, local rate %.3f, mixed rate %.3f\n",
              mean_registered / reps, mean_local / reps, mean_mixed / reps);

  OutputSet out;
  for (int rep = 0; rep < reps; ++rep)
    out.add_json(std::filesystem::path(common.out_dir) /
                     ("rastrigin_rep" + std::to_string(rep) + ".json"),
                 results[static_cast<std::size_t>(rep)].report);
  out.add_json(std::filesystem::path(common.out_dir) / "rastrigin_mse.json", table);
  out.flush();
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& network, std::int64_t rows, double fraction,
                 bool by_condition, std::int64_t rows_per_cond, std::uint64_t seed,
                 const std::string& out_file) {
  const md::GroundTruthBn bn = md::make_preset_network(network);
  md::RngStream rng(seed);
  md::DiscreteDataset data;
  if (by_condition) {
    std::vector<int> targets;
    for (int c = 0; c < 9; ++c) targets.push_back(c % bn.structure.nodes());
    data = md::simulate_condition_dataset(bn, rows_per_cond, targets, rng);
  } else {
    data = md::simulate_dataset(bn, rows, fraction, rng);
  }
  md::save_dataset(out_file, data);
  const auto net_path = out_file + ".network.txt";
  {
    std::ofstream out(net_path);
    out << md::write_network(bn.structure, bn.arities);
  }
  std::printf("wrote %lld rows of %s to %s (generating network in %s)\n",
              static_cast<long long>(data.rows()), network.c_str(), out_file.c_str(),
              net_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// bn shared helpers

std::vector<md::PayloadBinding<md::Dag>> adjacency_binding(int m) {
  std::vector<md::PayloadBinding<md::Dag>> bindings;
  bindings.push_back({"adjacency", static_cast<std::size_t>(m), static_cast<std::size_t>(m),
                      [](const md::Dag& g, std::span<double> out) { g.fill_adjacency(out); }});
  return bindings;
}

struct BnRun {
  md::RunResult<md::DagModel> run;
  json report;
};

BnRun run_bn(const md::SamplerConfig& cfg, const md::DiscreteDataset& data, md::RngStream rng) {
  md::ScoreCache cache(data, 0.1, 1.0);
  md::DagModel model(cache, cfg.prior_count);
  const auto bindings = adjacency_binding(data.nodes);
  auto run = md::run_sampler(model, cfg, md::Dag(data.nodes, 4), bindings, rng);
  json report = md::sampler_report_json<md::DagModel>(cfg, run, dag_state_json, bindings);
  return {std::move(run), std::move(report)};
}

struct OracleComparison {
  int oracle_modes_above = 0;  // oracle modes with lambda > 1e-4
  int missed = 0;
  double mse_log_lambda = std::nan("");
  double mse_adjacency_k = std::nan("");
  double mse_mean_adjacency = std::nan("");
  double best_gap = std::nan("");  // oracle best score minus found best
};

OracleComparison compare_to_oracle(const md::RunResult<md::DagModel>& run,
                                   const md::ExactLandscape& oracle) {
  OracleComparison cmp;
  const auto& dr = run.representations[0];
  const std::size_t mm = static_cast<std::size_t>(oracle.nodes) * oracle.nodes;

  double se_log = 0.0, se_adj = 0.0;
  std::int64_t n_log = 0, n_adj = 0;
  for (const auto& mode : oracle.modes) {
    if (mode.lambda <= 1e-4) continue;
    ++cmp.oracle_modes_above;
    int found = 0;
    for (int k = 1; k <= run.registry.size(); ++k) {
      if (run.registry.entry(k).mode == mode.graph) {
        found = k;
        break;
      }
    }
    if (found == 0) {
      ++cmp.missed;
      continue;
    }
    const auto& entry = dr.entries[static_cast<std::size_t>(found)];
    if (entry.lambda > 0.0) {
      const double err = std::log(entry.lambda) - std::log(mode.lambda);
      se_log += err * err;
      ++n_log;
    }
    if (entry.mu_defined) {
      for (std::size_t e = 0; e < mm; ++e) {
        const double err = entry.mu[e] - mode.adjacency[e];
        se_adj += err * err;
        ++n_adj;
      }
    }
  }
  if (n_log) cmp.mse_log_lambda = se_log / static_cast<double>(n_log);
  if (n_adj) cmp.mse_adjacency_k = se_adj / static_cast<double>(n_adj);

  double se_mean = 0.0;
  for (std::size_t e = 0; e < mm; ++e) {
    const double err = dr.overall_mu[e] - oracle.mean_adjacency[e];
    se_mean += err * err;
  }
  cmp.mse_mean_adjacency = se_mean / static_cast<double>(mm);
  cmp.best_gap = oracle.modes.front().log_score - run.best_mode_log_density;
  return cmp;
}

// ---------------------------------------------------------------------------
// bn-sim

int cmd_bn_sim(const CommonFlags& common, const std::string& network, int datasets,
               std::int64_t rows, double fraction, const std::vector<std::string>& variants) {
  const md::SamplerConfig base = common.resolve();
  if (datasets < 1) throw md::ConfigError("datasets must be >= 1");
  const md::GroundTruthBn bn = md::make_preset_network(network);
  if (bn.structure.nodes() > 6)
    throw md::ConfigError("bn-sim requires an enumerable network (m <= 6)");

  struct Job {
    md::DiscreteDataset data;
    md::ExactLandscape oracle;
    std::map<std::string, OracleComparison> by_variant;
    double mode_count = 0.0;
  };
  std::vector<Job> jobs(static_cast<std::size_t>(datasets));

  std::vector<std::exception_ptr> errors;
  parallel_indexed(datasets, errors, [&](int d) {
    Job& job = jobs[static_cast<std::size_t>(d)];
    md::RngStream data_rng = md::RngStream(base.seed).split(1000 + static_cast<std::uint64_t>(d));
    job.data = md::simulate_dataset(bn, rows, fraction, data_rng);
    job.oracle = md::exact_landscape(job.data, 0.1, 1.0, 4);
    job.mode_count = static_cast<double>(job.oracle.modes.size());
    for (const auto& v : variants) {
      md::SamplerConfig cfg = base;
      cfg.variant = md::variant_from_name(v);
      if (cfg.variant != md::Variant::md) cfg.p_mix = 0.0;
      md::RngStream rng = md::RngStream(base.seed).split(static_cast<std::uint64_t>(d));
      const auto bn_run = run_bn(cfg, job.data, rng);
      job.by_variant[v] = compare_to_oracle(bn_run.run, job.oracle);
    }
  });

  json summary;
  summary["network"] = network;
  summary["datasets"] = datasets;
  double avg_modes = 0.0;
  for (const auto& job : jobs) avg_modes += job.mode_count;
  summary["mean_oracle_modes"] = avg_modes / datasets;
  std::printf("bn-sim network=%s datasets=%d rows=%lld (mean oracle modes %.2f)\n",
              network.c_str(), datasets, static_cast<long long>(rows), avg_modes / datasets);
  std::printf("%-6s %-14s %-16s %-16s %-16s\n", "var", "missed_modes", "mse(log lambda)",
              "mse(A_k)", "mse(A)");
  for (const auto& v : variants) {
    double missed = 0.0, mse_l = 0.0, mse_ak = 0.0, mse_a = 0.0;
    int n_l = 0, n_ak = 0;
    for (const auto& job : jobs) {
      const auto& cmp = job.by_variant.at(v);
      missed += cmp.missed;
      if (!std::isnan(cmp.mse_log_lambda)) {
        mse_l += cmp.mse_log_lambda;
        ++n_l;
      }
      if (!std::isnan(cmp.mse_adjacency_k)) {
        mse_ak += cmp.mse_adjacency_k;
        ++n_ak;
      }
      mse_a += cmp.mse_mean_adjacency;
    }
    missed /= datasets;
    mse_l = n_l ? mse_l / n_l : std::nan("");
    mse_ak = n_ak ? mse_ak / n_ak : std::nan("");
    mse_a /= datasets;
    std::printf("%-6s %-14.3f %-16.6g %-16.6g %-16.6g\n", v.c_str(), missed, mse_l, mse_ak, mse_a);
    summary["variants"][v] = {{"missed_modes", missed},
                              {"mse_log_lambda", mse_l},
                              {"mse_adjacency_k", mse_ak},
                              {"mse_mean_adjacency", mse_a}};
  }

  OutputSet out;
  out.add_json(std::filesystem::path(common.out_dir) / "bn_sim_summary.json", summary);
  out.flush();
  return 0;
}

// ---------------------------------------------------------------------------
// bn-enumerate

int cmd_bn_enumerate(const std::string& data_file, double beta, double alpha, int cap,
                     const std::string& out_dir) {
  if (data_file.empty()) throw md::ConfigError("bn-enumerate requires --data");
  const auto data = md::load_dataset(data_file);
  if (data.nodes > 6)
    throw md::ConfigError("exhaustive enumeration supports m <= 6, dataset has m = " +
                          std::to_string(data.nodes));
  const auto ls = md::exact_landscape(data, beta, alpha, cap);

  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(ls.dataset_digest));
  std::filesystem::create_directories(out_dir);
  const auto bin_path = std::filesystem::path(out_dir) / ("landscape_" + std::string(digest) + ".bin");
  md::save_landscape(ls, bin_path.string());

  json summary;
  summary["dataset"] = data_file;
  summary["digest"] = digest;
  summary["dag_count"] = ls.dag_count;
  summary["log_normalizer"] = ls.log_normalizer;
  summary["mode_count"] = ls.modes.size();
  double lambda_sum = 0.0;
  json modes = json::array();
  for (const auto& mode : ls.modes) {
    lambda_sum += mode.lambda;
    modes.push_back({{"graph", dag_state_json(mode.graph)},
                     {"log_score", mode.log_score},
                     {"lambda", mode.lambda},
                     {"log_lambda", std::log(mode.lambda)},
                     {"basin_size", mode.basin_size}});
  }
  summary["modes"] = std::move(modes);
  summary["lambda_sum"] = lambda_sum;
  summary["mean_adjacency"] = ls.mean_adjacency;

  OutputSet out;
  out.add_json(std::filesystem::path(out_dir) / ("landscape_" + std::string(digest) + ".json"),
               summary);
  out.flush();
  std::printf("enumerated %lld DAGs, %zu modes, lambda sum %.12f\ncache: %s\n",
              static_cast<long long>(ls.dag_count), ls.modes.size(), lambda_sum,
              bin_path.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// bn-learn

int cmd_bn_learn(const CommonFlags& common, const std::string& data_file, double threshold) {
  if (data_file.empty()) throw md::ConfigError("bn-learn requires --data");
  const md::SamplerConfig cfg = common.resolve();
  const auto data = md::load_dataset(data_file);

  md::RngStream rng(cfg.seed);
  const auto bn_run = run_bn(cfg, data, rng);
  const auto& run = bn_run.run;
  const auto& dr = run.representations[0];
  const int m = data.nodes;

  // Mean network and per-domain local networks by thresholding.
  const auto mean_edges = md::threshold_network(dr.overall_mu, m, threshold);
  std::vector<std::pair<double, int>> order;  // (-lambda, k)
  for (int k = 1; k <= run.registry.size(); ++k)
    order.emplace_back(-dr.entries[static_cast<std::size_t>(k)].lambda, k);
  std::sort(order.begin(), order.end());

  // Nodes whose parent sets differ across the local networks.
  std::vector<std::vector<std::set<int>>> parents_by_domain;
  for (const auto& [neg_lambda, k] : order) {
    const auto& entry = dr.entries[static_cast<std::size_t>(k)];
    std::vector<std::set<int>> parents(static_cast<std::size_t>(m));
    if (entry.mu_defined) {
      for (const auto& [i, j] : md::threshold_network(entry.mu, m, threshold))
        parents[static_cast<std::size_t>(j)].insert(i);
    }
    parents_by_domain.push_back(std::move(parents));
  }
  std::vector<int> varying_nodes;
  for (int node = 0; node < m; ++node) {
    for (std::size_t d = 1; d < parents_by_domain.size(); ++d) {
      if (parents_by_domain[d][static_cast<std::size_t>(node)] !=
          parents_by_domain[0][static_cast<std::size_t>(node)]) {
        varying_nodes.push_back(node);
        break;
      }
    }
  }

  std::printf("bn-learn %s: %d variables, %lld rows, variant=%s\n", data_file.c_str(), m,
              static_cast<long long>(data.rows()), common.variant.c_str());
  std::printf("best log posterior %.4f (%d modes registered)\n", run.best_mode_log_density,
              run.registry.size());
  std::printf("mean network (c=%.2f): %zu edges\n", threshold, mean_edges.size());
  std::printf("%-12s %-14s parents of varying nodes\n", "log lambda", "log P(mode)");
  json locals = json::array();
  for (std::size_t d = 0; d < order.size(); ++d) {
    const int k = order[d].second;
    const auto& entry = dr.entries[static_cast<std::size_t>(k)];
    const double log_lambda = entry.lambda > 0.0 ? std::log(entry.lambda) : -1e308;
    std::ostringstream desc;
    for (int node : varying_nodes) {
      desc << " Z" << (node + 1) << "<-{";
      bool first = true;
      for (int p : parents_by_domain[d][static_cast<std::size_t>(node)]) {
        desc << (first ? "" : ",") << "Z" << (p + 1);
        first = false;
      }
      desc << "}";
    }
    std::printf("%-12.5f %-14.4f%s\n", log_lambda, run.registry.entry(k).log_density,
                desc.str().c_str());
    json lj;
    lj["k"] = k;
    lj["log_lambda"] = log_lambda;
    lj["log_mode_density"] = run.registry.entry(k).log_density;
    lj["edges"] = json::array();
    if (entry.mu_defined)
      for (const auto& [i, j] : md::threshold_network(entry.mu, m, threshold))
        lj["edges"].push_back(json::array({i + 1, j + 1}));
    locals.push_back(std::move(lj));
  }

  OutputSet out;
  const std::filesystem::path dir(common.out_dir);
  out.add_json(dir / "bn_learn_report.json", bn_run.report);
  out.add(dir / "mean_adjacency.tsv", adjacency_tsv(dr.overall_mu, m));
  {
    md::Dag mean_graph(m, m);  // holds thresholded edges; may exceed the sampler cap
    bool representable = true;
    for (const auto& [i, j] : mean_edges) {
      if (!mean_graph.addition_is_acyclic(i, j)) {
        representable = false;
        break;
      }
      mean_graph.add_edge(i, j);
    }
    if (representable)
      out.add(dir / "mean_network.txt", md::write_network(mean_graph, data.arities));
  }
  json local_out;
  local_out["threshold"] = threshold;
  local_out["varying_nodes"] = varying_nodes;
  local_out["locals"] = std::move(locals);
  out.add_json(dir / "local_networks.json", local_out);
  out.flush();
  return 0;
}

// ---------------------------------------------------------------------------
// crossval

int cmd_crossval(const CommonFlags& common, const std::string& data_file, int folds,
                 bool by_condition, double threshold, const std::string& reference_file) {
  if (data_file.empty()) throw md::ConfigError("crossval requires --data");
  const md::SamplerConfig base = common.resolve();
  const auto data = md::load_dataset(data_file);

  std::optional<md::Dag> reference;
  if (!reference_file.empty()) {
    std::ifstream in(reference_file);
    if (!in) throw md::DataError("cannot open reference network: " + reference_file);
    reference = md::read_network(in).first;
  }

  md::RngStream split_rng = md::RngStream(base.seed).split(777);
  const auto fold_rows =
      md::crossval_split(data, folds, by_condition ? md::SplitMode::by_condition : md::SplitMode::by_row,
                         split_rng);
  const int n_folds = static_cast<int>(fold_rows.size());

  struct FoldResult {
    double log_pred_mean = 0.0;
    double log_pred_dr = 0.0;
    int tp = -1, fp = -1;
    std::int64_t test_rows = 0;
  };
  std::vector<FoldResult> fold_results(static_cast<std::size_t>(n_folds));

  std::vector<std::exception_ptr> errors;
  parallel_indexed(n_folds, errors, [&](int f) {
    std::vector<std::int64_t> train_ids;
    for (int g = 0; g < n_folds; ++g)
      if (g != f)
        train_ids.insert(train_ids.end(), fold_rows[static_cast<std::size_t>(g)].begin(),
                         fold_rows[static_cast<std::size_t>(g)].end());
    const auto train = data.subset(train_ids);
    const auto test = data.subset(fold_rows[static_cast<std::size_t>(f)]);

    md::SamplerConfig cfg = base;
    md::RngStream rng = md::RngStream(base.seed).split(static_cast<std::uint64_t>(f));
    const auto bn_run = run_bn(cfg, train, rng);
    const auto& dr = bn_run.run.representations[0];
    const int m = train.nodes;

    // Mean network with a fallback to the best mode if thresholding is cyclic.
    const auto mean_edges = md::threshold_network(dr.overall_mu, m, threshold);
    md::Dag mean_graph = bn_run.run.best_mode;
    {
      md::Dag candidate(m, m);
      bool ok = true;
      for (const auto& [i, j] : mean_edges) {
        if (!candidate.addition_is_acyclic(i, j)) {
          ok = false;
          break;
        }
        candidate.add_edge(i, j);
      }
      if (ok) mean_graph = candidate;
    }

    md::PredictiveModel mean_model(mean_graph, train);
    std::vector<md::PredictiveModel> local_models;
    std::vector<double> lambdas;
    for (int k = 1; k <= bn_run.run.registry.size(); ++k) {
      const auto& entry = dr.entries[static_cast<std::size_t>(k)];
      if (!entry.mu_defined || entry.lambda <= 0.0) continue;
      const auto local_edges = md::threshold_network(entry.mu, m, threshold);
      md::Dag local(m, m);
      bool ok = true;
      for (const auto& [i, j] : local_edges) {
        if (!local.addition_is_acyclic(i, j)) {
          ok = false;
          break;
        }
        local.add_edge(i, j);
      }
      local_models.emplace_back(ok ? local : bn_run.run.registry.entry(k).mode, train);
      lambdas.push_back(entry.lambda);
    }

    FoldResult& fr = fold_results[static_cast<std::size_t>(f)];
    fr.test_rows = test.rows();
    for (std::int64_t r = 0; r < test.rows(); ++r) {
      fr.log_pred_mean += mean_model.log_probability(test, r);
      fr.log_pred_dr += md::dr_predictive_log_probability(test, r, local_models, lambdas,
                                                          mean_model, dr.entries[0].lambda);
    }
    if (reference) {
      const auto score = md::score_vs_reference(mean_edges, *reference);
      fr.tp = score.true_positives;
      fr.fp = score.false_positives;
    }
  });

  std::printf("crossval %s: %d folds (%s)\n", data_file.c_str(), n_folds,
              by_condition ? "by condition" : "by row");
  std::printf("%-6s %-10s %-16s %-16s %-6s %-6s\n", "fold", "rows", "logpred(mean)",
              "logpred(DR)", "TP", "FP");
  json folds_json = json::array();
  double mean_total = 0.0, dr_total = 0.0;
  for (int f = 0; f < n_folds; ++f) {
    const auto& fr = fold_results[static_cast<std::size_t>(f)];
    mean_total += fr.log_pred_mean;
    dr_total += fr.log_pred_dr;
    std::printf("%-6d %-10lld %-16.3f %-16.3f", f + 1, static_cast<long long>(fr.test_rows),
                fr.log_pred_mean, fr.log_pred_dr);
    if (fr.tp >= 0)
      std::printf(" %-6d %-6d\n", fr.tp, fr.fp);
    else
      std::printf(" %-6s %-6s\n", "-", "-");
    folds_json.push_back({{"fold", f + 1},
                          {"rows", fr.test_rows},
                          {"log_pred_mean", fr.log_pred_mean},
                          {"log_pred_dr", fr.log_pred_dr},
                          {"tp", fr.tp},
                          {"fp", fr.fp}});
  }
  std::printf("average: mean %.3f  DR %.3f\n", mean_total / n_folds, dr_total / n_folds);

  json summary;
  summary["folds"] = std::move(folds_json);
  summary["avg_log_pred_mean"] = mean_total / n_folds;
  summary["avg_log_pred_dr"] = dr_total / n_folds;
  summary["threshold"] = threshold;
  OutputSet out;
  out.add_json(std::filesystem::path(common.out_dir) / "crossval_summary.json", summary);
  out.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-domain sampler experiment runner"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file; flags override");

  // rastrigin
  auto* rast = app.add_subcommand("rastrigin", "sample the Rastrigin benchmark and compare to quadrature");
  CommonFlags rast_common;
  rast_common.attach(rast, 10, 2.0, 100, 5000000, 50000);
  int rast_m = 4;
  double rast_a = 2.0;
  int rast_reps = 1;
  rast->add_option("--m", rast_m, "dimension");
  rast->add_option("--A", rast_a, "amplitude");
  rast->add_option("--reps", rast_reps, "independent repetitions");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a dataset from a preset network");
  std::string sim_network = "chain6";
  std::int64_t sim_rows = 500;
  double sim_fraction = 0.2;
  bool sim_by_condition = false;
  std::int64_t sim_rows_per_cond = 600;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "dataset.csv";
  sim->add_option("--network", sim_network, "chain6, example6, synth11");
  sim->add_option("--rows", sim_rows, "rows to simulate");
  sim->add_option("--intervention-frac", sim_fraction, "fraction of interventional rows");
  sim->add_flag("--by-condition", sim_by_condition, "nine-condition protocol with per-condition targets");
  sim->add_option("--rows-per-cond", sim_rows_per_cond, "rows per condition (with --by-condition)");
  sim->add_option("--seed", sim_seed, "seed");
  sim->add_option("--out", sim_out, "output CSV path");

  // bn-sim
  auto* bnsim = app.add_subcommand("bn-sim", "simulate datasets and score variants against the oracle");
  CommonFlags bnsim_common;
  bnsim_common.attach(bnsim, 15, 10.0, 100, 1000000, 50000);
  std::string bnsim_network = "chain6";
  int bnsim_datasets = 5;
  std::int64_t bnsim_rows = 500;
  double bnsim_fraction = 0.2;
  std::vector<std::string> bnsim_variants{"md"};
  bnsim->add_option("--network", bnsim_network, "chain6 or example6");
  bnsim->add_option("--datasets", bnsim_datasets, "number of simulated datasets");
  bnsim->add_option("--rows", bnsim_rows, "rows per dataset");
  bnsim->add_option("--intervention-frac", bnsim_fraction, "fraction of interventional rows");
  bnsim->add_option("--variants", bnsim_variants, "variants to run")->delimiter(',');

  // bn-enumerate
  auto* bnenum = app.add_subcommand("bn-enumerate", "materialize the exact landscape of a dataset");
  std::string bnenum_data;
  double bnenum_beta = 0.1, bnenum_alpha = 1.0;
  int bnenum_cap = 4;
  std::string bnenum_out = "out";
  bnenum->add_option("--data", bnenum_data, "dataset CSV");
  bnenum->add_option("--beta", bnenum_beta, "edge penalty");
  bnenum->add_option("--alpha", bnenum_alpha, "Dirichlet pseudo count");
  bnenum->add_option("--cap", bnenum_cap, "indegree cap");
  bnenum->add_option("--out", bnenum_out, "output directory");

  // bn-learn
  auto* bnlearn = app.add_subcommand("bn-learn", "learn networks from a dataset");
  CommonFlags bnlearn_common;
  bnlearn_common.attach(bnlearn, 20, 10.0, 10, 5000000, 50000);
  std::string bnlearn_data;
  double bnlearn_threshold = 0.9;
  bnlearn->add_option("--data", bnlearn_data, "dataset CSV");
  bnlearn->add_option("--threshold", bnlearn_threshold, "edge probability threshold c");

  // crossval
  auto* cv = app.add_subcommand("crossval", "cross-validated predictive comparison");
  CommonFlags cv_common;
  cv_common.attach(cv, 20, 10.0, 10, 500000, 50000);
  std::string cv_data;
  int cv_folds = 10;
  bool cv_by_condition = false;
  double cv_threshold = 0.9;
  std::string cv_reference;
  cv->add_option("--data", cv_data, "dataset CSV");
  cv->add_option("--folds", cv_folds, "fold count (by-row mode)");
  cv->add_flag("--by-condition", cv_by_condition, "one fold per condition label");
  cv->add_option("--threshold", cv_threshold, "edge probability threshold c");
  cv->add_option("--reference", cv_reference, "reference network file for TP/FP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rast->parsed()) return cmd_rastrigin(rast_common, rast_m, rast_a, rast_reps);
    if (sim->parsed())
      return cmd_simulate(sim_network, sim_rows, sim_fraction, sim_by_condition,
                          sim_rows_per_cond, sim_seed, sim_out);
    if (bnsim->parsed())
      return cmd_bn_sim(bnsim_common, bnsim_network, bnsim_datasets, bnsim_rows, bnsim_fraction,
                        bnsim_variants);
    if (bnenum->parsed())
      return cmd_bn_enumerate(bnenum_data, bnenum_beta, bnenum_alpha, bnenum_cap, bnenum_out);
    if (bnlearn->parsed()) return cmd_bn_learn(bnlearn_common, bnlearn_data, bnlearn_threshold);
    if (cv->parsed())
      return cmd_crossval(cv_common, cv_data, cv_folds, cv_by_condition, cv_threshold,
                          cv_reference);
  } catch (const md::ConfigError& e) {
    std::fprintf(stderr, "flag error: %s\n", e.what());
    return 2;
  } catch (const md::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const md::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 2;
}
