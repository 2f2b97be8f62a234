#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdsampler/config.hpp"
#include "mdsampler/diagnostics.hpp"
#include "mdsampler/errors.hpp"
#include "mdsampler/estimation.hpp"
#include "mdsampler/gamma_schedule.hpp"
#include "mdsampler/grid.hpp"
#include "mdsampler/mode_registry.hpp"
#include "mdsampler/rng.hpp"

namespace md {

template <class State>
struct Proposal {
  State y;
  double log_fwd = 0.0;
  double log_rev = 0.0;
};

// Capability contract a sample space must satisfy to be driven by the
// sampler. Implemented by the Euclidean and the DAG instances.
template <class M>
concept StateSpaceModel =
    std::copy_constructible<typename M::State> &&
    requires(const M m, const typename M::State& x, RngStream& rng,
             const ModeRegistry<typename M::State>& registry, const std::vector<double>& stat) {
      { m.log_density(x) } -> std::convertible_to<double>;
      { m.descend_to_mode(x) } -> std::convertible_to<typename M::State>;
      { m.states_equal(x, x) } -> std::convertible_to<bool>;
      { m.local_propose(x, rng) } -> std::convertible_to<Proposal<typename M::State>>;
      { m.mixed_jump_sample(x, stat, rng) } -> std::convertible_to<typename M::State>;
      { m.mixed_jump_log_density(registry, x) } -> std::convertible_to<double>;
      { m.adapt_statistic(x, x) } -> std::convertible_to<std::vector<double>>;
      { m.initial_adapt_statistic() } -> std::convertible_to<std::vector<double>>;
      { m.stat_range(stat) } -> std::convertible_to<std::pair<double, double>>;
    };

enum class MoveKind { local, mixed_jump };
enum class RegistryChange { unchanged, added, replaced };

template <StateSpaceModel Model>
struct Classified {
  typename Model::State mode;
  double mode_log_density = 0.0;
  int k = 0;
};

// Descends x to its local mode and looks the mode up in the registry.
template <StateSpaceModel Model>
Classified<Model> classify(const Model& model, const typename Model::State& x,
                           const ModeRegistry<typename Model::State>& registry) {
  auto mode = model.descend_to_mode(x);
  const double lp = model.log_density(mode);
  const int k = registry.find(mode, lp,
                              [&](const auto& a, const auto& b) { return model.states_equal(a, b); });
  return {std::move(mode), lp, k};
}

template <StateSpaceModel Model>
Cell partition_index(const Model& model, const typename Model::State& x,
                     const ModeRegistry<typename Model::State>& registry,
                     const DensityLadder& ladder) {
  const double lp = model.log_density(x);
  if (!std::isfinite(lp)) throw NumericalError("partition_index requires a finite log density");
  const auto cls = classify(model, x, registry);
  return {cls.k, ladder.level(lp)};
}

inline double working_log_density(double log_p, const WeightMatrix& weights, const Cell& cell) {
  return log_p - weights.w(cell.k, cell.j);
}

template <StateSpaceModel Model>
double working_log_density(const Model& model, const typename Model::State& x,
                           const WeightMatrix& weights, const Cell& cell) {
  return working_log_density(model.log_density(x), weights, cell);
}

// Current chain position with its cached classification.
template <StateSpaceModel Model>
struct ChainState {
  typename Model::State x;
  typename Model::State mode;
  double log_p = 0.0;
  double mode_log_density = 0.0;
  Cell cell;
};

// Re-derives the cell of the current state from its cached mode; needed in
// the burn-in phase where the registry and the ladder move.
template <StateSpaceModel Model>
void refresh_cell(const Model& model, ChainState<Model>& chain,
                  const ModeRegistry<typename Model::State>& registry, const DensityLadder& ladder) {
  chain.cell.k = registry.find(chain.mode, chain.mode_log_density,
                               [&](const auto& a, const auto& b) { return model.states_equal(a, b); });
  chain.cell.j = ladder.level(chain.log_p);
}

template <StateSpaceModel Model>
struct StepResult {
  bool accepted = false;
  MoveKind kind = MoveKind::local;
  // Classification of the proposal (absent when the proposal was invalid);
  // used for best-mode tracking independent of acceptance.
  std::optional<Classified<Model>> proposal;
};

// One Metropolis-Hastings step against the working density p(.; W): a local
// move with probability 1 - p_mx, otherwise an independence move from the
// equal-weight mixture over registered modes. The proposal is always
// descended to determine its cell before the accept/reject decision.
template <StateSpaceModel Model>
StepResult<Model> mh_step(const Model& model, ChainState<Model>& chain, const WeightMatrix& weights,
                          const ModeRegistry<typename Model::State>& registry,
                          const DensityLadder& ladder, const SamplerConfig& cfg, RngStream& rng) {
  const double p_mix = cfg.effective_p_mix();
  const bool mixed = p_mix > 0.0 && registry.size() > 0 && rng.bernoulli(p_mix);

  StepResult<Model> result;
  result.kind = mixed ? MoveKind::mixed_jump : MoveKind::local;

  typename Model::State y{chain.x};
  double adj = 0.0;  // log[q(y,x)/q(x,y)] or log[r(x)/r(y)]
  if (!mixed) {
    auto prop = model.local_propose(chain.x, rng);
    const double log_p_y = model.log_density(prop.y);
    if (!std::isfinite(log_p_y)) return result;
    y = std::move(prop.y);
    adj = prop.log_rev - prop.log_fwd;
    result.proposal = classify(model, y, registry);
    const Cell cell_y{result.proposal->k, ladder.level(log_p_y)};
    const double log_ratio = working_log_density(log_p_y, weights, cell_y) -
                             working_log_density(chain.log_p, weights, chain.cell) + adj;
    if (log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio)) {
      chain.x = std::move(y);
      chain.mode = result.proposal->mode;
      chain.log_p = log_p_y;
      chain.mode_log_density = result.proposal->mode_log_density;
      chain.cell = cell_y;
      result.accepted = true;
    }
    return result;
  }

  const int pick = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(registry.size())));
  const auto& component = registry.entry(pick);
  y = model.mixed_jump_sample(component.mode, component.stat, rng);
  const double log_p_y = model.log_density(y);
  if (!std::isfinite(log_p_y)) return result;
  const double log_r_x = model.mixed_jump_log_density(registry, chain.x);
  if (!std::isfinite(log_r_x)) return result;  // r(x) = 0: move rejected
  const double log_r_y = model.mixed_jump_log_density(registry, y);
  result.proposal = classify(model, y, registry);
  const Cell cell_y{result.proposal->k, ladder.level(log_p_y)};
  const double log_ratio = working_log_density(log_p_y, weights, cell_y) -
                           working_log_density(chain.log_p, weights, chain.cell) + log_r_x - log_r_y;
  if (log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio)) {
    chain.x = std::move(y);
    chain.mode = result.proposal->mode;
    chain.log_p = log_p_y;
    chain.mode_log_density = result.proposal->mode_log_density;
    chain.cell = cell_y;
    result.accepted = true;
  }
  return result;
}

// Weight and statistic updates for the freshly realized state. MD bumps the
// visited cell only; the WL baseline bumps every domain row at the visited
// level, so its working density depends on the level alone.
template <StateSpaceModel Model>
void update_weights_and_stats(const Model& model, const Cell& cell, const typename Model::State& x,
                              WeightMatrix& weights, ModeRegistry<typename Model::State>& registry,
                              double gamma, Variant variant) {
  weights.record_visit(cell, gamma, variant, registry.size());
  if (cell.k >= 1) {
    auto& entry = registry.entry(cell.k);
    const auto g = model.adapt_statistic(x, entry.mode);
    const double a = gamma / 2.0;
    for (std::size_t i = 0; i < entry.stat.size(); ++i)
      entry.stat[i] += a * (g[i] - entry.stat[i]);
  }
}

// Burn-in registry maintenance. Records up to K* of the highest modes found;
// when full, a higher new mode evicts the lowest one, whose burn-in visit
// counts fold into the residual row.
template <StateSpaceModel Model>
RegistryChange update_mode_registry(const Model& model, const typename Model::State& mode,
                                    double mode_log_density,
                                    ModeRegistry<typename Model::State>& registry,
                                    WeightMatrix& weights, Variant variant) {
  const int existing = registry.find(mode, mode_log_density,
                                     [&](const auto& a, const auto& b) { return model.states_equal(a, b); });
  if (existing > 0) return RegistryChange::unchanged;
  if (registry.size() < registry.capacity()) {
    const int k = registry.append(mode, mode_log_density, model.initial_adapt_statistic());
    weights.init_row(k, variant);
    return RegistryChange::added;
  }
  const int s = registry.lowest();
  if (mode_log_density > registry.entry(s).log_density) {
    weights.fold_row_into_residual(s, variant);
    registry.replace(s, mode, mode_log_density, model.initial_adapt_statistic());
    return RegistryChange::replaced;
  }
  return RegistryChange::unchanged;
}

// Moves the ladder up one spacing unit when the best recorded mode has risen
// more than one unit above the top cut, cascading weights down one level.
template <class State>
bool shift_ladder(const ModeRegistry<State>& registry, DensityLadder& ladder, WeightMatrix& weights) {
  if (registry.size() == 0) return false;
  if (!(registry.max_log_density() > ladder.cut(1) + ladder.spacing())) return false;
  ladder.shift_up();
  weights.cascade_down();
  return true;
}

template <StateSpaceModel Model>
struct BurninResult {
  ModeRegistry<typename Model::State> registry;
  DensityLadder ladder;
  WeightMatrix weights;
  ChainState<Model> chain;
  typename Model::State best_mode;
  double best_mode_log_density = 0.0;
  std::int64_t accepted = 0;
  std::int64_t iterations = 0;
};

// Algorithm run before the main phase: local proposals only, gamma pinned at
// one, with the mode registry and the density ladder updated dynamically from
// the descent of every proposal.
template <StateSpaceModel Model>
BurninResult<Model> run_burnin(const Model& model, const SamplerConfig& cfg,
                               const typename Model::State& x1, RngStream& rng) {
  cfg.validate();
  const double log_p_x1 = model.log_density(x1);
  if (!std::isfinite(log_p_x1)) throw NumericalError("burn-in start state has non-finite log density");

  auto mode1 = model.descend_to_mode(x1);
  const double mode1_lp = model.log_density(mode1);

  BurninResult<Model> st{ModeRegistry<typename Model::State>(cfg.max_modes),
                         DensityLadder(cfg.levels, cfg.delta_h, mode1_lp),
                         WeightMatrix(cfg.max_modes, cfg.levels),
                         ChainState<Model>{x1, mode1, log_p_x1, mode1_lp, Cell{}},
                         mode1,
                         mode1_lp};
  st.registry.append(std::move(mode1), mode1_lp, model.initial_adapt_statistic());
  refresh_cell(model, st.chain, st.registry, st.ladder);

  for (std::int64_t t = 1; t <= cfg.burn_in; ++t) {
    try {
      auto prop = model.local_propose(st.chain.x, rng);
      const double log_p_y = model.log_density(prop.y);
      if (!std::isfinite(log_p_y)) {
        st.iterations = t;
        update_weights_and_stats(model, st.chain.cell, st.chain.x, st.weights, st.registry, 1.0,
                                 cfg.variant);
        continue;
      }
      auto cls = classify(model, prop.y, st.registry);
      if (cls.mode_log_density > st.best_mode_log_density) {
        st.best_mode = cls.mode;
        st.best_mode_log_density = cls.mode_log_density;
      }

      const RegistryChange change =
          update_mode_registry(model, cls.mode, cls.mode_log_density, st.registry, st.weights, cfg.variant);
      if (change != RegistryChange::unchanged) {
        cls.k = st.registry.find(cls.mode, cls.mode_log_density, [&](const auto& a, const auto& b) {
          return model.states_equal(a, b);
        });
      }
      shift_ladder(st.registry, st.ladder, st.weights);
      // Registry edits and ladder shifts can move the current state's cell.
      refresh_cell(model, st.chain, st.registry, st.ladder);

      const Cell cell_y{cls.k, st.ladder.level(log_p_y)};
      const double log_ratio = working_log_density(log_p_y, st.weights, cell_y) -
                               working_log_density(st.chain.log_p, st.weights, st.chain.cell) +
                               prop.log_rev - prop.log_fwd;
      if (log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio)) {
        st.chain.x = std::move(prop.y);
        st.chain.mode = std::move(cls.mode);
        st.chain.log_p = log_p_y;
        st.chain.mode_log_density = cls.mode_log_density;
        st.chain.cell = cell_y;
        ++st.accepted;
      }
      update_weights_and_stats(model, st.chain.cell, st.chain.x, st.weights, st.registry, 1.0,
                               cfg.variant);
      st.iterations = t;
    } catch (const DescentError& e) {
      throw DescentError(std::string(e.what()) + " (burn-in iteration " + std::to_string(t) + ")");
    }
  }

  // Catch up on pending ladder shifts so the frozen ladder sits just below
  // the best recorded mode.
  while (shift_ladder(st.registry, st.ladder, st.weights)) {
  }
  refresh_cell(model, st.chain, st.registry, st.ladder);
  return st;
}

struct AcceptanceStats {
  std::int64_t local_proposals = 0;
  std::int64_t local_accepts = 0;
  std::int64_t mixed_proposals = 0;
  std::int64_t mixed_accepts = 0;
  double local_rate() const {
    return local_proposals ? static_cast<double>(local_accepts) / local_proposals : 0.0;
  }
  double mixed_rate() const {
    return mixed_proposals ? static_cast<double>(mixed_accepts) / mixed_proposals : 0.0;
  }
};

template <StateSpaceModel Model>
struct RunResult {
  ModeRegistry<typename Model::State> registry;
  DensityLadder ladder;
  WeightMatrix weights;
  GammaSchedule schedule;
  AcceptanceStats acceptance;
  ChainState<Model> chain;
  typename Model::State best_mode;
  double best_mode_log_density = 0.0;
  std::vector<DrAccumulator> accumulators;          // one per payload binding
  std::vector<DomainRepresentation> representations;
  DiagnosticsReport diagnostics;
  std::int64_t main_iterations = 0;
  std::int64_t burnin_iterations = 0;
};

// Main sampling phase over a frozen registry and ladder: mh_step, weight and
// statistic updates, schedule update, and estimator accumulation with the
// pre-update weights of each iteration.
template <StateSpaceModel Model>
RunResult<Model> run_main(const Model& model, const SamplerConfig& cfg, BurninResult<Model>&& burnin,
                          const std::vector<PayloadBinding<typename Model::State>>& bindings,
                          RngStream& rng) {
  cfg.validate();
  RunResult<Model> out{std::move(burnin.registry), std::move(burnin.ladder), std::move(burnin.weights),
                       GammaSchedule{1.0, cfg.gamma_rho, cfg.gamma_eta, cfg.gamma_eps},
                       AcceptanceStats{}, std::move(burnin.chain), std::move(burnin.best_mode),
                       burnin.best_mode_log_density};
  out.burnin_iterations = burnin.iterations;
  out.weights.reset_counters();
  out.weights.reset_visits();

  const int domains = out.registry.size() + 1;
  out.accumulators.reserve(bindings.size());
  for (const auto& b : bindings)
    out.accumulators.emplace_back(domains, b.rows, b.cols);

  const std::int64_t n_main = cfg.total_iters - cfg.burn_in;
  const std::int64_t snapshot_at = n_main - n_main / 10;
  std::vector<double> w_snapshot, stat_snapshot;
  std::vector<double> payload;

  auto flatten_weights = [&](std::vector<double>& dst) {
    dst.clear();
    for (int k = 0; k < domains; ++k)
      for (int j = 1; j <= cfg.levels; ++j) dst.push_back(out.weights.w(k, j));
  };
  auto flatten_stats = [&](std::vector<double>& dst) {
    dst.clear();
    for (int k = 1; k <= out.registry.size(); ++k)
      for (double v : out.registry.entry(k).stat) dst.push_back(v);
  };

  for (std::int64_t t = 1; t <= n_main; ++t) {
    try {
      auto step = mh_step(model, out.chain, out.weights, out.registry, out.ladder, cfg, rng);
      if (step.kind == MoveKind::local) {
        ++out.acceptance.local_proposals;
        out.acceptance.local_accepts += step.accepted ? 1 : 0;
      } else {
        ++out.acceptance.mixed_proposals;
        out.acceptance.mixed_accepts += step.accepted ? 1 : 0;
      }
      if (step.proposal && step.proposal->mode_log_density > out.best_mode_log_density) {
        out.best_mode = step.proposal->mode;
        out.best_mode_log_density = step.proposal->mode_log_density;
      }

      const double w_pre = out.weights.w(out.chain.cell.k, out.chain.cell.j);
      for (std::size_t b = 0; b < bindings.size(); ++b) {
        payload.assign(bindings[b].rows * bindings[b].cols, 0.0);
        bindings[b].fill(out.chain.x, payload);
        out.accumulators[b].accumulate(out.chain.cell.k, w_pre, payload);
      }

      update_weights_and_stats(model, out.chain.cell, out.chain.x, out.weights, out.registry,
                               out.schedule.gamma, cfg.variant);
      mwl_update_gamma(out.schedule, out.weights, t, cfg.variant, out.registry.size());

      if (t == snapshot_at) {
        flatten_weights(w_snapshot);
        flatten_stats(stat_snapshot);
      }
      out.main_iterations = t;
    } catch (const DescentError& e) {
      throw DescentError(std::string(e.what()) + " (main iteration " + std::to_string(t) + ")");
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (main iteration " + std::to_string(t) + ")");
    }
  }

  for (const auto& acc : out.accumulators) out.representations.push_back(acc.finalize());

  DiagnosticsInput din;
  din.gamma_final = out.schedule.gamma;
  din.active_domains = out.registry.size();
  din.levels = cfg.levels;
  for (int k = 0; k < domains; ++k) {
    for (int j = 1; j <= cfg.levels; ++j) {
      din.visits.push_back(out.weights.visits(k, j));
      din.occupied.push_back(out.weights.occupied(k, j) ? 1 : 0);
    }
  }
  din.w_snapshot = std::move(w_snapshot);
  flatten_weights(din.w_final);
  din.stat_snapshot = std::move(stat_snapshot);
  flatten_stats(din.stat_final);
  din.stat_min = 1.0;
  din.stat_max = 1.0;
  for (int k = 1; k <= out.registry.size(); ++k) {
    const auto [lo, hi] = model.stat_range(out.registry.entry(k).stat);
    if (k == 1 || lo < din.stat_min) din.stat_min = lo;
    if (k == 1 || hi > din.stat_max) din.stat_max = hi;
  }
  out.diagnostics = evaluate_diagnostics(din);
  return out;
}

// Convenience wrapper: burn-in followed by the main phase.
template <StateSpaceModel Model>
RunResult<Model> run_sampler(const Model& model, const SamplerConfig& cfg,
                             const typename Model::State& x1,
                             const std::vector<PayloadBinding<typename Model::State>>& bindings,
                             RngStream& rng) {
  auto burnin = run_burnin(model, cfg, x1, rng);
  return run_main(model, cfg, std::move(burnin), bindings, rng);
}

}  // namespace md
