#include <doctest.h>

#include <cmath>
#include <map>

#include "mdsampler/continuous/model.hpp"
#include "mdsampler/dag/model.hpp"
#include "mdsampler/engine.hpp"
#include "mdsampler/io/simulate.hpp"
#include "mdsampler/oracle/enumerate.hpp"
#include "mdsampler/oracle/landscape.hpp"
#include "test_util.hpp"

using namespace md;
using md::testing::total_variation;

namespace {

struct DagFixture {
  DiscreteDataset data;
  ScoreCache cache;
  DagModel model;

  explicit DagFixture(std::uint64_t seed, std::int64_t rows = 20, int nodes = 3)
      : data(make_data(seed, rows, nodes)), cache(data, 0.1, 1.0), model(cache, 0.5) {}

  static DiscreteDataset make_data(std::uint64_t seed, std::int64_t rows, int nodes) {
    GroundTruthBn bn = make_chain6_network();
    RngStream rng(seed);
    const DiscreteDataset full = simulate_dataset(bn, rows, 0.2, rng);
    if (nodes == 6) return full;
    DiscreteDataset out;
    out.nodes = nodes;
    out.arities.assign(static_cast<std::size_t>(nodes), 2);
    for (std::int64_t r = 0; r < full.rows(); ++r) {
      for (int i = 0; i < nodes; ++i) {
        out.values.push_back(static_cast<std::uint8_t>(full.value(r, i)));
        out.intervened.push_back(full.is_intervened(r, i) ? 1 : 0);
      }
    }
    return out;
  }
};

}  // namespace

TEST_CASE("partition index: modes map to their own domain, tails to the bottom cell") {
  RastriginTarget target(2, 2.0);
  ContinuousModel model(target, 1.0, 1e-3);
  ModeRegistry<std::vector<double>> registry(10);
  const auto center = model.descend_to_mode({0.1, 0.1});
  const auto side = model.descend_to_mode({1.9, 0.1});
  registry.append(center, model.log_density(center), model.initial_adapt_statistic());
  registry.append(side, model.log_density(side), model.initial_adapt_statistic());
  DensityLadder ladder(5, 2.0, 0.0);  // cuts 0, -2, -4, -6

  // A registered mode lands in its own domain at its own level.
  const auto cell = partition_index(model, side, registry, ladder);
  CHECK(cell.k == 2);
  CHECK(cell.j == 3);  // log p = -3.62 sits in [-4, -2)

  // Deep tail points land in level L regardless of domain.
  const auto tail = partition_index(model, std::vector<double>{0.05, 9.0}, registry, ladder);
  CHECK(tail.j == 5);

  // Descent identifies the basin: a point near the origin belongs to k = 1.
  const auto near = partition_index(model, std::vector<double>{0.1, -0.1}, registry, ladder);
  CHECK(near.k == 1);
  CHECK(near.j == 2);  // log p(0.1, -0.1) ~ -0.22, just below H_1 = 0
}

TEST_CASE("working log density") {
  WeightMatrix w(2, 4);
  CHECK(working_log_density(-3.0, w, {1, 2}) == doctest::Approx(-3.0));  // zero weights
  w.record_visit({1, 2}, 5.0, Variant::md, 1);
  CHECK(working_log_density(-3.0, w, {1, 2}) == doctest::Approx(-8.0));
  // A common cell weight cancels in differences.
  const double a = working_log_density(-3.0, w, {1, 2});
  const double b = working_log_density(-4.5, w, {1, 2});
  CHECK(a - b == doctest::Approx(1.5));
}

TEST_CASE("mh_step: md0 never proposes mixed jumps, uphill local moves always accept") {
  DagFixture fx(5);
  SamplerConfig cfg;
  cfg.levels = 6;
  cfg.delta_h = 5.0;
  cfg.max_modes = 10;
  cfg.variant = Variant::md0;
  cfg.p_mix = 0.0;

  RngStream burn_rng(1);
  auto burnin = run_burnin(fx.model, cfg, Dag(3, 4), burn_rng);
  ChainState<DagModel> chain = burnin.chain;
  RngStream rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto step = mh_step(fx.model, chain, burnin.weights, burnin.registry, burnin.ladder, cfg, rng);
    CHECK(step.kind == MoveKind::local);
  }
}

TEST_CASE("mh_step: acceptance decisions are invariant to weight translation") {
  DagFixture fx(9);
  SamplerConfig cfg;
  cfg.levels = 6;
  cfg.delta_h = 5.0;
  cfg.max_modes = 10;
  RngStream burn_rng(3);
  auto burnin = run_burnin(fx.model, cfg, Dag(3, 4), burn_rng);

  WeightMatrix shifted = burnin.weights;
  for (int k = 0; k <= shifted.rows() - 1; ++k)
    for (int j = 1; j <= shifted.levels(); ++j) shifted.w(k, j) += 137.25;

  ChainState<DagModel> a = burnin.chain;
  ChainState<DagModel> b = burnin.chain;
  RngStream ra(42), rb(42);
  for (int i = 0; i < 3000; ++i) {
    const auto sa = mh_step(fx.model, a, burnin.weights, burnin.registry, burnin.ladder, cfg, ra);
    const auto sb = mh_step(fx.model, b, shifted, burnin.registry, burnin.ladder, cfg, rb);
    CHECK(sa.accepted == sb.accepted);
    CHECK(sa.kind == sb.kind);
    REQUIRE(a.x == b.x);
  }
}

TEST_CASE("update_weights_and_stats: visited cell only, wl bumps the column") {
  DagFixture fx(11);
  SamplerConfig cfg;
  cfg.levels = 5;
  cfg.delta_h = 8.0;
  cfg.max_modes = 5;
  RngStream rng(1);
  auto burnin = run_burnin(fx.model, cfg, Dag(3, 4), rng);
  const int modes = burnin.registry.size();
  REQUIRE(modes >= 1);

  WeightMatrix w(cfg.max_modes, cfg.levels);
  const Cell cell{1, 3};
  update_weights_and_stats(fx.model, cell, burnin.registry.entry(1).mode, w, burnin.registry, 1.0,
                           Variant::md);
  CHECK(w.w(1, 3) == doctest::Approx(1.0));
  CHECK(w.w(0, 3) == doctest::Approx(0.0));
  CHECK(w.visits(1, 3) == 1);

  WeightMatrix v(cfg.max_modes, cfg.levels);
  update_weights_and_stats(fx.model, cell, burnin.registry.entry(1).mode, v, burnin.registry, 0.25,
                           Variant::wl);
  for (int k = 0; k <= modes; ++k) CHECK(v.w(k, 3) == doctest::Approx(0.25));

  // The statistic of the visited domain moves halfway toward g by gamma/2.
  auto& entry = burnin.registry.entry(1);
  const auto before = entry.stat;
  Dag far(3, 4);
  far.add_edge(0, 1);
  far.add_edge(0, 2);
  far.add_edge(1, 2);
  const auto g = fx.model.adapt_statistic(far, entry.mode);
  WeightMatrix w2(cfg.max_modes, cfg.levels);
  update_weights_and_stats(fx.model, Cell{1, 2}, far, w2, burnin.registry, 0.5, Variant::md);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(entry.stat[i] == doctest::Approx(before[i] + 0.25 * (g[i] - before[i])));
}

TEST_CASE("update_mode_registry: added, replaced with fold, unchanged") {
  DagFixture fx(13);
  WeightMatrix w(2, 4);
  ModeRegistry<Dag> registry(2);
  Dag empty(3, 4);
  const Dag m1 = fx.model.descend_to_mode(empty);
  registry.append(m1, fx.model.log_density(m1), fx.model.initial_adapt_statistic());

  // Already registered: unchanged.
  CHECK(update_mode_registry(fx.model, m1, fx.model.log_density(m1), registry, w, Variant::md) ==
        RegistryChange::unchanged);

  // A distinct graph below capacity: added with a zero weight row.
  Dag other(3, 4);
  other.add_edge(2, 1);
  w.record_visit({1, 2}, 3.0, Variant::md, 1);
  CHECK(update_mode_registry(fx.model, other, -100.0, registry, w, Variant::md) ==
        RegistryChange::added);
  CHECK(registry.size() == 2);
  for (int j = 1; j <= 4; ++j) CHECK(w.w(2, j) == doctest::Approx(0.0));

  // Capacity reached: a higher mode replaces the lowest; burn-in visit mass
  // folds into the residual row.
  w.record_visit({2, 1}, 2.0, Variant::md, 2);
  w.record_visit({2, 4}, 1.0, Variant::md, 2);
  const double total_before = w.total_weight(0) + w.total_weight(1) + w.total_weight(2);
  Dag third(3, 4);
  third.add_edge(0, 2);
  CHECK(update_mode_registry(fx.model, third, -50.0, registry, w, Variant::md) ==
        RegistryChange::replaced);
  CHECK(registry.find(third, -50.0, [&](const Dag& x, const Dag& y) { return x == y; }) == 2);
  const double total_after = w.total_weight(0) + w.total_weight(1) + w.total_weight(2);
  CHECK(total_after == doctest::Approx(total_before));
  for (int j = 1; j <= 4; ++j) CHECK(w.w(2, j) == doctest::Approx(0.0));

  // A lower mode does not displace anything.
  Dag fourth(3, 4);
  fourth.add_edge(1, 0);
  CHECK(update_mode_registry(fx.model, fourth, -1e6, registry, w, Variant::md) ==
        RegistryChange::unchanged);
}

TEST_CASE("shift_ladder: threshold, conservation, single-step semantics") {
  ModeRegistry<double> registry(3);
  registry.append(0.0, 10.0, {});
  DensityLadder ladder(3, 2.0, 10.0);  // cuts 10, 8
  WeightMatrix w(1, 3);
  w.record_visit({0, 1}, 4.0, Variant::md, 0);
  w.record_visit({0, 2}, 2.0, Variant::md, 0);
  w.record_visit({0, 3}, 1.0, Variant::md, 0);

  // log u = H_1: no shift.
  CHECK(!shift_ladder(registry, ladder, w));

  // log u = H_1 + 1.5 dh: exactly one shift per call, then quiescent.
  registry.replace(1, 0.0, 13.0, {});
  const double row_total = w.total_weight(0);
  CHECK(shift_ladder(registry, ladder, w));
  CHECK(ladder.cut(1) == doctest::Approx(12.0));
  CHECK(w.total_weight(0) == doctest::Approx(row_total));
  CHECK(w.w(0, 1) == doctest::Approx(0.0));
  CHECK(w.w(0, 2) == doctest::Approx(4.0));
  CHECK(w.w(0, 3) == doctest::Approx(3.0));
  CHECK(!shift_ladder(registry, ladder, w));
}

TEST_CASE("run_burnin: zero iterations anchor the ladder at the start mode") {
  DagFixture fx(17);
  SamplerConfig cfg;
  cfg.levels = 4;
  cfg.delta_h = 6.0;
  cfg.max_modes = 8;
  cfg.burn_in = 0;
  cfg.total_iters = 0;
  RngStream rng(2);
  const Dag start(3, 4);
  const auto burnin = run_burnin(fx.model, cfg, start, rng);
  CHECK(burnin.registry.size() == 1);
  const Dag expected_mode = fx.model.descend_to_mode(start);
  CHECK(burnin.registry.entry(1).mode == expected_mode);
  CHECK(burnin.ladder.cut(1) == doctest::Approx(fx.model.log_density(expected_mode)));
}

TEST_CASE("run_burnin registers every oracle mode of a six-node dataset") {
  DagFixture fx(19, 500, 6);
  const auto landscape = exact_landscape(fx.data, 0.1, 1.0, 4);

  SamplerConfig cfg;
  cfg.levels = 15;
  cfg.delta_h = 10.0;
  cfg.max_modes = 100;
  cfg.burn_in = 50'000;
  cfg.total_iters = 50'000;
  RngStream rng(4);
  const auto burnin = run_burnin(fx.model, cfg, Dag(6, 4), rng);

  auto equal = [](const Dag& a, const Dag& b) { return a == b; };
  for (const auto& mode : landscape.modes) {
    if (mode.lambda < 1e-4) continue;
    CHECK(burnin.registry.find(mode.graph, mode.log_score, equal) > 0);
  }
  // The burn-in search reaches the global mode.
  CHECK(burnin.best_mode_log_density == doctest::Approx(landscape.modes.front().log_score));
}

TEST_CASE("run_burnin registers the rastrigin global mode") {
  RastriginTarget target(4, 2.0);
  ContinuousModel model(target, 1.0, 1e-3);
  SamplerConfig cfg;
  cfg.levels = 10;
  cfg.delta_h = 2.0;
  cfg.max_modes = 100;
  cfg.burn_in = 30'000;
  cfg.total_iters = 30'000;
  RngStream rng(8);
  const std::vector<double> start{1.2, -0.7, 2.2, 0.4};
  const auto burnin = run_burnin(model, cfg, start, rng);
  const std::vector<double> origin{0.0, 0.0, 0.0, 0.0};
  auto equal = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return model.states_equal(a, b);
  };
  CHECK(burnin.registry.find(origin, 0.0, equal) > 0);
  CHECK(burnin.best_mode_log_density == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("frozen-chain detailed balance on the enumerated three-node space") {
  DagFixture fx(23);
  SamplerConfig cfg;
  cfg.levels = 6;
  cfg.delta_h = 4.0;
  cfg.max_modes = 10;
  cfg.burn_in = 5'000;
  cfg.total_iters = 5'000;
  RngStream rng(6);
  auto burnin = run_burnin(fx.model, cfg, Dag(3, 4), rng);

  // Freeze everything; compute the exact working density by enumeration.
  auto exact = [&](const SamplerConfig& c) {
    (void)c;
    std::vector<double> log_p;
    enumerate_dags(3, 4, [&](const Dag& g, std::int32_t) {
      const auto cell = partition_index(fx.model, g, burnin.registry, burnin.ladder);
      log_p.push_back(fx.model.log_density(g) - burnin.weights.w(cell.k, cell.j));
    });
    const double lse = log_sum_exp(log_p);
    std::vector<double> p;
    for (double v : log_p) p.push_back(std::exp(v - lse));
    return p;
  };

  auto run_chain = [&](SamplerConfig c, std::int64_t steps) {
    std::map<int, std::int64_t> counts;
    ChainState<DagModel> chain = burnin.chain;
    RngStream chain_rng(99);
    std::map<std::int32_t, int> index;
    int next = 0;
    enumerate_dags(3, 4, [&](const Dag&, std::int32_t code) { index[code] = next++; });
    for (std::int64_t i = 0; i < steps; ++i) {
      mh_step(fx.model, chain, burnin.weights, burnin.registry, burnin.ladder, c, chain_rng);
      counts[index[encode_dag(chain.x)]] += 1;
    }
    return counts;
  };

  const auto p = exact(cfg);

  SUBCASE("local kernel alone") {
    SamplerConfig c = cfg;
    c.variant = Variant::md0;
    c.p_mix = 0.0;
    CHECK(total_variation(run_chain(c, 200'000), p, 200'000) < 0.05);
  }
  SUBCASE("mixed-jump-heavy mixture") {
    SamplerConfig c = cfg;
    c.p_mix = 0.9;
    CHECK(total_variation(run_chain(c, 200'000), p, 200'000) < 0.05);
  }
}

TEST_CASE("run_main: md0 has no mixed proposals, wl keeps rows identical") {
  DagFixture fx(29);
  SamplerConfig cfg;
  cfg.levels = 6;
  cfg.delta_h = 4.0;
  cfg.max_modes = 10;
  cfg.burn_in = 2'000;
  cfg.total_iters = 30'000;

  std::vector<PayloadBinding<Dag>> bindings;
  bindings.push_back({"adjacency", 3, 3, [](const Dag& g, std::span<double> out) {
                        g.fill_adjacency(out);
                      }});

  SUBCASE("md0") {
    SamplerConfig c = cfg;
    c.variant = Variant::md0;
    c.p_mix = 0.0;
    RngStream rng(10);
    auto burnin = run_burnin(fx.model, c, Dag(3, 4), rng);
    const auto run = run_main(fx.model, c, std::move(burnin), bindings, rng);
    CHECK(run.acceptance.mixed_proposals == 0);
    CHECK(run.acceptance.local_proposals == c.total_iters - c.burn_in);
    double lambda_sum = 0.0;
    for (const auto& e : run.representations[0].entries) lambda_sum += e.lambda;
    CHECK(std::abs(lambda_sum - 1.0) <= 1e-12);
  }

  SUBCASE("wl") {
    SamplerConfig c = cfg;
    c.variant = Variant::wl;
    RngStream rng(11);
    auto burnin = run_burnin(fx.model, c, Dag(3, 4), rng);
    const auto run = run_main(fx.model, c, std::move(burnin), bindings, rng);
    for (int j = 1; j <= c.levels; ++j)
      for (int k = 1; k <= run.registry.size(); ++k)
        CHECK(run.weights.w(k, j) == doctest::Approx(run.weights.w(0, j)));
  }
}

TEST_CASE("run_main: converged weights reproduce the exact cell masses") {
  DagFixture fx(31, 40);
  SamplerConfig cfg;
  cfg.levels = 6;
  cfg.delta_h = 4.0;
  cfg.max_modes = 10;
  cfg.burn_in = 20'000;
  cfg.total_iters = 500'000;
  RngStream rng(12);
  auto burnin = run_burnin(fx.model, cfg, Dag(3, 4), rng);
  auto registry_copy = burnin.registry;
  auto ladder_copy = burnin.ladder;
  const auto run = run_main(fx.model, cfg, std::move(burnin), {}, rng);

  // Exact cell masses under the frozen partition.
  std::map<std::pair<int, int>, double> mass;
  std::vector<double> scores;
  enumerate_dags(3, 4, [&](const Dag& g, std::int32_t) { scores.push_back(fx.model.log_density(g)); });
  const double lse = log_sum_exp(scores);
  enumerate_dags(3, 4, [&](const Dag& g, std::int32_t) {
    const auto cell = partition_index(fx.model, g, registry_copy, ladder_copy);
    mass[{cell.k, cell.j}] += std::exp(fx.model.log_density(g) - lse);
  });

  // Normalized exp(w) over occupied cells approaches the cell masses.
  double wmax = -1e300;
  for (const auto& [cell, m] : mass)
    wmax = std::max(wmax, run.weights.w(cell.first, cell.second));
  double z = 0.0;
  for (const auto& [cell, m] : mass) z += std::exp(run.weights.w(cell.first, cell.second) - wmax);
  double tv = 0.0;
  for (const auto& [cell, m] : mass)
    tv += std::abs(std::exp(run.weights.w(cell.first, cell.second) - wmax) / z - m);
  CHECK(0.5 * tv < 0.08);
}
