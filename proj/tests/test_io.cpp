#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "mdsampler/dag/score.hpp"
#include "mdsampler/errors.hpp"
#include "mdsampler/io/dataset_io.hpp"
#include "mdsampler/io/evaluate.hpp"
#include "mdsampler/io/predictive.hpp"
#include "mdsampler/io/simulate.hpp"
#include "test_util.hpp"

using namespace md;
using md::testing::make_dataset;

namespace {
std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("simulate_dataset: intervention bookkeeping") {
  const auto bn = make_chain6_network();
  RngStream rng(1);

  SUBCASE("fraction zero leaves the mask empty") {
    const auto data = simulate_dataset(bn, 200, 0.0, rng);
    for (std::int64_t r = 0; r < data.rows(); ++r)
      for (int i = 0; i < data.nodes; ++i) CHECK(!data.is_intervened(r, i));
  }
  SUBCASE("twenty percent marks the right number of rows") {
    const auto data = simulate_dataset(bn, 503, 0.2, rng);
    std::int64_t marked = 0;
    for (std::int64_t r = 0; r < data.rows(); ++r) {
      int per_row = 0;
      for (int i = 0; i < data.nodes; ++i) per_row += data.is_intervened(r, i) ? 1 : 0;
      CHECK(per_row <= 1);
      marked += per_row;
    }
    CHECK(marked == 101);  // ceil(0.2 * 503)
  }
  SUBCASE("fraction one on a single node is uniform over its states") {
    GroundTruthBn single;
    single.structure = Dag(1, 4);
    single.arities = {3};
    single.cpt = {{{0.2, 0.3, 0.5}}};
    RngStream r2(7);
    const auto data = simulate_dataset(single, 9000, 1.0, r2);
    std::int64_t counts[3] = {0, 0, 0};
    for (std::int64_t r = 0; r < data.rows(); ++r) {
      CHECK(data.is_intervened(r, 0));
      counts[data.value(r, 0) - 1] += 1;
    }
    for (const auto c : counts) CHECK(std::abs(c / 9000.0 - 1.0 / 3.0) < 0.02);
  }
}

TEST_CASE("simulate_dataset: empirical conditionals approach the tables") {
  GroundTruthBn bn;
  bn.structure = Dag(2, 4);
  bn.structure.add_edge(0, 1);
  bn.arities = {2, 2};
  bn.cpt = {{{0.6, 0.4}}, {{0.8, 0.2}, {0.3, 0.7}}};
  RngStream rng(5);
  const auto data = simulate_dataset(bn, 100'000, 0.0, rng);
  std::int64_t n1 = 0, n11 = 0, n2 = 0, n21 = 0;
  for (std::int64_t r = 0; r < data.rows(); ++r) {
    if (data.value(r, 0) == 1) {
      ++n1;
      if (data.value(r, 1) == 1) ++n11;
    } else {
      ++n2;
      if (data.value(r, 1) == 1) ++n21;
    }
  }
  CHECK(std::abs(static_cast<double>(n1) / data.rows() - 0.6) < 0.01);
  CHECK(std::abs(static_cast<double>(n11) / n1 - 0.8) < 0.01);
  CHECK(std::abs(static_cast<double>(n21) / n2 - 0.3) < 0.01);
}

TEST_CASE("condition-structured simulation") {
  const auto bn = make_synth11_network();
  RngStream rng(3);
  const std::vector<int> targets{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto data = simulate_condition_dataset(bn, 600, targets, rng);
  CHECK(data.rows() == 5400);
  CHECK(data.nodes == 11);
  CHECK(data.conditions.size() == 5400);
  for (std::int64_t r = 0; r < data.rows(); ++r) {
    const int cond = std::stoi(data.conditions[static_cast<std::size_t>(r)]);
    for (int i = 0; i < data.nodes; ++i)
      CHECK(data.is_intervened(r, i) == (i == targets[static_cast<std::size_t>(cond - 1)]));
  }
}

TEST_CASE("dataset csv round-trip and malformed row errors") {
  const auto bn = make_chain6_network();
  RngStream rng(9);
  auto data = simulate_dataset(bn, 120, 0.25, rng);
  data.conditions.assign(static_cast<std::size_t>(data.rows()), "a");
  for (std::int64_t r = 60; r < data.rows(); ++r) data.conditions[static_cast<std::size_t>(r)] = "b";

  const auto path = tmp_file("md_dataset_roundtrip.csv");
  save_dataset(path.string(), data);
  const auto loaded = load_dataset(path.string());
  CHECK(loaded.nodes == data.nodes);
  CHECK(loaded.arities == data.arities);
  CHECK(loaded.values == data.values);
  CHECK(loaded.intervened == data.intervened);
  CHECK(loaded.conditions == data.conditions);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".meta.json");

  SUBCASE("out-of-range state names the line") {
    const auto bad = tmp_file("md_dataset_bad.csv");
    {
      std::ofstream out(bad);
      out << "Z1,Z2,I1,I2\n1,2,0,0\n1,4,0,0\n";
      std::ofstream meta(bad.string() + ".meta.json");
      meta << "{\"arities\":[2,3]}\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(bad.string()),
                         doctest::Contains("row 2"), DataError);
    std::filesystem::remove(bad);
    std::filesystem::remove(bad.string() + ".meta.json");
  }
  SUBCASE("ragged row names the line") {
    const auto bad = tmp_file("md_dataset_ragged.csv");
    {
      std::ofstream out(bad);
      out << "Z1,Z2,I1,I2\n1,2,0\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(bad.string()),
                         doctest::Contains("line 2"), DataError);
    std::filesystem::remove(bad);
  }
}

TEST_CASE("large ternary file loads with inferred arities") {
  const auto bn = make_synth11_network();
  RngStream rng(11);
  const std::vector<int> targets{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto data = simulate_condition_dataset(bn, 600, targets, rng);
  const auto path = tmp_file("md_dataset_synth11.csv");
  save_dataset(path.string(), data);
  std::filesystem::remove(path.string() + ".meta.json");  // force inference
  const auto loaded = load_dataset(path.string());
  CHECK(loaded.rows() == 5400);
  CHECK(loaded.nodes == 11);
  CHECK(loaded.arities == std::vector<int>(11, 3));
  std::filesystem::remove(path);
}

TEST_CASE("predictive probability: base cases and the marginal-likelihood identity") {
  SUBCASE("no training data, isolated binary node: log(1/2) per node") {
    const auto train = make_dataset(1, {2}, {});
    Dag g(1, 4);
    PredictiveModel pm(g, train);
    const auto row = make_dataset(1, {2}, {{2, 0}});
    CHECK(pm.log_probability(row, 0) == doctest::Approx(std::log(0.5)));
  }
  SUBCASE("fully intervened row contributes nothing") {
    const auto train = make_dataset(2, {2, 2}, {{1, 1, 0, 0}});
    Dag g(2, 4);
    g.add_edge(0, 1);
    PredictiveModel pm(g, train);
    const auto row = make_dataset(2, {2, 2}, {{2, 2, 1, 1}});
    CHECK(pm.log_probability(row, 0) == doctest::Approx(0.0));
  }
  SUBCASE("chained predictives equal the marginal likelihood ratio") {
    // Three-row dataset fed sequentially: the product of one-step-ahead
    // predictives equals the Eq.-13 likelihood ratio (beta terms cancel for
    // a fixed graph).
    const std::vector<std::vector<int>> rows{{1, 2, 0, 0}, {2, 2, 0, 1}, {1, 1, 1, 0}};
    Dag g(2, 4);
    g.add_edge(0, 1);
    double chained = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto train = make_dataset(2, {2, 2},
                                      std::vector<std::vector<int>>(rows.begin(), rows.begin() + t));
      PredictiveModel pm(g, train);
      const auto row = make_dataset(2, {2, 2}, {rows[t]});
      chained += pm.log_probability(row, 0);
    }
    const auto full = make_dataset(2, {2, 2}, rows);
    const auto empty = make_dataset(2, {2, 2}, {});
    const double marginal =
        log_posterior_score(g, full, 0.1, 1.0) - log_posterior_score(g, empty, 0.1, 1.0);
    CHECK(chained == doctest::Approx(marginal).epsilon(1e-10));
  }
}

TEST_CASE("domain-based predictive") {
  const auto train = make_dataset(2, {2, 2}, {{1, 1, 0, 0}, {2, 2, 0, 0}, {1, 1, 0, 0}});
  Dag a(2, 4);
  a.add_edge(0, 1);
  Dag b(2, 4);
  const auto test_rows = make_dataset(2, {2, 2}, {{1, 1, 0, 0}, {2, 1, 0, 0}});
  PredictiveModel pa(a, train), pb(b, train);

  SUBCASE("single domain collapses to the plain predictive") {
    const double dr = dr_predictive_log_probability(test_rows, 0, {pa}, {1.0}, pb, 0.0);
    CHECK(dr == doctest::Approx(pa.log_probability(test_rows, 0)).epsilon(1e-12));
  }
  SUBCASE("identical local networks collapse regardless of the masses") {
    const double dr =
        dr_predictive_log_probability(test_rows, 0, {pa, pa}, {0.3, 0.6}, pa, 0.1);
    CHECK(dr == doctest::Approx(pa.log_probability(test_rows, 0)).epsilon(1e-12));
  }
  SUBCASE("two domains match the hand-computed log mixture") {
    const double la = pa.log_probability(test_rows, 1);
    const double lb = pb.log_probability(test_rows, 1);
    const double expected = std::log(0.7 * std::exp(la) + 0.3 * std::exp(lb));
    const double dr = dr_predictive_log_probability(test_rows, 1, {pa}, {0.7}, pb, 0.3);
    CHECK(dr == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("threshold network and reference scoring") {
  // 3-node adjacency with a spread of edge probabilities.
  const std::vector<double> adjacency{0.0, 0.95, 0.2, 0.05, 0.0, 0.55, 0.91, 0.4, 0.0};
  Dag reference(3, 4);
  reference.add_edge(0, 1);
  reference.add_edge(1, 2);

  SUBCASE("threshold above one predicts nothing") {
    const auto edges = threshold_network(adjacency, 3, 1.0 + 1e-9);
    CHECK(edges.empty());
    const auto score = score_vs_reference(edges, reference);
    CHECK(score.true_positives == 0);
    CHECK(score.false_positives == 0);
  }
  SUBCASE("reference adjacency at c = 0.5 recovers the reference exactly") {
    std::vector<double> exact(9, 0.0);
    reference.fill_adjacency(exact);
    const auto edges = threshold_network(exact, 3, 0.5);
    const auto score = score_vs_reference(edges, reference);
    CHECK(score.true_positives == reference.edge_count());
    CHECK(score.false_positives == 0);
  }
  SUBCASE("hand thresholding at 0.9") {
    const auto edges = threshold_network(adjacency, 3, 0.9);
    REQUIRE(edges.size() == 2);
    const auto score = score_vs_reference(edges, reference);
    CHECK(score.true_positives == 1);   // 0 -> 1
    CHECK(score.false_positives == 1);  // 2 -> 0
  }
}

TEST_CASE("cross-validation splits") {
  const auto bn = make_chain6_network();
  RngStream rng(13);
  auto data = simulate_dataset(bn, 103, 0.0, rng);

  SUBCASE("by-row folds have near-equal sizes and partition the rows") {
    RngStream split_rng(1);
    const auto folds = crossval_split(data, 10, SplitMode::by_row, split_rng);
    CHECK(folds.size() == 10);
    std::set<std::int64_t> seen;
    std::size_t lo = 1000, hi = 0;
    for (const auto& fold : folds) {
      lo = std::min(lo, fold.size());
      hi = std::max(hi, fold.size());
      for (auto r : fold) seen.insert(r);
    }
    CHECK(hi - lo <= 1);
    CHECK(seen.size() == 103);
  }
  SUBCASE("leave-one-out") {
    RngStream split_rng(2);
    const auto folds = crossval_split(data, 103, SplitMode::by_row, split_rng);
    CHECK(folds.size() == 103);
    for (const auto& fold : folds) CHECK(fold.size() == 1);
  }
  SUBCASE("by-condition folds follow the labels") {
    data.conditions.clear();
    for (std::int64_t r = 0; r < data.rows(); ++r)
      data.conditions.push_back(std::to_string(1 + (r % 9)));
    RngStream split_rng(3);
    const auto folds = crossval_split(data, 9, SplitMode::by_condition, split_rng);
    CHECK(folds.size() == 9);
    for (const auto& fold : folds) {
      const auto& label = data.conditions[static_cast<std::size_t>(fold.front())];
      for (auto r : fold) CHECK(data.conditions[static_cast<std::size_t>(r)] == label);
    }
  }
  SUBCASE("by-condition without labels is a data error") {
    data.conditions.clear();
    RngStream split_rng(4);
    CHECK_THROWS_AS(crossval_split(data, 9, SplitMode::by_condition, split_rng), DataError);
  }
}

TEST_CASE("nine-condition protocol yields nine folds of six hundred") {
  const auto bn = make_synth11_network();
  RngStream rng(17);
  const std::vector<int> targets{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto data = simulate_condition_dataset(bn, 600, targets, rng);
  RngStream split_rng(5);
  const auto folds = crossval_split(data, 9, SplitMode::by_condition, split_rng);
  CHECK(folds.size() == 9);
  for (const auto& fold : folds) CHECK(fold.size() == 600);
}
