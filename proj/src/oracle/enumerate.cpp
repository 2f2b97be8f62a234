#include "mdsampler/oracle/enumerate.hpp"

#include <vector>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

void check_enumerable(int nodes) {
  if (nodes < 1 || nodes > 6)
    throw ConfigError("exhaustive DAG enumeration supports 1..6 nodes, got " + std::to_string(nodes));
}

struct PairList {
  std::vector<std::pair<int, int>> pairs;
  explicit PairList(int m) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
};

void recurse(Dag& g, const PairList& pl, std::size_t p, std::int32_t code,
             const std::function<void(const Dag&, std::int32_t)>& fn) {
  if (p == pl.pairs.size()) {
    fn(g, code);
    return;
  }
  const auto [i, j] = pl.pairs[p];
  const std::int32_t base = pow3(static_cast<int>(p));
  recurse(g, pl, p + 1, code, fn);  // pair absent
  if (g.indegree(j) < g.indegree_cap() && g.addition_is_acyclic(i, j)) {
    g.add_edge(i, j);
    recurse(g, pl, p + 1, code + base, fn);
    g.remove_edge(i, j);
  }
  if (g.indegree(i) < g.indegree_cap() && g.addition_is_acyclic(j, i)) {
    g.add_edge(j, i);
    recurse(g, pl, p + 1, code + 2 * base, fn);
    g.remove_edge(j, i);
  }
}

}  // namespace

std::int32_t pow3(int exponent) {
  std::int32_t value = 1;
  for (int e = 0; e < exponent; ++e) value *= 3;
  return value;
}

std::int32_t encode_dag(const Dag& g) {
  std::int32_t code = 0;
  int p = 0;
  for (int i = 0; i < g.nodes(); ++i) {
    for (int j = i + 1; j < g.nodes(); ++j, ++p) {
      const int v = g.pair_value(i, j);
      if (v != 0) code += (v == 1 ? 1 : 2) * pow3(p);
    }
  }
  return code;
}

Dag decode_dag(std::int32_t code, int nodes, int indegree_cap) {
  Dag g(nodes, indegree_cap);
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      const int digit = code % 3;
      code /= 3;
      if (digit == 1) g.add_edge(i, j);
      if (digit == 2) g.add_edge(j, i);
    }
  }
  return g;
}

void enumerate_dags(int nodes, int indegree_cap,
                    const std::function<void(const Dag&, std::int32_t)>& fn) {
  check_enumerable(nodes);
  Dag g(nodes, indegree_cap);
  const PairList pl(nodes);
  recurse(g, pl, 0, 0, fn);
}

std::int64_t count_dags(int nodes, int indegree_cap) {
  std::int64_t n = 0;
  enumerate_dags(nodes, indegree_cap, [&](const Dag&, std::int32_t) { ++n; });
  return n;
}

std::int64_t count_dags_bruteforce(int nodes, int indegree_cap) {
  check_enumerable(nodes);
  const int pairs = nodes * (nodes - 1) / 2;
  const std::int32_t total = pow3(pairs);
  std::int64_t n = 0;
  for (std::int32_t code = 0; code < total; ++code) {
    Dag g(nodes, 32);
    std::int32_t rest = code;
    for (int i = 0; i < nodes; ++i) {
      for (int j = i + 1; j < nodes; ++j) {
        const int digit = rest % 3;
        rest /= 3;
        if (digit == 1) g.add_edge(i, j);
        if (digit == 2) g.add_edge(j, i);
      }
    }
    bool ok = g.is_acyclic();
    for (int i = 0; ok && i < nodes; ++i) ok = g.indegree(i) <= indegree_cap;
    if (ok) ++n;
  }
  return n;
}

std::int64_t count_all_dags_by_sources(int nodes) {
  // a(n) = sum_{k=1..n} (-1)^{k+1} C(n,k) 2^{k(n-k)} a(n-k), a(0) = 1.
  std::vector<std::int64_t> a(static_cast<std::size_t>(nodes) + 1, 0);
  a[0] = 1;
  std::vector<std::vector<std::int64_t>> choose(static_cast<std::size_t>(nodes) + 1);
  for (int n = 0; n <= nodes; ++n) {
    choose[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k < n; ++k)
      choose[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          choose[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
          choose[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
  }
  for (int n = 1; n <= nodes; ++n) {
    std::int64_t s = 0;
    for (int k = 1; k <= n; ++k) {
      const std::int64_t term = choose[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] *
                                (std::int64_t{1} << (k * (n - k))) * a[static_cast<std::size_t>(n - k)];
      s += (k % 2 == 1) ? term : -term;
    }
    a[static_cast<std::size_t>(n)] = s;
  }
  return a[static_cast<std::size_t>(nodes)];
}

}  // namespace md
