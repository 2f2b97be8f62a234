#include "mdsampler/dag/dag.hpp"

#include <bit>
#include <istream>
#include <sstream>

#include "mdsampler/errors.hpp"

namespace md {

Dag::Dag(int nodes, int indegree_cap) : nodes_(nodes), cap_(indegree_cap) {
  if (nodes < 1 || nodes > 32) throw ConfigError("DAG node count must lie in 1..32");
  parents_.assign(static_cast<std::size_t>(nodes), 0u);
  children_.assign(static_cast<std::size_t>(nodes), 0u);
  indegree_.assign(static_cast<std::size_t>(nodes), 0u);
}

void Dag::add_edge(int from, int to) {
  parents_[static_cast<std::size_t>(to)] |= (1u << from);
  children_[static_cast<std::size_t>(from)] |= (1u << to);
  indegree_[static_cast<std::size_t>(to)] += 1;
  ++edges_;
}

void Dag::remove_edge(int from, int to) {
  parents_[static_cast<std::size_t>(to)] &= ~(1u << from);
  children_[static_cast<std::size_t>(from)] &= ~(1u << to);
  indegree_[static_cast<std::size_t>(to)] -= 1;
  --edges_;
}

void Dag::set_pair(int i, int j, int value) {
  if (has_edge(i, j)) remove_edge(i, j);
  if (has_edge(j, i)) remove_edge(j, i);
  if (value == 1) add_edge(i, j);
  if (value == -1) add_edge(j, i);
}

bool Dag::reaches(int from, int to) const {
  std::uint32_t frontier = children_[static_cast<std::size_t>(from)];
  std::uint32_t visited = frontier;
  while (frontier) {
    if ((frontier >> to) & 1u) return true;
    const int node = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const std::uint32_t fresh = children_[static_cast<std::size_t>(node)] & ~visited;
    visited |= fresh;
    frontier |= fresh;
  }
  return false;
}

bool Dag::addition_is_acyclic(int from, int to) const { return !reaches(to, from); }

bool Dag::reversal_is_acyclic(int from, int to) const {
  // After removing from -> to, a path from -> ... -> to must not survive.
  // Any such path starts at another child of `from`, and no descendant set of
  // those children can use the removed edge (children of `from` never reach
  // `from` in an acyclic graph).
  std::uint32_t rest = children_[static_cast<std::size_t>(from)] & ~(1u << to);
  while (rest) {
    const int c = std::countr_zero(rest);
    rest &= rest - 1;
    if (reaches(c, to)) return false;
  }
  return true;
}

std::vector<std::uint32_t> Dag::descendants() const {
  // Reverse topological sweep: children first.
  std::vector<std::uint32_t> desc(static_cast<std::size_t>(nodes_), 0u);
  std::vector<std::uint8_t> out_remaining(static_cast<std::size_t>(nodes_), 0u);
  std::vector<int> stack;
  for (int i = 0; i < nodes_; ++i) {
    out_remaining[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(std::popcount(children_[static_cast<std::size_t>(i)]));
    if (out_remaining[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
  }
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    std::uint32_t ps = parents_[static_cast<std::size_t>(node)];
    while (ps) {
      const int p = std::countr_zero(ps);
      ps &= ps - 1;
      desc[static_cast<std::size_t>(p)] |= desc[static_cast<std::size_t>(node)] | (1u << node);
      if (--out_remaining[static_cast<std::size_t>(p)] == 0) stack.push_back(p);
    }
  }
  return desc;
}

bool Dag::is_acyclic() const {
  std::vector<int> order;
  std::vector<std::uint8_t> indeg(indegree_.begin(), indegree_.end());
  std::vector<int> stack;
  for (int i = 0; i < nodes_; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0) stack.push_back(i);
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    order.push_back(node);
    std::uint32_t cs = children_[static_cast<std::size_t>(node)];
    while (cs) {
      const int c = std::countr_zero(cs);
      cs &= cs - 1;
      if (--indeg[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
    }
  }
  return static_cast<int>(order.size()) == nodes_;
}

bool Dag::respects_cap() const {
  for (int i = 0; i < nodes_; ++i)
    if (indegree(i) > cap_) return false;
  return true;
}

std::uint64_t Dag::structure_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint32_t p : parents_) {
    h ^= p;
    h *= 1099511628211ULL;
  }
  return h;
}

void Dag::fill_adjacency(std::span<double> out) const {
  const std::size_t m = static_cast<std::size_t>(nodes_);
  for (std::size_t i = 0; i < m * m; ++i) out[i] = 0.0;
  for (int j = 0; j < nodes_; ++j) {
    std::uint32_t ps = parent_mask(j);
    while (ps) {
      const int i = std::countr_zero(ps);
      ps &= ps - 1;
      out[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)] = 1.0;
    }
  }
}

std::vector<DagMove> dag_neighbors(const Dag& g) {
  std::vector<DagMove> moves;
  const int m = g.nodes();
  const auto desc = g.descendants();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j || g.pair_value(std::min(i, j), std::max(i, j)) != 0) continue;
      if (g.indegree(j) < g.indegree_cap() && !((desc[static_cast<std::size_t>(j)] >> i) & 1u))
        moves.push_back({DagMove::Kind::add, i, j});
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (g.has_edge(i, j)) moves.push_back({DagMove::Kind::remove, i, j});
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!g.has_edge(i, j)) continue;
      if (g.indegree(i) < g.indegree_cap() && g.reversal_is_acyclic(i, j))
        moves.push_back({DagMove::Kind::reverse, i, j});
    }
  }
  return moves;
}

int count_dag_neighbors(const Dag& g) {
  int count = g.edge_count();  // deletions are always valid
  const int m = g.nodes();
  const auto desc = g.descendants();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j || g.pair_value(std::min(i, j), std::max(i, j)) != 0) continue;
      if (g.indegree(j) < g.indegree_cap() && !((desc[static_cast<std::size_t>(j)] >> i) & 1u)) ++count;
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!g.has_edge(i, j)) continue;
      if (g.indegree(i) < g.indegree_cap() && g.reversal_is_acyclic(i, j)) ++count;
    }
  }
  return count;
}

Dag apply_move(const Dag& g, const DagMove& move) {
  Dag next = g;
  switch (move.kind) {
    case DagMove::Kind::add:
      next.add_edge(move.from, move.to);
      break;
    case DagMove::Kind::remove:
      next.remove_edge(move.from, move.to);
      break;
    case DagMove::Kind::reverse:
      next.remove_edge(move.from, move.to);
      next.add_edge(move.to, move.from);
      break;
  }
  return next;
}

EditCounts edit_counts(const Dag& g, const Dag& nu) {
  EditCounts c;
  const int m = g.nodes();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const int eg = g.pair_value(i, j);
      const int en = nu.pair_value(i, j);
      if (eg != 0 && en == 0) ++c.additions;
      if (eg == 0 && en != 0) ++c.deletions;
      if (eg * en == -1) ++c.reversals;
    }
  }
  return c;
}

std::string write_network(const Dag& g, const std::vector<int>& arities) {
  std::ostringstream out;
  out << g.nodes() << "\n";
  for (int i = 0; i < g.nodes(); ++i) out << (i ? " " : "") << arities[static_cast<std::size_t>(i)];
  out << "\n";
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j < g.nodes(); ++j)
      if (g.has_edge(i, j)) out << (i + 1) << " -> " << (j + 1) << "\n";
  return out.str();
}

std::pair<Dag, std::vector<int>> read_network(std::istream& in, int indegree_cap) {
  int m = 0;
  if (!(in >> m)) throw DataError("network file: missing node count");
  if (m < 1 || m > 32) throw DataError("network file: node count out of range");
  std::vector<int> arities(static_cast<std::size_t>(m));
  for (auto& a : arities) {
    if (!(in >> a) || a < 2) throw DataError("network file: bad arity line");
  }
  Dag g(m, indegree_cap);
  int from = 0;
  std::string arrow;
  int to = 0;
  while (in >> from >> arrow >> to) {
    if (arrow != "->") throw DataError("network file: expected 'i -> j' edge line");
    if (from < 1 || from > m || to < 1 || to > m || from == to)
      throw DataError("network file: edge endpoints out of range");
    g.add_edge(from - 1, to - 1);
  }
  if (!g.is_acyclic()) throw DataError("network file: graph has a cycle");
  if (!g.respects_cap()) throw DataError("network file: indegree cap exceeded");
  return {g, arities};
}

}  // namespace md
