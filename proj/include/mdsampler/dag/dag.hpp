#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace md {

// Labeled DAG on m <= 32 nodes with an indegree cap. Edges are kept as
// parent and child bitmasks per node; the pair variable of (i, j), i < j, is
// +1 for i -> j, -1 for j -> i, 0 for none.
class Dag {
 public:
  Dag() = default;
  Dag(int nodes, int indegree_cap = 4);

  int nodes() const { return nodes_; }
  int indegree_cap() const { return cap_; }
  int edge_count() const { return edges_; }
  int pair_count() const { return nodes_ * (nodes_ - 1) / 2; }

  bool has_edge(int from, int to) const { return (parents_[static_cast<std::size_t>(to)] >> from) & 1u; }
  std::uint32_t parent_mask(int node) const { return parents_[static_cast<std::size_t>(node)]; }
  std::uint32_t child_mask(int node) const { return children_[static_cast<std::size_t>(node)]; }
  int indegree(int node) const { return indegree_[static_cast<std::size_t>(node)]; }

  // Pair variable E_{ij} for i < j.
  int pair_value(int i, int j) const {
    if (has_edge(i, j)) return 1;
    if (has_edge(j, i)) return -1;
    return 0;
  }

  // Unchecked structural edits; callers maintain acyclicity and the cap.
  void add_edge(int from, int to);
  void remove_edge(int from, int to);
  // Sets the pair (i, j), i < j, to value in {-1, 0, 1}.
  void set_pair(int i, int j, int value);

  // True if adding from -> to keeps the graph acyclic (edge must be absent).
  bool addition_is_acyclic(int from, int to) const;
  // True if reversing the existing edge from -> to keeps the graph acyclic.
  bool reversal_is_acyclic(int from, int to) const;

  // Per-node descendant bitmasks (excluding the node itself).
  std::vector<std::uint32_t> descendants() const;

  // Full validity check used by tests and file ingestion.
  bool is_acyclic() const;
  bool respects_cap() const;

  bool operator==(const Dag& other) const {
    return nodes_ == other.nodes_ && parents_ == other.parents_;
  }

  std::uint64_t structure_hash() const;

  // Adjacency as a row-major 0/1 matrix (entry i*m+j set for i -> j).
  void fill_adjacency(std::span<double> out) const;

 private:
  bool reaches(int from, int to) const;  // path from -> to exists

  int nodes_ = 0;
  int cap_ = 4;
  int edges_ = 0;
  std::vector<std::uint32_t> parents_;
  std::vector<std::uint32_t> children_;
  std::vector<std::uint8_t> indegree_;
};

struct DagMove {
  enum class Kind { add = 0, remove = 1, reverse = 2 };
  Kind kind = Kind::add;
  int from = 0;
  int to = 0;
  bool operator==(const DagMove&) const = default;
};

// All single-edge moves of g that keep acyclicity and the indegree cap, in
// the canonical deterministic order: additions, deletions, reversals, each
// lexicographic in (from, to).
std::vector<DagMove> dag_neighbors(const Dag& g);
int count_dag_neighbors(const Dag& g);
Dag apply_move(const Dag& g, const DagMove& move);

struct EditCounts {
  int additions = 0;
  int deletions = 0;
  int reversals = 0;
};

// Numbers of pair additions, deletions and reversals needed to obtain g from
// the reference graph nu.
EditCounts edit_counts(const Dag& g, const Dag& nu);

// Text format shared by the CLI and the test fixtures: node count, arity
// line, then `i -> j` edges with 1-based node ids.
std::string write_network(const Dag& g, const std::vector<int>& arities);
std::pair<Dag, std::vector<int>> read_network(std::istream& in, int indegree_cap = 4);

}  // namespace md
