#pragma once

#include <cstdint>
#include <functional>

#include "mdsampler/dag/dag.hpp"

namespace md {

// Exhaustive enumeration of labeled DAGs on m <= 6 nodes under an indegree
// cap, each exactly once. The code of a DAG is its pair-value vector read as
// base-3 digits (0 none, 1 i->j, 2 j->i) in lexicographic pair order.

std::int32_t encode_dag(const Dag& g);
Dag decode_dag(std::int32_t code, int nodes, int indegree_cap);
std::int32_t pow3(int exponent);

// Calls fn for every DAG. The Dag reference is reused; callers copy if they
// need to retain it.
void enumerate_dags(int nodes, int indegree_cap,
                    const std::function<void(const Dag&, std::int32_t)>& fn);

std::int64_t count_dags(int nodes, int indegree_cap);

// Independent cross-checks used by the tests.
std::int64_t count_dags_bruteforce(int nodes, int indegree_cap);  // 3^T filter
std::int64_t count_all_dags_by_sources(int nodes);                // inclusion-exclusion recurrence

}  // namespace md
