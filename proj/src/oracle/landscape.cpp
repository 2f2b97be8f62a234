#include "mdsampler/oracle/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mdsampler/dag/score.hpp"
#include "mdsampler/dag/sna.hpp"
#include "mdsampler/errors.hpp"
#include "mdsampler/oracle/enumerate.hpp"

namespace md {

namespace {

struct BasinPartial {
  double mass = 0.0;  // sum of exp(score - shift)
  std::int64_t count = 0;
  std::vector<double> adjacency;  // mass-weighted adjacency sums
};

struct ThreadPartial {
  double total = 0.0;
  std::vector<double> adjacency;
  std::map<std::int32_t, BasinPartial> basins;
};

// Work chunks for the parallel sweep: all valid assignments of the first few
// pairs, each continued independently.
std::vector<std::pair<Dag, std::int32_t>> enumeration_prefixes(int nodes, int cap, int depth) {
  std::vector<std::pair<Dag, std::int32_t>> chunks;
  Dag g(nodes, cap);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) pairs.emplace_back(i, j);
  const int d = std::min<int>(depth, static_cast<int>(pairs.size()));

  std::function<void(int, std::int32_t)> rec = [&](int p, std::int32_t code) {
    if (p == d) {
      chunks.emplace_back(g, code);
      return;
    }
    const auto [i, j] = pairs[static_cast<std::size_t>(p)];
    const std::int32_t base = pow3(p);
    rec(p + 1, code);
    if (g.indegree(j) < cap && g.addition_is_acyclic(i, j)) {
      g.add_edge(i, j);
      rec(p + 1, code + base);
      g.remove_edge(i, j);
    }
    if (g.indegree(i) < cap && g.addition_is_acyclic(j, i)) {
      g.add_edge(j, i);
      rec(p + 1, code + 2 * base);
      g.remove_edge(j, i);
    }
  };
  rec(0, 0);
  return chunks;
}

void enumerate_suffix(Dag& g, int nodes, int cap, int first_pair, std::int32_t code,
                      const std::function<void(const Dag&, std::int32_t)>& fn) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) pairs.emplace_back(i, j);
  std::function<void(int, std::int32_t)> rec = [&](int p, std::int32_t c) {
    if (p == static_cast<int>(pairs.size())) {
      fn(g, c);
      return;
    }
    const auto [i, j] = pairs[static_cast<std::size_t>(p)];
    const std::int32_t base = pow3(p);
    rec(p + 1, c);
    if (g.indegree(j) < cap && g.addition_is_acyclic(i, j)) {
      g.add_edge(i, j);
      rec(p + 1, c + base);
      g.remove_edge(i, j);
    }
    if (g.indegree(i) < cap && g.addition_is_acyclic(j, i)) {
      g.add_edge(j, i);
      rec(p + 1, c + 2 * base);
      g.remove_edge(j, i);
    }
  };
  rec(first_pair, code);
}

// Basin of the DAG with the given code, following the shared successor memo.
// Entries are written with relaxed atomics; concurrent duplicate resolution
// writes the same value.
std::int32_t resolve_basin(std::int32_t code, int nodes, int cap, const ScoreCache& score,
                           std::atomic<std::int32_t>* memo, std::vector<std::int32_t>& path) {
  path.clear();
  std::int32_t c = code;
  std::int32_t target = -1;
  while (true) {
    const std::int32_t known = memo[c].load(std::memory_order_relaxed);
    if (known >= 0) {
      target = known;
      break;
    }
    const Dag g = decode_dag(c, nodes, cap);
    const auto move = sna_step(g, score);
    if (!move) {
      target = c;
      break;
    }
    path.push_back(c);
    c = encode_dag(apply_move(g, *move));
  }
  memo[c].store(target, std::memory_order_relaxed);
  for (std::int32_t p : path) memo[p].store(target, std::memory_order_relaxed);
  return target;
}

ExactLandscape assemble(const DiscreteDataset& data, double beta, double alpha, int cap,
                        double shift, double total, std::vector<double> adjacency,
                        std::map<std::int32_t, BasinPartial>&& basins, std::int64_t dag_count,
                        const ScoreCache& score) {
  ExactLandscape out;
  out.nodes = data.nodes;
  out.indegree_cap = cap;
  out.beta = beta;
  out.alpha = alpha;
  out.dag_count = dag_count;
  out.log_normalizer = shift + std::log(total);
  out.dataset_digest = data.digest();
  const std::size_t mm = static_cast<std::size_t>(data.nodes) * data.nodes;
  out.mean_adjacency.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) out.mean_adjacency[i] = adjacency[i] / total;
  for (auto& [code, partial] : basins) {
    LandscapeMode mode;
    mode.graph = decode_dag(code, data.nodes, cap);
    mode.log_score = score.log_score(mode.graph);
    mode.lambda = partial.mass / total;
    mode.basin_size = partial.count;
    mode.adjacency.resize(mm);
    for (std::size_t i = 0; i < mm; ++i) mode.adjacency[i] = partial.adjacency[i] / partial.mass;
    out.modes.push_back(std::move(mode));
  }
  std::sort(out.modes.begin(), out.modes.end(),
            [](const LandscapeMode& a, const LandscapeMode& b) { return a.log_score > b.log_score; });
  return out;
}

}  // namespace

int ExactLandscape::mode_index(const Dag& g) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].graph == g) return static_cast<int>(i);
  return -1;
}

ExactLandscape exact_landscape(const DiscreteDataset& data, double beta, double alpha,
                               int indegree_cap) {
  data.check();
  ScoreCache score(data, beta, alpha);
  score.precompute_all(indegree_cap);
  const int nodes = data.nodes;
  const int pairs = nodes * (nodes - 1) / 2;
  const std::size_t mm = static_cast<std::size_t>(nodes) * nodes;

  auto chunks = enumeration_prefixes(nodes, indegree_cap, std::min(pairs, 7));

  // Pass 1: maximum score for the exp shift, plus the DAG count.
  double shift = -1e308;
  std::int64_t dag_count = 0;
#pragma omp parallel
  {
    double local_max = -1e308;
    std::int64_t local_count = 0;
#pragma omp for schedule(dynamic)
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      Dag g = chunks[c].first;
      enumerate_suffix(g, nodes, indegree_cap, std::min(pairs, 7), chunks[c].second,
                       [&](const Dag& dag, std::int32_t) {
                         const double s = score.log_score(dag);
                         if (s > local_max) local_max = s;
                         ++local_count;
                       });
    }
#pragma omp critical
    {
      if (local_max > shift) shift = local_max;
      dag_count += local_count;
    }
  }

  // Pass 2: per-basin aggregation through the successor memo.
  const std::int32_t memo_size = pow3(pairs);
  std::unique_ptr<std::atomic<std::int32_t>[]> memo(new std::atomic<std::int32_t>[memo_size]);
  for (std::int32_t i = 0; i < memo_size; ++i) memo[i].store(-1, std::memory_order_relaxed);

  double total = 0.0;
  std::vector<double> adjacency(mm, 0.0);
  std::map<std::int32_t, BasinPartial> basins;
#pragma omp parallel
  {
    ThreadPartial part;
    part.adjacency.assign(mm, 0.0);
    std::vector<std::int32_t> path;
    std::vector<double> adj(mm);
#pragma omp for schedule(dynamic)
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      Dag g = chunks[c].first;
      enumerate_suffix(g, nodes, indegree_cap, std::min(pairs, 7), chunks[c].second,
                       [&](const Dag& dag, std::int32_t code) {
                         const double e = std::exp(score.log_score(dag) - shift);
                         const std::int32_t basin =
                             resolve_basin(code, nodes, indegree_cap, score, memo.get(), path);
                         dag.fill_adjacency(adj);
                         part.total += e;
                         for (std::size_t i = 0; i < mm; ++i) part.adjacency[i] += e * adj[i];
                         BasinPartial& bp = part.basins[basin];
                         if (bp.adjacency.empty()) bp.adjacency.assign(mm, 0.0);
                         bp.mass += e;
                         bp.count += 1;
                         for (std::size_t i = 0; i < mm; ++i) bp.adjacency[i] += e * adj[i];
                       });
    }
#pragma omp critical
    {
      total += part.total;
      for (std::size_t i = 0; i < mm; ++i) adjacency[i] += part.adjacency[i];
      for (auto& [code, bp] : part.basins) {
        BasinPartial& dst = basins[code];
        if (dst.adjacency.empty()) dst.adjacency.assign(mm, 0.0);
        dst.mass += bp.mass;
        dst.count += bp.count;
        for (std::size_t i = 0; i < mm; ++i) dst.adjacency[i] += bp.adjacency[i];
      }
    }
  }

  return assemble(data, beta, alpha, indegree_cap, shift, total, std::move(adjacency),
                  std::move(basins), dag_count, score);
}

ExactLandscape exact_landscape_serial_reference(const DiscreteDataset& data, double beta,
                                                double alpha, int indegree_cap) {
  data.check();
  ScoreCache score(data, beta, alpha);
  const int nodes = data.nodes;
  const std::size_t mm = static_cast<std::size_t>(nodes) * nodes;

  double shift = -1e308;
  std::int64_t dag_count = 0;
  enumerate_dags(nodes, indegree_cap, [&](const Dag& g, std::int32_t) {
    shift = std::max(shift, score.log_score(g));
    ++dag_count;
  });

  double total = 0.0;
  std::vector<double> adjacency(mm, 0.0);
  std::vector<double> adj(mm);
  std::map<std::int32_t, BasinPartial> basins;
  enumerate_dags(nodes, indegree_cap, [&](const Dag& g, std::int32_t) {
    const double e = std::exp(score.log_score(g) - shift);
    const Dag mode = sna_mode(g, score);
    const std::int32_t basin = encode_dag(mode);
    g.fill_adjacency(adj);
    total += e;
    for (std::size_t i = 0; i < mm; ++i) adjacency[i] += e * adj[i];
    BasinPartial& bp = basins[basin];
    if (bp.adjacency.empty()) bp.adjacency.assign(mm, 0.0);
    bp.mass += e;
    bp.count += 1;
    for (std::size_t i = 0; i < mm; ++i) bp.adjacency[i] += e * adj[i];
  });

  return assemble(data, beta, alpha, indegree_cap, shift, total, std::move(adjacency),
                  std::move(basins), dag_count, score);
}

void save_landscape(const ExactLandscape& ls, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DataError("cannot open landscape cache for writing: " + path);
  auto put = [&](const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f) != n) {
      std::fclose(f);
      throw DataError("short write to landscape cache: " + path);
    }
  };
  const char magic[4] = {'M', 'D', 'L', 'S'};
  put(magic, 4);
  const std::int32_t version = 1;
  put(&version, sizeof version);
  put(&ls.nodes, sizeof ls.nodes);
  put(&ls.indegree_cap, sizeof ls.indegree_cap);
  put(&ls.beta, sizeof ls.beta);
  put(&ls.alpha, sizeof ls.alpha);
  put(&ls.dag_count, sizeof ls.dag_count);
  put(&ls.log_normalizer, sizeof ls.log_normalizer);
  put(&ls.dataset_digest, sizeof ls.dataset_digest);
  const std::int32_t mode_count = static_cast<std::int32_t>(ls.modes.size());
  put(&mode_count, sizeof mode_count);
  put(ls.mean_adjacency.data(), ls.mean_adjacency.size() * sizeof(double));
  for (const auto& mode : ls.modes) {
    const std::int32_t code = encode_dag(mode.graph);
    put(&code, sizeof code);
    put(&mode.log_score, sizeof mode.log_score);
    put(&mode.lambda, sizeof mode.lambda);
    put(&mode.basin_size, sizeof mode.basin_size);
    put(mode.adjacency.data(), mode.adjacency.size() * sizeof(double));
  }
  std::fclose(f);
}

ExactLandscape load_landscape(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw DataError("cannot open landscape cache: " + path);
  auto get = [&](void* p, std::size_t n) {
    if (std::fread(p, 1, n, f) != n) {
      std::fclose(f);
      throw DataError("short read from landscape cache: " + path);
    }
  };
  char magic[4];
  get(magic, 4);
  if (magic[0] != 'M' || magic[1] != 'D' || magic[2] != 'L' || magic[3] != 'S') {
    std::fclose(f);
    throw DataError("bad landscape cache magic: " + path);
  }
  std::int32_t version = 0;
  get(&version, sizeof version);
  if (version != 1) {
    std::fclose(f);
    throw DataError("unsupported landscape cache version in " + path);
  }
  ExactLandscape ls;
  get(&ls.nodes, sizeof ls.nodes);
  get(&ls.indegree_cap, sizeof ls.indegree_cap);
  get(&ls.beta, sizeof ls.beta);
  get(&ls.alpha, sizeof ls.alpha);
  get(&ls.dag_count, sizeof ls.dag_count);
  get(&ls.log_normalizer, sizeof ls.log_normalizer);
  get(&ls.dataset_digest, sizeof ls.dataset_digest);
  std::int32_t mode_count = 0;
  get(&mode_count, sizeof mode_count);
  const std::size_t mm = static_cast<std::size_t>(ls.nodes) * ls.nodes;
  ls.mean_adjacency.resize(mm);
  get(ls.mean_adjacency.data(), mm * sizeof(double));
  ls.modes.resize(static_cast<std::size_t>(mode_count));
  for (auto& mode : ls.modes) {
    std::int32_t code = 0;
    get(&code, sizeof code);
    mode.graph = decode_dag(code, ls.nodes, ls.indegree_cap);
    get(&mode.log_score, sizeof mode.log_score);
    get(&mode.lambda, sizeof mode.lambda);
    get(&mode.basin_size, sizeof mode.basin_size);
    mode.adjacency.resize(mm);
    get(mode.adjacency.data(), mm * sizeof(double));
  }
  std::fclose(f);
  return ls;
}

}  // namespace md
