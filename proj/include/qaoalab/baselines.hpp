#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "qaoalab/graph.hpp"
#include "qaoalab/lowrank.hpp"
#include "qaoalab/rng.hpp"

namespace qaoalab {

struct CutResult {
  BitString bits;
  double value = 0.0;
};

namespace detail {

inline std::vector<std::vector<std::pair<int, double>>> adjacency(
    const Graph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.n_vertices());
  for (const auto& e : g.edges()) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  return adj;
}

/// Cut change from flipping bit i.
inline double flip_gain(const Graph& g,
                        const std::vector<std::vector<std::pair<int, double>>>& adj,
                        const BitString& x, int i) {
  double gain = 0.0;
  for (const auto& [j, w] : adj[i]) gain += (x[i] != x[j]) ? -w : w;
  (void)g;
  return gain;
}

}  // namespace detail

/// Vertices assigned in index order to the side with the larger
/// immediate cut gain; ties go to side 0.
inline CutResult greedy_cut(const Graph& g) {
  auto adj = detail::adjacency(g);
  BitString x(g.n_vertices(), 0);
  for (int i = 0; i < g.n_vertices(); ++i) {
    double gain0 = 0.0, gain1 = 0.0;
    for (const auto& [j, w] : adj[i]) {
      if (j >= i) continue;  // only already-assigned neighbors
      (x[j] == 1 ? gain0 : gain1) += w;
    }
    x[i] = gain1 > gain0 ? 1 : 0;
  }
  return {x, maxcut_cost(g, x)};
}

/// Single-bit-flip hill climbing to a 1-flip-optimal assignment.
inline CutResult local_search(const Graph& g, const BitString& x0,
                              int max_passes = 1000) {
  if (static_cast<int>(x0.size()) != g.n_vertices())
    throw std::invalid_argument("local_search: bitstring length mismatch");
  auto adj = detail::adjacency(g);
  BitString x = x0;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int i = 0; i < g.n_vertices(); ++i) {
      if (detail::flip_gain(g, adj, x, i) > 0.0) {
        x[i] ^= 1;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {x, maxcut_cost(g, x)};
}

struct SaSchedule {
  double t0 = 2.0;
  double t_min = 1e-3;
  double cooling = 0.999;
  long steps = 20000;
};

/// Metropolis single-flip chain with geometric cooling; returns the best
/// assignment seen. Deterministic per seed.
inline CutResult simulated_annealing(const Graph& g, const SaSchedule& sched,
                                     std::uint64_t seed) {
  if (!(sched.t0 > sched.t_min && sched.t_min > 0.0))
    throw std::invalid_argument("simulated_annealing: need t0 > t_min > 0");
  if (!(sched.cooling > 0.0 && sched.cooling < 1.0))
    throw std::invalid_argument("simulated_annealing: cooling outside (0,1)");
  const int n = g.n_vertices();
  auto adj = detail::adjacency(g);
  Rng rng(seed);
  BitString x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform() < 0.5 ? 0 : 1;
  double value = maxcut_cost(g, x);
  BitString best = x;
  double best_value = value;
  double t = sched.t0;
  for (long step = 0; step < sched.steps; ++step) {
    int i = static_cast<int>(rng.uniform_int(n));
    double gain = detail::flip_gain(g, adj, x, i);
    if (gain >= 0.0 || rng.uniform() < std::exp(gain / t)) {
      x[i] ^= 1;
      value += gain;
      if (value > best_value) {
        best_value = value;
        best = x;
      }
    }
    t = std::max(sched.t_min, t * sched.cooling);
  }
  return {best, maxcut_cost(g, best)};
}

namespace detail {

/// Leading Laplacian eigenvector of one connected component by power
/// iteration; returns false on stagnation.
inline bool power_iterate_component(
    const Graph& g, const std::vector<int>& comp,
    const std::vector<std::vector<std::pair<int, double>>>& adj,
    std::vector<double>& eigvec) {
  const int m = static_cast<int>(comp.size());
  std::vector<int> local(g.n_vertices(), -1);
  for (int i = 0; i < m; ++i) local[comp[i]] = i;
  std::vector<double> deg(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (const auto& [j, w] : adj[comp[i]]) deg[i] += w;

  std::vector<double> x(m), y(m);
  Rng rng(0x5eed5eedull);  // fixed start; the routine itself takes no seed
  for (auto& v : x) v = rng.uniform() - 0.5;

  auto apply_laplacian = [&](const std::vector<double>& in,
                             std::vector<double>& out) {
    for (int i = 0; i < m; ++i) {
      double acc = deg[i] * in[i];
      for (const auto& [j, w] : adj[comp[i]]) acc -= w * in[local[j]];
      out[i] = acc;
    }
  };

  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    apply_laplacian(x, y);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-14) return false;  // edgeless component or dead start
    for (int i = 0; i < m; ++i) y[i] /= norm;
    lambda = 0.0;
    apply_laplacian(y, x);
    for (int i = 0; i < m; ++i) lambda += y[i] * x[i];
    double resid = 0.0;
    for (int i = 0; i < m; ++i) {
      double r = x[i] - lambda * y[i];
      resid += r * r;
    }
    x = y;
    if (std::sqrt(resid) < 1e-8 * std::max(1.0, std::abs(lambda))) {
      eigvec = x;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Sign partition of the top Laplacian eigenvector (per component),
/// polished by one local-search invocation. Uses the largest eigenvalue
/// rather than the Fiedler vector: the heavy-cut direction, not the
/// clustering one.
inline CutResult spectral_cut(const Graph& g) {
  const int n = g.n_vertices();
  auto adj = detail::adjacency(g);
  BitString x(n, 0);

  std::vector<int> comp_of(n, -1);
  int n_comps = 0;
  for (int s = 0; s < n; ++s) {
    if (comp_of[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp_of[s] = n_comps;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& [j, w] : adj[v])
        if (comp_of[j] < 0) {
          comp_of[j] = n_comps;
          q.push(j);
        }
    }
    ++n_comps;
  }

  bool stagnated = false;
  for (int ci = 0; ci < n_comps; ++ci) {
    std::vector<int> comp;
    for (int v = 0; v < n; ++v)
      if (comp_of[v] == ci) comp.push_back(v);
    if (comp.size() < 2) continue;
    std::vector<double> vec;
    if (!detail::power_iterate_component(g, comp, adj, vec)) {
      bool has_edge = false;
      for (int v : comp)
        if (!adj[v].empty()) has_edge = true;
      if (has_edge) stagnated = true;
      continue;
    }
    for (std::size_t i = 0; i < comp.size(); ++i)
      x[comp[i]] = vec[i] >= 0.0 ? 0 : 1;
  }

  if (stagnated) {
    Rng rng(0xfa11bacull);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform() < 0.5 ? 0 : 1;
  }
  return local_search(g, x);
}

/// Low-rank relaxation plus best-of random-hyperplane roundings.
inline CutResult gw_cut(const Graph& g, int rank, int ascent_iters,
                        int rounding_rounds, std::uint64_t seed) {
  if (rounding_rounds < 1)
    throw std::invalid_argument("gw_cut: rounding_rounds must be >= 1");
  const int n = g.n_vertices();
  if (g.n_edges() == 0) return {BitString(n, 0), 0.0};
  LowRankSolution sol =
      lowrank_cut_relaxation(g, rank, ascent_iters, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  CutResult best;
  best.bits.assign(n, 0);
  best.value = -1.0;
  for (int r = 0; r < rounding_rounds; ++r) {
    BitString bits = round_hyperplane(sol, rng);
    double v = maxcut_cost(g, bits);
    if (v > best.value) {
      best.value = v;
      best.bits = bits;
    }
  }
  return best;
}

}  // namespace qaoalab
