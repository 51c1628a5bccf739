#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qaoalab/rng.hpp"

namespace qaoalab {

/// Assignment of one binary variable per vertex.
using BitString = std::vector<std::uint8_t>;

struct Edge {
  int u;
  int v;
  double w;
};

/// Weighted undirected graph; the MaxCut instance.
///
/// Edges are canonicalized to u < v at construction. Duplicate pairs are
/// rejected rather than merged so that generator bugs surface immediately.
class Graph {
 public:
  Graph() = default;

  Graph(int n_vertices, std::vector<Edge> edges)
      : n_(n_vertices), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("graph: negative vertex count");
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 0 || e.v >= n_ || e.u == e.v)
        throw std::invalid_argument("graph: edge endpoints out of range");
      if (!std::isfinite(e.w))
        throw std::invalid_argument("graph: non-finite edge weight");
      if (!seen.insert({e.u, e.v}).second)
        throw std::invalid_argument("graph: duplicate edge (" +
                                    std::to_string(e.u) + "," +
                                    std::to_string(e.v) + ")");
    }
  }

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  double total_weight() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.w;
    return s;
  }

  std::vector<int> degrees() const {
    std::vector<int> d(n_, 0);
    for (const auto& e : edges_) {
      ++d[e.u];
      ++d[e.v];
    }
    return d;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Complete graph on n vertices, all edges with weight w.
inline Graph generate_complete(int n, double w = 1.0) {
  if (n < 2) throw std::invalid_argument("generate_complete: need n >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  return Graph(n, std::move(edges));
}

/// Random d-regular simple graph via the configuration model with
/// rejection resampling. Deterministic for a fixed seed.
inline Graph generate_regular(int n, int d, std::uint64_t seed,
                              int max_retries = 1000) {
  if (n <= 0 || d < 0 || d >= n)
    throw std::invalid_argument("generate_regular: need 0 <= d < n");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("generate_regular: n*d must be even");
  Rng rng(seed);
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * d);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    stubs.clear();
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < d; ++k) stubs.push_back(v);
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::size_t j = rng.uniform_int(i);
      std::swap(stubs[i - 1], stubs[j]);
    }
    std::set<std::pair<int, int>> seen;
    std::vector<Edge> edges;
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b) {
        simple = false;
        break;
      }
      if (a > b) std::swap(a, b);
      if (!seen.insert({a, b}).second) {
        simple = false;
        break;
      }
      edges.push_back({a, b, 1.0});
    }
    if (simple) return Graph(n, std::move(edges));
  }
  throw std::runtime_error("generate_regular: rejection budget exhausted");
}

/// Erdos-Renyi graph: each unordered pair kept independently with
/// probability p_edge. Deterministic for a fixed seed.
inline Graph generate_random(int n, double p_edge, std::uint64_t seed) {
  if (!(p_edge >= 0.0 && p_edge <= 1.0))
    throw std::invalid_argument("generate_random: p_edge outside [0,1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p_edge) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

/// Cut value of an assignment: sum of w_ij over edges with x_i != x_j.
inline double maxcut_cost(const Graph& g, const BitString& x) {
  if (static_cast<int>(x.size()) != g.n_vertices())
    throw std::invalid_argument("maxcut_cost: bitstring length mismatch");
  double c = 0.0;
  for (const auto& e : g.edges())
    if (x[e.u] != x[e.v]) c += e.w;
  return c;
}

/// Cut value of basis index k, with vertex i at bit i (LSB = vertex 0).
inline double maxcut_cost_index(const Graph& g, std::uint64_t k) {
  double c = 0.0;
  for (const auto& e : g.edges())
    if (((k >> e.u) ^ (k >> e.v)) & 1ull) c += e.w;
  return c;
}

inline BitString bits_from_index(std::uint64_t k, int n) {
  BitString x(n);
  for (int i = 0; i < n; ++i) x[i] = (k >> i) & 1ull;
  return x;
}

inline std::uint64_t index_from_bits(const BitString& x) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) k |= 1ull << i;
  return k;
}

struct BruteForceResult {
  double c_max = 0.0;
  std::vector<std::uint64_t> argmax;  // basis indices of maximizing strings
};

/// Exhaustive maximum cut. Hard-capped at n <= 24.
///
/// Ties are exact: complement pairs produce bit-identical sums, so both
/// members of each pair always appear in the argmax set.
inline BruteForceResult brute_force_max(const Graph& g) {
  const int n = g.n_vertices();
  if (n < 1 || n > 24)
    throw std::invalid_argument("brute_force_max: n outside [1,24]");
  BruteForceResult r;
  r.c_max = -1.0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t k = 0; k < total; ++k) {
    double c = maxcut_cost_index(g, k);
    if (c > r.c_max) {
      r.c_max = c;
      r.argmax.clear();
      r.argmax.push_back(k);
    } else if (c == r.c_max) {
      r.argmax.push_back(k);
    }
  }
  return r;
}

}  // namespace qaoalab
