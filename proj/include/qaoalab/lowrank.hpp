#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qaoalab/graph.hpp"
#include "qaoalab/rng.hpp"

namespace qaoalab {

/// Rank-k unit-vector relaxation of MaxCut (Burer-Monteiro form):
/// maximize sum_e w_e (1 - y_u . y_v) / 2 over unit vectors y_i in R^k.
struct LowRankSolution {
  std::vector<std::vector<double>> y;  // n unit vectors of length k
  bool converged = false;
  double objective = 0.0;
};

/// Maximizes the relaxation by sweeps of exact single-vertex ascent:
/// holding the rest fixed, the optimal y_i is the negated, normalized
/// weighted neighbor sum. Deterministic for a fixed seed.
inline LowRankSolution lowrank_cut_relaxation(const Graph& g, int rank,
                                              int iters, std::uint64_t seed) {
  if (rank < 2) throw std::invalid_argument("lowrank: rank must be >= 2");
  const int n = g.n_vertices();
  Rng rng(seed);
  LowRankSolution sol;
  sol.y.assign(n, std::vector<double>(rank, 0.0));
  for (auto& v : sol.y) {
    double norm = 0.0;
    for (auto& x : v) {
      x = rng.gaussian();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[0] = 1.0;
    } else {
      for (auto& x : v) x /= norm;
    }
  }

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }

  for (int it = 0; it < iters; ++it) {
    double max_move = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> gsum(rank, 0.0);
      for (const auto& [j, w] : adj[i])
        for (int d = 0; d < rank; ++d) gsum[d] += w * sol.y[j][d];
      double norm = 0.0;
      for (double x : gsum) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-14) continue;  // isolated or balanced vertex: keep
      double move = 0.0;
      for (int d = 0; d < rank; ++d) {
        double next = -gsum[d] / norm;
        move += std::abs(next - sol.y[i][d]);
        sol.y[i][d] = next;
      }
      max_move = std::max(max_move, move);
    }
    if (max_move < 1e-9) {
      sol.converged = true;
      break;
    }
  }

  sol.objective = 0.0;
  for (const auto& e : g.edges()) {
    double dot = 0.0;
    for (int d = 0; d < rank; ++d) dot += sol.y[e.u][d] * sol.y[e.v][d];
    sol.objective += e.w * (1.0 - dot) / 2.0;
  }
  return sol;
}

/// Random-hyperplane rounding: h_i = sgn(r . y_i) with sgn(0) = +1;
/// side 0 for h = +1.
inline BitString round_hyperplane(const LowRankSolution& sol, Rng& rng) {
  const int n = static_cast<int>(sol.y.size());
  const int rank = n > 0 ? static_cast<int>(sol.y[0].size()) : 0;
  std::vector<double> r(rank);
  for (auto& x : r) x = rng.gaussian();
  BitString bits(n, 0);
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int d = 0; d < rank; ++d) dot += r[d] * sol.y[i][d];
    bits[i] = dot >= 0.0 ? 0 : 1;
  }
  return bits;
}

}  // namespace qaoalab
