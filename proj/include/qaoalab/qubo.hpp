#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qaoalab/graph.hpp"

namespace qaoalab {

/// QUBO instance: minimize x^T Q x over binary x, Q symmetric.
struct Qubo {
  int n = 0;
  std::vector<double> q;  // row-major n x n

  Qubo() = default;
  Qubo(int n_vars, std::vector<double> matrix) : n(n_vars), q(std::move(matrix)) {
    if (static_cast<int>(q.size()) != n * n)
      throw std::invalid_argument("qubo: matrix size must be n*n");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (q[i * n + j] != q[j * n + i])
          throw std::invalid_argument("qubo: matrix must be symmetric");
  }

  double at(int i, int j) const { return q[i * n + j]; }

  double value(const BitString& x) const {
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("qubo: bitstring length mismatch");
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!x[i]) continue;
      for (int j = 0; j < n; ++j)
        if (x[j]) v += q[i * n + j];
    }
    return v;
  }
};

/// Ising form: energy(z) = sum h_i z_i + sum_{i<j} J_ij z_i z_j with
/// z in {-1,+1}. energy(z) + offset reproduces the QUBO cost under
/// z_i = 2 x_i - 1.
struct IsingModel {
  struct Coupling {
    int i;
    int j;
    double j_ij;
  };

  std::vector<double> h;
  std::vector<Coupling> couplings;
  double offset = 0.0;

  double energy(const std::vector<int>& z) const {
    if (z.size() != h.size())
      throw std::invalid_argument("ising: spin vector length mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * z[i];
    for (const auto& c : couplings) e += c.j_ij * z[c.i] * z[c.j];
    return e;
  }

  double energy_from_bits(const BitString& x) const {
    std::vector<int> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = 2 * int(x[i]) - 1;
    return energy(z);
  }
};

/// MaxCut as a minimization QUBO: x^T Q x == -maxcut_cost(g, x) for all x.
///
/// cut = sum w (x_i + x_j - 2 x_i x_j), so the negated cost places +w on the
/// symmetric off-diagonal pair and -w on each endpoint's diagonal.
inline Qubo graph_to_qubo(const Graph& g) {
  const int n = g.n_vertices();
  std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& e : g.edges()) {
    q[e.u * n + e.v] += e.w;
    q[e.v * n + e.u] += e.w;
    q[e.u * n + e.u] -= e.w;
    q[e.v * n + e.v] -= e.w;
  }
  return Qubo(n, std::move(q));
}

/// Change of variables x = (1+z)/2 applied to x^T Q x.
inline IsingModel qubo_to_ising(const Qubo& qu) {
  const int n = qu.n;
  IsingModel m;
  m.h.assign(n, 0.0);
  m.offset = 0.0;
  for (int i = 0; i < n; ++i) {
    m.offset += qu.at(i, i) / 2.0;
    m.h[i] += qu.at(i, i) / 2.0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double qij = qu.at(i, j);
      if (qij == 0.0) continue;
      // symmetric pair contributes 2*q_ij * x_i x_j
      m.offset += qij / 2.0;
      m.h[i] += qij / 2.0;
      m.h[j] += qij / 2.0;
      m.couplings.push_back({i, j, qij / 2.0});
    }
  }
  return m;
}

}  // namespace qaoalab
