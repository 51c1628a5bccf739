#pragma once

// Dense-matrix reference for circuit execution, kept independent of the
// simulator's in-place kernels: every layer is built as an explicit
// generator matrix and exponentiated by scaled Taylor series, and the
// full state is produced by dense mat-vec products. Only usable for
// small qubit counts.

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/graph.hpp"

namespace oracle {

using qaoalab::cplx;

struct DenseMatrix {
  int dim = 0;
  std::vector<cplx> a;  // row-major

  explicit DenseMatrix(int d) : dim(d), a(std::size_t(d) * d, cplx(0, 0)) {}

  cplx& at(int r, int c) { return a[std::size_t(r) * dim + c]; }
  const cplx& at(int r, int c) const { return a[std::size_t(r) * dim + c]; }

  static DenseMatrix identity(int d) {
    DenseMatrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

inline DenseMatrix multiply(const DenseMatrix& x, const DenseMatrix& y) {
  assert(x.dim == y.dim);
  DenseMatrix out(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int k = 0; k < x.dim; ++k) {
      cplx v = x.at(i, k);
      if (v == cplx(0, 0)) continue;
      for (int j = 0; j < x.dim; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

inline std::vector<cplx> matvec(const DenseMatrix& m, const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size(), cplx(0, 0));
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) out[i] += m.at(i, j) * v[j];
  return out;
}

/// exp(M) by scaling-and-squaring with a Taylor series.
inline DenseMatrix matrix_exp(const DenseMatrix& m) {
  double norm = 0.0;
  for (int i = 0; i < m.dim; ++i) {
    double row = 0.0;
    for (int j = 0; j < m.dim; ++j) row += std::abs(m.at(i, j));
    norm = std::max(norm, row);
  }
  int s = 0;
  while (norm > 0.5) {
    norm /= 2;
    ++s;
  }
  DenseMatrix scaled(m.dim);
  double f = std::pow(2.0, -s);
  for (std::size_t i = 0; i < m.a.size(); ++i) scaled.a[i] = m.a[i] * f;

  DenseMatrix result = DenseMatrix::identity(m.dim);
  DenseMatrix term = DenseMatrix::identity(m.dim);
  for (int k = 1; k <= 24; ++k) {
    term = multiply(term, scaled);
    for (std::size_t i = 0; i < term.a.size(); ++i) term.a[i] /= double(k);
    for (std::size_t i = 0; i < result.a.size(); ++i) result.a[i] += term.a[i];
  }
  for (int k = 0; k < s; ++k) result = multiply(result, result);
  return result;
}

/// Embeds a single-qubit operator at qubit q (LSB indexing).
inline DenseMatrix embed_1q(int n, int q, const qaoalab::Mat2& u) {
  const int dim = 1 << n;
  DenseMatrix m(dim);
  for (int k = 0; k < dim; ++k) {
    int bit = (k >> q) & 1;
    int base = k & ~(1 << q);
    m.at(k, base) += u[bit * 2 + 0];
    m.at(k, base | (1 << q)) += u[bit * 2 + 1];
  }
  return m;
}

inline DenseMatrix pauli_x(int n, int q) {
  return embed_1q(n, q, {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)});
}

inline DenseMatrix pauli_y(int n, int q) {
  return embed_1q(n, q, {cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)});
}

inline DenseMatrix pauli_z(int n, int q) {
  return embed_1q(n, q, {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)});
}

inline DenseMatrix cx_matrix(int n, int control, int target) {
  const int dim = 1 << n;
  DenseMatrix m(dim);
  for (int k = 0; k < dim; ++k) {
    int dst = (k & (1 << control)) ? (k ^ (1 << target)) : k;
    m.at(dst, k) = 1.0;
  }
  return m;
}

inline DenseMatrix scaled(const DenseMatrix& m, cplx c) {
  DenseMatrix out = m;
  for (auto& v : out.a) v *= c;
  return out;
}

inline DenseMatrix add(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

inline DenseMatrix exp_minus_i(const DenseMatrix& h) {
  return matrix_exp(scaled(h, cplx(0, -1)));
}

/// Diagonal cut operator of the whole graph.
inline DenseMatrix cost_hamiltonian(const qaoalab::Graph& g) {
  const int dim = 1 << g.n_vertices();
  DenseMatrix m(dim);
  for (int k = 0; k < dim; ++k)
    m.at(k, k) = qaoalab::maxcut_cost_index(g, std::uint64_t(k));
  return m;
}

/// Reference execution of a variant circuit.
inline std::vector<cplx> run(const qaoalab::ParamCircuit& c,
                             const std::vector<double>& params) {
  using namespace qaoalab;
  const int n = c.n_qubits;
  const int dim = 1 << n;
  std::vector<cplx> state(dim, cplx(0, 0));
  if (c.init == InitKind::Plus) {
    for (auto& v : state) v = std::pow(2.0, -0.5 * n);
  } else {
    for (int k = 0; k < dim; ++k) {
      double amp = 1.0;
      for (int q = 0; q < n; ++q)
        amp *= ((k >> q) & 1) ? std::sin(c.init_thetas[q] / 2)
                              : std::cos(c.init_thetas[q] / 2);
      state[k] = amp;
    }
  }

  const auto& edges = c.graph->edges();
  for (const auto& op : c.ops) {
    switch (op.kind) {
      case OpKind::CostLayer: {
        DenseMatrix h = scaled(cost_hamiltonian(*c.graph), params[op.slot]);
        state = matvec(exp_minus_i(h), state);
        break;
      }
      case OpKind::MultiCostLayer: {
        DenseMatrix h(dim);
        for (int ei = 0; ei < int(edges.size()); ++ei) {
          const Edge& e = edges[ei];
          for (int k = 0; k < dim; ++k)
            if (((k >> e.u) ^ (k >> e.v)) & 1)
              h.at(k, k) += params[op.slot + ei] * e.w;
        }
        state = matvec(exp_minus_i(h), state);
        break;
      }
      case OpKind::MixerLayer: {
        DenseMatrix h(dim);
        for (int q = 0; q < n; ++q) h = add(h, pauli_x(n, q));
        state = matvec(exp_minus_i(scaled(h, params[op.slot])), state);
        break;
      }
      case OpKind::MultiMixerLayer: {
        DenseMatrix h(dim);
        for (int q = 0; q < n; ++q)
          h = add(h, scaled(pauli_x(n, q), params[op.slot + q]));
        state = matvec(exp_minus_i(h), state);
        break;
      }
      case OpKind::PathZZLayer: {
        DenseMatrix h(dim);
        for (int q = 0; q + 1 < n; ++q) {
          DenseMatrix zz = multiply(pauli_z(n, q), pauli_z(n, q + 1));
          h = add(h, scaled(zz, 0.5 * params[op.slot + q]));
        }
        state = matvec(exp_minus_i(h), state);
        break;
      }
      case OpKind::WsMixerLayer: {
        DenseMatrix h(dim);
        for (int q = 0; q < n; ++q) {
          h = add(h, scaled(pauli_x(n, q), -std::sin(c.ws_thetas[q])));
          h = add(h, scaled(pauli_z(n, q), -std::cos(c.ws_thetas[q])));
        }
        state = matvec(exp_minus_i(scaled(h, params[op.slot])), state);
        break;
      }
      case OpKind::AbMixerLayer: {
        DenseMatrix h(dim);
        for (int q = 0; q < n; ++q) {
          h = add(h, pauli_x(n, q));
          h = add(h, scaled(pauli_z(n, q), -c.ab_fields[q]));
        }
        state = matvec(exp_minus_i(scaled(h, params[op.slot])), state);
        break;
      }
      case OpKind::ModifiedCostLayer: {
        double gamma = params[op.slot];
        for (const auto& e : edges) {
          const int target = e.u, control = e.v;
          DenseMatrix ry_half =
              exp_minus_i(scaled(pauli_y(n, target), gamma / 4));
          DenseMatrix ry_neg =
              exp_minus_i(scaled(pauli_y(n, target), -gamma / 4));
          DenseMatrix cx = cx_matrix(n, control, target);
          state = matvec(ry_half, state);
          state = matvec(cx, state);
          state = matvec(ry_neg, state);
          state = matvec(cx, state);
        }
        break;
      }
    }
  }
  return state;
}

}  // namespace oracle
