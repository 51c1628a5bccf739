#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qaoalab/graph.hpp"
#include "qaoalab/rng.hpp"

namespace qaoalab {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>;  // row-major 2x2

/// Diagonal of the cost operator: values[k] = cut value of basis index k.
struct CostTable {
  int n_qubits = 0;
  std::vector<double> values;
};

inline CostTable build_cost_table(const Graph& g) {
  CostTable ct;
  ct.n_qubits = g.n_vertices();
  ct.values.assign(1ull << ct.n_qubits, 0.0);
  for (const auto& e : g.edges()) {
    const std::uint64_t size = ct.values.size();
    for (std::uint64_t k = 0; k < size; ++k)
      if (((k >> e.u) ^ (k >> e.v)) & 1ull) ct.values[k] += e.w;
  }
  return ct;
}

/// Dense state vector over n qubits. Qubit 0 is the least-significant bit
/// of the basis index.
class StateVector {
 public:
  StateVector() = default;

  explicit StateVector(int n_qubits)
      : n_(n_qubits), amps_(std::size_t(1) << n_qubits, cplx(0.0, 0.0)) {
    if (n_qubits < 1 || n_qubits > 24)
      throw std::invalid_argument("statevector: n outside [1,24]");
    amps_[0] = 1.0;
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amps() const { return amps_; }
  std::vector<cplx>& amps() { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// amps[k] *= exp(-i * gamma * values[k])
  void apply_cost_phase(const CostTable& ct, double gamma) {
    if (ct.values.size() != amps_.size())
      throw std::invalid_argument("apply_cost_phase: table size mismatch");
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      double phi = -gamma * ct.values[k];
      amps_[k] *= cplx(std::cos(phi), std::sin(phi));
    }
  }

  /// amps[k] *= exp(-i * phases[k]); phases accumulated externally.
  void apply_phase_vector(const std::vector<double>& phases) {
    if (phases.size() != amps_.size())
      throw std::invalid_argument("apply_phase_vector: size mismatch");
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      amps_[k] *= cplx(std::cos(-phases[k]), std::sin(-phases[k]));
    }
  }

  /// Per-edge cost phase: amps[k] *= exp(-i * theta * w * [bit u != bit v]).
  void apply_edge_phase(int u, int v, double w, double theta) {
    check_qubit(u);
    check_qubit(v);
    double phi = -theta * w;
    cplx ph(std::cos(phi), std::sin(phi));
    for (std::size_t k = 0; k < amps_.size(); ++k)
      if (((k >> u) ^ (k >> v)) & 1ull) amps_[k] *= ph;
  }

  /// RX(2*beta) on a single qubit: exp(-i * beta * X_q).
  void apply_rx(int q, double beta) {
    check_qubit(q);
    const double c = std::cos(beta), s = std::sin(beta);
    const std::uint64_t bit = 1ull << q;
    for (std::uint64_t k = 0; k < amps_.size(); ++k) {
      if (k & bit) continue;
      cplx a0 = amps_[k], a1 = amps_[k | bit];
      amps_[k] = c * a0 - cplx(0, s) * a1;
      amps_[k | bit] = c * a1 - cplx(0, s) * a0;
    }
  }

  /// RX(2*beta) on every qubit, matching exp(-i * beta * sum_j X_j).
  void apply_rx_all(double beta) {
    for (int q = 0; q < n_; ++q) apply_rx(q, beta);
  }

  /// Generic single-qubit gate. u must be unitary within 1e-9.
  void apply_1q(int q, const Mat2& u) {
    check_qubit(q);
    check_unitary(u);
    apply_1q_unchecked(q, u);
  }

  void apply_1q_unchecked(int q, const Mat2& u) {
    const std::uint64_t bit = 1ull << q;
    for (std::uint64_t k = 0; k < amps_.size(); ++k) {
      if (k & bit) continue;
      cplx a0 = amps_[k], a1 = amps_[k | bit];
      amps_[k] = u[0] * a0 + u[1] * a1;
      amps_[k | bit] = u[2] * a0 + u[3] * a1;
    }
  }

  /// Generic two-qubit gate; u is row-major 4x4 over basis |q2 q1> with
  /// q1 the low bit.
  void apply_2q(int q1, int q2, const std::array<cplx, 16>& u) {
    check_qubit(q1);
    check_qubit(q2);
    if (q1 == q2) throw std::invalid_argument("apply_2q: identical qubits");
    const std::uint64_t b1 = 1ull << q1, b2 = 1ull << q2;
    for (std::uint64_t k = 0; k < amps_.size(); ++k) {
      if (k & (b1 | b2)) continue;
      std::array<cplx, 4> in = {amps_[k], amps_[k | b1], amps_[k | b2],
                                amps_[k | b1 | b2]};
      for (int r = 0; r < 4; ++r) {
        cplx acc(0, 0);
        for (int c = 0; c < 4; ++c) acc += u[r * 4 + c] * in[c];
        std::uint64_t idx = k | (r & 1 ? b1 : 0) | (r & 2 ? b2 : 0);
        amps_[idx] = acc;
      }
    }
  }

  void apply_cx(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target)
      throw std::invalid_argument("apply_cx: identical qubits");
    const std::uint64_t cb = 1ull << control, tb = 1ull << target;
    for (std::uint64_t k = 0; k < amps_.size(); ++k)
      if ((k & cb) && !(k & tb)) std::swap(amps_[k], amps_[k | tb]);
  }

  /// ZZ rotation: amps[k] *= exp(-i * (angle/2) * z_u * z_v) with z = +-1.
  void apply_zz(int u, int v, double angle) {
    check_qubit(u);
    check_qubit(v);
    if (u == v) throw std::invalid_argument("apply_zz: identical qubits");
    cplx ph_same(std::cos(angle / 2), -std::sin(angle / 2));
    cplx ph_diff = std::conj(ph_same);
    for (std::uint64_t k = 0; k < amps_.size(); ++k)
      amps_[k] *= (((k >> u) ^ (k >> v)) & 1ull) ? ph_diff : ph_same;
  }

  void apply_pauli(int q, int which) {  // 0 = X, 1 = Y, 2 = Z
    check_qubit(q);
    const std::uint64_t bit = 1ull << q;
    switch (which) {
      case 0:
        for (std::uint64_t k = 0; k < amps_.size(); ++k)
          if (!(k & bit)) std::swap(amps_[k], amps_[k | bit]);
        break;
      case 1:
        for (std::uint64_t k = 0; k < amps_.size(); ++k)
          if (!(k & bit)) {
            cplx a0 = amps_[k], a1 = amps_[k | bit];
            amps_[k] = cplx(0, -1) * a1;
            amps_[k | bit] = cplx(0, 1) * a0;
          }
        break;
      case 2:
        for (std::uint64_t k = 0; k < amps_.size(); ++k)
          if (k & bit) amps_[k] = -amps_[k];
        break;
      default:
        throw std::invalid_argument("apply_pauli: which must be 0,1,2");
    }
  }

  /// With probability p_noise per listed qubit, apply a uniformly random
  /// Pauli from {X, Y, Z}. Realizes one depolarizing trajectory step.
  void depolarize(const std::vector<int>& qubits, double p_noise, Rng& rng) {
    if (!(p_noise >= 0.0 && p_noise <= 1.0))
      throw std::invalid_argument("depolarize: p_noise outside [0,1]");
    if (p_noise == 0.0) return;
    for (int q : qubits)
      if (rng.uniform() < p_noise)
        apply_pauli(q, static_cast<int>(rng.uniform_int(3)));
  }

  double expectation_diagonal(const CostTable& ct) const {
    if (ct.values.size() != amps_.size())
      throw std::invalid_argument("expectation_diagonal: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < amps_.size(); ++k)
      s += std::norm(amps_[k]) * ct.values[k];
    return s;
  }

  /// Pauli <Z_q> per qubit (+1 on bit value 0).
  std::vector<double> pauli_z_expectations() const {
    std::vector<double> z(n_, 0.0);
    for (std::uint64_t k = 0; k < amps_.size(); ++k) {
      double p = std::norm(amps_[k]);
      if (p == 0.0) continue;
      for (int q = 0; q < n_; ++q) z[q] += ((k >> q) & 1ull) ? -p : p;
    }
    return z;
  }

  /// Ising <z_q> per qubit under z = 2x - 1 (+1 on bit value 1).
  std::vector<double> ising_z_expectations() const {
    auto z = pauli_z_expectations();
    for (auto& v : z) v = -v;
    return z;
  }

  /// i.i.d. computational-basis samples; histogram keyed by basis index.
  std::unordered_map<std::uint64_t, long> sample(long shots,
                                                 std::uint64_t seed) const {
    if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
    std::vector<double> cdf(amps_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      acc += std::norm(amps_[k]);
      cdf[k] = acc;
    }
    Rng rng(seed);
    std::unordered_map<std::uint64_t, long> hist;
    for (long s = 0; s < shots; ++s) {
      double u = rng.uniform() * acc;
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      std::uint64_t k = static_cast<std::uint64_t>(it - cdf.begin());
      if (k >= amps_.size()) k = amps_.size() - 1;
      ++hist[k];
    }
    return hist;
  }

 private:
  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw std::invalid_argument("qubit index out of range");
  }

  static void check_unitary(const Mat2& u) {
    // u * u^dagger == I within 1e-9
    cplx r00 = u[0] * std::conj(u[0]) + u[1] * std::conj(u[1]);
    cplx r01 = u[0] * std::conj(u[2]) + u[1] * std::conj(u[3]);
    cplx r11 = u[2] * std::conj(u[2]) + u[3] * std::conj(u[3]);
    if (std::abs(r00 - 1.0) > 1e-9 || std::abs(r11 - 1.0) > 1e-9 ||
        std::abs(r01) > 1e-9)
      throw std::invalid_argument("apply_1q: matrix is not unitary");
  }

  int n_ = 0;
  std::vector<cplx> amps_;
};

/// Equal superposition |+>^n.
inline StateVector init_plus(int n) {
  StateVector s(n);
  double a = std::pow(2.0, -0.5 * n);
  for (auto& amp : s.amps()) amp = a;
  return s;
}

/// Tensor product of RY(theta_i)|0>: amplitude of x is
/// prod_i (cos(theta_i/2) if x_i=0 else sin(theta_i/2)).
inline StateVector init_product_ry(const std::vector<double>& thetas) {
  const int n = static_cast<int>(thetas.size());
  StateVector s(n);
  for (double t : thetas)
    if (!std::isfinite(t))
      throw std::invalid_argument("init_product_ry: non-finite angle");
  auto& a = s.amps();
  for (std::uint64_t k = 0; k < a.size(); ++k) {
    double amp = 1.0;
    for (int i = 0; i < n; ++i)
      amp *= ((k >> i) & 1ull) ? std::sin(thetas[i] / 2)
                               : std::cos(thetas[i] / 2);
    a[k] = amp;
  }
  return s;
}

inline Mat2 rx_matrix(double theta) {
  return {cplx(std::cos(theta / 2), 0), cplx(0, -std::sin(theta / 2)),
          cplx(0, -std::sin(theta / 2)), cplx(std::cos(theta / 2), 0)};
}

inline Mat2 ry_matrix(double theta) {
  return {cplx(std::cos(theta / 2), 0), cplx(-std::sin(theta / 2), 0),
          cplx(std::sin(theta / 2), 0), cplx(std::cos(theta / 2), 0)};
}

inline Mat2 rz_matrix(double theta) {
  return {cplx(std::cos(theta / 2), -std::sin(theta / 2)), cplx(0, 0),
          cplx(0, 0), cplx(std::cos(theta / 2), std::sin(theta / 2))};
}

}  // namespace qaoalab
