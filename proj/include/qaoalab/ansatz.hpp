#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaoalab/graph.hpp"
#include "qaoalab/lowrank.hpp"
#include "qaoalab/statevector.hpp"

namespace qaoalab {

enum class OpKind {
  CostLayer,          // all edges phase with one shared slot
  MultiCostLayer,     // one slot per edge
  MixerLayer,         // RX(2*beta) on every qubit, one shared slot
  MultiMixerLayer,    // one RX slot per qubit
  PathZZLayer,        // ZZ rotations on (q, q+1), one slot per pair
  WsMixerLayer,       // warm-start rotated mixer, one shared slot
  AbMixerLayer,       // exp(-i beta (X_j - h_j Z_j)), one shared slot
  ModifiedCostLayer,  // per-edge controlled-RY block, one shared slot
};

enum class SlotKind { Gamma, Beta };

enum class InitKind { Plus, ProductRy };

struct CircuitOp {
  OpKind kind;
  int slot = 0;     // first parameter slot used
  int n_slots = 1;  // consecutive slots consumed
};

/// Ordered gate program with named parameter slots, built per variant.
/// Immutable after construction; cheap to copy (the graph is shared).
struct ParamCircuit {
  int n_qubits = 0;
  InitKind init = InitKind::Plus;
  std::vector<double> init_thetas;  // ProductRy only
  std::vector<CircuitOp> ops;
  int n_params = 0;
  std::vector<SlotKind> slot_kinds;  // per slot
  std::vector<int> slot_layer;       // per slot, 0-based layer
  int depth_p = 0;
  std::string variant_tag;
  std::shared_ptr<const Graph> graph;
  std::vector<double> ws_thetas;  // WS mixer rotation per qubit
  std::vector<double> ab_fields;  // ab bias field per qubit
};

struct NoiseSpec {
  double p_gate = 0.0;  // per-gate, per-touched-qubit depolarizing rate
};

/// Shifts the angle of one primitive gate inside one op; used by the
/// parameter-shift gradient. sub_index enumerates the op's gates
/// (edges for cost layers, qubits for mixer layers).
struct GateShift {
  int op_index = -1;
  int sub_index = -1;
  double delta = 0.0;
};

namespace detail {

inline Mat2 ws_mixer_matrix(double beta, double theta) {
  // exp(-i beta H) with H = -sin(theta) X - cos(theta) Z (unit norm)
  double c = std::cos(beta), s = std::sin(beta);
  double st = std::sin(theta), ct = std::cos(theta);
  return {cplx(c, s * ct), cplx(0, s * st), cplx(0, s * st), cplx(c, -s * ct)};
}

inline Mat2 ab_mixer_matrix(double beta, double h) {
  // exp(-i beta G) with G = X - h Z; |G| = sqrt(1 + h^2)
  double r = std::sqrt(1.0 + h * h);
  double c = std::cos(beta * r), s = std::sin(beta * r) / r;
  return {cplx(c, s * h), cplx(0, -s), cplx(0, -s), cplx(c, -s * h)};
}

/// +sqrt(1+h^2) eigenstate of (X - h Z); reduces to |+> at h = 0 so the
/// zero-bias circuit coincides with the standard ansatz.
inline void ab_init_amps(double h, double& a0, double& a1) {
  double lambda = std::sqrt(1.0 + h * h);
  a0 = 1.0;
  a1 = lambda + h;
  double norm = std::sqrt(a0 * a0 + a1 * a1);
  a0 /= norm;
  a1 /= norm;
}

}  // namespace detail

/// Executes the circuit. The caller supplies the instance cost table
/// (shared across evaluations). With noise enabled, layers are applied
/// gate by gate and each touched qubit is depolarized after its gate.
inline StateVector run_circuit(const ParamCircuit& c,
                               const std::vector<double>& params,
                               const CostTable& ct,
                               const NoiseSpec* noise = nullptr,
                               Rng* noise_rng = nullptr,
                               const GateShift* shift = nullptr) {
  if (static_cast<int>(params.size()) != c.n_params)
    throw std::invalid_argument("run_circuit: parameter length mismatch");
  const bool noisy = noise != nullptr && noise->p_gate > 0.0;
  if (noisy && noise_rng == nullptr)
    throw std::invalid_argument("run_circuit: noise requires an rng");

  StateVector s = c.init == InitKind::Plus ? init_plus(c.n_qubits)
                                           : init_product_ry(c.init_thetas);
  const auto& edges = c.graph->edges();
  std::vector<double> phase_scratch;

  auto shift_for = [&](int op_index, int sub_index) -> double {
    if (shift != nullptr && shift->op_index == op_index &&
        shift->sub_index == sub_index)
      return shift->delta;
    return 0.0;
  };

  for (int oi = 0; oi < static_cast<int>(c.ops.size()); ++oi) {
    const CircuitOp& op = c.ops[oi];
    switch (op.kind) {
      case OpKind::CostLayer: {
        double gamma = params[op.slot];
        bool has_shift = shift != nullptr && shift->op_index == oi;
        if (!noisy) {
          s.apply_cost_phase(ct, gamma);
          if (has_shift) {
            const Edge& e = edges[shift->sub_index];
            s.apply_edge_phase(e.u, e.v, e.w, shift->delta);
          }
        } else {
          for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
            const Edge& e = edges[ei];
            s.apply_edge_phase(e.u, e.v, e.w, gamma + shift_for(oi, ei));
            s.depolarize({e.u, e.v}, noise->p_gate, *noise_rng);
          }
        }
        break;
      }
      case OpKind::MultiCostLayer: {
        if (!noisy) {
          phase_scratch.assign(s.dim(), 0.0);
          for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
            const Edge& e = edges[ei];
            double theta = params[op.slot + ei] + shift_for(oi, ei);
            double tw = theta * e.w;
            for (std::uint64_t k = 0; k < s.dim(); ++k)
              if (((k >> e.u) ^ (k >> e.v)) & 1ull) phase_scratch[k] += tw;
          }
          s.apply_phase_vector(phase_scratch);
        } else {
          for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
            const Edge& e = edges[ei];
            s.apply_edge_phase(e.u, e.v, e.w,
                               params[op.slot + ei] + shift_for(oi, ei));
            s.depolarize({e.u, e.v}, noise->p_gate, *noise_rng);
          }
        }
        break;
      }
      case OpKind::MixerLayer: {
        double beta = params[op.slot];
        bool has_shift = shift != nullptr && shift->op_index == oi;
        if (!noisy && !has_shift) {
          s.apply_rx_all(beta);
        } else {
          for (int q = 0; q < c.n_qubits; ++q) {
            s.apply_rx(q, beta + shift_for(oi, q));
            if (noisy) s.depolarize({q}, noise->p_gate, *noise_rng);
          }
        }
        break;
      }
      case OpKind::MultiMixerLayer: {
        for (int q = 0; q < c.n_qubits; ++q) {
          s.apply_rx(q, params[op.slot + q] + shift_for(oi, q));
          if (noisy) s.depolarize({q}, noise->p_gate, *noise_rng);
        }
        break;
      }
      case OpKind::PathZZLayer: {
        for (int q = 0; q + 1 < c.n_qubits; ++q) {
          s.apply_zz(q, q + 1, params[op.slot + q] + shift_for(oi, q));
          if (noisy) s.depolarize({q, q + 1}, noise->p_gate, *noise_rng);
        }
        break;
      }
      case OpKind::WsMixerLayer: {
        double beta = params[op.slot];
        for (int q = 0; q < c.n_qubits; ++q) {
          s.apply_1q_unchecked(
              q, detail::ws_mixer_matrix(beta + shift_for(oi, q),
                                         c.ws_thetas[q]));
          if (noisy) s.depolarize({q}, noise->p_gate, *noise_rng);
        }
        break;
      }
      case OpKind::AbMixerLayer: {
        double beta = params[op.slot];
        for (int q = 0; q < c.n_qubits; ++q) {
          s.apply_1q_unchecked(
              q, detail::ab_mixer_matrix(beta + shift_for(oi, q),
                                         c.ab_fields[q]));
          if (noisy) s.depolarize({q}, noise->p_gate, *noise_rng);
        }
        break;
      }
      case OpKind::ModifiedCostLayer: {
        // Per edge: conditional RY(gamma) on the lower-index vertex,
        // controlled by the higher-index one, in the standard
        // RY(g/2) . CX . RY(-g/2) . CX decomposition.
        double gamma = params[op.slot];
        auto dep1 = [&](int q) {
          if (noisy) s.depolarize({q}, noise->p_gate, *noise_rng);
        };
        auto dep2 = [&](int a, int b) {
          if (noisy) s.depolarize({a, b}, noise->p_gate, *noise_rng);
        };
        for (const auto& e : edges) {
          const int target = e.u, control = e.v;
          s.apply_1q_unchecked(target, ry_matrix(gamma / 2));
          dep1(target);
          s.apply_cx(control, target);
          dep2(control, target);
          s.apply_1q_unchecked(target, ry_matrix(-gamma / 2));
          dep1(target);
          s.apply_cx(control, target);
          dep2(control, target);
        }
        break;
      }
    }
  }
  return s;
}

namespace detail {

inline void push_layer_slots(ParamCircuit& c, int count, SlotKind kind,
                             int layer) {
  for (int i = 0; i < count; ++i) {
    c.slot_kinds.push_back(kind);
    c.slot_layer.push_back(layer);
  }
  c.n_params += count;
}

}  // namespace detail

/// Standard ansatz: |+>^n, then per layer a cost phase (slot gamma_k) and
/// an RX mixer (slot beta_k). Slot order is [g_1, b_1, ..., g_p, b_p].
inline ParamCircuit build_standard(const Graph& g, int p) {
  if (p < 1) throw std::invalid_argument("build_standard: p must be >= 1");
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = p;
  c.variant_tag = "qaoa";
  for (int k = 0; k < p; ++k) {
    c.ops.push_back({OpKind::CostLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Gamma, k);
    c.ops.push_back({OpKind::MixerLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Beta, k);
  }
  return c;
}

/// Every edge and vertex gets its own angle per layer: (n + m) * p slots.
inline ParamCircuit build_multi_angle(const Graph& g, int p) {
  if (p < 1) throw std::invalid_argument("build_multi_angle: p must be >= 1");
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = p;
  c.variant_tag = "ma-qaoa";
  const int m = g.n_edges();
  for (int k = 0; k < p; ++k) {
    c.ops.push_back({OpKind::MultiCostLayer, c.n_params, m});
    detail::push_layer_slots(c, m, SlotKind::Gamma, k);
    c.ops.push_back({OpKind::MultiMixerLayer, c.n_params, c.n_qubits});
    detail::push_layer_slots(c, c.n_qubits, SlotKind::Beta, k);
  }
  return c;
}

/// p = 1 standard block followed by a problem-independent chain of n-1
/// parameterized ZZ rotations on (q, q+1) and an X layer with one slot
/// per qubit: 2 + (2n - 1) slots in total.
inline ParamCircuit build_plus(const Graph& g) {
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = 1;
  c.variant_tag = "qaoa-plus";
  c.ops.push_back({OpKind::CostLayer, c.n_params, 1});
  detail::push_layer_slots(c, 1, SlotKind::Gamma, 0);
  c.ops.push_back({OpKind::MixerLayer, c.n_params, 1});
  detail::push_layer_slots(c, 1, SlotKind::Beta, 0);
  c.ops.push_back({OpKind::PathZZLayer, c.n_params, c.n_qubits - 1});
  detail::push_layer_slots(c, c.n_qubits - 1, SlotKind::Gamma, 0);
  c.ops.push_back({OpKind::MultiMixerLayer, c.n_params, c.n_qubits});
  detail::push_layer_slots(c, c.n_qubits, SlotKind::Beta, 0);
  return c;
}

/// Cost layer built from conditional rotations: per edge a controlled
/// RY(gamma) acting on the lower-index endpoint; gamma shared per layer.
inline ParamCircuit build_modified(const Graph& g, int p) {
  if (p < 1) throw std::invalid_argument("build_modified: p must be >= 1");
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = p;
  c.variant_tag = "modified-qaoa";
  for (int k = 0; k < p; ++k) {
    c.ops.push_back({OpKind::ModifiedCostLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Gamma, k);
    c.ops.push_back({OpKind::MixerLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Beta, k);
  }
  return c;
}

/// Warm start: initial state RY(theta_i)|0> per qubit with
/// theta_i = 2 asin(sqrt(clamp(c_i, eps, 1-eps))), and the matching
/// rotated mixer RY(theta) RZ(-2 beta) RY(-theta) per qubit.
inline ParamCircuit build_warm_start(const Graph& g, int p,
                                     const std::vector<double>& c_star,
                                     double eps = 0.25) {
  if (p < 1) throw std::invalid_argument("build_warm_start: p must be >= 1");
  if (static_cast<int>(c_star.size()) != g.n_vertices())
    throw std::invalid_argument("build_warm_start: c_star length mismatch");
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("build_warm_start: eps outside (0, 0.5)");
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = p;
  c.variant_tag = "ws-qaoa";
  c.init = InitKind::ProductRy;
  c.ws_thetas.resize(c.n_qubits);
  for (int i = 0; i < c.n_qubits; ++i) {
    double ci = c_star[i];
    if (!(ci >= 0.0 && ci <= 1.0))
      throw std::domain_error("build_warm_start: c_star outside [0,1]");
    double clamped = std::min(std::max(ci, eps), 1.0 - eps);
    c.ws_thetas[i] = 2.0 * std::asin(std::sqrt(clamped));
  }
  c.init_thetas = c.ws_thetas;
  for (int k = 0; k < p; ++k) {
    c.ops.push_back({OpKind::CostLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Gamma, k);
    c.ops.push_back({OpKind::WsMixerLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Beta, k);
  }
  return c;
}

/// Adaptive-bias ansatz: mixer generator X_j - h_j Z_j per qubit; the
/// initial state is the product of the +sqrt(1+h^2) eigenstates, chosen
/// so that h = 0 recovers the standard ansatz under maximization.
inline ParamCircuit build_adaptive_bias(const Graph& g, int p,
                                        const std::vector<double>& h) {
  if (p < 1)
    throw std::invalid_argument("build_adaptive_bias: p must be >= 1");
  if (static_cast<int>(h.size()) != g.n_vertices())
    throw std::invalid_argument("build_adaptive_bias: h length mismatch");
  for (double hj : h)
    if (!std::isfinite(hj))
      throw std::invalid_argument("build_adaptive_bias: non-finite field");
  ParamCircuit c;
  c.n_qubits = g.n_vertices();
  c.graph = std::make_shared<Graph>(g);
  c.depth_p = p;
  c.variant_tag = "ab-qaoa";
  c.ab_fields = h;
  c.init = InitKind::ProductRy;
  // Encode the per-qubit eigenstate as RY angles: amplitudes are real
  // and non-negative, so theta = 2 atan2(a1, a0) reproduces them.
  c.init_thetas.resize(c.n_qubits);
  for (int q = 0; q < c.n_qubits; ++q) {
    double a0, a1;
    detail::ab_init_amps(h[q], a0, a1);
    c.init_thetas[q] = 2.0 * std::atan2(a1, a0);
  }
  for (int k = 0; k < p; ++k) {
    c.ops.push_back({OpKind::CostLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Gamma, k);
    c.ops.push_back({OpKind::AbMixerLayer, c.n_params, 1});
    detail::push_layer_slots(c, 1, SlotKind::Beta, k);
  }
  return c;
}

/// Bias update h_j <- h_j - ell (h_j - <z_j>). z_exp uses the Ising
/// convention z = 2x - 1, so the field tracks the side each qubit leans
/// toward in the measured distribution.
inline std::vector<double> update_bias(const std::vector<double>& h,
                                       const std::vector<double>& z_exp,
                                       double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("update_bias: ell must be > 0");
  if (h.size() != z_exp.size())
    throw std::invalid_argument("update_bias: length mismatch");
  std::vector<double> out(h.size());
  for (std::size_t j = 0; j < h.size(); ++j)
    out[j] = h[j] - ell * (h[j] - z_exp[j]);
  return out;
}

struct WsRelaxation {
  std::vector<double> c;  // per-vertex value in [0,1]
  bool converged = true;
};

/// Continuous relaxation for warm starts. Solves the rank-k relaxation,
/// then maps each vertex against the first vertex's relaxed vector:
/// c_i = (1 - y_i . y_0) / 2. A random reference can land arbitrarily
/// close to perpendicular and wash out the relaxation, so the first
/// vertex anchors the split; the seed drives the ascent start.
inline WsRelaxation warm_start_relaxation(const Graph& g, int rank, int iters,
                                          std::uint64_t seed) {
  const int n = g.n_vertices();
  WsRelaxation out;
  if (g.n_edges() == 0) {
    out.c.assign(n, 0.5);  // objective constant; any c is valid
    return out;
  }
  LowRankSolution sol = lowrank_cut_relaxation(g, rank, iters, seed);
  out.converged = sol.converged;
  out.c.assign(n, 0.5);
  const auto& ref = sol.y[0];
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t d = 0; d < ref.size(); ++d) dot += sol.y[i][d] * ref[d];
    out.c[i] = std::min(1.0, std::max(0.0, (1.0 - dot) / 2.0));
  }
  return out;
}

}  // namespace qaoalab
