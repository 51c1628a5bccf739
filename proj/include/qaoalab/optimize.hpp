#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/objective.hpp"
#include "qaoalab/rng.hpp"

namespace qaoalab {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using GradientFn =
    std::function<std::vector<double>(const std::vector<double>&)>;

enum class OptMethod { NelderMead, Spsa, GradientAscent, CobylaStyle };
enum class GradMode { ShiftRule, CentralDiff };

/// CobylaStyle keeps the published termination contract (value tolerance
/// 2e-4, 500-iteration cap) on top of the Nelder-Mead iteration; the
/// trust-region internals are not reproduced. Echoed into run metadata.
struct OptimizerSpec {
  OptMethod method = OptMethod::NelderMead;
  double tol = 2e-4;
  int max_iters = 500;
  std::uint64_t seed = 0;
  double gd_step = 0.05;
  GradMode gd_mode = GradMode::CentralDiff;
  double fd_h = 1e-5;
  // SPSA gain sequences a_k = a/(k+A)^0.602, c_k = c/k^0.101
  double spsa_a = 0.1;
  double spsa_c = 0.1;
  double spsa_big_a = 10.0;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("optimizer: tol must be > 0");
    if (max_iters < 1)
      throw std::invalid_argument("optimizer: max_iters must be >= 1");
  }
};

struct OptResult {
  std::vector<double> init_params;
  std::vector<double> final_params;
  double best_value = 0.0;
  std::vector<double> trace;  // incumbent best value per iteration
  int iterations = 0;
  long circuit_calls = 0;
  bool converged = false;
};

namespace detail {

struct CountedObjective {
  const ObjectiveFn& f;
  long calls = 0;

  double operator()(const std::vector<double>& x) {
    ++calls;
    double v = f(x);
    if (!std::isfinite(v))
      throw std::runtime_error("optimizer: objective returned non-finite value");
    return v;
  }
};

inline OptResult nelder_mead(CountedObjective& obj, const std::vector<double>& x0,
                             const OptimizerSpec& spec) {
  const int d = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  const double step = 0.25;

  std::vector<std::vector<double>> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 1; i <= d; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= d; ++i) fs[i] = obj(xs[i]);

  OptResult r;
  r.init_params = x0;
  auto order = [&]() {
    std::vector<int> idx(d + 1);
    for (int i = 0; i <= d; ++i) idx[i] = i;
    // maximize: best = highest value first
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] > fs[b]; });
    std::vector<std::vector<double>> xs2(d + 1);
    std::vector<double> fs2(d + 1);
    for (int i = 0; i <= d; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs.swap(xs2);
    fs.swap(fs2);
  };

  for (int it = 0; it < spec.max_iters; ++it) {
    order();
    r.iterations = it + 1;
    r.trace.push_back(fs[0]);
    if (std::abs(fs[0] - fs[d]) < spec.tol) {
      r.converged = true;
      break;
    }
    std::vector<double> centroid(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) centroid[j] += xs[i][j] / d;

    auto blend = [&](double t) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j) x[j] = centroid[j] + t * (centroid[j] - xs[d][j]);
      return x;
    };

    std::vector<double> xr = blend(alpha);
    double fr = obj(xr);
    if (fr > fs[0]) {
      std::vector<double> xe = blend(gamma);
      double fe = obj(xe);
      if (fe > fr) {
        xs[d] = xe;
        fs[d] = fe;
      } else {
        xs[d] = xr;
        fs[d] = fr;
      }
    } else if (fr > fs[d - 1]) {
      xs[d] = xr;
      fs[d] = fr;
    } else {
      std::vector<double> xc = blend(-rho);
      double fc = obj(xc);
      if (fc > fs[d]) {
        xs[d] = xc;
        fs[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          for (int j = 0; j < d; ++j)
            xs[i][j] = xs[0][j] + sigma * (xs[i][j] - xs[0][j]);
          fs[i] = obj(xs[i]);
        }
      }
    }
  }
  order();
  r.best_value = fs[0];
  r.final_params = xs[0];
  if (!r.trace.empty()) r.trace.back() = std::max(r.trace.back(), fs[0]);
  return r;
}

inline OptResult spsa(CountedObjective& obj, const std::vector<double>& x0,
                      const OptimizerSpec& spec) {
  const int d = static_cast<int>(x0.size());
  Rng rng(spec.seed);
  std::vector<double> x = x0;
  OptResult r;
  r.init_params = x0;
  r.best_value = obj(x);
  r.final_params = x;
  int stall = 0;
  for (int k = 1; k <= spec.max_iters; ++k) {
    double ck = spec.spsa_c / std::pow(double(k), 0.101);
    double ak = spec.spsa_a / std::pow(double(k) + spec.spsa_big_a, 0.602);
    std::vector<double> delta(d), xp = x, xm = x;
    for (int j = 0; j < d; ++j) {
      delta[j] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      xp[j] += ck * delta[j];
      xm[j] -= ck * delta[j];
    }
    double fp = obj(xp), fm = obj(xm);
    double prev_best = r.best_value;
    if (fp > r.best_value) {
      r.best_value = fp;
      r.final_params = xp;
    }
    if (fm > r.best_value) {
      r.best_value = fm;
      r.final_params = xm;
    }
    double scale = (fp - fm) / (2.0 * ck);
    for (int j = 0; j < d; ++j) x[j] += ak * scale * delta[j];  // ascent
    r.iterations = k;
    r.trace.push_back(r.best_value);
    stall = (r.best_value - prev_best < spec.tol) ? stall + 1 : 0;
    if (stall >= 20) {
      r.converged = true;
      break;
    }
  }
  double fx = obj(x);
  if (fx > r.best_value) {
    r.best_value = fx;
    r.final_params = x;
  }
  if (!r.trace.empty()) r.trace.back() = r.best_value;
  return r;
}

inline OptResult gradient_ascent(CountedObjective& obj,
                                 const std::vector<double>& x0,
                                 const OptimizerSpec& spec,
                                 const GradientFn& grad_fn) {
  const int d = static_cast<int>(x0.size());
  std::vector<double> x = x0;
  OptResult r;
  r.init_params = x0;
  r.best_value = obj(x);
  r.final_params = x;
  // Adam moments; robust to per-slot scale differences.
  std::vector<double> m(d, 0.0), v(d, 0.0);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int k = 1; k <= spec.max_iters; ++k) {
    std::vector<double> g = grad_fn(x);
    if (static_cast<int>(g.size()) != d)
      throw std::runtime_error("optimizer: gradient length mismatch");
    for (int j = 0; j < d; ++j) {
      m[j] = b1 * m[j] + (1 - b1) * g[j];
      v[j] = b2 * v[j] + (1 - b2) * g[j] * g[j];
      double mh = m[j] / (1 - std::pow(b1, k));
      double vh = v[j] / (1 - std::pow(b2, k));
      x[j] += spec.gd_step * mh / (std::sqrt(vh) + eps);
    }
    double fx = obj(x);
    double prev_best = r.best_value;
    if (fx > r.best_value) {
      r.best_value = fx;
      r.final_params = x;
    }
    r.iterations = k;
    r.trace.push_back(r.best_value);
    if (std::abs(r.best_value - prev_best) < spec.tol && k > 5) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace detail

/// Maximizes f from x0 with the chosen method. Every objective evaluation
/// counts as one circuit call. grad_fn is consulted only by the
/// gradient-ascent method; when absent a central-difference fallback is
/// built from f itself.
inline OptResult maximize(const ObjectiveFn& f, const std::vector<double>& x0,
                          const OptimizerSpec& spec,
                          const GradientFn& grad_fn = nullptr) {
  spec.validate();
  detail::CountedObjective obj{f};
  OptResult r;
  switch (spec.method) {
    case OptMethod::NelderMead:
    case OptMethod::CobylaStyle:
      r = detail::nelder_mead(obj, x0, spec);
      break;
    case OptMethod::Spsa:
      r = detail::spsa(obj, x0, spec);
      break;
    case OptMethod::GradientAscent: {
      GradientFn g = grad_fn;
      if (!g) {
        double h = spec.fd_h;
        const ObjectiveFn& fn = f;
        long* calls = &obj.calls;
        g = [&fn, h, calls](const std::vector<double>& x) {
          std::vector<double> out(x.size());
          std::vector<double> xp = x, xm = x;
          for (std::size_t j = 0; j < x.size(); ++j) {
            xp[j] += h;
            xm[j] -= h;
            out[j] = (fn(xp) - fn(xm)) / (2 * h);
            *calls += 2;
            xp[j] = x[j];
            xm[j] = x[j];
          }
          return out;
        };
      }
      r = detail::gradient_ascent(obj, x0, spec, g);
      break;
    }
  }
  r.circuit_calls = obj.calls;
  return r;
}

struct GradientResult {
  std::vector<double> values;
  std::vector<std::uint8_t> fell_back;  // per slot: shift rule not applicable
};

/// Exact parameter gradient of the expectation objective.
///
/// Shift rule: every primitive gate here is generated by a two-level
/// operator, so for eigenvalue gap D the per-gate derivative is
/// (D/2) [F(theta + pi/(2D)) - F(theta - pi/(2D))]; a slot shared by
/// several gates sums per-gate terms. The modified-cost block mixes
/// three generator eigenvalues, so such slots fall back to central
/// differences and are flagged.
inline GradientResult gradient(const ParamCircuit& c,
                               const std::vector<double>& params,
                               const CostTable& ct,
                               GradMode mode = GradMode::ShiftRule,
                               double fd_h = 1e-5) {
  if (static_cast<int>(params.size()) != c.n_params)
    throw std::invalid_argument("gradient: parameter length mismatch");
  GradientResult out;
  out.values.assign(c.n_params, 0.0);
  out.fell_back.assign(c.n_params, 0);

  auto eval_shift = [&](int op, int sub, double delta) {
    GateShift sh{op, sub, delta};
    StateVector s = run_circuit(c, params, ct, nullptr, nullptr, &sh);
    return s.expectation_diagonal(ct);
  };
  auto central = [&](int slot) {
    std::vector<double> xp = params, xm = params;
    xp[slot] += fd_h;
    xm[slot] -= fd_h;
    StateVector sp = run_circuit(c, xp, ct);
    StateVector sm = run_circuit(c, xm, ct);
    return (sp.expectation_diagonal(ct) - sm.expectation_diagonal(ct)) /
           (2 * fd_h);
  };

  if (mode == GradMode::CentralDiff) {
    for (int slot = 0; slot < c.n_params; ++slot)
      out.values[slot] = central(slot);
    return out;
  }

  const auto& edges = c.graph->edges();
  std::vector<bool> done(c.n_params, false);
  for (int oi = 0; oi < static_cast<int>(c.ops.size()); ++oi) {
    const CircuitOp& op = c.ops[oi];
    switch (op.kind) {
      case OpKind::CostLayer: {
        double& acc = out.values[op.slot];
        for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
          double gap = std::abs(edges[ei].w);
          if (gap == 0.0) continue;
          double s = 3.14159265358979323846 / (2 * gap);
          acc += gap / 2 * (eval_shift(oi, ei, s) - eval_shift(oi, ei, -s));
        }
        done[op.slot] = true;
        break;
      }
      case OpKind::MultiCostLayer: {
        for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
          double gap = std::abs(edges[ei].w);
          if (gap == 0.0) {
            done[op.slot + ei] = true;
            continue;
          }
          double s = 3.14159265358979323846 / (2 * gap);
          out.values[op.slot + ei] =
              gap / 2 * (eval_shift(oi, ei, s) - eval_shift(oi, ei, -s));
          done[op.slot + ei] = true;
        }
        break;
      }
      case OpKind::MixerLayer:
      case OpKind::WsMixerLayer: {
        double& acc = out.values[op.slot];
        const double s = 3.14159265358979323846 / 4;
        for (int q = 0; q < c.n_qubits; ++q)
          acc += eval_shift(oi, q, s) - eval_shift(oi, q, -s);
        done[op.slot] = true;
        break;
      }
      case OpKind::AbMixerLayer: {
        double& acc = out.values[op.slot];
        for (int q = 0; q < c.n_qubits; ++q) {
          double gap = 2.0 * std::sqrt(1.0 + c.ab_fields[q] * c.ab_fields[q]);
          double s = 3.14159265358979323846 / (2 * gap);
          acc += gap / 2 * (eval_shift(oi, q, s) - eval_shift(oi, q, -s));
        }
        done[op.slot] = true;
        break;
      }
      case OpKind::MultiMixerLayer: {
        const double s = 3.14159265358979323846 / 4;
        for (int q = 0; q < c.n_qubits; ++q) {
          out.values[op.slot + q] =
              eval_shift(oi, q, s) - eval_shift(oi, q, -s);
          done[op.slot + q] = true;
        }
        break;
      }
      case OpKind::PathZZLayer: {
        const double s = 3.14159265358979323846 / 2;
        for (int q = 0; q + 1 < c.n_qubits; ++q) {
          out.values[op.slot + q] =
              0.5 * (eval_shift(oi, q, s) - eval_shift(oi, q, -s));
          done[op.slot + q] = true;
        }
        break;
      }
      case OpKind::ModifiedCostLayer: {
        out.values[op.slot] = central(op.slot);
        out.fell_back[op.slot] = 1;
        done[op.slot] = true;
        break;
      }
    }
  }
  for (int slot = 0; slot < c.n_params; ++slot)
    if (!done[slot]) out.values[slot] = central(slot);
  return out;
}

/// Random initialization: gamma-type slots uniform in [0, 2pi),
/// beta-type slots uniform in [0, pi).
inline std::vector<double> init_random(const std::vector<SlotKind>& kinds,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(kinds.size());
  const double two_pi = 2 * 3.14159265358979323846;
  for (std::size_t i = 0; i < kinds.size(); ++i)
    x[i] = kinds[i] == SlotKind::Gamma ? rng.uniform(0, two_pi)
                                       : rng.uniform(0, two_pi / 2);
  return x;
}

/// Annealing-ramp schedule for the standard layout [g_1, b_1, ...]:
/// gamma_k = (k/p) dt rising, beta_k = (1 - k/p) dt falling.
inline std::vector<double> init_tqa(int p, double dt) {
  if (p < 1) throw std::invalid_argument("init_tqa: p must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("init_tqa: dt must be > 0");
  std::vector<double> x(2 * p);
  for (int k = 1; k <= p; ++k) {
    x[2 * (k - 1)] = dt * double(k) / p;
    x[2 * (k - 1) + 1] = dt * (1.0 - double(k) / p);
  }
  return x;
}

namespace detail {

inline std::vector<double> resample_linear(const std::vector<double>& seq) {
  const int p = static_cast<int>(seq.size());
  std::vector<double> out(p + 1);
  if (p == 1) {
    out[0] = out[1] = seq[0];
    return out;
  }
  for (int j = 0; j <= p; ++j) {
    double pos = double(j) * (p - 1) / p;
    int lo = static_cast<int>(std::floor(pos));
    int hi = std::min(lo + 1, p - 1);
    double t = pos - lo;
    out[j] = (1 - t) * seq[lo] + t * seq[hi];
  }
  return out;
}

}  // namespace detail

/// INTERP depth extension: linearly resamples the optimized gamma- and
/// beta-sequences of a standard 2p layout onto p+1 points.
inline std::vector<double> init_interp(const std::vector<double>& params_p,
                                       const std::vector<SlotKind>& kinds) {
  if (params_p.size() != kinds.size() || params_p.empty() ||
      params_p.size() % 2 != 0)
    throw std::invalid_argument("init_interp: unsupported layout");
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    SlotKind expect = (i % 2 == 0) ? SlotKind::Gamma : SlotKind::Beta;
    if (kinds[i] != expect)
      throw std::invalid_argument("init_interp: unsupported layout");
  }
  const int p = static_cast<int>(params_p.size()) / 2;
  std::vector<double> gam(p), bet(p);
  for (int k = 0; k < p; ++k) {
    gam[k] = params_p[2 * k];
    bet[k] = params_p[2 * k + 1];
  }
  auto gam2 = detail::resample_linear(gam);
  auto bet2 = detail::resample_linear(bet);
  std::vector<double> out(2 * (p + 1));
  for (int k = 0; k <= p; ++k) {
    out[2 * k] = gam2[k];
    out[2 * k + 1] = bet2[k];
  }
  return out;
}

/// Layer-by-layer optimization of the standard ansatz: each new layer
/// starts at zero (an identity layer) and only its two slots move while
/// earlier layers stay frozen at their optima.
inline OptResult optimize_layerwise(const Graph& g, int p_target,
                                    const OptimizerSpec& spec) {
  if (p_target < 1)
    throw std::invalid_argument("optimize_layerwise: p_target must be >= 1");
  CostTable ct = build_cost_table(g);
  std::vector<double> frozen;
  OptResult total;
  total.init_params.assign(2 * p_target, 0.0);
  for (int q = 1; q <= p_target; ++q) {
    ParamCircuit circ = build_standard(g, q);
    std::vector<double> base = frozen;
    base.resize(2 * q, 0.0);
    ObjectiveFn f = [&](const std::vector<double>& layer) {
      std::vector<double> full = base;
      full[2 * (q - 1)] = layer[0];
      full[2 * (q - 1) + 1] = layer[1];
      StateVector s = run_circuit(circ, full, ct);
      return s.expectation_diagonal(ct);
    };
    OptResult stage = maximize(f, {0.0, 0.0}, spec);
    total.iterations += stage.iterations;
    total.circuit_calls += stage.circuit_calls;
    total.trace.insert(total.trace.end(), stage.trace.begin(),
                       stage.trace.end());
    total.best_value = stage.best_value;
    total.converged = stage.converged;
    frozen = base;
    frozen[2 * (q - 1)] = stage.final_params[0];
    frozen[2 * (q - 1) + 1] = stage.final_params[1];
  }
  total.final_params = frozen;
  return total;
}

struct FalqonResult {
  std::vector<double> betas;  // feedback control values, one per layer
  std::vector<double> trace;  // <C> before any layer and after each layer
};

namespace detail {

/// A = <i[H_d, H_C]> with H_d = sum_j X_j, evaluated through
/// A = -2 Im <psi| H_d (C . psi)>.
inline double falqon_a(const StateVector& s, const CostTable& ct) {
  double im = 0.0;
  const auto& a = s.amps();
  for (int q = 0; q < s.n_qubits(); ++q) {
    const std::uint64_t bit = 1ull << q;
    for (std::uint64_t k = 0; k < a.size(); ++k) {
      // conj(psi_k) * (C . psi)_{k ^ bit}
      const std::uint64_t j = k ^ bit;
      im += (std::conj(a[k]) * (ct.values[j] * a[j])).imag();
    }
  }
  return -2.0 * im;
}

}  // namespace detail

/// Feedback-only schedule: layer k applies the cost phase at the fixed
/// step dt and then the mixer at angle beta_k * dt, with beta_k set from
/// the measured commutator so each mixer step cannot lower <C>. From
/// |+>^n the first control value is exactly zero.
inline FalqonResult falqon_run(const Graph& g, int p_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("falqon_run: dt must be > 0");
  if (p_max < 1) throw std::invalid_argument("falqon_run: p_max must be >= 1");
  CostTable ct = build_cost_table(g);
  StateVector s = init_plus(g.n_vertices());
  FalqonResult r;
  r.trace.push_back(s.expectation_diagonal(ct));
  for (int k = 1; k <= p_max; ++k) {
    double beta = detail::falqon_a(s, ct);
    r.betas.push_back(beta);
    s.apply_cost_phase(ct, dt);
    s.apply_rx_all(beta * dt);
    r.trace.push_back(s.expectation_diagonal(ct));
  }
  return r;
}

/// Warm parameters for a depth-p standard circuit from p feedback layers:
/// gamma_k = dt, beta_k = control_k * dt.
inline std::vector<double> falqon_plus_seed(const Graph& g, int p, double dt) {
  FalqonResult r = falqon_run(g, p, dt);
  std::vector<double> x(2 * p);
  for (int k = 0; k < p; ++k) {
    x[2 * k] = dt;
    x[2 * k + 1] = r.betas[k] * dt;
  }
  return x;
}

}  // namespace qaoalab
