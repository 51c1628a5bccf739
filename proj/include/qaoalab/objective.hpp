#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/graph.hpp"
#include "qaoalab/statevector.hpp"

namespace qaoalab {

enum class ObjectiveKind { Expectation, CVar, Gibbs };
enum class EstimatorKind { Exact, Sampled };

/// All objectives are stated in maximization form over the cut value C.
/// CVaR averages the best alpha_c-fraction (upper tail); the Gibbs
/// objective is (1/eta) log <exp(eta C)>, the maximization transcription
/// of the tilted free-energy objective (E = -C), scaled so it approaches
/// the plain expectation as eta -> 0.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Expectation;
  double alpha_c = 1.0;
  double eta = 1.0;
  EstimatorKind estimator = EstimatorKind::Exact;
  long shots = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == ObjectiveKind::CVar && !(alpha_c > 0.0 && alpha_c <= 1.0))
      throw std::invalid_argument("objective: alpha_c outside (0,1]");
    if (kind == ObjectiveKind::Gibbs && !(eta > 0.0))
      throw std::invalid_argument("objective: eta must be > 0");
    if (estimator == EstimatorKind::Sampled && shots < 1)
      throw std::invalid_argument("objective: sampled estimator needs shots");
  }
};

namespace detail {

inline double cvar_from_weighted(std::vector<std::pair<double, double>>& vp,
                                 double alpha) {
  // vp: (value, probability) pairs; upper-tail mean over mass alpha
  std::sort(vp.begin(), vp.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double remaining = alpha, acc = 0.0;
  for (const auto& [v, p] : vp) {
    double take = std::min(p, remaining);
    acc += take * v;
    remaining -= take;
    if (remaining <= 1e-15) break;
  }
  return acc / alpha;
}

inline double gibbs_from_weighted(const std::vector<std::pair<double, double>>& vp,
                                  double eta) {
  double vmax = -1e300;
  for (const auto& [v, p] : vp)
    if (p > 0.0) vmax = std::max(vmax, v);
  double s = 0.0;
  for (const auto& [v, p] : vp)
    if (p > 0.0) s += p * std::exp(eta * (v - vmax));
  return vmax + std::log(s) / eta;
}

}  // namespace detail

inline double objective_of_state(const StateVector& s, const CostTable& ct,
                                 const ObjectiveSpec& spec) {
  spec.validate();
  if (spec.estimator == EstimatorKind::Exact) {
    switch (spec.kind) {
      case ObjectiveKind::Expectation:
        return s.expectation_diagonal(ct);
      case ObjectiveKind::CVar: {
        std::vector<std::pair<double, double>> vp;
        vp.reserve(s.dim());
        for (std::size_t k = 0; k < s.dim(); ++k) {
          double p = std::norm(s.amps()[k]);
          if (p > 0.0) vp.push_back({ct.values[k], p});
        }
        return detail::cvar_from_weighted(vp, spec.alpha_c);
      }
      case ObjectiveKind::Gibbs: {
        std::vector<std::pair<double, double>> vp;
        vp.reserve(s.dim());
        for (std::size_t k = 0; k < s.dim(); ++k) {
          double p = std::norm(s.amps()[k]);
          if (p > 0.0) vp.push_back({ct.values[k], p});
        }
        return detail::gibbs_from_weighted(vp, spec.eta);
      }
    }
  }
  auto hist = s.sample(spec.shots, spec.seed);
  std::vector<std::pair<double, double>> vp;
  vp.reserve(hist.size());
  for (const auto& [k, count] : hist)
    vp.push_back({ct.values[k], double(count) / double(spec.shots)});
  switch (spec.kind) {
    case ObjectiveKind::Expectation: {
      double s_ = 0.0;
      for (const auto& [v, p] : vp) s_ += v * p;
      return s_;
    }
    case ObjectiveKind::CVar:
      return detail::cvar_from_weighted(vp, spec.alpha_c);
    case ObjectiveKind::Gibbs:
      return detail::gibbs_from_weighted(vp, spec.eta);
  }
  return 0.0;  // unreachable
}

/// Runs the circuit and scores the output state.
inline double evaluate(const ParamCircuit& circuit,
                       const std::vector<double>& params, const CostTable& ct,
                       const ObjectiveSpec& spec) {
  if (static_cast<int>(params.size()) != circuit.n_params)
    throw std::invalid_argument("evaluate: parameter length mismatch");
  StateVector s = run_circuit(circuit, params, ct);
  return objective_of_state(s, ct, spec);
}

inline double approx_ratio_expectation(double f_star, double c_max) {
  if (!(c_max > 0.0))
    throw std::invalid_argument(
        "approx_ratio_expectation: degenerate instance (c_max <= 0)");
  return f_star / c_max;
}

inline double approx_ratio_best_sampled(
    const std::unordered_map<std::uint64_t, long>& hist, const Graph& g,
    double c_max) {
  if (hist.empty())
    throw std::invalid_argument("approx_ratio_best_sampled: empty histogram");
  if (!(c_max > 0.0))
    throw std::invalid_argument(
        "approx_ratio_best_sampled: degenerate instance (c_max <= 0)");
  double best = 0.0;
  for (const auto& [k, count] : hist)
    best = std::max(best, maxcut_cost_index(g, k));
  return best / c_max;
}

}  // namespace qaoalab
