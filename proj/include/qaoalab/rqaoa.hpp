#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/graph.hpp"
#include "qaoalab/optimize.hpp"
#include "qaoalab/statevector.hpp"

namespace qaoalab {

/// M_e = <z_u z_v> over the measured distribution, one entry per edge,
/// each in [-1, 1]. The product z_u z_v is the same under either sign
/// convention for z.
inline std::vector<double> zz_correlations(const StateVector& s,
                                           const std::vector<Edge>& edges) {
  std::vector<double> m(edges.size(), 0.0);
  const auto& a = s.amps();
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    double acc = 0.0;
    for (std::uint64_t k = 0; k < a.size(); ++k) {
      double p = std::norm(a[k]);
      if (p == 0.0) continue;
      acc += (((k >> e.u) ^ (k >> e.v)) & 1ull) ? -p : p;
    }
    m[ei] = acc;
  }
  return m;
}

/// One variable elimination: z_removed = sign * z_kept.
struct EliminationStep {
  int kept;
  int removed;
  int sign;  // +1 or -1, sgn of the correlation
  double correlation;
};

struct ReducedProblem {
  Graph graph;                  // re-indexed: labels above `removed` shift down
  std::vector<int> old_to_new;  // -1 for the removed vertex
  double constant;              // cut value already decided by the constraint
};

/// Applies the parity constraint to the graph. Edges incident to the
/// removed vertex are re-routed to the kept one; with sign -1 the cut
/// indicator flips, which contributes +w to the constant and -w to the
/// re-routed weight. Parallel edges merge by weight addition and exact
/// zero merges are dropped.
inline ReducedProblem contract(const Graph& g, const EliminationStep& step) {
  const int n = g.n_vertices();
  if (step.kept < 0 || step.kept >= n || step.removed < 0 ||
      step.removed >= n || step.kept == step.removed)
    throw std::invalid_argument("contract: bad elimination step");
  if (step.sign != 1 && step.sign != -1)
    throw std::invalid_argument("contract: sign must be +-1");

  ReducedProblem out;
  out.constant = 0.0;
  out.old_to_new.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (v == step.removed) continue;
    out.old_to_new[v] = v < step.removed ? v : v - 1;
  }

  std::map<std::pair<int, int>, double> merged;
  for (const auto& e : g.edges()) {
    int a = e.u, b = e.v;
    double w = e.w;
    bool touches = (a == step.removed || b == step.removed);
    if (touches) {
      if (a == step.removed) a = step.kept;
      if (b == step.removed) b = step.kept;
      if (a == b) {  // edge between the constrained pair
        if (step.sign == -1) out.constant += w;
        continue;
      }
      if (step.sign == -1) {
        out.constant += w;
        w = -w;
      }
    }
    int na = out.old_to_new[a], nb = out.old_to_new[b];
    if (na > nb) std::swap(na, nb);
    merged[{na, nb}] += w;
  }

  std::vector<Edge> edges;
  for (const auto& [key, w] : merged)
    if (w != 0.0) edges.push_back({key.first, key.second, w});
  out.graph = Graph(n - 1, std::move(edges));
  return out;
}

struct RqaoaInnerSpec {
  OptimizerSpec opt;
  int p = 1;
  std::vector<double> tqa_dts = {0.3, 0.45, 0.6, 0.75, 0.9};
  int random_starts = 3;
};

struct RqaoaResult {
  BitString bits;
  double value = 0.0;
  long circuit_calls = 0;
  int iterations = 0;
  int eliminations = 0;
};

namespace detail {

inline OptResult multistart_standard(const Graph& g, const CostTable& ct,
                                     const RqaoaInnerSpec& inner,
                                     std::uint64_t seed) {
  ParamCircuit circ = build_standard(g, inner.p);
  ObjectiveFn f = [&](const std::vector<double>& x) {
    StateVector s = run_circuit(circ, x, ct);
    return s.expectation_diagonal(ct);
  };
  OptResult best;
  bool first = true;
  long calls = 0;
  int iters = 0;
  std::vector<std::vector<double>> starts;
  for (double dt : inner.tqa_dts) starts.push_back(init_tqa(inner.p, dt));
  for (int r = 0; r < inner.random_starts; ++r)
    starts.push_back(init_random(circ.slot_kinds, derive_seed(seed, r)));
  for (const auto& x0 : starts) {
    OptResult res = maximize(f, x0, inner.opt);
    calls += res.circuit_calls;
    iters += res.iterations;
    if (first || res.best_value > best.best_value) {
      best = res;
      first = false;
    }
  }
  best.circuit_calls = calls;
  best.iterations = iters;
  return best;
}

}  // namespace detail

/// Recursive elimination: run the inner QAOA, eliminate the edge with the
/// strongest |<z z>| (ties broken by lowest (u, v)), contract, and repeat
/// until the remainder is brute-forceable.
inline RqaoaResult rqaoa_solve(const Graph& g, int cutoff,
                               const RqaoaInnerSpec& inner,
                               std::uint64_t seed) {
  if (cutoff < 1) throw std::invalid_argument("rqaoa_solve: cutoff must be >= 1");
  Graph cur = g;
  std::vector<int> labels(g.n_vertices());
  for (int i = 0; i < g.n_vertices(); ++i) labels[i] = i;
  struct Journal {
    int kept_orig;
    int removed_orig;
    int sign;
  };
  std::vector<Journal> journal;

  RqaoaResult out;
  int level = 0;
  while (cur.n_vertices() > cutoff && cur.n_edges() > 0) {
    CostTable ct = build_cost_table(cur);
    OptResult best =
        detail::multistart_standard(cur, ct, inner, derive_seed(seed, level));
    out.circuit_calls += best.circuit_calls;
    out.iterations += best.iterations;

    ParamCircuit circ = build_standard(cur, inner.p);
    StateVector s = run_circuit(circ, best.final_params, ct);
    std::vector<double> m = zz_correlations(s, cur.edges());

    int pick = 0;
    for (int ei = 1; ei < static_cast<int>(m.size()); ++ei) {
      double a = std::abs(m[ei]), b = std::abs(m[pick]);
      const Edge &ea = cur.edges()[ei], &eb = cur.edges()[pick];
      if (a > b || (a == b && std::pair(ea.u, ea.v) < std::pair(eb.u, eb.v)))
        pick = ei;
    }
    const Edge& e = cur.edges()[pick];
    EliminationStep step{e.u, e.v, m[pick] >= 0.0 ? 1 : -1, m[pick]};
    journal.push_back({labels[step.kept], labels[step.removed], step.sign});

    ReducedProblem red = contract(cur, step);
    std::vector<int> new_labels(cur.n_vertices() - 1);
    for (int v = 0; v < cur.n_vertices(); ++v)
      if (red.old_to_new[v] >= 0) new_labels[red.old_to_new[v]] = labels[v];
    labels.swap(new_labels);
    cur = red.graph;
    ++level;
  }
  out.eliminations = level;

  // Solve the core and lift through the journal.
  BitString bits(g.n_vertices(), 0);
  if (cur.n_edges() > 0) {
    BruteForceResult core = brute_force_max(cur);
    std::uint64_t k = *std::min_element(core.argmax.begin(), core.argmax.end());
    for (int v = 0; v < cur.n_vertices(); ++v)
      bits[labels[v]] = (k >> v) & 1ull;
  }
  for (auto it = journal.rbegin(); it != journal.rend(); ++it)
    bits[it->removed_orig] =
        it->sign == 1 ? bits[it->kept_orig] : 1 - bits[it->kept_orig];

  out.bits = bits;
  out.value = maxcut_cost(g, bits);
  return out;
}

}  // namespace qaoalab
