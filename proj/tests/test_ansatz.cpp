#include <gtest/gtest.h>

#include <cmath>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/graph.hpp"
#include "qaoalab/optimize.hpp"
#include "support/dense_oracle.hpp"

using namespace qaoalab;

namespace {

constexpr double kPi = 3.14159265358979323846;

Graph ring_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(n, edges);
}

double max_state_diff(const StateVector& a, const StateVector& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    d = std::max(d, std::abs(a.amps()[k] - b.amps()[k]));
  return d;
}

double max_oracle_diff(const ParamCircuit& c, const std::vector<double>& x) {
  CostTable ct = build_cost_table(*c.graph);
  StateVector s = run_circuit(c, x, ct);
  auto ref = oracle::run(c, x);
  double d = 0.0;
  for (std::size_t k = 0; k < s.dim(); ++k)
    d = std::max(d, std::abs(s.amps()[k] - ref[k]));
  return d;
}

}  // namespace

TEST(BuildStandard, SlotLayout) {
  Graph g = generate_complete(4, 1.0);
  ParamCircuit c1 = build_standard(g, 1);
  EXPECT_EQ(c1.n_params, 2);
  ParamCircuit c8 = build_standard(g, 8);
  EXPECT_EQ(c8.n_params, 16);
  for (int k = 0; k < 8; ++k) {
    EXPECT_EQ(c8.slot_kinds[2 * k], SlotKind::Gamma);
    EXPECT_EQ(c8.slot_kinds[2 * k + 1], SlotKind::Beta);
    EXPECT_EQ(c8.slot_layer[2 * k], k);
  }
  EXPECT_THROW(build_standard(g, 0), std::invalid_argument);
}

TEST(BuildStandard, ZeroParamsGivePlusState) {
  Graph g = generate_random(4, 0.5, 1);
  CostTable ct = build_cost_table(g);
  ParamCircuit c = build_standard(g, 3);
  StateVector s = run_circuit(c, std::vector<double>(6, 0.0), ct);
  EXPECT_LT(max_state_diff(s, init_plus(4)), 1e-12);
}

TEST(BuildMultiAngle, ParamCounts) {
  Graph k3 = generate_complete(3, 1.0);
  EXPECT_EQ(build_multi_angle(k3, 2).n_params, 12);  // (n + m) p
  Graph edge(2, {{0, 1, 1.0}});
  EXPECT_EQ(build_multi_angle(edge, 1).n_params, 3);
}

TEST(BuildMultiAngle, TiedParametersReproduceStandard) {
  for (std::uint64_t seed : {1, 2}) {
    Graph g = generate_random(4, 0.6, seed);
    const int p = 2, m = g.n_edges(), n = g.n_vertices();
    CostTable ct = build_cost_table(g);
    ParamCircuit ma = build_multi_angle(g, p);
    ParamCircuit st = build_standard(g, p);
    Rng rng(seed);
    std::vector<double> sp(2 * p);
    for (auto& v : sp) v = rng.uniform(0, 2 * kPi);
    std::vector<double> tied(ma.n_params);
    for (int k = 0; k < p; ++k) {
      for (int e = 0; e < m; ++e) tied[k * (m + n) + e] = sp[2 * k];
      for (int q = 0; q < n; ++q) tied[k * (m + n) + m + q] = sp[2 * k + 1];
    }
    StateVector a = run_circuit(ma, tied, ct);
    StateVector b = run_circuit(st, sp, ct);
    EXPECT_LT(max_state_diff(a, b), 1e-12);
  }
}

TEST(BuildPlus, SlotCountsAndZeroExtraLimit) {
  Graph g4 = generate_complete(4, 1.0);
  ParamCircuit plus = build_plus(g4);
  EXPECT_EQ(plus.n_params, 9);  // 2 + (2n - 1)
  Graph g2(2, {{0, 1, 1.0}});
  EXPECT_EQ(build_plus(g2).n_params, 5);

  CostTable ct = build_cost_table(g4);
  std::vector<double> x(plus.n_params, 0.0);
  x[0] = 0.8;
  x[1] = 0.4;
  StateVector a = run_circuit(plus, x, ct);
  StateVector b = run_circuit(build_standard(g4, 1), {0.8, 0.4}, ct);
  EXPECT_LT(max_state_diff(a, b), 1e-12);
}

TEST(BuildModified, SlotSharingAndZeroGammaIdentity) {
  Graph k3 = generate_complete(3, 1.0);
  ParamCircuit c = build_modified(k3, 1);
  EXPECT_EQ(c.n_params, 2);
  CostTable ct = build_cost_table(k3);
  // gamma = 0: the conditional-rotation block collapses to CX pairs that
  // cancel, so only the mixer acts.
  StateVector a = run_circuit(c, {0.0, 0.7}, ct);
  StateVector b = init_plus(3);
  b.apply_rx_all(0.7);
  EXPECT_LT(max_state_diff(a, b), 1e-12);
  EXPECT_LT(max_oracle_diff(c, {0.0, 0.7}), 1e-9);
  EXPECT_LT(max_oracle_diff(c, {1.1, 0.4}), 1e-9);
}

TEST(BuildWarmStart, ThetaFormula) {
  Graph edge(2, {{0, 1, 1.0}});
  ParamCircuit c0 = build_warm_start(edge, 1, {0.0, 1.0}, 0.25);
  EXPECT_NEAR(c0.ws_thetas[0], 2 * std::asin(std::sqrt(0.25)), 1e-12);
  EXPECT_NEAR(c0.ws_thetas[1], 2 * kPi / 3, 1e-12);  // 2 asin(sqrt(0.75))
  ParamCircuit eps_c = build_warm_start(edge, 1, {0.0, 0.0}, 0.1);
  EXPECT_NEAR(eps_c.ws_thetas[0], 2 * std::asin(std::sqrt(0.1)), 1e-12);
  EXPECT_THROW(build_warm_start(edge, 1, {-0.2, 0.5}), std::domain_error);
  EXPECT_THROW(build_warm_start(edge, 1, {0.5}), std::invalid_argument);
}

TEST(BuildWarmStart, HalfRelaxationMatchesStandardUpToBetaSign) {
  // c* = 0.5 gives theta = pi/2 and the rotated mixer becomes the RX
  // mixer with a reversed angle; the states coincide under beta -> -beta.
  Graph edge(2, {{0, 1, 1.0}});
  CostTable ct = build_cost_table(edge);
  ParamCircuit ws = build_warm_start(edge, 1, {0.5, 0.5});
  EXPECT_NEAR(ws.ws_thetas[0], kPi / 2, 1e-12);
  ParamCircuit st = build_standard(edge, 1);
  for (double g : {0.3, 1.0, 2.2})
    for (double b : {0.2, 0.9, 1.5}) {
      StateVector a = run_circuit(ws, {g, b}, ct);
      StateVector r = run_circuit(st, {g, -b}, ct);
      EXPECT_LT(max_state_diff(a, r), 1e-12);
    }
}

TEST(BuildAdaptiveBias, ZeroFieldReducesToStandard) {
  Graph g = generate_random(4, 0.6, 5);
  CostTable ct = build_cost_table(g);
  ParamCircuit ab = build_adaptive_bias(g, 2, std::vector<double>(4, 0.0));
  ParamCircuit st = build_standard(g, 2);
  std::vector<double> x = {0.4, 0.7, 1.2, 0.5};
  EXPECT_LT(max_state_diff(run_circuit(ab, x, ct), run_circuit(st, x, ct)),
            1e-12);
}

TEST(BuildAdaptiveBias, GeneratorEigenvalues) {
  // (X - h Z) at h = 1 has eigenvalues +-sqrt(2); the mixer matrix must
  // act as exp(-i beta lambda) on the corresponding eigenvector.
  double h = 1.0, beta = 0.37;
  Mat2 u = detail::ab_mixer_matrix(beta, h);
  double lambda = std::sqrt(2.0);
  double a0 = 1.0, a1 = lambda + h;
  double norm = std::sqrt(a0 * a0 + a1 * a1);
  a0 /= norm;
  a1 /= norm;
  cplx out0 = u[0] * a0 + u[1] * a1;
  cplx out1 = u[2] * a0 + u[3] * a1;
  cplx phase(std::cos(beta * lambda), -std::sin(beta * lambda));
  EXPECT_LT(std::abs(out0 - phase * a0), 1e-12);
  EXPECT_LT(std::abs(out1 - phase * a1), 1e-12);
}

TEST(BuildAdaptiveBias, MatchesDenseOracle) {
  Rng rng(3);
  Graph g = generate_random(3, 0.8, 4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> h = {rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-1, 1)};
    ParamCircuit c = build_adaptive_bias(g, 1, h);
    std::vector<double> x = {rng.uniform(0, 2 * kPi), rng.uniform(0, kPi)};
    EXPECT_LT(max_oracle_diff(c, x), 1e-9);
  }
}

TEST(UpdateBias, Formula) {
  EXPECT_EQ(update_bias({0.7}, {0.1}, 1.0)[0], 0.1);  // ell = 1 jumps to z
  EXPECT_NEAR(update_bias({0.4}, {0.2}, 0.5)[0], 0.3, 1e-15);
  EXPECT_THROW(update_bias({0.4}, {0.2}, 0.0), std::invalid_argument);
}

TEST(AllVariants, MatchDenseOracle) {
  Rng rng(11);
  for (std::uint64_t seed : {2, 3}) {
    Graph g = generate_random(4, 0.6, seed);
    std::vector<double> h(4), cstar(4);
    for (auto& v : h) v = rng.uniform(-1, 1);
    for (auto& v : cstar) v = rng.uniform(0, 1);
    std::vector<ParamCircuit> circuits = {
        build_standard(g, 2),          build_multi_angle(g, 2),
        build_plus(g),                 build_modified(g, 2),
        build_warm_start(g, 2, cstar), build_adaptive_bias(g, 2, h)};
    for (const auto& c : circuits) {
      for (int draw = 0; draw < 3; ++draw) {
        std::vector<double> x(c.n_params);
        for (int i = 0; i < c.n_params; ++i)
          x[i] = c.slot_kinds[i] == SlotKind::Gamma ? rng.uniform(0, 2 * kPi)
                                                    : rng.uniform(0, kPi);
        EXPECT_LT(max_oracle_diff(c, x), 1e-9) << c.variant_tag;
      }
    }
  }
}

TEST(AllVariants, PreserveNorm) {
  Rng rng(13);
  Graph g = generate_random(5, 0.5, 8);
  std::vector<double> h(5, 0.3), cstar(5, 0.7);
  std::vector<ParamCircuit> circuits = {
      build_standard(g, 3),          build_multi_angle(g, 2),
      build_plus(g),                 build_modified(g, 2),
      build_warm_start(g, 2, cstar), build_adaptive_bias(g, 2, h)};
  CostTable ct = build_cost_table(g);
  for (const auto& c : circuits) {
    std::vector<double> x(c.n_params);
    for (auto& v : x) v = rng.uniform(0, 2 * kPi);
    StateVector s = run_circuit(c, x, ct);
    EXPECT_NEAR(s.norm_sq(), 1.0, 1e-9) << c.variant_tag;
  }
}

TEST(StandardAnsatz, TimeReversalSymmetry) {
  // F(gamma, beta) == F(-gamma, -beta) on integer-valued cost tables.
  for (int n : {4, 6}) {
    Graph g = generate_regular(n, 3, 17 + n);
    CostTable ct = build_cost_table(g);
    ParamCircuit c = build_standard(g, 2);
    Rng rng(n);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x(4), neg(4);
      for (int i = 0; i < 4; ++i) {
        x[i] = rng.uniform(0, 2 * kPi);
        neg[i] = -x[i];
      }
      double f1 = run_circuit(c, x, ct).expectation_diagonal(ct);
      double f2 = run_circuit(c, neg, ct).expectation_diagonal(ct);
      EXPECT_NEAR(f1, f2, 1e-10);
    }
  }
}

TEST(WarmStartRelaxation, SingleEdgeAntiAligned) {
  Graph edge(2, {{0, 1, 1.0}});
  auto r = warm_start_relaxation(edge, 4, 100, 3);
  EXPECT_GE(std::abs(r.c[0] - r.c[1]), 0.9);
}

TEST(WarmStartRelaxation, EmptyGraphIsNeutral) {
  Graph g(3, {});
  auto r = warm_start_relaxation(g, 4, 50, 1);
  for (double c : r.c) EXPECT_DOUBLE_EQ(c, 0.5);
}

TEST(WarmStartRelaxation, TriangleRoundsToMaxCut) {
  Graph k3 = generate_complete(3, 1.0);
  auto r = warm_start_relaxation(k3, 4, 200, 3);
  BitString bits(3);
  for (int i = 0; i < 3; ++i) bits[i] = r.c[i] > 0.5 ? 1 : 0;
  EXPECT_DOUBLE_EQ(maxcut_cost(k3, bits), 2.0);
}

TEST(RunCircuit, RejectsBadParamsAndNoise) {
  Graph g(2, {{0, 1, 1.0}});
  CostTable ct = build_cost_table(g);
  ParamCircuit c = build_standard(g, 1);
  EXPECT_THROW(run_circuit(c, {0.1}, ct), std::invalid_argument);
  NoiseSpec noise{0.5};
  EXPECT_THROW(run_circuit(c, {0.1, 0.2}, ct, &noise, nullptr),
               std::invalid_argument);
}

TEST(RunCircuit, ZeroNoiseMatchesNoiseless) {
  Graph g = ring_graph(4);
  CostTable ct = build_cost_table(g);
  ParamCircuit c = build_standard(g, 2);
  std::vector<double> x = {0.5, 0.3, 0.8, 0.2};
  NoiseSpec noise{0.0};
  Rng rng(1);
  StateVector a = run_circuit(c, x, ct, &noise, &rng);
  StateVector b = run_circuit(c, x, ct);
  EXPECT_LT(max_state_diff(a, b), 1e-15);
}

TEST(RunCircuit, NoisyTrajectoryKeepsNormAndDeterminism) {
  Graph g = ring_graph(5);
  CostTable ct = build_cost_table(g);
  ParamCircuit c = build_standard(g, 2);
  std::vector<double> x = {0.5, 0.3, 0.8, 0.2};
  NoiseSpec noise{0.2};
  Rng r1(42), r2(42);
  StateVector a = run_circuit(c, x, ct, &noise, &r1);
  StateVector b = run_circuit(c, x, ct, &noise, &r2);
  EXPECT_NEAR(a.norm_sq(), 1.0, 1e-9);
  EXPECT_LT(max_state_diff(a, b), 1e-15);
}
