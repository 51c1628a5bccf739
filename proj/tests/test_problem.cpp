#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qaoalab/graph.hpp"
#include "qaoalab/qubo.hpp"

using namespace qaoalab;

TEST(Graph, RejectsBadEdges) {
  EXPECT_THROW(Graph(3, {{0, 3, 1.0}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{1, 1, 1.0}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1, std::nan("")}}), std::invalid_argument);
}

TEST(Graph, CanonicalizesEdgeOrder) {
  Graph g(3, {{2, 0, 1.5}});
  EXPECT_EQ(g.edges()[0].u, 0);
  EXPECT_EQ(g.edges()[0].v, 2);
  EXPECT_DOUBLE_EQ(g.edges()[0].w, 1.5);
}

TEST(GenerateComplete, EdgeCounts) {
  EXPECT_EQ(generate_complete(4, 1.0).n_edges(), 6);
  Graph k2 = generate_complete(2, 1.0);
  ASSERT_EQ(k2.n_edges(), 1);
  EXPECT_EQ(k2.edges()[0].u, 0);
  EXPECT_EQ(k2.edges()[0].v, 1);
  EXPECT_EQ(generate_complete(18, 1.0).n_edges(), 153);
  EXPECT_THROW(generate_complete(1, 1.0), std::invalid_argument);
}

TEST(GenerateRegular, DegreesAndParity) {
  Graph k4 = generate_regular(4, 3, 42);
  EXPECT_EQ(k4.n_edges(), 6);  // the unique 3-regular graph on 4 vertices
  Graph g = generate_regular(6, 3, 7);
  EXPECT_EQ(g.n_edges(), 9);
  for (int d : g.degrees()) EXPECT_EQ(d, 3);
  EXPECT_THROW(generate_regular(5, 3, 1), std::invalid_argument);
}

TEST(GenerateRegular, DeterministicPerSeed) {
  Graph a = generate_regular(10, 3, 99);
  Graph b = generate_regular(10, 3, 99);
  ASSERT_EQ(a.n_edges(), b.n_edges());
  for (int i = 0; i < a.n_edges(); ++i) {
    EXPECT_EQ(a.edges()[i].u, b.edges()[i].u);
    EXPECT_EQ(a.edges()[i].v, b.edges()[i].v);
  }
}

TEST(GenerateRandom, EdgeProbabilityExtremes) {
  EXPECT_EQ(generate_random(6, 0.0, 3).n_edges(), 0);
  EXPECT_EQ(generate_random(6, 1.0, 3).n_edges(), 15);
  EXPECT_THROW(generate_random(6, 1.5, 3), std::invalid_argument);
}

TEST(GenerateRandom, DeterministicPerSeed) {
  Graph a = generate_random(10, 0.4, 7);
  Graph b = generate_random(10, 0.4, 7);
  ASSERT_EQ(a.n_edges(), b.n_edges());
  for (int i = 0; i < a.n_edges(); ++i) {
    EXPECT_EQ(a.edges()[i].u, b.edges()[i].u);
    EXPECT_EQ(a.edges()[i].v, b.edges()[i].v);
  }
}

TEST(MaxcutCost, BasicValues) {
  Graph edge(2, {{0, 1, 1.0}});
  EXPECT_DOUBLE_EQ(maxcut_cost(edge, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(maxcut_cost(edge, {0, 0}), 0.0);
  EXPECT_THROW(maxcut_cost(edge, {0, 1, 0}), std::invalid_argument);

  Graph k3 = generate_complete(3, 1.0);
  EXPECT_DOUBLE_EQ(maxcut_cost(k3, {0, 0, 1}), 2.0);
  double best = 0.0;
  for (std::uint64_t k = 0; k < 8; ++k)
    best = std::max(best, maxcut_cost_index(k3, k));
  EXPECT_DOUBLE_EQ(best, 2.0);
}

TEST(MaxcutCost, ComplementInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = generate_random(8, 0.5, rng.next_u64());
    std::uint64_t k = rng.uniform_int(256);
    std::uint64_t comp = (~k) & 0xff;
    EXPECT_DOUBLE_EQ(maxcut_cost_index(g, k), maxcut_cost_index(g, comp));
  }
}

TEST(BruteForce, SingleEdgeAndCycles) {
  Graph edge(2, {{0, 1, 1.0}});
  auto r = brute_force_max(edge);
  EXPECT_DOUBLE_EQ(r.c_max, 1.0);
  std::set<std::uint64_t> argmax(r.argmax.begin(), r.argmax.end());
  EXPECT_EQ(argmax, (std::set<std::uint64_t>{1, 2}));

  auto k4 = brute_force_max(generate_complete(4, 1.0));
  EXPECT_DOUBLE_EQ(k4.c_max, 4.0);

  std::vector<Edge> ring;
  for (int i = 0; i < 8; ++i) ring.push_back({i, (i + 1) % 8, 1.0});
  auto c8 = brute_force_max(Graph(8, ring));
  EXPECT_DOUBLE_EQ(c8.c_max, 8.0);  // bipartite: alternating coloring
}

TEST(BruteForce, ArgmaxContainsComplements) {
  Graph g = generate_random(6, 0.5, 11);
  auto r = brute_force_max(g);
  std::set<std::uint64_t> argmax(r.argmax.begin(), r.argmax.end());
  for (std::uint64_t k : r.argmax)
    EXPECT_TRUE(argmax.count((~k) & 0x3f));
}

TEST(BruteForce, SizeCap) {
  EXPECT_THROW(brute_force_max(generate_complete(25, 1.0)),
               std::invalid_argument);
}

TEST(Qubo, GraphToQuboIdentity) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Graph g = generate_random(6, 0.5, seed);
    Qubo q = graph_to_qubo(g);
    for (std::uint64_t k = 0; k < 64; ++k) {
      BitString x = bits_from_index(k, 6);
      EXPECT_NEAR(q.value(x), -maxcut_cost(g, x), 1e-12);
    }
  }
}

TEST(Qubo, EmptyGraphGivesZeroMatrix) {
  Graph g(3, {});
  Qubo q = graph_to_qubo(g);
  for (double v : q.q) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Qubo, K3Identity) {
  Qubo q = graph_to_qubo(generate_complete(3, 1.0));
  EXPECT_DOUBLE_EQ(q.value({0, 0, 1}), -2.0);
}

TEST(Qubo, RejectsAsymmetric) {
  EXPECT_THROW(Qubo(2, {1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
  EXPECT_THROW(Qubo(2, {1.0, 2.0, 2.0}), std::invalid_argument);
}

TEST(Ising, ZeroMatrix) {
  IsingModel m = qubo_to_ising(Qubo(2, {0, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(m.offset, 0.0);
  EXPECT_TRUE(m.couplings.empty());
  for (double h : m.h) EXPECT_DOUBLE_EQ(h, 0.0);
}

TEST(Ising, OneVariable) {
  IsingModel m = qubo_to_ising(Qubo(1, {3.0}));
  EXPECT_DOUBLE_EQ(m.h[0], 1.5);
  EXPECT_DOUBLE_EQ(m.offset, 1.5);
}

TEST(Ising, RoundTripEnergyIdentity) {
  // graph -> qubo -> ising agrees with -cut on every bitstring, n <= 8
  for (std::uint64_t seed : {4, 5}) {
    Graph g = generate_random(8, 0.5, seed);
    Qubo q = graph_to_qubo(g);
    IsingModel m = qubo_to_ising(q);
    for (std::uint64_t k = 0; k < 256; ++k) {
      BitString x = bits_from_index(k, 8);
      EXPECT_NEAR(m.energy_from_bits(x) + m.offset, q.value(x), 1e-10);
      EXPECT_NEAR(m.energy_from_bits(x) + m.offset, -maxcut_cost(g, x), 1e-10);
    }
  }
}
