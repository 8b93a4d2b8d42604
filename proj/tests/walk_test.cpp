#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>

#include "rlab/ensemble.hpp"
#include "rlab/errors.hpp"
#include "rlab/jacobi.hpp"
#include "rlab/walk.hpp"

namespace rlab {
namespace {

Graph star(unsigned leaves) {
  std::vector<Graph::Edge> e;
  for (unsigned v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return Graph(leaves + 1, e);
}

TEST(Graph, RejectsMalformed) {
  EXPECT_THROW(Graph(3, {{0, 0}, {1, 2}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}, {1, 2}}), std::invalid_argument);
  EXPECT_THROW(Graph(4, {{0, 1}, {2, 3}}), std::invalid_argument);
  EXPECT_THROW(Graph(3, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);
}

TEST(Graph, ParsesEdgeList) {
  std::istringstream in("# square\n4 4\n0 1\n1 2\n2 3\n3 0\n");
  const auto g = Graph::parse(in);
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.edges().size(), 4u);
  for (unsigned v = 0; v < 4; ++v) EXPECT_EQ(g.degree(v), 2u);

  std::istringstream bad("3 2\n0 1\n");
  EXPECT_THROW(Graph::parse(bad), std::invalid_argument);
  std::istringstream extra("2 1\n0 1\n1 0\n");
  EXPECT_THROW(Graph::parse(extra), std::invalid_argument);
}

TEST(GraphWalk, RegularGraphs) {
  for (unsigned m : {3u, 4u}) {
    const auto c = build_graph_walk(Graph::cycle(m));
    for (std::size_t x = 0; x < m; ++x) {
      EXPECT_DOUBLE_EQ(c.stationary()[x], 1.0 / m);
      EXPECT_DOUBLE_EQ(c.transition(x, (x + 1) % m), 0.5);
      EXPECT_DOUBLE_EQ(c.transition(x, (x + m - 1) % m), 0.5);
      EXPECT_DOUBLE_EQ(c.transition(x, x), 0.0);
    }
  }
}

TEST(GraphWalk, StarStationary) {
  const auto c = build_graph_walk(star(3));
  EXPECT_DOUBLE_EQ(c.stationary()[0], 0.5);
  for (std::size_t v = 1; v <= 3; ++v) {
    EXPECT_DOUBLE_EQ(c.stationary()[v], 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(c.transition(0, v), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.transition(v, 0), 1.0);
  }
  EXPECT_LE(c.detailed_balance_defect(), 1e-12);
}

TEST(Chain, RejectsNonReversibleAndNonStochastic) {
  using E = ReversibleChain::Entry;
  // Directed 3-cycle with uniform μ: stochastic but not reversible.
  std::vector<std::vector<E>> rows = {{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}};
  EXPECT_THROW(ReversibleChain(rows, {1.0 / 3, 1.0 / 3, 1.0 / 3}, nullptr), std::invalid_argument);
  std::vector<std::vector<E>> leaky = {{{1, 0.5}}, {{0, 1.0}}};
  EXPECT_THROW(ReversibleChain(leaky, {0.5, 0.5}, nullptr), std::invalid_argument);
  std::vector<std::vector<E>> ok = {{{1, 1.0}}, {{0, 1.0}}};
  EXPECT_THROW(ReversibleChain(ok, {0.6, 0.6}, nullptr), std::invalid_argument);
}

TEST(Permutation, RankRoundTripAndCompose) {
  for (unsigned m = 1; m <= 6; ++m) {
    std::vector<unsigned> p(m);
    std::iota(p.begin(), p.end(), 0u);
    std::uint64_t r = 0;
    do {
      const Permutation s(p);
      ASSERT_EQ(s.rank(), r);
      ASSERT_EQ(Permutation::unrank(m, r), s);
      ++r;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  const Permutation s({2, 0, 1});
  const auto t = Permutation::transposition(3, 0, 2);
  EXPECT_EQ(s.compose(t), Permutation({1, 0, 2}));
  EXPECT_THROW(Permutation({0, 0, 1}), std::invalid_argument);
  EXPECT_EQ(Permutation({3, 0, 2, 1}).lower_half_mask(2), 0b1010u);
}

TEST(SubsetState, RankMatchesEnumerationOrder) {
  for (unsigned n = 1; n <= 6; ++n) {
    std::uint64_t r = 0;
    for (auto e : enumerate_balanced(n, n)) {
      const SubsetState s(n, e.plus_mask());
      ASSERT_EQ(s.rank(), r);
      ASSERT_EQ(SubsetState::unrank(n, r).members(), e.plus_mask());
      ++r;
    }
  }
  EXPECT_THROW(SubsetState(2, 0b0111), std::invalid_argument);
}

TEST(TranspositionWalk, SmallKernels) {
  const auto two = build_transposition_walk(1);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_DOUBLE_EQ(two.transition(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(two.transition(0, 0), 0.5);

  const auto four = build_transposition_walk(2);
  ASSERT_EQ(four.size(), 24u);
  for (std::size_t x = 0; x < four.size(); ++x) {
    int off = 0;
    for (const auto& e : four.row(x)) {
      if (e.to == x) {
        EXPECT_DOUBLE_EQ(e.prob, 0.25);
      } else {
        EXPECT_DOUBLE_EQ(e.prob, 0.125);
        EXPECT_DOUBLE_EQ(four.transition(e.to, x), 0.125);
        ++off;
      }
    }
    EXPECT_EQ(off, 6);
  }
  EXPECT_EQ(four.detailed_balance_defect(), 0.0);
  EXPECT_THROW(build_transposition_walk(4), CapacityError);
}

TEST(LumpedWalk, SmallKernels) {
  const auto two = build_lumped_walk(1);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.label(0), "{1}");
  EXPECT_EQ(two.label(1), "{2}");
  EXPECT_DOUBLE_EQ(two.transition(0, 1), 0.5);

  const auto four = build_lumped_walk(2);
  ASSERT_EQ(four.size(), 6u);
  for (std::size_t x = 0; x < 6; ++x) {
    double total = 0.0;
    int moves = 0;
    for (const auto& e : four.row(x)) {
      total += e.prob;
      if (e.to == x) {
        EXPECT_DOUBLE_EQ(e.prob, 0.5);
      } else {
        EXPECT_DOUBLE_EQ(e.prob, 0.125);
        ++moves;
      }
    }
    EXPECT_EQ(moves, 4);
    EXPECT_EQ(total, 1.0);
  }
  EXPECT_THROW(build_lumped_walk(8), CapacityError);
}

TEST(LumpedWalk, FiberSumsAreExact) {
  for (unsigned n = 1; n <= 3; ++n) {
    const auto full = build_transposition_walk(n);
    const auto lumped = build_lumped_walk(n);
    const auto sums = fiber_summed_kernel(full, n);
    ASSERT_EQ(full.exact_denominator(), 4ull * n * n);
    ASSERT_EQ(lumped.exact_denominator(), full.exact_denominator());
    for (std::size_t s = 0; s < full.size(); ++s) {
      const auto x = SubsetState(n, Permutation::unrank(2 * n, s).lower_half_mask(n)).rank();
      for (std::size_t y = 0; y < lumped.size(); ++y) {
        std::uint64_t expected = 0;
        for (const auto& e : lumped.row(x)) {
          if (e.to == y) expected = e.numerator;
        }
        ASSERT_EQ(sums[s][y], expected) << "n=" << n << " sigma=" << s << " y=" << y;
      }
    }
  }
}

TEST(Jacobi, MatchesEigenOnRandomSymmetric) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (std::size_t dim : {1u, 2u, 5u, 17u, 40u}) {
    std::vector<double> a(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i; j < dim; ++j) a[i * dim + j] = a[j * dim + i] = z(rng);
    }
    const auto mine = jacobi_eigen(a, dim);
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = a[i * dim + j];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
    for (std::size_t k = 0; k < dim; ++k) {
      EXPECT_NEAR(mine.values[k], ref.eigenvalues()[dim - 1 - k], 1e-11);
      // A v = θ v for the returned row.
      for (std::size_t i = 0; i < dim; ++i) {
        double av = 0.0;
        for (std::size_t j = 0; j < dim; ++j) av += a[i * dim + j] * mine.vectors[k * dim + j];
        EXPECT_NEAR(av, mine.values[k] * mine.vectors[k * dim + i], 1e-10);
      }
    }
  }
}

TEST(Jacobi, DenseDispatchAgreesAcrossPaths) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  const std::size_t dim = kJacobiLimit + 20;
  std::vector<double> a(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) a[i * dim + j] = a[j * dim + i] = z(rng);
  }
  const auto via_dispatch = symmetric_eigen(a, dim);
  const auto via_jacobi = jacobi_eigen(a, dim);
  for (std::size_t k = 0; k < dim; ++k) EXPECT_NEAR(via_dispatch.values[k], via_jacobi.values[k], 1e-10);
}

TEST(Spectral, CycleMatchesCirculantSpectrum) {
  for (unsigned m = 3; m <= 24; ++m) {
    const auto c = build_graph_walk(Graph::cycle(m));
    const auto rep = spectral_gap(c);
    EXPECT_NEAR(rep.gap, 1.0 - std::cos(2.0 * std::numbers::pi / m), 1e-9) << "m=" << m;
    EXPECT_EQ(rep.method, SpectralReport::Method::dense_full);
    // Full spectrum: cos(2πk/m), sorted.
    std::vector<double> expected(m);
    for (unsigned k = 0; k < m; ++k) expected[k] = std::cos(2.0 * std::numbers::pi * k / m);
    std::sort(expected.rbegin(), expected.rend());
    for (unsigned k = 0; k < m; ++k) EXPECT_NEAR(rep.eigenvalues[k], expected[k], 1e-10);
  }
}

TEST(Spectral, TranspositionAndLumpedGaps) {
  EXPECT_NEAR(spectral_gap(build_transposition_walk(2)).gap, 0.5, 1e-9);
  EXPECT_NEAR(spectral_gap(build_lumped_walk(3)).gap, 1.0 / 3.0, 1e-9);
  for (unsigned n = 1; n <= 3; ++n) {
    const auto full = spectral_gap(build_transposition_walk(n));
    const auto lumped = spectral_gap(build_lumped_walk(n));
    EXPECT_NEAR(full.gap, 1.0 / n, 1e-9);
    EXPECT_NEAR(lumped.gap, 1.0 / n, 1e-9);
    EXPECT_GT(full.gap, 0.0);
    EXPECT_LE(full.gap, 2.0);
    EXPECT_LE(full.residual, 1e-10);
  }
}

TEST(Spectral, LumpedSpectrumWithMultiplicities) {
  // Eigenvalue 1 − k(2n+1−k)/(2n²) with multiplicity C(2n,k) − C(2n,k−1).
  for (unsigned n = 1; n <= 5; ++n) {
    std::vector<double> expected;
    for (unsigned k = 0; k <= n; ++k) {
      const auto mult = binomial(2 * n, k) - (k == 0 ? 0 : binomial(2 * n, k - 1));
      const double lam = 1.0 - static_cast<double>(k * (2 * n + 1 - k)) / (2.0 * n * n);
      expected.insert(expected.end(), mult, lam);
    }
    std::sort(expected.rbegin(), expected.rend());
    const auto rep = spectral_gap(build_lumped_walk(n));
    ASSERT_EQ(rep.eigenvalues.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(rep.eigenvalues[i], expected[i], 1e-10);
  }
}

TEST(Spectral, EigenvaluesInUnitInterval) {
  for (const auto& c : {build_graph_walk(star(5)), build_graph_walk(Graph::cycle(7)),
                        build_transposition_walk(2), build_lumped_walk(4)}) {
    for (double v : spectral_gap(c).eigenvalues) {
      EXPECT_GE(v, -1.0 - 1e-12);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
  }
}

TEST(Spectral, IterativeAgreesWithDense) {
  SpectralOptions iterative;
  iterative.dense_limit = 0;
  for (const auto& c : {build_lumped_walk(4), build_lumped_walk(5), build_graph_walk(Graph::cycle(9)),
                        build_graph_walk(star(4))}) {
    const auto d = spectral_gap(c);
    const auto it = spectral_gap(c, iterative);
    EXPECT_EQ(it.method, SpectralReport::Method::iterative);
    EXPECT_NEAR(it.gap, d.gap, 1e-9);
    EXPECT_LE(it.residual, iterative.tolerance);
  }
  const auto big = spectral_gap(build_lumped_walk(7));
  EXPECT_EQ(big.method, SpectralReport::Method::iterative);
  EXPECT_NEAR(big.gap, 1.0 / 7.0, 1e-9);
}

TEST(Spectral, IterationCapRaises) {
  SpectralOptions opts;
  opts.dense_limit = 0;
  opts.max_iterations = 16;
  opts.tolerance = 1e-15;
  EXPECT_THROW(spectral_gap(build_graph_walk(Graph::cycle(40)), opts), ConvergenceError);
}

TEST(Spectral, InvariantUnderRelabeling) {
  std::mt19937_64 rng(13);
  const Graph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {4, 5}, {5, 2}});
  const double base = spectral_gap(build_graph_walk(g)).gap;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<unsigned> label(6);
    std::iota(label.begin(), label.end(), 0u);
    std::shuffle(label.begin(), label.end(), rng);
    EXPECT_NEAR(spectral_gap(build_graph_walk(g.relabeled(label))).gap, base, 1e-12);
  }
}

TEST(Simulate, ZeroStepsAndBadStart) {
  const auto c = build_graph_walk(Graph::cycle(4));
  EXPECT_EQ(simulate(c, 2, 0, 1), std::vector<std::size_t>{2});
  EXPECT_THROW(simulate(c, 4, 10, 1), std::out_of_range);
  EXPECT_EQ(simulate(c, 0, 100, 9), simulate(c, 0, 100, 9));
}

TEST(Simulate, OccupationIsUniformOnCycle) {
  const auto c = build_graph_walk(Graph::cycle(4));
  const auto path = simulate(c, 0, 100'000, 3);
  std::vector<double> occ(4);
  for (auto x : path) occ[x] += 1.0 / static_cast<double>(path.size());
  for (double o : occ) EXPECT_NEAR(o, 0.25, 0.02);
}

TEST(Simulate, OneStepMatchesKernelRow) {
  const auto c = build_lumped_walk(2);
  std::map<std::size_t, int> hits;
  constexpr int kSeeds = 100'000;
  for (int s = 0; s < kSeeds; ++s) ++hits[simulate(c, 0, 1, s)[1]];
  for (const auto& e : c.row(0)) EXPECT_NEAR(static_cast<double>(hits[e.to]) / kSeeds, e.prob, 0.01);
}

}  // namespace
}  // namespace rlab
