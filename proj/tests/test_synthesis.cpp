#include <random>
#include <string>

#include "doctest.h"
#include "kpartite/error.hpp"
#include "kpartite/fixtures.hpp"
#include "kpartite/synthesis.hpp"
#include "kpartite/verification.hpp"
#include "support.hpp"

using namespace kpartite;

namespace {

// phi_h is the leading entry of the Schur complement of D - C after the first h rows.
Vector schur_pivots(const Matrix& c, const Vector& deltas) {
  const Eigen::Index k = static_cast<Eigen::Index>(c.rows());
  Eigen::MatrixXd dc = -testing::to_eigen(c);
  for (Eigen::Index i = 0; i < k; ++i) dc(i, i) += deltas[i];
  Vector out;
  for (Eigen::Index h = 0; h < k; ++h) {
    const Eigen::Index r = k - h;
    Eigen::MatrixXd s = dc.bottomRightCorner(r, r);
    if (h > 0)
      s -= dc.bottomLeftCorner(r, h) * dc.topLeftCorner(h, h).inverse() * dc.topRightCorner(h, r);
    out.push_back(s(0, 0));
  }
  return out;
}

// Hostile 6-cycle across three clusters of two strangers; under the natural
// order the last cluster's members stay uncoupled through every elimination.
SignedClusteredGraph hexagon() {
  Matrix a(6, 6);
  auto edge = [&](std::size_t i, std::size_t j) { a(i, j) = a(j, i) = -1; };
  edge(0, 2);
  edge(2, 4);
  edge(4, 1);
  edge(1, 3);
  edge(3, 5);
  edge(5, 0);
  return SignedClusteredGraph(ClusterPartition({2, 2, 2}), a);
}

}  // namespace

TEST_CASE("first example: last gain is 2 whatever the middle gain") {
  const TrustMatrix c = fixtures::example1_trust();
  for (double d2 : {5.0, 10.0, 100.0}) {
    const ScalarTableau t = scalar_recursion(c, Vector{2.0, d2, 0.0});
    CHECK(t.stages[2](2, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.phi[0] == 1.0);
    CHECK(t.phi[1] == doctest::Approx(d2 - 4.0));
  }
  const Vector g = gains_from_margins(c, Vector{1.0, 1.0});
  CHECK(g[0] == 2.0);
  CHECK(g[1] == 5.0);
  CHECK(g[2] == 2.0);
}

TEST_CASE("diagonal trust matrix needs no elimination") {
  const TrustMatrix c{Matrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}};
  const ScalarTableau t = scalar_recursion(c, Vector{2, 3, 4});
  CHECK(t.phi == Vector{1, 1, 1});
  for (const Matrix& s : t.stages) CHECK(s == c.c);
}

TEST_CASE("pivots match Schur complements of D - C") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 5;
    TrustMatrix c{Matrix(k, k)};
    Vector d(k);
    for (std::size_t i = 0; i < k; ++i) {
      d[i] = u(gen) + 6.0;
      for (std::size_t j = 0; j < k; ++j) c.c(i, j) = u(gen);
    }
    const ScalarTableau t = scalar_recursion(c, d);
    const Vector expected = schur_pivots(c.c, d);
    for (std::size_t h = 0; h < k; ++h) CHECK(t.phi[h] == doctest::Approx(expected[h]).epsilon(1e-10));
    // det(D - C) is the product of the pivots
    Eigen::MatrixXd dc = -testing::to_eigen(c.c);
    for (std::size_t i = 0; i < k; ++i) dc(i, i) += d[i];
    double prod = 1.0;
    for (double p : t.phi) prod *= p;
    CHECK(prod == doctest::Approx(dc.determinant()).epsilon(1e-9));
  }
}

TEST_CASE("three clusters: last gain in closed form") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0), q(0.5, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    TrustMatrix c{Matrix(3, 3)};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) c.c(i, j) = u(gen);
    const Vector margins{q(gen), q(gen)};
    const Vector d = gains_from_margins(c, margins);
    const double p1 = d[0] - c(0, 0);
    const double p2 = d[1] - c(1, 1) - c(1, 0) * c(0, 1) / p1;
    const double d3 = c(2, 2) + c(2, 0) * c(0, 2) / p1 +
                      (c(2, 1) + c(2, 0) * c(0, 1) / p1) * (c(1, 2) + c(1, 0) * c(0, 2) / p1) / p2;
    CHECK(p1 == doctest::Approx(margins[0]));
    CHECK(p2 == doctest::Approx(margins[1]));
    CHECK(d[2] == doctest::Approx(d3).epsilon(1e-12));
    // D - C is singular at these gains
    Eigen::Matrix3d dc = -testing::to_eigen(c.c);
    for (int i = 0; i < 3; ++i) dc(i, i) += d[i];
    CHECK(std::abs(dc.determinant()) < 1e-9 * dc.norm() * dc.norm() * dc.norm());
  }
}

TEST_CASE("zero pivot is reported with its stage") {
  const TrustMatrix c = fixtures::example1_trust();
  try {
    scalar_recursion(c, Vector{2.0, 4.0, 2.0});
    FAIL("expected ZeroPivot");
  } catch (const ZeroPivot& e) {
    CHECK(e.stage() == 1);
  }
  CHECK_THROWS_AS(scalar_recursion(c, Vector{1.0, 5.0, 2.0}), ZeroPivot);
  CHECK_THROWS_AS(scalar_recursion(c, Vector{1.0, 5.0}), InvalidArgument);
  CHECK_THROWS_AS(gains_from_margins(c, Vector{0.0, 1.0}), ZeroPivot);
}

TEST_CASE("synthesis on the first example") {
  const GainVector g = synthesize(fixtures::example1_graph());
  CHECK(g.deltas == Vector{2, 5, 2});
  CHECK(g.margins == Vector{1, 1});
  CHECK(g.doublings == 0);
  CHECK(g.ordering.order == std::vector<std::size_t>{0, 1, 2});
  CHECK(verify_lemma1(build_M(fixtures::example1_graph(), g.deltas), ClusterPartition({2, 4, 1})).consensus());

  const GainVector wide = synthesize(fixtures::example1_graph(), 3.0);
  CHECK(wide.deltas[0] == 4.0);
  CHECK(wide.deltas[1] == doctest::Approx(17.0 / 3.0));
  CHECK(wide.deltas[2] == doctest::Approx(34.0 / 27.0));
}

TEST_CASE("complete graphs through both paths") {
  const std::vector<std::size_t> sizes{2, 2, 2};
  const SignedClusteredGraph g = build_complete_unweighted(sizes);
  const GainVector closed = complete_graph_gains(sizes);
  CHECK(closed.deltas == Vector{3, 3, 3});
  CHECK(closed.margins.empty());
  const KernelReport rc = verify_lemma1(build_M(g, closed.deltas), g.partition());
  CHECK(rc.consensus());
  CHECK(rc.zero_multiplicity == 2);

  const GainVector general = synthesize(g);
  CHECK(verify_lemma1(build_M(g, general.deltas), g.partition()).consensus());
}

TEST_CASE("closed-form gains") {
  CHECK(complete_graph_gains(fixtures::kExample3Sizes).deltas == Vector{17, 25, 27, 21, 13});
  CHECK(complete_graph_gains(fixtures::kExample4Sizes).deltas == Vector{11, 17, 21, 13});
  const std::vector<std::size_t> ones{1, 1, 1};
  CHECK(complete_graph_gains(ones).deltas == Vector{1, 1, 1});
  const std::vector<std::size_t> one{4};
  CHECK_THROWS_AS(complete_graph_gains(one), InvalidArgument);
}

TEST_CASE("synthesis gates") {
  CHECK_THROWS_AS(synthesize(hexagon()), Assumption3Violation);
  const std::vector<std::size_t> two{2, 3};
  CHECK_THROWS_AS(synthesize(build_complete_unweighted(two)), InvalidArgument);
  Matrix a = fixtures::example1_graph().adjacency();
  a(0, 1) = -1;
  CHECK_THROWS_AS(synthesize(SignedClusteredGraph(ClusterPartition({2, 4, 1}), a)), AssumptionViolation);
  CHECK_THROWS_AS(synthesize(fixtures::example1_graph(), 0.0), InvalidArgument);
}

TEST_CASE("margin doubling gives up after the limit") {
  const SignedClusteredGraph g = hexagon();
  const ClusterOrdering o = make_ordering(g.partition(), {0, 1, 2});
  try {
    synthesize_gains(g, homogeneity_certificate(g), o);
    FAIL("expected SynthesisFailed");
  } catch (const SynthesisFailed& e) {
    CHECK(e.doublings() == kMaxDoublings);
    CHECK(e.failing_check().find("off-diagonal") != std::string::npos);
  }
}

TEST_CASE("block recursion examples") {
  const SignedClusteredGraph g = fixtures::example1_graph();
  const PhiBlocks b = matrix_phi_blocks(g, fixtures::kExample2Deltas);
  REQUIRE(b.phi.size() == 3);
  CHECK(b.phi[0] == Matrix{{2, -1}, {-1, 2}});
  CHECK(b.phi[2].rows() == 1);
  CHECK(std::abs(b.phi[2](0, 0)) < 1e-12);
  CHECK(b.irreducible[1]);
  CHECK(b.positive_off_diagonal[1]);

  const std::vector<std::size_t> sizes{2, 2};
  const PhiBlocks c = matrix_phi_blocks(build_complete_unweighted(sizes), Vector{3, 3});
  CHECK(testing::max_abs_diff(c.phi[1], Matrix{{2, -2}, {-2, 2}}) < 1e-14);

  CHECK_THROWS_AS(matrix_phi_blocks(g, Vector{1, 5, 2}), IntermediateBlockNotPD);
}

TEST_CASE("singleton clusters: block and scalar recursions coincide") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 3 + trial % 4;
    auto generated = testing::random_homogeneous_graph(gen, k, 1);
    const SignedClusteredGraph& g = generated.graph;
    const TrustMatrix c = homogeneity_certificate(g);
    const Vector d = gains_from_margins(c, Vector(k - 1, 1.0 + trial % 3));
    const ScalarTableau t = scalar_recursion(c, d);
    const PhiBlocks b = matrix_phi_blocks(g, d);
    const double scale = 1.0 + norm_inf(d);
    for (std::size_t h = 0; h < k; ++h) {
      CHECK(std::abs(b.phi[h](0, 0) - t.phi[h]) <= 1e-12 * scale);
      CHECK(std::abs(b.schur_diag[h](0, 0) - t.stages[h](h, h)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("block pivots keep the homogeneous structure") {
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 3 + trial % 3;
    const auto generated = testing::random_homogeneous_graph(gen, k, 4);
    const SignedClusteredGraph& g = generated.graph;
    const ClusterOrdering o = find_ordering(g);
    const RelabeledGraph r = relabel(g, o);
    const TrustMatrix c = permute(homogeneity_certificate(g), o.order);
    const Vector d = gains_from_margins(c, Vector(k - 1, 1.0));
    const ScalarTableau t = scalar_recursion(c, d);
    const PhiBlocks b = matrix_phi_blocks(r.graph, d);
    for (std::size_t h = 0; h < k; ++h) {
      const Matrix& phi = b.phi[h];
      const double scale = 1.0 + std::abs(d[h]);
      for (std::size_t i = 0; i < phi.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < phi.cols(); ++j) row += phi(i, j);
        CHECK(std::abs(row - t.phi[h]) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("synthesized gains give consensus on random graphs") {
  std::mt19937_64 gen(45);
  for (int trial = 0; trial < 40; ++trial) {
    const auto generated = testing::random_homogeneous_graph(gen, 3 + trial % 3, 4);
    const SignedClusteredGraph& g = generated.graph;
    const GainVector gains = synthesize(g);
    CHECK(gains.margins.size() == g.clusters() - 1);
    for (double q : gains.margins) CHECK(q > 0.0);
    const KernelReport r = verify_lemma1(build_M(g, gains.deltas), g.partition());
    CHECK(r.consensus());
    // same input, same output
    CHECK(synthesize(g).deltas == gains.deltas);
    CHECK(ordered_deltas(gains).size() == g.clusters());
  }
}
