#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "kpartite/error.hpp"
#include "kpartite/fixtures.hpp"
#include "kpartite/simulate.hpp"
#include "kpartite/synthesis.hpp"
#include "kpartite/verification.hpp"
#include "support.hpp"

using namespace kpartite;

namespace {

SymmetricMatrix example2_M(std::span<const double> deltas) {
  return build_M(fixtures::example1_graph(), deltas);
}

}  // namespace

TEST_CASE("exact propagation of trivial systems") {
  const Vector x0{1, -2, 3};
  const Vector times{0, 1, 5};
  const Trajectory zero = simulate_linear_exact(SymmetricMatrix(Matrix(3, 3)), x0, times);
  for (const Vector& x : zero.states) CHECK(testing::max_abs_diff(x, x0) < 1e-15);
  const Trajectory id = simulate_linear_exact(SymmetricMatrix(Matrix::identity(3)), x0, times);
  for (std::size_t m = 0; m < times.size(); ++m)
    for (std::size_t i = 0; i < 3; ++i) CHECK(id.states[m][i] == doctest::Approx(x0[i] * std::exp(-times[m])));
  CHECK(id.method == Trajectory::Method::Exact);
}

TEST_CASE("exact trajectory reaches the projected state") {
  const SymmetricMatrix m = example2_M(fixtures::kExample2SimDeltas);
  const Vector x0{1, 2, 3, 4, 5, 6, 7};
  const Vector times{20.0};
  const Trajectory t = simulate_linear_exact(m, x0, times);
  CHECK(testing::max_abs_diff(t.states[0], predict_steady_state(m, x0)) < 1e-6);
}

TEST_CASE("rk4 agrees with the exact solution") {
  const SymmetricMatrix m = example2_M(fixtures::kExample2Deltas);
  const Vector x0 = gaussian_initial_state(7, fixtures::kExample2Seed);
  const Trajectory rk = simulate_rk4(linear_field(m), x0, 1e-3, 5.0, 100);
  const Trajectory ex = simulate_linear_exact(m, x0, rk.times);
  REQUIRE(rk.times.size() == 51);
  CHECK(rk.times.back() == 5.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < rk.states.size(); ++i)
    worst = std::max(worst, testing::max_abs_diff(rk.states[i], ex.states[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("rk4 on the scalar decay") {
  const Field f = [](std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
  const Trajectory t = simulate_rk4(f, Vector{2.0}, 0.01, 1.0);
  CHECK(std::abs(t.states.back()[0] - 2.0 * std::exp(-1.0)) < 1e-8);
  CHECK(t.times.size() == 101);

  const Field still = [](std::span<const double>, std::span<double> dx) { std::fill(dx.begin(), dx.end(), 0.0); };
  const Trajectory c = simulate_rk4(still, Vector{1, 2}, 0.1, 1.0);
  for (const Vector& x : c.states) CHECK(x == Vector{1, 2});
}

TEST_CASE("rk4 lands on t_end and records the last step") {
  const Field f = [](std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
  const Trajectory t = simulate_rk4(f, Vector{1.0}, 0.3, 1.0, 2);
  CHECK(t.times.front() == 0.0);
  CHECK(t.times.back() == 1.0);
  CHECK(t.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
  CHECK(time_grid(0.25, 1.0, 2) == Vector{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(simulate_rk4(f, Vector{1.0}, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("divergence guard") {
  const Field grow = [](std::span<const double> x, std::span<double> dx) { dx[0] = 10.0 * x[0]; };
  CHECK_THROWS_AS(simulate_rk4(grow, Vector{1.0}, 0.01, 10.0), DivergenceError);
  const Field bad = [](std::span<const double>, std::span<double> dx) { dx[0] = NAN; };
  CHECK_THROWS_AS(simulate_rk4(bad, Vector{1.0}, 0.01, 1.0), DivergenceError);
}

TEST_CASE("fields") {
  const SymmetricMatrix m = example2_M(fixtures::kExample2Deltas);
  const ClusterPartition p({2, 4, 1});
  const Vector x{0.3, -1, 2, 0.5, 0, 1, -2};
  Vector lin(7), id(7), tanh0(7);
  linear_field(m)(x, lin);
  nonlinear_field(m, NonlinearProfile::uniform(3, ScalarMap::Identity), p)(x, id);
  CHECK(lin == id);
  const Vector mx = m.matrix() * x;
  for (std::size_t i = 0; i < 7; ++i) CHECK(lin[i] == doctest::Approx(-mx[i]));
  nonlinear_field(m, NonlinearProfile::uniform(3, ScalarMap::Tanh), p)(Vector(7, 0.0), tanh0);
  CHECK(tanh0 == Vector(7, 0.0));

  const NonlinearProfile mixed = parse_profile("tanh,identity,cubic", 3);
  const Vector hx = mixed.apply(p, x);
  CHECK(hx[0] == doctest::Approx(std::tanh(0.3)));
  CHECK(hx[2] == 2.0);
  CHECK(hx[6] == -8.0);
  CHECK(parse_profile("cubic", 3).maps() == std::vector<ScalarMap>(3, ScalarMap::Cubic));
  CHECK_THROWS_AS(parse_profile("tanh,cubic", 3), InvalidArgument);
  CHECK_THROWS_AS(parse_scalar_map("sigmoid"), InvalidArgument);
}

TEST_CASE("scalar maps") {
  for (ScalarMap h : {ScalarMap::Identity, ScalarMap::Tanh, ScalarMap::Cubic, ScalarMap::ShiftedArctan}) {
    CAPTURE(std::string(to_string(h)));
    CHECK(parse_scalar_map(to_string(h)) == h);
    CHECK(apply(h, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(antiderivative(h, 0.0) == 0.0);
    for (double z : {-3.0, -0.7, 0.2, 1.5, 4.0}) {
      // H' = h by central differences
      const double e = 1e-5;
      CHECK((antiderivative(h, z + e) - antiderivative(h, z - e)) / (2 * e) == doctest::Approx(apply(h, z)).epsilon(1e-6));
      const auto back = inverse(h, apply(h, z));
      REQUIRE(back);
      CHECK(*back == doctest::Approx(z).epsilon(1e-9));
    }
  }
  CHECK_FALSE(inverse(ScalarMap::Tanh, 1.5));
  CHECK_FALSE(inverse(ScalarMap::ShiftedArctan, 2.0));
  CHECK(antiderivative(ScalarMap::Tanh, 800.0) == doctest::Approx(800.0 - std::log(2.0)));
}

TEST_CASE("class R proxy") {
  CHECK(class_R_check([](double z) { return std::tanh(z); }));
  CHECK(class_R_check([](double z) { return z * z * z; }));
  CHECK(class_R_check([](double z) { return apply(ScalarMap::ShiftedArctan, z); }));
  CHECK(class_R_check([](double z) { return z; }));
  CHECK_FALSE(class_R_check([](double z) { return z * z; }));
  CHECK_FALSE(class_R_check([](double z) { return z + 1.0; }));
  CHECK_FALSE(class_R_check([](double z) { return std::max(z, 0.0); }));
}

TEST_CASE("consensus detection") {
  const ClusterPartition p({2, 4, 1});
  const SymmetricMatrix m = example2_M(fixtures::kExample2Deltas);
  const Vector times = time_grid(0.1, 5.0);

  SUBCASE("kernel state is an equilibrium") {
    const Vector z{1.5, 1.5, 0, 0, 0, 0, -1.5};
    const ConsensusReport r = detect_consensus(simulate_linear_exact(m, z, times), p);
    CHECK(r.reached);
    REQUIRE(r.convergence_time);
    CHECK(*r.convergence_time == 0.0);
    CHECK(testing::max_abs_diff(r.cluster_values, Vector{1.5, 0, -1.5}) < 1e-12);
    const Trajectory rk = simulate_rk4(linear_field(m), z, 1e-3, 5.0, 100);
    for (const Vector& x : rk.states) CHECK(testing::max_abs_diff(x, z) < 1e-9);
  }
  SUBCASE("seeded state: middle cluster at zero, outer clusters opposite") {
    const SymmetricMatrix ms = example2_M(fixtures::kExample2SimDeltas);
    const Vector x0 = gaussian_initial_state(7, fixtures::kExample2Seed);
    const ConsensusReport r = detect_consensus(simulate_linear_exact(ms, x0, time_grid(0.01, 20.0)), p);
    CHECK(r.reached);
    CHECK(std::abs(r.cluster_values[1]) < 1e-6);
    CHECK(std::abs(r.cluster_values[0] + r.cluster_values[2]) < 1e-6);
  }
  SUBCASE("unstable gains") {
    const SymmetricMatrix bad = example2_M(Vector{0.5, 5, 2});
    CHECK(min_eigenvalue(bad) < 0.0);
    const Vector x0 = gaussian_initial_state(7, 3);
    const ConsensusReport r = detect_consensus(simulate_linear_exact(bad, x0, times), p);
    CHECK_FALSE(r.reached);
  }
  SUBCASE("window longer than the run") {
    const Trajectory t = simulate_linear_exact(m, Vector(7, 0.0), Vector{0.0, 0.5});
    CHECK_THROWS_AS(detect_consensus(t, p), InvalidArgument);
  }
}

TEST_CASE("lyapunov function") {
  const ClusterPartition p({2, 1});
  const Vector x{1, -2, 0.5}, xs{0.2, 0.2, -1};
  CHECK(lyapunov_V(xs, xs, NonlinearProfile::uniform(2, ScalarMap::Tanh), p) == 0.0);
  const double half = 0.5 * (0.8 * 0.8 + 2.2 * 2.2 + 1.5 * 1.5);
  CHECK(lyapunov_V(x, xs, NonlinearProfile::uniform(2, ScalarMap::Identity), p) == doctest::Approx(half));
  for (ScalarMap h : {ScalarMap::Tanh, ScalarMap::Cubic, ScalarMap::ShiftedArctan}) {
    const double closed = lyapunov_V(x, xs, NonlinearProfile::uniform(2, h), p);
    const double quad = lyapunov_V(x, xs, [h](double z) { return apply(h, z); });
    CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
    CHECK(closed > 0.0);
  }
  CHECK(adaptive_simpson([](double z) { return std::sin(z); }, 0.0, M_PI, 1e-12) == doctest::Approx(2.0));
}

TEST_CASE("nonlinear complete graph run") {
  const SignedClusteredGraph g = build_complete_unweighted(fixtures::kExample4Sizes);
  const SymmetricMatrix m = build_M(g, complete_graph_gains(fixtures::kExample4Sizes).deltas);
  const NonlinearProfile profile = NonlinearProfile::uniform(4, ScalarMap::Tanh);
  const Vector x0 = gaussian_initial_state(g.agents(), fixtures::kExample4Seed);
  const Trajectory t = simulate_rk4(nonlinear_field(m, profile, g.partition()), x0, kDefaultDt, kDefaultTEnd, 10);
  const ConsensusReport r = detect_consensus(t, g.partition(), 1e-4);
  CHECK(r.reached);
  CHECK(r.max_intra_cluster_spread < 1e-4);

  const Equilibrium eq = lyapunov_reference(m, profile, g.partition(), r.cluster_values);
  CHECK(eq.in_range);
  double prev = lyapunov_V(t.states.front(), eq.x_star, profile, g.partition());
  for (std::size_t i = 1; i < t.states.size(); ++i) {
    const double v = lyapunov_V(t.states[i], eq.x_star, profile, g.partition());
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("initial states and CSV") {
  CHECK(gaussian_initial_state(5, 9) == gaussian_initial_state(5, 9));
  CHECK(gaussian_initial_state(5, 9) != gaussian_initial_state(5, 10));
  Trajectory t;
  t.times = {0.0, 0.5};
  t.states = {{1.0, 2.0}, {0.1, 1.0 / 3.0}};
  const std::string csv = trajectory_csv(t);
  CHECK(csv.rfind("t,x_0,x_1\n", 0) == 0);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  CHECK_THROWS_AS(write_trajectory_csv(t, "/nonexistent/dir/out.csv"), FormatError);
}
