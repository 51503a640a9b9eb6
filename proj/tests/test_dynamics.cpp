#include <cmath>
#include <numbers>

#include "ccn/catalog.hpp"
#include "ccn/dynamics.hpp"
#include "ccn/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ccn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index c = 0;
  for (double a : v) x[c++] = a;
  return x;
}

Point endpoint(const TrigPolyField& f, const Point& x0, double t, double h) {
  const Trajectory traj = integrate(f, x0, t, h);
  return traj.state(traj.size() - 1);
}

}  // namespace

TEST_CASE("torus distances") {
  CHECK(circle_distance(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(circle_distance(0.0, 0.5) == 0.5);
  CHECK(circle_distance(2.25, -0.75) == 0.0);
  const Point w = wrap(pt({-0.25, 1.5, 0.75}));
  CHECK(w[0] == 0.75);
  CHECK(w[1] == 0.5);
  CHECK(w[2] == 0.75);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = u(rng);
    const double b = u(rng);
    const double c = u(rng);
    CHECK(circle_distance(a, b) == circle_distance(b, a));
    CHECK(circle_distance(a, b) <= 0.5);
    CHECK(circle_distance(a, c) <= circle_distance(a, b) + circle_distance(b, c) + 1e-12);
  }
}

TEST_CASE("constant rotation is integrated exactly") {
  const TrigPolyField f = catalog::rotation(0.25);
  const Trajectory traj = integrate(f, pt({0.5}), 3.0, 0.125);
  REQUIRE(traj.size() == 25);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(circle_distance(traj.state(k)[0], 0.5 + 0.25 * traj.time(k)) < 1e-14);
    CHECK(traj.state(k)[0] >= 0.0);
    CHECK(traj.state(k)[0] < 1.0);
  }
  CHECK(traj.end_time() == 3.0);
}

TEST_CASE("feedforward pair follows its closed form") {
  const TrigPolyField f = catalog::feedforward_pair();
  const Trajectory traj = integrate(f, pt({0.2, 0.4}), 2.0, 0.005);
  for (std::size_t k = 0; k < traj.size(); k += 10) {
    const double t = traj.time(k);
    const double x1 = 0.2 + t;
    const double x2 = 0.4 + (std::cos(kTwoPi * 0.2) - std::cos(kTwoPi * x1)) / kTwoPi;
    CHECK(circle_distance(traj.state(k)[0], x1) < 1e-12);
    CHECK(circle_distance(traj.state(k)[1], x2) < 1e-9);
  }
}

TEST_CASE("RK4 converges with order four") {
  const TrigPolyField f = counterexample_two_cell();
  const Point x0 = pt({0.1, 0.3});
  const double h = 0.02;
  const Point ref = endpoint(f, x0, 1.0, h / 16);
  const double e1 = torus_distance(endpoint(f, x0, 1.0, h), ref).max;
  const double e2 = torus_distance(endpoint(f, x0, 1.0, h / 2), ref).max;
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("integration splits at step boundaries without changing the result") {
  const TrigPolyField f = sample_random(catalog::figure1(), 2, 1.0, 3);
  const Point x0 = pt({0.1, 0.2, 0.3, 0.4, 0.5});
  const Point whole = endpoint(f, x0, 1.0, 0.01);
  const Point split = endpoint(f, endpoint(f, x0, 0.4, 0.01), 0.6, 0.01);
  CHECK(torus_distance(whole, split).max < 1e-13);
}

TEST_CASE("integration errors") {
  const TrigPolyField f = counterexample_two_cell();
  CHECK_THROWS_AS(integrate(f, pt({0.1, 0.2}), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(integrate(f, pt({0.1, 0.2}), 0.001, 0.01), DomainError);
  CHECK_THROWS_AS(integrate(f, pt({0.1}), 1.0, 0.01), DomainError);
  const TrigPolyField wild = FieldBuilder(CellGraph({1}, {})).add_constant(0, 1e308).build(1);
  CHECK_THROWS_AS(integrate(wild, pt({0.1}), 1.0, 0.5), NumericalError);
}

TEST_CASE("shifted trajectories re-base time") {
  const Trajectory traj = integrate(catalog::rotation(1.0), pt({0.0}), 1.0, 0.25);
  const Trajectory s = traj.shifted(2);
  CHECK(s.size() == 3);
  CHECK(s.state(0)[0] == traj.state(2)[0]);
  CHECK(s.end_time() == 0.5);
  CHECK_THROWS_AS(traj.shifted(5), DomainError);
}

TEST_CASE("counter-example equilibria: exactly the grid {0, 1/2}^2") {
  const TrigPolyField f = counterexample_two_cell();
  const EquilibriumSearch s = find_equilibria(f);
  REQUIRE(s.equilibria.size() == 4);
  const double expected[4][2] = {{0.0, 0.0}, {0.0, 0.5}, {0.5, 0.0}, {0.5, 0.5}};
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(circle_distance(s.equilibria[e].point[0], expected[e][0]) < 1e-12);
    CHECK(circle_distance(s.equilibria[e].point[1], expected[e][1]) < 1e-12);
    CHECK(s.equilibria[e].residual < 1e-10);
    CHECK(s.equilibria[e].simple);
    CHECK(s.equilibria[e].min_singular_value == doctest::Approx(kTwoPi));
  }
  CHECK(s.seeds == 64);
  CHECK(s.converged + s.singular + s.not_converged == s.seeds);
}

TEST_CASE("closed-form spectra of the counter-example") {
  const TrigPolyField f = counterexample_two_cell();
  // Df = [[0, 2 pi c2], [2 pi c1, 0]] with c = cos(2 pi x): lambda^2 = 4 pi^2 c1 c2.
  const EquilibriumReport centre = classify_equilibrium(f, pt({0.5, 0.0}));
  REQUIRE(centre.spectrum.size() == 2);
  for (const auto& l : centre.spectrum) {
    CHECK(std::abs(l.real()) < 1e-12);
    CHECK(std::abs(std::abs(l.imag()) - kTwoPi) < 1e-12);
  }
  CHECK(centre.simple);
  CHECK_FALSE(centre.hyperbolic);
  const EquilibriumReport saddle = classify_equilibrium(f, pt({0.5, 0.5}));
  CHECK(saddle.hyperbolic);
  CHECK(saddle.spectral_gap == doctest::Approx(kTwoPi));
}

TEST_CASE("equilibrium search on fields without equilibria") {
  // Input-free constant cell: d_J = 0 < d_I = 1.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(find_equilibria(catalog::input_free_constant(0.3, seed)).equilibria.empty());
  }
  // Nothing reads cell 5 of figure 1, so Df has a zero column everywhere.
  const EquilibriumSearch s = find_equilibria(sample_random(catalog::figure1(), 2, 1.0, 4));
  CHECK(s.equilibria.empty());
  CHECK(s.singular == s.seeds);
}

TEST_CASE("property: located equilibria are zeros, distinct and consistently classified") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const CellGraph g = catalog::self_dependent_cycle(2 + rng() % 2);
    const TrigPolyField f = sample_random(g, 2, 1.0, rng());
    const auto eqs = find_equilibria(f).equilibria;
    for (std::size_t a = 0; a < eqs.size(); ++a) {
      CHECK(f.evaluate(eqs[a].point).cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.jacobian(eqs[a].point));
      CHECK(eqs[a].min_singular_value == doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-9));
      CHECK(eqs[a].simple == (eqs[a].min_singular_value > 1e-6));
      double gap = INFINITY;
      for (const auto& l : eqs[a].spectrum) gap = std::min(gap, std::abs(l.real()));
      CHECK(eqs[a].hyperbolic == (gap > 1e-6));
      for (std::size_t b = a + 1; b < eqs.size(); ++b) {
        CHECK(torus_distance(eqs[a].point, eqs[b].point).max > 1e-6);
      }
    }
  }
}

TEST_CASE("refinement, omega-limits and Lipschitz estimates") {
  const TrigPolyField f = catalog::sine_cell(-1.0);
  const auto e = refine_equilibrium(f, pt({0.03}));
  REQUIRE(e.has_value());
  CHECK(circle_distance((*e)[0], 0.0) < 1e-12);
  // x' = -sin(2 pi x) attracts to 0.
  const auto clusters = omega_limit_estimate(f, pt({0.2}), 5.0, 2.0, 0.01, 1e-4);
  REQUIRE(clusters.size() == 1);
  CHECK(circle_distance(clusters[0][0], 0.0) < 1e-6);
  // A rotation visits the whole circle.
  CHECK(omega_limit_estimate(catalog::rotation(1.0), pt({0.0}), 0.5, 1.0, 0.01, 1e-3).size() > 50);
  CHECK(lipschitz_estimate(f) == doctest::Approx(kTwoPi));
}

TEST_CASE("discrete orbits respect the graph") {
  const TrigPolyField f = sample_random(catalog::figure1(), 2, 1.0, 7);
  const auto orbit = discrete_orbit(f, pt({0.1, 0.2, 0.3, 0.4, 0.5}), 4);
  REQUIRE(orbit.size() == 5);
  for (std::size_t n = 1; n < orbit.size(); ++n) {
    CHECK(torus_distance(orbit[n], wrap(f.evaluate(orbit[n - 1]))).max == 0.0);
  }
}
