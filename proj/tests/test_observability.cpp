#include <cmath>
#include <random>

#include "ccn/catalog.hpp"
#include "ccn/errors.hpp"
#include "ccn/observability.hpp"
#include "doctest.h"

using namespace ccn;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index c = 0;
  for (double a : v) x[c++] = a;
  return x;
}

bool has_annotation(const Verdict& v, const std::string& prefix) {
  for (const auto& a : v.annotations)
    if (a.rfind(prefix, 0) == 0) return true;
  return false;
}

Point random_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("claim names round-trip") {
  for (Claim c : {Claim::trajectory_inverse, Claim::constant_propagation, Claim::periodic_propagation,
                  Claim::exact_period_propagation, Claim::stabilization, Claim::equilibrium_inverse}) {
    CHECK(parse_claim(to_string(c)) == c);
  }
  CHECK_FALSE(parse_claim("nonsense").has_value());
}

TEST_CASE("sample windows") {
  const Trajectory traj = integrate(catalog::rotation(0.5), pt({0.0}), 1.0, 0.1);
  const SampleRange r = sample_range(traj, {0.2, 0.5});
  CHECK(r.first == 2);
  CHECK(r.last == 5);
  CHECK_THROWS_AS(sample_range(traj, {0.5, 0.2}), DomainError);
  CHECK_THROWS_AS(sample_range(traj, {0.0, 2.0}), DomainError);
}

TEST_CASE("constancy and period detection") {
  const Trajectory rot = integrate(catalog::rotation(0.5), pt({0.1}), 6.0, 0.01);
  CHECK_FALSE(is_constant_on(rot, 0, {0.0, 1.0}, 1e-6).constant);
  const ConstancyCheck loose = is_constant_on(rot, 0, {0.0, 1.0}, 0.6);
  CHECK(loose.constant);
  CHECK(loose.degenerate_tolerance);
  const PeriodDetection p = detect_period(rot, 0, {0.0, 5.0}, 3.0, 1e-9);
  REQUIRE(p.estimate.has_value());
  CHECK(p.estimate->period_steps == 200);
  CHECK(p.estimate->period == doctest::Approx(2.0));
  CHECK(period_residual(rot, 0, 100, {0, 400}) == doctest::Approx(0.5));

  const Trajectory still = integrate(catalog::sine_cell(-1.0), pt({0.0}), 2.0, 0.01);
  CHECK(is_constant_on(still, 0, {0.0, 2.0}, 1e-12).constant);
  CHECK(detect_period(still, 0, {0.0, 2.0}, 1.0, 1e-6).constant);
}

TEST_CASE("stabilisation detection uses unwrapped tails") {
  const Trajectory rot = integrate(catalog::rotation(0.5), pt({0.1}), 4.0, 0.01);
  CHECK(tail_diameter(rot, 0, 0.25) == doctest::Approx(0.5));
  CHECK_FALSE(detect_stabilization(rot, 0, 0.25, 1e-6).has_value());
  // Attracted to 0 from the left: the tail straddles the seam 0 = 1.
  const Trajectory sink = integrate(catalog::sine_cell(-1.0), pt({0.9}), 8.0, 0.01);
  const auto limit = detect_stabilization(sink, 0, 0.25, 1e-6);
  REQUIRE(limit.has_value());
  CHECK(circle_distance((*limit)[0], 0.0) < 1e-9);
}

TEST_CASE("trajectory inverse on the counter-example") {
  const TrigPolyField f = counterexample_two_cell();
  const Verdict strict = verify_trajectory_inverse(f, pt({0.0, 0.0}), pt({0.5, 0.0}), 1, {0.0, 1.0}, 1e-7, 1e-5,
                                                   0.01, InverseMode::all_cells);
  CHECK(strict.premise_met);
  CHECK_FALSE(strict.holds);
  REQUIRE(strict.witness.has_value());
  CHECK(strict.witness->cells == std::vector<CellIndex>{0});
  CHECK(strict.witness->distances[0] == 0.5);

  const Verdict automatic =
      verify_trajectory_inverse(f, pt({0.0, 0.0}), pt({0.5, 0.0}), 1, {0.0, 1.0}, 1e-7, 1e-5, 0.01);
  CHECK(automatic.holds);
  CHECK(has_annotation(automatic, "exempt cell 1"));

  const Verdict apart = verify_trajectory_inverse(f, pt({0.1, 0.2}), pt({0.3, 0.4}), 1, {0.0, 1.0}, 1e-7, 1e-5, 0.01);
  CHECK_FALSE(apart.premise_met);
  CHECK(apart.holds);
  CHECK(has_annotation(apart, "premise not met"));
}

TEST_CASE("trajectory inverse witnesses replay from the stored trajectories") {
  const CellGraph g = catalog::two_cell_cycle();
  const TrigPolyField f = counterexample_two_cell();
  const Trajectory x = integrate(f, pt({0.0, 0.0}), 1.0, 0.01);
  const Trajectory y = integrate(f, pt({0.5, 0.0}), 1.0, 0.01);
  const Verdict v = verify_trajectory_inverse(g, x, y, 1, {0.0, 1.0}, 1e-7, 1e-5, InverseMode::all_cells);
  REQUIRE(v.witness.has_value());
  const Witness& w = *v.witness;
  CHECK(replay_distance(x, y, w.cells[0], w.samples[0]) == w.distances[0]);
  CHECK_THROWS_AS(verify_trajectory_inverse(catalog::figure1(), x, y, 0, {0.0, 1.0}, 1e-7, 1e-5), DomainError);
}

TEST_CASE("self-dependent graphs check every cell automatically") {
  const TrigPolyField f = embed_field(counterexample_two_cell(), catalog::builtin_graph("ce-eq-self"));
  const Verdict v = verify_trajectory_inverse(f, pt({0.0, 0.0}), pt({0.5, 0.0}), 1, {0.0, 1.0}, 1e-7, 1e-5, 0.01);
  CHECK_FALSE(v.holds);
  CHECK(has_annotation(v, "all cells checked"));
}

TEST_CASE("property: random pairs on a self-dependent cycle give consistent verdicts") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const TrigPolyField f = sample_random(catalog::self_dependent_cycle(3), 2, 1.0, rng());
    const Point x0 = random_point(rng, 3);
    const Verdict same = verify_trajectory_inverse(f, x0, x0, 2, {0.0, 1.0}, 1e-7, 1e-5, 0.01);
    CHECK(same.premise_met);
    CHECK(same.holds);
    const Verdict other = verify_trajectory_inverse(f, x0, random_point(rng, 3), 2, {0.0, 1.0}, 1e-7, 1e-5, 0.01);
    CHECK(other.consistent());
    if (other.premise_met) CHECK(other.holds);
  }
}

TEST_CASE("constant propagation") {
  // Input-free constant cell (value 0): nothing feeds it, so the verdict is trivial.
  const TrigPolyField free0 = catalog::input_free_constant(0.0, 3);
  const Trajectory t0 = integrate(free0, pt({0.2, 0.3, 0.4}), 2.0, 0.01);
  const Verdict v0 = verify_constant_propagation(free0, t0, 0, {0.0, 1.0}, 1e-6);
  CHECK(v0.holds);

  // A single self-looped cell at its equilibrium observes everything.
  const TrigPolyField sine = catalog::sine_cell(1.0);
  const Trajectory t1 = integrate(sine, pt({0.5}), 1.0, 0.01);
  const Verdict v1 = verify_constant_propagation(sine, t1, 0, {0.0, 0.5}, 1e-6);
  CHECK(v1.holds);

  CHECK_THROWS_AS(verify_constant_propagation(sine, integrate(sine, pt({0.2}), 1.0, 0.01), 0, {0.0, 0.5}, 1e-6),
                  DomainError);
}

TEST_CASE("constant propagation flags stored states that no admissible flow produces") {
  // Cell 2 frozen while its input cell 1 moves.
  const TrigPolyField f = catalog::feedforward_pair();
  Eigen::MatrixXd states(11, 2);
  for (int k = 0; k <= 10; ++k) {
    states(k, 0) = 0.01 * k;
    states(k, 1) = 0.3;
  }
  const Trajectory fake(0.1, states, {0, 1, 2}, "hand-made");
  const Verdict v = verify_constant_propagation(f, fake, 1, {0.0, 1.0}, 1e-6);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->cells == std::vector<CellIndex>{0});
  CHECK(v.witness->distances[0] == doctest::Approx(0.1));

  // Observation cell constant away from every equilibrium.
  const TrigPolyField sine = catalog::sine_cell(1.0);
  Eigen::MatrixXd frozen = Eigen::MatrixXd::Constant(5, 1, 0.2);
  const Verdict w = verify_constant_propagation(sine, Trajectory(0.1, frozen, {0, 1}, ""), 0, {0.0, 0.4}, 1e-6);
  CHECK_FALSE(w.holds);
  CHECK(w.witness->points.size() == 1);
}

TEST_CASE("periodic propagation") {
  const TrigPolyField ff = catalog::feedforward_pair();
  const Trajectory traj = integrate(ff, pt({0.0, 0.3}), 3.0, 0.01);
  const Verdict v = verify_periodic_propagation(ff, traj, 1, 1.0, 0.5, {0.0, 1.5}, 1e-4);
  CHECK(v.holds);
  CHECK(v.claim == Claim::periodic_propagation);
  CHECK_THROWS_AS(verify_periodic_propagation(ff, traj, 1, 1.005, 0.5, {0.0, 1.6}, 1e-4), DomainError);
  CHECK_THROWS_AS(verify_periodic_propagation(ff, traj, 1, 1.0, 0.5, {0.0, 1.2}, 1e-4), DomainError);
  CHECK_THROWS_AS(verify_periodic_propagation(ff, traj, 1, 0.5, 0.5, {0.0, 1.5}, 1e-4), DomainError);

  // Strongly connected: both cells of the rotating cycle have exact period 2.
  const TrigPolyField cyc = catalog::rotation_cycle(0.5);
  const Trajectory rot = integrate(cyc, pt({0.0, 0.25}), 10.0, 0.01);
  const Verdict exact = verify_periodic_propagation(cyc, rot, 0, 2.0, 0.5, {0.0, 2.5}, 1e-6);
  CHECK(exact.claim == Claim::exact_period_propagation);
  CHECK(exact.holds);
  // Period 4 holds too, but is not the smallest.
  const Verdict doubled = verify_periodic_propagation(cyc, rot, 0, 4.0, 0.5, {0.0, 4.5}, 1e-6);
  CHECK_FALSE(doubled.holds);
  CHECK(doubled.witness->samples[0] == 200);

  // Constant solutions are periodic with every period.
  const TrigPolyField sine = embed_field(counterexample_two_cell(), catalog::two_cell_cycle());
  const Trajectory still = integrate(sine, pt({0.0, 0.0}), 3.0, 0.01);
  const Verdict deg = verify_periodic_propagation(sine, still, 0, 1.0, 0.5, {0.0, 1.5}, 1e-6);
  CHECK(deg.holds);
  CHECK(has_annotation(deg, "degenerate: constant"));
}

TEST_CASE("stabilisation") {
  const TrigPolyField sine = catalog::sine_cell(-1.0);
  const Verdict v = verify_stabilization(sine, pt({0.3}), 0, 6.0, 0.01);
  CHECK(v.premise_met);
  CHECK(v.holds);
  const Verdict rot = verify_stabilization(catalog::rotation(0.5), pt({0.0}), 0, 4.0, 0.01);
  CHECK_FALSE(rot.premise_met);
  CHECK(rot.holds);
  CHECK_THROWS_AS(verify_stabilization(catalog::contracting_figure1(), Point::Zero(5), 0, 1.0, 0.01), DomainError);
}

TEST_CASE("equilibrium inverse") {
  const TrigPolyField ce = counterexample_two_cell();
  const Verdict v = verify_equilibrium_inverse(ce, 1, 1e-5);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  REQUIRE(v.witness->points.size() == 2);
  CHECK(cell_distance(ce.graph(), 1, v.witness->points[0], v.witness->points[1]) < 1e-5);
  CHECK(cell_distance(ce.graph(), 0, v.witness->points[0], v.witness->points[1]) == doctest::Approx(0.5));

  CHECK(equilibrium_inverse_expected(catalog::self_dependent_cycle(3)));
  CHECK(equilibrium_inverse_expected(catalog::figure1()));
  CHECK_FALSE(equilibrium_inverse_expected(catalog::two_cell_cycle()));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const TrigPolyField f = sample_random(catalog::self_dependent_cycle(3), 2, 1.0, rng());
    const Verdict r = verify_equilibrium_inverse(f, 0, 1e-5);
    CHECK(r.holds);
  }
  const Verdict one = verify_equilibrium_inverse(catalog::sine_cell(1.0), 0, 1e-5);
  CHECK(one.holds);
}
