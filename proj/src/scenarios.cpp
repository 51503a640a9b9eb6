#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>

#include "ccn/catalog.hpp"
#include "ccn/errors.hpp"
#include "ccn/harness.hpp"

namespace ccn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class ScenarioBuilder {
 public:
  ScenarioBuilder(std::string name, std::string artifact_dir) : dir_(std::move(artifact_dir)) {
    result_.name = std::move(name);
    result_.details = Json::object();
  }

  void check(std::string name, bool passed, std::string detail = "") {
    result_.checks.push_back({std::move(name), passed, std::move(detail)});
  }

  void verdict(Verdict v) { result_.verdicts.push_back(std::move(v)); }
  Json& details() { return result_.details; }

  void artifact(const std::string& file, const std::string& text) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    const std::string path = (std::filesystem::path(dir_) / file).string();
    write_text_file(path, text);
    result_.artifacts.push_back(path);
  }

  void trajectory_artifact(const std::string& file, const Trajectory& traj) {
    if (dir_.empty()) return;
    std::ostringstream csv;
    write_trajectory_csv(traj, csv);
    artifact(file, csv.str());
  }

  ScenarioResult take() { return std::move(result_); }

 private:
  std::string dir_;
  ScenarioResult result_;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

ScenarioResult fig1_structure(ScenarioBuilder b) {
  const CellGraph g = catalog::figure1();
  const Json report = graph_report(g);
  b.details() = report;
  b.artifact("fig1-structure.json", report.dump(2));

  const CellSet obs = observation_cells(g);
  b.check("observation cells are {5}", obs == g.make_set({4}), obs.to_string());

  const auto subs = independent_subnetworks(g);
  std::vector<std::string> names;
  for (const auto& s : subs) names.push_back(s.cells.to_string());
  const bool exact = subs.size() == 3 && subs[0].cells.empty() && subs[1].cells == g.make_set({0, 1, 2, 3}) &&
                     subs[2].cells == g.all_cells();
  std::string listed;
  for (const auto& n : names) listed += n + " ";
  b.check("independent sub-networks are {}, {1,2,3,4} and the full set", exact, listed);

  const CellGraph sub = restrict_to(g, g.make_set({0, 1, 2, 3}));
  b.check("restriction to {1,2,3,4} is strongly connected", is_strongly_connected(sub));
  b.check("not self-dependent", !is_self_dependent(g));
  b.check("not strongly connected", !is_strongly_connected(g));

  // Literal definition: I = {2,3,5} has direct inputs {1,3}, so d_J < d_I.
  const auto cls = dimensional_classification(g);
  const CellSet deficit_set = g.make_set({1, 2, 4});
  const bool listed_deficit = std::any_of(cls.witnesses.begin(), cls.witnesses.end(),
                                          [&](const DimensionWitness& w) { return w.cells == deficit_set; });
  b.check("dimensional class is neither", cls.kind == DimensionalClass::neither, to_string(cls.kind));
  b.check("{2,3,5} is among the deficit witnesses", listed_deficit, std::to_string(cls.witness_count) + " witnesses");
  const CellSet five = g.make_set({4});
  b.check("{5} is tight: d_J = d_I = 1", inputs_of_set(g, five).dim_total() == five.dim_total());
  const auto deficit = find_dimension_deficit(g);
  b.check("a dimension deficit exists", deficit.has_value(), deficit ? deficit->cells.to_string() : "none");
  return b.take();
}

ScenarioResult ce_eq_inverse(ScenarioBuilder b) {
  const TrigPolyField f = counterexample_two_cell();
  const CellGraph& g = f.graph();
  const auto eqs = find_equilibria(f).equilibria;
  b.details()["equilibria"] = equilibria_to_json(eqs);
  b.artifact("ce-eq-equilibria.json", equilibria_to_json(eqs).dump(2));

  b.check("exactly four equilibria", eqs.size() == 4, std::to_string(eqs.size()));
  bool on_grid = eqs.size() == 4;
  double worst_residual = 0.0;
  for (const auto& e : eqs) {
    worst_residual = std::max(worst_residual, e.residual);
    for (Eigen::Index c = 0; c < 2; ++c) {
      on_grid = on_grid && (circle_distance(e.point[c], 0.0) < 1e-10 || circle_distance(e.point[c], 0.5) < 1e-10);
    }
  }
  b.check("equilibria are {0, 1/2}^2", on_grid);
  b.check("residuals below 1e-10", worst_residual < 1e-10, num(worst_residual));

  for (CellIndex obs : {CellIndex{1}, CellIndex{0}}) {
    const Verdict v = verify_equilibrium_inverse(g, eqs, obs, 1e-5);
    const CellIndex other = 1 - obs;
    bool pair = false;
    if (v.witness && v.witness->points.size() == 2) {
      const Point& p = v.witness->points[0];
      const Point& q = v.witness->points[1];
      pair = cell_distance(g, obs, p, q) < 1e-10 && cell_distance(g, other, p, q) > 0.5 - 1e-10 &&
             p.cwiseAbs().maxCoeff() < 1e-10;
    }
    b.check("equilibrium inverse fails at cell " + std::to_string(obs + 1), !v.holds && v.consistent());
    b.check("witness pair (0,0) and the equilibrium differing only at cell " + std::to_string(other + 1), pair);
    b.verdict(v);
  }

  // Trajectories started at two equilibria agreeing at cell 2: cell 1 is
  // constant in both, which the automatic mode exempts.
  const Point p = Point::Zero(2);
  Point q(2);
  q << 0.5, 0.0;
  const TimeWindow window{0.0, 1.0};
  const Verdict strict = verify_trajectory_inverse(f, p, q, 1, window, 1e-7, 1e-5, 0.01, InverseMode::all_cells);
  const Verdict exempt = verify_trajectory_inverse(f, p, q, 1, window, 1e-7, 1e-5, 0.01, InverseMode::automatic);
  b.check("all-cells trajectory inverse fails from (0,0) and (1/2,0)", strict.premise_met && !strict.holds);
  b.check("automatic mode exempts the constant cell", exempt.premise_met && exempt.holds &&
                                                          !exempt.annotations.empty());
  b.verdict(strict);
  b.verdict(exempt);
  return b.take();
}

ScenarioResult ce_eq_spectrum(ScenarioBuilder b) {
  const TrigPolyField f = counterexample_two_cell();
  Point centre(2);
  centre << 0.5, 0.0;
  const EquilibriumReport rot = classify_equilibrium(f, centre);
  const EquilibriumReport saddle = classify_equilibrium(f, Point::Zero(2));
  b.details()["at_half_zero"] = equilibrium_to_json(rot);
  b.details()["at_origin"] = equilibrium_to_json(saddle);
  b.artifact("ce-eq-spectrum.json", b.details().dump(2));

  auto near = [](const std::vector<std::complex<double>>& spec, std::complex<double> a, std::complex<double> c) {
    if (spec.size() != 2) return false;
    const bool direct = std::abs(spec[0] - a) < 1e-8 && std::abs(spec[1] - c) < 1e-8;
    const bool swapped = std::abs(spec[0] - c) < 1e-8 && std::abs(spec[1] - a) < 1e-8;
    return direct || swapped;
  };
  b.check("eigenvalues at (1/2,0) are +-2 pi i", near(rot.spectrum, {0.0, kTwoPi}, {0.0, -kTwoPi}));
  b.check("(1/2,0) is simple", rot.simple, num(rot.min_singular_value));
  b.check("(1/2,0) is not hyperbolic", !rot.hyperbolic, num(rot.spectral_gap));
  b.check("eigenvalues at (0,0) are +-2 pi", near(saddle.spectrum, {kTwoPi, 0.0}, {-kTwoPi, 0.0}));
  b.check("(0,0) is hyperbolic", saddle.hyperbolic, num(saddle.spectral_gap));
  return b.take();
}

ScenarioResult feedforward_period(ScenarioBuilder b) {
  const TrigPolyField f = catalog::feedforward_pair();
  const CellGraph& g = f.graph();
  const double h = 1e-3;
  const double tol = 1e-4;
  Point x0(2);
  x0 << 0.0, 0.3;
  const Trajectory traj = integrate(f, x0, 4.0, h);
  b.trajectory_artifact("feedforward-trajectory.csv", traj);

  // x2(t) = 0.3 + (1 - cos 2 pi t) / (2 pi)
  double closed_form_error = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.time(k);
    const double exact = 0.3 + (1.0 - std::cos(kTwoPi * t)) / kTwoPi;
    closed_form_error = std::max(closed_form_error, circle_distance(traj.states()(static_cast<Eigen::Index>(k), 1), exact));
  }
  b.check("cell 2 matches the closed form within 1e-9", closed_form_error < 1e-9, num(closed_form_error));

  const PeriodDetection det = detect_period(traj, 1, {0.0, 3.0}, 1.5, tol);
  const double period = det.estimate ? det.estimate->period : 0.0;
  b.check("detected period at cell 2 is 1 within one step", det.estimate && std::abs(period - 1.0) <= h + 1e-12,
          num(period));
  b.details()["detected_period"] = period;
  b.details()["closed_form_error"] = closed_form_error;

  const Verdict periodic = verify_periodic_propagation(f, traj, 1, 1.0, 0.5, {0.0, 1.5}, tol);
  b.check("periodic propagation holds", periodic.holds && periodic.premise_met);
  b.verdict(periodic);

  // T-periodicity of x is trajectory-inverse agreement of x and x(. + T).
  const Trajectory shifted = traj.shifted(1000);
  const Verdict shift = verify_trajectory_inverse(g, traj, shifted, 1, {0.0, shifted.end_time()}, tol, tol,
                                                  InverseMode::all_cells);
  b.check("T-shift comparison meets its premise and holds", shift.premise_met && shift.holds);
  b.check("T-shift comparison agrees with periodic propagation", shift.holds == periodic.holds);
  b.verdict(shift);
  return b.take();
}

ScenarioResult gradient_stabilization(ScenarioBuilder b) {
  const TrigPolyField f = catalog::contracting_figure1(0.1);
  Point x0(5);
  x0 << 0.1, 0.05, 0.15, 0.9, 0.2;
  const double t_end = 12.0;
  const double h = 0.01;
  const StabilizationOptions opts;
  const Verdict v = verify_stabilization(f, x0, 4, t_end, h, opts);
  b.check("stabilization verdict holds", v.holds && v.premise_met);
  b.verdict(v);

  const Trajectory traj = integrate(f, x0, t_end, h);
  b.trajectory_artifact("gradient-trajectory.csv", traj);
  const Point limit = traj.state(traj.size() - 1);
  const auto star = refine_equilibrium(f, limit);
  const double residual = star ? f.evaluate(*star).cwiseAbs().maxCoeff() : 1.0;
  b.check("limit is an equilibrium with |f(x*)| < 1e-6", star.has_value() && residual < 1e-6, num(residual));

  const auto clusters = omega_limit_estimate(f, x0, 0.75 * t_end, 0.25 * t_end, h, opts.cluster_radius);
  const double offset = star && !clusters.empty() ? torus_distance(clusters.front(), *star).max : 1.0;
  b.check("omega-limit is one cluster within 1e-4 of x*", clusters.size() == 1 && offset < 1e-4,
          std::to_string(clusters.size()) + " cluster(s), offset " + num(offset));
  if (star) b.details()["equilibrium"] = point_to_json(*star);
  b.details()["residual"] = residual;
  b.details()["clusters"] = clusters.size();

  // A rotating observation cell never stabilises: vacuous verdict.
  const Verdict rotating = verify_stabilization(catalog::rotation_cycle(0.5), Point::Zero(2), 0, 4.0, h, opts);
  b.check("rotating cycle leaves the premise unmet", !rotating.premise_met && rotating.holds);
  b.verdict(rotating);
  return b.take();
}

ScenarioResult discrete_orbit_scenario(ScenarioBuilder b) {
  Json orbits = Json::object();

  // x -> 0.3 on an input-free cell: constant from the first step.
  const TrigPolyField constant = FieldBuilder(CellGraph({1}, {})).add_constant(0, 0.3).build(1);
  Point start(1);
  start << 0.8;
  const auto c_orbit = discrete_orbit(constant, start, 10);
  bool settled = c_orbit.size() == 11;
  for (std::size_t n = 1; n < c_orbit.size(); ++n) settled = settled && c_orbit[n][0] == 0.3;
  b.check("input-free constant map settles after one step", settled);

  // x -> 0.5 + 0.3 sin(2 pi x) fixes 1/2 exactly.
  const TrigPolyField fixed = FieldBuilder(CellGraph({1}, {{0, 0}})).add_constant(0, 0.5).add(0, {{0, 1}}, 0.0, 0.3).build(1);
  Point half(1);
  half << 0.5;
  const auto f_orbit = discrete_orbit(fixed, half, 10);
  bool constant_orbit = f_orbit.size() == 11;
  for (const Point& x : f_orbit) constant_orbit = constant_orbit && std::abs(x[0] - 0.5) < 1e-15;
  b.check("orbit from the fixed point 1/2 is constant", constant_orbit);

  // Admissibility on Figure 1: cell i at step n + 1 reads only the direct
  // inputs of i at step n.
  const TrigPolyField g1 = sample_random(catalog::figure1(), 2, 1.0, 7);
  Point x0(5);
  x0 << 0.11, 0.23, 0.37, 0.41, 0.53;
  Point y0 = x0;
  y0[4] += 0.1;
  const auto x_orbit = discrete_orbit(g1, x0, 20);
  const auto y_orbit = discrete_orbit(g1, y0, 20);
  bool identical = true;
  for (std::size_t n = 1; n < x_orbit.size(); ++n) identical = identical && x_orbit[n] == y_orbit[n];
  b.check("perturbing cell 5 only changes x^0", identical);

  Point z0 = x0;
  z0[2] += 0.1;
  const auto z_orbit = discrete_orbit(g1, z0, 1);
  const bool untouched = z_orbit[1][0] == x_orbit[1][0] && z_orbit[1][1] == x_orbit[1][1];
  bool moved = true;
  for (Eigen::Index c : {2, 3, 4}) moved = moved && z_orbit[1][c] != x_orbit[1][c];
  b.check("perturbing cell 3 changes exactly cells 3, 4 and 5 at the next step", untouched && moved);

  Json fig = Json::array();
  for (const Point& x : x_orbit) fig.push_back(point_to_json(x));
  orbits["figure1_seed7"] = fig;
  orbits["constant_map"] = c_orbit.back()[0];
  b.details() = orbits;
  b.artifact("discrete-orbit.json", orbits.dump(2));
  return b.take();
}

using Runner = std::function<ScenarioResult(ScenarioBuilder)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"fig1-structure", fig1_structure},
      {"ce-eq-inverse", ce_eq_inverse},
      {"ce-eq-spectrum", ce_eq_spectrum},
      {"feedforward-period", feedforward_period},
      {"gradient-stabilization", gradient_stabilization},
      {"discrete-orbit", discrete_orbit_scenario},
  };
  return r;
}

}  // namespace

bool ScenarioResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.passed; });
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, run] : registry()) names.push_back(name);
  return names;
}

ScenarioResult run_scenario(const std::string& name, const std::string& artifact_dir) {
  for (const auto& [id, run] : registry()) {
    if (id == name) return run(ScenarioBuilder(id, artifact_dir));
  }
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown scenario '" + name + "'; known scenarios: " + known);
}

Json scenario_to_json(const ScenarioResult& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(verdict_to_json(v));
  return {{"tool", kToolVersion}, {"scenario", r.name}, {"passed", r.passed()}, {"checks", checks},
          {"verdicts", verdicts},  {"details", r.details}, {"artifacts", r.artifacts}};
}

}  // namespace ccn
