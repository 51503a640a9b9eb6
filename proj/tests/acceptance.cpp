// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are pinned here and printed with the result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "ccn/catalog.hpp"
#include "ccn/harness.hpp"

using namespace ccn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

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

bool spectrum_is(const std::vector<std::complex<double>>& s, std::complex<double> a, std::complex<double> b,
                 double tol) {
  if (s.size() != 2) return false;
  return (std::abs(s[0] - a) < tol && std::abs(s[1] - b) < tol) ||
         (std::abs(s[0] - b) < tol && std::abs(s[1] - a) < tol);
}

void criterion1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const CellGraph g = load_graph(CCN_DATA_DIR "/fig1.json");
  const Json r = graph_report(g);
  const double elapsed = seconds_since(t0);
  const Json subs = r["independent_subnetworks"];
  Json cells = Json::array();
  for (const Json& s : subs) cells.push_back(s["cells"]);
  const Json expected = Json::parse("[[], [1,2,3,4], [1,2,3,4,5]]");
  o.require(r["observation_cells"] == Json::array({5}), "observation cells {5}");
  o.require(cells == expected, "sub-networks {}, {1,2,3,4}, full");
  o.require(subs.size() == 3 && subs[1]["strongly_connected"] == true, "{1,2,3,4} strongly connected");
  o.require(is_strongly_connected(restrict_to(g, g.make_set({0, 1, 2, 3}))), "restricted graph strongly connected");
  o.require(r["self_dependent"] == false, "is_self_dependent = false");
  o.require(elapsed < 1.0, "runtime < 1 s");
  o.detail << "obs=" << r["observation_cells"].dump() << " subnetworks=" << cells.dump()
           << " self_dependent=" << r["self_dependent"].dump() << " runtime=" << elapsed << "s";
}

void criterion2(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrigPolyField f = counterexample_two_cell();
  const auto eqs = find_equilibria(f).equilibria;
  bool grid = eqs.size() == 4;
  double residual = 0.0;
  for (const auto& e : eqs) {
    residual = std::max(residual, e.residual);
    for (Eigen::Index c = 0; c < 2; ++c) {
      grid = grid && (circle_distance(e.point[c], 0.0) < 1e-10 || circle_distance(e.point[c], 0.5) < 1e-10);
    }
  }
  const Verdict v = verify_equilibrium_inverse(f.graph(), eqs, 1, 1e-5);
  bool pair = false;
  if (v.witness && v.witness->points.size() == 2) {
    const Point& p = v.witness->points[0];
    const Point& q = v.witness->points[1];
    pair = torus_distance(p, pt({0.0, 0.0})).max < 1e-10 && torus_distance(q, pt({0.5, 0.0})).max < 1e-10;
  }
  const double elapsed = seconds_since(t0);
  o.require(eqs.size() == 4, "exactly 4 equilibria");
  o.require(grid, "equilibria on {0,1/2}^2");
  o.require(residual < 1e-10, "residual < 1e-10");
  o.require(!v.holds, "equilibrium inverse at cell 2 fails");
  o.require(pair, "witness pair (0,0)/(1/2,0)");
  o.require(elapsed < 5.0, "runtime < 5 s");
  o.detail << "equilibria=" << eqs.size() << " max_residual=" << residual << " holds=" << v.holds;
  if (v.witness && v.witness->points.size() == 2) {
    o.detail << " witness=(" << v.witness->points[0].transpose() << ")/(" << v.witness->points[1].transpose() << ")";
  }
  o.detail << " runtime=" << elapsed << "s";
}

void criterion3(Outcome& o) {
  const TrigPolyField f = counterexample_two_cell();
  const EquilibriumReport centre = classify_equilibrium(f, pt({0.5, 0.0}));
  const EquilibriumReport saddle = classify_equilibrium(f, pt({0.0, 0.0}));
  o.require(spectrum_is(centre.spectrum, {0.0, kTwoPi}, {0.0, -kTwoPi}, 1e-8), "+-2 pi i at (1/2,0) within 1e-8");
  o.require(centre.simple, "(1/2,0) simple");
  o.require(!centre.hyperbolic, "(1/2,0) not hyperbolic");
  o.require(spectrum_is(saddle.spectrum, {kTwoPi, 0.0}, {-kTwoPi, 0.0}, 1e-8), "+-2 pi at (0,0) within 1e-8");
  o.require(saddle.hyperbolic, "(0,0) hyperbolic");
  o.detail << "(1/2,0): " << centre.spectrum[0] << " " << centre.spectrum[1] << " simple=" << centre.simple
           << " hyperbolic=" << centre.hyperbolic << "; (0,0): " << saddle.spectrum[0] << " " << saddle.spectrum[1]
           << " hyperbolic=" << saddle.hyperbolic;
}

void criterion4(Outcome& o) {
  const TrigPolyField f = counterexample_two_cell();
  const Point x0 = pt({0.1, 0.3});  // not an equilibrium
  const double t = 1.0;
  const double h = 0.01;
  const Point ref = endpoint(f, x0, t, h / 8);
  const double e1 = torus_distance(endpoint(f, x0, t, h), ref).max;
  const double e2 = torus_distance(endpoint(f, x0, t, h / 2), ref).max;
  const double order = std::log2(e1 / e2);
  // Phi_T with step h against Phi_{T/2} (step h) after Phi_{T/2} (step h/2).
  const Point composed = endpoint(f, endpoint(f, x0, t / 2, h / 2), t / 2, h);
  const double flow_gap = torus_distance(endpoint(f, x0, t, h), composed).max;
  const double bound = 10.0 * std::pow(h, 4);
  o.require(order >= 3.7 && order <= 4.3, "order in [3.7, 4.3]");
  o.require(flow_gap <= bound, "flow property within 10 h^4");
  o.detail << "order=" << order << " (h=" << h << ", reference h/8) flow_gap=" << flow_gap << " bound=" << bound;
}

void criterion5(Outcome& o) {
  const TrigPolyField f = catalog::feedforward_pair();
  const double h = 1e-3;
  const double tol = 1e-4;
  const Trajectory traj = integrate(f, pt({0.0, 0.3}), 4.0, h);
  const PeriodDetection det = detect_period(traj, 1, {0.0, 3.0}, 1.5, tol);
  const double period = det.estimate ? det.estimate->period : 0.0;
  const Verdict periodic = verify_periodic_propagation(f, traj, 1, 1.0, 0.5, {0.0, 1.5}, tol);
  const Trajectory shifted = traj.shifted(1000);
  const Verdict shift =
      verify_trajectory_inverse(f.graph(), traj, shifted, 1, {0.0, shifted.end_time()}, tol, tol, InverseMode::all_cells);
  o.require(det.estimate && std::abs(period - 1.0) <= h + 1e-12, "period 1.0 within one step");
  o.require(periodic.holds, "periodic propagation holds");
  o.require(shift.premise_met && shift.holds && shift.holds == periodic.holds, "T-shift equivalence");
  o.detail << "period=" << period << " (h=" << h << ") periodic_holds=" << periodic.holds
           << " shift_premise=" << shift.premise_met << " shift_holds=" << shift.holds;
}

void criterion6(Outcome& o) {
  const TrigPolyField f = catalog::contracting_figure1(0.1);
  const Point x0 = pt({0.1, 0.05, 0.15, 0.9, 0.2});
  const double t_end = 12.0;
  const double h = 0.01;
  const StabilizationOptions opts;  // diameter 1e-6, residual 1e-6, cluster 1e-4
  const Verdict v = verify_stabilization(f, x0, 4, t_end, h, opts);
  const Point last = endpoint(f, x0, t_end, h);
  const auto star = refine_equilibrium(f, last);
  const double residual = star ? f.evaluate(*star).norm() : INFINITY;
  const auto clusters = omega_limit_estimate(f, x0, 0.75 * t_end, 0.25 * t_end, h, opts.cluster_radius);
  const double offset = star && !clusters.empty() ? torus_distance(clusters[0], *star).max : INFINITY;
  o.require(v.premise_met && v.holds, "stabilization verdict holds");
  o.require(residual < 1e-6, "|f(x*)| < 1e-6");
  o.require(clusters.size() == 1 && offset < 1e-4, "single omega-limit cluster within 1e-4");
  o.detail << "holds=" << v.holds << " |f(x*)|=" << residual << " clusters=" << clusters.size()
           << " offset=" << offset;
}

std::string seeds_of(const ClaimCounter& c) {
  std::string out;
  for (const Violation& v : c.violations) out += " trial " + std::to_string(v.trial) + " seed " + std::to_string(v.seed);
  return out;
}

void criterion7(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig fig;
  fig.graph = CCN_DATA_DIR "/fig1.json";
  fig.trials = 500;
  fig.degree = 2;
  const GenericityReport r = run_genericity(fig);
  const ClaimCounter& cp = r.claims.at(GenericClaim::constant_propagation);
  const ClaimCounter& inv = r.claims.at(GenericClaim::equilibrium_inverse);
  const ClaimCounter& simp = r.claims.at(GenericClaim::simplicity);

  ExperimentConfig cyc;
  cyc.graph = "builtin:cycle3-self";
  cyc.trials = 100;
  cyc.degree = 2;
  const GenericityReport c = run_genericity(cyc);
  const ClaimCounter& hyp = c.claims.at(GenericClaim::hyperbolicity);
  const double elapsed = seconds_since(t0);

  const bool simple_all = r.equilibria.simple == r.equilibria.total &&
                          r.subnetwork_equilibria.simple == r.subnetwork_equilibria.total &&
                          simp.violations.empty();
  o.require(r.errors.empty() && c.errors.empty(), "no per-trial errors");
  o.require(simple_all, "all found equilibria simple");
  o.require(cp.violations.empty(), "no constant propagation violation" + seeds_of(cp));
  o.require(inv.violations.empty(), "no equilibrium inverse violation" + seeds_of(inv));
  o.require(c.equilibria.total > 0 && c.equilibria.hyperbolic == c.equilibria.total && hyp.violations.empty(),
            "3-cycle equilibria all hyperbolic" + seeds_of(hyp));
  o.require(elapsed < 600.0, "runtime < 10 min");
  o.detail << "fig1: 500 trials, equilibria " << r.equilibria.total << " (histogram all zero: "
           << (r.equilibria.count_histogram.size() == 1 && r.equilibria.count_histogram.count(0)) << "), "
           << "sub-network equilibria " << r.subnetwork_equilibria.simple << "/" << r.subnetwork_equilibria.total
           << " simple; constant propagation premise "
           << cp.premise_met << " holds " << cp.holds << "; equilibrium inverse premise " << inv.premise_met
           << " holds " << inv.holds << "; cycle3-self: " << c.equilibria.hyperbolic << "/" << c.equilibria.total
           << " hyperbolic, " << c.equilibria.simple << " simple, min singular value "
           << c.equilibria.min_singular_value << "; runtime=" << elapsed << "s";
}

void criterion8(Outcome& o) {
  std::size_t nonzero = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    if (!find_equilibria(catalog::input_free_constant(0.3, seed)).equilibria.empty()) ++nonzero;
  }
  o.require(nonzero == 0, "equilibrium-count histogram all zero");
  o.detail << "fields with equilibria: " << nonzero << "/50 (input-free cell, constant 0.3)";
}

void criterion9(Outcome& o) {
  std::size_t compared = 0;
  for (const auto& name : scenario_names()) {
    const bool same = scenario_to_json(run_scenario(name)) == scenario_to_json(run_scenario(name));
    o.require(same, "scenario " + name + " reproducible");
    ++compared;
  }
  for (const char* graph : {"builtin:fig1", "builtin:cycle3-self"}) {
    ExperimentConfig c;
    c.graph = graph;
    c.trials = 20;
    c.threads = 1;
    const Json a = report_to_json(run_genericity(c), false);
    c.threads = 2;
    const Json b = report_to_json(run_genericity(c), false);
    o.require(a == b, std::string("experiment on ") + graph + " reproducible");
    ++compared;
  }
  o.detail << compared << " report pairs compared byte for byte (runtime metadata excluded)";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"1 Figure 1 structure", criterion1},
      {"2 two-cell counter-example equilibria", criterion2},
      {"3 non-hyperbolic spectrum", criterion3},
      {"4 integrator order and flow property", criterion4},
      {"5 feedforward periodicity", criterion5},
      {"6 contracting network stabilisation", criterion6},
      {"7 genericity suite", criterion7},
      {"8 no equilibria with an input-free cell", criterion8},
      {"9 determinism", criterion9},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
