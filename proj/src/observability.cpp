#include "ccn/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ccn/errors.hpp"

namespace ccn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string cell_name(CellIndex i) { return "cell " + std::to_string(i + 1); }

void require_observation_cell(const CellGraph& g, CellIndex obs) {
  g.check_index(obs);
  if (!observation_cells(g).contains(obs)) {
    throw DomainError(cell_name(obs) + " is not an observation cell");
  }
}

struct Extremum {
  double value = 0.0;
  std::size_t at = 0;
};

// sup_k gap(i, k, k + shift) over [range.first, range.last - shift]; stops
// early once the running maximum reaches `stop_at`.
Extremum shifted_gap(const Trajectory& traj, CellIndex i, std::size_t shift, SampleRange range,
                     double stop_at = std::numeric_limits<double>::infinity()) {
  Extremum out;
  if (range.last < range.first + shift) throw DomainError("sample range shorter than the shift");
  for (std::size_t k = range.first; k + shift <= range.last; ++k) {
    const double d = traj.cell_gap(i, k, k + shift);
    if (k == range.first || d > out.value) out = {d, k};
    if (out.value >= stop_at) break;
  }
  return out;
}

// sup_k gap(i, k, ref) over [range.first, range.last].
Extremum deviation_from(const Trajectory& traj, CellIndex i, std::size_t ref, SampleRange range) {
  Extremum out{0.0, ref};
  for (std::size_t k = range.first; k <= range.last; ++k) {
    const double d = traj.cell_gap(i, k, ref);
    if (d > out.value) out = {d, k};
  }
  return out;
}

SampleRange full_range(const Trajectory& traj) { return {0, traj.size() - 1}; }

bool strict_graph(const CellGraph& g, std::string* reason) {
  if (is_self_dependent(g)) {
    *reason = "self-dependent graph";
    return true;
  }
  if (g.size() <= kDefaultEnumerationLimit &&
      dimensional_classification(g).kind == DimensionalClass::decreasing) {
    *reason = "dimensionally decreasing graph";
    return true;
  }
  return false;
}

CellSet with_self(const CellGraph& g, CellIndex i) {
  const CellSet reach = indirect_inputs(g, i);
  std::vector<CellIndex> members(reach.members().begin(), reach.members().end());
  members.push_back(i);
  return g.make_set(std::move(members));
}

}  // namespace

std::string to_string(Claim c) {
  switch (c) {
    case Claim::trajectory_inverse: return "trajectory_inverse";
    case Claim::constant_propagation: return "constant_propagation";
    case Claim::periodic_propagation: return "periodic_propagation";
    case Claim::exact_period_propagation: return "exact_period_propagation";
    case Claim::stabilization: return "stabilization";
    case Claim::equilibrium_inverse: return "equilibrium_inverse";
  }
  return "unknown";
}

std::optional<Claim> parse_claim(std::string_view name) {
  for (Claim c : {Claim::trajectory_inverse, Claim::constant_propagation, Claim::periodic_propagation,
                  Claim::exact_period_propagation, Claim::stabilization, Claim::equilibrium_inverse}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void Verdict::violate(Witness w) {
  if (!holds) return;  // keep the first witness
  holds = false;
  witness = std::move(w);
}

SampleRange sample_range(const Trajectory& traj, TimeWindow window) {
  const double h = traj.step();
  if (!(window.end > window.begin)) throw DomainError("empty time window");
  if (window.begin < -1e-9 * h || window.end > traj.end_time() + 1e-9 * h) {
    throw DomainError("time window [" + fmt(window.begin) + ", " + fmt(window.end) + "] leaves the trajectory range [0, " +
                      fmt(traj.end_time()) + "]");
  }
  SampleRange r;
  r.first = static_cast<std::size_t>(std::max(0.0, std::ceil(window.begin / h - 1e-9)));
  r.last = std::min(traj.size() - 1, static_cast<std::size_t>(std::floor(window.end / h + 1e-9)));
  if (r.last <= r.first) throw DomainError("time window contains fewer than two samples");
  return r;
}

ConstancyCheck is_constant_on(const Trajectory& traj, CellIndex i, TimeWindow window, double tol) {
  if (i >= traj.cell_count()) throw DomainError("cell index out of range");
  const SampleRange r = sample_range(traj, window);
  ConstancyCheck check;
  check.reference_sample = r.first;
  const Extremum dev = deviation_from(traj, i, r.first, r);
  check.max_deviation = dev.value;
  check.worst_sample = dev.at;
  check.constant = dev.value < tol;
  check.degenerate_tolerance = tol > 0.5;
  return check;
}

double period_residual(const Trajectory& traj, CellIndex i, std::size_t shift, SampleRange range) {
  return shifted_gap(traj, i, shift, range).value;
}

PeriodDetection detect_period(const Trajectory& traj, CellIndex i, TimeWindow window, double t_max, double tol) {
  if (!(t_max > 0.0)) throw DomainError("maximal period must be positive");
  if (!(window.end - window.begin > t_max)) throw DomainError("window must be longer than the maximal period");
  const SampleRange r = sample_range(traj, window);
  PeriodDetection out;
  if (is_constant_on(traj, i, window, tol).constant) {
    out.constant = true;
    return out;
  }
  const double h = traj.step();
  const auto s_max = std::min(static_cast<std::size_t>(std::floor(t_max / h + 1e-9)), r.last - r.first);
  for (std::size_t s = 1; s <= s_max; ++s) {
    const Extremum e = shifted_gap(traj, i, s, r, tol);
    if (e.value < tol) {
      out.estimate = PeriodEstimate{h * static_cast<double>(s), s, e.value, true};
      return out;
    }
  }
  return out;
}

double tail_diameter(const Trajectory& traj, CellIndex i, double tail_fraction) {
  if (i >= traj.cell_count()) throw DomainError("cell index out of range");
  const std::size_t n = traj.size();
  auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  tail = std::clamp<std::size_t>(tail, std::min<std::size_t>(2, n), n);
  const std::size_t start = n - tail;
  const auto& states = traj.states();
  double diameter = 0.0;
  for (std::size_t c = traj.cell_offsets()[i]; c < traj.cell_offsets()[i + 1]; ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    double pos = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t k = start + 1; k < n; ++k) {
      double step = states(static_cast<Eigen::Index>(k), col) - states(static_cast<Eigen::Index>(k - 1), col);
      step -= std::round(step);
      pos += step;
      lo = std::min(lo, pos);
      hi = std::max(hi, pos);
    }
    diameter = std::max(diameter, std::min(hi - lo, 0.5));
  }
  return diameter;
}

std::optional<Point> detect_stabilization(const Trajectory& traj, CellIndex i, double tail_fraction, double tol) {
  if (!(tail_fraction > 0.0) || tail_fraction > 0.5) throw DomainError("tail fraction must lie in (0, 1/2]");
  if (!(tail_diameter(traj, i, tail_fraction) < tol)) return std::nullopt;
  const std::size_t n = traj.size();
  const std::size_t tail =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))),
                              std::min<std::size_t>(2, n), n);
  const std::size_t begin = traj.cell_offsets()[i];
  const std::size_t dim = traj.cell_offsets()[i + 1] - begin;
  Point mean(static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    double s = 0.0;
    double co = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) {
      const double angle = kTwoPi * traj.states()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(begin + c));
      s += std::sin(angle);
      co += std::cos(angle);
    }
    mean[static_cast<Eigen::Index>(c)] = std::atan2(s, co) / kTwoPi;
  }
  return wrap(mean);
}

double replay_distance(const Trajectory& x, const Trajectory& y, CellIndex cell, std::size_t k) {
  const Point a = x.cell_state(k, cell);
  const Point b = y.cell_state(k, cell);
  double d = 0.0;
  for (Eigen::Index c = 0; c < a.size(); ++c) d = std::max(d, circle_distance(a[c], b[c]));
  return d;
}

Verdict verify_trajectory_inverse(const CellGraph& g, const Trajectory& x, const Trajectory& y, CellIndex obs,
                                  TimeWindow window, double eps, double delta, InverseMode mode) {
  require_observation_cell(g, obs);
  if (x.step() != y.step()) throw DomainError("trajectories use different steps");
  if (x.dimension() != g.total_dimension() || y.dimension() != g.total_dimension()) {
    throw DomainError("trajectory dimension does not match the graph");
  }
  Verdict v;
  v.claim = Claim::trajectory_inverse;
  v.tolerances = {{"eps", eps}, {"delta", delta}, {"h", x.step()}, {"window_begin", window.begin},
                  {"window_end", window.end}};

  const std::size_t n = std::min(x.size(), y.size());
  const SampleRange r = sample_range(x.size() <= y.size() ? x : y, window);
  double premise_gap = 0.0;
  for (std::size_t k = r.first; k <= r.last; ++k) premise_gap = std::max(premise_gap, replay_distance(x, y, obs, k));
  if (!(premise_gap < eps)) {
    v.premise_met = false;
    v.annotations.push_back("premise not met: " + cell_name(obs) + " gap " + fmt(premise_gap) + " >= eps");
    return v;
  }

  std::string reason;
  const bool strict = mode == InverseMode::all_cells || strict_graph(g, &reason);
  if (mode == InverseMode::all_cells) reason = "all cells requested";
  if (strict) v.annotations.push_back("all cells checked (" + reason + ")");

  const SampleRange all{0, n - 1};
  std::vector<CellIndex> exempt;
  std::vector<CellIndex> violating;
  for (CellIndex j = 0; j < g.size(); ++j) {
    Extremum worst;
    for (std::size_t k = all.first; k <= all.last; ++k) {
      const double d = replay_distance(x, y, j, k);
      if (d > worst.value) worst = {d, k};
    }
    if (worst.value < delta) continue;
    if (!strict && deviation_from(x, j, 0, all).value < delta && deviation_from(y, j, 0, all).value < delta) {
      exempt.push_back(j);
      v.annotations.push_back("exempt " + cell_name(j) + ": constant in both trajectories, gap " + fmt(worst.value));
      continue;
    }
    violating.push_back(j);
    Witness w;
    w.cells = {j};
    w.samples = {worst.at};
    w.times = {x.time(worst.at)};
    w.distances = {worst.value};
    w.note = cell_name(j) + " differs although " + cell_name(obs) + " agrees within eps";
    v.violate(std::move(w));
  }
  if (violating.size() > 1) v.annotations.push_back("violating cells: " + g.make_set(violating).to_string());
  return v;
}

Verdict verify_trajectory_inverse(const TrigPolyField& f, const Point& x0, const Point& y0, CellIndex obs,
                                  TimeWindow window, double eps, double delta, double h, InverseMode mode) {
  require_observation_cell(f.graph(), obs);
  const Trajectory x = integrate(f, x0, window.end, h);
  const Trajectory y = integrate(f, y0, window.end, h);
  return verify_trajectory_inverse(f.graph(), x, y, obs, window, eps, delta, mode);
}

Verdict verify_constant_propagation(const TrigPolyField& f, const Trajectory& traj, CellIndex i, TimeWindow window,
                                    double tol, const EquilibriumOptions& eq_options,
                                    const std::vector<EquilibriumReport>* known) {
  const CellGraph& g = f.graph();
  g.check_index(i);
  const ConstancyCheck premise = is_constant_on(traj, i, window, tol);
  if (!premise.constant) {
    throw DomainError("premise fails: " + cell_name(i) + " moves by " + fmt(premise.max_deviation) + " on the window");
  }
  Verdict v;
  v.claim = Claim::constant_propagation;
  v.tolerances = {{"tol", tol}, {"h", traj.step()}, {"window_begin", window.begin}, {"window_end", window.end}};
  if (premise.degenerate_tolerance) v.annotations.push_back("degenerate tolerance: every cell is constant");

  const SampleRange win = sample_range(traj, window);
  const SampleRange all = full_range(traj);
  for (CellIndex j : with_self(g, i).members()) {
    const Extremum on_window = deviation_from(traj, j, win.first, win);
    const Extremum everywhere = deviation_from(traj, j, win.first, all);
    if (!(on_window.value < tol) || !(everywhere.value < tol)) {
      const Extremum& bad = on_window.value < tol ? everywhere : on_window;
      Witness w;
      w.cells = {j};
      w.samples = {win.first, bad.at};
      w.times = {traj.time(win.first), traj.time(bad.at)};
      w.distances = {bad.value};
      w.note = cell_name(j) + (on_window.value < tol ? " is not constant on the whole trajectory"
                                                     : " is not constant on the window");
      v.violate(std::move(w));
    }
  }

  if (observation_cells(g).contains(i)) {
    const Point state = traj.state(win.first);
    bool near = false;
    auto close_to = [&](const std::vector<EquilibriumReport>& eqs) {
      return std::any_of(eqs.begin(), eqs.end(),
                         [&](const EquilibriumReport& e) { return torus_distance(e.point, state).max < tol; });
    };
    if (known != nullptr) near = close_to(*known);
    if (!near) {
      const auto refined = refine_equilibrium(f, state, eq_options);
      near = refined && torus_distance(*refined, state).max < tol;
      if (near) v.annotations.push_back("equilibrium located by Newton refinement from the observed state");
    }
    if (!near) near = close_to(find_equilibria(f, eq_options).equilibria);
    if (!near) {
      Witness w;
      w.cells = {i};
      w.samples = {win.first};
      w.times = {traj.time(win.first)};
      w.points = {state};
      w.distances = {f.evaluate(state).cwiseAbs().maxCoeff()};
      w.note = "observation cell constant but the state is not within tol of an equilibrium (distance = |f(x)|)";
      v.violate(std::move(w));
    }
  }
  return v;
}

Verdict verify_periodic_propagation(const TrigPolyField& f, const Trajectory& traj, CellIndex i, double period,
                                    double tau, TimeWindow window, double tol) {
  const CellGraph& g = f.graph();
  g.check_index(i);
  const double h = traj.step();
  const auto steps = static_cast<std::size_t>(std::llround(period / h));
  if (steps < 1 || std::fabs(static_cast<double>(steps) * h - period) > 1e-9 * std::max(1.0, period)) {
    throw DomainError("period " + fmt(period) + " is not a positive multiple of the step " + fmt(h));
  }
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (window.end - window.begin < period + tau - 0.5 * h) {
    throw DomainError("premise window must span at least T + tau");
  }
  const SampleRange win = sample_range(traj, window);
  const double premise = period_residual(traj, i, steps, win);
  if (!(premise < tol)) {
    throw DomainError("premise fails: " + cell_name(i) + " has T-periodicity residual " + fmt(premise) +
                      " on the window");
  }

  Verdict v;
  v.tolerances = {{"tol", tol},          {"h", h},         {"period", period}, {"tau", tau},
                  {"window_begin", window.begin}, {"window_end", window.end}, {"period_resolution", h}};
  const SampleRange all = full_range(traj);
  const bool degenerate = deviation_from(traj, i, 0, all).value < tol;
  const bool check_minimal = is_strongly_connected(g) && !degenerate;
  v.claim = check_minimal ? Claim::exact_period_propagation : Claim::periodic_propagation;
  if (degenerate) v.annotations.push_back("degenerate: constant");

  for (CellIndex j : with_self(g, i).members()) {
    const Extremum e = shifted_gap(traj, j, steps, all);
    if (!(e.value < tol)) {
      Witness w;
      w.cells = {j};
      w.samples = {e.at, e.at + steps};
      w.times = {traj.time(e.at), traj.time(e.at + steps)};
      w.distances = {e.value};
      w.note = cell_name(j) + " is not T-periodic";
      v.violate(std::move(w));
    }
  }

  if (check_minimal) {
    // A period T' < T - h on any cell contradicts exact T-periodicity.
    for (CellIndex j = 0; j < g.size(); ++j) {
      for (std::size_t s = 1; s + 1 < steps; ++s) {
        const Extremum e = shifted_gap(traj, j, s, all, tol);
        if (e.value < tol) {
          Witness w;
          w.cells = {j};
          w.samples = {s};
          w.times = {h * static_cast<double>(s)};
          w.distances = {e.value};
          w.note = cell_name(j) + " has a shorter period";
          v.violate(std::move(w));
          break;
        }
      }
    }
  }
  return v;
}

Verdict verify_stabilization(const TrigPolyField& f, const Point& x0, CellIndex obs, double t_end, double h,
                             const StabilizationOptions& options) {
  const CellGraph& g = f.graph();
  require_observation_cell(g, obs);
  Verdict v;
  v.claim = Claim::stabilization;
  v.tolerances = {{"h", h},
                  {"t_end", t_end},
                  {"tail_fraction", options.tail_fraction},
                  {"diameter_tol", options.diameter_tol},
                  {"residual_tol", options.residual_tol},
                  {"cluster_radius", options.cluster_radius}};

  const Trajectory traj = integrate(f, x0, t_end, h);
  if (!detect_stabilization(traj, obs, options.tail_fraction, options.diameter_tol)) {
    v.premise_met = false;
    v.annotations.push_back("premise not met: " + cell_name(obs) + " does not stabilise (tail diameter " +
                            fmt(tail_diameter(traj, obs, options.tail_fraction)) + ")");
    return v;
  }

  Point limit(static_cast<Eigen::Index>(g.total_dimension()));
  for (CellIndex j = 0; j < g.size(); ++j) {
    const auto mean = detect_stabilization(traj, j, options.tail_fraction, options.diameter_tol);
    if (!mean) {
      Witness w;
      w.cells = {j};
      w.distances = {tail_diameter(traj, j, options.tail_fraction)};
      w.note = cell_name(j) + " does not stabilise (distance = tail diameter)";
      v.violate(std::move(w));
      return v;
    }
    limit.segment(static_cast<Eigen::Index>(g.offset(j)), static_cast<Eigen::Index>(g.dim(j))) = *mean;
  }

  const double residual = f.evaluate(limit).cwiseAbs().maxCoeff();
  v.tolerances["limit_residual"] = residual;
  if (!(residual < options.residual_tol)) {
    Witness w;
    w.points = {limit};
    w.distances = {residual};
    w.note = "limit point is not an equilibrium (distance = |f(x*)|)";
    v.violate(std::move(w));
  }

  const double burn = t_end * (1.0 - options.tail_fraction);
  const auto clusters = omega_limit_estimate(f, x0, burn, t_end - burn, h, options.cluster_radius);
  const double offset = clusters.empty() ? 0.5 : torus_distance(clusters.front(), limit).max;
  v.tolerances["omega_clusters"] = static_cast<double>(clusters.size());
  v.tolerances["omega_offset"] = offset;
  if (clusters.size() != 1 || !(offset < options.cluster_radius)) {
    Witness w;
    w.points = clusters;
    w.distances = {offset};
    w.note = "omega-limit estimate is not a single cluster at the limit point";
    v.violate(std::move(w));
  }
  v.annotations.push_back("limit point residual " + fmt(residual));
  return v;
}

Verdict verify_equilibrium_inverse(const CellGraph& g, const std::vector<EquilibriumReport>& equilibria,
                                   CellIndex obs, double tol) {
  require_observation_cell(g, obs);
  Verdict v;
  v.claim = Claim::equilibrium_inverse;
  v.tolerances = {{"tol", tol}};
  v.premise_met = equilibria.size() >= 2;
  v.annotations.push_back(std::to_string(equilibria.size()) + " equilibria located");
  v.annotations.push_back(equilibrium_inverse_expected(g) ? "expected to hold generically on this graph"
                                                          : "not expected to hold generically on this graph");
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < equilibria.size(); ++a) {
    for (std::size_t b = a + 1; b < equilibria.size(); ++b) {
      const Point& p = equilibria[a].point;
      const Point& q = equilibria[b].point;
      const double at_obs = cell_distance(g, obs, p, q);
      if (!(at_obs < tol)) continue;
      CellIndex far_cell = obs;
      double far = 0.0;
      for (CellIndex j = 0; j < g.size(); ++j) {
        if (j == obs) continue;
        const double d = cell_distance(g, j, p, q);
        if (d > far) {
          far = d;
          far_cell = j;
        }
      }
      if (far >= tol) {
        ++pairs;
        Witness w;
        w.cells = {obs, far_cell};
        w.points = {p, q};
        w.distances = {at_obs, far};
        w.note = "equilibria agree at " + cell_name(obs) + " but differ at " + cell_name(far_cell);
        v.violate(std::move(w));
      }
    }
  }
  if (pairs > 0) v.annotations.push_back("indistinguishable pairs: " + std::to_string(pairs));
  return v;
}

Verdict verify_equilibrium_inverse(const TrigPolyField& f, CellIndex obs, double tol,
                                   const EquilibriumOptions& eq_options) {
  require_observation_cell(f.graph(), obs);
  return verify_equilibrium_inverse(f.graph(), find_equilibria(f, eq_options).equilibria, obs, tol);
}

bool equilibrium_inverse_expected(const CellGraph& g) {
  if (is_self_dependent(g)) return true;
  if (g.size() > kDefaultEnumerationLimit) return false;
  return dimensional_classification(g).kind == DimensionalClass::decreasing || find_dimension_deficit(g).has_value();
}

}  // namespace ccn
