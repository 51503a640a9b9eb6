#include "ccn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "ccn/errors.hpp"

namespace ccn {

namespace {

std::uint64_t scramble(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kInitialConditionStream = 0x1c0ffee5eed5ULL;

EquilibriumOptions equilibrium_options(const ExperimentConfig& c) {
  EquilibriumOptions o;
  o.grid_per_dim = c.grid_per_dim;
  o.newton_tol = c.tolerances.newton_tol;
  o.max_iter = c.max_newton_iter;
  o.dedup_radius = c.tolerances.dedup_radius;
  o.simplicity_tol = c.tolerances.simplicity;
  o.hyperbolicity_tol = c.tolerances.hyperbolicity;
  return o;
}

std::vector<CellIndex> selected_obs_cells(const ExperimentConfig& c, const CellGraph& g) {
  const CellSet obs = observation_cells(g);
  if (c.obs_cells.empty()) return {obs.members().begin(), obs.members().end()};
  std::vector<CellIndex> out;
  for (CellIndex i : c.obs_cells) {
    if (!obs.contains(i)) throw DomainError("cell " + std::to_string(i + 1) + " is not an observation cell");
    out.push_back(i);
  }
  return out;
}

Point random_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = u(rng);
  return x;
}

void add_stats(EquilibriumStats& s, std::size_t count, std::size_t simple, std::size_t hyperbolic, double min_sv) {
  ++s.count_histogram[count];
  if (count > 0) s.min_singular_value = s.total == 0 ? min_sv : std::min(s.min_singular_value, min_sv);
  s.total += count;
  s.simple += simple;
  s.hyperbolic += hyperbolic;
}

Json stats_to_json(const EquilibriumStats& s) {
  Json hist = Json::object();
  for (const auto& [count, trials] : s.count_histogram) hist[std::to_string(count)] = trials;
  return {{"count_histogram", hist},
          {"total", s.total},
          {"simple", s.simple},
          {"hyperbolic", s.hyperbolic},
          {"fraction_simple", s.fraction_simple()},
          {"fraction_hyperbolic", s.fraction_hyperbolic()},
          // Undefined until some equilibrium is seen.
          {"min_singular_value", s.total == 0 ? Json(nullptr) : Json(s.min_singular_value)}};
}

struct TrajectoryCheck {
  Point x0;
  double horizon = 0.0;
};

void check_constant_propagation(const TrigPolyField& f, const ExperimentConfig& config,
                                const std::vector<TrajectoryCheck>& starts,
                                const std::vector<EquilibriumReport>& known, ClaimOutcome& out) {
  const EquilibriumOptions eo = equilibrium_options(config);
  const double tol = config.tolerances.constancy;
  for (const TrajectoryCheck& start : starts) {
    const Trajectory traj = integrate(f, start.x0, start.horizon, config.h);
    const TimeWindow window{0.0, traj.end_time() / 2.0};
    for (CellIndex i = 0; i < f.graph().size(); ++i) {
      if (!is_constant_on(traj, i, window, tol)) continue;
      out.premise_met = true;
      const Verdict v = verify_constant_propagation(f, traj, i, window, tol, eo, &known);
      if (!v.holds && out.holds) {
        out.holds = false;
        out.witness = {{"cell", i + 1}, {"x0", point_to_json(start.x0)}, {"horizon", start.horizon},
                       {"verdict", verdict_to_json(v)}};
      }
    }
  }
}

}  // namespace

std::string to_string(GenericClaim c) {
  switch (c) {
    case GenericClaim::simplicity: return "simplicity";
    case GenericClaim::hyperbolicity: return "hyperbolicity";
    case GenericClaim::no_equilibria: return "no_equilibria";
    case GenericClaim::equilibrium_inverse: return "equilibrium_inverse";
    case GenericClaim::constant_propagation: return "constant_propagation";
    case GenericClaim::trajectory_inverse: return "trajectory_inverse";
  }
  return "unknown";
}

std::vector<GenericClaim> all_generic_claims() {
  return {GenericClaim::simplicity,          GenericClaim::hyperbolicity,        GenericClaim::no_equilibria,
          GenericClaim::equilibrium_inverse, GenericClaim::constant_propagation, GenericClaim::trajectory_inverse};
}

std::optional<GenericClaim> parse_generic_claim(std::string_view name) {
  for (GenericClaim c : all_generic_claims())
    if (to_string(c) == name) return c;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  const ToleranceBundle& t = tolerances;
  for (double v : {t.newton_tol, t.dedup_radius, t.simplicity, t.hyperbolicity, t.eps, t.delta, t.periodicity,
                   t.constancy}) {
    if (!(v > 0.0)) throw DomainError("every tolerance must be positive");
  }
  if (trials < 1) throw DomainError("at least one trial is required");
  if (degree < 1) throw DomainError("degree must be at least 1");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(h > 0.0) || !(t_end >= 2.0 * h)) throw DomainError("need h > 0 and t_end >= 2 h");
  if (grid_per_dim < 2) throw DomainError("grid_per_dim must be at least 2");
}

Json config_to_json(const ExperimentConfig& c) {
  Json claims = Json::array();
  for (GenericClaim cl : c.claims) claims.push_back(to_string(cl));
  Json obs = Json::array();
  for (CellIndex i : c.obs_cells) obs.push_back(i + 1);
  const ToleranceBundle& t = c.tolerances;
  return {{"graph", c.graph},
          {"degree", c.degree},
          {"sigma", c.sigma},
          {"trials", c.trials},
          {"seed", c.seed},
          {"h", c.h},
          {"t_end", c.t_end},
          {"grid_per_dim", c.grid_per_dim},
          {"max_newton_iter", c.max_newton_iter},
          {"initial_conditions", c.initial_conditions},
          {"tolerances",
           {{"newton_tol", t.newton_tol},
            {"dedup_radius", t.dedup_radius},
            {"simplicity", t.simplicity},
            {"hyperbolicity", t.hyperbolicity},
            {"eps", t.eps},
            {"delta", t.delta},
            {"periodicity", t.periodicity},
            {"constancy", t.constancy}}},
          {"claims", claims},
          {"obs_cells", obs},
          {"inject_counterexample", c.inject_counterexample}};
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    c.graph = j.value("graph", c.graph);
    c.degree = j.value("degree", c.degree);
    c.sigma = j.value("sigma", c.sigma);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.h = j.value("h", c.h);
    c.t_end = j.value("t_end", c.t_end);
    c.grid_per_dim = j.value("grid_per_dim", c.grid_per_dim);
    c.max_newton_iter = j.value("max_newton_iter", c.max_newton_iter);
    c.initial_conditions = j.value("initial_conditions", c.initial_conditions);
    c.inject_counterexample = j.value("inject_counterexample", c.inject_counterexample);
    c.threads = j.value("threads", c.threads);
    if (j.contains("tolerances")) {
      const Json& t = j.at("tolerances");
      ToleranceBundle& b = c.tolerances;
      b.newton_tol = t.value("newton_tol", b.newton_tol);
      b.dedup_radius = t.value("dedup_radius", b.dedup_radius);
      b.simplicity = t.value("simplicity", b.simplicity);
      b.hyperbolicity = t.value("hyperbolicity", b.hyperbolicity);
      b.eps = t.value("eps", b.eps);
      b.delta = t.value("delta", b.delta);
      b.periodicity = t.value("periodicity", b.periodicity);
      b.constancy = t.value("constancy", b.constancy);
    }
    if (j.contains("claims")) {
      c.claims.clear();
      for (const Json& name : j.at("claims")) {
        const auto claim = parse_generic_claim(name.get<std::string>());
        if (!claim) throw DomainError("unknown claim '" + name.get<std::string>() + "'");
        c.claims.push_back(*claim);
      }
    }
    if (j.contains("obs_cells")) {
      for (const Json& id : j.at("obs_cells")) {
        const auto v = id.get<long long>();
        if (v < 1) throw DomainError("obs_cells are 1-based");
        c.obs_cells.push_back(static_cast<CellIndex>(v - 1));
      }
    }
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t trial) { return c.seed + trial; }

TrialOutcome run_trial(const ExperimentConfig& config, const CellGraph& g, std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  out.seed = trial_seed(config, trial);
  try {
    const TrigPolyField f = (trial == 0 && config.inject_counterexample)
                                ? embed_field(counterexample_two_cell(), g)
                                : sample_random(g, config.degree, config.sigma, out.seed);
    const EquilibriumOptions eo = equilibrium_options(config);
    const std::vector<EquilibriumReport> eqs = find_equilibria(f, eo).equilibria;
    out.equilibria = eqs.size();
    out.min_singular_value = eqs.empty() ? 0.0 : eqs.front().min_singular_value;
    for (const auto& e : eqs) {
      out.simple += e.simple ? 1 : 0;
      out.hyperbolic += e.hyperbolic ? 1 : 0;
      out.min_singular_value = std::min(out.min_singular_value, e.min_singular_value);
    }

    std::mt19937_64 rng(scramble(out.seed ^ kInitialConditionStream));
    const double lipschitz = std::max(lipschitz_estimate(f), 1e-3);
    // Starting on an equilibrium, rounding errors grow at most like
    // exp(L t); stop before they can reach the constancy tolerance.
    const double equilibrium_horizon = std::clamp(5.0 / lipschitz, 4.0 * config.h, config.t_end);
    std::vector<TrajectoryCheck> starts;
    for (std::size_t k = 0; k < config.initial_conditions; ++k) {
      starts.push_back({random_point(rng, g.total_dimension()), config.t_end});
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(eqs.size(), 2); ++k) {
      starts.push_back({eqs[k].point, equilibrium_horizon});
    }

    // Proper independent sub-networks: their restricted fields have
    // equilibria even when the whole network generically has none.
    std::optional<EquilibriumReport> non_simple;
    std::optional<CellSet> non_simple_set;
    if (g.size() <= kDefaultEnumerationLimit) {
      for (const auto& sub : independent_subnetworks(g)) {
        if (sub.cells.empty() || sub.cells.size() == g.size()) continue;
        const TrigPolyField fs = restrict_field(f, sub.cells);
        const auto sub_eqs = find_equilibria(fs, eo).equilibria;
        out.subnetwork_equilibria += sub_eqs.size();
        for (const auto& e : sub_eqs) {
          if (e.simple) {
            ++out.subnetwork_simple;
          } else if (!non_simple) {
            non_simple = e;
            non_simple_set = sub.cells;
          }
          Point x0 = random_point(rng, g.total_dimension());
          Eigen::Index pos = 0;
          for (CellIndex i : sub.cells.members()) {
            const auto d = static_cast<Eigen::Index>(g.dim(i));
            x0.segment(static_cast<Eigen::Index>(g.offset(i)), d) = e.point.segment(pos, d);
            pos += d;
          }
          starts.push_back({x0, equilibrium_horizon});
        }
      }
    }

    for (GenericClaim claim : config.claims) {
      ClaimOutcome c;
      switch (claim) {
        case GenericClaim::simplicity: {
          c.applicable = true;
          c.premise_met = out.equilibria + out.subnetwork_equilibria > 0;
          for (const auto& e : eqs) {
            if (!e.simple && c.holds) {
              c.holds = false;
              c.witness = {{"equilibrium", equilibrium_to_json(e)}, {"subnetwork", nullptr}};
            }
          }
          if (c.holds && non_simple) {
            c.holds = false;
            c.witness = {{"equilibrium", equilibrium_to_json(*non_simple)},
                         {"subnetwork", cell_set_to_json(*non_simple_set)}};
          }
          break;
        }
        case GenericClaim::hyperbolicity: {
          c.applicable = true;
          c.premise_met = !eqs.empty();
          for (const auto& e : eqs) {
            if (!e.hyperbolic && c.holds) {
              c.holds = false;
              c.witness = {{"equilibrium", equilibrium_to_json(e)}};
            }
          }
          break;
        }
        case GenericClaim::no_equilibria: {
          const auto deficit = g.size() <= kDefaultEnumerationLimit ? find_dimension_deficit(g) : std::nullopt;
          c.applicable = deficit.has_value();
          c.premise_met = c.applicable;
          if (c.applicable && !eqs.empty()) {
            c.holds = false;
            c.witness = {{"deficit_cells", cell_set_to_json(deficit->cells)},
                         {"equilibria", eqs.size()},
                         {"first", equilibrium_to_json(eqs.front())}};
          }
          break;
        }
        case GenericClaim::equilibrium_inverse: {
          const auto obs = selected_obs_cells(config, g);
          c.applicable = !obs.empty();
          c.premise_met = c.applicable && eqs.size() >= 2;
          if (!c.premise_met) break;
          for (CellIndex i : obs) {
            const Verdict v = verify_equilibrium_inverse(g, eqs, i, config.tolerances.delta);
            if (!v.holds) {
              c.holds = false;
              c.witness = {{"obs_cell", i + 1}, {"verdict", verdict_to_json(v)}};
              break;
            }
          }
          break;
        }
        case GenericClaim::constant_propagation: {
          c.applicable = true;
          check_constant_propagation(f, config, starts, eqs, c);
          break;
        }
        case GenericClaim::trajectory_inverse: {
          const auto obs = selected_obs_cells(config, g);
          c.applicable = !obs.empty();
          if (!c.applicable) break;
          const Point x0 = random_point(rng, g.total_dimension());
          const Point y0 = random_point(rng, g.total_dimension());
          const Trajectory x = integrate(f, x0, config.t_end, config.h);
          const Trajectory y = integrate(f, y0, config.t_end, config.h);
          for (CellIndex i : obs) {
            const Verdict v = verify_trajectory_inverse(g, x, y, i, {0.0, x.end_time()}, config.tolerances.eps,
                                                        config.tolerances.delta);
            c.premise_met = c.premise_met || v.premise_met;
            if (!v.holds && c.holds) {
              c.holds = false;
              c.witness = {{"obs_cell", i + 1}, {"x0", point_to_json(x0)}, {"y0", point_to_json(y0)},
                           {"verdict", verdict_to_json(v)}};
            }
          }
          break;
        }
      }
      out.claims[claim] = std::move(c);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

bool GenericityReport::passed() const { return errors.empty() && expected_violations() == 0; }

std::size_t GenericityReport::expected_violations() const {
  std::size_t n = 0;
  for (const auto& [claim, counter] : claims)
    if (counter.expected) n += counter.violations.size();
  return n;
}

GenericityReport run_genericity(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const CellGraph g = load_graph(config.graph);
  if (config.inject_counterexample) {
    // Fails early when the counter-example is not admissible on g.
    (void)embed_field(counterexample_two_cell(), g);
  }
  (void)selected_obs_cells(config, g);

  GenericityReport report;
  report.config = config;
  {
    Json summary;
    summary["n_cells"] = g.size();
    summary["observation_cells"] = cell_set_to_json(observation_cells(g));
    summary["self_dependent"] = is_self_dependent(g);
    summary["strongly_connected"] = is_strongly_connected(g);
    if (g.size() <= kDefaultEnumerationLimit) {
      summary["dimensional_class"] = to_string(dimensional_classification(g).kind);
      const auto deficit = find_dimension_deficit(g);
      summary["dimension_deficit"] = deficit ? cell_set_to_json(deficit->cells) : Json(nullptr);
    }
    report.graph_summary = summary;
  }

  std::vector<TrialOutcome> outcomes(config.trials);
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.trials);
  report.threads_used = threads;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) outcomes[t] = run_trial(config, g, t);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  for (GenericClaim claim : config.claims) {
    ClaimCounter counter;
    switch (claim) {
      case GenericClaim::hyperbolicity: counter.expected = is_self_dependent(g); break;
      case GenericClaim::equilibrium_inverse: counter.expected = equilibrium_inverse_expected(g); break;
      default: counter.expected = true; break;
    }
    report.claims[claim] = counter;
  }
  for (const TrialOutcome& t : outcomes) {
    if (!t.error.empty()) {
      report.errors.emplace_back(t.trial, t.error);
      continue;
    }
    add_stats(report.equilibria, t.equilibria, t.simple, t.hyperbolic, t.min_singular_value);
    ++report.subnetwork_equilibria.count_histogram[t.subnetwork_equilibria];
    report.subnetwork_equilibria.total += t.subnetwork_equilibria;
    report.subnetwork_equilibria.simple += t.subnetwork_simple;
    for (const auto& [claim, c] : t.claims) {
      if (!c.applicable) continue;
      ClaimCounter& counter = report.claims[claim];
      ++counter.trials;
      if (!c.premise_met) continue;
      ++counter.premise_met;
      if (c.holds) {
        ++counter.holds;
      } else {
        counter.violations.push_back({t.trial, t.seed, c.witness});
      }
    }
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

Json report_to_json(const GenericityReport& r, bool include_runtime) {
  Json claims = Json::object();
  for (const auto& [claim, c] : r.claims) {
    Json violations = Json::array();
    for (const Violation& v : c.violations) {
      violations.push_back({{"trial", v.trial}, {"seed", v.seed}, {"witness", v.witness}});
    }
    claims[to_string(claim)] = {{"expected", c.expected},   {"trials", c.trials},
                                {"premise_met", c.premise_met}, {"holds", c.holds},
                                {"violations", violations}};
  }
  Json errors = Json::array();
  for (const auto& [trial, message] : r.errors) {
    errors.push_back({{"trial", trial}, {"seed", trial_seed(r.config, trial)}, {"message", message}});
  }
  Json sub = stats_to_json(r.subnetwork_equilibria);
  sub.erase("hyperbolic");
  sub.erase("fraction_hyperbolic");
  sub.erase("min_singular_value");
  Json out = {{"tool", kToolVersion},
              {"config", config_to_json(r.config)},
              {"field_family", "trigonometric polynomials, N(0, (sigma/(1+|k|)^2)^2) coefficients; "
                               "frequencies are relative to this family"},
              {"graph", r.graph_summary},
              {"claims", claims},
              {"equilibria", stats_to_json(r.equilibria)},
              {"subnetwork_equilibria", sub},
              {"errors", errors},
              {"expected_violations", r.expected_violations()},
              {"passed", r.passed()}};
  if (include_runtime) {
    out["runtime"] = {{"elapsed_seconds", r.elapsed_seconds}, {"threads", r.threads_used}};
  }
  return out;
}

}  // namespace ccn
