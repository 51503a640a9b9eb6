// ccn: command line front end for coupled cell network analysis.
//
// Exit codes: 0 success (no violation, no error), 1 violation or failed
// check, 2 usage or input error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ccn/catalog.hpp"
#include "ccn/errors.hpp"
#include "ccn/harness.hpp"

namespace {

using namespace ccn;

struct FieldSource {
  std::string field_path;
  std::string graph = "builtin:fig1";
  int degree = 2;
  double sigma = 1.0;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--field", field_path, "Field JSON (overrides the random field options)");
    app->add_option("--graph", graph, "Graph JSON path or builtin:<name>");
    app->add_option("--degree", degree, "Trigonometric degree of the random field")->check(CLI::PositiveNumber);
    app->add_option("--sigma", sigma, "Coefficient scale of the random field")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Seed of the random field");
  }

  TrigPolyField load() const {
    if (!field_path.empty()) return load_field(field_path);
    return sample_random(load_graph(graph), degree, sigma, seed);
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text << '\n';
  } else {
    write_text_file(out, text + "\n");
  }
}

void emit(const Json& j, const std::string& out) { emit(j.dump(2), out); }

Point point_option(const std::string& text, const TrigPolyField& f, const std::string& what) {
  const Point x = parse_point(text);
  if (static_cast<std::size_t>(x.size()) != f.dimension()) {
    throw DomainError(what + " has " + std::to_string(x.size()) + " coordinates, the field needs " +
                      std::to_string(f.dimension()));
  }
  return x;
}

CellIndex cell_option(long long id, const CellGraph& g) {
  if (id < 1 || static_cast<std::size_t>(id) > g.size()) {
    throw DomainError("cell " + std::to_string(id) + " is not in 1.." + std::to_string(g.size()));
  }
  return static_cast<CellIndex>(id - 1);
}

int run(int argc, char** argv) {
  CLI::App app{"Coupled cell networks on tori: structure, dynamics and observability checks"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  int status = 0;

  // analyze-graph
  {
    auto* cmd = app.add_subcommand("analyze-graph", "Structural report of a graph");
    auto graph = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("graph", *graph, "Graph JSON path or builtin:<name>")->required();
    cmd->add_option("--out", *out, "Write the report here instead of stdout");
    cmd->callback([=] { emit(graph_report(load_graph(*graph)), *out); });
  }

  // sample-field
  {
    auto* cmd = app.add_subcommand("sample-field", "Draw a random admissible field");
    auto src = std::make_shared<FieldSource>();
    auto out = std::make_shared<std::string>();
    src->attach(cmd);
    cmd->add_option("--out", *out, "Write the field here instead of stdout");
    cmd->callback([=] { emit(field_to_json(src->load()), *out); });
  }

  // simulate
  {
    auto* cmd = app.add_subcommand("simulate", "Integrate a trajectory and write it as CSV");
    auto src = std::make_shared<FieldSource>();
    auto x0 = std::make_shared<std::string>();
    auto t_end = std::make_shared<double>(4.0);
    auto h = std::make_shared<double>(0.01);
    auto out = std::make_shared<std::string>();
    src->attach(cmd);
    cmd->add_option("--x0", *x0, "Initial state, comma separated")->required();
    cmd->add_option("--t-end", *t_end, "Final time");
    cmd->add_option("--step", *h, "RK4 step")->check(CLI::PositiveNumber);
    cmd->add_option("--out", *out, "CSV path; stdout by default");
    cmd->callback([=] {
      const TrigPolyField f = src->load();
      const Trajectory traj = integrate(f, point_option(*x0, f, "--x0"), *t_end, *h);
      std::ostringstream csv;
      write_trajectory_csv(traj, csv);
      std::string text = csv.str();
      if (!text.empty() && text.back() == '\n') text.pop_back();
      emit(text, *out);
    });
  }

  // find-equilibria
  {
    auto* cmd = app.add_subcommand("find-equilibria", "Newton search for equilibria from a grid");
    auto src = std::make_shared<FieldSource>();
    auto opts = std::make_shared<EquilibriumOptions>();
    auto out = std::make_shared<std::string>();
    src->attach(cmd);
    cmd->add_option("--grid", opts->grid_per_dim, "Seeds per coordinate")->check(CLI::Range(2, 1000));
    cmd->add_option("--newton-tol", opts->newton_tol, "Residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", opts->max_iter, "Newton iterations per seed");
    cmd->add_option("--out", *out, "Write the report here instead of stdout");
    cmd->callback([=] {
      const TrigPolyField f = src->load();
      const EquilibriumSearch s = find_equilibria(f, *opts);
      emit(Json{{"tool", kToolVersion},
                {"field", f.fingerprint()},
                {"seeds", s.seeds},
                {"converged", s.converged},
                {"singular", s.singular},
                {"not_converged", s.not_converged},
                {"equilibria", equilibria_to_json(s.equilibria)}},
           *out);
    });
  }

  // check-observability
  {
    auto* cmd = app.add_subcommand("check-observability", "Run one observability verifier");
    auto src = std::make_shared<FieldSource>();
    auto claim = std::make_shared<std::string>();
    auto cell = std::make_shared<long long>(1);
    auto x0 = std::make_shared<std::string>();
    auto y0 = std::make_shared<std::string>();
    auto t_end = std::make_shared<double>(4.0);
    auto h = std::make_shared<double>(0.01);
    auto begin = std::make_shared<double>(0.0);
    auto end = std::make_shared<double>(-1.0);
    auto eps = std::make_shared<double>(1e-7);
    auto delta = std::make_shared<double>(1e-5);
    auto tol = std::make_shared<double>(1e-6);
    auto period = std::make_shared<double>(1.0);
    auto tau = std::make_shared<double>(0.0);
    auto all_cells = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    src->attach(cmd);
    cmd->add_option("claim", *claim,
                    "trajectory_inverse | constant_propagation | periodic_propagation | stabilization | "
                    "equilibrium_inverse")
        ->required();
    cmd->add_option("--cell", *cell, "Observed cell (1-based)");
    cmd->add_option("--x0", *x0, "Initial state");
    cmd->add_option("--y0", *y0, "Second initial state (trajectory_inverse)");
    cmd->add_option("--t-end", *t_end, "Integration horizon");
    cmd->add_option("--step", *h, "RK4 step")->check(CLI::PositiveNumber);
    cmd->add_option("--window-begin", *begin, "Observation window start");
    cmd->add_option("--window-end", *end, "Observation window end (default: t-end)");
    cmd->add_option("--eps", *eps, "Premise tolerance (trajectory_inverse)")->check(CLI::PositiveNumber);
    cmd->add_option("--delta", *delta, "Conclusion tolerance (trajectory_inverse)")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", *tol, "Tolerance of the other verifiers")->check(CLI::PositiveNumber);
    cmd->add_option("--period", *period, "Period T (periodic_propagation)")->check(CLI::PositiveNumber);
    cmd->add_option("--tau", *tau, "Extra window length tau (periodic_propagation)");
    cmd->add_flag("--all-cells", *all_cells, "Do not exempt cells constant in both trajectories");
    cmd->add_option("--out", *out, "Write the verdict here instead of stdout");
    cmd->callback([=, &status] {
      const TrigPolyField f = src->load();
      const CellIndex i = cell_option(*cell, f.graph());
      const auto parsed = parse_claim(*claim);
      if (!parsed) throw DomainError("unknown claim '" + *claim + "'");
      const TimeWindow window{*begin, *end < 0 ? *t_end : *end};
      auto need_x0 = [&] {
        if (x0->empty()) throw DomainError("--x0 is required for " + *claim);
        return point_option(*x0, f, "--x0");
      };
      Verdict v;
      switch (*parsed) {
        case Claim::trajectory_inverse: {
          if (y0->empty()) throw DomainError("--y0 is required for trajectory_inverse");
          v = verify_trajectory_inverse(f, need_x0(), point_option(*y0, f, "--y0"), i, window, *eps, *delta, *h,
                                        *all_cells ? InverseMode::all_cells : InverseMode::automatic);
          break;
        }
        case Claim::constant_propagation:
          v = verify_constant_propagation(f, integrate(f, need_x0(), *t_end, *h), i, window, *tol);
          break;
        case Claim::periodic_propagation:
        case Claim::exact_period_propagation:
          v = verify_periodic_propagation(f, integrate(f, need_x0(), *t_end, *h), i, *period, *tau, window, *tol);
          break;
        case Claim::stabilization: {
          StabilizationOptions so;
          so.diameter_tol = *tol;
          so.residual_tol = *tol;
          v = verify_stabilization(f, need_x0(), i, *t_end, *h, so);
          break;
        }
        case Claim::equilibrium_inverse:
          v = verify_equilibrium_inverse(f, i, *delta);
          break;
      }
      emit(verdict_to_json(v), *out);
      if (!v.holds) status = 1;
    });
  }

  // run-counterexamples
  {
    auto* cmd = app.add_subcommand("run-counterexamples",
                                   "Reproduce the two-cell sine counter-examples (exit 0 iff reproduced)");
    auto out = std::make_shared<std::string>();
    auto artifacts = std::make_shared<std::string>();
    cmd->add_option("--out", *out, "Write the report here instead of stdout");
    cmd->add_option("--artifacts", *artifacts, "Directory for CSV/JSON artifacts");
    cmd->callback([=, &status] {
      Json report = Json::array();
      for (const char* name : {"ce-eq-inverse", "ce-eq-spectrum"}) {
        const ScenarioResult r = run_scenario(name, *artifacts);
        report.push_back(scenario_to_json(r));
        if (!r.passed()) status = 1;
      }
      emit(report, *out);
    });
  }

  // genericity
  {
    auto* cmd = app.add_subcommand("genericity", "Monte Carlo genericity experiment");
    auto config_path = std::make_shared<std::string>();
    auto cfg = std::make_shared<ExperimentConfig>();
    auto claims = std::make_shared<std::vector<std::string>>();
    auto obs = std::make_shared<std::vector<long long>>();
    auto out = std::make_shared<std::string>();
    auto no_runtime = std::make_shared<bool>(false);
    cmd->add_option("--config", *config_path, "Experiment config JSON; other options override it");
    cmd->add_option("--graph", cfg->graph, "Graph JSON path or builtin:<name>");
    cmd->add_option("--degree", cfg->degree, "Trigonometric degree");
    cmd->add_option("--sigma", cfg->sigma, "Coefficient scale");
    cmd->add_option("--trials", cfg->trials, "Number of trials");
    cmd->add_option("--seed", cfg->seed, "Base seed; trial t uses seed + t");
    cmd->add_option("--step", cfg->h, "RK4 step");
    cmd->add_option("--t-end", cfg->t_end, "Trajectory horizon");
    cmd->add_option("--grid", cfg->grid_per_dim, "Newton seeds per coordinate");
    cmd->add_option("--claims", *claims, "Claims to test (default: all)");
    cmd->add_option("--obs-cells", *obs, "Observation cells to test (1-based; default: all)");
    cmd->add_flag("--inject-counterexample", cfg->inject_counterexample,
                  "Trial 0 uses the two-cell sine counter-example");
    cmd->add_option("--threads", cfg->threads, "Worker threads (0: hardware concurrency)");
    cmd->add_flag("--no-runtime", *no_runtime, "Omit runtime metadata from the report");
    cmd->add_option("--out", *out, "Write the report here instead of stdout");
    cmd->callback([=, &status] {
      ExperimentConfig config = *cfg;
      if (!config_path->empty()) {
        config = config_from_json(read_json_file(*config_path));
        // Explicit flags win over the file.
        for (const auto* opt : cmd->get_options()) {
          if (opt->count() == 0) continue;
          const std::string& n = opt->get_name();
          if (n == "--graph") config.graph = cfg->graph;
          if (n == "--degree") config.degree = cfg->degree;
          if (n == "--sigma") config.sigma = cfg->sigma;
          if (n == "--trials") config.trials = cfg->trials;
          if (n == "--seed") config.seed = cfg->seed;
          if (n == "--step") config.h = cfg->h;
          if (n == "--t-end") config.t_end = cfg->t_end;
          if (n == "--grid") config.grid_per_dim = cfg->grid_per_dim;
          if (n == "--inject-counterexample") config.inject_counterexample = cfg->inject_counterexample;
          if (n == "--threads") config.threads = cfg->threads;
        }
      }
      if (!claims->empty()) {
        config.claims.clear();
        for (const auto& name : *claims) {
          const auto c = parse_generic_claim(name);
          if (!c) throw DomainError("unknown claim '" + name + "'");
          config.claims.push_back(*c);
        }
      }
      if (!obs->empty()) {
        config.obs_cells.clear();
        for (long long id : *obs) {
          if (id < 1) throw DomainError("--obs-cells are 1-based");
          config.obs_cells.push_back(static_cast<CellIndex>(id - 1));
        }
      }
      const GenericityReport r = run_genericity(config);
      emit(report_to_json(r, !*no_runtime), *out);
      for (const auto& [claim, counter] : r.claims) {
        for (const Violation& v : counter.violations) {
          std::cerr << "violation: " << to_string(claim) << " trial " << v.trial << " seed " << v.seed << '\n';
        }
      }
      bool any = !r.errors.empty();
      for (const auto& [claim, counter] : r.claims) any = any || !counter.violations.empty();
      if (any) status = 1;
    });
  }

  // scenario
  {
    auto* cmd = app.add_subcommand("scenario", "Run a curated reproduction");
    auto name = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto artifacts = std::make_shared<std::string>();
    auto list = std::make_shared<bool>(false);
    cmd->add_option("name", *name, "Scenario id");
    cmd->add_flag("--list", *list, "List scenario ids");
    cmd->add_option("--out", *out, "Write the report here instead of stdout");
    cmd->add_option("--artifacts", *artifacts, "Directory for CSV/JSON artifacts");
    cmd->callback([=, &status] {
      if (*list) {
        for (const auto& n : scenario_names()) std::cout << n << '\n';
        return;
      }
      if (name->empty()) throw DomainError("a scenario id is required; see --list");
      const ScenarioResult r = run_scenario(*name, *artifacts);
      emit(scenario_to_json(r), *out);
      if (!r.passed()) status = 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
