#pragma once

// Monte Carlo genericity experiments and curated reproductions.
//
// A genericity experiment samples random admissible fields on one graph and
// counts, per claim, how often the claim's premise is met and how often it
// holds. Frequencies are relative to the sampled trigonometric family; they
// are evidence, never a proof of genericity.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccn/observability.hpp"
#include "ccn/serialization.hpp"

namespace ccn {

inline constexpr const char* kToolVersion = "ccn 1.0.0";

struct ToleranceBundle {
  double newton_tol = 1e-10;
  double dedup_radius = 1e-6;
  double simplicity = 1e-6;
  double hyperbolicity = 1e-6;
  double eps = 1e-7;
  double delta = 1e-5;
  double periodicity = 1e-4;
  double constancy = 1e-6;
};

enum class GenericClaim {
  simplicity,             // every equilibrium is simple
  hyperbolicity,          // every equilibrium is hyperbolic
  no_equilibria,          // none at all when some cell set has d_J < d_I
  equilibrium_inverse,    // equilibria separated by each observation cell
  constant_propagation,   // a constant cell freezes its indirect inputs
  trajectory_inverse,     // observation cell agreement forces agreement
};

std::string to_string(GenericClaim c);
std::optional<GenericClaim> parse_generic_claim(std::string_view name);
std::vector<GenericClaim> all_generic_claims();

struct ExperimentConfig {
  std::string graph = "builtin:fig1";  // JSON path or builtin:<name>
  int degree = 2;
  double sigma = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double h = 0.01;
  double t_end = 4.0;
  std::size_t grid_per_dim = 8;
  std::size_t max_newton_iter = 50;
  std::size_t initial_conditions = 2;
  ToleranceBundle tolerances;
  std::vector<GenericClaim> claims = all_generic_claims();
  /// Observation cells (0-based) checked by equilibrium_inverse and
  /// trajectory_inverse; empty means all of them.
  std::vector<CellIndex> obs_cells;
  /// Trial 0 uses the two-cell sine counter-example embedded into the graph.
  bool inject_counterexample = false;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  /// Throws DomainError on non-positive tolerances, zero trials or an
  /// unknown claim.
  void validate() const;
};

Json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

/// Seed of trial t: seed + t. Fields and initial conditions are drawn from
/// separate splitmix-scrambled streams of it.
std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t trial);

struct ClaimOutcome {
  bool applicable = false;
  bool premise_met = false;
  bool holds = true;
  Json witness;  // null unless violated
};

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t equilibria = 0;
  std::size_t simple = 0;
  std::size_t hyperbolic = 0;
  double min_singular_value = 0.0;  // over all equilibria of the trial; 0 if none
  std::size_t subnetwork_equilibria = 0;
  std::size_t subnetwork_simple = 0;
  std::map<GenericClaim, ClaimOutcome> claims;
  std::string error;
};

/// One trial of an experiment, reproducible in isolation from its index.
TrialOutcome run_trial(const ExperimentConfig& config, const CellGraph& g, std::size_t trial);

struct Violation {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Json witness;
};

struct ClaimCounter {
  bool expected = true;  // the claim is predicted generic on this graph
  std::size_t trials = 0;
  std::size_t premise_met = 0;
  std::size_t holds = 0;
  std::vector<Violation> violations;  // ordered by trial
};

struct EquilibriumStats {
  std::map<std::size_t, std::size_t> count_histogram;  // equilibria -> trials
  std::size_t total = 0;
  std::size_t simple = 0;
  std::size_t hyperbolic = 0;
  double min_singular_value = 0.0;  // smallest seen; 0 when none found

  double fraction_simple() const { return total ? double(simple) / double(total) : 1.0; }
  double fraction_hyperbolic() const { return total ? double(hyperbolic) / double(total) : 1.0; }
};

struct GenericityReport {
  ExperimentConfig config;
  Json graph_summary;
  std::map<GenericClaim, ClaimCounter> claims;
  EquilibriumStats equilibria;
  /// Equilibria of the proper independent sub-networks (restricted fields).
  EquilibriumStats subnetwork_equilibria;
  std::vector<std::pair<std::size_t, std::string>> errors;
  double elapsed_seconds = 0.0;
  std::size_t threads_used = 1;

  /// No errors and no violation of an expected claim.
  bool passed() const;
  std::size_t expected_violations() const;
};

/// Runs every trial (concurrently when threads allow) and aggregates in
/// trial order, so the report does not depend on scheduling.
GenericityReport run_genericity(const ExperimentConfig& config);

/// Report as JSON; the "runtime" member is the only part that varies
/// between identical runs and is omitted when include_runtime is false.
Json report_to_json(const GenericityReport& r, bool include_runtime = true);

struct ScenarioCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::string name;
  std::vector<ScenarioCheck> checks;
  std::vector<Verdict> verdicts;
  Json details;
  std::vector<std::string> artifacts;

  bool passed() const;
};

std::vector<std::string> scenario_names();

/// Runs a curated reproduction with pinned parameters. Artifacts (CSV/JSON)
/// are written below `artifact_dir` when it is non-empty. Throws
/// DomainError listing the known scenarios on an unknown name.
ScenarioResult run_scenario(const std::string& name, const std::string& artifact_dir = "");

Json scenario_to_json(const ScenarioResult& r);

}  // namespace ccn
