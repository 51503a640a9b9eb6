#pragma once

// Single-cell observations of trajectories (constancy, periodicity,
// stabilisation) and empirical checks of the observability statements for
// generic admissible fields. Every check is tolerance based: "x_i = y_i"
// means a supremum of torus distances below a threshold.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccn/dynamics.hpp"

namespace ccn {

enum class Claim {
  trajectory_inverse,
  constant_propagation,
  periodic_propagation,
  exact_period_propagation,
  stabilization,
  equilibrium_inverse,
};

std::string to_string(Claim c);
std::optional<Claim> parse_claim(std::string_view name);

/// Closed time interval [begin, end] on the trajectory's sample grid.
struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// Evidence against a claim. Distances are re-computable from the listed
/// cells and samples of the stored trajectories (or from `points`).
struct Witness {
  std::vector<CellIndex> cells;
  std::vector<std::size_t> samples;
  std::vector<double> times;
  std::vector<double> distances;
  std::vector<Point> points;
  std::string note;
};

struct Verdict {
  Claim claim = Claim::trajectory_inverse;
  bool holds = true;
  bool premise_met = true;
  std::optional<Witness> witness;
  std::map<std::string, double> tolerances;
  std::vector<std::string> annotations;

  /// Marks the claim as violated; a violation always carries its witness.
  void violate(Witness w);
  /// The documented invariant holds == false implies a witness.
  bool consistent() const { return holds || witness.has_value(); }
};

/// Sample index range [first, last] covered by a window. Throws DomainError
/// when the window is empty or leaves the trajectory.
struct SampleRange {
  std::size_t first = 0;
  std::size_t last = 0;
};
SampleRange sample_range(const Trajectory& traj, TimeWindow window);

struct ConstancyCheck {
  bool constant = false;
  /// tol >= 1/2 accepts everything: torus distances never exceed 1/2.
  bool degenerate_tolerance = false;
  double max_deviation = 0.0;
  std::size_t reference_sample = 0;
  std::size_t worst_sample = 0;

  explicit operator bool() const { return constant; }
};

ConstancyCheck is_constant_on(const Trajectory& traj, CellIndex i, TimeWindow window, double tol);

struct PeriodEstimate {
  double period = 0.0;
  std::size_t period_steps = 0;
  double residual = 0.0;
  /// Smallest scanned period with residual below tolerance.
  bool exact = false;
};

struct PeriodDetection {
  std::optional<PeriodEstimate> estimate;
  bool constant = false;
};

/// sup over k in [first, last - shift] of the distance between cell i at
/// samples k and k + shift.
double period_residual(const Trajectory& traj, CellIndex i, std::size_t shift, SampleRange range);

/// Scans T = s h for s = 1, 2, ... up to t_max and returns the first T with
/// residual below tol. Constant signals report `constant` and no estimate.
PeriodDetection detect_period(const Trajectory& traj, CellIndex i, TimeWindow window, double t_max, double tol);

/// Diameter of cell i over the final `tail_fraction` of the samples, assuming
/// consecutive samples lie closer than 1/2 (true for sampled flows).
double tail_diameter(const Trajectory& traj, CellIndex i, double tail_fraction);

/// Circular mean of cell i over the tail when its diameter is below tol.
std::optional<Point> detect_stabilization(const Trajectory& traj, CellIndex i, double tail_fraction, double tol);

enum class InverseMode {
  /// Exempt cells constant in both trajectories unless the graph is
  /// self-dependent or dimensionally decreasing.
  automatic,
  /// Require agreement on every cell.
  all_cells,
};

/// Compares two stored trajectories observed at cell `obs`. Premise:
/// sup over `window` of the obs-cell distance < eps. Conclusion: every
/// non-exempt cell stays within delta over the whole common range.
Verdict verify_trajectory_inverse(const CellGraph& g, const Trajectory& x, const Trajectory& y, CellIndex obs,
                                  TimeWindow window, double eps, double delta,
                                  InverseMode mode = InverseMode::automatic);

/// Integrates both initial states up to window.end with step h, then
/// compares them as above. Throws DomainError when obs is not an
/// observation cell.
Verdict verify_trajectory_inverse(const TrigPolyField& f, const Point& x0, const Point& y0, CellIndex obs,
                                  TimeWindow window, double eps, double delta, double h,
                                  InverseMode mode = InverseMode::automatic);

/// Distance between cell `cell` of x and y at sample k, for witness replay.
double replay_distance(const Trajectory& x, const Trajectory& y, CellIndex cell, std::size_t k);

/// If cell i is constant on `window`, each indirect input of i must be
/// constant on the window and on the whole trajectory; when i observes
/// every cell the state must be an equilibrium. Throws DomainError when the
/// premise fails. `known` supplies already located equilibria.
Verdict verify_constant_propagation(const TrigPolyField& f, const Trajectory& traj, CellIndex i, TimeWindow window,
                                    double tol, const EquilibriumOptions& eq_options = {},
                                    const std::vector<EquilibriumReport>* known = nullptr);

/// Periodicity of cell i with period T on `window` (which should span at
/// least T + tau) forces every indirect input of i to be T-periodic on the
/// whole trajectory; for strongly connected graphs every cell must moreover
/// have no period shorter than T - h. T must be a multiple of the step.
/// Throws DomainError when the premise fails.
Verdict verify_periodic_propagation(const TrigPolyField& f, const Trajectory& traj, CellIndex i, double period,
                                    double tau, TimeWindow window, double tol);

struct StabilizationOptions {
  double tail_fraction = 0.25;
  double diameter_tol = 1e-6;
  double residual_tol = 1e-6;
  double cluster_radius = 1e-4;
};

/// Integrates from x0; if the observation cell stabilises, every cell must
/// stabilise onto an equilibrium that is also the single omega-limit
/// cluster. A non-stabilising observation cell makes the verdict vacuous.
Verdict verify_stabilization(const TrigPolyField& f, const Point& x0, CellIndex obs, double t_end, double h,
                             const StabilizationOptions& options = {});

/// Pairs of located equilibria that agree at cell `obs` (distance < tol)
/// but differ elsewhere (distance >= tol) violate the claim.
Verdict verify_equilibrium_inverse(const TrigPolyField& f, CellIndex obs, double tol,
                                   const EquilibriumOptions& eq_options = {});
Verdict verify_equilibrium_inverse(const CellGraph& g, const std::vector<EquilibriumReport>& equilibria,
                                   CellIndex obs, double tol);

/// Graphs on which generic fields separate equilibria from any observation
/// cell: self-dependent, dimensionally decreasing, or carrying a dimension
/// deficit (then there are generically no equilibria at all).
bool equilibrium_inverse_expected(const CellGraph& g);

}  // namespace ccn
