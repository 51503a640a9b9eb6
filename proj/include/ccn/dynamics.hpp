#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccn/field.hpp"

namespace ccn {

/// Reduces every coordinate into [0, 1).
Point wrap(Point x);

struct TorusDistance {
  std::vector<double> per_coordinate;  // each in [0, 1/2]
  double max = 0.0;
};

TorusDistance torus_distance(const Point& x, const Point& y);
/// Circle distance min(|a - b| mod 1, 1 - |a - b| mod 1).
double circle_distance(double a, double b);
/// Max-norm torus distance restricted to the coordinates of one cell.
double cell_distance(const CellGraph& g, CellIndex i, const Point& x, const Point& y);

/// Solution of x' = f(x) sampled on the uniform grid t_k = k h, k = 0..K.
/// Rows of `states` are torus points with coordinates in [0, 1).
class Trajectory {
 public:
  Trajectory(double h, Eigen::MatrixXd states, std::vector<std::size_t> cell_offsets, std::string field_ref);

  double step() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(states_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(states_.cols()); }
  std::size_t cell_count() const { return offsets_.size() - 1; }
  double time(std::size_t k) const { return h_ * static_cast<double>(k); }
  double end_time() const { return time(size() - 1); }

  Point state(std::size_t k) const { return states_.row(static_cast<Eigen::Index>(k)).transpose(); }
  Point cell_state(std::size_t k, CellIndex i) const;
  /// Max-norm circle distance between cell i at samples k and l.
  double cell_gap(CellIndex i, std::size_t k, std::size_t l) const;

  const Eigen::MatrixXd& states() const { return states_; }
  std::span<const std::size_t> cell_offsets() const { return offsets_; }
  const std::string& field_ref() const { return field_ref_; }

  /// The trajectory t -> x(t + shift_steps h), re-based at t = 0.
  Trajectory shifted(std::size_t shift_steps) const;

 private:
  double h_;
  Eigen::MatrixXd states_;
  std::vector<std::size_t> offsets_;
  std::string field_ref_;
};

/// One classical Runge-Kutta step of size h followed by wrapping.
Point rk4_step(const TrigPolyField& f, const Point& x, double h);

/// Integrates floor(t_end / h) fixed RK4 steps from x0 (wrapped first).
/// Throws DomainError on h <= 0 or t_end < h, NumericalError on a
/// non-finite state.
Trajectory integrate(const TrigPolyField& f, const Point& x0, double t_end, double h);

struct EquilibriumOptions {
  std::size_t grid_per_dim = 8;
  double newton_tol = 1e-10;
  std::size_t max_iter = 50;
  double dedup_radius = 1e-6;
  double simplicity_tol = 1e-6;
  double hyperbolicity_tol = 1e-6;
  /// Largest Newton step in max norm; longer steps are scaled down.
  double max_step = 0.1;
};

struct EquilibriumReport {
  Point point;
  double residual = 0.0;
  std::vector<std::complex<double>> spectrum;
  double min_singular_value = 0.0;
  bool simple = false;
  bool hyperbolic = false;
  /// min |Re lambda|
  double spectral_gap = 0.0;
};

/// Classifies a point as an equilibrium candidate (no Newton refinement).
EquilibriumReport classify_equilibrium(const TrigPolyField& f, const Point& e, const EquilibriumOptions& options = {});

struct EquilibriumSearch {
  std::vector<EquilibriumReport> equilibria;  // sorted by coordinates
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t singular = 0;       // seeds abandoned on a singular Newton step
  std::size_t not_converged = 0;  // seeds that ran out of iterations
};

/// Damped Newton iteration from every point of a uniform grid with
/// grid_per_dim points per coordinate. Completeness is not guaranteed.
EquilibriumSearch find_equilibria(const TrigPolyField& f, const EquilibriumOptions& options = {});

/// Newton iteration from a single seed; the converged point or nothing.
std::optional<Point> refine_equilibrium(const TrigPolyField& f, const Point& seed, const EquilibriumOptions& options = {});

/// Representatives of the samples of x(t), t in [t_burn, t_burn + t_sample],
/// greedily clustered so that every sample lies within `cluster_radius`
/// (max-norm torus distance) of one representative.
std::vector<Point> omega_limit_estimate(const TrigPolyField& f, const Point& x0, double t_burn, double t_sample,
                                        double h, double cluster_radius);

/// Orbit x^0, x^1, ..., x^n of the map x -> f(x) mod 1.
std::vector<Point> discrete_orbit(const TrigPolyField& f, const Point& x0, std::size_t n_steps);

/// Largest max-row-sum norm of Df over a grid of `samples_per_dim` points per
/// coordinate, capped at 4096 points; a Lipschitz estimate for the max norm.
double lipschitz_estimate(const TrigPolyField& f, std::size_t samples_per_dim = 6);

}  // namespace ccn
