#include "ccn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccn/errors.hpp"

namespace ccn {

namespace {

constexpr std::size_t kMaxSeeds = 4'000'000;

double wrap_coordinate(double v) {
  double w = v - std::floor(v);
  return w >= 1.0 ? 0.0 : w;
}

// Integer grid key of a coordinate, identical for 0 and values just below 1.
long long coordinate_key(double v) {
  constexpr double kScale = 1e9;
  const auto k = static_cast<long long>(std::llround(v * kScale));
  return k % static_cast<long long>(kScale);
}

bool point_less(const Point& a, const Point& b) {
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    const long long ka = coordinate_key(a[c]);
    const long long kb = coordinate_key(b[c]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

// Grid point number `index` in base `per_dim` coordinates.
Point grid_point(std::size_t index, std::size_t per_dim, std::size_t d) {
  Point x(static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < d; ++c) {
    x[static_cast<Eigen::Index>(c)] = static_cast<double>(index % per_dim) / static_cast<double>(per_dim);
    index /= per_dim;
  }
  return x;
}

}  // namespace

Point wrap(Point x) {
  for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = wrap_coordinate(x[c]);
  return x;
}

double circle_distance(double a, double b) {
  const double diff = std::fabs(a - b);
  const double r = diff - std::floor(diff);
  return std::min(r, 1.0 - r);
}

TorusDistance torus_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw DomainError("torus_distance: points of different dimension");
  TorusDistance out;
  out.per_coordinate.resize(static_cast<std::size_t>(x.size()));
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    const double d = circle_distance(x[c], y[c]);
    out.per_coordinate[static_cast<std::size_t>(c)] = d;
    out.max = std::max(out.max, d);
  }
  return out;
}

double cell_distance(const CellGraph& g, CellIndex i, const Point& x, const Point& y) {
  double out = 0.0;
  const std::size_t begin = g.offset(i);
  for (std::size_t c = begin; c < begin + g.dim(i); ++c) {
    const auto e = static_cast<Eigen::Index>(c);
    out = std::max(out, circle_distance(x[e], y[e]));
  }
  return out;
}

Trajectory::Trajectory(double h, Eigen::MatrixXd states, std::vector<std::size_t> cell_offsets, std::string field_ref)
    : h_(h), states_(std::move(states)), offsets_(std::move(cell_offsets)), field_ref_(std::move(field_ref)) {
  if (states_.rows() == 0) throw DomainError("trajectory without samples");
  if (offsets_.size() < 2 || offsets_.back() != static_cast<std::size_t>(states_.cols())) {
    throw DomainError("trajectory cell layout does not match its state dimension");
  }
}

Point Trajectory::cell_state(std::size_t k, CellIndex i) const {
  if (i + 1 >= offsets_.size()) throw DomainError("cell index out of range");
  const auto begin = static_cast<Eigen::Index>(offsets_[i]);
  const auto len = static_cast<Eigen::Index>(offsets_[i + 1] - offsets_[i]);
  return states_.row(static_cast<Eigen::Index>(k)).segment(begin, len).transpose();
}

double Trajectory::cell_gap(CellIndex i, std::size_t k, std::size_t l) const {
  double out = 0.0;
  const auto rk = static_cast<Eigen::Index>(k);
  const auto rl = static_cast<Eigen::Index>(l);
  for (std::size_t c = offsets_[i]; c < offsets_[i + 1]; ++c) {
    const auto e = static_cast<Eigen::Index>(c);
    out = std::max(out, circle_distance(states_(rk, e), states_(rl, e)));
  }
  return out;
}

Trajectory Trajectory::shifted(std::size_t shift_steps) const {
  if (shift_steps >= size()) throw DomainError("shift exceeds trajectory length");
  const auto rows = static_cast<Eigen::Index>(size() - shift_steps);
  return Trajectory(h_, states_.bottomRows(rows), offsets_, field_ref_);
}

Point rk4_step(const TrigPolyField& f, const Point& x, double h) {
  const Point k1 = f.evaluate(x);
  const Point k2 = f.evaluate(x + 0.5 * h * k1);
  const Point k3 = f.evaluate(x + 0.5 * h * k2);
  const Point k4 = f.evaluate(x + h * k3);
  return wrap(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Trajectory integrate(const TrigPolyField& f, const Point& x0, double t_end, double h) {
  if (!(h > 0.0)) throw DomainError("integration step must be positive");
  if (!(t_end >= h)) throw DomainError("integration horizon must be at least one step");
  if (static_cast<std::size_t>(x0.size()) != f.dimension()) throw DomainError("initial state dimension mismatch");
  const auto steps = static_cast<std::size_t>(std::floor(t_end / h + 1e-9));
  Eigen::MatrixXd states(static_cast<Eigen::Index>(steps + 1), x0.size());
  Point x = wrap(x0);
  states.row(0) = x.transpose();
  for (std::size_t k = 1; k <= steps; ++k) {
    x = rk4_step(f, x, h);
    if (!x.allFinite()) throw NumericalError("non-finite state at step " + std::to_string(k));
    states.row(static_cast<Eigen::Index>(k)) = x.transpose();
  }
  const auto offsets = f.graph().offsets();
  return Trajectory(h, std::move(states), {offsets.begin(), offsets.end()}, f.fingerprint());
}

EquilibriumReport classify_equilibrium(const TrigPolyField& f, const Point& e, const EquilibriumOptions& options) {
  EquilibriumReport report;
  report.point = e;
  Point value;
  JacobianMatrix jac;
  f.evaluate_with_jacobian(e, value, jac);
  report.residual = value.cwiseAbs().maxCoeff();

  Eigen::EigenSolver<Eigen::MatrixXd> eig(jac, false);
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  report.spectrum.assign(lambda.data(), lambda.data() + lambda.size());
  std::sort(report.spectrum.begin(), report.spectrum.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  report.spectral_gap = std::numeric_limits<double>::infinity();
  for (const auto& l : report.spectrum) report.spectral_gap = std::min(report.spectral_gap, std::fabs(l.real()));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  report.min_singular_value = svd.singularValues().minCoeff();
  report.simple = report.min_singular_value > options.simplicity_tol;
  report.hyperbolic = report.spectral_gap > options.hyperbolicity_tol;
  return report;
}

namespace {

enum class NewtonOutcome { converged, singular, exhausted };

struct NewtonRun {
  NewtonOutcome outcome = NewtonOutcome::exhausted;
  Point point;
};

NewtonRun newton_from(const TrigPolyField& f, Point x, const EquilibriumOptions& options) {
  const auto d = static_cast<Eigen::Index>(f.dimension());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(d, d);
  lu.setThreshold(1e-12);
  Point value;
  JacobianMatrix jac;
  NewtonRun run;
  for (std::size_t it = 0; it <= options.max_iter; ++it) {
    f.evaluate_with_jacobian(x, value, jac);
    if (value.cwiseAbs().maxCoeff() < options.newton_tol) {
      run.outcome = NewtonOutcome::converged;
      break;
    }
    if (it == options.max_iter) break;
    lu.compute(jac);
    if (!lu.isInvertible()) {
      run.outcome = NewtonOutcome::singular;
      break;
    }
    Point dx = lu.solve(-value);
    if (!dx.allFinite()) {
      run.outcome = NewtonOutcome::singular;
      break;
    }
    const double len = dx.cwiseAbs().maxCoeff();
    if (len > options.max_step) dx *= options.max_step / len;
    x = wrap(x + dx);
  }
  if (run.outcome != NewtonOutcome::converged) return run;

  // Two polishing steps, kept only while they lower the residual.
  double residual = value.cwiseAbs().maxCoeff();
  for (int polish = 0; polish < 2; ++polish) {
    lu.compute(jac);
    if (!lu.isInvertible()) break;
    const Point candidate = wrap(x - lu.solve(value));
    Point cand_value;
    JacobianMatrix cand_jac;
    f.evaluate_with_jacobian(candidate, cand_value, cand_jac);
    const double cand_residual = cand_value.cwiseAbs().maxCoeff();
    if (!(cand_residual < residual)) break;
    x = candidate;
    value = cand_value;
    jac = cand_jac;
    residual = cand_residual;
  }
  run.point = std::move(x);
  return run;
}

}  // namespace

EquilibriumSearch find_equilibria(const TrigPolyField& f, const EquilibriumOptions& options) {
  if (options.grid_per_dim < 2) throw DomainError("equilibrium search needs at least 2 grid points per dimension");
  const std::size_t d = f.dimension();
  const std::size_t seeds = checked_power(options.grid_per_dim, d, kMaxSeeds);
  if (seeds > kMaxSeeds) {
    throw CapacityError("equilibrium seed grid " + std::to_string(options.grid_per_dim) + "^" + std::to_string(d) +
                        " exceeds " + std::to_string(kMaxSeeds) + " seeds; lower grid_per_dim");
  }

  EquilibriumSearch search;
  search.seeds = seeds;
  std::vector<Point> found;
  for (std::size_t s = 0; s < seeds; ++s) {
    NewtonRun run = newton_from(f, grid_point(s, options.grid_per_dim, d), options);
    if (run.outcome == NewtonOutcome::singular) {
      ++search.singular;
      continue;
    }
    if (run.outcome == NewtonOutcome::exhausted) {
      ++search.not_converged;
      continue;
    }
    ++search.converged;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Point& p) {
      return torus_distance(p, run.point).max < options.dedup_radius;
    });
    if (!duplicate) found.push_back(std::move(run.point));
  }

  std::sort(found.begin(), found.end(), point_less);
  for (const Point& p : found) search.equilibria.push_back(classify_equilibrium(f, p, options));
  return search;
}

std::optional<Point> refine_equilibrium(const TrigPolyField& f, const Point& seed, const EquilibriumOptions& options) {
  if (static_cast<std::size_t>(seed.size()) != f.dimension()) throw DomainError("seed dimension mismatch");
  NewtonRun run = newton_from(f, wrap(seed), options);
  if (run.outcome != NewtonOutcome::converged) return std::nullopt;
  return run.point;
}

std::vector<Point> omega_limit_estimate(const TrigPolyField& f, const Point& x0, double t_burn, double t_sample,
                                        double h, double cluster_radius) {
  if (!(t_burn > 0.0) || !(t_sample > 0.0)) throw DomainError("omega-limit windows must be positive");
  if (!(cluster_radius > 0.0)) throw DomainError("cluster radius must be positive");
  const Trajectory traj = integrate(f, x0, t_burn + t_sample, h);
  const auto first = static_cast<std::size_t>(std::ceil(t_burn / h - 1e-9));
  std::vector<Point> reps;
  for (std::size_t k = first; k < traj.size(); ++k) {
    const Point x = traj.state(k);
    const bool covered = std::any_of(reps.begin(), reps.end(),
                                     [&](const Point& r) { return torus_distance(r, x).max < cluster_radius; });
    if (!covered) reps.push_back(x);
  }
  return reps;
}

std::vector<Point> discrete_orbit(const TrigPolyField& f, const Point& x0, std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("discrete orbit needs at least one step");
  std::vector<Point> orbit;
  orbit.reserve(n_steps + 1);
  orbit.push_back(wrap(x0));
  for (std::size_t n = 0; n < n_steps; ++n) orbit.push_back(wrap(f.evaluate(orbit.back())));
  return orbit;
}

double lipschitz_estimate(const TrigPolyField& f, std::size_t samples_per_dim) {
  const std::size_t d = f.dimension();
  std::size_t per_dim = std::max<std::size_t>(samples_per_dim, 2);
  while (per_dim > 2 && checked_power(per_dim, d, 4096) > 4096) --per_dim;
  const std::size_t points = checked_power(per_dim, d, 4096);
  double best = 0.0;
  for (std::size_t s = 0; s < points && s <= 4096; ++s) {
    const JacobianMatrix jac = f.jacobian(grid_point(s, per_dim, d));
    best = std::max(best, jac.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return best;
}

}  // namespace ccn
