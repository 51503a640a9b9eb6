#pragma once

// Admissible vector fields on the torus, represented as trigonometric
// polynomials in the coordinates of each cell's direct inputs:
//
//   f_{i,r}(u) = sum_k  a_k cos(2 pi k.u) + b_k sin(2 pi k.u),
//
// where u stacks the coordinates of the direct inputs of cell i (in
// increasing cell order) and r runs over the d_i output coordinates of f_i.
// Admissibility holds by construction: f_i never sees anything but u.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccn/graph.hpp"

namespace ccn {

using Point = Eigen::VectorXd;
/// d x d matrix of partial derivatives; block (i, j) is df_i/dx_j.
using JacobianMatrix = Eigen::MatrixXd;

struct FourierTerm {
  std::vector<int> k;  // one wave number per input coordinate
  double a = 0.0;      // cosine coefficient
  double b = 0.0;      // sine coefficient

  friend bool operator==(const FourierTerm&, const FourierTerm&) = default;
};

/// Fourier table of one output coordinate of f_i.
using ComponentTerms = std::vector<FourierTerm>;

class TrigPolyField {
 public:
  /// `cells[i][r]` holds the terms of output coordinate r of cell i.
  /// Throws DomainError when the layout does not match the graph, a wave
  /// vector has the wrong length, exceeds `degree`, or a coefficient is not
  /// finite.
  TrigPolyField(CellGraph graph, std::vector<std::vector<ComponentTerms>> cells, int degree);

  const CellGraph& graph() const { return graph_; }
  int degree() const { return degree_; }
  std::size_t dimension() const { return graph_.total_dimension(); }

  const ComponentTerms& terms(CellIndex i, std::size_t component) const;
  /// Global coordinates read by f_i, in the order the wave vectors use.
  std::span<const std::size_t> input_coordinates(CellIndex i) const { return input_coords_.at(i); }

  Point evaluate(const Point& x) const;
  JacobianMatrix jacobian(const Point& x) const;
  /// Both at once; shares the trigonometric evaluations.
  void evaluate_with_jacobian(const Point& x, Point& value, JacobianMatrix& jac) const;

  /// 16-hex-digit FNV-1a fingerprint of the graph and coefficient tables.
  std::string fingerprint() const;

  friend bool operator==(const TrigPolyField& a, const TrigPolyField& b) {
    return a.degree_ == b.degree_ && a.graph_ == b.graph_ && a.cells_ == b.cells_;
  }

 private:
  void check_point(const Point& x) const;
  /// Shared kernel; the Jacobian is skipped when `jac` is null.
  void accumulate(const Point& x, Point& value, JacobianMatrix* jac) const;

  CellGraph graph_;
  std::vector<std::vector<ComponentTerms>> cells_;
  std::vector<std::vector<std::size_t>> input_coords_;
  int degree_ = 0;
};

/// Incremental construction of hand-written fields. Terms with the same
/// wave vector are summed.
class FieldBuilder {
 public:
  /// One entry of a wave vector: wave number `k` on coordinate `coord` of `cell`.
  struct Mode {
    CellIndex cell = 0;
    int k = 0;
    std::size_t coord = 0;
  };

  explicit FieldBuilder(CellGraph graph);

  /// Adds a cos(2 pi k.u) + b sin(2 pi k.u) to output coordinate `component`
  /// of cell `cell`. Every mode must refer to a direct input of `cell`.
  FieldBuilder& add(CellIndex cell, std::vector<Mode> modes, double a, double b, std::size_t component = 0);
  FieldBuilder& add_constant(CellIndex cell, double value, std::size_t component = 0);

  /// Degree defaults to the largest wave number used (at least 1).
  TrigPolyField build(int degree = 0) const;

 private:
  CellGraph graph_;
  std::vector<std::vector<ComponentTerms>> cells_;
};

/// Canonical wave vectors of a real trigonometric polynomial of degree m in
/// n variables: the zero vector plus every k in [-m, m]^n whose first nonzero
/// entry is positive.
std::vector<std::vector<int>> canonical_wave_vectors(std::size_t n, int degree);

/// Random admissible field: every coefficient of wave vector k is drawn from
/// N(0, (sigma / (1 + |k|)^2)^2), |k| the Euclidean norm. The sine
/// coefficient of k = 0 is zero. Deterministic in `seed`.
TrigPolyField sample_random(const CellGraph& g, int degree, double sigma, std::uint64_t seed);

/// Two-cell circular network x1' = sin(2 pi x2), x2' = sin(2 pi x1).
TrigPolyField counterexample_two_cell();

/// Same dynamics on the cells of a closed set I (graph renumbered as
/// restrict_to does). Throws DomainError when I is not closed.
TrigPolyField restrict_field(const TrigPolyField& f, const CellSet& I);

/// Re-expresses f on a graph with the same dims and a superset of its
/// arrows; the extra inputs get zero wave numbers.
TrigPolyField embed_field(const TrigPolyField& f, const CellGraph& supergraph);

/// Copy of the state restricted to the coordinates of the cells of I.
Point project(const CellGraph& g, const Point& x, const CellSet& I);

}  // namespace ccn
