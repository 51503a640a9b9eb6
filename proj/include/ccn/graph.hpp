#pragma once

// Directed interaction graphs of coupled cell networks and their structural
// predicates. Cells are 0-based in this API; every serialized form and every
// user-facing message uses 1-based cell ids.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccn {

using CellIndex = std::size_t;

inline constexpr std::size_t kDefaultEnumerationLimit = 20;

/// Arrow `from -> to`: cell `from` is a direct input of cell `to`.
struct Arrow {
  CellIndex from = 0;
  CellIndex to = 0;

  friend bool operator==(const Arrow&, const Arrow&) = default;
  friend auto operator<=>(const Arrow&, const Arrow&) = default;
};

/// A set of cells together with its total phase-space dimension d_I.
/// Only a CellGraph can build one, so the dimension always matches the graph.
class CellSet {
 public:
  CellSet() = default;

  std::span<const CellIndex> members() const& { return members_; }
  /// Temporaries hand over their storage so range-for stays valid.
  std::vector<CellIndex> members() && { return std::move(members_); }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t dim_total() const { return dim_total_; }
  bool contains(CellIndex i) const;
  bool includes(const CellSet& other) const;

  /// Members as 1-based ids.
  std::vector<std::size_t> ids() const;
  std::string to_string() const;

  friend bool operator==(const CellSet& a, const CellSet& b) { return a.members_ == b.members_; }

 private:
  friend class CellGraph;
  CellSet(std::vector<CellIndex> members, std::size_t dim_total)
      : members_(std::move(members)), dim_total_(dim_total) {}

  std::vector<CellIndex> members_;  // sorted, unique
  std::size_t dim_total_ = 0;
};

/// Directed graph G on N cells, cell i carrying the torus T^{d_i}.
/// Immutable after construction.
class CellGraph {
 public:
  /// Throws DomainError on N = 0, a zero dimension, an out-of-range arrow
  /// endpoint or a duplicated arrow.
  CellGraph(std::vector<std::size_t> dims, std::vector<Arrow> arrows);

  std::size_t size() const { return dims_.size(); }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t dim(CellIndex i) const;
  std::size_t total_dimension() const { return offsets_.back(); }
  /// First global coordinate of cell i; cell i owns [offset(i), offset(i) + dim(i)).
  std::size_t offset(CellIndex i) const;
  std::span<const std::size_t> offsets() const { return offsets_; }

  /// Arrows sorted by (from, to).
  std::span<const Arrow> arrows() const { return arrows_; }
  bool has_arrow(CellIndex from, CellIndex to) const;
  /// Sorted direct inputs of cell i.
  std::span<const CellIndex> inputs(CellIndex i) const;

  CellSet make_set(std::vector<CellIndex> members) const;
  CellSet all_cells() const;

  void check_index(CellIndex i) const;

  friend bool operator==(const CellGraph& a, const CellGraph& b) {
    return a.dims_ == b.dims_ && a.arrows_ == b.arrows_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<Arrow> arrows_;
  std::vector<std::vector<CellIndex>> inputs_;
};

CellSet direct_inputs(const CellGraph& g, CellIndex i);

/// Every j joined to i by a directed path j -> ... -> i of length >= 1.
/// i belongs to the result iff it lies on a directed cycle.
CellSet indirect_inputs(const CellGraph& g, CellIndex i);

/// Union of the direct inputs of the members of I. Members of I are kept.
CellSet inputs_of_set(const CellGraph& g, const CellSet& I);

CellSet observation_cells(const CellGraph& g);
bool is_strongly_connected(const CellGraph& g);
bool is_self_dependent(const CellGraph& g);

/// Smallest independent sub-network containing I.
CellSet closure(const CellGraph& g, const CellSet& I);
bool is_closed(const CellGraph& g, const CellSet& I);

struct IndependentSubnetwork {
  CellSet cells;
  bool strongly_connected = false;  // false for the empty set
};

/// All closed cell sets, including the empty and the full set, ordered by
/// size then lexicographically. Throws CapacityError when N > limit.
std::vector<IndependentSubnetwork> independent_subnetworks(
    const CellGraph& g, std::size_t limit = kDefaultEnumerationLimit);

enum class DimensionalClass { decreasing, non_increasing, neither };

std::string to_string(DimensionalClass c);

struct DimensionWitness {
  CellSet cells;   // I
  CellSet inputs;  // J = inputs_of_set(I)
};

struct DimensionalClassification {
  DimensionalClass kind = DimensionalClass::decreasing;
  /// Non-trivial sets realising the classification: every I with d_J < d_I
  /// when kind is `neither`, every I with d_J == d_I when `non_increasing`.
  /// Ordered by size then lexicographically and capped at kMaxWitnesses.
  std::vector<DimensionWitness> witnesses;
  std::size_t witness_count = 0;  // before capping

  static constexpr std::size_t kMaxWitnesses = 64;

  const DimensionWitness* witness() const { return witnesses.empty() ? nullptr : &witnesses.front(); }
};

DimensionalClassification dimensional_classification(
    const CellGraph& g, std::size_t limit = kDefaultEnumerationLimit);

/// Some nonempty I, the full set included, whose inputs have d_J < d_I.
/// Generic fields on such a graph have no equilibrium at all.
std::optional<DimensionWitness> find_dimension_deficit(
    const CellGraph& g, std::size_t limit = kDefaultEnumerationLimit);

/// Subgraph induced on a closed set I, cells renumbered in increasing order.
CellGraph restrict_to(const CellGraph& g, const CellSet& I);

}  // namespace ccn
