#include "ccn/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <sstream>

#include "ccn/errors.hpp"

namespace ccn {

namespace {

using Mask = std::uint64_t;

void check_limit(const CellGraph& g, std::size_t limit) {
  if (limit > 30) throw CapacityError("enumeration limit above 30 cells is not supported");
  if (g.size() > limit) {
    std::ostringstream os;
    os << "graph has " << g.size() << " cells, above the subset enumeration limit of " << limit
       << "; use closure() on specific cell sets instead";
    throw CapacityError(os.str());
  }
}

struct MaskView {
  std::vector<Mask> input_mask;
  std::vector<std::size_t> dims;

  explicit MaskView(const CellGraph& g) : input_mask(g.size(), 0), dims(g.dims().begin(), g.dims().end()) {
    for (const Arrow& a : g.arrows()) input_mask[a.to] |= Mask{1} << a.from;
  }

  Mask inputs_of(Mask set) const {
    Mask out = 0;
    for (Mask m = set; m != 0; m &= m - 1) out |= input_mask[std::countr_zero(m)];
    return out;
  }

  std::size_t dim_of(Mask set) const {
    std::size_t d = 0;
    for (Mask m = set; m != 0; m &= m - 1) d += dims[std::countr_zero(m)];
    return d;
  }
};

CellSet set_from_mask(const CellGraph& g, Mask m) {
  std::vector<CellIndex> members;
  for (; m != 0; m &= m - 1) members.push_back(static_cast<CellIndex>(std::countr_zero(m)));
  return g.make_set(std::move(members));
}

// Next mask with the same popcount (Gosper's hack).
Mask next_same_popcount(Mask m) {
  const Mask c = m & (~m + 1);
  const Mask r = m + c;
  return (((r ^ m) >> 2) / c) | r;
}

template <typename Visit>
void for_each_subset_by_size(std::size_t n, std::size_t min_size, std::size_t max_size, Visit&& visit) {
  const Mask end = Mask{1} << n;
  for (std::size_t k = min_size; k <= max_size; ++k) {
    if (k == 0) {
      if (!visit(Mask{0})) return;
      continue;
    }
    for (Mask m = (Mask{1} << k) - 1; m < end; m = next_same_popcount(m)) {
      if (!visit(m)) return;
    }
  }
}

}  // namespace

bool CellSet::contains(CellIndex i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

bool CellSet::includes(const CellSet& other) const {
  return std::includes(members_.begin(), members_.end(), other.members_.begin(), other.members_.end());
}

std::vector<std::size_t> CellSet::ids() const {
  std::vector<std::size_t> out;
  out.reserve(members_.size());
  for (CellIndex i : members_) out.push_back(i + 1);
  return out;
}

std::string CellSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < members_.size(); ++k) os << (k ? "," : "") << members_[k] + 1;
  os << '}';
  return os.str();
}

CellGraph::CellGraph(std::vector<std::size_t> dims, std::vector<Arrow> arrows)
    : dims_(std::move(dims)), arrows_(std::move(arrows)) {
  if (dims_.empty()) throw DomainError("a cell graph needs at least one cell");
  offsets_.assign(dims_.size() + 1, 0);
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] == 0) throw DomainError("cell " + std::to_string(i + 1) + " has dimension 0");
    offsets_[i + 1] = offsets_[i] + dims_[i];
  }
  std::sort(arrows_.begin(), arrows_.end());
  for (std::size_t k = 0; k < arrows_.size(); ++k) {
    const Arrow& a = arrows_[k];
    if (a.from >= dims_.size() || a.to >= dims_.size()) {
      throw DomainError("arrow " + std::to_string(a.from + 1) + "->" + std::to_string(a.to + 1) +
                        " references a cell outside [1, " + std::to_string(dims_.size()) + "]");
    }
    if (k > 0 && arrows_[k - 1] == a) {
      throw DomainError("duplicate arrow " + std::to_string(a.from + 1) + "->" + std::to_string(a.to + 1));
    }
  }
  inputs_.assign(dims_.size(), {});
  for (const Arrow& a : arrows_) inputs_[a.to].push_back(a.from);
  for (auto& in : inputs_) std::sort(in.begin(), in.end());
}

void CellGraph::check_index(CellIndex i) const {
  if (i >= dims_.size()) {
    throw DomainError("cell index " + std::to_string(i + 1) + " outside [1, " + std::to_string(dims_.size()) + "]");
  }
}

std::size_t CellGraph::dim(CellIndex i) const {
  check_index(i);
  return dims_[i];
}

std::size_t CellGraph::offset(CellIndex i) const {
  check_index(i);
  return offsets_[i];
}

bool CellGraph::has_arrow(CellIndex from, CellIndex to) const {
  return std::binary_search(arrows_.begin(), arrows_.end(), Arrow{from, to});
}

std::span<const CellIndex> CellGraph::inputs(CellIndex i) const {
  check_index(i);
  return inputs_[i];
}

CellSet CellGraph::make_set(std::vector<CellIndex> members) const {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::size_t d = 0;
  for (CellIndex i : members) d += dim(i);
  return CellSet(std::move(members), d);
}

CellSet CellGraph::all_cells() const {
  std::vector<CellIndex> members(size());
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
  return make_set(std::move(members));
}

CellSet direct_inputs(const CellGraph& g, CellIndex i) {
  auto in = g.inputs(i);
  return g.make_set({in.begin(), in.end()});
}

CellSet indirect_inputs(const CellGraph& g, CellIndex i) {
  g.check_index(i);
  std::vector<bool> seen(g.size(), false);
  std::deque<CellIndex> queue;
  for (CellIndex j : g.inputs(i)) {
    if (!seen[j]) {
      seen[j] = true;
      queue.push_back(j);
    }
  }
  while (!queue.empty()) {
    const CellIndex k = queue.front();
    queue.pop_front();
    for (CellIndex j : g.inputs(k)) {
      if (!seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  std::vector<CellIndex> members;
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (seen[j]) members.push_back(j);
  return g.make_set(std::move(members));
}

CellSet inputs_of_set(const CellGraph& g, const CellSet& I) {
  if (I.empty()) throw DomainError("inputs_of_set needs a nonempty cell set");
  std::vector<CellIndex> members;
  for (CellIndex i : I.members()) {
    auto in = g.inputs(i);
    members.insert(members.end(), in.begin(), in.end());
  }
  return g.make_set(std::move(members));
}

CellSet observation_cells(const CellGraph& g) {
  std::vector<CellIndex> members;
  for (CellIndex i = 0; i < g.size(); ++i) {
    const CellSet reach = indirect_inputs(g, i);
    bool observes_all = true;
    for (CellIndex j = 0; j < g.size() && observes_all; ++j) {
      if (j != i && !reach.contains(j)) observes_all = false;
    }
    if (observes_all) members.push_back(i);
  }
  return g.make_set(std::move(members));
}

bool is_strongly_connected(const CellGraph& g) { return observation_cells(g).size() == g.size(); }

bool is_self_dependent(const CellGraph& g) {
  for (CellIndex i = 0; i < g.size(); ++i)
    if (!g.has_arrow(i, i)) return false;
  return true;
}

CellSet closure(const CellGraph& g, const CellSet& I) {
  std::vector<CellIndex> members(I.members().begin(), I.members().end());
  for (CellIndex i : I.members()) {
    const CellSet reach = indirect_inputs(g, i);
    members.insert(members.end(), reach.members().begin(), reach.members().end());
  }
  return g.make_set(std::move(members));
}

bool is_closed(const CellGraph& g, const CellSet& I) {
  // Closure under direct inputs already implies closure under indirect ones.
  for (CellIndex i : I.members()) {
    for (CellIndex j : g.inputs(i))
      if (!I.contains(j)) return false;
  }
  return true;
}

std::vector<IndependentSubnetwork> independent_subnetworks(const CellGraph& g, std::size_t limit) {
  check_limit(g, limit);
  const MaskView view(g);
  std::vector<IndependentSubnetwork> out;
  for_each_subset_by_size(g.size(), 0, g.size(), [&](Mask m) {
    if ((view.inputs_of(m) & ~m) == 0) {
      IndependentSubnetwork sub;
      sub.cells = set_from_mask(g, m);
      sub.strongly_connected = !sub.cells.empty() && is_strongly_connected(restrict_to(g, sub.cells));
      out.push_back(std::move(sub));
    }
    return true;
  });
  return out;
}

std::string to_string(DimensionalClass c) {
  switch (c) {
    case DimensionalClass::decreasing: return "decreasing";
    case DimensionalClass::non_increasing: return "non_increasing";
    case DimensionalClass::neither: return "neither";
  }
  return "unknown";
}

DimensionalClassification dimensional_classification(const CellGraph& g, std::size_t limit) {
  check_limit(g, limit);
  const MaskView view(g);
  std::vector<Mask> deficit;
  std::vector<Mask> tight;
  std::size_t deficit_count = 0;
  std::size_t tight_count = 0;
  if (g.size() >= 2) {
    for_each_subset_by_size(g.size(), 1, g.size() - 1, [&](Mask m) {
      const std::size_t d_in = view.dim_of(view.inputs_of(m));
      const std::size_t d_set = view.dim_of(m);
      if (d_in < d_set) {
        if (deficit.size() < DimensionalClassification::kMaxWitnesses) deficit.push_back(m);
        ++deficit_count;
      } else if (d_in == d_set) {
        if (tight.size() < DimensionalClassification::kMaxWitnesses) tight.push_back(m);
        ++tight_count;
      }
      return true;
    });
  }

  DimensionalClassification result;
  const std::vector<Mask>* chosen = nullptr;
  if (deficit_count > 0) {
    result.kind = DimensionalClass::neither;
    result.witness_count = deficit_count;
    chosen = &deficit;
  } else if (tight_count > 0) {
    result.kind = DimensionalClass::non_increasing;
    result.witness_count = tight_count;
    chosen = &tight;
  } else {
    result.kind = DimensionalClass::decreasing;
    return result;
  }
  for (Mask m : *chosen) {
    result.witnesses.push_back({set_from_mask(g, m), set_from_mask(g, view.inputs_of(m))});
  }
  return result;
}

std::optional<DimensionWitness> find_dimension_deficit(const CellGraph& g, std::size_t limit) {
  check_limit(g, limit);
  const MaskView view(g);
  std::optional<DimensionWitness> found;
  for_each_subset_by_size(g.size(), 1, g.size(), [&](Mask m) {
    const Mask in = view.inputs_of(m);
    if (view.dim_of(in) < view.dim_of(m)) {
      found = DimensionWitness{set_from_mask(g, m), set_from_mask(g, in)};
      return false;
    }
    return true;
  });
  return found;
}

CellGraph restrict_to(const CellGraph& g, const CellSet& I) {
  if (I.empty()) throw DomainError("cannot restrict a graph to the empty cell set");
  for (CellIndex i : I.members()) g.check_index(i);
  if (!is_closed(g, I)) {
    throw DomainError("cell set " + I.to_string() + " is not an independent sub-network (closure is " +
                      closure(g, I).to_string() + ")");
  }
  std::vector<std::size_t> new_index(g.size(), 0);
  std::vector<std::size_t> dims;
  for (std::size_t k = 0; k < I.size(); ++k) {
    new_index[I.members()[k]] = k;
    dims.push_back(g.dim(I.members()[k]));
  }
  std::vector<Arrow> arrows;
  for (const Arrow& a : g.arrows()) {
    if (I.contains(a.to)) arrows.push_back({new_index[a.from], new_index[a.to]});
  }
  return CellGraph(std::move(dims), std::move(arrows));
}

}  // namespace ccn
