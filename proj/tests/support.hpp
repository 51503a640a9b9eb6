#pragma once

// Hand-rolled generators shared by the property tests.

#include <random>
#include <vector>

#include "ccn/graph.hpp"

namespace ccn::testing {

/// Random graph: each ordered pair (self-loops included) is an arrow with
/// probability p, dims uniform in [1, max_dim].
inline CellGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::size_t max_dim = 1) {
  std::bernoulli_distribution arrow(p);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::vector<std::size_t> dims(n);
  for (auto& d : dims) d = dim(rng);
  std::vector<Arrow> arrows;
  for (CellIndex from = 0; from < n; ++from)
    for (CellIndex to = 0; to < n; ++to)
      if (arrow(rng)) arrows.push_back({from, to});
  return CellGraph(dims, arrows);
}

/// reach[j][i]: a directed path of length >= 1 leads from j to i (Warshall).
inline std::vector<std::vector<bool>> warshall(const CellGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const Arrow& a : g.arrows()) reach[a.from][a.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  return reach;
}

inline std::vector<CellIndex> members_of(std::uint64_t mask, std::size_t n) {
  std::vector<CellIndex> out;
  for (CellIndex i = 0; i < n; ++i)
    if (mask >> i & 1U) out.push_back(i);
  return out;
}

}  // namespace ccn::testing
