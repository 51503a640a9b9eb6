#include "ccn/catalog.hpp"

#include "ccn/errors.hpp"

namespace ccn::catalog {

namespace {

std::vector<Arrow> figure1_arrows() {
  // 0-based: (from, to)
  return {{1, 0}, {3, 0}, {0, 1}, {0, 2}, {2, 2}, {1, 3}, {2, 3}, {3, 3}, {2, 4}};
}

}  // namespace

CellGraph figure1(std::vector<std::size_t> dims) {
  if (dims.size() != 5) throw DomainError("the figure-1 network has five cells");
  return CellGraph(std::move(dims), figure1_arrows());
}

CellGraph figure1_self_dependent() {
  auto arrows = figure1_arrows();
  for (CellIndex i : {0, 1, 4}) arrows.push_back({i, i});
  return CellGraph({1, 1, 1, 1, 1}, std::move(arrows));
}

CellGraph two_cell_cycle() { return CellGraph({1, 1}, {{1, 0}, {0, 1}}); }

CellGraph self_dependent_cycle(std::size_t n) {
  if (n == 0) throw DomainError("cycle needs at least one cell");
  std::vector<Arrow> arrows;
  for (CellIndex i = 0; i < n; ++i) {
    arrows.push_back({i, i});
    if (n > 1) arrows.push_back({i, (i + 1) % n});
  }
  return CellGraph(std::vector<std::size_t>(n, 1), std::move(arrows));
}

CellGraph builtin_graph(std::string_view name) {
  if (name == "fig1") return figure1();
  if (name == "fig1-self") return figure1_self_dependent();
  if (name == "ce-eq") return two_cell_cycle();
  if (name == "ce-eq-self") return self_dependent_cycle(2);
  if (name == "cycle3-self") return self_dependent_cycle(3);
  throw DomainError("unknown builtin graph '" + std::string(name) + "'");
}

std::vector<std::string> builtin_graph_names() { return {"fig1", "fig1-self", "ce-eq", "ce-eq-self", "cycle3-self"}; }

TrigPolyField rotation(double omega) {
  return FieldBuilder(CellGraph({1}, {})).add_constant(0, omega).build(1);
}

TrigPolyField rotation_cycle(double omega) {
  return FieldBuilder(two_cell_cycle()).add_constant(0, omega).add_constant(1, omega).build(1);
}

TrigPolyField feedforward_pair() {
  CellGraph g({1, 1}, {{0, 1}});
  return FieldBuilder(g).add_constant(0, 1.0).add(1, {{0, 1}}, 0.0, 1.0).build(1);
}

TrigPolyField sine_cell(double sign) {
  CellGraph g({1}, {{0, 0}});
  return FieldBuilder(g).add(0, {{0, 1}}, 0.0, sign).build(1);
}

TrigPolyField contracting_figure1(double coupling) {
  const CellGraph g = figure1_self_dependent();
  FieldBuilder b(g);
  for (CellIndex i = 0; i < g.size(); ++i) {
    b.add(i, {{i, 1}}, 0.0, -1.0);
    for (CellIndex j : g.inputs(i)) {
      if (j != i) b.add(i, {{j, 1}}, coupling, 0.0);
    }
  }
  return b.build(1);
}

TrigPolyField input_free_constant(double value, std::uint64_t seed) {
  // 1 -> 2, 2 -> 3, 3 -> 2, 3 -> 3; cell 1 has no input.
  const CellGraph g({1, 1, 1}, {{0, 1}, {1, 2}, {2, 1}, {2, 2}});
  const TrigPolyField random = sample_random(g, 2, 1.0, seed);
  std::vector<std::vector<ComponentTerms>> cells(g.size());
  cells[0] = {{FourierTerm{{}, value, 0.0}}};
  for (CellIndex i = 1; i < g.size(); ++i) cells[i] = {random.terms(i, 0)};
  return TrigPolyField(g, std::move(cells), 2);
}

}  // namespace ccn::catalog
