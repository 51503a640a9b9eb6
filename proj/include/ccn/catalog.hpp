#pragma once

// Named graphs and hand-built fields used by the scenarios, the CLI and the
// test suites.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccn/field.hpp"

namespace ccn::catalog {

/// Five cells: x1' = f1(x2, x4), x2' = f2(x1), x3' = f3(x1, x3),
/// x4' = f4(x2, x3, x4), x5' = f5(x3). Cell 5 is the only observation cell.
CellGraph figure1(std::vector<std::size_t> dims = {1, 1, 1, 1, 1});

/// Same arrows plus a self-loop on every cell.
CellGraph figure1_self_dependent();

/// Circular two-cell network 2 -> 1, 1 -> 2 with one-dimensional cells.
CellGraph two_cell_cycle();

/// Directed cycle 1 -> 2 -> ... -> n -> 1 with a self-loop on every cell.
CellGraph self_dependent_cycle(std::size_t n);

/// Graph by name: "fig1", "fig1-self", "ce-eq", "ce-eq-self", "cycle3-self".
CellGraph builtin_graph(std::string_view name);
std::vector<std::string> builtin_graph_names();

/// One input-free cell: x' = omega.
TrigPolyField rotation(double omega);

/// Two-cell cycle where both cells rotate: x1' = omega, x2' = omega.
TrigPolyField rotation_cycle(double omega);

/// x1' = 1, x2' = sin(2 pi x1); arrow 1 -> 2 only.
TrigPolyField feedforward_pair();

/// One self-looped cell: x' = sign * sin(2 pi x).
TrigPolyField sine_cell(double sign);

/// Figure-1 arrows with self-loops:
/// f_i = -sin(2 pi x_i) + coupling * sum_{j input of i, j != i} cos(2 pi x_j).
TrigPolyField contracting_figure1(double coupling = 0.1);

/// A graph whose first cell has no input, carrying the constant field
/// `value` there; the remaining cells get a random degree-2 field.
TrigPolyField input_free_constant(double value, std::uint64_t seed);

}  // namespace ccn::catalog
