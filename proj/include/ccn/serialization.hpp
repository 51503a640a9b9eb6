#pragma once

// JSON and CSV forms of graphs, fields, trajectories, equilibria and
// verdicts. Cell ids are 1-based in every serialized form.

#include <iosfwd>
#include <string>
#include <vector>

#include "ccn/dynamics.hpp"
#include "ccn/observability.hpp"
#include "json.hpp"

namespace ccn {

using Json = nlohmann::json;

/// {"cells": [{"id": 1, "dim": 1}, ...], "arrows": [[from, to], ...]}
Json graph_to_json(const CellGraph& g);
CellGraph graph_from_json(const Json& j);

/// {"graph": {...}, "degree": m, "cells": [{"id": i, "inputs": [...],
///   "components": [[{"k": [...], "a": .., "b": ..}, ...], ...]}]}
Json field_to_json(const TrigPolyField& f);
TrigPolyField field_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// A path to a graph JSON file, or "builtin:<name>".
CellGraph load_graph(const std::string& spec);
TrigPolyField load_field(const std::string& path);

/// Full structural report of a graph (every predicate and witness).
Json graph_report(const CellGraph& g);

Json cell_set_to_json(const CellSet& s);
Json point_to_json(const Point& x);
Json equilibrium_to_json(const EquilibriumReport& e);
Json equilibria_to_json(const std::vector<EquilibriumReport>& eqs);
Json witness_to_json(const Witness& w);
Json verdict_to_json(const Verdict& v);

/// Header "t,x_1_1,...,x_N_dN", one row per sample, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Parses "0.1,0.25,..." into a point.
Point parse_point(const std::string& text);

}  // namespace ccn
