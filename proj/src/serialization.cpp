#include "ccn/serialization.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "ccn/catalog.hpp"
#include "ccn/errors.hpp"

namespace ccn {

namespace {

std::size_t cell_id(const Json& v, std::size_t n, const char* what) {
  if (!v.is_number_integer()) throw IoError(std::string(what) + ": cell id must be an integer");
  const auto id = v.get<long long>();
  if (id < 1 || static_cast<std::size_t>(id) > n) {
    throw IoError(std::string(what) + ": cell id " + std::to_string(id) + " outside [1, " + std::to_string(n) + "]");
  }
  return static_cast<std::size_t>(id - 1);
}

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

Json graph_to_json(const CellGraph& g) {
  Json cells = Json::array();
  for (CellIndex i = 0; i < g.size(); ++i) cells.push_back({{"id", i + 1}, {"dim", g.dim(i)}});
  Json arrows = Json::array();
  for (const Arrow& a : g.arrows()) arrows.push_back({a.from + 1, a.to + 1});
  return {{"cells", cells}, {"arrows", arrows}};
}

CellGraph graph_from_json(const Json& j) {
  const Json& cells = member(j, "cells");
  if (!cells.is_array() || cells.empty()) throw IoError("'cells' must be a nonempty array");
  const std::size_t n = cells.size();
  std::vector<std::size_t> dims(n, 0);
  for (const Json& c : cells) {
    const std::size_t i = cell_id(member(c, "id"), n, "cells");
    if (dims[i] != 0) throw IoError("cell id " + std::to_string(i + 1) + " listed twice");
    const Json& d = c.contains("dim") ? c.at("dim") : Json(1);
    if (!d.is_number_integer() || d.get<long long>() < 1) throw IoError("cell dim must be a positive integer");
    dims[i] = d.get<std::size_t>();
  }
  std::vector<Arrow> arrows;
  const Json empty = Json::array();
  const Json& list = j.contains("arrows") ? j.at("arrows") : empty;
  if (!list.is_array()) throw IoError("'arrows' must be an array");
  for (const Json& a : list) {
    if (!a.is_array() || a.size() != 2) throw IoError("each arrow must be a [from, to] pair");
    arrows.push_back({cell_id(a[0], n, "arrows"), cell_id(a[1], n, "arrows")});
  }
  return CellGraph(std::move(dims), std::move(arrows));
}

Json field_to_json(const TrigPolyField& f) {
  const CellGraph& g = f.graph();
  Json cells = Json::array();
  for (CellIndex i = 0; i < g.size(); ++i) {
    Json inputs = Json::array();
    for (CellIndex j : g.inputs(i)) inputs.push_back(j + 1);
    Json components = Json::array();
    for (std::size_t r = 0; r < g.dim(i); ++r) {
      Json terms = Json::array();
      for (const FourierTerm& t : f.terms(i, r)) terms.push_back({{"k", t.k}, {"a", t.a}, {"b", t.b}});
      components.push_back(std::move(terms));
    }
    cells.push_back({{"id", i + 1}, {"inputs", inputs}, {"components", components}});
  }
  return {{"graph", graph_to_json(g)}, {"degree", f.degree()}, {"fingerprint", f.fingerprint()}, {"cells", cells}};
}

TrigPolyField field_from_json(const Json& j) {
  CellGraph g = graph_from_json(member(j, "graph"));
  const Json& degree = member(j, "degree");
  if (!degree.is_number_integer()) throw IoError("'degree' must be an integer");
  const Json& cells = member(j, "cells");
  if (!cells.is_array() || cells.size() != g.size()) throw IoError("'cells' must list every cell of the graph");
  std::vector<std::vector<ComponentTerms>> blocks(g.size());
  std::vector<bool> seen(g.size(), false);
  for (const Json& c : cells) {
    const std::size_t i = cell_id(member(c, "id"), g.size(), "field cells");
    if (seen[i]) throw IoError("field lists cell " + std::to_string(i + 1) + " twice");
    seen[i] = true;
    if (c.contains("inputs")) {
      std::vector<std::size_t> listed;
      for (const Json& v : c.at("inputs")) listed.push_back(cell_id(v, g.size(), "inputs") );
      auto expected = g.inputs(i);
      if (!std::equal(listed.begin(), listed.end(), expected.begin(), expected.end())) {
        throw IoError("cell " + std::to_string(i + 1) + ": 'inputs' disagrees with the graph arrows");
      }
    }
    for (const Json& comp : member(c, "components")) {
      ComponentTerms terms;
      for (const Json& t : comp) {
        FourierTerm term;
        term.k = member(t, "k").get<std::vector<int>>();
        term.a = t.value("a", 0.0);
        term.b = t.value("b", 0.0);
        terms.push_back(std::move(term));
      }
      blocks[i].push_back(std::move(terms));
    }
  }
  return TrigPolyField(std::move(g), std::move(blocks), degree.get<int>());
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

CellGraph load_graph(const std::string& spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return catalog::builtin_graph(spec.substr(prefix.size()));
  try {
    return graph_from_json(read_json_file(spec));
  } catch (const Json::exception& e) {
    throw IoError("malformed graph spec '" + spec + "': " + e.what());
  }
}

TrigPolyField load_field(const std::string& path) {
  try {
    return field_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw IoError("malformed field file '" + path + "': " + e.what());
  }
}

Json cell_set_to_json(const CellSet& s) { return s.ids(); }

Json point_to_json(const Point& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

Json graph_report(const CellGraph& g) {
  Json r;
  r["graph"] = graph_to_json(g);
  r["n_cells"] = g.size();
  r["total_dimension"] = g.total_dimension();
  Json direct = Json::object();
  Json indirect = Json::object();
  for (CellIndex i = 0; i < g.size(); ++i) {
    direct[std::to_string(i + 1)] = cell_set_to_json(direct_inputs(g, i));
    indirect[std::to_string(i + 1)] = cell_set_to_json(indirect_inputs(g, i));
  }
  r["direct_inputs"] = direct;
  r["indirect_inputs"] = indirect;
  r["observation_cells"] = cell_set_to_json(observation_cells(g));
  r["strongly_connected"] = is_strongly_connected(g);
  r["self_dependent"] = is_self_dependent(g);
  try {
    Json subs = Json::array();
    for (const auto& sub : independent_subnetworks(g)) {
      subs.push_back({{"cells", cell_set_to_json(sub.cells)}, {"strongly_connected", sub.strongly_connected}});
    }
    r["independent_subnetworks"] = subs;
    const auto cls = dimensional_classification(g);
    Json witnesses = Json::array();
    for (const auto& w : cls.witnesses) {
      witnesses.push_back({{"cells", cell_set_to_json(w.cells)},
                           {"inputs", cell_set_to_json(w.inputs)},
                           {"d_I", w.cells.dim_total()},
                           {"d_J", w.inputs.dim_total()}});
    }
    r["dimensional_classification"] = {
        {"kind", to_string(cls.kind)}, {"witness_count", cls.witness_count}, {"witnesses", witnesses}};
    if (const auto deficit = find_dimension_deficit(g)) {
      r["dimension_deficit"] = {{"cells", cell_set_to_json(deficit->cells)},
                                {"inputs", cell_set_to_json(deficit->inputs)},
                                {"d_I", deficit->cells.dim_total()},
                                {"d_J", deficit->inputs.dim_total()}};
    } else {
      r["dimension_deficit"] = nullptr;
    }
  } catch (const CapacityError& e) {
    r["enumeration_error"] = e.what();
  }
  return r;
}

Json equilibrium_to_json(const EquilibriumReport& e) {
  Json eig = Json::array();
  for (const auto& l : e.spectrum) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
  return {{"point", point_to_json(e.point)},
          {"residual", e.residual},
          {"eigenvalues", eig},
          {"min_singular_value", e.min_singular_value},
          {"simple", e.simple},
          {"hyperbolic", e.hyperbolic}};
}

Json equilibria_to_json(const std::vector<EquilibriumReport>& eqs) {
  Json out = Json::array();
  for (const auto& e : eqs) out.push_back(equilibrium_to_json(e));
  return out;
}

Json witness_to_json(const Witness& w) {
  Json cells = Json::array();
  for (CellIndex c : w.cells) cells.push_back(c + 1);
  Json points = Json::array();
  for (const Point& p : w.points) points.push_back(point_to_json(p));
  return {{"cells", cells},         {"samples", w.samples}, {"times", w.times},
          {"distances", w.distances}, {"points", points},   {"note", w.note}};
}

Json verdict_to_json(const Verdict& v) {
  return {{"claim", to_string(v.claim)},
          {"holds", v.holds},
          {"premise_met", v.premise_met},
          {"witness", v.witness ? witness_to_json(*v.witness) : Json(nullptr)},
          {"tolerances", v.tolerances},
          {"annotations", v.annotations}};
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const auto offsets = traj.cell_offsets();
  out << 't';
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    for (std::size_t c = 0; c < offsets[i + 1] - offsets[i]; ++c) out << ",x_" << i + 1 << '_' << c + 1;
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << traj.time(k);
    for (Eigen::Index c = 0; c < traj.states().cols(); ++c) out << ',' << traj.states()(static_cast<Eigen::Index>(k), c);
    out << '\n';
  }
}

Point parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("cannot parse coordinate '" + item + "'");
    }
  }
  if (values.empty()) throw DomainError("empty point");
  return Eigen::Map<Point>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace ccn
