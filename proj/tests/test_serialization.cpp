#include <filesystem>
#include <sstream>

#include "ccn/catalog.hpp"
#include "ccn/errors.hpp"
#include "ccn/serialization.hpp"
#include "doctest.h"

using namespace ccn;

TEST_CASE("graphs round-trip through JSON with 1-based ids") {
  const CellGraph g = catalog::figure1({1, 2, 1, 3, 1});
  const Json j = graph_to_json(g);
  CHECK(j["cells"][1]["id"] == 2);
  CHECK(j["cells"][1]["dim"] == 2);
  CHECK(j["arrows"][0] == Json::array({1, 2}));
  CHECK(graph_from_json(j) == g);
  CHECK(graph_from_json(Json::parse(j.dump())) == g);
}

TEST_CASE("malformed graph JSON is an I/O error") {
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"cells": []})")), IoError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"cells": [{"id": 1, "dim": 1}], "arrows": [[1, 2]]})")), IoError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"cells": [{"id": 1, "dim": 0}], "arrows": []})")), IoError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"([1, 2])")), IoError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/graph.json"), IoError);
  CHECK_THROWS_AS(load_graph("builtin:nope"), DomainError);
  CHECK(load_graph("builtin:fig1") == catalog::figure1());
}

TEST_CASE("fields round-trip exactly") {
  const TrigPolyField f = sample_random(catalog::figure1({1, 2, 1, 1, 1}), 2, 0.7, 99);
  const Json j = field_to_json(f);
  const TrigPolyField back = field_from_json(Json::parse(j.dump()));
  CHECK(back == f);
  CHECK(back.fingerprint() == f.fingerprint());
  CHECK(j["fingerprint"] == f.fingerprint());

  Json broken = j;
  broken["cells"][0]["inputs"] = Json::array({5});
  CHECK_THROWS_AS(field_from_json(broken), IoError);
}

TEST_CASE("graph report of figure 1") {
  const Json r = graph_report(catalog::figure1());
  CHECK(r["observation_cells"] == Json::array({5}));
  CHECK(r["self_dependent"] == false);
  CHECK(r["independent_subnetworks"].size() == 3);
  CHECK(r["dimensional_classification"]["kind"] == "neither");
  CHECK(r["dimension_deficit"]["cells"] == Json::array({2, 3, 5}));
}

TEST_CASE("trajectory CSV") {
  const Trajectory traj = integrate(catalog::rotation(0.25), Point::Constant(1, 0.5), 0.5, 0.25);
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  CHECK(out.str() == "t,x_1_1\n0,0.5\n0.25,0.5625\n0.5,0.625\n");
}

TEST_CASE("points and verdicts") {
  const Point p = parse_point("0.25, 0.5,1");
  REQUIRE(p.size() == 3);
  CHECK(p[2] == 1.0);
  CHECK_THROWS_AS(parse_point("0.1,abc"), DomainError);
  CHECK_THROWS_AS(parse_point(""), DomainError);

  Verdict v;
  v.claim = Claim::equilibrium_inverse;
  Witness w;
  w.cells = {0, 1};
  w.distances = {0.0, 0.5};
  v.violate(w);
  const Json j = verdict_to_json(v);
  CHECK(j["holds"] == false);
  CHECK(j["claim"] == "equilibrium_inverse");
  CHECK(j["witness"]["cells"] == Json::array({1, 2}));
}
