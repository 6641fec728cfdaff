#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace lei;
using lei::test::fixture;

TEST_CASE("fig1 fixture") {
  const KripkeModel m = fixture("fig1.model");
  CHECK(m.name() == "fig1");
  REQUIRE(m.num_worlds() == 4);
  CHECK(m.num_edges() == 3);
  const int w0 = m.require_world("w0");
  CHECK(m.value(w0, "p") == TruthValue::True);
  CHECK(m.value(w0, "r") == TruthValue::True);
  CHECK(m.value(m.require_world("w2"), "q") == TruthValue::False);
  CHECK(m.value(m.require_world("w1"), "q") == TruthValue::Gap);
  for (const char* v : {"w1", "w2", "w3"}) CHECK(m.has_edge(w0, m.require_world(v)));
}

TEST_CASE("fig5 fixture lists four worlds and three edges") {
  const KripkeModel m = fixture("fig5.model");
  CHECK(m.num_worlds() == 4);
  CHECK(m.num_edges() == 3);
  const std::string text = save_model(m);
  for (const char* l : {"world w0 { p=T q=T }", "world w3 { p=F", "edge w0 w1", "edge w0 w2", "edge w0 w3"})
    CHECK(text.find(l) != std::string::npos);
}

TEST_CASE("gap atoms declared with G stay in the signature") {
  const KripkeModel m = fixture("fig8.model");
  CHECK(m.value(m.require_world("w1"), "p") == TruthValue::Gap);
  CHECK(m.atom_index("p") >= 0);
}

TEST_CASE("singleton model") {
  const KripkeModel m = load_model("world w0 { }\n");
  CHECK(m.num_worlds() == 1);
  CHECK(m.num_edges() == 0);
  const std::string text = save_model(m);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(load_model(text) == m);
}

TEST_CASE("malformed files are rejected with a line number") {
  CHECK_THROWS_AS(load_model("world w0 { }\nedge w0 w9\n"), ModelError);
  CHECK_THROWS_AS(load_model(""), ModelError);
  CHECK_THROWS_AS(load_model("world w0 { p=X }\n"), ModelError);
  CHECK_THROWS_AS(load_model("world w0 { p=T p=F }\n"), ModelError);
  CHECK_THROWS_AS(load_model("world w0 { }\nworld w0 { }\n"), ModelError);
  CHECK_THROWS_AS(load_model("world w0 p=T\n"), ModelError);
  CHECK_THROWS_AS(load_model("world w0 { }\nfrobnicate\n"), ModelError);
  try {
    load_model("model m\nworld w0 { }\n\nedge w0 nowhere\n");
    FAIL("accepted");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  const KripkeModel m = load_model("# header\nmodel x  # trailing\n\nworld a { p=T }  # c\nedge a a\n");
  CHECK(m.name() == "x");
  CHECK(m.has_edge(0, 0));
}

TEST_CASE("save and load round trip on random models") {
  Random r(3);
  ModelShape s;
  s.max_worlds = 5;
  s.max_atoms = 4;
  for (int i = 0; i < 500; ++i) {
    const KripkeModel m = r.model(s);
    const KripkeModel back = load_model(save_model(m));
    REQUIRE(back == m);
    CHECK(save_model(back) == save_model(m));
  }
}

TEST_CASE("dot output") {
  const KripkeModel single = load_model("world w0 { p=T }\n");
  const std::string d = to_dot(single);
  CHECK(d.find("label=\"p\"") != std::string::npos);
  CHECK(d.find("->") == std::string::npos);

  const KripkeModel m = fixture("fig5.model");
  const PointedModel pm(m, "w0");
  const UpdateOutcome u = announce(pm, parse("p"));
  REQUIRE(u.updated());
  const std::string g = to_dot(u.model);
  int nodes = 0, edges = 0;
  for (std::size_t at = g.find("xlabel"); at != std::string::npos; at = g.find("xlabel", at + 1)) ++nodes;
  for (std::size_t at = g.find("->"); at != std::string::npos; at = g.find("->", at + 1)) ++edges;
  CHECK(nodes == 5);
  CHECK(edges == 7);
}

TEST_CASE("world ids") {
  KripkeModel m;
  m.add_world("w0");
  CHECK_THROWS_AS(m.add_world("w0"), ModelError);
  CHECK(m.fresh_id("w0") == "w0@1");
  m.add_world("w0@1");
  CHECK(m.fresh_id("w0") == "w0@2");
  CHECK_THROWS_AS(m.require_world("nope"), ModelError);
}
