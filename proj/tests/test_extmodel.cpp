#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lei;
using lei::test::fixture;
using lei::test::P;
using lei::test::slurp;

namespace {

ExtendedModel ext(const std::string& name) { return load_extended_model(slurp("models/" + name)); }

PropertyStatus status(const PropertyReport& r, const char* name) { return r.get(name).status; }

}  // namespace

TEST_CASE("an empty relation makes every announcement vacuous") {
  ExtendedModel em;
  em.core = load_model("world w0 { p=T }\n");
  CHECK(sat_plus(em, 0, P("[p] (q & ~q)")));
  CHECK(sat_plus(em, 0, P("[p] ~p")));
  CHECK_FALSE(sat_plus_neg(em, 0, P("[p] q")));
}

TEST_CASE("the two-world counterexample") {
  const ExtendedModel gap = ext("counterexample.ext");
  const int w0 = gap.core.require_world("w0");
  CHECK(sat_plus(gap, w0, P("[p] ~I p")));

  const ExtendedModel em = ext("counterexample_p.ext");
  CHECK(sat_plus(em, em.core.require_world("w0"), P("[p] I p")));
  CHECK(eval_dynamic(PointedModel(em.core, "w0"), P("[p] ~I p")) == TruthValue::True);
  const PropertyReport r = check_extension_properties(em, SearchBounds{}, 1);
  CHECK(status(r, "Inv-p") == PropertyStatus::Pass);
  CHECK(status(r, "Pr1") == PropertyStatus::Fail);
  CHECK(status(r, "Func") == PropertyStatus::Fail);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("induced model for announcing p on figure 5") {
  const KripkeModel m = fixture("fig5.model");
  const int w0 = m.require_world("w0");
  const ExtendedModel em = induce_extended(m, {P("p")}, {w0});
  CHECK(em.core.num_worlds() == 6);
  const std::vector<int> to = em.successors(P("p"), w0);
  REQUIRE(to.size() == 1);
  CHECK(em.core.id(to[0]) == "w0.1");
  CHECK(em.core.has_world("w0.1@1"));
  CHECK(sat_plus(em, w0, P("[p] ~I p")));
  CHECK(sat_plus(em, w0, P("[p] ~I q")));
  CHECK(sat_plus(em, w0, P("I p")));
  const PropertyReport r = check_extension_properties(em, SearchBounds{}, 1);
  for (const auto& p : r.properties) {
    CAPTURE(p.name);
    CAPTURE(p.notes.empty() ? std::string() : p.notes.front());
    CHECK(p.status == PropertyStatus::Pass);
  }
}

TEST_CASE("flipping an atom at the target breaks Inv-p") {
  const KripkeModel m = fixture("fig5.model");
  ExtendedModel em = induce_extended(m, {P("p")}, {m.require_world("w0")});
  em.core.set_value(em.core.require_world("w0.1"), "q", TruthValue::Gap);
  const PropertyReport r = check_extension_properties(em, SearchBounds{}, 1);
  CHECK(status(r, "Inv-p") == PropertyStatus::Fail);
  CHECK(status(r, "Inv-n") == PropertyStatus::Pass);
  em.core.set_value(em.core.require_world("w0.1"), "q", TruthValue::False);
  CHECK(status(check_extension_properties(em, SearchBounds{}, 1), "Inv-n") == PropertyStatus::Fail);
}

TEST_CASE("no announcements leave the core unchanged") {
  const KripkeModel m = fixture("fig1.model");
  const ExtendedModel em = induce_extended(m, {}, {0, 1});
  CHECK(em.core == m);
  CHECK(em.transitions.empty());
  const ExtendedModel st = induce_for(m, {P("I p & q")}, {0, 1, 2, 3});
  CHECK(st.core == m);
}

TEST_CASE("inconsistent announcements add no transition") {
  KripkeModel m;
  m.add_world("w");
  m.set_value(0, "p", TruthValue::False);
  const ExtendedModel em = induce_extended(m, {P("p")}, {0});
  CHECK(em.successors(P("p"), 0).empty());
  CHECK(em.core.num_worlds() == 1);
  CHECK(sat_plus(em, 0, P("[p] (q & ~q)")));
  CHECK(check_extension_properties(em, SearchBounds{}, 1).all_pass());
}

TEST_CASE("self-loops are carried to the copy") {
  const KripkeModel m = load_model("world w0 { p=T }\nedge w0 w0\n");
  const Formula f = P("[p -> p] I p");
  const ExtendedModel em = induce_for(m, {f}, {0});
  const int c = em.core.require_world("w0.1");
  CHECK(em.core.has_edge(c, c));
  CHECK_FALSE(em.core.has_edge(c, 0));
  CHECK(sat_plus(em, 0, f) == (eval_dynamic(PointedModel(m, 0), f) == TruthValue::True));
  const PropertyReport r = check_extension_properties(em, SearchBounds{}, 1);
  CHECK(status(r, "Pr1") == PropertyStatus::Pass);
  CHECK(status(r, "Pr2") == PropertyStatus::Pass);
}

TEST_CASE("satisfaction agrees with the dynamic evaluator on random cores") {
  Random r(77);
  ModelShape ms;
  ms.max_worlds = 3;
  ms.max_atoms = 2;
  for (int i = 0; i < 150; ++i) {
    const KripkeModel m = r.model(ms);
    FormulaShape fs;
    fs.atoms = m.atoms();
    if (fs.atoms.empty()) fs.atoms = {"p"};
    fs.max_depth = 2;
    const Formula f = ann(r.static_formula(fs.atoms, 1), r.formula(fs));
    std::vector<int> all;
    for (int w = 0; w < m.num_worlds(); ++w) all.push_back(w);
    const ExtendedModel em = induce_for(m, {f}, all);
    CAPTURE(render(f));
    CAPTURE(save_model(m));
    for (int w = 0; w < m.num_worlds(); ++w) {
      const TruthValue d = eval_dynamic(PointedModel(m, w), f);
      CHECK(sat_plus(em, w, f) == (d == TruthValue::True));
      CHECK(sat_plus_neg(em, w, f) == (d == TruthValue::False));
    }
  }
}

TEST_CASE("extended model files") {
  const ExtendedModel em = ext("counterexample.ext");
  CHECK(em.core.num_worlds() == 2);
  CHECK(em.successors(P("p"), 0) == std::vector<int>{1});
  const ExtendedModel back = load_extended_model(save_extended_model(em));
  CHECK(back.core == em.core);
  CHECK(back.transitions == em.transitions);

  const ExtendedModel empty = load_extended_model("world w0 { }\ntrans \"q\"\n");
  REQUIRE(empty.transitions.count(P("q")));
  CHECK(empty.transitions.at(P("q")).empty());
  CHECK(save_extended_model(empty).find("trans \"q\"\n") != std::string::npos);

  CHECK_THROWS_AS(load_extended_model("world w0 { }\ntrans \"p\" w0 w9\n"), ModelError);
  CHECK_THROWS_AS(load_extended_model("world w0 { }\ntrans p w0 w0\n"), ModelError);
  CHECK_THROWS_AS(load_extended_model("world w0 { }\ntrans \"p &\" w0 w0\n"), ModelError);
  CHECK_THROWS_AS(load_extended_model("world w0 { }\ntrans \"p\" w0\n"), ModelError);
}

TEST_CASE("dot output marks transitions") {
  const std::string d = to_dot(ext("counterexample.ext"));
  CHECK(d.find("style=dashed") != std::string::npos);
  CHECK(d.find("[p]") != std::string::npos);
}

TEST_CASE("announcement content must be static") {
  const KripkeModel m = fixture("fig5.model");
  CHECK_THROWS_AS(induce_extended(m, {P("[p] q")}, {0}), DynamicFormulaError);
}
