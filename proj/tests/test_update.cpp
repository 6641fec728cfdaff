#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lei;
using lei::test::fixture;
using lei::test::P;

namespace {

constexpr TruthValue T = TruthValue::True, F = TruthValue::False, G = TruthValue::Gap;

PointedModel fig5() { return PointedModel(fixture("fig5.model"), "w0"); }

TruthValue at(const std::map<std::string, TruthValue>& atoms, const std::string& a) {
  auto it = atoms.find(a);
  return it == atoms.end() ? G : it->second;
}

}  // namespace

TEST_CASE("new world atoms on figure 5") {
  {
    const NewWorldAtoms n = new_world_atoms(fig5(), P("p"));
    CHECK(at(n.atoms, "p") == T);
    CHECK(at(n.atoms, "q") == T);
    CHECK(n.unknown.empty());
  }
  {
    const NewWorldAtoms n = new_world_atoms(fig5(), P("~I q"));
    CHECK(at(n.atoms, "p") == G);
    CHECK(at(n.atoms, "q") == T);
  }
  {
    const NewWorldAtoms n = new_world_atoms(fig5(), P("I p"));
    CHECK(at(n.atoms, "p") == T);
    CHECK(at(n.atoms, "q") == T);
  }
}

TEST_CASE("announce p at w0 of figure 5") {
  const UpdateOutcome u = announce(fig5(), P("p"));
  REQUIRE(u.updated());
  CHECK(u.new_world == "w0@1");
  CHECK(u.model.num_worlds() == 5);
  CHECK(u.model.num_edges() == 7);
  CHECK(sat(u.model, "w0", P("~I p & ~I q")));
  CHECK(sat(u.model, u.new_world, P("p & q")));
  CHECK(u.realized);
}

TEST_CASE("announcing ignorance removes it") {
  const UpdateOutcome u = announce(fig5(), P("I p"));
  REQUIRE(u.updated());
  CHECK(sat(u.model, u.new_world, P("I p")));
  CHECK(sat(u.model, "w0", P("~I p")));
}

TEST_CASE("announcing a falsehood is inconsistent") {
  KripkeModel m;
  m.add_world("w");
  m.set_value(0, "p", F);
  const UpdateOutcome u = announce(PointedModel(m, 0), P("p"));
  CHECK(u.kind == UpdateOutcome::Kind::Inconsistent);
  CHECK(eval_dynamic(PointedModel(m, 0), P("[p] (q & ~q)")) == T);
}

TEST_CASE("dynamic evaluation examples") {
  CHECK(eval_dynamic(PointedModel(fixture("fig2.model"), "w0"), P("[p] ~I p")) == T);
  CHECK(eval_dynamic(fig5(), P("[p] ~I q")) == T);
  const PointedModel choc(fixture("fig8.model"), "w0");
  CHECK(sat(choc, P("I p")));
  CHECK(eval_dynamic(choc, P("[p] I p")) == F);
  CHECK(eval_dynamic(PointedModel(fixture("fig8_false.model"), "w0"), P("[p] I p")) == T);
}

TEST_CASE("the additive update leaves the old part alone") {
  Random r(31);
  ModelShape ms;
  ms.max_worlds = 3;
  ms.max_atoms = 2;
  int updated = 0;
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = r.model(ms);
    const int w = r.below(m.num_worlds());
    const Formula f = r.static_formula(m.atoms(), 1);
    const UpdateOutcome u = announce(PointedModel(m, w), f);
    if (!u.updated()) continue;
    ++updated;
    REQUIRE(u.model.num_worlds() == m.num_worlds() + 1);
    const int n = u.model.require_world(u.new_world);
    CHECK(u.model.has_edge(w, n));
    for (int v : m.successors(w)) CHECK(u.model.has_edge(n, v));
    for (int a = 0; a < m.num_worlds(); ++a) {
      for (const auto& at : m.atoms()) CHECK(u.model.value(a, at) == m.value(a, at));
      for (int b = 0; b < m.num_worlds(); ++b) CHECK(u.model.has_edge(a, b) == m.has_edge(a, b));
    }
    for (const auto& [a, v] : u.atoms) CHECK(u.model.value(n, a) == v);
    // Propositional announcements are never false at the new world.
    if (f.modal_depth() == 0) CHECK_FALSE(sat_neg(u.model, n, f));
  }
  CHECK(updated > 50);
}

TEST_CASE("(nI) holds for announced static formulas") {
  Random r(41);
  ModelShape ms;
  ms.max_worlds = 3;
  ms.max_atoms = 2;
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = r.model(ms);
    const Formula f = r.static_formula(m.atoms(), 2);
    const int w = r.below(m.num_worlds());
    CHECK(eval_dynamic(PointedModel(m, w), ann(f, neg(ign(f)))) == T);
  }
}

TEST_CASE("new world report") {
  const NewWorldReport r = verify_new_world(fig5(), P("p"), 1);
  CHECK(r.new_world == "w0@1");
  CHECK(r.ok());
  bool saw_p = false;
  for (const auto& c : r.checks) saw_p = saw_p || c.formula == P("p");
  CHECK(saw_p);
  const NewWorldReport s = verify_new_world(fig5(), P("I p"), 1);
  CHECK(s.ok());
}

TEST_CASE("eliminative update") {
  const PointedModel pm(fixture("fig2.model"), "w0");
  const EliminativeResult keep = eliminative_announce(pm, P("p"));
  CHECK(keep.model.num_worlds() == 1);
  CHECK(keep.model.has_world("w0"));
  const EliminativeResult drop = eliminative_announce(pm, P("p"), EliminationMode::DropAntiSatisfying);
  CHECK(drop.model.num_worlds() == 2);
  CHECK(drop.model.has_world("w0"));
  CHECK(drop.model.has_world("w2"));
  const EliminativeResult same = eliminative_announce(pm, P("p -> p"));
  CHECK(same.model == pm.model);
  CHECK(eval_eliminative(pm, P("I p -> [p] I p")) == T);
  CHECK(eval_eliminative(pm, P("~I (p -> p) -> [p] I (p -> p)")) == T);
  CHECK(eval_dynamic(pm, P("I p -> [p] I p")) == F);
}

TEST_CASE("dynamic content is rejected") {
  CHECK_THROWS_AS(announce(fig5(), P("[p] q")), DynamicFormulaError);
  CHECK_THROWS_AS(eval_dynamic(fig5(), P("[[p] q] q")), DynamicFormulaError);
}

TEST_CASE("inconclusive searches follow the on-unknown policy") {
  KripkeModel m;
  m.add_world("w");
  m.add_atom("p");
  m.add_atom("q");
  UpdateOptions strict;
  strict.bounds.max_candidates = 1;
  const Formula f = P("p | q");
  const UpdateOutcome u = announce(PointedModel(m, 0), f, strict);
  REQUIRE(u.kind == UpdateOutcome::Kind::Unknown);
  CHECK_THROWS_AS(eval_dynamic(PointedModel(m, 0), ann(f, P("p")), strict), OracleInconclusive);
  UpdateOptions lax = strict;
  lax.on_unknown = OnUnknown::AssumeInconsistent;
  CHECK(announce(PointedModel(m, 0), f, lax).kind == UpdateOutcome::Kind::Inconsistent);
  lax.on_unknown = OnUnknown::AssumeConsistent;
  CHECK(announce(PointedModel(m, 0), f, lax).kind != UpdateOutcome::Kind::Inconsistent);
  UpdateOptions normal;
  CHECK(announce(PointedModel(m, 0), f, normal).kind != UpdateOutcome::Kind::Unknown);
}
