#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lei;
using lei::test::fixture;
using lei::test::P;

namespace {

constexpr TruthValue T = TruthValue::True, F = TruthValue::False, G = TruthValue::Gap;

KripkeModel single(TruthValue p, TruthValue q = G) {
  KripkeModel m;
  m.add_world("w0");
  m.add_atom("p");
  m.add_atom("q");
  m.set_value(0, "p", p);
  m.set_value(0, "q", q);
  return m;
}

}  // namespace

TEST_CASE("connective tables") {
  // rows: p, q, ~p, p & q, p -> q
  struct Row {
    TruthValue p, q, np, pq, imp;
  };
  const Row rows[] = {
      {T, T, F, T, T}, {T, F, F, F, F}, {T, G, F, G, F}, {F, T, T, F, T}, {F, F, T, F, T},
      {F, G, T, F, T}, {G, T, G, G, T}, {G, F, G, F, T}, {G, G, G, G, T},
  };
  for (const auto& r : rows) {
    const KripkeModel m = single(r.p, r.q);
    CAPTURE(to_string(r.p));
    CAPTURE(to_string(r.q));
    CHECK(eval3(m, 0, P("~p")) == r.np);
    CHECK(eval3(m, 0, P("p & q")) == r.pq);
    CHECK(eval3(m, 0, P("p -> q")) == r.imp);
  }
}

TEST_CASE("figure 1") {
  const KripkeModel m = fixture("fig1.model");
  CHECK(eval3(m, "w0", P("I p & I q & I r")) == T);
  CHECK(sat(m, "w0", P("I p")));
  CHECK_FALSE(sat_neg(m, "w0", P("I p")));
  CHECK(eval3(m, "w1", P("I p")) == F);
  CHECK_FALSE(valid_in_model(m, P("I p")));
}

TEST_CASE("gap cases") {
  const KripkeModel m = single(G);
  CHECK(eval3(m, 0, P("p -> q")) == T);
  CHECK_FALSE(sat(m, 0, P("p")));
  CHECK_FALSE(sat_neg(m, 0, P("p")));
  CHECK(eval3(m, 0, P("I p")) == F);
}

TEST_CASE("figure 5: q is true but not ignored") {
  const KripkeModel m = fixture("fig5.model");
  CHECK(sat_neg(m, "w0", P("I q")));
  CHECK(sat(m, "w0", P("q & ~I q")));
  CHECK(sat(m, "w0", P("I p")));
}

TEST_CASE("validities in every model") {
  Random r(5);
  ModelShape s;
  s.max_worlds = 4;
  s.max_atoms = 3;
  for (int i = 0; i < 300; ++i) {
    const KripkeModel m = r.model(s);
    CHECK(valid_in_model(m, P("p -> p")));
    CHECK(valid_in_model(m, P("I p | ~I p")));
    CHECK(valid_in_model(m, P("I p -> p")));
  }
}

TEST_CASE("I is two-valued, sat and sat_neg exclude each other") {
  Random r(9);
  ModelShape ms;
  ms.max_worlds = 4;
  ms.max_atoms = 3;
  FormulaShape fs;
  fs.atoms = {"p", "q", "r"};
  fs.max_depth = 4;
  for (int i = 0; i < 2000; ++i) {
    const KripkeModel m = r.model(ms);
    const Formula f = r.formula(fs);
    for (int w = 0; w < m.num_worlds(); ++w) {
      CHECK(eval3(m, w, ign(f)) != G);
      CHECK_FALSE((sat(m, w, f) && sat_neg(m, w, f)));
      CHECK((eval3(m, w, f) == T) == sat(m, w, f));
      CHECK((eval3(m, w, f) == F) == sat_neg(m, w, f));
    }
  }
}

TEST_CASE("self-loops never matter") {
  Random r(13);
  ModelShape ms;
  ms.max_worlds = 4;
  ms.self_loops = false;
  FormulaShape fs;
  fs.max_depth = 4;
  for (int i = 0; i < 500; ++i) {
    const KripkeModel m = r.model(ms);
    KripkeModel loops = m;
    for (int w = 0; w < m.num_worlds(); ++w)
      if (r.chance(0.5)) loops.add_edge(w, w);
    const Formula f = r.formula(fs);
    for (int w = 0; w < m.num_worlds(); ++w) CHECK(eval3(m, w, f) == eval3(loops, w, f));
  }
}

TEST_CASE("theory slices") {
  {
    KripkeModel m = single(T);
    const TheorySlice s = theory_slice(m, 0, 0);
    CHECK(s.contains(P("p")));
    CHECK_FALSE(s.contains(P("q")));
    CHECK_FALSE(s.contains(P("~p")));
  }
  {
    const TheorySlice s = theory_slice(fixture("fig2.model"), fixture("fig2.model").require_world("w0"), 1);
    CHECK(s.contains(P("I p")));
  }
  {
    const KripkeModel m = fixture("fig5.model");
    const TheorySlice s = theory_slice(m, m.require_world("w0"), 1);
    CHECK(s.contains(P("I p")));
    CHECK(s.contains(P("~I q")));
    CHECK_FALSE(s.contains(P("~I p")));
    for (const auto& f : s.formulas) CHECK(sat(m, "w0", f));
  }
}
