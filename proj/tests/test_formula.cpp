#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lei;
using lei::test::P;

TEST_CASE("parser builds the desugared tree") {
  const Formula p = atom("p"), q = atom("q");
  CHECK(P("I p") == ign(p));
  CHECK(P("p | q") == neg(conj(neg(p), neg(q))));
  CHECK(P("[p] ~I p") == ann(p, neg(ign(p))));
  CHECK(P("p <-> q") == conj(imp(p, q), imp(q, p)));
  CHECK(P("((p))") == p);
}

TEST_CASE("precedence and associativity") {
  const Formula p = atom("p"), q = atom("q"), r = atom("r");
  CHECK(P("p & q | r") == disj(conj(p, q), r));
  CHECK(P("p | q & r") == disj(p, conj(q, r)));
  CHECK(P("p -> q -> r") == imp(p, imp(q, r)));
  CHECK(P("p & q -> r") == imp(conj(p, q), r));
  CHECK(P("p -> q <-> r") == iff(imp(p, q), r));
  CHECK(P("p <-> q <-> r") == iff(iff(p, q), r));
  CHECK(P("~p & q") == conj(neg(p), q));
  CHECK(P("I p & q") == conj(ign(p), q));
  CHECK(P("[p] q & r") == conj(ann(p, q), r));
  CHECK(P("[p -> q] r") == ann(imp(p, q), r));
  CHECK(P("p & q & r") == conj(conj(p, q), r));
  CHECK(P("p | q | r") == disj(disj(p, q), r));
}

TEST_CASE("renderer output") {
  const Formula p = atom("p"), q = atom("q");
  CHECK(render(ign(p)) == "I p");
  CHECK(render(conj(p, neg(p))) == "p & ~p");
  CHECK(render(ann(p, ign(q))) == "[p] I q");
  CHECK(render(disj(p, q)) == "p | q");
  CHECK(render(imp(imp(p, q), p)) == "(p -> q) -> p");
  CHECK(render(conj(p, conj(q, p))) == "p & (q & p)");
  CHECK(render(iff(p, q)) == "p <-> q");
  CHECK(render(neg(neg(p))) == "~~p");
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(P(""), ParseError);
  CHECK_THROWS_AS(P("p &"), ParseError);
  CHECK_THROWS_AS(P("(p"), ParseError);
  CHECK_THROWS_AS(P("[p q"), ParseError);
  CHECK_THROWS_AS(P("p q"), ParseError);
  CHECK_THROWS_AS(P("P"), ParseError);
  try {
    P("p & & q");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("round trip on random formulas") {
  Random r(7);
  FormulaShape s;
  s.atoms = {"p", "q", "r"};
  s.max_depth = 5;
  s.announcements = true;
  s.content_depth = 2;
  for (int i = 0; i < 3000; ++i) {
    const Formula f = r.formula(s);
    const std::string text = render(f);
    INFO(text);
    REQUIRE(parse(text) == f);
    CHECK(render(parse(text)) == text);
  }
}

TEST_CASE("modal depth and staticity") {
  CHECK(P("p & q").modal_depth() == 0);
  CHECK(P("I (p & I q)").modal_depth() == 2);
  CHECK(P("[p] I q").modal_depth() == 2);
  CHECK(P("[I p] q").modal_depth() == 2);
  CHECK(P("I p").is_static());
  CHECK_FALSE(P("~[p] q").is_static());
}

TEST_CASE("uniform substitution") {
  {
    const auto r = uniform_substitute(P("p -> p"), {{"p", P("q")}});
    CHECK(r.formula == P("q -> q"));
    CHECK(r.announcement_safe);
  }
  {
    const auto r = uniform_substitute(P("I p | ~I p"), {{"p", P("q & r")}});
    CHECK(r.formula == P("I (q & r) | ~I (q & r)"));
    CHECK(r.announcement_safe);
  }
  {
    const auto r = uniform_substitute(P("[p] ~I p"), {{"p", P("q")}});
    CHECK(r.formula == P("[q] ~I q"));
    CHECK_FALSE(r.announcement_safe);
  }
  {
    const auto r = uniform_substitute(P("p & q"), {{"p", P("q")}, {"q", P("p")}});
    CHECK(r.formula == P("q & p"));
  }
}

TEST_CASE("ordering and hashing are consistent with equality") {
  Random r(11);
  FormulaShape s;
  s.max_depth = 3;
  for (int i = 0; i < 500; ++i) {
    const Formula a = r.formula(s), b = r.formula(s);
    CHECK((a == b) == (!(a < b) && !(b < a)));
    if (a == b) CHECK(std::hash<Formula>{}(a) == std::hash<Formula>{}(b));
    CHECK(parse(render(a)) == a);
  }
}

TEST_CASE("conj_all and disj_all nest to the left") {
  const Formula p = atom("p"), q = atom("q"), r = atom("r");
  CHECK(conj_all({p, q, r}) == conj(conj(p, q), r));
  CHECK(disj_all({p, q, r}) == disj(disj(p, q), r));
  CHECK(conj_all({p}) == p);
}

TEST_CASE("atoms and subformulas") {
  const Formula f = P("[p] I (q -> r)");
  CHECK(atoms_of(f) == std::set<std::string>{"p", "q", "r"});
  CHECK(subformulas(f).count(P("q -> r")) == 1);
}
