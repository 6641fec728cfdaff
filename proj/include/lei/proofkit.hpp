#pragma once

// Hilbert-style derivations for Lt2, LEI and LEI^up.
//
// A derivation is a numbered list of lines, each carrying an explicit context
// (a multiset of assumptions), a formula and a justification. Macro lines are
// verified by expanding them into primitive lines and checking the expansion.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/syntax.hpp"

namespace lei {

enum class System { Lt2, LEI, LEIup };

inline const char* to_string(System s) {
  switch (s) {
    case System::Lt2: return "Lt2";
    case System::LEI: return "LEI";
    default: return "LEIup";
  }
}

inline std::optional<System> parse_system(const std::string& s) {
  if (s == "Lt2") return System::Lt2;
  if (s == "LEI") return System::LEI;
  if (s == "LEIup") return System::LEIup;
  return std::nullopt;
}

// --- axiom schemes -----------------------------------------------------------

// Pattern atoms phi, psi, chi, rho range over formulas; p and q range over
// atoms and must be distinct when both occur.
struct AxiomScheme {
  std::string id;
  Formula pattern;
  System system;
};

inline bool is_metavariable(const std::string& n) { return n == "phi" || n == "psi" || n == "chi" || n == "rho"; }
inline bool is_atom_slot(const std::string& n) { return n == "p" || n == "q"; }

inline const std::vector<AxiomScheme>& axiom_schemes() {
  static const std::vector<AxiomScheme> schemes = [] {
    const std::vector<std::pair<std::pair<const char*, const char*>, System>> src = {
        {{"A1", "(phi & psi) -> phi"}, System::Lt2},
        {{"A2", "(phi & psi) -> psi"}, System::Lt2},
        {{"A3", "((phi -> psi) & (phi -> chi)) -> (phi -> (psi & chi))"}, System::Lt2},
        {{"A4", "phi -> (phi | psi)"}, System::Lt2},
        {{"A5", "psi -> (phi | psi)"}, System::Lt2},
        {{"A6", "((phi -> chi) & (psi -> chi)) -> ((phi | psi) -> chi)"}, System::Lt2},
        {{"A7", "(phi & (psi | chi)) -> ((phi & psi) | (phi & chi))"}, System::Lt2},
        {{"A8", "~(phi | psi) <-> (~phi & ~psi)"}, System::Lt2},
        {{"A9", "~(phi & psi) <-> (~phi | ~psi)"}, System::Lt2},
        {{"A10", "phi <-> ~~phi"}, System::Lt2},
        {{"A11", "((phi -> psi) & phi) -> psi"}, System::Lt2},
        {{"A12", "psi -> (phi -> psi)"}, System::Lt2},
        {{"A13", "phi | (phi -> psi)"}, System::Lt2},
        {{"A14", "phi -> (psi | ~(phi -> psi))"}, System::Lt2},
        {{"fact", "I phi -> phi"}, System::LEI},
        {{"IAND", "(I phi & I psi) -> I (phi | psi)"}, System::LEI},
        {{"emI", "I phi | ~I phi"}, System::LEI},
        {{"AI", "((phi & I ~psi) & [phi] I psi) -> I (psi | ~psi)"}, System::LEIup},
        {{"dAimp", "[phi] (psi -> chi) <-> ([phi] psi -> [phi] chi)"}, System::LEIup},
        {{"nI", "[phi] ~I phi"}, System::LEIup},
        {{"nA1", "~[phi] psi -> [phi] (psi -> (p & ~p))"}, System::LEIup},
        {{"nA2", "~phi -> [phi] (p & ~p)"}, System::LEIup},
        {{"dAor", "[phi] (psi | chi) <-> ([phi] psi | [phi] chi)"}, System::LEIup},
        {{"emA", "[phi] psi | ~[phi] psi"}, System::LEIup},
        {{"INV", "(p -> [phi] p) & (~p -> [phi] ~p)"}, System::LEIup},
        {{"nAp1", "~[phi] ~p -> (p | [phi] (p -> (q & ~q)))"}, System::LEIup},
        {{"nAp2", "~[phi] p -> (~p | [phi] (~p -> (q & ~q)))"}, System::LEIup},
        {{"uA", "([phi] psi & [phi] ~psi) -> (phi -> (p & ~p))"}, System::LEIup},
    };
    std::vector<AxiomScheme> out;
    for (const auto& [kv, sys] : src) out.push_back({kv.first, parse(kv.second), sys});
    return out;
  }();
  return schemes;
}

inline const AxiomScheme* find_scheme(const std::string& id) {
  for (const auto& s : axiom_schemes())
    if (s.id == id) return &s;
  return nullptr;
}

namespace detail {
inline bool match_into(const Formula& pat, const Formula& f, Substitution& s) {
  if (pat.is(Op::Atom)) {
    const std::string& n = pat.name();
    if (is_atom_slot(n) && !f.is(Op::Atom)) return false;
    auto it = s.find(n);
    if (it != s.end()) return it->second == f;
    s.emplace(n, f);
    return true;
  }
  if (pat.op() != f.op()) return false;
  if (!match_into(pat.lhs(), f.lhs(), s)) return false;
  return pat.arity() == 1 || match_into(pat.rhs(), f.rhs(), s);
}
}  // namespace detail

// The unique assignment making the scheme's pattern equal to f, if any.
inline std::optional<Substitution> match_axiom(const Formula& f, const AxiomScheme& s) {
  Substitution sub;
  if (!detail::match_into(s.pattern, f, sub)) return std::nullopt;
  auto p = sub.find("p");
  auto q = sub.find("q");
  if (p != sub.end() && q != sub.end() && p->second == q->second) return std::nullopt;
  return sub;
}

inline Formula instantiate(const AxiomScheme& s, const Substitution& sub) {
  for (const auto& a : atoms_of(s.pattern))
    if (!sub.count(a)) throw Error("axiom " + s.id + ": no value for " + a);
  for (const auto& [k, v] : sub)
    if (is_atom_slot(k) && !v.is(Op::Atom)) throw Error("axiom " + s.id + ": " + k + " must be an atom");
  return uniform_substitute(s.pattern, sub).formula;
}

inline Formula instantiate(const std::string& id, const Substitution& sub) {
  const AxiomScheme* s = find_scheme(id);
  if (!s) throw Error("unknown axiom scheme '" + id + "'");
  return instantiate(*s, sub);
}

// --- derivations -------------------------------------------------------------

struct Justification {
  enum class Kind { Axiom, Assume, Rule, Macro, Given };
  Kind kind = Kind::Assume;
  std::string name;
  Substitution subst;
  std::vector<int> premises;  // line numbers
};

using Context = std::vector<Formula>;

struct Line {
  int number = 0;
  Context context;
  Formula formula;
  Justification just;
};

struct Derivation {
  std::vector<Line> lines;

  // Index of the line with the given number, or -1.
  int index_of(int number) const {
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i].number == number) return static_cast<int>(i);
    return -1;
  }
};

inline const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> n = {"Adj", "MP",  "dMP",   "dTrans", "dECQ",    "IR",
                                             "nec", "intA1", "intA2", "CN",     "intA2gen"};
  return n;
}

inline const std::vector<std::string>& macro_names() {
  static const std::vector<std::string> n = {"t1", "T1", "Trans", "ECQ", "DT", "R1", "Comp", "dAand", "IANDgen", "dAandgen"};
  return n;
}

inline bool is_theorem_only_rule(const std::string& r) {
  return r == "IR" || r == "nec" || r == "intA1" || r == "intA2" || r == "intA2gen";
}

inline System rule_system(const std::string& r) {
  if (r == "IR") return System::LEI;
  if (r == "nec" || r == "intA1" || r == "intA2" || r == "CN" || r == "intA2gen") return System::LEIup;
  return System::Lt2;
}

// --- context multisets ---------------------------------------------------------

namespace ctx {

inline Context sorted(Context c) {
  std::sort(c.begin(), c.end());
  return c;
}

inline bool equal(const Context& a, const Context& b) { return sorted(a) == sorted(b); }

inline bool subset(const Context& a, const Context& b) {
  const Context x = sorted(a), y = sorted(b);
  return std::includes(y.begin(), y.end(), x.begin(), x.end());
}

inline Context max_union(const Context& a, const Context& b) {
  const Context x = sorted(a), y = sorted(b);
  Context out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

inline bool contains(const Context& c, const Formula& f) { return std::find(c.begin(), c.end(), f) != c.end(); }

inline Context remove_one(Context c, const Formula& f) {
  auto it = std::find(c.begin(), c.end(), f);
  if (it != c.end()) c.erase(it);
  return c;
}

inline Context add(Context c, const Formula& f) {
  c.push_back(f);
  return c;
}

}  // namespace ctx

// --- primitive rule shapes ------------------------------------------------------

namespace detail {

inline bool disj_parts(const Formula& f, Formula& a, Formula& b) { return as_disj(f, &a, &b); }

// Returns an error message or empty on success.
inline std::string check_rule_shape(const std::string& rule, const std::vector<const Line*>& prem, const Line& line) {
  const Formula& c = line.formula;
  auto need = [&](std::size_t n) -> std::string {
    if (prem.size() != n) return rule + " takes " + std::to_string(n) + " premise(s), got " + std::to_string(prem.size());
    return {};
  };
  if (rule == "Adj") {
    if (auto e = need(2); !e.empty()) return e;
    if (c == conj(prem[0]->formula, prem[1]->formula)) return {};
    return "Adj: conclusion is not the conjunction of the premises";
  }
  if (rule == "MP") {
    if (auto e = need(2); !e.empty()) return e;
    for (int k = 0; k < 2; ++k) {
      const Formula& i = prem[k]->formula;
      if (i.is(Op::Imp) && i.lhs() == prem[1 - k]->formula && i.rhs() == c) return {};
    }
    return "MP: premises are not A -> B and A with conclusion B";
  }
  if (rule == "dMP") {
    if (auto e = need(2); !e.empty()) return e;
    Formula chi, rest, chi2, phi, chi3, psi;
    if (!disj_parts(c, chi3, psi)) return "dMP: conclusion is not a disjunction";
    for (int k = 0; k < 2; ++k) {
      if (!disj_parts(prem[k]->formula, chi, rest) || !disj_parts(prem[1 - k]->formula, chi2, phi)) continue;
      if (rest.is(Op::Imp) && chi == chi2 && chi == chi3 && rest.lhs() == phi && rest.rhs() == psi) return {};
    }
    return "dMP: premises are not X | (A -> B) and X | A with conclusion X | B";
  }
  if (rule == "dTrans") {
    if (auto e = need(2); !e.empty()) return e;
    Formula r1, i1, r2, i2, r3, i3;
    if (!disj_parts(c, r3, i3) || !i3.is(Op::Imp)) return "dTrans: conclusion is not R | (A -> C)";
    for (int k = 0; k < 2; ++k) {
      if (!disj_parts(prem[k]->formula, r1, i1) || !disj_parts(prem[1 - k]->formula, r2, i2)) continue;
      if (!i1.is(Op::Imp) || !i2.is(Op::Imp)) continue;
      if (r1 == r2 && r1 == r3 && i1.rhs() == i2.lhs() && i1.lhs() == i3.lhs() && i2.rhs() == i3.rhs()) return {};
    }
    return "dTrans: premises are not R | (A -> B) and R | (B -> C) with conclusion R | (A -> C)";
  }
  if (rule == "dECQ") {
    if (auto e = need(1); !e.empty()) return e;
    Formula chi, k, chi2, psi;
    if (!disj_parts(prem[0]->formula, chi, k) || !k.is(Op::And) || !k.rhs().is(Op::Not) ||
        k.rhs().operand() != k.lhs())
      return "dECQ: premise is not X | (A & ~A)";
    if (!disj_parts(c, chi2, psi) || chi2 != chi) return "dECQ: conclusion is not X | B";
    return {};
  }
  if (rule == "IR") {
    if (auto e = need(1); !e.empty()) return e;
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::Imp)) return "IR: premise is not an implication";
    if (c == imp(p.lhs(), imp(ign(p.rhs()), ign(p.lhs())))) return {};
    return "IR: conclusion is not A -> (I B -> I A)";
  }
  if (rule == "nec") {
    if (auto e = need(1); !e.empty()) return e;
    if (c.is(Op::Ann) && c.body() == prem[0]->formula) return {};
    return "nec: conclusion is not [X] A for premise A";
  }
  if (rule == "intA1") {
    if (auto e = need(1); !e.empty()) return e;
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::Imp)) return "intA1: premise is not an implication";
    if (c == ann(p.lhs(), neg(ign(p.rhs())))) return {};
    return "intA1: conclusion is not [A] ~I B";
  }
  if (rule == "intA2") {
    if (auto e = need(1); !e.empty()) return e;
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::Imp) || !p.lhs().is(Op::And)) return "intA2: premise is not (A & B) -> C";
    const Formula& a = p.lhs().lhs();
    const Formula& b = p.lhs().rhs();
    if (c == imp(conj(b, neg(ign(b))), ann(a, neg(ign(p.rhs()))))) return {};
    return "intA2: conclusion is not (B & ~I B) -> [A] ~I C";
  }
  if (rule == "intA2gen") {
    if (auto e = need(1); !e.empty()) return e;
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::Imp)) return "intA2gen: premise is not an implication";
    if (!c.is(Op::Imp) || !c.rhs().is(Op::Ann)) return "intA2gen: conclusion is not G -> [A] ~I C";
    const Formula& phi = c.rhs().content();
    if (c.rhs().body() != neg(ign(p.rhs()))) return "intA2gen: announcement body is not ~I C";
    std::vector<Formula> psis;
    Formula cur = p.lhs();
    while (cur != phi) {
      if (!cur.is(Op::And)) return "intA2gen: premise antecedent is not A & B1 & ... & Bn";
      psis.push_back(cur.rhs());
      cur = cur.lhs();
    }
    if (psis.empty()) return "intA2gen: premise antecedent has no conjuncts besides A";
    std::reverse(psis.begin(), psis.end());
    std::vector<Formula> items;
    for (const auto& b : psis) {
      items.push_back(b);
      items.push_back(neg(ign(b)));
    }
    if (c.lhs() == conj_all(items)) return {};
    return "intA2gen: antecedent is not B1 & ~I B1 & ... & Bn & ~I Bn";
  }
  if (rule == "CN") {
    if (auto e = need(1); !e.empty()) return e;
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::And) || !p.lhs().is(Op::Ign) || !p.rhs().is(Op::Not) || !p.rhs().operand().is(Op::Ann) ||
        p.rhs().operand().body() != p.lhs())
      return "CN: premise is not I B & ~[A] I B";
    const Formula& psi = p.lhs().operand();
    const Formula& phi = p.rhs().operand().content();
    if (c != imp(phi, psi)) return "CN: conclusion is not A -> B";
    return {};
  }
  return "unknown rule '" + rule + "'";
}

// Gamma' = {chi | chi & ~I chi in Gamma}, by exact membership.
inline Context cn_context(const Context& gamma) {
  Context out;
  for (const auto& g : gamma)
    if (g.is(Op::And) && g.rhs() == neg(ign(g.lhs()))) out.push_back(g.lhs());
  return out;
}

}  // namespace detail

// --- builder -----------------------------------------------------------------------

class ProofBuilder {
 public:
  ProofBuilder() = default;

  int size() const { return static_cast<int>(d_.lines.size()); }
  const Line& line(int n) const { return d_.lines.at(n - 1); }
  Formula f(int n) const { return line(n).formula; }
  Context context_of(int n) const { return line(n).context; }

  int given(const Formula& f, const Context& c) {
    Justification j;
    j.kind = Justification::Kind::Given;
    return push(c, f, j);
  }

  int axiom(const std::string& id, const Substitution& s, const Context& c = {}) {
    Justification j;
    j.kind = Justification::Kind::Axiom;
    j.name = id;
    j.subst = s;
    return push(c, instantiate(id, s), j);
  }

  int assume(const Formula& f, const Context& c) {
    Justification j;
    j.kind = Justification::Kind::Assume;
    return push(c, f, j);
  }

  int rule(const std::string& name, const std::vector<int>& premises, const Formula& f,
           std::optional<Context> c = std::nullopt) {
    Justification j;
    j.kind = Justification::Kind::Rule;
    j.name = name;
    j.premises = premises;
    return push(c ? *c : union_of(premises, name), f, j);
  }

  int macro(const std::string& name, const std::vector<int>& premises, const Formula& f,
            std::optional<Context> c = std::nullopt) {
    Justification j;
    j.kind = Justification::Kind::Macro;
    j.name = name;
    j.premises = premises;
    return push(c ? *c : union_of(premises, name), f, j);
  }

  // Context needed by an ordinary rule over these premises.
  Context union_of(const std::vector<int>& premises, const std::string& name = "") const {
    if (is_theorem_only_rule(name)) return {};
    Context c;
    for (int p : premises) c = ctx::max_union(c, context_of(p));
    return c;
  }

  int mp(int imp_line, int ant_line, std::optional<Context> c = std::nullopt) {
    const Formula i = f(imp_line);
    if (!i.is(Op::Imp) || i.lhs() != f(ant_line)) throw Error("builder: MP shape mismatch");
    return rule("MP", {imp_line, ant_line}, i.rhs(), c);
  }

  int adj(int a, int b, std::optional<Context> c = std::nullopt) {
    return rule("Adj", {a, b}, conj(f(a), f(b)), c);
  }

  // Weakens line n to context c (c must include its context).
  int weaken(int n, const Context& c) {
    if (ctx::equal(context_of(n), c)) return n;
    const int a = adj(n, n, c);
    const int ax = axiom("A1", {{"phi", f(n)}, {"psi", f(n)}});
    return mp(ax, a, c);
  }

  // |- A -> A
  int t1(const Formula& a) {
    if (auto it = t1_cache_.find(a); it != t1_cache_.end()) return it->second;
    const Formula aa = imp(a, a);
    const int l1 = axiom("A13", {{"phi", a}, {"psi", a}});
    const int l2 = axiom("A12", {{"psi", a}, {"phi", a}});
    const int l3 = adj(l2, l1);
    const int l4 = axiom("A7", {{"phi", f(l2)}, {"psi", a}, {"chi", aa}});
    const int l5 = mp(l4, l3);
    const int l6 = axiom("A11", {{"phi", a}, {"psi", aa}});
    const int l7 = axiom("A2", {{"phi", f(l2)}, {"psi", aa}});
    const int l8 = adj(l6, l7);
    const int l9 = axiom("A6", {{"phi", conj(f(l2), a)}, {"psi", conj(f(l2), aa)}, {"chi", aa}});
    const int l10 = mp(l9, l8);
    const int l11 = mp(l10, l5);
    t1_cache_.emplace(a, l11);
    return l11;
  }

  // From |- X | X infer |- X.
  int collapse(int xx) {
    Formula x, y;
    if (!as_disj(f(xx), &x, &y) || x != y) throw Error("builder: collapse shape mismatch");
    const int t = t1(x);
    const int a = adj(t, t);
    const int ax = axiom("A6", {{"phi", x}, {"psi", x}, {"chi", x}});
    const int m = mp(ax, a);
    return mp(m, xx, context_of(xx));
  }

  // Trans for theorem premises, built from dTrans.
  int closed_trans(int ab, int bc) {
    const Formula p = f(ab);
    const Formula q = f(bc);
    if (!p.is(Op::Imp) || !q.is(Op::Imp) || p.rhs() != q.lhs()) throw Error("builder: Trans shape mismatch");
    const Formula t = imp(p.lhs(), q.rhs());
    const int a5a = axiom("A5", {{"phi", t}, {"psi", p}});
    const int d1 = mp(a5a, ab);
    const int a5b = axiom("A5", {{"phi", t}, {"psi", q}});
    const int d2 = mp(a5b, bc);
    const int tt = rule("dTrans", {d1, d2}, disj(t, t));
    return collapse(tt);
  }

  // |- ((A -> B) & (B -> C)) -> (A -> C)
  int syllogism(const Formula& a, const Formula& b, const Formula& c) {
    const Formula key = conj(imp(a, b), imp(b, c));
    if (auto it = syl_cache_.find(key); it != syl_cache_.end()) return it->second;
    const Formula& p = key;
    const Formula ac = imp(a, c);
    const Formula pa = conj(p, a);
    // P -> (P & (A | (A -> C)))
    const int tp = t1(p);
    const int a13 = axiom("A13", {{"phi", a}, {"psi", c}});
    const int a12 = axiom("A12", {{"psi", f(a13)}, {"phi", p}});
    const int pd = mp(a12, a13);
    const int s1 = comp_closed(tp, pd);
    // (P & (A | (A -> C))) -> ((P & A) | (P & (A -> C)))
    const int a7 = axiom("A7", {{"phi", p}, {"psi", a}, {"chi", ac}});
    // (P & A) -> (A -> C)
    const int pa_p = axiom("A1", {{"phi", p}, {"psi", a}});
    const int p_ab = axiom("A1", {{"phi", imp(a, b)}, {"psi", imp(b, c)}});
    const int p_bc = axiom("A2", {{"phi", imp(a, b)}, {"psi", imp(b, c)}});
    const int pa_ab = closed_trans(pa_p, p_ab);
    const int pa_a = axiom("A2", {{"phi", p}, {"psi", a}});
    const int pa_aba = comp_closed(pa_ab, pa_a);
    const int a11ab = axiom("A11", {{"phi", a}, {"psi", b}});
    const int pa_b = closed_trans(pa_aba, a11ab);
    const int pa_bc = closed_trans(pa_p, p_bc);
    const int pa_bcb = comp_closed(pa_bc, pa_b);
    const int a11bc = axiom("A11", {{"phi", b}, {"psi", c}});
    const int pa_c = closed_trans(pa_bcb, a11bc);
    const int a12c = axiom("A12", {{"psi", c}, {"phi", a}});
    const int pa_ac = closed_trans(pa_c, a12c);
    // (P & (A -> C)) -> (A -> C)
    const int pac_ac = axiom("A2", {{"phi", p}, {"psi", ac}});
    const int both = adj(pa_ac, pac_ac);
    const int a6 = axiom("A6", {{"phi", pa}, {"psi", conj(p, ac)}, {"chi", ac}});
    const int cases = mp(a6, both);
    const int s2 = closed_trans(s1, a7);
    const int out = closed_trans(s2, cases);
    syl_cache_.emplace(key, out);
    return out;
  }

  // Trans in any contexts: A -> B, B -> C  =>  A -> C.
  int trans(int ab, int bc, std::optional<Context> c = std::nullopt) {
    const Formula p = f(ab);
    const Formula q = f(bc);
    if (!p.is(Op::Imp) || !q.is(Op::Imp) || p.rhs() != q.lhs()) throw Error("builder: Trans shape mismatch");
    const int s = syllogism(p.lhs(), p.rhs(), q.rhs());
    const int both = adj(ab, bc, c);
    return mp(s, both, c ? *c : context_of(both));
  }

  // A3 + Adj + MP: A -> B, A -> C  =>  A -> (B & C), any contexts.
  int comp(int ab, int ac, std::optional<Context> c = std::nullopt) {
    const Formula p = f(ab);
    const Formula q = f(ac);
    if (!p.is(Op::Imp) || !q.is(Op::Imp) || p.lhs() != q.lhs()) throw Error("builder: Comp shape mismatch");
    const int a3 = axiom("A3", {{"phi", p.lhs()}, {"psi", p.rhs()}, {"chi", q.rhs()}});
    const int both = adj(ab, ac, c);
    return mp(a3, both, c ? *c : context_of(both));
  }

  // From B (context c) infer A -> B.
  int lift(int b, const Formula& a, std::optional<Context> c = std::nullopt) {
    const int a12 = axiom("A12", {{"psi", f(b)}, {"phi", a}});
    return mp(a12, b, c ? *c : context_of(b));
  }

  // |- (S & Y) -> (Y & S)
  int comm_and(const Formula& s, const Formula& y) {
    const int l = axiom("A2", {{"phi", s}, {"psi", y}});
    const int r = axiom("A1", {{"phi", s}, {"psi", y}});
    return comp_closed(l, r);
  }

  // |- (X | Y) -> (Y | X)
  int comm_or(const Formula& x, const Formula& y) {
    const int l = axiom("A5", {{"phi", y}, {"psi", x}});
    const int r = axiom("A4", {{"phi", y}, {"psi", x}});
    const int both = adj(l, r);
    const int a6 = axiom("A6", {{"phi", x}, {"psi", y}, {"chi", disj(y, x)}});
    return mp(a6, both);
  }

  // |- (X & ~X) -> B
  int efq(const Formula& x, const Formula& b) {
    const Formula k = conj(x, neg(x));
    const Formula kb = imp(k, b);
    const int em = axiom("A13", {{"phi", k}, {"psi", b}});
    const int sw = comm_or(k, kb);
    const int swapped = mp(sw, em);
    const int e = rule("dECQ", {swapped}, disj(kb, b));
    const int t = t1(kb);
    const int a12 = axiom("A12", {{"psi", b}, {"phi", k}});
    const int both = adj(t, a12);
    const int a6 = axiom("A6", {{"phi", kb}, {"psi", b}, {"chi", kb}});
    const int m = mp(a6, both);
    return mp(m, e);
  }

  // From X & ~X (any context) infer B.
  int ecq(int contradiction, const Formula& b, std::optional<Context> c = std::nullopt) {
    const Formula k = f(contradiction);
    if (!k.is(Op::And) || k.rhs() != neg(k.lhs())) throw Error("builder: ECQ premise is not A & ~A");
    const int e = efq(k.lhs(), b);
    return mp(e, contradiction, c ? *c : context_of(contradiction));
  }

  // |- (R | U) -> (R | V) given a theorem line U -> V.
  int disj_map(const Formula& r, int uv) {
    const Formula u = f(uv).lhs();
    const Formula v = f(uv).rhs();
    const Formula rv = disj(r, v);
    const int a4 = axiom("A4", {{"phi", r}, {"psi", v}});
    const int a5 = axiom("A5", {{"phi", r}, {"psi", v}});
    const int uv_rv = closed_trans(uv, a5);
    const int both = adj(a4, uv_rv);
    const int a6 = axiom("A6", {{"phi", r}, {"psi", u}, {"chi", rv}});
    return mp(a6, both);
  }

  // |- ((R | X) & (R | Y)) -> (R | (X & Y))
  int distribution(const Formula& r, const Formula& x, const Formula& y) {
    const Formula rx = disj(r, x);
    const Formula ry = disj(r, y);
    const Formula target = disj(r, conj(x, y));
    const int a7 = axiom("A7", {{"phi", rx}, {"psi", r}, {"chi", y}});
    // (RX & R) -> target
    const int l1 = axiom("A2", {{"phi", rx}, {"psi", r}});
    const int r_t = axiom("A4", {{"phi", r}, {"psi", conj(x, y)}});
    const int c1 = closed_trans(l1, r_t);
    // (RX & Y) -> target
    const int sw = comm_and(rx, y);
    const int a7b = axiom("A7", {{"phi", y}, {"psi", r}, {"chi", x}});
    const int yr_r = axiom("A2", {{"phi", y}, {"psi", r}});
    const int yr_t = closed_trans(yr_r, r_t);
    const int yx_xy = comm_and(y, x);
    const int xy_t = axiom("A5", {{"phi", r}, {"psi", conj(x, y)}});
    const int yx_t = closed_trans(yx_xy, xy_t);
    const int both1 = adj(yr_t, yx_t);
    const int a6a = axiom("A6", {{"phi", conj(y, r)}, {"psi", conj(y, x)}, {"chi", target}});
    const int inner = mp(a6a, both1);
    const int c2a = closed_trans(sw, a7b);
    const int c2 = closed_trans(c2a, inner);
    const int both2 = adj(c1, c2);
    const int a6b = axiom("A6", {{"phi", conj(rx, r)}, {"psi", conj(rx, y)}, {"chi", target}});
    const int cases = mp(a6b, both2);
    return closed_trans(a7, cases);
  }

  // |- ((X | (A -> B)) & (X | A)) -> (X | B)
  int dmp_theorem(const Formula& x, const Formula& a, const Formula& b) {
    const int d = distribution(x, imp(a, b), a);
    const int a11 = axiom("A11", {{"phi", a}, {"psi", b}});
    const int m = disj_map(x, a11);
    return closed_trans(d, m);
  }

  // |- ((R | (A -> B)) & (R | (B -> C))) -> (R | (A -> C))
  int dtrans_theorem(const Formula& r, const Formula& a, const Formula& b, const Formula& c) {
    const int d = distribution(r, imp(a, b), imp(b, c));
    const int s = syllogism(a, b, c);
    const int m = disj_map(r, s);
    return closed_trans(d, m);
  }

  // |- (X | (A & ~A)) -> (X | B)
  int decq_theorem(const Formula& x, const Formula& a, const Formula& b) {
    const int e = efq(a, b);
    return disj_map(x, e);
  }

  // |- (I F1 & ... & I Fn) -> I (F1 | ... | Fn), n >= 1, left nested.
  int iand_gen(const std::vector<Formula>& fs, bool use_macros) {
    if (fs.empty()) throw Error("IANDgen needs at least one formula");
    if (fs.size() == 1) return use_macros ? macro("t1", {}, imp(ign(fs[0]), ign(fs[0]))) : t1(ign(fs[0]));
    if (fs.size() == 2) return axiom("IAND", {{"phi", fs[0]}, {"psi", fs[1]}});
    std::vector<Formula> head(fs.begin(), fs.end() - 1);
    std::vector<Formula> iheads;
    for (const auto& x : head) iheads.push_back(ign(x));
    const Formula lhs_head = conj_all(iheads);
    const Formula last = fs.back();
    const int ih = iand_gen(head, use_macros);
    const int a1 = axiom("A1", {{"phi", lhs_head}, {"psi", ign(last)}});
    const int t = use_macros ? macro("Trans", {a1, ih}, imp(f(a1).lhs(), f(ih).rhs())) : trans(a1, ih);
    const int a2 = axiom("A2", {{"phi", lhs_head}, {"psi", ign(last)}});
    const int c = use_macros ? macro("Comp", {t, a2}, imp(f(t).lhs(), conj(f(t).rhs(), f(a2).rhs()))) : comp(t, a2);
    const int ia = axiom("IAND", {{"phi", disj_all(head)}, {"psi", last}});
    return use_macros ? macro("Trans", {c, ia}, imp(f(c).lhs(), f(ia).rhs())) : trans(c, ia);
  }

  // Appends a copy of a primitive line with its premises renumbered.
  int copy(const Line& l, const std::vector<int>& premises) {
    Justification j = l.just;
    j.premises = premises;
    return push(l.context, l.formula, j);
  }

  Derivation take() { return std::move(d_); }
  const Derivation& derivation() const { return d_; }

 private:
  int push(const Context& c, const Formula& f, const Justification& j) {
    Line l;
    l.number = size() + 1;
    l.context = c;
    l.formula = f;
    l.just = j;
    d_.lines.push_back(std::move(l));
    return size();
  }

  // comp for theorem lines, using only primitives.
  int comp_closed(int ab, int ac) { return comp(ab, ac, Context{}); }

  Derivation d_;
  std::map<Formula, int> t1_cache_;
  std::map<Formula, int> syl_cache_;
};

// --- checking and macro expansion --------------------------------------------

struct LineStatus {
  int number = 0;
  bool ok = true;
  std::string reason;
};

struct CheckReport {
  std::vector<LineStatus> lines;

  bool ok() const {
    for (const auto& l : lines)
      if (!l.ok) return false;
    return true;
  }
  // The first failing line, if any.
  std::optional<LineStatus> first_error() const {
    for (const auto& l : lines)
      if (!l.ok) return l;
    return std::nullopt;
  }
};

struct CheckOptions {
  System system = System::LEIup;
  // Accept Given lines (used for macro expansions, never for scripts).
  bool allow_given = false;
  int max_macro_depth = 32;
};

// An expansion is a derivation whose Given lines stand for lines of the
// parent derivation (given_source holds their numbers there).
struct Expansion {
  Derivation derivation;
  std::vector<int> given_source;
};

Expansion expand_macro(const Derivation& d, std::size_t index);
Derivation flatten(const Derivation& d);
CheckReport check_derivation(const Derivation& d, const CheckOptions& opt = {});

namespace detail {

inline std::string check_axiom_line(const Line& l, System sys) {
  const AxiomScheme* s = find_scheme(l.just.name);
  if (!s) return "unknown axiom scheme '" + l.just.name + "'";
  if (static_cast<int>(s->system) > static_cast<int>(sys))
    return "axiom " + s->id + " is not available in " + to_string(sys);
  auto m = match_axiom(l.formula, *s);
  if (!m) return "formula is not an instance of " + s->id;
  for (const auto& [k, v] : l.just.subst) {
    auto it = m->find(k);
    if (it == m->end()) return "axiom " + s->id + " has no metavariable " + k;
    if (it->second != v) return "substitution for " + k + " does not match the formula";
  }
  return {};
}

}  // namespace detail

inline CheckReport check_derivation(const Derivation& d, const CheckOptions& opt) {
  CheckReport rep;
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    const Line& l = d.lines[i];
    LineStatus st;
    st.number = l.number;
    auto fail = [&](std::string why) {
      st.ok = false;
      st.reason = std::move(why);
    };
    if (i > 0 && l.number <= d.lines[i - 1].number) fail("line numbers must increase");
    std::vector<const Line*> prem;
    if (st.ok) {
      for (int p : l.just.premises) {
        auto it = pos.find(p);
        if (it == pos.end()) {
          fail("premise " + std::to_string(p) + " is not an earlier line");
          break;
        }
        if (!rep.lines[it->second].ok) {
          fail("premise " + std::to_string(p) + " is not justified");
          break;
        }
        prem.push_back(&d.lines[it->second]);
      }
    }
    if (st.ok) {
      switch (l.just.kind) {
        case Justification::Kind::Given:
          if (!opt.allow_given) fail("given lines are only allowed in macro expansions");
          break;
        case Justification::Kind::Assume:
          if (!ctx::contains(l.context, l.formula)) fail("assumed formula is not in the line's context");
          break;
        case Justification::Kind::Axiom:
          if (auto e = detail::check_axiom_line(l, opt.system); !e.empty()) fail(e);
          break;
        case Justification::Kind::Rule: {
          const std::string& r = l.just.name;
          if (std::find(rule_names().begin(), rule_names().end(), r) == rule_names().end()) {
            fail("unknown rule '" + r + "'");
            break;
          }
          if (static_cast<int>(rule_system(r)) > static_cast<int>(opt.system)) {
            fail("rule " + r + " is not available in " + std::string(to_string(opt.system)));
            break;
          }
          if (auto e = detail::check_rule_shape(r, prem, l); !e.empty()) {
            fail(e);
            break;
          }
          if (is_theorem_only_rule(r)) {
            for (const Line* p : prem)
              if (!p->context.empty()) {
                fail(r + " applies to theorems only; premise " + std::to_string(p->number) + " has a context");
                break;
              }
          } else if (r == "CN") {
            if (!ctx::equal(l.context, detail::cn_context(prem[0]->context)))
              fail("CN: context must be {chi | chi & ~I chi in the premise context}");
          } else {
            Context u;
            for (const Line* p : prem) u = ctx::max_union(u, p->context);
            if (!ctx::subset(u, l.context)) fail(r + ": context must include the premises' contexts");
          }
          break;
        }
        case Justification::Kind::Macro: {
          const std::string& m = l.just.name;
          if (std::find(macro_names().begin(), macro_names().end(), m) == macro_names().end()) {
            fail("unknown macro '" + m + "'");
            break;
          }
          if (opt.max_macro_depth <= 0) {
            fail("macro nesting too deep");
            break;
          }
          try {
            Expansion ex = expand_macro(d, i);
            CheckOptions sub = opt;
            sub.allow_given = true;
            sub.max_macro_depth = opt.max_macro_depth - 1;
            const CheckReport r = check_derivation(ex.derivation, sub);
            if (auto e = r.first_error()) {
              fail(m + " expansion fails at its line " + std::to_string(e->number) + ": " + e->reason);
              break;
            }
            const Line& last = ex.derivation.lines.back();
            if (last.formula != l.formula) fail(m + ": expansion does not end in the stated formula");
            else if (!ctx::equal(last.context, l.context)) fail(m + ": expansion does not end in the stated context");
          } catch (const Error& e) {
            fail(e.what());
          }
          break;
        }
      }
    }
    pos[l.number] = i;
    rep.lines.push_back(st);
  }
  return rep;
}

namespace detail {

// The sub-derivation made of line `index` and everything it depends on,
// flattened to primitive lines. `givens` receives the parent numbers of the
// Given lines it keeps, in order.
inline Derivation closure_of(const Derivation& d, std::size_t index, std::vector<int>& givens) {
  std::set<std::size_t> keep;
  std::vector<std::size_t> stack{index};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (!keep.insert(i).second) continue;
    for (int p : d.lines[i].just.premises) {
      const int k = d.index_of(p);
      if (k < 0) throw Error("premise " + std::to_string(p) + " is not an earlier line");
      stack.push_back(static_cast<std::size_t>(k));
    }
  }
  Derivation sub;
  for (std::size_t i : keep) {
    sub.lines.push_back(d.lines[i]);
    if (d.lines[i].just.kind == Justification::Kind::Given) givens.push_back(d.lines[i].number);
  }
  return flatten(sub);
}

inline bool is_ordinary(const std::string& r) {
  return r == "Adj" || r == "MP" || r == "dMP" || r == "dTrans" || r == "dECQ";
}

// Deduction theorem: rewrites the flattened derivation `sub` (last line in
// context Delta with phi in Delta) into a proof of phi -> last in Delta - phi,
// finally weakened to `target`.
inline Expansion expand_dt(const Derivation& sub, const std::vector<int>& givens, const Formula& phi,
                           const Context& target) {
  ProofBuilder b;
  Expansion ex;
  std::size_t next_given = 0;
  // For each sub line: builder line holding either the formula (independent)
  // or phi -> formula (dependent).
  std::vector<int> at(sub.lines.size(), 0);
  std::vector<bool> dep(sub.lines.size(), false);
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < sub.lines.size(); ++i) pos[sub.lines[i].number] = i;

  auto premise_idx = [&](int number) { return pos.at(number); };
  // phi -> formula of sub line k, in its reduced context.
  auto as_dep = [&](std::size_t k) -> int {
    if (dep[k]) return at[k];
    return b.lift(at[k], phi);
  };

  for (std::size_t i = 0; i < sub.lines.size(); ++i) {
    const Line& l = sub.lines[i];
    if (!ctx::contains(l.context, phi)) {
      if (l.just.kind == Justification::Kind::Given) {
        at[i] = b.given(l.formula, l.context);
        ex.given_source.push_back(givens.at(next_given++));
      } else {
        std::vector<int> ps;
        for (int p : l.just.premises) ps.push_back(at[premise_idx(p)]);
        at[i] = b.copy(l, ps);
      }
      continue;
    }
    if (l.just.kind == Justification::Kind::Given) ++next_given;
    dep[i] = true;
    const Context rc = ctx::remove_one(l.context, phi);
    const auto& j = l.just;
    switch (j.kind) {
      case Justification::Kind::Given:
        throw Error("DT: cannot discharge through a given line");
      case Justification::Kind::Assume:
        if (l.formula == phi) {
          at[i] = b.weaken(b.t1(phi), rc);
        } else {
          const int a = b.assume(l.formula, rc);
          at[i] = b.lift(a, phi, rc);
        }
        break;
      case Justification::Kind::Axiom: {
        const AxiomScheme* sc = find_scheme(j.name);
        auto m = sc ? match_axiom(l.formula, *sc) : std::nullopt;
        if (!m) throw Error("DT: line " + std::to_string(l.number) + " is not an axiom instance");
        const int a = b.axiom(j.name, *m, rc);
        at[i] = b.lift(a, phi, rc);
        break;
      }
      case Justification::Kind::Macro:
        throw Error("DT: unexpanded macro");
      case Justification::Kind::Rule: {
        const std::string& r = j.name;
        if (r == "CN") throw Error("DT: discharging an assumption through CN is not supported");
        if (is_theorem_only_rule(r)) {
          std::vector<int> ps;
          for (int p : j.premises) ps.push_back(at[premise_idx(p)]);
          const int a = b.rule(r, ps, l.formula, rc);
          at[i] = b.lift(a, phi, rc);
          break;
        }
        if (!is_ordinary(r)) throw Error("DT: unsupported rule " + r);
        std::vector<std::size_t> pk;
        for (int p : j.premises) pk.push_back(premise_idx(p));
        bool any = false;
        for (auto k : pk) any = any || dep[k];
        if (!any) {
          std::vector<int> ps;
          for (auto k : pk) ps.push_back(at[k]);
          const int a = b.rule(r, ps, l.formula, rc);
          at[i] = b.lift(a, phi, rc);
          break;
        }
        if (r == "MP") {
          // Identify which premise is the implication.
          std::size_t ik = pk[0], ak = pk[1];
          const Formula& f0 = sub.lines[pk[0]].formula;
          if (!(f0.is(Op::Imp) && f0.lhs() == sub.lines[pk[1]].formula && f0.rhs() == l.formula)) std::swap(ik, ak);
          const int di = as_dep(ik);
          const int da = as_dep(ak);
          const int c = b.comp(di, da, rc);
          const Formula& ab = sub.lines[ik].formula;
          const int a11 = b.axiom("A11", {{"phi", ab.lhs()}, {"psi", ab.rhs()}});
          at[i] = b.trans(c, a11, rc);
        } else if (r == "Adj") {
          const int d0 = as_dep(pk[0]);
          const int d1 = as_dep(pk[1]);
          at[i] = b.comp(d0, d1, rc);
        } else {
          int thm = 0, both = 0;
          if (r == "dECQ") {
            Formula x, k, x2, psi;
            as_disj(sub.lines[pk[0]].formula, &x, &k);
            as_disj(l.formula, &x2, &psi);
            thm = b.decq_theorem(x, k.lhs(), psi);
            both = as_dep(pk[0]);
          } else {
            std::size_t k0 = pk[0], k1 = pk[1];
            Formula x, rest, x2, other, r3, i3;
            as_disj(l.formula, &r3, &i3);
            auto fits = [&](std::size_t a, std::size_t c) {
              if (!as_disj(sub.lines[a].formula, &x, &rest) || !rest.is(Op::Imp)) return false;
              if (!as_disj(sub.lines[c].formula, &x2, &other)) return false;
              if (r == "dMP") return other == rest.lhs();
              return other.is(Op::Imp) && other.lhs() == rest.rhs() && rest.lhs() == i3.lhs() &&
                     other.rhs() == i3.rhs();
            };
            if (!fits(k0, k1)) {
              std::swap(k0, k1);
              if (!fits(k0, k1)) throw Error("DT: malformed " + r + " line");
            }
            thm = r == "dMP" ? b.dmp_theorem(x, rest.lhs(), rest.rhs())
                             : b.dtrans_theorem(x, rest.lhs(), rest.rhs(), i3.rhs());
            both = b.comp(as_dep(k0), as_dep(k1), rc);
          }
          at[i] = b.trans(both, thm, rc);
        }
        break;
      }
    }
  }
  const std::size_t last = sub.lines.size() - 1;
  int res = dep[last] ? at[last] : b.lift(at[last], phi);
  res = b.weaken(res, target);
  ex.derivation = b.take();
  return ex;
}

}  // namespace detail

inline Expansion expand_macro(const Derivation& d, std::size_t index) {
  const Line& l = d.lines.at(index);
  const std::string& m = l.just.name;
  std::vector<const Line*> prem;
  for (int p : l.just.premises) {
    const int k = d.index_of(p);
    if (k < 0 || static_cast<std::size_t>(k) >= index) throw Error("premise " + std::to_string(p) + " is not an earlier line");
    prem.push_back(&d.lines[k]);
  }
  auto need = [&](std::size_t n) {
    if (prem.size() != n)
      throw Error(m + " takes " + std::to_string(n) + " premise(s), got " + std::to_string(prem.size()));
  };
  const Formula& goal = l.formula;
  const Context& gctx = l.context;

  if (m == "DT") {
    need(1);
    if (!goal.is(Op::Imp)) throw Error("DT: conclusion is not an implication");
    const Formula& phi = goal.lhs();
    if (prem[0]->formula != goal.rhs()) throw Error("DT: conclusion is not A -> (premise formula)");
    if (!ctx::contains(prem[0]->context, phi)) throw Error("DT: premise context does not contain " + render(phi));
    if (!ctx::subset(ctx::remove_one(prem[0]->context, phi), gctx))
      throw Error("DT: context must include the premise context without " + render(phi));
    std::vector<int> givens;
    const Derivation sub = detail::closure_of(d, static_cast<std::size_t>(d.index_of(prem[0]->number)), givens);
    return detail::expand_dt(sub, givens, phi, gctx);
  }

  ProofBuilder b;
  Expansion ex;
  std::vector<int> g;
  for (const Line* p : prem) {
    g.push_back(b.given(p->formula, p->context));
    ex.given_source.push_back(p->number);
  }

  if (m == "t1") {
    need(0);
    if (!goal.is(Op::Imp) || goal.lhs() != goal.rhs()) throw Error("t1: formula is not A -> A");
    b.weaken(b.t1(goal.lhs()), gctx);
  } else if (m == "T1") {
    need(0);
    if (!goal.is(Op::Imp) || !goal.lhs().is(Op::Not) || !goal.rhs().is(Op::Imp) ||
        goal.rhs().lhs() != goal.lhs().operand())
      throw Error("T1: formula is not ~A -> (A -> B)");
    const Formula& a = goal.rhs().lhs();
    const Context both{goal.lhs(), a};
    const int h1 = b.assume(goal.lhs(), both);
    const int h2 = b.assume(a, both);
    const int h3 = b.adj(h2, h1);
    const int h4 = b.macro("ECQ", {h3}, goal.rhs().rhs());
    const int h5 = b.macro("DT", {h4}, goal.rhs(), Context{goal.lhs()});
    const int h6 = b.macro("DT", {h5}, goal, Context{});
    b.weaken(h6, gctx);
  } else if (m == "Trans") {
    need(2);
    const Formula& p = prem[0]->formula;
    const Formula& q = prem[1]->formula;
    if (!p.is(Op::Imp) || !q.is(Op::Imp) || p.rhs() != q.lhs() || goal != imp(p.lhs(), q.rhs()))
      throw Error("Trans: premises are not A -> B and B -> C with conclusion A -> C");
    if (!ctx::subset(b.union_of(g), gctx)) throw Error("Trans: context must include the premises' contexts");
    b.trans(g[0], g[1], gctx);
  } else if (m == "Comp") {
    need(2);
    const Formula& p = prem[0]->formula;
    const Formula& q = prem[1]->formula;
    if (!p.is(Op::Imp) || !q.is(Op::Imp) || p.lhs() != q.lhs() || goal != imp(p.lhs(), conj(p.rhs(), q.rhs())))
      throw Error("Comp: premises are not A -> B and A -> C with conclusion A -> (B & C)");
    if (!ctx::subset(b.union_of(g), gctx)) throw Error("Comp: context must include the premises' contexts");
    b.comp(g[0], g[1], gctx);
  } else if (m == "ECQ") {
    need(1);
    const Formula& k = prem[0]->formula;
    if (!k.is(Op::And) || k.rhs() != neg(k.lhs())) throw Error("ECQ: premise is not A & ~A");
    if (!ctx::subset(prem[0]->context, gctx)) throw Error("ECQ: context must include the premise context");
    b.ecq(g[0], goal, gctx);
  } else if (m == "R1") {
    need(1);
    const Formula& p = prem[0]->formula;
    if (!p.is(Op::Imp) || !p.rhs().is(Op::Imp)) throw Error("R1: premise is not A -> (B -> C)");
    const Formula& a = p.lhs();
    const Formula& bb = p.rhs().lhs();
    const Formula& c = p.rhs().rhs();
    if (goal != imp(conj(a, bb), c)) throw Error("R1: conclusion is not (A & B) -> C");
    if (!ctx::subset(prem[0]->context, gctx)) throw Error("R1: context must include the premise context");
    const Formula ab = conj(a, bb);
    const int l2 = b.axiom("A1", {{"phi", a}, {"psi", bb}});
    const int l3 = b.macro("Trans", {l2, g[0]}, imp(ab, p.rhs()), gctx);
    const int l4 = b.axiom("A2", {{"phi", a}, {"psi", bb}});
    const int l5 = b.axiom("A3", {{"phi", ab}, {"psi", p.rhs()}, {"chi", bb}});
    const int l6 = b.adj(l3, l4, gctx);
    const int l7 = b.mp(l5, l6, gctx);
    const int l8 = b.axiom("A11", {{"phi", bb}, {"psi", c}});
    b.macro("Trans", {l7, l8}, goal, gctx);
  } else if (m == "dAand") {
    need(0);
    Formula lhs, rhs;
    if (!as_iff(goal, &lhs, &rhs) || !lhs.is(Op::Ann) || !lhs.body().is(Op::And))
      throw Error("dAand: formula is not [A](B & C) <-> ([A]B & [A]C)");
    const Formula& phi = lhs.content();
    const Formula& psi = lhs.body().lhs();
    const Formula& chi = lhs.body().rhs();
    if (rhs != conj(ann(phi, psi), ann(phi, chi))) throw Error("dAand: formula is not [A](B & C) <-> ([A]B & [A]C)");
    const Formula pc = conj(psi, chi);
    auto left_of_dAimp = [&](const Formula& x, const Formula& y) {
      const int ax = b.axiom("dAimp", {{"phi", phi}, {"psi", x}, {"chi", y}});
      Formula l_, r_;
      as_iff(b.f(ax), &l_, &r_);
      const int a1 = b.axiom("A1", {{"phi", imp(l_, r_)}, {"psi", imp(r_, l_)}});
      return b.mp(a1, ax);
    };
    const int s1 = b.axiom("A1", {{"phi", psi}, {"psi", chi}});
    const int s2 = b.axiom("A2", {{"phi", psi}, {"psi", chi}});
    const int s3 = b.rule("nec", {s1}, ann(phi, b.f(s1)));
    const int s4 = left_of_dAimp(pc, psi);
    const int s5 = b.mp(s4, s3);
    const int s6 = b.rule("nec", {s2}, ann(phi, b.f(s2)));
    const int s7 = left_of_dAimp(pc, chi);
    const int s8 = b.mp(s7, s6);
    const int s9 = b.macro("Comp", {s5, s8}, imp(ann(phi, pc), rhs));
    // psi -> (chi -> (psi & chi)) by DT twice over Adj
    const int h1 = b.assume(psi, {psi, chi});
    const int h2 = b.assume(chi, {psi, chi});
    const int h3 = b.adj(h1, h2);
    const int h4 = b.macro("DT", {h3}, imp(chi, pc), Context{psi});
    const int s10 = b.macro("DT", {h4}, imp(psi, imp(chi, pc)), Context{});
    const int s11 = b.rule("nec", {s10}, ann(phi, b.f(s10)));
    const int s12a = left_of_dAimp(psi, imp(chi, pc));
    const int s12 = b.mp(s12a, s11);
    const int s13 = left_of_dAimp(chi, pc);
    const int s14 = b.macro("Trans", {s12, s13}, imp(ann(phi, psi), imp(ann(phi, chi), ann(phi, pc))));
    const int s15 = b.macro("R1", {s14}, imp(rhs, ann(phi, pc)));
    const int s16 = b.adj(s9, s15);
    b.weaken(s16, gctx);
  } else if (m == "IANDgen") {
    need(0);
    if (!goal.is(Op::Imp) || !goal.rhs().is(Op::Ign)) throw Error("IANDgen: formula is not (I A1 & ... & I An) -> I (A1 | ... | An)");
    std::vector<Formula> items;
    Formula cur = goal.lhs();
    while (cur.is(Op::And)) {
      items.push_back(cur.rhs());
      cur = cur.lhs();
    }
    items.push_back(cur);
    std::reverse(items.begin(), items.end());
    std::vector<Formula> fs;
    for (const auto& it : items) {
      if (!it.is(Op::Ign)) throw Error("IANDgen: antecedent conjunct is not of the form I A");
      fs.push_back(it.operand());
    }
    if (goal.rhs().operand() != disj_all(fs)) throw Error("IANDgen: consequent is not I (A1 | ... | An)");
    b.weaken(b.iand_gen(fs, true), gctx);
  } else if (m == "dAandgen") {
    need(0);
    Formula lhs, rhs;
    if (!as_iff(goal, &lhs, &rhs) || !lhs.is(Op::Ann))
      throw Error("dAandgen: formula is not [A](B1 & ... & Bn) <-> ([A]B1 & ... & [A]Bn)");
    const Formula& phi = lhs.content();
    std::vector<Formula> chis;
    Formula cur = lhs.body();
    std::vector<Formula> anns;
    Formula rcur = rhs;
    // Split the right side first: it fixes n.
    while (rcur.is(Op::And) && !rcur.is(Op::Ann)) {
      anns.push_back(rcur.rhs());
      rcur = rcur.lhs();
    }
    anns.push_back(rcur);
    std::reverse(anns.begin(), anns.end());
    for (const auto& a : anns) {
      if (!a.is(Op::Ann) || a.content() != phi) throw Error("dAandgen: right side is not [A]B1 & ... & [A]Bn");
      chis.push_back(a.body());
    }
    if (lhs.body() != conj_all(chis)) throw Error("dAandgen: left side is not [A](B1 & ... & Bn)");
    // E_k: [A]C_k <-> D_k, built up from dAand.
    auto parts = [&](int iff_line, int& fwd, int& bwd) {
      Formula x, y;
      as_iff(b.f(iff_line), &x, &y);
      const int a1 = b.axiom("A1", {{"phi", imp(x, y)}, {"psi", imp(y, x)}});
      const int a2 = b.axiom("A2", {{"phi", imp(x, y)}, {"psi", imp(y, x)}});
      fwd = b.mp(a1, iff_line);
      bwd = b.mp(a2, iff_line);
    };
    int fwd = b.macro("t1", {}, imp(ann(phi, chis[0]), ann(phi, chis[0])));
    int bwd = fwd;
    Formula ck = chis[0];
    Formula dk = ann(phi, chis[0]);
    for (std::size_t k = 1; k < chis.size(); ++k) {
      const Formula& z = ann(phi, chis[k]);
      const int da = b.macro("dAand", {}, iff(ann(phi, conj(ck, chis[k])), conj(ann(phi, ck), z)));
      int da_f = 0, da_b = 0;
      parts(da, da_f, da_b);
      // ([A]C_k & Z) -> (D_k & Z) and back
      const int x1 = b.axiom("A1", {{"phi", ann(phi, ck)}, {"psi", z}});
      const int x2 = b.macro("Trans", {x1, fwd}, imp(b.f(x1).lhs(), dk));
      const int x3 = b.axiom("A2", {{"phi", ann(phi, ck)}, {"psi", z}});
      const int mono_f = b.macro("Comp", {x2, x3}, imp(conj(ann(phi, ck), z), conj(dk, z)));
      const int y1 = b.axiom("A1", {{"phi", dk}, {"psi", z}});
      const int y2 = b.macro("Trans", {y1, bwd}, imp(conj(dk, z), ann(phi, ck)));
      const int y3 = b.axiom("A2", {{"phi", dk}, {"psi", z}});
      const int mono_b = b.macro("Comp", {y2, y3}, imp(conj(dk, z), conj(ann(phi, ck), z)));
      fwd = b.macro("Trans", {da_f, mono_f}, imp(ann(phi, conj(ck, chis[k])), conj(dk, z)));
      bwd = b.macro("Trans", {mono_b, da_b}, imp(conj(dk, z), ann(phi, conj(ck, chis[k]))));
      ck = conj(ck, chis[k]);
      dk = conj(dk, z);
    }
    const int out = b.adj(fwd, bwd);
    b.weaken(out, gctx);
  } else {
    throw Error("unknown macro '" + m + "'");
  }
  ex.derivation = b.take();
  return ex;
}

// Replaces every macro line by its expansion, recursively.
inline Derivation flatten(const Derivation& d) {
  Derivation out;
  std::map<int, int> renum;
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    const Line& l = d.lines[i];
    if (l.just.kind != Justification::Kind::Macro) {
      Line c = l;
      c.number = static_cast<int>(out.lines.size()) + 1;
      for (int& p : c.just.premises) {
        auto it = renum.find(p);
        if (it == renum.end()) throw Error("premise " + std::to_string(p) + " is not an earlier line");
        p = it->second;
      }
      out.lines.push_back(std::move(c));
      renum[l.number] = static_cast<int>(out.lines.size());
      continue;
    }
    Expansion ex = expand_macro(d, i);
    const Derivation flat = flatten(ex.derivation);
    // Given lines of the expansion keep their place at the front of `flat`
    // because flatten never reorders primitive lines.
    std::map<int, int> local;
    std::size_t gi = 0;
    for (const Line& fl : flat.lines) {
      if (fl.just.kind == Justification::Kind::Given) {
        local[fl.number] = renum.at(ex.given_source.at(gi++));
        continue;
      }
      Line c = fl;
      c.number = static_cast<int>(out.lines.size()) + 1;
      for (int& p : c.just.premises) p = local.at(p);
      out.lines.push_back(std::move(c));
      local[fl.number] = c.number;
    }
    renum[l.number] = local.at(flat.lines.back().number);
  }
  return out;
}

}  // namespace lei
