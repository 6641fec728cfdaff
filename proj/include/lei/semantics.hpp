#pragma once

// Static-fragment semantics in two independent styles:
//   eval3        valuation style, returns a TruthValue;
//   sat/sat_neg  satisfaction and anti-satisfaction by mutual recursion.
// Both quantify I over successors other than the evaluation world.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/model.hpp"

namespace lei {

namespace detail {

struct NodeWorldHash {
  std::size_t operator()(const std::pair<const void*, int>& k) const noexcept {
    return std::hash<const void*>{}(k.first) * 31u + static_cast<std::size_t>(k.second);
  }
};

class Eval3 {
 public:
  explicit Eval3(const KripkeModel& m) : m_(m) {}

  TruthValue operator()(int w, const Formula& f) {
    switch (f.op()) {
      case Op::Atom: return m_.value(w, f.name());
      case Op::Not: return tv_not((*this)(w, f.operand()));
      case Op::And: {
        const TruthValue a = (*this)(w, f.lhs());
        if (a == TruthValue::False) return a;
        return tv_and(a, (*this)(w, f.rhs()));
      }
      case Op::Imp: {
        const TruthValue a = (*this)(w, f.lhs());
        if (a != TruthValue::True) return TruthValue::True;
        return tv_imp(a, (*this)(w, f.rhs()));
      }
      case Op::Ign: {
        const std::pair<const void*, int> key{f.id(), w};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        TruthValue r = TruthValue::False;
        if ((*this)(w, f.operand()) == TruthValue::True) {
          r = TruthValue::True;
          for (int v : m_.successors(w)) {
            if (v == w) continue;
            if ((*this)(v, f.operand()) == TruthValue::True) {
              r = TruthValue::False;
              break;
            }
          }
        }
        memo_.emplace(key, r);
        return r;
      }
      case Op::Ann: throw DynamicFormulaError();
    }
    return TruthValue::Gap;
  }

 private:
  const KripkeModel& m_;
  std::unordered_map<std::pair<const void*, int>, TruthValue, NodeWorldHash> memo_;
};

class Sat {
 public:
  explicit Sat(const KripkeModel& m) : m_(m) {}

  bool pos(int w, const Formula& f) {
    switch (f.op()) {
      case Op::Atom: return m_.value(w, f.name()) == TruthValue::True;
      case Op::Not: return neg(w, f.operand());
      case Op::And: return pos(w, f.lhs()) && pos(w, f.rhs());
      case Op::Imp: return !pos(w, f.lhs()) || pos(w, f.rhs());
      case Op::Ign: {
        if (!pos(w, f.operand())) return false;
        for (int v : m_.successors(w))
          if (v != w && pos(v, f.operand())) return false;
        return true;
      }
      case Op::Ann: throw DynamicFormulaError();
    }
    return false;
  }

  bool neg(int w, const Formula& f) {
    switch (f.op()) {
      case Op::Atom: return m_.value(w, f.name()) == TruthValue::False;
      case Op::Not: return pos(w, f.operand());
      case Op::And: return neg(w, f.lhs()) || neg(w, f.rhs());
      case Op::Imp: return !pos(w, f);
      case Op::Ign: {
        for (int v : m_.successors(w))
          if (v != w && pos(v, f.operand())) return true;
        return !pos(w, f.operand());
      }
      case Op::Ann: throw DynamicFormulaError();
    }
    return false;
  }

 private:
  const KripkeModel& m_;
};

}  // namespace detail

inline TruthValue eval3(const KripkeModel& m, int w, const Formula& f) { return detail::Eval3(m)(w, f); }
inline TruthValue eval3(const KripkeModel& m, const WorldId& w, const Formula& f) {
  return eval3(m, m.require_world(w), f);
}

inline bool sat(const KripkeModel& m, int w, const Formula& f) { return detail::Sat(m).pos(w, f); }
inline bool sat_neg(const KripkeModel& m, int w, const Formula& f) { return detail::Sat(m).neg(w, f); }
inline bool sat(const KripkeModel& m, const WorldId& w, const Formula& f) { return sat(m, m.require_world(w), f); }
inline bool sat_neg(const KripkeModel& m, const WorldId& w, const Formula& f) {
  return sat_neg(m, m.require_world(w), f);
}
inline bool sat(const PointedModel& pm, const Formula& f) { return sat(pm.model, pm.point, f); }
inline bool sat_neg(const PointedModel& pm, const Formula& f) { return sat_neg(pm.model, pm.point, f); }

inline bool valid_in_model(const KripkeModel& m, const Formula& f) {
  detail::Eval3 ev(m);
  for (int w = 0; w < m.num_worlds(); ++w)
    if (ev(w, f) != TruthValue::True) return false;
  return true;
}

// --- theory slices ----------------------------------------------------------
//
// Candidates over an atom signature A and modal depth d:
//   literals         p, ~p
//   bool0            literals plus l1 & l2 and l1 | l2 for distinct literals
//   modal level 1    I b, ~I b for b in bool0
//   modal level k    I m, ~I m for m of level k-1
// The slice keeps the candidates true at the point. Boolean combinations
// mixing modal and non-modal members are left out on purpose: p | I ~p with
// ~I ~p would force p into every announcement world built from the slice.

struct TheorySlice {
  PointedModel base;
  int depth = 0;
  std::vector<Formula> formulas;

  bool contains(const Formula& f) const { return std::find(formulas.begin(), formulas.end(), f) != formulas.end(); }
};

namespace detail {

inline std::vector<Formula> slice_candidates(const std::vector<std::string>& atoms, int depth) {
  std::vector<Formula> lits;
  for (const auto& a : atoms) {
    lits.push_back(atom(a));
    lits.push_back(neg(atom(a)));
  }
  std::vector<Formula> bool0 = lits;
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j) {
      bool0.push_back(conj(lits[i], lits[j]));
      bool0.push_back(disj(lits[i], lits[j]));
    }
  std::vector<Formula> out = bool0;
  std::vector<Formula> prev;
  for (int k = 1; k <= depth; ++k) {
    std::vector<Formula> cur;
    const auto& args = (k == 1) ? bool0 : prev;
    for (const auto& b : args) {
      cur.push_back(ign(b));
      cur.push_back(neg(ign(b)));
    }
    out.insert(out.end(), cur.begin(), cur.end());
    prev = std::move(cur);
  }
  return out;
}

}  // namespace detail

inline TheorySlice theory_slice(const KripkeModel& m, int w, int depth) {
  TheorySlice s;
  s.base = PointedModel(m, w);
  s.depth = depth < 0 ? 0 : depth;
  const auto cands = detail::slice_candidates(m.sorted_atoms(), s.depth);
  detail::Sat sat_eval(m);
  std::set<Formula> seen;
  for (const auto& f : cands)
    if (sat_eval.pos(w, f) && seen.insert(f).second) s.formulas.push_back(f);
  return s;
}

inline TheorySlice theory_slice(const PointedModel& pm, int depth) { return theory_slice(pm.model, pm.point, depth); }

// Drops members already entailed by another member on syntactic grounds
// (a conjunction whose conjuncts are both present, a disjunction with a present
// disjunct). The result has exactly the same models as the input.
inline std::vector<Formula> prune_entailed(const std::vector<Formula>& fs) {
  std::set<Formula> all(fs.begin(), fs.end());
  std::vector<Formula> out;
  std::set<Formula> kept;
  for (const auto& f : fs) {
    Formula a, b;
    if (f.is(Op::And) && all.count(f.lhs()) && all.count(f.rhs())) continue;
    if (as_disj(f, &a, &b) && (all.count(a) || all.count(b))) continue;
    if (kept.insert(f).second) out.push_back(f);
  }
  return out;
}

}  // namespace lei
