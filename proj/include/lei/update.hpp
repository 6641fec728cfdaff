#pragma once

// Additive announcement update and evaluation of the dynamic language.
//
// announce(M, w, f) adds one world n with edges w -> n and n -> v for every
// original successor v of w. The atoms of n are those forced by the defining
// set B = {f} + {chi in slice(w) : chi & ~I chi true at w}. Atoms B leaves
// open stay Gap unless f itself fails at n; then they take the first
// valuation (Gap, then True, then False per atom) making f true at n.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/model.hpp"
#include "lei/oracle.hpp"
#include "lei/semantics.hpp"
#include "lei/syntax.hpp"

namespace lei {

enum class OnUnknown { Error, AssumeConsistent, AssumeInconsistent };

inline const char* to_string(OnUnknown p) {
  switch (p) {
    case OnUnknown::Error: return "error";
    case OnUnknown::AssumeConsistent: return "assume-consistent";
    default: return "assume-inconsistent";
  }
}

struct UpdateOptions {
  SearchBounds bounds;
  // Depth of the theory slice feeding B; depth(f) + 1 when unset.
  std::optional<int> depth;
  OnUnknown on_unknown = OnUnknown::Error;

  int depth_for(const Formula& f) const { return depth ? *depth : f.modal_depth() + 1; }
};

inline std::vector<Formula> defining_set(const PointedModel& pm, const Formula& f, int depth) {
  std::vector<Formula> out{f};
  detail::Sat s(pm.model);
  for (const auto& chi : theory_slice(pm, depth).formulas)
    if (s.neg(pm.point, ign(chi))) out.push_back(chi);
  return prune_entailed(out);
}

struct NewWorldAtoms {
  std::map<std::string, TruthValue> atoms;
  // Atoms whose consequence queries were inconclusive (left Gap).
  std::vector<std::string> unknown;
  std::string reason;
  std::vector<Formula> defining;
};

// Values forced by B: True if B entails p, False if B entails ~p, else Gap.
inline NewWorldAtoms new_world_atoms(const PointedModel& pm, const Formula& f, const UpdateOptions& opt = {}) {
  if (f.has_announcement()) throw DynamicFormulaError("announcement content must be static: " + render(f));
  NewWorldAtoms out;
  out.defining = defining_set(pm, f, opt.depth_for(f));
  std::set<std::string> sig(pm.model.atoms().begin(), pm.model.atoms().end());
  for (const auto& a : atoms_of(f)) sig.insert(a);
  for (const auto& a : sig) {
    const auto pos = consequence(out.defining, atom(a), opt.bounds);
    if (pos.follows()) {
      out.atoms[a] = TruthValue::True;
      continue;
    }
    const auto negv = consequence(out.defining, neg(atom(a)), opt.bounds);
    if (negv.follows()) {
      out.atoms[a] = TruthValue::False;
      continue;
    }
    out.atoms[a] = TruthValue::Gap;
    if (pos.kind == ConsequenceVerdict::Kind::Unknown || negv.kind == ConsequenceVerdict::Kind::Unknown) {
      out.unknown.push_back(a);
      out.reason = pos.kind == ConsequenceVerdict::Kind::Unknown ? pos.reason : negv.reason;
    }
  }
  return out;
}

struct UpdateOutcome {
  enum class Kind { Updated, Inconsistent, Unknown };
  Kind kind = Kind::Unknown;
  KripkeModel model;
  WorldId new_world;
  std::map<std::string, TruthValue> atoms;
  std::vector<Formula> defining;
  // Whether f holds at the new world.
  bool realized = true;
  // Whether every member of B holds at the new world.
  bool defining_holds = true;
  std::string reason;

  bool updated() const { return kind == Kind::Updated; }
};

inline const char* to_string(UpdateOutcome::Kind k) {
  switch (k) {
    case UpdateOutcome::Kind::Updated: return "Updated";
    case UpdateOutcome::Kind::Inconsistent: return "Inconsistent";
    default: return "Unknown";
  }
}

namespace detail {

inline bool all_hold(const KripkeModel& m, int w, const std::vector<Formula>& fs) {
  Sat s(m);
  for (const auto& f : fs)
    if (!s.pos(w, f)) return false;
  return true;
}

// Fills the open atoms of world n; returns whether all of `b` holds there.
inline bool realize(KripkeModel& m, int n, std::map<std::string, TruthValue>& atoms, const std::vector<Formula>& b) {
  std::vector<std::string> open;
  for (const auto& [a, v] : atoms) {
    m.set_value(n, a, v);
    if (v == TruthValue::Gap) open.push_back(a);
  }
  if (all_hold(m, n, b)) return true;
  static constexpr TruthValue kOrder[] = {TruthValue::Gap, TruthValue::True, TruthValue::False};
  std::size_t total = 1;
  for (std::size_t k = 0; k < open.size(); ++k) total *= 3;
  for (std::size_t idx = 1; idx < total; ++idx) {
    std::size_t rest = idx;
    std::vector<TruthValue> vals(open.size());
    for (std::size_t k = open.size(); k-- > 0;) {
      vals[k] = kOrder[rest % 3];
      rest /= 3;
    }
    for (std::size_t k = 0; k < open.size(); ++k) m.set_value(n, open[k], vals[k]);
    if (all_hold(m, n, b)) {
      for (std::size_t k = 0; k < open.size(); ++k) atoms[open[k]] = vals[k];
      return true;
    }
  }
  for (const auto& a : open) m.set_value(n, a, TruthValue::Gap);
  return false;
}

}  // namespace detail

inline UpdateOutcome announce(const PointedModel& pm, const Formula& f, const UpdateOptions& opt = {}) {
  if (f.has_announcement()) throw DynamicFormulaError("announcement content must be static: " + render(f));
  UpdateOutcome out;
  const auto cons = consistent_with_point(pm, f, opt.depth_for(f), opt.bounds);
  if (cons.value == Consistency::Inconsistent) {
    out.kind = UpdateOutcome::Kind::Inconsistent;
    return out;
  }
  if (cons.value == Consistency::Unknown) {
    if (opt.on_unknown == OnUnknown::Error) {
      out.reason = "consistency of " + render(f) + " at " + pm.point_id() + ": " + cons.reason;
      return out;
    }
    if (opt.on_unknown == OnUnknown::AssumeInconsistent) {
      out.kind = UpdateOutcome::Kind::Inconsistent;
      out.reason = "assumed inconsistent: " + cons.reason;
      return out;
    }
    out.reason = "assumed consistent: " + cons.reason;
  }
  NewWorldAtoms na = new_world_atoms(pm, f, opt);
  if (!na.unknown.empty() && opt.on_unknown == OnUnknown::Error) {
    out.kind = UpdateOutcome::Kind::Unknown;
    out.reason = "value of " + na.unknown.front() + " at the new world: " + na.reason;
    return out;
  }
  out.kind = UpdateOutcome::Kind::Updated;
  out.model = pm.model;
  out.new_world = out.model.fresh_id(pm.point_id());
  const int n = out.model.add_world(out.new_world);
  for (int v : pm.model.successors(pm.point)) out.model.add_edge(n, v);
  out.model.add_edge(pm.point, n);
  out.realized = detail::realize(out.model, n, na.atoms, {f});
  out.defining_holds = detail::all_hold(out.model, n, na.defining);
  out.atoms = std::move(na.atoms);
  out.defining = std::move(na.defining);
  return out;
}

// Evaluates a formula of the dynamic language. Results are cached per
// (model, world, content), so nested and repeated announcements share work.
class DynamicEvaluator {
 public:
  explicit DynamicEvaluator(UpdateOptions opt = {}) : opt_(std::move(opt)) {}

  TruthValue eval(const PointedModel& pm, const Formula& f) { return eval(pm.model, pm.point, f); }

  TruthValue eval(const KripkeModel& m, int w, const Formula& f) {
    if (f.is_static()) return eval3(m, w, f);
    switch (f.op()) {
      case Op::Not: return tv_not(eval(m, w, f.operand()));
      case Op::And: {
        const TruthValue a = eval(m, w, f.lhs());
        if (a == TruthValue::False) return a;
        return tv_and(a, eval(m, w, f.rhs()));
      }
      case Op::Imp: {
        const TruthValue a = eval(m, w, f.lhs());
        if (a != TruthValue::True) return TruthValue::True;
        return tv_imp(a, eval(m, w, f.rhs()));
      }
      case Op::Ign: {
        if (eval(m, w, f.operand()) != TruthValue::True) return TruthValue::False;
        for (int v : m.successors(w))
          if (v != w && eval(m, v, f.operand()) == TruthValue::True) return TruthValue::False;
        return TruthValue::True;
      }
      case Op::Ann: {
        const UpdateOutcome& u = update(m, w, f.content());
        if (u.kind == UpdateOutcome::Kind::Inconsistent) return TruthValue::True;
        if (u.kind == UpdateOutcome::Kind::Unknown)
          throw OracleInconclusive("[" + render(f.content()) + "] at " + m.id(w), u.reason);
        return eval(u.model, w, f.body()) == TruthValue::True ? TruthValue::True : TruthValue::False;
      }
      default: break;
    }
    return TruthValue::Gap;
  }

  const UpdateOutcome& update(const KripkeModel& m, int w, const Formula& content) {
    if (content.has_announcement())
      throw DynamicFormulaError("announcement content must be static: " + render(content));
    const auto key = std::make_tuple(static_cast<const void*>(&m), w, content);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto u = std::make_unique<UpdateOutcome>(announce(PointedModel(m, w), content, opt_));
    return *cache_.emplace(key, std::move(u)).first->second;
  }

  const UpdateOptions& options() const { return opt_; }

 private:
  UpdateOptions opt_;
  std::map<std::tuple<const void*, int, Formula>, std::unique_ptr<UpdateOutcome>> cache_;
};

inline TruthValue eval_dynamic(const PointedModel& pm, const Formula& f, const UpdateOptions& opt = {}) {
  DynamicEvaluator ev(opt);
  return ev.eval(pm, f);
}

struct NewWorldCheck {
  Formula formula;
  bool holds = false;
};

struct NewWorldReport {
  WorldId new_world;
  std::vector<NewWorldCheck> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
};

// Checks every member of B (and f) with modal depth <= d at the new world.
inline NewWorldReport verify_new_world(const PointedModel& pm, const Formula& f, int d, const UpdateOptions& opt = {}) {
  NewWorldReport r;
  const UpdateOutcome u = announce(pm, f, opt);
  if (!u.updated()) return r;
  r.new_world = u.new_world;
  const int n = u.model.require_world(u.new_world);
  std::vector<Formula> items = u.defining;
  if (std::find(items.begin(), items.end(), f) == items.end()) items.insert(items.begin(), f);
  for (const auto& chi : items)
    if (chi.modal_depth() <= d) r.checks.push_back({chi, sat(u.model, n, chi)});
  return r;
}

// --- eliminative reference update -------------------------------------------

enum class EliminationMode {
  KeepSatisfying,    // keep the worlds where f is true
  DropAntiSatisfying  // keep the worlds where f is not false
};

struct EliminativeResult {
  KripkeModel model;
  // Index of the old point in the restricted model; empty if it was removed.
  std::optional<int> point;
  bool point_eliminated() const { return !point.has_value(); }
};

inline EliminativeResult eliminative_announce(const PointedModel& pm, const Formula& f,
                                              EliminationMode mode = EliminationMode::KeepSatisfying) {
  if (f.has_announcement()) throw DynamicFormulaError();
  const KripkeModel& m = pm.model;
  EliminativeResult r;
  r.model.set_name(m.name());
  for (const auto& a : m.atoms()) r.model.add_atom(a);
  std::vector<int> map(m.num_worlds(), -1);
  detail::Sat s(m);
  for (int w = 0; w < m.num_worlds(); ++w) {
    const bool keep = mode == EliminationMode::KeepSatisfying ? s.pos(w, f) : !s.neg(w, f);
    if (!keep) continue;
    map[w] = r.model.add_world(m.id(w));
    for (const auto& a : m.atoms()) r.model.set_value(map[w], a, m.value(w, a));
  }
  for (auto [a, b] : m.edges())
    if (map[a] >= 0 && map[b] >= 0) r.model.add_edge(map[a], map[b]);
  if (map[pm.point] >= 0) r.point = map[pm.point];
  return r;
}

// [!f]g is vacuously true when the point does not survive the elimination.
inline TruthValue eval_eliminative(const KripkeModel& m, int w, const Formula& f,
                                   EliminationMode mode = EliminationMode::KeepSatisfying) {
  if (f.is_static()) return eval3(m, w, f);
  switch (f.op()) {
    case Op::Not: return tv_not(eval_eliminative(m, w, f.operand(), mode));
    case Op::And: return tv_and(eval_eliminative(m, w, f.lhs(), mode), eval_eliminative(m, w, f.rhs(), mode));
    case Op::Imp: return tv_imp(eval_eliminative(m, w, f.lhs(), mode), eval_eliminative(m, w, f.rhs(), mode));
    case Op::Ign: {
      if (eval_eliminative(m, w, f.operand(), mode) != TruthValue::True) return TruthValue::False;
      for (int v : m.successors(w))
        if (v != w && eval_eliminative(m, v, f.operand(), mode) == TruthValue::True) return TruthValue::False;
      return TruthValue::True;
    }
    case Op::Ann: {
      const auto r = eliminative_announce(PointedModel(m, w), f.content(), mode);
      if (r.point_eliminated()) return TruthValue::True;
      return eval_eliminative(r.model, *r.point, f.body(), mode) == TruthValue::True ? TruthValue::True
                                                                                   : TruthValue::False;
    }
    default: break;
  }
  return TruthValue::Gap;
}

inline TruthValue eval_eliminative(const PointedModel& pm, const Formula& f,
                                   EliminationMode mode = EliminationMode::KeepSatisfying) {
  return eval_eliminative(pm.model, pm.point, f, mode);
}

}  // namespace lei
