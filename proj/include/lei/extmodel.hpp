#pragma once

// Extended models: a Kripke core plus one transition relation per announced
// formula, the ⊨⁺ evaluator, and checks of (Func), (Inv-p), (Inv-n), (Pr1)
// and (Pr2).
//
// File format: a model file plus lines
//   trans "FORMULA" FROM TO
//   trans "FORMULA"            declares an empty relation

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/model.hpp"
#include "lei/model_io.hpp"
#include "lei/oracle.hpp"
#include "lei/semantics.hpp"
#include "lei/syntax.hpp"
#include "lei/update.hpp"

namespace lei {

struct ExtendedModel {
  KripkeModel core;
  std::map<Formula, std::set<std::pair<int, int>>> transitions;
  // Worlds at which (Func) is checked for each formula. A formula without an
  // entry is checked at every world of the core.
  std::map<Formula, std::set<int>> func_scope;

  std::vector<int> successors(const Formula& f, int w) const {
    std::vector<int> out;
    auto it = transitions.find(f);
    if (it == transitions.end()) return out;
    for (auto [a, b] : it->second)
      if (a == w) out.push_back(b);
    return out;
  }

  void add_transition(const Formula& f, int from, int to) {
    if (from < 0 || to < 0 || from >= core.num_worlds() || to >= core.num_worlds())
      throw ModelError("transition outside the core");
    transitions[f].insert({from, to});
  }
};

// --- ⊨⁺ ------------------------------------------------------------------------

namespace detail {

class SatPlus {
 public:
  explicit SatPlus(const ExtendedModel& em) : em_(em) {}

  bool pos(int w, const Formula& f) {
    const KripkeModel& m = em_.core;
    switch (f.op()) {
      case Op::Atom: return m.value(w, f.name()) == TruthValue::True;
      case Op::Not: return neg(w, f.operand());
      case Op::And: return pos(w, f.lhs()) && pos(w, f.rhs());
      case Op::Imp: return !pos(w, f.lhs()) || pos(w, f.rhs());
      case Op::Ign: {
        if (!pos(w, f.operand())) return false;
        for (int v : m.successors(w))
          if (v != w && pos(v, f.operand())) return false;
        return true;
      }
      case Op::Ann:
        for (int v : em_.successors(f.content(), w))
          if (!pos(v, f.body())) return false;
        return true;
    }
    return false;
  }

  bool neg(int w, const Formula& f) {
    const KripkeModel& m = em_.core;
    switch (f.op()) {
      case Op::Atom: return m.value(w, f.name()) == TruthValue::False;
      case Op::Not: return pos(w, f.operand());
      case Op::And: return neg(w, f.lhs()) || neg(w, f.rhs());
      case Op::Imp: return !pos(w, f);
      case Op::Ign: {
        for (int v : m.successors(w))
          if (v != w && pos(v, f.operand())) return true;
        return !pos(w, f.operand());
      }
      case Op::Ann:
        for (int v : em_.successors(f.content(), w))
          if (!pos(v, f.body())) return true;
        return false;
    }
    return false;
  }

 private:
  const ExtendedModel& em_;
};

}  // namespace detail

inline bool sat_plus(const ExtendedModel& em, int w, const Formula& f) { return detail::SatPlus(em).pos(w, f); }
inline bool sat_plus_neg(const ExtendedModel& em, int w, const Formula& f) { return detail::SatPlus(em).neg(w, f); }
inline bool sat_plus(const ExtendedModel& em, const WorldId& w, const Formula& f) {
  return sat_plus(em, em.core.require_world(w), f);
}
inline bool sat_plus_neg(const ExtendedModel& em, const WorldId& w, const Formula& f) {
  return sat_plus_neg(em, em.core.require_world(w), f);
}

// --- inducing extended models from updates ---------------------------------------

// Grows an extended model by materializing updates. For a consistent
// announcement of f at x it adds a copy x' of x and a new world n with
//   x' -> succ(x), x' -> n, n -> succ(x),   R^f(x) = {x'},
// where x itself is replaced by x' in succ(x),
// n carrying the atoms the update gives the new world.
class Inducer {
 public:
  Inducer(KripkeModel core, UpdateOptions opt) : opt_(std::move(opt)) { em_.core = std::move(core); }

  // R^f(x), creating it if needed; nullopt when f is inconsistent at x.
  std::optional<int> transition(int x, const Formula& f) {
    if (f.has_announcement()) throw DynamicFormulaError("announcement content must be static: " + render(f));
    em_.transitions[f];
    em_.func_scope[f].insert(x);
    const auto key = std::make_pair(x, f);
    if (auto it = done_.find(key); it != done_.end()) return it->second;
    const UpdateOutcome u = announce(PointedModel(em_.core, x), f, opt_);
    if (u.kind == UpdateOutcome::Kind::Unknown)
      throw OracleInconclusive("[" + render(f) + "] at " + em_.core.id(x), u.reason);
    std::optional<int> out;
    if (u.updated()) {
      KripkeModel& m = em_.core;
      const WorldId base = m.id(x);
      int k = 1;
      while (m.has_world(base + "." + std::to_string(k))) ++k;
      const WorldId copy_id = base + "." + std::to_string(k);
      const std::vector<int> succ = m.successors(x);
      const int xc = m.add_world(copy_id);
      const int n = m.add_world(copy_id + "@1");
      for (const auto& a : m.atoms()) m.set_value(xc, a, m.value(x, a));
      const int un = u.model.require_world(u.new_world);
      for (const auto& a : u.model.atoms()) m.set_value(n, a, u.model.value(un, a));
      // A self-loop at x becomes a loop at the copy.
      for (int v : succ) {
        m.add_edge(xc, v == x ? xc : v);
        m.add_edge(n, v == x ? xc : v);
      }
      m.add_edge(xc, n);
      em_.add_transition(f, x, xc);
      out = xc;
    }
    done_.emplace(key, out);
    return out;
  }

  // Creates every transition needed to evaluate g at x under ⊨⁺.
  void prepare(int x, const Formula& g) {
    if (g.is_static()) return;
    if (!visited_.insert({x, g}).second) return;
    switch (g.op()) {
      case Op::Not: prepare(x, g.operand()); break;
      case Op::And:
      case Op::Imp:
        prepare(x, g.lhs());
        prepare(x, g.rhs());
        break;
      case Op::Ign: {
        prepare(x, g.operand());
        const std::vector<int> succ = em_.core.successors(x);
        for (int v : succ)
          if (v != x) prepare(v, g.operand());
        break;
      }
      case Op::Ann:
        if (auto xc = transition(x, g.content())) prepare(*xc, g.body());
        break;
      default: break;
    }
  }

  const ExtendedModel& model() const { return em_; }
  ExtendedModel take() { return std::move(em_); }

 private:
  UpdateOptions opt_;
  ExtendedModel em_;
  std::map<std::pair<int, Formula>, std::optional<int>> done_;
  std::set<std::pair<int, Formula>> visited_;
};

// One transition per (point, announcement).
inline ExtendedModel induce_extended(const KripkeModel& m, const std::vector<Formula>& announcements,
                                     const std::vector<int>& points, const UpdateOptions& opt = {}) {
  Inducer ind(m, opt);
  for (const auto& f : announcements) {
    for (int w : points) ind.transition(w, f);
  }
  return ind.take();
}

// Every transition needed to evaluate each formula at each point.
inline ExtendedModel induce_for(const KripkeModel& m, const std::vector<Formula>& formulas,
                                const std::vector<int>& points, const UpdateOptions& opt = {}) {
  Inducer ind(m, opt);
  for (const auto& f : formulas)
    for (int w : points) ind.prepare(w, f);
  return ind.take();
}

// --- properties ------------------------------------------------------------------

enum class PropertyStatus { Pass, Fail, Unknown };

inline const char* to_string(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::Pass: return "pass";
    case PropertyStatus::Fail: return "fail";
    default: return "unknown";
  }
}

struct PropertyResult {
  std::string name;
  PropertyStatus status = PropertyStatus::Pass;
  std::vector<std::string> notes;

  void fail(std::string why) {
    status = PropertyStatus::Fail;
    notes.push_back(std::move(why));
  }
  void unknown(std::string why) {
    if (status == PropertyStatus::Pass) status = PropertyStatus::Unknown;
    notes.push_back(std::move(why));
  }
};

struct PropertyReport {
  int depth = 0;
  std::vector<PropertyResult> properties;  // Func, Inv-p, Inv-n, Pr1, Pr2
  // Defining-set members the update leaves false at its own new world.
  std::vector<std::string> drift;

  const PropertyResult& get(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return p;
    throw Error("no property " + name);
  }
  bool all_pass() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.status == PropertyStatus::Pass; });
  }
};

// Set inclusion on depth-d theory slices (an approximation of inclusion
// between worlds seen as formula sets).
inline bool slice_included(const KripkeModel& m, int a, int b, int depth) {
  const TheorySlice sa = theory_slice(m, a, depth);
  const TheorySlice sb = theory_slice(m, b, depth);
  std::set<Formula> in_b(sb.formulas.begin(), sb.formulas.end());
  return std::all_of(sa.formulas.begin(), sa.formulas.end(), [&](const Formula& f) { return in_b.count(f) > 0; });
}

inline PropertyReport check_extension_properties(const ExtendedModel& em, const SearchBounds& b, int depth,
                                                 const UpdateOptions& base_opt = {}) {
  const KripkeModel& m = em.core;
  PropertyReport rep;
  rep.depth = depth;
  auto named = [](const char* n) {
    PropertyResult p;
    p.name = n;
    return p;
  };
  PropertyResult func = named("Func"), invp = named("Inv-p"), invn = named("Inv-n"), pr1 = named("Pr1"),
                 pr2 = named("Pr2");
  UpdateOptions opt = base_opt;
  opt.bounds = b;
  opt.on_unknown = OnUnknown::Error;
  auto contains = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };

  for (const auto& [f, pairs] : em.transitions) {
    const std::string fs = render(f);
    // (Func)
    std::vector<int> scope;
    if (auto it = em.func_scope.find(f); it != em.func_scope.end()) scope.assign(it->second.begin(), it->second.end());
    else
      for (int w = 0; w < m.num_worlds(); ++w) scope.push_back(w);
    for (int w : scope) {
      const auto cons = consistent_with_point(PointedModel(m, w), f, opt.depth_for(f), b);
      const std::size_t k = em.successors(f, w).size();
      if (cons.value == Consistency::Unknown) func.unknown("[" + fs + "] at " + m.id(w) + ": " + cons.reason);
      else if (cons.value == Consistency::Consistent && k != 1)
        func.fail("[" + fs + "] at " + m.id(w) + ": consistent but " + std::to_string(k) + " successors");
      else if (cons.value == Consistency::Inconsistent && k != 0)
        func.fail("[" + fs + "] at " + m.id(w) + ": inconsistent but has a successor");
    }
    for (auto [w, w1] : pairs) {
      const std::string tag = "[" + fs + "] " + m.id(w) + " -> " + m.id(w1);
      // (Inv-p), (Inv-n)
      for (const auto& a : m.atoms()) {
        const TruthValue x = m.value(w, a), y = m.value(w1, a);
        if ((x == TruthValue::True) != (y == TruthValue::True)) invp.fail(tag + ": " + a + " differs");
        if ((x == TruthValue::False) != (y == TruthValue::False)) invn.fail(tag + ": ~" + a + " differs");
      }
      // (Pr1)
      const std::vector<int> sw = m.successors(w);
      const std::vector<int> sw1 = m.successors(w1);
      // w' stands in for w, so a loop at w is kept as a loop at w'.
      auto sees = [&](int from, int v) {
        const std::vector<int>& s = m.successors(from);
        return contains(s, v) || (v == w && contains(s, w1));
      };
      for (int v : sw)
        if (!sees(w1, v)) pr1.fail(tag + ": (1) " + m.id(v) + " not kept");
      const UpdateOutcome u = announce(PointedModel(m, w), f, opt);
      // Candidates for w*: (2) alone, then (2) and (3).
      std::vector<int> stars2, stars;
      if (u.kind == UpdateOutcome::Kind::Unknown) {
        pr1.unknown(tag + ": " + u.reason);
      } else if (u.kind == UpdateOutcome::Kind::Inconsistent) {
        pr1.fail(tag + ": announcement is inconsistent at the source");
      } else {
        // Members of B (f included) that the update itself leaves unrealized
        // at its new world are not demanded of w*; they are reported as drift.
        const std::vector<Formula> all = defining_set(PointedModel(m, w), f, depth);
        std::vector<Formula> defining;
        {
          detail::Sat us(u.model);
          const int un = u.model.require_world(u.new_world);
          for (const auto& g : all) {
            if (us.pos(un, g)) defining.push_back(g);
            else rep.drift.push_back(tag + ": " + render(g) + " does not hold at the updated new world");
          }
        }
        detail::Sat s(m);
        for (int c : sw1) {
          bool ok = true;
          for (const auto& [a, v] : u.atoms)
            if (m.value(c, a) != v) ok = false;
          for (std::size_t i = 0; ok && i < defining.size(); ++i)
            if (defining[i].modal_depth() <= depth && !s.pos(c, defining[i])) ok = false;
          if (!ok) continue;
          stars2.push_back(c);
          if (std::all_of(sw.begin(), sw.end(), [&](int v) { return sees(c, v); }))
            stars.push_back(c);
        }
        if (stars2.empty()) {
          pr1.fail(tag + ": (2) no successor realizes Cn(" + fs + ") with the ignorance set");
        } else if (stars.empty()) {
          for (int v : sw)
            if (!sees(stars2.front(), v))
              pr1.fail(tag + ": (3) " + m.id(stars2.front()) + " misses " + m.id(v));
        }
      }
      // (Pr2), for some choice of w*
      auto covered = [&](std::optional<int> star, std::vector<std::string>* missing) {
        bool all = true;
        for (int c : sw1) {
          bool ok = (c == w1 && contains(sw, w)) || (star && slice_included(m, c, *star, depth));
          for (std::size_t i = 0; !ok && i < sw.size(); ++i) ok = slice_included(m, c, sw[i], depth);
          if (!ok && missing) missing->push_back(m.id(c));
          all = all && ok;
        }
        return all;
      };
      const std::vector<int>& pool = stars.empty() ? stars2 : stars;
      bool pr2_ok = std::any_of(pool.begin(), pool.end(), [&](int c) { return covered(c, nullptr); });
      if (!pr2_ok) {
        std::vector<std::string> missing;
        covered(pool.empty() ? std::nullopt : std::optional<int>(pool.front()), &missing);
        if (missing.empty()) pr2_ok = true;
        for (const auto& id : missing) {
          if (u.kind == UpdateOutcome::Kind::Unknown) pr2.unknown(tag + ": " + id + " undecided");
          else pr2.fail(tag + ": " + id + " carries new information");
        }
      }
    }
  }
  rep.properties = {func, invp, invn, pr1, pr2};
  return rep;
}

// --- file IO ---------------------------------------------------------------------

inline ExtendedModel load_extended_model(std::string_view text) {
  struct Pending {
    int lineno;
    Formula f;
    std::optional<std::pair<std::string, std::string>> edge;
  };
  std::vector<Pending> pending;
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return std::string(v);
  };
  auto extra = [&](const std::string& line, int lineno, KripkeModel&) {
    std::string s = trim(line);
    if (s.rfind("trans", 0) != 0) return false;
    s = trim(s.substr(5));
    if (s.empty() || s.front() != '"') detail::model_fail(lineno, "expected 'trans \"FORMULA\" FROM TO'");
    const auto close = s.find('"', 1);
    if (close == std::string::npos) detail::model_fail(lineno, "unterminated formula");
    Pending p{lineno, Formula{}, std::nullopt};
    try {
      p.f = parse(s.substr(1, close - 1));
    } catch (const ParseError& e) {
      detail::model_fail(lineno, e.what());
    }
    const auto rest = detail::split_ws(s.substr(close + 1));
    if (rest.size() == 2) p.edge = std::make_pair(rest[0], rest[1]);
    else if (!rest.empty()) detail::model_fail(lineno, "expected 'trans \"FORMULA\" FROM TO'");
    pending.push_back(std::move(p));
    return true;
  };
  ExtendedModel em;
  em.core = detail::parse_model_text(text, extra);
  for (const auto& p : pending) {
    em.transitions[p.f];
    if (!p.edge) continue;
    for (const auto& id : {p.edge->first, p.edge->second})
      if (!em.core.has_world(id)) detail::model_fail(p.lineno, "transition references unknown world '" + id + "'");
    em.add_transition(p.f, em.core.require_world(p.edge->first), em.core.require_world(p.edge->second));
  }
  return em;
}

inline std::string save_extended_model(const ExtendedModel& em) {
  std::string out = save_model(em.core);
  for (const auto& [f, pairs] : em.transitions) {
    const std::string q = "trans \"" + render(f) + "\"";
    if (pairs.empty()) out += q + "\n";
    std::vector<std::pair<std::string, std::string>> ps;
    for (auto [a, b] : pairs) ps.emplace_back(em.core.id(a), em.core.id(b));
    std::sort(ps.begin(), ps.end());
    for (const auto& [a, b] : ps) out += q + " " + a + " " + b + "\n";
  }
  return out;
}

// The core as Graphviz text plus one dashed edge per transition pair.
inline std::string to_dot(const ExtendedModel& em) {
  std::string out = to_dot(em.core);
  out.erase(out.rfind('}'));
  for (const auto& [f, pairs] : em.transitions) {
    std::string label;
    for (char c : "[" + render(f) + "]") {
      if (c == '"') label += '\\';
      label += c;
    }
    for (auto [a, b] : pairs)
      out += "  \"" + em.core.id(a) + "\" -> \"" + em.core.id(b) + "\" [style=dashed, label=\"" + label + "\"];\n";
  }
  return out + "}\n";
}

}  // namespace lei
