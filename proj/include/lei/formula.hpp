#pragma once

// Formulas of the static language (atoms, ~, &, ->, I) and of its extension
// with announcements [phi]psi. Disjunction and biconditional are not nodes:
// they are abbreviations expanded by the builders below.
//
// Formula is an immutable value with shared structure; copying is cheap and
// every operation is safe for concurrent readers.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lei {

enum class Op : std::uint8_t { Atom, Not, And, Imp, Ign, Ann };

class Formula {
 public:
  // Placeholder atom "_" so Formula can live in containers; build real
  // formulas through the factories.
  Formula() : Formula(atom_node("_")) {}

  static Formula atom(std::string name) { return Formula(atom_node(std::move(name))); }
  static Formula make(Op op, const Formula& a) { return Formula(unary(op, a)); }
  static Formula make(Op op, const Formula& a, const Formula& b) { return Formula(binary(op, a, b)); }

  Op op() const noexcept { return node_->op; }
  bool is(Op o) const noexcept { return node_->op == o; }

  // Atom name; empty for compound formulas.
  const std::string& name() const noexcept { return node_->name; }

  // Operand of Not/Ign, left operand of And/Imp, content of Ann.
  const Formula& lhs() const noexcept { return *node_->kids[0]; }
  // Right operand of And/Imp, body of Ann.
  const Formula& rhs() const noexcept { return *node_->kids[1]; }
  const Formula& operand() const noexcept { return lhs(); }
  const Formula& content() const noexcept { return lhs(); }
  const Formula& body() const noexcept { return rhs(); }

  std::size_t arity() const noexcept {
    switch (op()) {
      case Op::Atom: return 0;
      case Op::Not:
      case Op::Ign: return 1;
      default: return 2;
    }
  }

  std::size_t hash() const noexcept { return node_->hash; }
  // Number of nodes in the tree (shared subtrees counted every time).
  std::size_t size() const noexcept { return node_->size; }
  // Nesting depth of I and [.] operators.
  int modal_depth() const noexcept { return node_->modal_depth; }
  bool has_announcement() const noexcept { return node_->has_ann; }
  bool is_static() const noexcept { return !node_->has_ann; }

  // Identity of the shared node; stable for the lifetime of any copy.
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) noexcept { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept {
    const int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  // Structural total order: by operator, then atom name, then operands.
  static int compare(const Formula& a, const Formula& b) noexcept {
    if (a.node_ == b.node_) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    if (a.op() == Op::Atom) return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    const int l = compare(a.lhs(), b.lhs());
    if (l != 0 || a.arity() == 1) return l;
    return compare(a.rhs(), b.rhs());
  }

 private:
  struct Node {
    Op op = Op::Atom;
    std::string name;
    std::unique_ptr<Formula> kids[2];
    std::size_t hash = 0;
    std::size_t size = 1;
    int modal_depth = 0;
    bool has_ann = false;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::size_t mix(std::size_t seed, std::size_t v) noexcept {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  }

  static std::shared_ptr<const Node> atom_node(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Atom;
    n->hash = mix(0, std::hash<std::string>{}(name));
    n->name = std::move(name);
    return n;
  }

  static std::shared_ptr<const Node> unary(Op op, const Formula& a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids[0] = std::make_unique<Formula>(a);
    n->hash = mix(mix(static_cast<std::size_t>(op) + 1, a.hash()), 17);
    n->size = 1 + a.size();
    n->modal_depth = a.modal_depth() + (op == Op::Ign ? 1 : 0);
    n->has_ann = a.has_announcement();
    return n;
  }

  static std::shared_ptr<const Node> binary(Op op, const Formula& a, const Formula& b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids[0] = std::make_unique<Formula>(a);
    n->kids[1] = std::make_unique<Formula>(b);
    n->hash = mix(mix(static_cast<std::size_t>(op) + 1, a.hash()), b.hash());
    n->size = 1 + a.size() + b.size();
    n->modal_depth = std::max(a.modal_depth(), b.modal_depth()) + (op == Op::Ann ? 1 : 0);
    n->has_ann = op == Op::Ann || a.has_announcement() || b.has_announcement();
    return n;
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

using FormulaSet = std::set<Formula>;

// --- builders --------------------------------------------------------------

inline Formula atom(std::string name) { return Formula::atom(std::move(name)); }
inline Formula neg(const Formula& a) { return Formula::make(Op::Not, a); }
inline Formula conj(const Formula& a, const Formula& b) { return Formula::make(Op::And, a, b); }
inline Formula imp(const Formula& a, const Formula& b) { return Formula::make(Op::Imp, a, b); }
inline Formula ign(const Formula& a) { return Formula::make(Op::Ign, a); }
inline Formula ann(const Formula& content, const Formula& body) { return Formula::make(Op::Ann, content, body); }

// a | b  :=  ~(~a & ~b)
inline Formula disj(const Formula& a, const Formula& b) { return neg(conj(neg(a), neg(b))); }
// a <-> b  :=  (a -> b) & (b -> a)
inline Formula iff(const Formula& a, const Formula& b) { return conj(imp(a, b), imp(b, a)); }

// Left-nested conjunction ((f1 & f2) & f3) ...; requires a nonempty list.
inline Formula conj_all(const std::vector<Formula>& fs) {
  Formula acc = fs.at(0);
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

// Left-nested disjunction; requires a nonempty list.
inline Formula disj_all(const std::vector<Formula>& fs) {
  Formula acc = fs.at(0);
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

// --- recognisers for the abbreviations --------------------------------------

// Matches ~(~a & ~b) and yields (a, b).
inline bool as_disj(const Formula& f, Formula* a, Formula* b) {
  if (!f.is(Op::Not) || !f.operand().is(Op::And)) return false;
  const Formula& c = f.operand();
  if (!c.lhs().is(Op::Not) || !c.rhs().is(Op::Not)) return false;
  if (a) *a = c.lhs().operand();
  if (b) *b = c.rhs().operand();
  return true;
}

// Matches (a -> b) & (b -> a) and yields (a, b).
inline bool as_iff(const Formula& f, Formula* a, Formula* b) {
  if (!f.is(Op::And) || !f.lhs().is(Op::Imp) || !f.rhs().is(Op::Imp)) return false;
  const Formula& l = f.lhs();
  const Formula& r = f.rhs();
  if (!(l.lhs() == r.rhs() && l.rhs() == r.lhs())) return false;
  if (a) *a = l.lhs();
  if (b) *b = l.rhs();
  return true;
}

// --- structural queries -----------------------------------------------------

namespace detail {
inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.is(Op::Atom)) {
    out.insert(f.name());
    return;
  }
  for (std::size_t i = 0; i < f.arity(); ++i) collect_atoms(i == 0 ? f.lhs() : f.rhs(), out);
}
inline void collect_subformulas(const Formula& f, FormulaSet& out) {
  if (!out.insert(f).second) return;
  for (std::size_t i = 0; i < f.arity(); ++i) collect_subformulas(i == 0 ? f.lhs() : f.rhs(), out);
}
}  // namespace detail

inline std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  detail::collect_atoms(f, out);
  return out;
}

template <class Range>
std::set<std::string> atoms_of_all(const Range& fs) {
  std::set<std::string> out;
  for (const Formula& f : fs) detail::collect_atoms(f, out);
  return out;
}

inline FormulaSet subformulas(const Formula& f) {
  FormulaSet out;
  detail::collect_subformulas(f, out);
  return out;
}

// --- uniform substitution ---------------------------------------------------

using Substitution = std::map<std::string, Formula>;

struct SubstitutionResult {
  Formula formula;
  // True when no substituted atom occurs in the content or body of any
  // announcement subformula of the input; only then is the substitution
  // guaranteed to preserve theoremhood in the dynamic logic.
  bool announcement_safe = true;
};

namespace detail {
inline Formula substitute(const Formula& f, const Substitution& map) {
  switch (f.op()) {
    case Op::Atom: {
      auto it = map.find(f.name());
      return it == map.end() ? f : it->second;
    }
    case Op::Not:
    case Op::Ign: return Formula::make(f.op(), substitute(f.operand(), map));
    default: return Formula::make(f.op(), substitute(f.lhs(), map), substitute(f.rhs(), map));
  }
}

inline bool touches_announcement(const Formula& f, const Substitution& map) {
  if (f.is(Op::Atom)) return false;
  if (f.is(Op::Ann)) {
    for (const auto& a : atoms_of(f))
      if (map.count(a)) return true;
    return false;
  }
  for (std::size_t i = 0; i < f.arity(); ++i)
    if (touches_announcement(i == 0 ? f.lhs() : f.rhs(), map)) return true;
  return false;
}
}  // namespace detail

// Simultaneous replacement of every listed atom.
inline SubstitutionResult uniform_substitute(const Formula& f, const Substitution& map) {
  return {detail::substitute(f, map), !detail::touches_announcement(f, map)};
}

}  // namespace lei

template <>
struct std::hash<lei::Formula> {
  std::size_t operator()(const lei::Formula& f) const noexcept { return f.hash(); }
};
