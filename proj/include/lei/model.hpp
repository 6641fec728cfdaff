#pragma once

// Finite Kripke models with a three-valued atomic valuation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lei/error.hpp"

namespace lei {

enum class TruthValue : std::uint8_t { True, False, Gap };

inline const char* to_string(TruthValue v) {
  switch (v) {
    case TruthValue::True: return "True";
    case TruthValue::False: return "False";
    default: return "Gap";
  }
}

// Kleene negation.
inline TruthValue tv_not(TruthValue v) {
  if (v == TruthValue::True) return TruthValue::False;
  if (v == TruthValue::False) return TruthValue::True;
  return TruthValue::Gap;
}

// Kleene conjunction.
inline TruthValue tv_and(TruthValue a, TruthValue b) {
  if (a == TruthValue::False || b == TruthValue::False) return TruthValue::False;
  if (a == TruthValue::True && b == TruthValue::True) return TruthValue::True;
  return TruthValue::Gap;
}

// Two-valued implication: false only when the antecedent is true and the
// consequent is not.
inline TruthValue tv_imp(TruthValue a, TruthValue b) {
  return (a == TruthValue::True && b != TruthValue::True) ? TruthValue::False : TruthValue::True;
}

using WorldId = std::string;

class KripkeModel {
 public:
  KripkeModel() = default;
  explicit KripkeModel(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  // Returns the index of the new world; throws on a duplicate id.
  int add_world(const WorldId& id) {
    if (index_.count(id)) throw ModelError("duplicate world id '" + id + "'");
    const int idx = static_cast<int>(ids_.size());
    ids_.push_back(id);
    index_.emplace(id, idx);
    succ_.emplace_back();
    val_.emplace_back(atoms_.size(), TruthValue::Gap);
    return idx;
  }

  // Adds the atom to the signature (all worlds Gap) if missing; returns its index.
  int add_atom(const std::string& a) {
    auto it = atom_index_.find(a);
    if (it != atom_index_.end()) return it->second;
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(a);
    atom_index_.emplace(a, idx);
    for (auto& row : val_) row.push_back(TruthValue::Gap);
    return idx;
  }

  void set_value(int world, const std::string& atom, TruthValue v) {
    check_world(world);
    val_[world][add_atom(atom)] = v;
  }

  void add_edge(int from, int to) {
    check_world(from);
    check_world(to);
    auto& s = succ_[from];
    auto it = std::lower_bound(s.begin(), s.end(), to);
    if (it == s.end() || *it != to) s.insert(it, to);
  }

  void remove_edge(int from, int to) {
    check_world(from);
    auto& s = succ_[from];
    auto it = std::lower_bound(s.begin(), s.end(), to);
    if (it != s.end() && *it == to) s.erase(it);
  }

  void add_edge(const WorldId& from, const WorldId& to) {
    add_edge(require_world(from), require_world(to));
  }

  int num_worlds() const noexcept { return static_cast<int>(ids_.size()); }
  const std::vector<WorldId>& world_ids() const noexcept { return ids_; }
  const WorldId& id(int w) const { return ids_.at(w); }
  bool has_world(const WorldId& id) const { return index_.count(id) != 0; }

  int find_world(const WorldId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }

  int require_world(const WorldId& id) const {
    const int w = find_world(id);
    if (w < 0) throw ModelError("unknown world '" + id + "'");
    return w;
  }

  // Atom signature in insertion order.
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  std::vector<std::string> sorted_atoms() const {
    std::vector<std::string> out = atoms_;
    std::sort(out.begin(), out.end());
    return out;
  }
  int atom_index(const std::string& a) const {
    auto it = atom_index_.find(a);
    return it == atom_index_.end() ? -1 : it->second;
  }

  TruthValue value(int world, const std::string& atom) const {
    const int a = atom_index(atom);
    return a < 0 ? TruthValue::Gap : val_[world][a];
  }
  TruthValue value(int world, int atom) const { return val_[world][atom]; }

  const std::vector<int>& successors(int w) const { return succ_.at(w); }
  bool has_edge(int from, int to) const {
    const auto& s = succ_.at(from);
    return std::binary_search(s.begin(), s.end(), to);
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int w = 0; w < num_worlds(); ++w)
      for (int v : succ_[w]) out.emplace_back(w, v);
    return out;
  }

  std::size_t num_edges() const {
    std::size_t n = 0;
    for (const auto& s : succ_) n += s.size();
    return n;
  }

  // Smallest "<base>@<n>" (n >= 1) not used as a world id.
  WorldId fresh_id(const WorldId& base) const {
    for (int n = 1;; ++n) {
      WorldId c = base + "@" + std::to_string(n);
      if (!has_world(c)) return c;
    }
  }

  // Equality up to world and atom order: same ids, edges and non-Gap values.
  friend bool operator==(const KripkeModel& a, const KripkeModel& b) {
    if (a.num_worlds() != b.num_worlds()) return false;
    std::set<std::string> atoms(a.atoms_.begin(), a.atoms_.end());
    atoms.insert(b.atoms_.begin(), b.atoms_.end());
    for (int w = 0; w < a.num_worlds(); ++w) {
      const int v = b.find_world(a.id(w));
      if (v < 0) return false;
      for (const auto& at : atoms)
        if (a.value(w, at) != b.value(v, at)) return false;
      if (a.succ_[w].size() != b.succ_[v].size()) return false;
      for (int s : a.succ_[w]) {
        const int t = b.find_world(a.id(s));
        if (t < 0 || !b.has_edge(v, t)) return false;
      }
    }
    return true;
  }

 private:
  void check_world(int w) const {
    if (w < 0 || w >= num_worlds()) throw ModelError("world index out of range");
  }

  std::string name_ = "model";
  std::vector<WorldId> ids_;
  std::unordered_map<WorldId, int> index_;
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, int> atom_index_;
  std::vector<std::vector<TruthValue>> val_;
  std::vector<std::vector<int>> succ_;
};

struct PointedModel {
  KripkeModel model;
  int point = 0;

  PointedModel() = default;
  PointedModel(KripkeModel m, int w) : model(std::move(m)), point(w) {
    if (point < 0 || point >= model.num_worlds()) throw ModelError("point is not a world of the model");
  }
  PointedModel(KripkeModel m, const WorldId& w) : model(std::move(m)) { point = model.require_world(w); }

  const WorldId& point_id() const { return model.id(point); }
};

}  // namespace lei
