#pragma once

// Seeded generators for models and formulas. Every draw goes through one
// std::mt19937_64, so a seed fixes the whole sequence.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lei/formula.hpp"
#include "lei/model.hpp"

namespace lei {

struct ModelShape {
  int max_worlds = 3;
  int max_atoms = 2;
  double edge_probability = 0.35;
  bool self_loops = true;
};

struct FormulaShape {
  std::vector<std::string> atoms{"p", "q"};
  int max_depth = 2;        // syntactic depth
  bool allow_or = true;     // emit desugared disjunctions
  bool announcements = false;
  int content_depth = 1;    // depth of announcement contents
};

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  std::uint64_t bits() { return rng_(); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v.at(static_cast<std::size_t>(below(static_cast<int>(v.size()))));
  }

  std::vector<std::string> atom_names(int k) {
    static const std::vector<std::string> names{"p", "q", "r", "s", "t", "u"};
    return {names.begin(), names.begin() + std::min<int>(k, static_cast<int>(names.size()))};
  }

  KripkeModel model(const ModelShape& s) {
    KripkeModel m("random");
    const int n = between(1, s.max_worlds);
    const auto atoms = atom_names(between(1, s.max_atoms));
    for (int w = 0; w < n; ++w) m.add_world("w" + std::to_string(w));
    for (const auto& a : atoms) m.add_atom(a);
    for (int w = 0; w < n; ++w)
      for (const auto& a : atoms) {
        const int v = below(3);
        m.set_value(w, a, v == 0 ? TruthValue::True : v == 1 ? TruthValue::False : TruthValue::Gap);
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b && !s.self_loops) continue;
        if (chance(s.edge_probability)) m.add_edge(a, b);
      }
    return m;
  }

  Formula formula(const FormulaShape& s) { return formula(s, s.max_depth); }

  Formula formula(const FormulaShape& s, int depth) {
    if (depth <= 0 || chance(0.2)) return atom(pick(s.atoms));
    const int kinds = s.announcements ? 7 : 6;
    switch (below(kinds)) {
      case 0: return neg(formula(s, depth - 1));
      case 1: return conj(formula(s, depth - 1), formula(s, depth - 1));
      case 2: return imp(formula(s, depth - 1), formula(s, depth - 1));
      case 3:
      case 4: return ign(formula(s, depth - 1));
      case 5:
        if (s.allow_or) return disj(formula(s, depth - 1), formula(s, depth - 1));
        return neg(formula(s, depth - 1));
      default: {
        FormulaShape c = s;
        c.announcements = false;
        return ann(formula(c, std::min(s.content_depth, depth - 1)), formula(s, depth - 1));
      }
    }
  }

  // A static formula of at most the given depth (announcement-free).
  Formula static_formula(const std::vector<std::string>& atoms, int depth) {
    FormulaShape s;
    s.atoms = atoms;
    s.max_depth = depth;
    return formula(s);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace lei
