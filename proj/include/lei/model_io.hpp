#pragma once

// Model file format (line based, '#' starts a comment):
//
//   model NAME
//   world ID { a=T b=F }      atoms not listed are Gap; "a=G" declares a Gap atom
//   edge FROM TO
//
// Extended-model files add `trans "FORMULA" FROM TO` lines; see extmodel.hpp.

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lei/error.hpp"
#include "lei/model.hpp"
#include "lei/syntax.hpp"

namespace lei {

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool is_world_id(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '@'))
      return false;
  return true;
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] inline void model_fail(int lineno, const std::string& msg) {
  throw ModelError("line " + std::to_string(lineno) + ": " + msg);
}

// Parses the core directives; lines starting with another keyword are passed
// to `extra` (which must return false to reject them).
inline KripkeModel parse_model_text(
    std::string_view text,
    const std::function<bool(const std::string& line, int lineno, KripkeModel&)>& extra = {}) {
  KripkeModel m;
  bool named = false;
  std::vector<std::pair<int, std::pair<std::string, std::string>>> edges;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = strip_comment(raw);
    std::string spaced;
    for (char c : line) {
      if (c == '{' || c == '}') {
        spaced += ' ';
        spaced += c;
        spaced += ' ';
      } else {
        spaced += c;
      }
    }
    const auto tok = split_ws(spaced);
    if (tok.empty()) continue;
    if (tok[0] == "model") {
      if (tok.size() != 2) model_fail(lineno, "expected 'model NAME'");
      if (named) model_fail(lineno, "duplicate model header");
      m.set_name(tok[1]);
      named = true;
    } else if (tok[0] == "world") {
      if (tok.size() < 4 || tok[2] != "{" || tok.back() != "}")
        model_fail(lineno, "expected 'world ID { atom=T|F ... }'");
      if (!is_world_id(tok[1])) model_fail(lineno, "malformed world id '" + tok[1] + "'");
      if (m.has_world(tok[1])) model_fail(lineno, "duplicate world id '" + tok[1] + "'");
      const int w = m.add_world(tok[1]);
      std::set<std::string> seen;
      for (std::size_t i = 3; i + 1 < tok.size(); ++i) {
        const auto& t = tok[i];
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq + 2 != t.size())
          model_fail(lineno, "malformed valuation token '" + t + "'");
        const std::string atom = t.substr(0, eq);
        if (!is_atom_name(atom)) model_fail(lineno, "malformed valuation token '" + t + "'");
        if (!seen.insert(atom).second) model_fail(lineno, "atom '" + atom + "' listed twice");
        const char v = t[eq + 1];
        if (v == 'T') m.set_value(w, atom, TruthValue::True);
        else if (v == 'F') m.set_value(w, atom, TruthValue::False);
        else if (v == 'G') m.add_atom(atom);
        else model_fail(lineno, "malformed valuation token '" + t + "'");
      }
    } else if (tok[0] == "edge") {
      if (tok.size() != 3) model_fail(lineno, "expected 'edge FROM TO'");
      edges.push_back({lineno, {tok[1], tok[2]}});
    } else if (!extra || !extra(line, lineno, m)) {
      model_fail(lineno, "unknown directive '" + tok[0] + "'");
    }
  }
  for (const auto& [ln, e] : edges) {
    if (!m.has_world(e.first)) model_fail(ln, "edge references unknown world '" + e.first + "'");
    if (!m.has_world(e.second)) model_fail(ln, "edge references unknown world '" + e.second + "'");
    m.add_edge(e.first, e.second);
  }
  if (m.num_worlds() == 0) throw ModelError("model has no worlds");
  return m;
}

}  // namespace detail

inline KripkeModel load_model(std::string_view text) { return detail::parse_model_text(text); }

// Canonical text: worlds, atoms and edges in lexicographic order. Atoms that
// are Gap everywhere are kept in the signature as "a=G" on the first world.
inline std::string save_model(const KripkeModel& m) {
  std::vector<int> order(m.num_worlds());
  for (int i = 0; i < m.num_worlds(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return m.id(a) < m.id(b); });
  const auto atoms = m.sorted_atoms();
  std::set<std::string> used;
  for (int w = 0; w < m.num_worlds(); ++w)
    for (const auto& a : atoms)
      if (m.value(w, a) != TruthValue::Gap) used.insert(a);

  std::string out = "model " + m.name() + "\n";
  bool first = true;
  for (int w : order) {
    out += "world " + m.id(w) + " {";
    for (const auto& a : atoms) {
      const TruthValue v = m.value(w, a);
      if (v == TruthValue::True) out += " " + a + "=T";
      else if (v == TruthValue::False) out += " " + a + "=F";
      else if (first && !used.count(a)) out += " " + a + "=G";
    }
    out += " }\n";
    first = false;
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (auto [a, b] : m.edges()) edges.emplace_back(m.id(a), m.id(b));
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) out += "edge " + a + " " + b + "\n";
  return out;
}

// Per-world formula labels appended to the dot output.
struct DotAnnotation {
  std::string label;
  std::vector<bool> holds;  // indexed by world
};

// Graphviz text. Node labels list true atoms as "p" and false atoms as "¬p";
// the world id is shown as an external label.
inline std::string to_dot(const KripkeModel& m, const std::vector<DotAnnotation>& notes = {}) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "digraph " + quote(m.name()) + " {\n";
  const auto atoms = m.sorted_atoms();
  for (int w = 0; w < m.num_worlds(); ++w) {
    std::string label;
    for (const auto& a : atoms) {
      const TruthValue v = m.value(w, a);
      if (v == TruthValue::Gap) continue;
      if (!label.empty()) label += ", ";
      label += (v == TruthValue::False ? "¬" : "") + a;
    }
    for (const auto& n : notes)
      if (w < static_cast<int>(n.holds.size()) && n.holds[w]) label += (label.empty() ? "" : "\\n") + n.label;
    out += "  " + quote(m.id(w)) + " [label=" + quote(label) + ", xlabel=" + quote(m.id(w)) + "];\n";
  }
  for (auto [a, b] : m.edges()) out += "  " + quote(m.id(a)) + " -> " + quote(m.id(b)) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace lei
