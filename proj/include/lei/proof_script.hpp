#pragma once

// Proof-script files, one step per line:
//
//   n. [CTX: f1; f2] FORMULA  BY axiom:A11 {phi=..., psi=...}
//   n. FORMULA  BY rule:MP 3,4
//   n. [CTX: f] f  BY assume
//   n. FORMULA  BY macro:Trans 2,5
//
// The context prefix is omitted for theorems. '#' starts a comment.

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lei/error.hpp"
#include "lei/proofkit.hpp"
#include "lei/syntax.hpp"

namespace lei {

class ScriptError : public Error {
 public:
  ScriptError(int lineno, const std::string& msg)
      : Error("script line " + std::to_string(lineno) + ": " + msg), lineno_(lineno) {}
  int lineno() const noexcept { return lineno_; }

 private:
  int lineno_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline int parse_int(const std::string& s, int lineno, const char* what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ScriptError(lineno, std::string("malformed ") + what + " '" + s + "'");
  return std::stoi(s);
}

inline Formula parse_at(const std::string& text, int lineno) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ScriptError(lineno, e.what());
  }
}

inline Justification parse_justification(const std::string& text, int lineno) {
  Justification j;
  if (text == "assume") {
    j.kind = Justification::Kind::Assume;
    return j;
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ScriptError(lineno, "malformed justification '" + text + "'");
  const std::string kind = text.substr(0, colon);
  std::string rest = trim(text.substr(colon + 1));
  std::size_t name_end = 0;
  while (name_end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[name_end])) && rest[name_end] != '{')
    ++name_end;
  j.name = rest.substr(0, name_end);
  rest = trim(rest.substr(name_end));
  if (j.name.empty()) throw ScriptError(lineno, "missing name in justification");
  if (kind == "axiom") {
    j.kind = Justification::Kind::Axiom;
    if (rest.empty()) return j;
    if (rest.front() != '{' || rest.back() != '}') throw ScriptError(lineno, "malformed substitution '" + rest + "'");
    const std::string body = trim(std::string_view(rest).substr(1, rest.size() - 2));
    if (body.empty()) return j;
    for (const auto& item : split_on(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ScriptError(lineno, "malformed substitution item '" + item + "'");
      const std::string key = trim(item.substr(0, eq));
      if (!is_metavariable(key) && !is_atom_slot(key)) throw ScriptError(lineno, "unknown metavariable '" + key + "'");
      if (j.subst.count(key)) throw ScriptError(lineno, "metavariable '" + key + "' given twice");
      j.subst.emplace(key, parse_at(trim(item.substr(eq + 1)), lineno));
    }
    return j;
  }
  if (kind == "rule") j.kind = Justification::Kind::Rule;
  else if (kind == "macro") j.kind = Justification::Kind::Macro;
  else throw ScriptError(lineno, "unknown justification kind '" + kind + "'");
  if (!rest.empty())
    for (const auto& n : split_on(rest, ',')) j.premises.push_back(parse_int(n, lineno, "premise"));
  return j;
}

// Position of the " BY " separator (the last one, formulas never contain it).
inline std::size_t find_by(const std::string& s) {
  std::size_t best = std::string::npos;
  for (std::size_t i = 1; i + 3 <= s.size(); ++i) {
    if (s.compare(i, 2, "BY") != 0) continue;
    const bool left = std::isspace(static_cast<unsigned char>(s[i - 1]));
    const bool right = i + 2 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 2]));
    if (left && right) best = i;
  }
  return best;
}

}  // namespace detail

inline Line parse_script_line(const std::string& raw, int lineno) {
  std::string s = detail::trim(raw);
  const auto dot = s.find('.');
  if (dot == std::string::npos) throw ScriptError(lineno, "expected 'n. ...'");
  Line l;
  l.number = detail::parse_int(detail::trim(s.substr(0, dot)), lineno, "line number");
  s = detail::trim(s.substr(dot + 1));
  if (s.rfind("[CTX:", 0) == 0) {
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '[') ++depth;
      if (s[i] == ']' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string::npos) throw ScriptError(lineno, "unterminated context");
    const std::string inner = detail::trim(std::string_view(s).substr(5, close - 5));
    if (!inner.empty())
      for (const auto& f : detail::split_on(inner, ';')) {
        if (f.empty()) throw ScriptError(lineno, "empty context member");
        l.context.push_back(detail::parse_at(f, lineno));
      }
    s = detail::trim(s.substr(close + 1));
  }
  const auto by = detail::find_by(s);
  if (by == std::string::npos) throw ScriptError(lineno, "missing 'BY' justification");
  l.formula = detail::parse_at(detail::trim(s.substr(0, by)), lineno);
  l.just = detail::parse_justification(detail::trim(s.substr(by + 2)), lineno);
  return l;
}

inline Derivation parse_script(std::string_view text) {
  Derivation d;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    if (detail::trim(raw).empty()) continue;
    d.lines.push_back(parse_script_line(raw, lineno));
  }
  return d;
}

inline std::string print_line(const Line& l) {
  std::string out = std::to_string(l.number) + ". ";
  if (!l.context.empty()) {
    out += "[CTX: ";
    for (std::size_t i = 0; i < l.context.size(); ++i) out += (i ? "; " : "") + render(l.context[i]);
    out += "] ";
  }
  out += render(l.formula) + "  BY ";
  const auto& j = l.just;
  auto premises = [&] {
    std::string p;
    for (std::size_t i = 0; i < j.premises.size(); ++i) p += (i ? "," : "") + std::to_string(j.premises[i]);
    return p.empty() ? p : " " + p;
  };
  switch (j.kind) {
    case Justification::Kind::Assume: out += "assume"; break;
    case Justification::Kind::Given: out += "given"; break;
    case Justification::Kind::Axiom: {
      out += "axiom:" + j.name;
      if (!j.subst.empty()) {
        out += " {";
        bool first = true;
        for (const auto& [k, v] : j.subst) {
          out += (first ? "" : ", ") + k + "=" + render(v);
          first = false;
        }
        out += "}";
      }
      break;
    }
    case Justification::Kind::Rule: out += "rule:" + j.name + premises(); break;
    case Justification::Kind::Macro: out += "macro:" + j.name + premises(); break;
  }
  return out;
}

inline std::string print_script(const Derivation& d) {
  std::string out;
  for (const auto& l : d.lines) out += print_line(l) + "\n";
  return out;
}

}  // namespace lei
