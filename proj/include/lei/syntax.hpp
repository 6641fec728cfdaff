#pragma once

// ASCII concrete syntax:
//
//   formula := iff
//   iff     := imp ("<->" imp)*          left associative
//   imp     := or ("->" imp)?            right associative
//   or      := and ("|" and)*
//   and     := prefix ("&" prefix)*
//   prefix  := "~" prefix | "I" prefix | "[" formula "]" prefix | atom | "(" formula ")"
//   atom    := [a-z][a-z0-9_]*
//
// "|" and "<->" are expanded while parsing, so the AST never contains them.
// render() re-folds those shapes, which keeps parse(render(f)) == f.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"

namespace lei {

namespace detail {

enum class Tok { Not, And, Or, Imp, Iff, Ign, LBrack, RBrack, LParen, RParen, Atom, End };

inline const char* tok_text(Tok t) {
  switch (t) {
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Imp: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Ign: return "'I'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Atom: return "atom";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Formula parse_all() {
    Formula f = parse_iff();
    if (tok_ != Tok::End) fail({"'<->'", "'->'", "'|'", "'&'", "end of input"});
    return f;
  }

 private:
  Formula parse_iff() {
    Formula f = parse_imp();
    while (tok_ == Tok::Iff) {
      advance();
      f = iff(f, parse_imp());
    }
    return f;
  }

  Formula parse_imp() {
    Formula f = parse_or();
    if (tok_ == Tok::Imp) {
      advance();
      return imp(f, parse_imp());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (tok_ == Tok::Or) {
      advance();
      f = disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_prefix();
    while (tok_ == Tok::And) {
      advance();
      f = conj(f, parse_prefix());
    }
    return f;
  }

  Formula parse_prefix() {
    switch (tok_) {
      case Tok::Not: advance(); return neg(parse_prefix());
      case Tok::Ign: advance(); return ign(parse_prefix());
      case Tok::LBrack: {
        advance();
        Formula content = parse_iff();
        expect(Tok::RBrack);
        return ann(content, parse_prefix());
      }
      case Tok::Atom: {
        Formula f = atom(std::string(lexeme_));
        advance();
        return f;
      }
      case Tok::LParen: {
        advance();
        Formula f = parse_iff();
        expect(Tok::RParen);
        return f;
      }
      default: fail({"'~'", "'I'", "'['", "'('", "atom"});
    }
  }

  void expect(Tok t) {
    if (tok_ != t) fail({tok_text(t)});
    advance();
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = tok_ == Tok::End ? std::string("end of input") : "'" + std::string(lexeme_) + "'";
    throw ParseError(start_, std::move(expected), found);
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    start_ = pos_;
    if (pos_ >= text_.size()) {
      tok_ = Tok::End;
      lexeme_ = {};
      return;
    }
    const char c = text_[pos_];
    auto take = [&](Tok t, std::size_t n) {
      tok_ = t;
      lexeme_ = text_.substr(pos_, n);
      pos_ += n;
    };
    auto starts = [&](std::string_view s) { return text_.substr(pos_, s.size()) == s; };
    switch (c) {
      case '~': return take(Tok::Not, 1);
      case '&': return take(Tok::And, 1);
      case '|': return take(Tok::Or, 1);
      case 'I': return take(Tok::Ign, 1);
      case '[': return take(Tok::LBrack, 1);
      case ']': return take(Tok::RBrack, 1);
      case '(': return take(Tok::LParen, 1);
      case ')': return take(Tok::RParen, 1);
      default: break;
    }
    if (starts("->")) return take(Tok::Imp, 2);
    if (starts("<->")) return take(Tok::Iff, 3);
    if (c >= 'a' && c <= 'z') {
      std::size_t n = 1;
      while (pos_ + n < text_.size()) {
        const char d = text_[pos_ + n];
        if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_') ++n;
        else break;
      }
      return take(Tok::Atom, n);
    }
    lexeme_ = text_.substr(pos_, 1);
    tok_ = Tok::End;
    throw ParseError(start_, {"'~'", "'I'", "'['", "'('", "atom", "binary connective"},
                     "'" + std::string(lexeme_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
  Tok tok_ = Tok::End;
  std::string_view lexeme_;
};

// Binding strength of the printed form; higher binds tighter.
enum Level { kIff = 0, kImp = 1, kOr = 2, kAnd = 3, kPrefix = 4 };

inline void render_into(const Formula& f, int min_level, std::string& out) {
  Formula a, b;
  int level = kPrefix;
  if (as_iff(f, &a, &b)) level = kIff;
  else if (as_disj(f, &a, &b)) level = kOr;
  else if (f.is(Op::Imp)) level = kImp;
  else if (f.is(Op::And)) level = kAnd;

  const bool paren = level < min_level;
  if (paren) out += '(';
  switch (level) {
    case kIff:
      render_into(a, kIff, out);
      out += " <-> ";
      render_into(b, kImp, out);
      break;
    case kOr:
      render_into(a, kOr, out);
      out += " | ";
      render_into(b, kAnd, out);
      break;
    case kImp:
      render_into(f.lhs(), kOr, out);
      out += " -> ";
      render_into(f.rhs(), kImp, out);
      break;
    case kAnd:
      render_into(f.lhs(), kAnd, out);
      out += " & ";
      render_into(f.rhs(), kPrefix, out);
      break;
    default:
      switch (f.op()) {
        case Op::Atom: out += f.name(); break;
        case Op::Not:
          out += '~';
          render_into(f.operand(), kPrefix, out);
          break;
        case Op::Ign:
          out += "I ";
          render_into(f.operand(), kPrefix, out);
          break;
        case Op::Ann:
          out += '[';
          render_into(f.content(), kIff, out);
          out += "] ";
          render_into(f.body(), kPrefix, out);
          break;
        default: break;
      }
  }
  if (paren) out += ')';
}

}  // namespace detail

// Throws ParseError carrying the byte offset and the expected tokens.
inline Formula parse(std::string_view text) { return detail::Parser(text).parse_all(); }

inline std::string render(const Formula& f) {
  std::string out;
  detail::render_into(f, detail::kIff, out);
  return out;
}

// True for names usable as atoms in formulas and model files.
inline bool is_atom_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  return true;
}

}  // namespace lei
