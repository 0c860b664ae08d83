#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "rk/formula.hpp"

namespace rk {

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at position " + std::to_string(pos)),
        position(pos) {}
};

// Recursive-descent parser for the ASCII grammar:
//
//   formula := imp ("<->" formula)?
//   imp     := or ("->" imp)?
//   or      := and ("|" and)*
//   and     := prefix ("&" prefix)*
//   prefix  := "~" prefix | "forall" var prefix | "exists" var prefix | atom
//   atom    := "K" "(" formula ")" | "(" formula ")" | term "=" term
//   term    := prodt ("+" prodt)*      (left-assoc)
//   prodt   := tatom ("*" tatom)*      (left-assoc)
//   tatom   := "0" | decimal | "S" "(" term ")" | var | "(" term ")"
//   var     := [a-z][a-z0-9_]*
//
// Prefix operators bind tighter than the binary connectives, so
// "forall x x=0 & y=0" reads as (forall x x=0) & (y=0).
// With allow_reserved, variables may also be slot names "$k" and canonical
// bound names "#k" (used by pattern-table and proof serialization).
class Parser {
 public:
  Parser(std::string text, bool allow_reserved = false)
      : text_(std::move(text)), allow_reserved_(allow_reserved) {}

  FormulaPtr parse_formula_all() {
    auto f = parse_formula();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

  TermPtr parse_term_all() {
    auto t = parse_term();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  bool allow_reserved_;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(const std::string& s) {
    skip_ws();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool peek_word(const std::string& w) {
    skip_ws();
    if (text_.compare(pos_, w.size(), w) != 0) return false;
    std::size_t after = pos_ + w.size();
    if (after < text_.size()) {
      char c = text_[after];
      if (std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')
        return false;
    }
    return true;
  }

  std::string parse_var() {
    skip_ws();
    std::size_t start = pos_;
    if (allow_reserved_ && pos_ < text_.size() &&
        (text_[pos_] == '$' || text_[pos_] == '#')) {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start + 1) fail("reserved variable needs digits");
      return text_.substr(start, pos_ - start);
    }
    if (pos_ >= text_.size() || !std::islower(static_cast<unsigned char>(text_[pos_])))
      fail("expected variable");
    ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')
        ++pos_;
      else
        break;
    }
    std::string name = text_.substr(start, pos_ - start);
    if (name == "forall" || name == "exists") fail("keyword used as variable");
    return name;
  }

  FormulaPtr parse_formula() {
    auto lhs = parse_imp();
    if (eat("<->")) return Formula::iff(lhs, parse_formula());
    return lhs;
  }

  FormulaPtr parse_imp() {
    auto lhs = parse_or();
    skip_ws();
    // careful: "->" but not "<->" (already handled above by ordering)
    if (text_.compare(pos_, 2, "->") == 0) {
      pos_ += 2;
      return Formula::imp(lhs, parse_imp());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    auto lhs = parse_and();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        lhs = Formula::disj(lhs, parse_and());
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr parse_and() {
    auto lhs = parse_prefix();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '&') {
        ++pos_;
        lhs = Formula::conj(lhs, parse_prefix());
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr parse_prefix() {
    skip_ws();
    if (eat("~")) return Formula::neg(parse_prefix());
    if (peek_word("forall")) {
      pos_ += 6;
      auto v = parse_var();
      return Formula::all(v, parse_prefix());
    }
    if (peek_word("exists")) {
      pos_ += 6;
      auto v = parse_var();
      return Formula::ex(v, parse_prefix());
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == 'K') {
      std::size_t save = pos_;
      ++pos_;
      if (eat("(")) {
        auto f = parse_formula();
        if (!eat(")")) fail("expected ')'");
        return Formula::know(f);
      }
      pos_ = save;
      fail("unknown symbol 'K' (knowledge operator needs parentheses)");
    }
    if (pos_ < text_.size() && text_[pos_] == '(') {
      // Could be a parenthesized formula or a parenthesized term of an
      // equality; try formula first, fall back to term.
      std::size_t save = pos_;
      try {
        ++pos_;
        auto f = parse_formula();
        if (!eat(")")) fail("expected ')'");
        return f;
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    auto lhs = parse_term();
    if (!eat("=")) fail("expected '='");
    auto rhs = parse_term();
    return Formula::eq(lhs, rhs);
  }

  TermPtr parse_term() {
    auto lhs = parse_prodt();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '+') {
        ++pos_;
        lhs = Term::sum(lhs, parse_prodt());
      } else {
        return lhs;
      }
    }
  }

  TermPtr parse_prodt() {
    auto lhs = parse_tatom();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        lhs = Term::prod(lhs, parse_tatom());
      } else {
        return lhs;
      }
    }
  }

  TermPtr parse_tatom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Term::num(nat_from_string(text_.substr(start, pos_ - start)));
    }
    if (c == 'S') {
      ++pos_;
      if (!eat("(")) fail("expected '(' after S");
      auto t = parse_term();
      if (!eat(")")) fail("expected ')'");
      return Term::succ(t);
    }
    if (c == '(') {
      ++pos_;
      auto t = parse_term();
      if (!eat(")")) fail("expected ')'");
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c)) ||
        (allow_reserved_ && (c == '$' || c == '#'))) {
      return Term::var(parse_var());
    }
    fail(std::string("unknown symbol '") + c + "'");
  }
};

inline FormulaPtr parse(const std::string& text, bool allow_reserved = false) {
  return Parser(text, allow_reserved).parse_formula_all();
}

inline TermPtr parse_term(const std::string& text, bool allow_reserved = false) {
  return Parser(text, allow_reserved).parse_term_all();
}

}  // namespace rk
