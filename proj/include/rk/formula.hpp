#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rk/nat.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Terms of the language: variables, numeral literals, S, + and *.
//
// Numerals are stored as a single node carrying the value; succ() normalizes
// S applied to a numeral, so S(S(0)) and the numeral 2 are the same tree.
// This keeps sentences that embed machine indices (thousands of digits) small.
// ---------------------------------------------------------------------------

class Term;
using TermPtr = std::shared_ptr<const Term>;

class Term {
 public:
  enum class Kind { Var, Num, Succ, Sum, Prod };

  Kind kind;
  std::string name;  // Var
  Nat value;         // Num
  TermPtr a, b;      // children

  std::uint64_t hash = 0;

  static TermPtr var(const std::string& name) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Var;
    t->name = name;
    t->hash = mix64(0x11 ^ hash_nat(encode_ident(name)));
    return t;
  }

  static TermPtr num(const Nat& v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Num;
    t->value = v;
    t->hash = mix64(0x22 ^ hash_nat(v));
    return t;
  }

  static TermPtr zero() { return num(0); }

  static TermPtr succ(const TermPtr& x) {
    if (x->kind == Kind::Num) return num(x->value + 1);
    auto t = std::make_shared<Term>();
    t->kind = Kind::Succ;
    t->a = x;
    t->hash = mix64(0x33 ^ x->hash);
    return t;
  }

  static TermPtr sum(const TermPtr& x, const TermPtr& y) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Sum;
    t->a = x;
    t->b = y;
    t->hash = mix64(0x44 ^ x->hash ^ mix64(y->hash));
    return t;
  }

  static TermPtr prod(const TermPtr& x, const TermPtr& y) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Prod;
    t->a = x;
    t->b = y;
    t->hash = mix64(0x55 ^ x->hash ^ mix64(y->hash));
    return t;
  }
};

inline bool term_eq(const TermPtr& s, const TermPtr& t) {
  if (s.get() == t.get()) return true;
  if (s->hash != t->hash || s->kind != t->kind) return false;
  switch (s->kind) {
    case Term::Kind::Var: return s->name == t->name;
    case Term::Kind::Num: return s->value == t->value;
    case Term::Kind::Succ: return term_eq(s->a, t->a);
    case Term::Kind::Sum:
    case Term::Kind::Prod: return term_eq(s->a, t->a) && term_eq(s->b, t->b);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formulas. knowledge(f) is the modal operator K; it binds nothing.
// ---------------------------------------------------------------------------

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind { Eq, Not, Imp, And, Or, Iff, All, Ex, Know };

  Kind kind;
  TermPtr t1, t2;     // Eq
  std::string var;    // All, Ex
  FormulaPtr f1, f2;  // children

  std::uint64_t hash = 0;

  static FormulaPtr eq(const TermPtr& a, const TermPtr& b) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Eq;
    f->t1 = a;
    f->t2 = b;
    f->hash = mix64(0x101 ^ a->hash ^ mix64(b->hash));
    return f;
  }

  static FormulaPtr neg(const FormulaPtr& g) {
    return unary(Kind::Not, 0x202, g);
  }

  static FormulaPtr imp(const FormulaPtr& a, const FormulaPtr& b) {
    return binary(Kind::Imp, 0x303, a, b);
  }
  static FormulaPtr conj(const FormulaPtr& a, const FormulaPtr& b) {
    return binary(Kind::And, 0x404, a, b);
  }
  static FormulaPtr disj(const FormulaPtr& a, const FormulaPtr& b) {
    return binary(Kind::Or, 0x505, a, b);
  }
  static FormulaPtr iff(const FormulaPtr& a, const FormulaPtr& b) {
    return binary(Kind::Iff, 0x606, a, b);
  }

  static FormulaPtr all(const std::string& v, const FormulaPtr& g) {
    return quant(Kind::All, 0x707, v, g);
  }
  static FormulaPtr ex(const std::string& v, const FormulaPtr& g) {
    return quant(Kind::Ex, 0x808, v, g);
  }

  static FormulaPtr know(const FormulaPtr& g) {
    return unary(Kind::Know, 0x909, g);
  }

 private:
  static FormulaPtr unary(Kind k, std::uint64_t tag, const FormulaPtr& g) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->f1 = g;
    f->hash = mix64(tag ^ g->hash);
    return f;
  }
  static FormulaPtr binary(Kind k, std::uint64_t tag, const FormulaPtr& a,
                           const FormulaPtr& b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->f1 = a;
    f->f2 = b;
    f->hash = mix64(tag ^ a->hash ^ mix64(b->hash));
    return f;
  }
  static FormulaPtr quant(Kind k, std::uint64_t tag, const std::string& v,
                          const FormulaPtr& g) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = v;
    f->f1 = g;
    f->hash = mix64(tag ^ hash_nat(encode_ident(v)) ^ mix64(g->hash));
    return f;
  }
};

inline bool formula_eq(const FormulaPtr& f, const FormulaPtr& g) {
  if (f.get() == g.get()) return true;
  if (f->hash != g->hash || f->kind != g->kind) return false;
  switch (f->kind) {
    case Formula::Kind::Eq:
      return term_eq(f->t1, g->t1) && term_eq(f->t2, g->t2);
    case Formula::Kind::Not:
    case Formula::Kind::Know:
      return formula_eq(f->f1, g->f1);
    case Formula::Kind::Imp:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Iff:
      return formula_eq(f->f1, g->f1) && formula_eq(f->f2, g->f2);
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      return f->var == g->var && formula_eq(f->f1, g->f1);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Free variables and printing.
// ---------------------------------------------------------------------------

inline void term_vars(const TermPtr& t, std::vector<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var: out.push_back(t->name); break;
    case Term::Kind::Num: break;
    case Term::Kind::Succ: term_vars(t->a, out); break;
    case Term::Kind::Sum:
    case Term::Kind::Prod:
      term_vars(t->a, out);
      term_vars(t->b, out);
      break;
  }
}

// Free variables in first-occurrence order (left to right).
inline void free_vars_ordered(const FormulaPtr& f,
                              std::vector<std::string>& bound,
                              std::vector<std::string>& out) {
  auto emit = [&](const std::string& v) {
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (f->kind) {
    case Formula::Kind::Eq: {
      std::vector<std::string> vs;
      term_vars(f->t1, vs);
      term_vars(f->t2, vs);
      for (auto& v : vs) emit(v);
      break;
    }
    case Formula::Kind::Not:
    case Formula::Kind::Know:
      free_vars_ordered(f->f1, bound, out);
      break;
    case Formula::Kind::Imp:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Iff:
      free_vars_ordered(f->f1, bound, out);
      free_vars_ordered(f->f2, bound, out);
      break;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      bound.push_back(f->var);
      free_vars_ordered(f->f1, bound, out);
      bound.pop_back();
      break;
  }
}

inline std::vector<std::string> free_vars(const FormulaPtr& f) {
  std::vector<std::string> bound, out;
  free_vars_ordered(f, bound, out);
  return out;
}

inline bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

// Canonical printing. Small numerals print as S-chains, larger ones as
// decimal literals; both reparse to the same numeral node.
constexpr std::uint64_t kNumeralChainLimit = 8;

inline void print_term(std::ostream& os, const TermPtr& t, int parent_prec) {
  // precedence: atoms 3, * is 2, + is 1
  switch (t->kind) {
    case Term::Kind::Var: os << t->name; break;
    case Term::Kind::Num: {
      if (t->value <= kNumeralChainLimit) {
        auto k = static_cast<std::uint64_t>(t->value);
        for (std::uint64_t i = 0; i < k; ++i) os << "S(";
        os << "0";
        for (std::uint64_t i = 0; i < k; ++i) os << ")";
      } else {
        os << nat_to_string(t->value);
      }
      break;
    }
    case Term::Kind::Succ:
      os << "S(";
      print_term(os, t->a, 0);
      os << ")";
      break;
    case Term::Kind::Sum: {
      if (parent_prec > 1) os << "(";
      print_term(os, t->a, 1);
      os << "+";
      print_term(os, t->b, 2);
      if (parent_prec > 1) os << ")";
      break;
    }
    case Term::Kind::Prod: {
      if (parent_prec > 2) os << "(";
      print_term(os, t->a, 2);
      os << "*";
      print_term(os, t->b, 3);
      if (parent_prec > 2) os << ")";
      break;
    }
  }
}

// Formula precedence: <-> 1, -> 2, | 3, & 4, prefix 5 (right-assoc chains).
inline void print_formula(std::ostream& os, const FormulaPtr& f,
                          int parent_prec) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      print_term(os, f->t1, 0);
      os << "=";
      print_term(os, f->t2, 0);
      break;
    case Formula::Kind::Not:
      if (parent_prec > 5) os << "(";
      os << "~";
      print_formula(os, f->f1, 5);
      if (parent_prec > 5) os << ")";
      break;
    case Formula::Kind::Know:
      os << "K(";
      print_formula(os, f->f1, 0);
      os << ")";
      break;
    case Formula::Kind::Imp:
      if (parent_prec > 2) os << "(";
      print_formula(os, f->f1, 3);
      os << " -> ";
      print_formula(os, f->f2, 2);
      if (parent_prec > 2) os << ")";
      break;
    case Formula::Kind::And:
      if (parent_prec > 4) os << "(";
      print_formula(os, f->f1, 4);
      os << " & ";
      print_formula(os, f->f2, 5);
      if (parent_prec > 4) os << ")";
      break;
    case Formula::Kind::Or:
      if (parent_prec > 3) os << "(";
      print_formula(os, f->f1, 3);
      os << " | ";
      print_formula(os, f->f2, 4);
      if (parent_prec > 3) os << ")";
      break;
    case Formula::Kind::Iff:
      if (parent_prec > 1) os << "(";
      print_formula(os, f->f1, 2);
      os << " <-> ";
      print_formula(os, f->f2, 1);
      if (parent_prec > 1) os << ")";
      break;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      if (parent_prec > 5) os << "(";
      os << (f->kind == Formula::Kind::All ? "forall " : "exists ");
      os << f->var << " ";
      print_formula(os, f->f1, 5);
      if (parent_prec > 5) os << ")";
      break;
  }
}

inline std::string print(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

inline std::string print(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

}  // namespace rk
