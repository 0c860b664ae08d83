#pragma once

#include <cctype>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rk/pattern.hpp"
#include "rk/syntax.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// First-order formulas over the arithmetic signature plus one predicate
// symbol per pattern atom. This is the reduction target of the base logic:
// knowledge subformulas become pattern-predicate atoms and everything else
// is ordinary first-order logic with equality.
// ---------------------------------------------------------------------------

class FOTerm;
using FOTermPtr = std::shared_ptr<const FOTerm>;

class FOTerm {
 public:
  enum class Kind { Var, Num, Sko, Succ, Sum, Prod };

  Kind kind;
  std::string name;   // Var
  Nat value;          // Num
  std::size_t sko_id = 0;     // Sko: skolem constant id
  FOTermPtr a, b;

  std::uint64_t hash = 0;

  static FOTermPtr var(const std::string& n) {
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Var;
    t->name = n;
    t->hash = mix64(0x1001 ^ hash_nat(encode_ident(n)));
    return t;
  }
  static FOTermPtr num(const Nat& v) {
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Num;
    t->value = v;
    t->hash = mix64(0x1002 ^ hash_nat(v));
    return t;
  }
  static FOTermPtr sko(std::size_t id) {
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Sko;
    t->sko_id = id;
    t->hash = mix64(0x1003 ^ (id * 0x9e3779b97f4a7c15ULL));
    return t;
  }
  static FOTermPtr succ(const FOTermPtr& x) {
    if (x->kind == Kind::Num) return num(x->value + 1);
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Succ;
    t->a = x;
    t->hash = mix64(0x1004 ^ x->hash);
    return t;
  }
  static FOTermPtr sum(const FOTermPtr& x, const FOTermPtr& y) {
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Sum;
    t->a = x;
    t->b = y;
    t->hash = mix64(0x1005 ^ x->hash ^ mix64(y->hash));
    return t;
  }
  static FOTermPtr prod(const FOTermPtr& x, const FOTermPtr& y) {
    auto t = std::make_shared<FOTerm>();
    t->kind = Kind::Prod;
    t->a = x;
    t->b = y;
    t->hash = mix64(0x1006 ^ x->hash ^ mix64(y->hash));
    return t;
  }
};

inline bool foterm_eq(const FOTermPtr& s, const FOTermPtr& t) {
  if (s.get() == t.get()) return true;
  if (s->hash != t->hash || s->kind != t->kind) return false;
  switch (s->kind) {
    case FOTerm::Kind::Var: return s->name == t->name;
    case FOTerm::Kind::Num: return s->value == t->value;
    case FOTerm::Kind::Sko: return s->sko_id == t->sko_id;
    case FOTerm::Kind::Succ: return foterm_eq(s->a, t->a);
    case FOTerm::Kind::Sum:
    case FOTerm::Kind::Prod:
      return foterm_eq(s->a, t->a) && foterm_eq(s->b, t->b);
  }
  return false;
}

class FOF;
using FOFPtr = std::shared_ptr<const FOF>;

class FOF {
 public:
  enum class Kind { Eq, Atom, Not, Imp, And, Or, Iff, All, Ex };

  Kind kind;
  FOTermPtr t1, t2;            // Eq
  std::size_t pred = 0;        // Atom: pattern predicate id
  std::vector<FOTermPtr> args; // Atom
  std::string var;             // All, Ex
  FOFPtr f1, f2;

  std::uint64_t hash = 0;

  static FOFPtr eq(const FOTermPtr& a, const FOTermPtr& b) {
    auto f = std::make_shared<FOF>();
    f->kind = Kind::Eq;
    f->t1 = a;
    f->t2 = b;
    f->hash = mix64(0x2001 ^ a->hash ^ mix64(b->hash));
    return f;
  }
  static FOFPtr atom(std::size_t pred, std::vector<FOTermPtr> args) {
    auto f = std::make_shared<FOF>();
    f->kind = Kind::Atom;
    f->pred = pred;
    f->args = std::move(args);
    std::uint64_t h = mix64(0x2002 ^ (pred * 0x9e3779b97f4a7c15ULL));
    for (const auto& a : f->args) h = mix64(h ^ a->hash);
    f->hash = h;
    return f;
  }
  static FOFPtr neg(const FOFPtr& g) { return mk1(Kind::Not, 0x2003, g); }
  static FOFPtr imp(const FOFPtr& a, const FOFPtr& b) { return mk2(Kind::Imp, 0x2004, a, b); }
  static FOFPtr conj(const FOFPtr& a, const FOFPtr& b) { return mk2(Kind::And, 0x2005, a, b); }
  static FOFPtr disj(const FOFPtr& a, const FOFPtr& b) { return mk2(Kind::Or, 0x2006, a, b); }
  static FOFPtr iff(const FOFPtr& a, const FOFPtr& b) { return mk2(Kind::Iff, 0x2007, a, b); }
  static FOFPtr all(const std::string& v, const FOFPtr& g) { return mkq(Kind::All, 0x2008, v, g); }
  static FOFPtr ex(const std::string& v, const FOFPtr& g) { return mkq(Kind::Ex, 0x2009, v, g); }

 private:
  static FOFPtr mk1(Kind k, std::uint64_t tag, const FOFPtr& g) {
    auto f = std::make_shared<FOF>();
    f->kind = k;
    f->f1 = g;
    f->hash = mix64(tag ^ g->hash);
    return f;
  }
  static FOFPtr mk2(Kind k, std::uint64_t tag, const FOFPtr& a, const FOFPtr& b) {
    auto f = std::make_shared<FOF>();
    f->kind = k;
    f->f1 = a;
    f->f2 = b;
    f->hash = mix64(tag ^ a->hash ^ mix64(b->hash));
    return f;
  }
  static FOFPtr mkq(Kind k, std::uint64_t tag, const std::string& v, const FOFPtr& g) {
    auto f = std::make_shared<FOF>();
    f->kind = k;
    f->var = v;
    f->f1 = g;
    f->hash = mix64(tag ^ hash_nat(encode_ident(v)) ^ mix64(g->hash));
    return f;
  }
};

inline bool fof_eq(const FOFPtr& f, const FOFPtr& g) {
  if (f.get() == g.get()) return true;
  if (f->hash != g->hash || f->kind != g->kind) return false;
  switch (f->kind) {
    case FOF::Kind::Eq: return foterm_eq(f->t1, g->t1) && foterm_eq(f->t2, g->t2);
    case FOF::Kind::Atom: {
      if (f->pred != g->pred || f->args.size() != g->args.size()) return false;
      for (std::size_t i = 0; i < f->args.size(); ++i)
        if (!foterm_eq(f->args[i], g->args[i])) return false;
      return true;
    }
    case FOF::Kind::Not: return fof_eq(f->f1, g->f1);
    case FOF::Kind::Imp:
    case FOF::Kind::And:
    case FOF::Kind::Or:
    case FOF::Kind::Iff:
      return fof_eq(f->f1, g->f1) && fof_eq(f->f2, g->f2);
    case FOF::Kind::All:
    case FOF::Kind::Ex:
      return f->var == g->var && fof_eq(f->f1, g->f1);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution of a ground term for a variable (tableau instantiation).
// ---------------------------------------------------------------------------

inline FOTermPtr fo_subst_term(const FOTermPtr& t, const std::string& x,
                               const FOTermPtr& repl) {
  switch (t->kind) {
    case FOTerm::Kind::Var: return t->name == x ? repl : t;
    case FOTerm::Kind::Num:
    case FOTerm::Kind::Sko: return t;
    case FOTerm::Kind::Succ: return FOTerm::succ(fo_subst_term(t->a, x, repl));
    case FOTerm::Kind::Sum:
      return FOTerm::sum(fo_subst_term(t->a, x, repl), fo_subst_term(t->b, x, repl));
    case FOTerm::Kind::Prod:
      return FOTerm::prod(fo_subst_term(t->a, x, repl), fo_subst_term(t->b, x, repl));
  }
  return t;
}

// repl must be ground (numerals, skolem constants, arithmetic thereof).
inline FOFPtr fo_subst(const FOFPtr& f, const std::string& x,
                       const FOTermPtr& repl) {
  switch (f->kind) {
    case FOF::Kind::Eq:
      return FOF::eq(fo_subst_term(f->t1, x, repl), fo_subst_term(f->t2, x, repl));
    case FOF::Kind::Atom: {
      std::vector<FOTermPtr> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(fo_subst_term(a, x, repl));
      return FOF::atom(f->pred, std::move(args));
    }
    case FOF::Kind::Not: return FOF::neg(fo_subst(f->f1, x, repl));
    case FOF::Kind::Imp: return FOF::imp(fo_subst(f->f1, x, repl), fo_subst(f->f2, x, repl));
    case FOF::Kind::And: return FOF::conj(fo_subst(f->f1, x, repl), fo_subst(f->f2, x, repl));
    case FOF::Kind::Or: return FOF::disj(fo_subst(f->f1, x, repl), fo_subst(f->f2, x, repl));
    case FOF::Kind::Iff: return FOF::iff(fo_subst(f->f1, x, repl), fo_subst(f->f2, x, repl));
    case FOF::Kind::All:
      if (f->var == x) return f;
      return FOF::all(f->var, fo_subst(f->f1, x, repl));
    case FOF::Kind::Ex:
      if (f->var == x) return f;
      return FOF::ex(f->var, fo_subst(f->f1, x, repl));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Negation normal form. Implications and biconditionals are expanded, and
// negation is pushed onto atoms.
// ---------------------------------------------------------------------------

inline FOFPtr nnf(const FOFPtr& f, bool positive = true);

inline FOFPtr nnf(const FOFPtr& f, bool positive) {
  switch (f->kind) {
    case FOF::Kind::Eq:
    case FOF::Kind::Atom:
      return positive ? f : FOF::neg(f);
    case FOF::Kind::Not:
      return nnf(f->f1, !positive);
    case FOF::Kind::Imp:
      return positive ? FOF::disj(nnf(f->f1, false), nnf(f->f2, true))
                      : FOF::conj(nnf(f->f1, true), nnf(f->f2, false));
    case FOF::Kind::And:
      return positive ? FOF::conj(nnf(f->f1, true), nnf(f->f2, true))
                      : FOF::disj(nnf(f->f1, false), nnf(f->f2, false));
    case FOF::Kind::Or:
      return positive ? FOF::disj(nnf(f->f1, true), nnf(f->f2, true))
                      : FOF::conj(nnf(f->f1, false), nnf(f->f2, false));
    case FOF::Kind::Iff:
      return positive
                 ? FOF::disj(FOF::conj(nnf(f->f1, true), nnf(f->f2, true)),
                             FOF::conj(nnf(f->f1, false), nnf(f->f2, false)))
                 : FOF::disj(FOF::conj(nnf(f->f1, true), nnf(f->f2, false)),
                             FOF::conj(nnf(f->f1, false), nnf(f->f2, true)));
    case FOF::Kind::All:
      return positive ? FOF::all(f->var, nnf(f->f1, true))
                      : FOF::ex(f->var, nnf(f->f1, false));
    case FOF::Kind::Ex:
      return positive ? FOF::ex(f->var, nnf(f->f1, true))
                      : FOF::all(f->var, nnf(f->f1, false));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Translation from the modal language: knowledge subformulas become pattern
// predicate atoms over their argument variables; the table assigns ids in
// first-encounter order.
// ---------------------------------------------------------------------------

inline FOTermPtr translate_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return FOTerm::var(t->name);
    case Term::Kind::Num: return FOTerm::num(t->value);
    case Term::Kind::Succ: return FOTerm::succ(translate_term(t->a));
    case Term::Kind::Sum:
      return FOTerm::sum(translate_term(t->a), translate_term(t->b));
    case Term::Kind::Prod:
      return FOTerm::prod(translate_term(t->a), translate_term(t->b));
  }
  throw PreconditionError("translate_term: bad kind");
}

inline FOFPtr translate(const FormulaPtr& f, PatternTable& table) {
  // children are translated left to right so table ids are assigned in
  // first-encounter order regardless of compiler evaluation order
  switch (f->kind) {
    case Formula::Kind::Eq:
      return FOF::eq(translate_term(f->t1), translate_term(f->t2));
    case Formula::Kind::Know: {
      auto [atom, argvars] = pattern(f);
      std::size_t id = table.intern(atom);
      std::vector<FOTermPtr> args;
      args.reserve(argvars.size());
      for (const auto& v : argvars) args.push_back(FOTerm::var(v));
      return FOF::atom(id, std::move(args));
    }
    case Formula::Kind::Not: return FOF::neg(translate(f->f1, table));
    case Formula::Kind::Imp: {
      auto a = translate(f->f1, table);
      auto b = translate(f->f2, table);
      return FOF::imp(a, b);
    }
    case Formula::Kind::And: {
      auto a = translate(f->f1, table);
      auto b = translate(f->f2, table);
      return FOF::conj(a, b);
    }
    case Formula::Kind::Or: {
      auto a = translate(f->f1, table);
      auto b = translate(f->f2, table);
      return FOF::disj(a, b);
    }
    case Formula::Kind::Iff: {
      auto a = translate(f->f1, table);
      auto b = translate(f->f2, table);
      return FOF::iff(a, b);
    }
    case Formula::Kind::All:
      return FOF::all(f->var, translate(f->f1, table));
    case Formula::Kind::Ex:
      return FOF::ex(f->var, translate(f->f1, table));
  }
  throw PreconditionError("translate: bad kind");
}

// ---------------------------------------------------------------------------
// Printing (used by proof serialization). Skolem constants print as "@k" and
// pattern atoms as "Pi(args)".
// ---------------------------------------------------------------------------

inline void print_foterm(std::ostream& os, const FOTermPtr& t, int prec) {
  switch (t->kind) {
    case FOTerm::Kind::Var: os << t->name; break;
    case FOTerm::Kind::Num: os << nat_to_string(t->value); break;
    case FOTerm::Kind::Sko: os << "@" << t->sko_id; break;
    case FOTerm::Kind::Succ:
      os << "S(";
      print_foterm(os, t->a, 0);
      os << ")";
      break;
    case FOTerm::Kind::Sum:
      if (prec > 1) os << "(";
      print_foterm(os, t->a, 1);
      os << "+";
      print_foterm(os, t->b, 2);
      if (prec > 1) os << ")";
      break;
    case FOTerm::Kind::Prod:
      if (prec > 2) os << "(";
      print_foterm(os, t->a, 2);
      os << "*";
      print_foterm(os, t->b, 3);
      if (prec > 2) os << ")";
      break;
  }
}

inline void print_fof(std::ostream& os, const FOFPtr& f, int prec) {
  switch (f->kind) {
    case FOF::Kind::Eq:
      print_foterm(os, f->t1, 0);
      os << "=";
      print_foterm(os, f->t2, 0);
      break;
    case FOF::Kind::Atom:
      os << "P" << f->pred << "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) os << ",";
        print_foterm(os, f->args[i], 0);
      }
      os << ")";
      break;
    case FOF::Kind::Not:
      os << "~";
      print_fof(os, f->f1, 5);
      break;
    case FOF::Kind::Imp:
      if (prec > 2) os << "(";
      print_fof(os, f->f1, 3);
      os << " -> ";
      print_fof(os, f->f2, 2);
      if (prec > 2) os << ")";
      break;
    case FOF::Kind::And:
      if (prec > 4) os << "(";
      print_fof(os, f->f1, 4);
      os << " & ";
      print_fof(os, f->f2, 5);
      if (prec > 4) os << ")";
      break;
    case FOF::Kind::Or:
      if (prec > 3) os << "(";
      print_fof(os, f->f1, 3);
      os << " | ";
      print_fof(os, f->f2, 4);
      if (prec > 3) os << ")";
      break;
    case FOF::Kind::Iff:
      if (prec > 1) os << "(";
      print_fof(os, f->f1, 2);
      os << " <-> ";
      print_fof(os, f->f2, 1);
      if (prec > 1) os << ")";
      break;
    case FOF::Kind::All:
    case FOF::Kind::Ex:
      os << (f->kind == FOF::Kind::All ? "forall " : "exists ") << f->var << " ";
      print_fof(os, f->f1, 5);
      break;
  }
}

inline std::string print(const FOFPtr& f) {
  std::ostringstream os;
  print_fof(os, f, 0);
  return os.str();
}

inline std::string print(const FOTermPtr& t) {
  std::ostringstream os;
  print_foterm(os, t, 0);
  return os.str();
}

}  // namespace rk
