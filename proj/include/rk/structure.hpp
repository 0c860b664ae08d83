#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rk/coding.hpp"
#include "rk/pattern.hpp"
#include "rk/syntax.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Three-valued verdicts for budgeted evaluation. Unknown only ever weakens
// a verdict; raising a bound never flips True to False or back.
// ---------------------------------------------------------------------------
enum class ThreeValued { False, Unknown, True };

inline ThreeValued tv_not(ThreeValued v) {
  switch (v) {
    case ThreeValued::True: return ThreeValued::False;
    case ThreeValued::False: return ThreeValued::True;
    default: return ThreeValued::Unknown;
  }
}

inline ThreeValued tv_and(ThreeValued a, ThreeValued b) {
  if (a == ThreeValued::False || b == ThreeValued::False)
    return ThreeValued::False;
  if (a == ThreeValued::True && b == ThreeValued::True)
    return ThreeValued::True;
  return ThreeValued::Unknown;
}

inline ThreeValued tv_or(ThreeValued a, ThreeValued b) {
  return tv_not(tv_and(tv_not(a), tv_not(b)));
}

inline ThreeValued tv_imp(ThreeValued a, ThreeValued b) {
  return tv_or(tv_not(a), b);
}

inline ThreeValued tv_iff(ThreeValued a, ThreeValued b) {
  if (a == ThreeValued::Unknown || b == ThreeValued::Unknown)
    return ThreeValued::Unknown;
  return a == b ? ThreeValued::True : ThreeValued::False;
}

inline const char* tv_name(ThreeValued v) {
  switch (v) {
    case ThreeValued::True: return "true";
    case ThreeValued::False: return "false";
    default: return "unknown";
  }
}

// ---------------------------------------------------------------------------
// Structures of the base logic. The first-order part is fixed to the
// standard naturals; only the knowledge oracle varies. By construction the
// oracle is a function of the pattern atom and the evaluated argument tuple,
// which is exactly what the base-logic constraints permit.
// ---------------------------------------------------------------------------
class BaseStructure {
 public:
  using Oracle =
      std::function<ThreeValued(const PatternAtom&, const std::vector<Nat>&)>;

  BaseStructure(Oracle oracle, std::string description)
      : oracle_(std::move(oracle)), description_(std::move(description)) {}

  ThreeValued knows(const PatternAtom& atom, const std::vector<Nat>& args) const {
    return oracle_(atom, args);
  }

  const std::string& description() const { return description_; }

 private:
  Oracle oracle_;
  std::string description_;
};

// Pseudo-random total oracle: a fixed mixing of (seed, pattern skeleton,
// argument values). Same seed, same verdicts, on any platform.
inline BaseStructure random_pattern_structure(std::uint64_t seed) {
  auto oracle = [seed](const PatternAtom& atom,
                       const std::vector<Nat>& args) -> ThreeValued {
    std::uint64_t h = mix64(seed ^ 0x9d2c5680u);
    h = mix64(h ^ atom.skeleton->hash);
    for (const auto& a : args) h = mix64(h ^ hash_nat(a));
    return (h & 1) ? ThreeValued::True : ThreeValued::False;
  };
  return BaseStructure(oracle, "random-pattern-structure seed=" + std::to_string(seed));
}

// Same, but with pinned verdicts for chosen patterns (by skeleton), used to
// exhibit countermodels. Pinned patterns answer the pinned value for every
// argument tuple.
inline BaseStructure random_pattern_structure_with(
    std::uint64_t seed,
    std::vector<std::pair<PatternAtom, ThreeValued>> pinned) {
  auto base = random_pattern_structure(seed);
  auto oracle = [base, pinned = std::move(pinned)](
                    const PatternAtom& atom,
                    const std::vector<Nat>& args) -> ThreeValued {
    for (const auto& [p, v] : pinned)
      if (pattern_eq(p, atom)) return v;
    return base.knows(atom, args);
  };
  return BaseStructure(oracle, base.description() + "+pins");
}

// ---------------------------------------------------------------------------
// Bounded Tarskian evaluation over the standard naturals.
//
// Quantifiers search witnesses 0..bound: an existential is True on a found
// witness and otherwise Unknown; a universal is False on a found
// counterexample and otherwise Unknown. Definite verdicts are stable under
// raising the bound.
// ---------------------------------------------------------------------------

inline Nat eval_term(const TermPtr& t, const Assignment& s) {
  switch (t->kind) {
    case Term::Kind::Var: return s.get(t->name);
    case Term::Kind::Num: return t->value;
    case Term::Kind::Succ: return eval_term(t->a, s) + 1;
    case Term::Kind::Sum: return eval_term(t->a, s) + eval_term(t->b, s);
    case Term::Kind::Prod: return eval_term(t->a, s) * eval_term(t->b, s);
  }
  throw PreconditionError("eval_term: bad kind");
}

inline ThreeValued eval(const BaseStructure& m, const FormulaPtr& f,
                        const Assignment& s, const Nat& bound) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return eval_term(f->t1, s) == eval_term(f->t2, s) ? ThreeValued::True
                                                        : ThreeValued::False;
    case Formula::Kind::Not: return tv_not(eval(m, f->f1, s, bound));
    case Formula::Kind::Imp: {
      auto a = eval(m, f->f1, s, bound);
      if (a == ThreeValued::False) return ThreeValued::True;
      return tv_imp(a, eval(m, f->f2, s, bound));
    }
    case Formula::Kind::And: {
      auto a = eval(m, f->f1, s, bound);
      if (a == ThreeValued::False) return ThreeValued::False;
      return tv_and(a, eval(m, f->f2, s, bound));
    }
    case Formula::Kind::Or: {
      auto a = eval(m, f->f1, s, bound);
      if (a == ThreeValued::True) return ThreeValued::True;
      return tv_or(a, eval(m, f->f2, s, bound));
    }
    case Formula::Kind::Iff:
      return tv_iff(eval(m, f->f1, s, bound), eval(m, f->f2, s, bound));
    case Formula::Kind::Know: {
      auto [atom, argvars] = pattern(f);
      std::vector<Nat> args;
      args.reserve(argvars.size());
      for (const auto& v : argvars) args.push_back(s.get(v));
      return m.knows(atom, args);
    }
    case Formula::Kind::Ex: {
      for (Nat u = 0; u <= bound; ++u)
        if (eval(m, f->f1, s.with(f->var, u), bound) == ThreeValued::True)
          return ThreeValued::True;
      return ThreeValued::Unknown;
    }
    case Formula::Kind::All: {
      for (Nat u = 0; u <= bound; ++u)
        if (eval(m, f->f1, s.with(f->var, u), bound) == ThreeValued::False)
          return ThreeValued::False;
      return ThreeValued::Unknown;
    }
  }
  return ThreeValued::Unknown;
}

}  // namespace rk
