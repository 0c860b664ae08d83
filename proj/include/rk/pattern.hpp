#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rk/syntax.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Pattern atoms.
//
// A purely modal formula K(phi) is canonicalized into a skeleton in which
// the i-th free-variable occurrence (left to right) becomes the slot
// variable "$i" and bound variables get canonical names "#j" by binder
// preorder. Two purely modal formulas share a skeleton exactly when they are
// related by alphabetic variance plus variable-for-variable substitution,
// which is the identification the base logic imposes. Slot and canonical
// names are rejected by the user-facing grammar, so slots can never be
// captured inside a skeleton.
// ---------------------------------------------------------------------------

struct PatternAtom {
  FormulaPtr skeleton;
  std::size_t arity = 0;

  std::uint64_t key() const { return skeleton->hash; }
};

inline bool pattern_eq(const PatternAtom& a, const PatternAtom& b) {
  return a.arity == b.arity && formula_eq(a.skeleton, b.skeleton);
}

namespace detail {

struct PatternBuilder {
  std::vector<std::pair<std::string, std::string>> binders;  // orig -> canon
  std::size_t binder_count = 0;
  std::vector<std::string> args;

  std::string canon_of(const std::string& v) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == v) return it->second;
    return {};
  }

  TermPtr walk_term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var: {
        auto c = canon_of(t->name);
        if (!c.empty()) return Term::var(c);
        args.push_back(t->name);
        return Term::var("$" + std::to_string(args.size()));
      }
      case Term::Kind::Num: return t;
      case Term::Kind::Succ: return Term::succ(walk_term(t->a));
      case Term::Kind::Sum: {
        auto a = walk_term(t->a);
        auto b = walk_term(t->b);
        return Term::sum(a, b);
      }
      case Term::Kind::Prod: {
        auto a = walk_term(t->a);
        auto b = walk_term(t->b);
        return Term::prod(a, b);
      }
    }
    return t;
  }

  FormulaPtr walk(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Eq: {
        auto a = walk_term(f->t1);
        auto b = walk_term(f->t2);
        return Formula::eq(a, b);
      }
      case Formula::Kind::Not: return Formula::neg(walk(f->f1));
      case Formula::Kind::Know: return Formula::know(walk(f->f1));
      case Formula::Kind::Imp: {
        auto a = walk(f->f1);
        auto b = walk(f->f2);
        return Formula::imp(a, b);
      }
      case Formula::Kind::And: {
        auto a = walk(f->f1);
        auto b = walk(f->f2);
        return Formula::conj(a, b);
      }
      case Formula::Kind::Or: {
        auto a = walk(f->f1);
        auto b = walk(f->f2);
        return Formula::disj(a, b);
      }
      case Formula::Kind::Iff: {
        auto a = walk(f->f1);
        auto b = walk(f->f2);
        return Formula::iff(a, b);
      }
      case Formula::Kind::All:
      case Formula::Kind::Ex: {
        std::string canon = "#" + std::to_string(++binder_count);
        binders.emplace_back(f->var, canon);
        auto body = walk(f->f1);
        binders.pop_back();
        return f->kind == Formula::Kind::All ? Formula::all(canon, body)
                                             : Formula::ex(canon, body);
      }
    }
    return f;
  }
};

}  // namespace detail

// Canonicalize a purely modal formula. Returns the pattern atom plus the
// argument variables, one per free occurrence in left-to-right order.
inline std::pair<PatternAtom, std::vector<std::string>> pattern(
    const FormulaPtr& kappa) {
  if (kappa->kind != Formula::Kind::Know)
    throw PreconditionError("pattern: formula is not purely modal");
  detail::PatternBuilder pb;
  auto skel = pb.walk(kappa);
  PatternAtom atom{skel, pb.args.size()};
  return {atom, std::move(pb.args)};
}

// Interning table mapping pattern atoms to dense predicate ids, in order of
// first encounter. Used by the translation to first-order logic and by proof
// serialization.
class PatternTable {
 public:
  std::size_t intern(const PatternAtom& atom) {
    auto range = index_.equal_range(atom.key());
    for (auto it = range.first; it != range.second; ++it)
      if (pattern_eq(atoms_[it->second], atom)) return it->second;
    atoms_.push_back(atom);
    index_.emplace(atom.key(), atoms_.size() - 1);
    return atoms_.size() - 1;
  }

  const PatternAtom& at(std::size_t id) const { return atoms_.at(id); }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<PatternAtom> atoms_;
  std::unordered_multimap<std::uint64_t, std::size_t> index_;
};

}  // namespace rk
