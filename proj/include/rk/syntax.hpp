#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rk/formula.hpp"

namespace rk {

struct CaptureError : std::runtime_error {
  std::string binder;
  CaptureError(const std::string& var, const std::string& binder_var)
      : std::runtime_error("substitution would capture '" + var +
                           "' under binder '" + binder_var + "'"),
        binder(binder_var) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Assignment: finite map from variables to naturals with a default value.
// Only the values on FV(phi) ever matter.
// ---------------------------------------------------------------------------
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::map<std::string, Nat> bindings, Nat def = 0)
      : bindings_(std::move(bindings)), default_(std::move(def)) {}

  const Nat& get(const std::string& var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? default_ : it->second;
  }

  // s(x|u): agree with s except x goes to u.
  Assignment with(const std::string& var, const Nat& value) const {
    Assignment s = *this;
    s.bindings_[var] = value;
    return s;
  }

  const std::map<std::string, Nat>& bindings() const { return bindings_; }
  const Nat& default_value() const { return default_; }

 private:
  std::map<std::string, Nat> bindings_;
  Nat default_ = 0;
};

// ---------------------------------------------------------------------------
// Substitution of a term for a variable, with capture detection.
// ---------------------------------------------------------------------------

inline bool term_has_var(const TermPtr& t, const std::string& v) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == v;
    case Term::Kind::Num: return false;
    case Term::Kind::Succ: return term_has_var(t->a, v);
    case Term::Kind::Sum:
    case Term::Kind::Prod:
      return term_has_var(t->a, v) || term_has_var(t->b, v);
  }
  return false;
}

inline TermPtr subst_term(const TermPtr& t, const std::string& x,
                          const TermPtr& repl) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == x ? repl : t;
    case Term::Kind::Num: return t;
    case Term::Kind::Succ: return Term::succ(subst_term(t->a, x, repl));
    case Term::Kind::Sum:
      return Term::sum(subst_term(t->a, x, repl), subst_term(t->b, x, repl));
    case Term::Kind::Prod:
      return Term::prod(subst_term(t->a, x, repl), subst_term(t->b, x, repl));
  }
  return t;
}

namespace detail {

inline FormulaPtr subst_rec(const FormulaPtr& f, const std::string& x,
                            const TermPtr& t,
                            const std::vector<std::string>& term_vars_list) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(subst_term(f->t1, x, t), subst_term(f->t2, x, t));
    case Formula::Kind::Not:
      return Formula::neg(subst_rec(f->f1, x, t, term_vars_list));
    case Formula::Kind::Know:
      return Formula::know(subst_rec(f->f1, x, t, term_vars_list));
    case Formula::Kind::Imp:
      return Formula::imp(subst_rec(f->f1, x, t, term_vars_list),
                          subst_rec(f->f2, x, t, term_vars_list));
    case Formula::Kind::And:
      return Formula::conj(subst_rec(f->f1, x, t, term_vars_list),
                           subst_rec(f->f2, x, t, term_vars_list));
    case Formula::Kind::Or:
      return Formula::disj(subst_rec(f->f1, x, t, term_vars_list),
                           subst_rec(f->f2, x, t, term_vars_list));
    case Formula::Kind::Iff:
      return Formula::iff(subst_rec(f->f1, x, t, term_vars_list),
                          subst_rec(f->f2, x, t, term_vars_list));
    case Formula::Kind::All:
    case Formula::Kind::Ex: {
      if (f->var == x) return f;  // x is bound here, nothing to do below
      // x free below this binder and the binder captures a variable of t?
      auto fv = free_vars(f->f1);
      bool x_free_below =
          std::find(fv.begin(), fv.end(), x) != fv.end();
      if (x_free_below) {
        for (const auto& tv : term_vars_list)
          if (tv == f->var) throw CaptureError(tv, f->var);
      }
      auto body = subst_rec(f->f1, x, t, term_vars_list);
      return f->kind == Formula::Kind::All ? Formula::all(f->var, body)
                                           : Formula::ex(f->var, body);
    }
  }
  return f;
}

}  // namespace detail

// phi(x|t): replace free occurrences of x by t. Throws CaptureError when t is
// not substitutable for x in phi.
inline FormulaPtr subst(const FormulaPtr& f, const std::string& x,
                        const TermPtr& t) {
  std::vector<std::string> tvs;
  term_vars(t, tvs);
  return detail::subst_rec(f, x, t, tvs);
}

inline bool substitutable(const FormulaPtr& f, const std::string& x,
                          const TermPtr& t) {
  try {
    subst(f, x, t);
    return true;
  } catch (const CaptureError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Grounding phi^s: replace every free variable by the numeral it is assigned.
// Numerals are closed, so no capture can occur.
// ---------------------------------------------------------------------------

namespace detail {

inline TermPtr ground_term(const TermPtr& t, const Assignment& s,
                           const std::vector<std::string>& bound) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t->name) != bound.end())
        return t;
      return Term::num(s.get(t->name));
    case Term::Kind::Num: return t;
    case Term::Kind::Succ: return Term::succ(ground_term(t->a, s, bound));
    case Term::Kind::Sum:
      return Term::sum(ground_term(t->a, s, bound),
                       ground_term(t->b, s, bound));
    case Term::Kind::Prod:
      return Term::prod(ground_term(t->a, s, bound),
                        ground_term(t->b, s, bound));
  }
  return t;
}

inline FormulaPtr ground_rec(const FormulaPtr& f, const Assignment& s,
                             std::vector<std::string>& bound) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(ground_term(f->t1, s, bound),
                         ground_term(f->t2, s, bound));
    case Formula::Kind::Not:
      return Formula::neg(ground_rec(f->f1, s, bound));
    case Formula::Kind::Know:
      return Formula::know(ground_rec(f->f1, s, bound));
    case Formula::Kind::Imp:
      return Formula::imp(ground_rec(f->f1, s, bound),
                          ground_rec(f->f2, s, bound));
    case Formula::Kind::And:
      return Formula::conj(ground_rec(f->f1, s, bound),
                           ground_rec(f->f2, s, bound));
    case Formula::Kind::Or:
      return Formula::disj(ground_rec(f->f1, s, bound),
                           ground_rec(f->f2, s, bound));
    case Formula::Kind::Iff:
      return Formula::iff(ground_rec(f->f1, s, bound),
                          ground_rec(f->f2, s, bound));
    case Formula::Kind::All:
    case Formula::Kind::Ex: {
      bound.push_back(f->var);
      auto body = ground_rec(f->f1, s, bound);
      bound.pop_back();
      return f->kind == Formula::Kind::All ? Formula::all(f->var, body)
                                           : Formula::ex(f->var, body);
    }
  }
  return f;
}

}  // namespace detail

inline FormulaPtr ground(const FormulaPtr& f, const Assignment& s) {
  std::vector<std::string> bound;
  return detail::ground_rec(f, s, bound);
}

// ---------------------------------------------------------------------------
// Alphabetic variants: equal up to renaming of bound variables.
// ---------------------------------------------------------------------------

namespace detail {

// Correspondence between bound variables on the two sides; free variables
// must match by name. A variable pair matches when both names resolve to the
// same binder pair (innermost wins), or both are free and equal.
inline int innermost_left(
    const std::vector<std::pair<std::string, std::string>>& env,
    const std::string& l) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[static_cast<std::size_t>(i)].first == l) return i;
  return -1;
}

inline int innermost_right(
    const std::vector<std::pair<std::string, std::string>>& env,
    const std::string& r) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[static_cast<std::size_t>(i)].second == r) return i;
  return -1;
}

inline bool variant_term(
    const TermPtr& s, const TermPtr& t,
    const std::vector<std::pair<std::string, std::string>>& env) {
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case Term::Kind::Var: {
      int li = innermost_left(env, s->name);
      int ri = innermost_right(env, t->name);
      if (li != ri) return false;
      return li >= 0 || s->name == t->name;
    }
    case Term::Kind::Num: return s->value == t->value;
    case Term::Kind::Succ: return variant_term(s->a, t->a, env);
    case Term::Kind::Sum:
    case Term::Kind::Prod:
      return variant_term(s->a, t->a, env) && variant_term(s->b, t->b, env);
  }
  return false;
}

inline bool variant_rec(
    const FormulaPtr& f, const FormulaPtr& g,
    std::vector<std::pair<std::string, std::string>>& env) {
  if (f->kind != g->kind) return false;
  switch (f->kind) {
    case Formula::Kind::Eq:
      return variant_term(f->t1, g->t1, env) && variant_term(f->t2, g->t2, env);
    case Formula::Kind::Not:
    case Formula::Kind::Know:
      return variant_rec(f->f1, g->f1, env);
    case Formula::Kind::Imp:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Iff:
      return variant_rec(f->f1, g->f1, env) && variant_rec(f->f2, g->f2, env);
    case Formula::Kind::All:
    case Formula::Kind::Ex: {
      env.emplace_back(f->var, g->var);
      bool ok = variant_rec(f->f1, g->f1, env);
      env.pop_back();
      return ok;
    }
  }
  return false;
}

}  // namespace detail

inline bool variant_eq(const FormulaPtr& f, const FormulaPtr& g) {
  std::vector<std::pair<std::string, std::string>> env;
  return detail::variant_rec(f, g, env);
}

// ---------------------------------------------------------------------------
// Universal closure, binding free variables in first-occurrence order.
// ---------------------------------------------------------------------------
inline FormulaPtr universal_closure(const FormulaPtr& f) {
  auto fvs = free_vars(f);
  FormulaPtr out = f;
  for (auto it = fvs.rbegin(); it != fvs.rend(); ++it)
    out = Formula::all(*it, out);
  return out;
}

}  // namespace rk
