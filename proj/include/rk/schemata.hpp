#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "rk/axiomset.hpp"
#include "rk/membership.hpp"
#include "rk/parse.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Axiom families: the pre-closure knowledge schemata E1-E4, Peano arithmetic
// for the extended language, assigned validity, the knowledge-closure
// combinations, Reinhardt's schema, and the self-referential family
// Sigma(n).
//
// Universal closures bind free variables in first-occurrence order and the
// recognizers are exact against that canonical form. E1 and assigned
// validity are themselves only r.e. (their cores must be proved valid), so
// their generators dovetail with the validity search and their recognizers
// are budgeted: True or Unknown, never a false True.
// ---------------------------------------------------------------------------

enum class SchemaKind {
  E1,
  E2,
  E3,
  E4,
  PA_L,
  AssignedValidity,
  PreClosure,
  KnowledgeAxioms,
  KnowledgeModFactivity,
  EpistemicArithmetic,
  EpistemicArithmeticModFactivity,
  ReinhardtSchema,
  SigmaLine3,
  KClosure,
};

struct SchemaId {
  SchemaKind kind;
  Nat n;  // SigmaLine3: the embedded machine index

  static SchemaId of(SchemaKind k) { return {k, 0}; }
  static SchemaId line3(const Nat& n) { return {SchemaKind::SigmaLine3, n}; }
};

inline Nat schema_code(const SchemaId& id) {
  return pair_nat(Nat(static_cast<unsigned>(id.kind)), id.n);
}

inline const char* schema_name(SchemaKind k) {
  switch (k) {
    case SchemaKind::E1: return "E1";
    case SchemaKind::E2: return "E2";
    case SchemaKind::E3: return "E3";
    case SchemaKind::E4: return "E4";
    case SchemaKind::PA_L: return "PA_L";
    case SchemaKind::AssignedValidity: return "AssignedValidity";
    case SchemaKind::PreClosure: return "PreClosure";
    case SchemaKind::KnowledgeAxioms: return "KnowledgeAxioms";
    case SchemaKind::KnowledgeModFactivity: return "KnowledgeModFactivity";
    case SchemaKind::EpistemicArithmetic: return "EpistemicArithmetic";
    case SchemaKind::EpistemicArithmeticModFactivity:
      return "EpistemicArithmeticModFactivity";
    case SchemaKind::ReinhardtSchema: return "ReinhardtSchema";
    case SchemaKind::SigmaLine3: return "SigmaLine3";
    case SchemaKind::KClosure: return "KClosure";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Instance builders.
// ---------------------------------------------------------------------------

inline FormulaPtr e1_instance(const FormulaPtr& valid_phi) {
  return universal_closure(Formula::know(valid_phi));
}

inline FormulaPtr e2_instance(const FormulaPtr& phi, const FormulaPtr& psi) {
  return universal_closure(
      Formula::imp(Formula::know(Formula::imp(phi, psi)),
                   Formula::imp(Formula::know(phi), Formula::know(psi))));
}

inline FormulaPtr e3_instance(const FormulaPtr& phi) {
  return universal_closure(Formula::imp(Formula::know(phi), phi));
}

inline FormulaPtr e4_instance(const FormulaPtr& phi) {
  return universal_closure(
      Formula::imp(Formula::know(phi), Formula::know(Formula::know(phi))));
}

inline const std::vector<FormulaPtr>& pa_base_axioms() {
  static const std::vector<FormulaPtr> axioms = [] {
    std::vector<FormulaPtr> out;
    out.push_back(parse("forall x ~(S(x) = 0)"));
    out.push_back(parse("forall x forall y (S(x) = S(y) -> x = y)"));
    out.push_back(parse("forall x x + 0 = x"));
    out.push_back(parse("forall x forall y x + S(y) = S(x + y)"));
    out.push_back(parse("forall x x * 0 = 0"));
    out.push_back(parse("forall x forall y x * S(y) = x * y + x"));
    return out;
  }();
  return axioms;
}

inline FormulaPtr induction_instance(const FormulaPtr& phi,
                                     const std::string& x) {
  auto base = subst(phi, x, Term::zero());
  auto step = Formula::all(
      x, Formula::imp(phi, subst(phi, x, Term::succ(Term::var(x)))));
  return universal_closure(
      Formula::imp(base, Formula::imp(step, Formula::all(x, phi))));
}

// Sigma(n) line 3: forall x (K phi <-> <x, code(phi)> in W_n).
inline FormulaPtr line3_instance(const FormulaPtr& phi, const Nat& n) {
  auto fv = free_vars(phi);
  if (!(fv.empty() || (fv.size() == 1 && fv[0] == "x")))
    throw PreconditionError("line3_instance: FV(phi) must be within {x}");
  auto in_part =
      in_pair_formula(Term::var("x"), Term::num(encode_value(phi)), n);
  return Formula::all("x", Formula::iff(Formula::know(phi), in_part));
}

// Reinhardt's schema: exists e K(forall x (K phi <-> x in W_e)).
inline FormulaPtr reinhardt_instance(const FormulaPtr& phi) {
  auto fv = free_vars(phi);
  if (!(fv.empty() || (fv.size() == 1 && fv[0] == "x")))
    throw PreconditionError("reinhardt_instance: FV(phi) must be within {x}");
  auto body = Formula::all(
      "x", Formula::iff(Formula::know(phi), membership_template()));
  return Formula::ex("e", Formula::know(body));
}

// ---------------------------------------------------------------------------
// Recognizer helpers.
// ---------------------------------------------------------------------------

namespace schemadetail {

inline FormulaPtr strip_closure(const FormulaPtr& f) {
  auto core = f;
  while (core->kind == Formula::Kind::All) core = core->f1;
  return core;
}

inline bool closure_canonical(const FormulaPtr& whole, const FormulaPtr& core) {
  return formula_eq(universal_closure(core), whole);
}

inline bool match_e2(const FormulaPtr& sigma) {
  auto core = strip_closure(sigma);
  if (!closure_canonical(sigma, core)) return false;
  if (core->kind != Formula::Kind::Imp) return false;
  auto kab = core->f1;
  auto rest = core->f2;
  if (kab->kind != Formula::Kind::Know ||
      kab->f1->kind != Formula::Kind::Imp || rest->kind != Formula::Kind::Imp)
    return false;
  auto ka = rest->f1;
  auto kb = rest->f2;
  if (ka->kind != Formula::Kind::Know || kb->kind != Formula::Kind::Know)
    return false;
  return formula_eq(kab->f1->f1, ka->f1) && formula_eq(kab->f1->f2, kb->f1);
}

inline bool match_e3(const FormulaPtr& sigma) {
  auto core = strip_closure(sigma);
  if (!closure_canonical(sigma, core)) return false;
  if (core->kind != Formula::Kind::Imp) return false;
  return core->f1->kind == Formula::Kind::Know &&
         formula_eq(core->f1->f1, core->f2);
}

inline bool match_e4(const FormulaPtr& sigma) {
  auto core = strip_closure(sigma);
  if (!closure_canonical(sigma, core)) return false;
  if (core->kind != Formula::Kind::Imp) return false;
  auto ka = core->f1;
  auto kka = core->f2;
  return ka->kind == Formula::Kind::Know && kka->kind == Formula::Kind::Know &&
         kka->f1->kind == Formula::Kind::Know &&
         formula_eq(ka->f1, kka->f1->f1);
}

inline bool match_pa(const FormulaPtr& sigma) {
  for (const auto& ax : pa_base_axioms())
    if (formula_eq(sigma, ax)) return true;
  auto core = strip_closure(sigma);
  if (!closure_canonical(sigma, core)) return false;
  if (core->kind != Formula::Kind::Imp) return false;
  auto base = core->f1;
  auto rest = core->f2;
  if (rest->kind != Formula::Kind::Imp) return false;
  auto step = rest->f1;
  auto concl = rest->f2;
  if (concl->kind != Formula::Kind::All) return false;
  auto x = concl->var;
  auto phi = concl->f1;
  try {
    if (!formula_eq(base, subst(phi, x, Term::zero()))) return false;
    auto expect_step = Formula::all(
        x, Formula::imp(phi, subst(phi, x, Term::succ(Term::var(x)))));
    return formula_eq(step, expect_step);
  } catch (const CaptureError&) {
    return false;
  }
}

inline bool match_line3(const FormulaPtr& sigma, const Nat& n) {
  if (sigma->kind != Formula::Kind::All || sigma->var != "x") return false;
  auto body = sigma->f1;
  if (body->kind != Formula::Kind::Iff || body->f1->kind != Formula::Kind::Know)
    return false;
  auto phi = body->f1->f1;
  auto fv = free_vars(phi);
  if (!(fv.empty() || (fv.size() == 1 && fv[0] == "x"))) return false;
  return formula_eq(sigma, line3_instance(phi, n));
}

inline bool match_reinhardt(const FormulaPtr& sigma) {
  if (sigma->kind != Formula::Kind::Ex || sigma->var != "e") return false;
  auto k = sigma->f1;
  if (k->kind != Formula::Kind::Know) return false;
  auto all = k->f1;
  if (all->kind != Formula::Kind::All || all->var != "x") return false;
  auto body = all->f1;
  if (body->kind != Formula::Kind::Iff || body->f1->kind != Formula::Kind::Know)
    return false;
  auto phi = body->f1->f1;
  auto fv = free_vars(phi);
  if (!(fv.empty() || (fv.size() == 1 && fv[0] == "x"))) return false;
  return formula_eq(sigma, reinhardt_instance(phi));
}

inline ThreeValued match_e1(const FormulaPtr& sigma, Budget& budget) {
  auto core = strip_closure(sigma);
  if (!closure_canonical(sigma, core)) return ThreeValued::False;
  if (core->kind != Formula::Kind::Know) return ThreeValued::False;
  auto pr = prove_chain({}, core->f1, budget);
  return pr.proved ? ThreeValued::True : ThreeValued::Unknown;
}

inline void collect_numeral_values(const TermPtr& t, std::set<Nat>& out) {
  switch (t->kind) {
    case Term::Kind::Num: out.insert(t->value); break;
    case Term::Kind::Succ: collect_numeral_values(t->a, out); break;
    case Term::Kind::Sum:
    case Term::Kind::Prod:
      collect_numeral_values(t->a, out);
      collect_numeral_values(t->b, out);
      break;
    default: break;
  }
}

inline void collect_numeral_values(const FormulaPtr& f, std::set<Nat>& out) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      collect_numeral_values(f->t1, out);
      collect_numeral_values(f->t2, out);
      break;
    case Formula::Kind::Not:
    case Formula::Kind::Know:
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      collect_numeral_values(f->f1, out);
      break;
    default:
      collect_numeral_values(f->f1, out);
      collect_numeral_values(f->f2, out);
      break;
  }
}

inline TermPtr abstract_term(const TermPtr& t,
                             const std::map<Nat, std::string>& repl) {
  switch (t->kind) {
    case Term::Kind::Num: {
      auto it = repl.find(t->value);
      return it == repl.end() ? t : Term::var(it->second);
    }
    case Term::Kind::Succ: return Term::succ(abstract_term(t->a, repl));
    case Term::Kind::Sum:
      return Term::sum(abstract_term(t->a, repl), abstract_term(t->b, repl));
    case Term::Kind::Prod:
      return Term::prod(abstract_term(t->a, repl), abstract_term(t->b, repl));
    default: return t;
  }
}

inline FormulaPtr abstract_formula(const FormulaPtr& f,
                                   const std::map<Nat, std::string>& repl) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(abstract_term(f->t1, repl),
                         abstract_term(f->t2, repl));
    case Formula::Kind::Not: return Formula::neg(abstract_formula(f->f1, repl));
    case Formula::Kind::Know:
      return Formula::know(abstract_formula(f->f1, repl));
    case Formula::Kind::Imp:
      return Formula::imp(abstract_formula(f->f1, repl),
                          abstract_formula(f->f2, repl));
    case Formula::Kind::And:
      return Formula::conj(abstract_formula(f->f1, repl),
                           abstract_formula(f->f2, repl));
    case Formula::Kind::Or:
      return Formula::disj(abstract_formula(f->f1, repl),
                           abstract_formula(f->f2, repl));
    case Formula::Kind::Iff:
      return Formula::iff(abstract_formula(f->f1, repl),
                          abstract_formula(f->f2, repl));
    case Formula::Kind::All:
      return Formula::all(f->var, abstract_formula(f->f1, repl));
    case Formula::Kind::Ex:
      return Formula::ex(f->var, abstract_formula(f->f1, repl));
  }
  return f;
}

// Assigned validity: sigma = phi^s for some valid phi. Candidate preimages
// un-ground subsets of the numeral values in sigma, one fresh variable per
// value; merging variables preserves validity, so the uniform preimage
// decides membership. The subset lattice is capped at 2^10.
inline ThreeValued match_assigned_validity(const FormulaPtr& sigma,
                                           Budget& budget) {
  if (!is_sentence(sigma)) return ThreeValued::False;
  std::set<Nat> values;
  collect_numeral_values(sigma, values);
  std::vector<Nat> vals(values.begin(), values.end());
  if (vals.size() > 10) vals.resize(10);
  std::size_t subsets = std::size_t(1) << vals.size();
  try {
    for (std::uint64_t round = 0;; ++round) {
      for (std::size_t mask = 0; mask < subsets; ++mask) {
        if (!budget.tick()) throw BudgetExhausted{};
        if (budget.capped()) return ThreeValued::Unknown;
        std::map<Nat, std::string> repl;
        for (std::size_t i = 0; i < vals.size(); ++i)
          if (mask & (std::size_t(1) << i))
            repl[vals[i]] = "av" + std::to_string(i);
        auto candidate = abstract_formula(sigma, repl);
        CapScope slice(budget, 64u << (round > 14 ? 14 : round));
        auto pr = prove_chain({}, candidate, budget);
        if (pr.proved) return ThreeValued::True;
      }
    }
  } catch (const BudgetExhausted&) {
    return ThreeValued::Unknown;
  }
}

// ---------------------------------------------------------------------------
// Cursors. Every next() call performs one bounded attempt.
// ---------------------------------------------------------------------------

// Instances built directly from a counter; always yields.
class BuilderCursor : public AxiomCursor {
 public:
  using Builder = std::function<FormulaPtr(const Nat&)>;
  explicit BuilderCursor(Builder b) : build_(std::move(b)) {}

  std::optional<FormulaPtr> next(Budget& b) override {
    if (!b.tick()) throw BudgetExhausted{};
    if (b.capped()) return std::nullopt;
    auto f = build_(counter_);
    counter_ += 1;
    return f;
  }

 private:
  Builder build_;
  Nat counter_ = 0;
};

// Dovetails validity search over a formula stream with doubling budget
// levels; emits map(phi, payload) once phi is proved valid. One counter
// advance per next() call.
class ValidityCursor : public AxiomCursor {
 public:
  using Mapper =
      std::function<std::optional<FormulaPtr>(const FormulaPtr&, const Nat&)>;

  ValidityCursor(FormulaStream::Filter filter, bool with_payload, Mapper map)
      : stream_(filter), with_payload_(with_payload), map_(std::move(map)) {}

  std::optional<FormulaPtr> next(Budget& b) override {
    if (!b.tick()) throw BudgetExhausted{};
    if (b.capped()) return std::nullopt;
    auto [lhs, level_nat] = unpair_nat(counter_);
    counter_ += 1;
    Nat idx_nat = lhs, payload = 0;
    if (with_payload_) {
      auto [i, p] = unpair_nat(lhs);
      idx_nat = i;
      payload = p;
    }
    std::size_t index = static_cast<std::size_t>(idx_nat);
    std::uint64_t level = static_cast<std::uint64_t>(
        level_nat > 14 ? Nat(14) : level_nat);
    bool valid = false;
    if (proved_.count(index)) {
      valid = true;
    } else if (failed_at_[index] > level) {
      return std::nullopt;  // already failed at this level or deeper
    } else {
      auto phi = stream_.at(index);
      CapScope slice(b, std::uint64_t(64) << level);
      auto pr = prove_chain({}, phi, b);
      if (pr.proved) {
        proved_.insert(index);
        valid = true;
      } else {
        if (failed_at_[index] <= level) failed_at_[index] = level + 1;
      }
    }
    if (!valid) return std::nullopt;
    auto out = map_(stream_.at(index), payload);
    if (!out) return std::nullopt;
    if (!emitted_.insert((*out)->hash).second) return std::nullopt;
    return out;
  }

 private:
  FormulaStream stream_;
  bool with_payload_;
  Mapper map_;
  Nat counter_ = 0;
  std::set<std::size_t> proved_;
  std::map<std::size_t, std::uint64_t> failed_at_;
  std::unordered_set<std::uint64_t> emitted_;
};

// K-closure to every finite depth over a base stream: alternates base
// emissions with K-iterates K^(j0+1)(seen[i]) for Cantor-enumerated (j0, i).
class ClosureCursor : public AxiomCursor {
 public:
  explicit ClosureCursor(std::unique_ptr<AxiomCursor> base)
      : base_(std::move(base)) {}

  std::optional<FormulaPtr> next(Budget& b) override {
    if (!b.tick()) throw BudgetExhausted{};
    if (b.capped()) return std::nullopt;
    if (turn_base_ && !base_->finished()) {
      turn_base_ = false;
      auto f = base_->next(b);
      if (f) seen_.push_back(*f);
      return f;
    }
    turn_base_ = true;
    auto [j0, i] = unpair_nat(pair_counter_);
    if (i >= seen_.size()) {
      if (base_->finished()) pair_counter_ += 1;  // never becomes ready
      return std::nullopt;  // wait for the base to produce seen_[i]
    }
    pair_counter_ += 1;
    auto f = seen_[static_cast<std::size_t>(i)];
    for (Nat d = 0; d <= j0; ++d) f = Formula::know(f);
    return f;
  }

 private:
  std::unique_ptr<AxiomCursor> base_;
  std::vector<FormulaPtr> seen_;
  Nat pair_counter_ = 0;
  bool turn_base_ = true;
};

// Depth-one K prefix over a base stream.
class KPrefixCursor : public AxiomCursor {
 public:
  explicit KPrefixCursor(std::unique_ptr<AxiomCursor> base)
      : base_(std::move(base)) {}
  std::optional<FormulaPtr> next(Budget& b) override {
    auto f = base_->next(b);
    if (!f) return std::nullopt;
    return Formula::know(*f);
  }
  bool finished() const override { return base_->finished(); }

 private:
  std::unique_ptr<AxiomCursor> base_;
};

}  // namespace schemadetail

// ---------------------------------------------------------------------------
// Axiom sets per schema id.
// ---------------------------------------------------------------------------

inline AxiomSet schema_axiom_set(const SchemaId& id);

namespace schemadetail {

inline std::unique_ptr<AxiomCursor> open_e2() {
  auto all = std::make_shared<FormulaStream>(FormulaStream::Filter::All);
  return std::make_unique<BuilderCursor>([all](const Nat& c) {
    auto [a, b] = unpair_nat(c);
    return e2_instance(all->at(static_cast<std::size_t>(a)),
                       all->at(static_cast<std::size_t>(b)));
  });
}

inline std::unique_ptr<AxiomCursor> open_e3() {
  auto all = std::make_shared<FormulaStream>(FormulaStream::Filter::All);
  return std::make_unique<BuilderCursor>([all](const Nat& c) {
    return e3_instance(all->at(static_cast<std::size_t>(c)));
  });
}

inline std::unique_ptr<AxiomCursor> open_e4() {
  auto all = std::make_shared<FormulaStream>(FormulaStream::Filter::All);
  return std::make_unique<BuilderCursor>([all](const Nat& c) {
    return e4_instance(all->at(static_cast<std::size_t>(c)));
  });
}

inline std::unique_ptr<AxiomCursor> open_e1() {
  return std::make_unique<ValidityCursor>(
      FormulaStream::Filter::All, false,
      [](const FormulaPtr& phi, const Nat&) -> std::optional<FormulaPtr> {
        return e1_instance(phi);
      });
}

inline std::unique_ptr<AxiomCursor> open_av() {
  return std::make_unique<ValidityCursor>(
      FormulaStream::Filter::All, true,
      [](const FormulaPtr& phi, const Nat& payload) -> std::optional<FormulaPtr> {
        return ground(phi, nth_assignment(payload));
      });
}

inline std::unique_ptr<AxiomCursor> open_pa() {
  auto all = std::make_shared<FormulaStream>(FormulaStream::Filter::All);
  return std::make_unique<BuilderCursor>([all](const Nat& c) {
    const auto& fixed = pa_base_axioms();
    if (c < fixed.size()) return fixed[static_cast<std::size_t>(c)];
    auto [a, v] = unpair_nat(c - fixed.size());
    return induction_instance(all->at(static_cast<std::size_t>(a)),
                              pool_var(static_cast<std::size_t>(v % 8)));
  });
}

inline std::unique_ptr<AxiomCursor> open_line3(const Nat& n) {
  auto xs = std::make_shared<FormulaStream>(FormulaStream::Filter::FreeAtMostX);
  return std::make_unique<BuilderCursor>([xs, n](const Nat& c) {
    return line3_instance(xs->at(static_cast<std::size_t>(c)), n);
  });
}

inline std::unique_ptr<AxiomCursor> open_reinhardt() {
  auto xs = std::make_shared<FormulaStream>(FormulaStream::Filter::FreeAtMostX);
  return std::make_unique<BuilderCursor>([xs](const Nat& c) {
    return reinhardt_instance(xs->at(static_cast<std::size_t>(c)));
  });
}

inline std::unique_ptr<AxiomCursor> open_union(std::vector<SchemaId> ids);
inline std::unique_ptr<AxiomCursor> raw_union(
    std::vector<std::unique_ptr<AxiomCursor>> curs);
inline std::unique_ptr<AxiomCursor> k_iterates(
    std::unique_ptr<AxiomCursor> base);

inline std::unique_ptr<AxiomCursor> open_kind(const SchemaId& id) {
  using K = SchemaKind;
  switch (id.kind) {
    case K::E1: return open_e1();
    case K::E2: return open_e2();
    case K::E3: return open_e3();
    case K::E4: return open_e4();
    case K::PA_L: return open_pa();
    case K::AssignedValidity: return open_av();
    case K::SigmaLine3: return open_line3(id.n);
    case K::ReinhardtSchema: return open_reinhardt();
    case K::PreClosure:
      return open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                         SchemaId::of(K::E3), SchemaId::of(K::E4)});
    case K::KnowledgeAxioms: {
      auto base = open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                              SchemaId::of(K::E3), SchemaId::of(K::E4)});
      auto angled = std::make_unique<KPrefixCursor>(
          open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                      SchemaId::of(K::E3), SchemaId::of(K::E4)}));
      std::vector<std::unique_ptr<AxiomCursor>> both;
      both.push_back(std::move(base));
      both.push_back(std::move(angled));
      return raw_union(std::move(both));
    }
    case K::KnowledgeModFactivity: {
      std::vector<std::unique_ptr<AxiomCursor>> both;
      both.push_back(open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                                 SchemaId::of(K::E3), SchemaId::of(K::E4)}));
      both.push_back(std::make_unique<KPrefixCursor>(
          open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                      SchemaId::of(K::E4)})));
      return raw_union(std::move(both));
    }
    case K::EpistemicArithmetic: {
      std::vector<std::unique_ptr<AxiomCursor>> both;
      both.push_back(open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                                 SchemaId::of(K::E3), SchemaId::of(K::E4)}));
      both.push_back(std::make_unique<KPrefixCursor>(
          open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                      SchemaId::of(K::E3), SchemaId::of(K::E4),
                      SchemaId::of(K::PA_L)})));
      return raw_union(std::move(both));
    }
    case K::EpistemicArithmeticModFactivity: {
      std::vector<std::unique_ptr<AxiomCursor>> both;
      both.push_back(open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                                 SchemaId::of(K::E3), SchemaId::of(K::E4)}));
      both.push_back(std::make_unique<KPrefixCursor>(
          open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                      SchemaId::of(K::E4), SchemaId::of(K::PA_L)})));
      return raw_union(std::move(both));
    }
    case K::KClosure:
      // K-iterates of the pre-closure axioms, every depth from one
      return k_iterates(open_union({SchemaId::of(K::E1), SchemaId::of(K::E2),
                                    SchemaId::of(K::E3), SchemaId::of(K::E4)}));
  }
  throw PreconditionError("open_kind: bad schema id");
}

struct RawUnionCursor : AxiomCursor {
  std::vector<std::unique_ptr<AxiomCursor>> curs;
  std::size_t rr = 0;
  std::optional<FormulaPtr> next(Budget& b) override {
    while (!finished()) {
      if (!b.tick()) throw BudgetExhausted{};
      if (b.capped()) return std::nullopt;
      std::size_t k = rr % curs.size();
      ++rr;
      if (curs[k]->finished()) continue;
      return curs[k]->next(b);
    }
    return std::nullopt;
  }
  bool finished() const override {
    for (const auto& c : curs)
      if (!c->finished()) return false;
    return true;
  }
};

inline std::unique_ptr<AxiomCursor> raw_union(
    std::vector<std::unique_ptr<AxiomCursor>> curs) {
  auto u = std::make_unique<RawUnionCursor>();
  u->curs = std::move(curs);
  return u;
}

inline std::unique_ptr<AxiomCursor> open_union(std::vector<SchemaId> ids) {
  std::vector<std::unique_ptr<AxiomCursor>> curs;
  curs.reserve(ids.size());
  for (const auto& id : ids) curs.push_back(open_kind(id));
  return raw_union(std::move(curs));
}

// K-iterates (depth >= 1) of a base stream, without the base layer itself.
struct KIterateCursor : AxiomCursor {
  std::unique_ptr<AxiomCursor> base;
  std::vector<FormulaPtr> seen;
  Nat pair_counter = 0;
  bool turn_base = true;

  std::optional<FormulaPtr> next(Budget& b) override {
    if (!b.tick()) throw BudgetExhausted{};
    if (b.capped()) return std::nullopt;
    if (turn_base && !base->finished()) {
      turn_base = false;
      auto f = base->next(b);
      if (f) seen.push_back(*f);
      return std::nullopt;  // base items are collected, not emitted
    }
    turn_base = true;
    auto [j0, i] = unpair_nat(pair_counter);
    if (i >= seen.size()) {
      if (base->finished()) pair_counter += 1;
      return std::nullopt;
    }
    pair_counter += 1;
    auto f = seen[static_cast<std::size_t>(i)];
    for (Nat d = 0; d <= j0; ++d) f = Formula::know(f);
    return f;
  }
};

inline std::unique_ptr<AxiomCursor> k_iterates(
    std::unique_ptr<AxiomCursor> base) {
  auto c = std::make_unique<KIterateCursor>();
  c->base = std::move(base);
  return c;
}

}  // namespace schemadetail

// ---------------------------------------------------------------------------
// Recognizers.
// ---------------------------------------------------------------------------

namespace schemadetail {

inline ThreeValued recognize_kind(const SchemaId& id, const FormulaPtr& f,
                                  Budget& b);

inline bool budgeted_kind(SchemaKind k) {
  return k == SchemaKind::E1 || k == SchemaKind::AssignedValidity;
}

// Exact recognizers run first; the semidecidable ones (E1, assigned
// validity) then get capped attempts in doubling rounds, so no single
// attempt starves the others of budget.
inline ThreeValued recognize_union(const std::vector<SchemaId>& ids,
                                   const FormulaPtr& f, Budget& b) {
  std::vector<SchemaId> budgeted;
  for (const auto& id : ids) {
    if (budgeted_kind(id.kind)) {
      budgeted.push_back(id);
      continue;
    }
    auto v = recognize_kind(id, f, b);
    if (v == ThreeValued::True) return ThreeValued::True;
  }
  if (budgeted.empty()) return ThreeValued::False;
  try {
    for (std::uint64_t round = 0;; ++round) {
      if (!b.tick()) throw BudgetExhausted{};
      if (b.capped()) return ThreeValued::Unknown;
      for (const auto& id : budgeted) {
        CapScope slice(b, std::uint64_t(256) << (round > 13 ? 13 : round));
        auto v = recognize_kind(id, f, b);
        if (v == ThreeValued::True) return ThreeValued::True;
        if (v == ThreeValued::False) return ThreeValued::False;
      }
    }
  } catch (const BudgetExhausted&) {
    return ThreeValued::Unknown;
  }
}

inline ThreeValued recognize_k_layer(const std::vector<SchemaId>& ids,
                                     const FormulaPtr& f, Budget& b) {
  if (f->kind != Formula::Kind::Know) return ThreeValued::False;
  return recognize_union(ids, f->f1, b);
}

inline ThreeValued recognize_family(const std::vector<SchemaId>& direct,
                                    const std::vector<SchemaId>& layered,
                                    const FormulaPtr& f, Budget& b) {
  // exact members first, at both depths
  for (const auto& id : direct)
    if (!budgeted_kind(id.kind) &&
        recognize_kind(id, f, b) == ThreeValued::True)
      return ThreeValued::True;
  bool is_k = f->kind == Formula::Kind::Know;
  if (is_k)
    for (const auto& id : layered)
      if (!budgeted_kind(id.kind) &&
          recognize_kind(id, f->f1, b) == ThreeValued::True)
        return ThreeValued::True;
  // budgeted members in capped doubling rounds
  std::vector<std::pair<SchemaId, FormulaPtr>> attempts;
  for (const auto& id : direct)
    if (budgeted_kind(id.kind)) attempts.emplace_back(id, f);
  if (is_k)
    for (const auto& id : layered)
      if (budgeted_kind(id.kind)) attempts.emplace_back(id, f->f1);
  if (attempts.empty()) return ThreeValued::False;
  try {
    for (std::uint64_t round = 0;; ++round) {
      if (!b.tick()) throw BudgetExhausted{};
      if (b.capped()) return ThreeValued::Unknown;
      for (const auto& [id, g] : attempts) {
        CapScope slice(b, std::uint64_t(256) << (round > 13 ? 13 : round));
        if (recognize_kind(id, g, b) == ThreeValued::True)
          return ThreeValued::True;
      }
    }
  } catch (const BudgetExhausted&) {
    return ThreeValued::Unknown;
  }
}

inline ThreeValued recognize_kind(const SchemaId& id, const FormulaPtr& f,
                                  Budget& b) {
  using K = SchemaKind;
  if (!b.tick()) throw BudgetExhausted{};
  auto tv = [](bool x) { return x ? ThreeValued::True : ThreeValued::False; };
  const std::vector<SchemaId> pre{SchemaId::of(K::E1), SchemaId::of(K::E2),
                                  SchemaId::of(K::E3), SchemaId::of(K::E4)};
  switch (id.kind) {
    case K::E1: return match_e1(f, b);
    case K::E2: return tv(match_e2(f));
    case K::E3: return tv(match_e3(f));
    case K::E4: return tv(match_e4(f));
    case K::PA_L: return tv(match_pa(f));
    case K::AssignedValidity: return match_assigned_validity(f, b);
    case K::SigmaLine3: return tv(match_line3(f, id.n));
    case K::ReinhardtSchema: return tv(match_reinhardt(f));
    case K::PreClosure: return recognize_family(pre, {}, f, b);
    case K::KnowledgeAxioms: return recognize_family(pre, pre, f, b);
    case K::KnowledgeModFactivity:
      return recognize_family(pre,
                              {SchemaId::of(K::E1), SchemaId::of(K::E2),
                               SchemaId::of(K::E4)},
                              f, b);
    case K::EpistemicArithmetic:
      return recognize_family(pre,
                              {SchemaId::of(K::E1), SchemaId::of(K::E2),
                               SchemaId::of(K::E3), SchemaId::of(K::E4),
                               SchemaId::of(K::PA_L)},
                              f, b);
    case K::EpistemicArithmeticModFactivity:
      return recognize_family(pre,
                              {SchemaId::of(K::E1), SchemaId::of(K::E2),
                               SchemaId::of(K::E4), SchemaId::of(K::PA_L)},
                              f, b);
    case K::KClosure: {
      if (f->kind != Formula::Kind::Know) return ThreeValued::False;
      // exact pre-closure members at every peel depth, then budgeted E1
      std::vector<FormulaPtr> cores;
      auto core = f;
      while (core->kind == Formula::Kind::Know) {
        core = core->f1;
        cores.push_back(core);
      }
      for (const auto& c : cores)
        if (match_e2(c) || match_e3(c) || match_e4(c)) return ThreeValued::True;
      try {
        for (std::uint64_t round = 0;; ++round) {
          if (!b.tick()) throw BudgetExhausted{};
          if (b.capped()) return ThreeValued::Unknown;
          for (const auto& c : cores) {
            CapScope slice(b, std::uint64_t(256) << (round > 13 ? 13 : round));
            if (match_e1(c, b) == ThreeValued::True) return ThreeValued::True;
          }
        }
      } catch (const BudgetExhausted&) {
        return ThreeValued::Unknown;
      }
    }
  }
  return ThreeValued::False;
}

}  // namespace schemadetail

inline AxiomSet schema_axiom_set(const SchemaId& id) {
  AxiomSet s;
  s.identity = schema_code(id);
  s.open = [id]() { return schemadetail::open_kind(id); };
  s.recognize = [id](const FormulaPtr& f, Budget& b) {
    return schemadetail::recognize_kind(id, f, b);
  };
  return s;
}

inline std::vector<FormulaPtr> enumerate_schema(const SchemaId& id,
                                                std::uint64_t budget_limit) {
  return schema_axiom_set(id).emissions(budget_limit);
}

inline ThreeValued is_instance(const SchemaId& id, const FormulaPtr& sigma,
                               std::uint64_t budget_limit) {
  return schema_axiom_set(id).is_instance(sigma, budget_limit);
}

// ---------------------------------------------------------------------------
// Sigma(n): lines 1-4 (E1, E2, E4; PA_L; the self-membership line; assigned
// validity) closed under K to every finite depth. The recognizer peels K
// prefixes and dispatches the core to the line recognizers at each depth.
// ---------------------------------------------------------------------------

inline AxiomSet sigma_axioms(const Nat& n) {
  using K = SchemaKind;
  AxiomSet s;
  s.identity = pair_nat(Nat(100), n);
  s.open = [n]() -> std::unique_ptr<AxiomCursor> {
    auto base = schemadetail::raw_union([&] {
      std::vector<std::unique_ptr<AxiomCursor>> curs;
      curs.push_back(schemadetail::open_e1());
      curs.push_back(schemadetail::open_e2());
      curs.push_back(schemadetail::open_e4());
      curs.push_back(schemadetail::open_pa());
      curs.push_back(schemadetail::open_line3(n));
      curs.push_back(schemadetail::open_av());
      return curs;
    }());
    return std::make_unique<schemadetail::ClosureCursor>(std::move(base));
  };
  s.recognize = [n](const FormulaPtr& f, Budget& b) {
    std::vector<FormulaPtr> cores;
    auto core = f;
    while (true) {
      cores.push_back(core);
      if (core->kind != Formula::Kind::Know) break;
      core = core->f1;
    }
    // exact line recognizers at every peel depth first
    for (const auto& c : cores) {
      if (schemadetail::match_e2(c) || schemadetail::match_e4(c) ||
          schemadetail::match_pa(c) || schemadetail::match_line3(c, n))
        return ThreeValued::True;
      if (!b.tick()) return ThreeValued::Unknown;
    }
    // budgeted E1 and assigned-validity attempts in doubling rounds
    try {
      for (std::uint64_t round = 0;; ++round) {
        if (!b.tick()) throw BudgetExhausted{};
        if (b.capped()) return ThreeValued::Unknown;
        for (const auto& c : cores) {
          {
            CapScope slice(b, std::uint64_t(256) << (round > 13 ? 13 : round));
            if (schemadetail::match_e1(c, b) == ThreeValued::True)
              return ThreeValued::True;
          }
          {
            CapScope slice(b, std::uint64_t(256) << (round > 13 ? 13 : round));
            if (schemadetail::match_assigned_validity(c, b) ==
                ThreeValued::True)
              return ThreeValued::True;
          }
        }
      }
    } catch (const BudgetExhausted&) {
      return ThreeValued::Unknown;
    }
  };
  return s;
}

}  // namespace rk
