#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rk/prover.hpp"
#include "rk/enumerate.hpp"
#include "rk/structure.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Budgeted sentence enumerators.
//
// A cursor is a single-owner stream of sentences drawing ticks from the
// master budget. next() performs one bounded emission attempt: it yields the
// next sentence, or nullopt when this attempt produced nothing (a budgeted
// search that has not landed yet, or a cap slice that ran dry). Partial
// progress is kept, so a later call resumes where the stream stopped; every
// call costs at least one tick, so retry loops terminate with the budget.
// Emission order is a pure function of the axiom-set identity.
// ---------------------------------------------------------------------------

class AxiomCursor {
 public:
  virtual ~AxiomCursor() = default;
  virtual std::optional<FormulaPtr> next(Budget& budget) = 0;
  virtual bool finished() const { return false; }
};

class AxiomSet {
 public:
  Nat identity;
  std::function<std::unique_ptr<AxiomCursor>()> open;
  std::function<ThreeValued(const FormulaPtr&, Budget&)> recognize;

  // All sentences emitted within a fresh budget of the given size.
  std::vector<FormulaPtr> emissions(std::uint64_t budget_limit) const {
    Budget b(budget_limit);
    auto cur = open();
    std::vector<FormulaPtr> out;
    try {
      while (b.ok() && !b.capped() && !cur->finished()) {
        auto f = cur->next(b);
        if (f) out.push_back(*f);
      }
    } catch (const BudgetExhausted&) {
    }
    return out;
  }

  // Stream the emissions through a callback (avoids holding them all).
  void for_each_emission(std::uint64_t budget_limit,
                         const std::function<bool(const FormulaPtr&)>& fn) const {
    Budget b(budget_limit);
    auto cur = open();
    try {
      while (b.ok() && !b.capped() && !cur->finished()) {
        auto f = cur->next(b);
        if (f && !fn(*f)) return;
      }
    } catch (const BudgetExhausted&) {
    }
  }

  ThreeValued is_instance(const FormulaPtr& f, std::uint64_t budget_limit) const {
    Budget b(budget_limit);
    try {
      return recognize(f, b);
    } catch (const BudgetExhausted&) {
      return ThreeValued::Unknown;
    }
  }
};

// Finite axiom set: emits the list in order, one tick each; exact recognizer.
inline AxiomSet axiom_set_from_list(std::vector<FormulaPtr> sentences,
                                    Nat identity) {
  struct ListCursor : AxiomCursor {
    std::vector<FormulaPtr> items;
    std::size_t i = 0;
    std::optional<FormulaPtr> next(Budget& b) override {
      if (i >= items.size()) return std::nullopt;
      if (!b.tick()) throw BudgetExhausted{};
      if (b.capped()) return std::nullopt;
      return items[i++];
    }
    bool finished() const override { return i >= items.size(); }
    // list cursors yield one sentence per attempt
  };
  AxiomSet s;
  s.identity = std::move(identity);
  s.open = [sentences]() {
    auto c = std::make_unique<ListCursor>();
    c->items = sentences;
    return std::unique_ptr<AxiomCursor>(std::move(c));
  };
  s.recognize = [sentences](const FormulaPtr& f, Budget& b) {
    if (!b.tick()) throw BudgetExhausted{};
    for (const auto& g : sentences)
      if (formula_eq(f, g)) return ThreeValued::True;
    return ThreeValued::False;
  };
  return s;
}

// Fair union: round-robin over member streams with a bounded tick slice per
// visit, so one slow member cannot starve the others. The recognizer is True
// if any member recognizes, False only if all say False.
inline AxiomSet axiom_set_union(std::vector<AxiomSet> members, Nat identity) {
  struct UnionCursor : AxiomCursor {
    std::vector<std::unique_ptr<AxiomCursor>> curs;
    std::size_t rr = 0;
    std::optional<FormulaPtr> next(Budget& b) override {
      while (!finished()) {
        if (!b.tick()) throw BudgetExhausted{};
        if (b.capped()) return std::nullopt;
        std::size_t k = rr % curs.size();
        ++rr;
        if (curs[k]->finished()) continue;
        // one visit = one emission attempt of one member
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
  AxiomSet s;
  s.identity = std::move(identity);
  auto shared = std::make_shared<std::vector<AxiomSet>>(std::move(members));
  s.open = [shared]() {
    auto c = std::make_unique<UnionCursor>();
    for (const auto& m : *shared) c->curs.push_back(m.open());
    return std::unique_ptr<AxiomCursor>(std::move(c));
  };
  s.recognize = [shared](const FormulaPtr& f, Budget& b) {
    bool unknown = false;
    for (const auto& m : *shared) {
      auto v = m.recognize(f, b);
      if (v == ThreeValued::True) return ThreeValued::True;
      if (v == ThreeValued::Unknown) unknown = true;
    }
    return unknown ? ThreeValued::Unknown : ThreeValued::False;
  };
  return s;
}

// ---------------------------------------------------------------------------
// entails: semidecision of Sigma |= phi by dovetailing axiom enumeration
// with validity search (one axiom fetch per kProverTicksPerFetch proof
// ticks, realized in doubling rounds). On success the support is a subset
// of the sentences enumerated within budget and the proof establishes the
// implication chain support_1 -> ... -> support_n -> phi.
// ---------------------------------------------------------------------------

struct EntailsResult {
  bool yes = false;
  Proof proof;
  std::vector<FormulaPtr> support;
  std::uint64_t ticks = 0;
};

constexpr std::uint64_t kProverTicksPerFetch = 64;

namespace detail {

inline std::uint64_t shl_clamped(std::uint64_t base, std::uint64_t r) {
  return base << (r > 20 ? 20 : r);
}

}  // namespace detail

inline EntailsResult entails_budget(const AxiomSet& sigma, const FormulaPtr& phi,
                                    Budget& budget) {
  EntailsResult out;
  auto cursor = sigma.open();

  PatternTable table;
  std::vector<FormulaPtr> prefix;
  std::vector<FOFPtr> roots_nnf;

  auto goal = canonical_goal(phi, table);
  auto goal_root = nnf(FOF::neg(goal));

  try {
    for (std::uint64_t round = 0;; ++round) {
      // fetch axioms up to the round's prefix target
      std::uint64_t target = detail::shl_clamped(1, round);
      {
        CapScope fetch_slice(budget, 4 * target);
        while (!cursor->finished() && !budget.capped() &&
               prefix.size() < target) {
          auto f = cursor->next(budget);
          if (!f) continue;  // unproductive attempt; capped() ends the slice
          prefix.push_back(*f);
          roots_nnf.push_back(nnf(translate(*f, table)));
        }
      }
      if (!budget.ok()) throw BudgetExhausted{};

      // seeded refutation over the current prefix
      std::vector<std::pair<FOFPtr, int>> roots;
      roots.emplace_back(goal_root, -1);
      for (std::size_t i = 0; i < roots_nnf.size(); ++i)
        roots.emplace_back(roots_nnf[i], static_cast<int>(i));
      RefutationResult r;
      {
        CapScope prove_slice(budget, kProverTicksPerFetch * target);
        r = refute(roots, budget);
      }
      if (r.hard_out) throw BudgetExhausted{};
      if (r.status == tableau::Status::Closed) {
        std::vector<FormulaPtr> support;
        for (int i : r.used_origins)
          if (i >= 0) support.push_back(prefix[static_cast<std::size_t>(i)]);
        // rebuild a clean, checkable chain proof over the minimized support
        auto pr = prove_chain(support, phi, budget);
        if (!pr.proved) {
          pr = prove_chain(prefix, phi, budget);
          support = prefix;
        }
        if (pr.proved) {
          out.yes = true;
          out.proof = std::move(pr.proof);
          out.support = std::move(support);
          out.ticks = budget.used;
          return out;
        }
        throw BudgetExhausted{};  // closed but could not rebuild in budget
      }
      if (r.status == tableau::Status::Open && cursor->finished()) {
        break;  // saturated against the complete finite axiom set
      }
    }
  } catch (const BudgetExhausted&) {
  }
  out.ticks = budget.used;
  return out;
}

inline EntailsResult entails(const AxiomSet& sigma, const FormulaPtr& phi,
                             std::uint64_t budget_limit) {
  Budget b(budget_limit);
  return entails_budget(sigma, phi, b);
}

// ---------------------------------------------------------------------------
// enumerate_theorems: a finite, monotone, fair slice of {phi : Sigma |= phi},
// restricted to sentences. Deterministic in (identity, budget); every
// consequence appears once the budget is large enough.
// ---------------------------------------------------------------------------

inline std::vector<FormulaPtr> enumerate_theorems(const AxiomSet& sigma,
                                                  std::uint64_t budget_limit) {
  Budget budget(budget_limit);
  auto cursor = sigma.open();

  PatternTable table;
  std::vector<FormulaPtr> prefix;
  std::vector<FOFPtr> roots_nnf;
  FormulaStream candidates(FormulaStream::Filter::Sentences);
  std::vector<FormulaPtr> found;
  std::vector<bool> proved;

  try {
    for (std::uint64_t round = 0;; ++round) {
      std::uint64_t target = detail::shl_clamped(1, round);
      {
        CapScope fetch_slice(budget, 4 * target);
        while (!cursor->finished() && !budget.capped() &&
               prefix.size() < target) {
          auto f = cursor->next(budget);
          if (!f) continue;
          prefix.push_back(*f);
          roots_nnf.push_back(nnf(translate(*f, table)));
        }
      }
      if (!budget.ok()) throw BudgetExhausted{};

      std::size_t cand_count = static_cast<std::size_t>(round) + 1;
      if (proved.size() < cand_count) proved.resize(cand_count, false);
      for (std::size_t i = 0; i < cand_count; ++i) {
        if (proved[i]) continue;
        if (!budget.tick()) throw BudgetExhausted{};
        auto phi = candidates.at(i);
        std::vector<std::pair<FOFPtr, int>> roots;
        PatternTable local = table;  // keep the shared table's id order clean
        auto goal = canonical_goal(phi, local);
        roots.emplace_back(nnf(FOF::neg(goal)), -1);
        for (std::size_t k = 0; k < roots_nnf.size(); ++k)
          roots.emplace_back(roots_nnf[k], static_cast<int>(k));
        RefutationResult r;
        {
          CapScope slice(budget, target);
          r = refute(roots, budget);
        }
        if (r.hard_out) throw BudgetExhausted{};
        if (r.status == tableau::Status::Closed) {
          proved[i] = true;
          found.push_back(phi);
        }
      }
    }
  } catch (const BudgetExhausted&) {
  }
  return found;
}

}  // namespace rk
