#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rk/syntax.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Structural enumeration of terms and formulas, graded by weight.
//
// Weights: numeral k has weight 1+k; the i-th pool variable has weight 1+i;
// every constructor adds 1 plus the weights of its pieces (binder variables
// count like variable occurrences). Every formula appears at exactly one
// weight, so enumerating weights 1, 2, ... in the fixed constructor order
// below visits every formula exactly once. Enumerators are deterministic and
// cache what they have produced.
// ---------------------------------------------------------------------------

inline std::string pool_var(std::size_t i) {
  static const char* base[3] = {"x", "y", "z"};
  if (i < 3) return base[i];
  return std::string(base[i % 3]) + std::to_string(i / 3);
}

class TermEnumerator {
 public:
  const std::vector<TermPtr>& of_weight(std::size_t w) {
    while (by_weight_.size() <= w) grow();
    return by_weight_[w];
  }

 private:
  std::vector<std::vector<TermPtr>> by_weight_{{}};  // weight 0 is empty

  void grow() {
    std::size_t w = by_weight_.size();
    std::vector<TermPtr> out;
    // numeral w-1
    out.push_back(Term::num(Nat(static_cast<unsigned long>(w - 1))));
    // variable with weight w
    out.push_back(Term::var(pool_var(w - 1)));
    // S(t)
    if (w >= 2)
      for (const auto& t : by_weight_[w - 1])
        if (t->kind != Term::Kind::Num)  // S(numeral) normalizes: skip dup
          out.push_back(Term::succ(t));
    // sums then products
    for (int kind = 0; kind < 2; ++kind)
      for (std::size_t wa = 1; wa + 1 < w; ++wa)
        for (const auto& a : by_weight_[wa])
          for (const auto& b : by_weight_[w - 1 - wa])
            out.push_back(kind == 0 ? Term::sum(a, b) : Term::prod(a, b));
    by_weight_.push_back(std::move(out));
  }
};

class FormulaEnumerator {
 public:
  const std::vector<FormulaPtr>& of_weight(std::size_t w) {
    while (by_weight_.size() <= w) grow();
    return by_weight_[w];
  }

  // i-th formula overall (0-based), in weight-then-position order.
  FormulaPtr at(std::size_t i) {
    std::size_t w = 1;
    while (true) {
      const auto& fs = of_weight(w);
      if (i < fs.size()) return fs[i];
      i -= fs.size();
      ++w;
    }
  }

 private:
  TermEnumerator terms_;
  std::vector<std::vector<FormulaPtr>> by_weight_{{}};

  void grow() {
    std::size_t w = by_weight_.size();
    std::vector<FormulaPtr> out;
    // equalities
    for (std::size_t wa = 1; wa + 1 < w; ++wa)
      for (const auto& a : terms_.of_weight(wa))
        for (const auto& b : terms_.of_weight(w - 1 - wa))
          out.push_back(Formula::eq(a, b));
    // negation, knowledge
    if (w >= 2) {
      for (const auto& f : by_weight_[w - 1]) out.push_back(Formula::neg(f));
      for (const auto& f : by_weight_[w - 1]) out.push_back(Formula::know(f));
    }
    // binary connectives
    for (std::size_t wa = 1; wa + 1 < w; ++wa)
      for (const auto& a : by_weight_[wa])
        for (const auto& b : by_weight_[w - 1 - wa]) {
          out.push_back(Formula::imp(a, b));
          out.push_back(Formula::conj(a, b));
          out.push_back(Formula::disj(a, b));
          out.push_back(Formula::iff(a, b));
        }
    // quantifiers: weight = 1 + (1 + var index) + body weight
    for (std::size_t vi = 0; vi + 3 <= w; ++vi) {
      std::size_t wb = w - 2 - vi;
      for (const auto& f : by_weight_[wb]) {
        out.push_back(Formula::all(pool_var(vi), f));
        out.push_back(Formula::ex(pool_var(vi), f));
      }
    }
    by_weight_.push_back(std::move(out));
  }
};

// Stream views used by schema enumerators: all formulas, sentences only, or
// formulas whose free variables are within {x}.
class FormulaStream {
 public:
  enum class Filter { All, Sentences, FreeAtMostX };

  explicit FormulaStream(Filter filter) : filter_(filter) {}

  FormulaPtr at(std::size_t i) {
    while (cache_.size() <= i) advance();
    return cache_[i];
  }

 private:
  Filter filter_;
  FormulaEnumerator en_;
  std::vector<FormulaPtr> cache_;
  std::size_t next_raw_ = 0;

  bool keep(const FormulaPtr& f) const {
    switch (filter_) {
      case Filter::All: return true;
      case Filter::Sentences: return free_vars(f).empty();
      case Filter::FreeAtMostX: {
        auto fv = free_vars(f);
        return fv.empty() || (fv.size() == 1 && fv[0] == "x");
      }
    }
    return true;
  }

  void advance() {
    while (true) {
      auto f = en_.at(next_raw_++);
      if (keep(f)) {
        cache_.push_back(f);
        return;
      }
    }
  }
};

// Enumeration of finite-support assignments: index i decodes as the list of
// values for pool variables 0..k-1 (default 0 beyond), so every restriction
// of an assignment to finitely many variables is hit.
inline Assignment nth_assignment(const Nat& i) {
  std::map<std::string, Nat> b;
  auto values = list_decode(i);
  for (std::size_t k = 0; k < values.size(); ++k) b[pool_var(k)] = values[k];
  return Assignment(std::move(b));
}

}  // namespace rk
