#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rk/cc.hpp"
#include "rk/coding.hpp"
#include "rk/parse.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Proof objects.
//
// A proof is a numbered list of steps; each step claims that its sequent (a
// set of first-order formulas in negation normal form) is unsatisfiable,
// except for the two bridge steps at the end:
//
//   conflict   leaf: the literals of the sequent have a congruence conflict
//   clash      leaf: the sequent contains F and nnf(~F)
//   alpha      from |Gamma \ {A&B}| u {A,B}       infer Gamma (A&B in Gamma)
//   beta       from the two disjunct variants     infer Gamma (A|B in Gamma)
//   gamma      from Gamma u {A(x|t)}              infer Gamma (forall x A in Gamma)
//   delta      from |Gamma \ {exists x A}| u {A(x|@k)}, @k fresh, infer Gamma
//   valid      from step refuting {nnf(~g)}       infer the FO formula g
//   conclude   from the valid step of g           infer the modal conclusion,
//              where g must be the translated universal closure of the
//              support-implication chain ending in the conclusion
//
// Every step is checkable locally: rule checks are set inclusions between
// stored sequents plus deterministic recomputation (nnf, substitution,
// translation, congruence closure). check_proof is independent of how the
// proof was produced.
// ---------------------------------------------------------------------------

struct ProofStep {
  std::string rule;  // conflict | clash | alpha | beta | gamma | delta | valid | conclude
  std::vector<std::size_t> premises;
  std::vector<FOFPtr> sequent;  // canonically sorted, deduplicated
  FOFPtr principal;             // alpha/beta/gamma/delta
  FOTermPtr term;               // gamma instantiation term, delta constant
  FOFPtr fo_goal;               // valid
};

struct Proof {
  FormulaPtr conclusion;             // the modal formula established valid
  std::vector<FormulaPtr> support;   // entailment support (empty for validity)
  std::vector<PatternAtom> table;    // pattern predicate table, by id
  std::vector<ProofStep> steps;
};

// The implication chain sigma_1 -> ... -> sigma_n -> phi.
inline FormulaPtr implication_chain(const std::vector<FormulaPtr>& support,
                                    const FormulaPtr& phi) {
  FormulaPtr out = phi;
  for (auto it = support.rbegin(); it != support.rend(); ++it)
    out = Formula::imp(*it, out);
  return out;
}

// The canonical first-order goal of a modal formula: translate its universal
// closure against a fresh table (ids in first-encounter order).
inline FOFPtr canonical_goal(const FormulaPtr& phi, PatternTable& table) {
  return translate(universal_closure(phi), table);
}

inline std::vector<FOFPtr> canonical_sequent(std::vector<FOFPtr> fs) {
  std::sort(fs.begin(), fs.end(), [](const FOFPtr& a, const FOFPtr& b) {
    return print(a) < print(b);
  });
  fs.erase(std::unique(fs.begin(), fs.end(),
                       [](const FOFPtr& a, const FOFPtr& b) { return fof_eq(a, b); }),
           fs.end());
  return fs;
}

namespace detail {

inline bool sequent_contains(const std::vector<FOFPtr>& seq, const FOFPtr& f) {
  for (const auto& g : seq)
    if (fof_eq(f, g)) return true;
  return false;
}

// premise subseteq base u added. Each rule's base sequent entails every
// premise element (splitting on the beta principal), so unsatisfiability of
// the premises propagates to the base sequent.
inline bool sequent_within(const std::vector<FOFPtr>& premise,
                           const std::vector<FOFPtr>& base,
                           const std::vector<FOFPtr>& added) {
  for (const auto& f : premise) {
    if (sequent_contains(added, f)) continue;
    if (!sequent_contains(base, f)) return false;
  }
  return true;
}

inline bool foterm_ground(const FOTermPtr& t) {
  switch (t->kind) {
    case FOTerm::Kind::Var: return false;
    case FOTerm::Kind::Num:
    case FOTerm::Kind::Sko: return true;
    case FOTerm::Kind::Succ: return foterm_ground(t->a);
    case FOTerm::Kind::Sum:
    case FOTerm::Kind::Prod:
      return foterm_ground(t->a) && foterm_ground(t->b);
  }
  return false;
}

inline bool term_occurs_fof(const FOFPtr& f, const FOTermPtr& t);

inline bool term_occurs_foterm(const FOTermPtr& hay, const FOTermPtr& t) {
  if (foterm_eq(hay, t)) return true;
  switch (hay->kind) {
    case FOTerm::Kind::Succ: return term_occurs_foterm(hay->a, t);
    case FOTerm::Kind::Sum:
    case FOTerm::Kind::Prod:
      return term_occurs_foterm(hay->a, t) || term_occurs_foterm(hay->b, t);
    default: return false;
  }
}

inline bool term_occurs_fof(const FOFPtr& f, const FOTermPtr& t) {
  switch (f->kind) {
    case FOF::Kind::Eq:
      return term_occurs_foterm(f->t1, t) || term_occurs_foterm(f->t2, t);
    case FOF::Kind::Atom: {
      for (const auto& a : f->args)
        if (term_occurs_foterm(a, t)) return true;
      return false;
    }
    case FOF::Kind::Not: return term_occurs_fof(f->f1, t);
    case FOF::Kind::Imp:
    case FOF::Kind::And:
    case FOF::Kind::Or:
    case FOF::Kind::Iff:
      return term_occurs_fof(f->f1, t) || term_occurs_fof(f->f2, t);
    case FOF::Kind::All:
    case FOF::Kind::Ex:
      return term_occurs_fof(f->f1, t);
  }
  return false;
}

}  // namespace detail

struct CheckReport {
  bool ok = true;
  std::size_t bad_step = 0;
  std::string reason;
};

inline CheckReport check_proof_report(const Proof& p, const FormulaPtr& phi) {
  auto bad = [](std::size_t i, const std::string& r) {
    return CheckReport{false, i, r};
  };
  if (!formula_eq(p.conclusion, phi))
    return bad(0, "conclusion differs from the queried formula");
  if (p.steps.empty()) return bad(0, "empty proof");

  auto premise_of = [&](const ProofStep& s, std::size_t idx,
                        std::size_t which) -> const ProofStep* {
    if (which >= s.premises.size()) return nullptr;
    std::size_t j = s.premises[which];
    if (j >= idx) return nullptr;  // premises must precede the step
    return &p.steps[j];
  };

  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const ProofStep& s = p.steps[i];
    for (auto j : s.premises)
      if (j >= i) return bad(i, "forward premise reference");

    if (s.rule == "conflict") {
      std::vector<FOFPtr> lits;
      for (const auto& f : s.sequent)
        if (Congruence::is_literal(f)) lits.push_back(f);
      if (!literals_conflict(lits))
        return bad(i, "conflict leaf without congruence conflict");
    } else if (s.rule == "clash") {
      bool found = false;
      for (const auto& f : s.sequent) {
        auto comp = nnf(FOF::neg(f));
        if (detail::sequent_contains(s.sequent, comp)) {
          found = true;
          break;
        }
      }
      if (!found) return bad(i, "clash leaf without complementary pair");
    } else if (s.rule == "alpha") {
      const ProofStep* pr = premise_of(s, i, 0);
      if (!pr || !s.principal || s.principal->kind != FOF::Kind::And)
        return bad(i, "malformed alpha");
      if (!detail::sequent_contains(s.sequent, s.principal))
        return bad(i, "alpha principal not in sequent");
      if (!detail::sequent_within(pr->sequent, s.sequent,
                                  {s.principal->f1, s.principal->f2}))
        return bad(i, "alpha premise sequent mismatch");
    } else if (s.rule == "beta") {
      const ProofStep* l = premise_of(s, i, 0);
      const ProofStep* r = premise_of(s, i, 1);
      if (!l || !r || !s.principal || s.principal->kind != FOF::Kind::Or)
        return bad(i, "malformed beta");
      if (!detail::sequent_contains(s.sequent, s.principal))
        return bad(i, "beta principal not in sequent");
      if (!detail::sequent_within(l->sequent, s.sequent, {s.principal->f1}) ||
          !detail::sequent_within(r->sequent, s.sequent, {s.principal->f2}))
        return bad(i, "beta premise sequent mismatch");
    } else if (s.rule == "gamma") {
      const ProofStep* pr = premise_of(s, i, 0);
      if (!pr || !s.principal || s.principal->kind != FOF::Kind::All || !s.term)
        return bad(i, "malformed gamma");
      if (!detail::sequent_contains(s.sequent, s.principal))
        return bad(i, "gamma principal not in sequent");
      if (!detail::foterm_ground(s.term))
        return bad(i, "gamma instantiation term is not ground");
      auto inst = fo_subst(s.principal->f1, s.principal->var, s.term);
      if (!detail::sequent_within(pr->sequent, s.sequent, {inst}))
        return bad(i, "gamma premise sequent mismatch");
    } else if (s.rule == "delta") {
      const ProofStep* pr = premise_of(s, i, 0);
      if (!pr || !s.principal || s.principal->kind != FOF::Kind::Ex || !s.term ||
          s.term->kind != FOTerm::Kind::Sko)
        return bad(i, "malformed delta");
      if (!detail::sequent_contains(s.sequent, s.principal))
        return bad(i, "delta principal not in sequent");
      for (const auto& f : s.sequent)
        if (detail::term_occurs_fof(f, s.term))
          return bad(i, "delta eigenconstant occurs in sequent");
      auto inst = fo_subst(s.principal->f1, s.principal->var, s.term);
      if (!detail::sequent_within(pr->sequent, s.sequent, {inst}))
        return bad(i, "delta premise sequent mismatch");
    } else if (s.rule == "valid") {
      const ProofStep* pr = premise_of(s, i, 0);
      if (!pr || !s.fo_goal) return bad(i, "malformed valid step");
      auto neg = nnf(FOF::neg(s.fo_goal));
      if (pr->sequent.size() != 1 || !fof_eq(pr->sequent[0], neg))
        return bad(i, "valid step premise is not the negated goal");
    } else if (s.rule == "conclude") {
      const ProofStep* pr = premise_of(s, i, 0);
      if (!pr || pr->rule != "valid" || !pr->fo_goal)
        return bad(i, "malformed conclude step");
      PatternTable table;
      auto goal = canonical_goal(p.conclusion, table);
      if (!fof_eq(goal, pr->fo_goal))
        return bad(i, "goal is not the translated conclusion");
      if (i + 1 != p.steps.size())
        return bad(i, "conclude must be the last step");
    } else {
      return bad(i, "unknown rule '" + s.rule + "'");
    }
  }
  if (p.steps.back().rule != "conclude")
    return bad(p.steps.size() - 1, "proof does not end in conclude");
  return {};
}

inline bool check_proof(const Proof& p, const FormulaPtr& phi) {
  return check_proof_report(p, phi).ok;
}

// ---------------------------------------------------------------------------
// Serialization. Line oriented, tab separated, versioned header:
//
//   rkproof 1 <coding-version>
//   conclusion TAB <formula>
//   support TAB <formula>             (one line each)
//   pattern TAB <id> TAB <skeleton>
//   step TAB <i> TAB <rule> TAB <premises> TAB <sequent> TAB <side>
//
// Sequent formulas are joined with " ;; ". Side data is the principal
// formula, for gamma/delta followed by " ||| " and the witness term. The
// valid step stores its first-order goal as side data.
// ---------------------------------------------------------------------------

class FOParser {
 public:
  explicit FOParser(std::string text) : text_(std::move(text)) {}

  FOFPtr parse_all() {
    auto f = parse_formula();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return f;
  }

  FOTermPtr parse_term_all() {
    auto t = parse_term();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return t;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& m) { throw ParseError(m, pos_); }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(const std::string& s) {
    skip_ws();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
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
    if (pos_ < text_.size() && (text_[pos_] == '$' || text_[pos_] == '#')) ++pos_;
    else if (pos_ >= text_.size() || !std::islower(static_cast<unsigned char>(text_[pos_])))
      fail("expected variable");
    else ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')
        ++pos_;
      else break;
    }
    return text_.substr(start, pos_ - start);
  }

  FOFPtr parse_formula() {
    auto lhs = parse_imp();
    if (eat("<->")) return FOF::iff(lhs, parse_formula());
    return lhs;
  }
  FOFPtr parse_imp() {
    auto lhs = parse_or();
    skip_ws();
    if (text_.compare(pos_, 2, "->") == 0) {
      pos_ += 2;
      return FOF::imp(lhs, parse_imp());
    }
    return lhs;
  }
  FOFPtr parse_or() {
    auto lhs = parse_and();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        lhs = FOF::disj(lhs, parse_and());
      } else return lhs;
    }
  }
  FOFPtr parse_and() {
    auto lhs = parse_prefix();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '&') {
        ++pos_;
        lhs = FOF::conj(lhs, parse_prefix());
      } else return lhs;
    }
  }
  FOFPtr parse_prefix() {
    skip_ws();
    if (eat("~")) return FOF::neg(parse_prefix());
    if (peek_word("forall")) {
      pos_ += 6;
      auto v = parse_var();
      return FOF::all(v, parse_prefix());
    }
    if (peek_word("exists")) {
      pos_ += 6;
      auto v = parse_var();
      return FOF::ex(v, parse_prefix());
    }
    return parse_atom();
  }
  FOFPtr parse_atom() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == 'P') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected predicate index");
      std::size_t pred = std::stoul(text_.substr(start, pos_ - start));
      if (!eat("(")) fail("expected '('");
      std::vector<FOTermPtr> args;
      skip_ws();
      if (!eat(")")) {
        while (true) {
          args.push_back(parse_term());
          if (eat(")")) break;
          if (!eat(",")) fail("expected ','");
        }
      }
      return FOF::atom(pred, std::move(args));
    }
    if (pos_ < text_.size() && text_[pos_] == '(') {
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
    return FOF::eq(lhs, rhs);
  }
  FOTermPtr parse_term() {
    auto lhs = parse_prodt();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '+') {
        ++pos_;
        lhs = FOTerm::sum(lhs, parse_prodt());
      } else return lhs;
    }
  }
  FOTermPtr parse_prodt() {
    auto lhs = parse_tatom();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        lhs = FOTerm::prod(lhs, parse_tatom());
      } else return lhs;
    }
  }
  FOTermPtr parse_tatom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected skolem index");
      return FOTerm::sko(std::stoul(text_.substr(start, pos_ - start)));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return FOTerm::num(nat_from_string(text_.substr(start, pos_ - start)));
    }
    if (c == 'S') {
      ++pos_;
      if (!eat("(")) fail("expected '('");
      auto t = parse_term();
      if (!eat(")")) fail("expected ')'");
      return FOTerm::succ(t);
    }
    if (c == '(') {
      ++pos_;
      auto t = parse_term();
      if (!eat(")")) fail("expected ')'");
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c)) || c == '$' || c == '#')
      return FOTerm::var(parse_var());
    fail(std::string("unknown symbol '") + c + "'");
  }
};

inline std::string fo_side_join(const ProofStep& s) {
  std::ostringstream os;
  if (s.rule == "alpha" || s.rule == "beta") {
    os << print(s.principal);
  } else if (s.rule == "gamma" || s.rule == "delta") {
    os << print(s.principal) << " ||| " << print(s.term);
  } else if (s.rule == "valid") {
    os << print(s.fo_goal);
  }
  return os.str();
}

inline void write_proof(std::ostream& os, const Proof& p) {
  os << "rkproof 1 " << kCodingVersion << "\n";
  os << "conclusion\t" << print(p.conclusion) << "\n";
  for (const auto& s : p.support) os << "support\t" << print(s) << "\n";
  for (std::size_t i = 0; i < p.table.size(); ++i)
    os << "pattern\t" << i << "\t" << print(p.table[i].skeleton) << "\n";
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& s = p.steps[i];
    os << "step\t" << i << "\t" << s.rule << "\t";
    for (std::size_t j = 0; j < s.premises.size(); ++j) {
      if (j) os << ",";
      os << s.premises[j];
    }
    os << "\t";
    for (std::size_t j = 0; j < s.sequent.size(); ++j) {
      if (j) os << " ;; ";
      print_fof(os, s.sequent[j], 0);
    }
    os << "\t" << fo_side_join(s) << "\n";
  }
}

inline std::vector<std::string> split_on(const std::string& s,
                                         const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

inline Proof read_proof(std::istream& is) {
  Proof p;
  std::string line;
  if (!std::getline(is, line) || line.rfind("rkproof 1 ", 0) != 0)
    throw CodecError("read_proof: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_on(line, "\t");
    const std::string& tag = fields[0];
    if (tag == "conclusion") {
      p.conclusion = parse(fields.at(1), true);
    } else if (tag == "support") {
      p.support.push_back(parse(fields.at(1), true));
    } else if (tag == "pattern") {
      auto skel = parse(fields.at(2), true);
      auto arity = free_vars(skel).size();
      p.table.push_back(PatternAtom{skel, arity});
    } else if (tag == "step") {
      ProofStep s;
      s.rule = fields.at(2);
      if (!fields.at(3).empty())
        for (const auto& t : split_on(fields.at(3), ","))
          s.premises.push_back(std::stoul(t));
      if (!fields.at(4).empty())
        for (const auto& t : split_on(fields.at(4), " ;; "))
          s.sequent.push_back(FOParser(t).parse_all());
      const std::string& side = fields.at(5);
      if (s.rule == "alpha" || s.rule == "beta") {
        s.principal = FOParser(side).parse_all();
      } else if (s.rule == "gamma" || s.rule == "delta") {
        auto parts = split_on(side, " ||| ");
        s.principal = FOParser(parts.at(0)).parse_all();
        s.term = FOParser(parts.at(1)).parse_term_all();
      } else if (s.rule == "valid") {
        s.fo_goal = FOParser(side).parse_all();
      }
      p.steps.push_back(std::move(s));
    }
  }
  return p;
}

}  // namespace rk
