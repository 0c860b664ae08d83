#pragma once

#include <string>
#include <vector>

#include "rk/formula.hpp"
#include "rk/pattern.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Godel coding, version "rk-coding-1".
//
// A formula code is <tree, names> where names is the coded list of variable
// names in first-use order (binders count as uses) and tree is built from
// the constructor table below with node code = <tag, payload>:
//
//   tag  constructor            payload
//    0   variable               name index
//    1   numeral                value        (0 is numeral 0)
//    2   successor              child
//    3   sum                    <left, right>
//    4   product                <left, right>
//    5   equality               <left, right>
//    6   negation               child
//    7   implication            <left, right>
//    8   conjunction            <left, right>
//    9   disjunction            <left, right>
//   10   biconditional          <left, right>
//   11   universal              <var index, body>
//   12   existential            <var index, body>
//   13   knowledge              child
//
// <.,.> is the Cantor pairing from nat.hpp and names use the base-40
// identifier coding. encode is injective and decode(encode(phi)) == phi.
// ---------------------------------------------------------------------------

inline const char* kCodingVersion = "rk-coding-1";

namespace detail {

struct NameIndexer {
  std::vector<std::string> names;

  Nat index_of(const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return Nat(i);
    names.push_back(name);
    return Nat(names.size() - 1);
  }
};

inline Nat encode_term_node(const TermPtr& t, NameIndexer& ni) {
  switch (t->kind) {
    case Term::Kind::Var: return pair_nat(0, ni.index_of(t->name));
    case Term::Kind::Num: return pair_nat(1, t->value);
    case Term::Kind::Succ: return pair_nat(2, encode_term_node(t->a, ni));
    case Term::Kind::Sum:
      return pair_nat(3, pair_nat(encode_term_node(t->a, ni),
                                  encode_term_node(t->b, ni)));
    case Term::Kind::Prod:
      return pair_nat(4, pair_nat(encode_term_node(t->a, ni),
                                  encode_term_node(t->b, ni)));
  }
  throw CodecError("encode_term_node: bad kind");
}

inline Nat encode_formula_node(const FormulaPtr& f, NameIndexer& ni) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return pair_nat(5, pair_nat(encode_term_node(f->t1, ni),
                                  encode_term_node(f->t2, ni)));
    case Formula::Kind::Not:
      return pair_nat(6, encode_formula_node(f->f1, ni));
    case Formula::Kind::Imp:
      return pair_nat(7, pair_nat(encode_formula_node(f->f1, ni),
                                  encode_formula_node(f->f2, ni)));
    case Formula::Kind::And:
      return pair_nat(8, pair_nat(encode_formula_node(f->f1, ni),
                                  encode_formula_node(f->f2, ni)));
    case Formula::Kind::Or:
      return pair_nat(9, pair_nat(encode_formula_node(f->f1, ni),
                                  encode_formula_node(f->f2, ni)));
    case Formula::Kind::Iff:
      return pair_nat(10, pair_nat(encode_formula_node(f->f1, ni),
                                   encode_formula_node(f->f2, ni)));
    case Formula::Kind::All:
      return pair_nat(11, pair_nat(ni.index_of(f->var),
                                   encode_formula_node(f->f1, ni)));
    case Formula::Kind::Ex:
      return pair_nat(12, pair_nat(ni.index_of(f->var),
                                   encode_formula_node(f->f1, ni)));
    case Formula::Kind::Know:
      return pair_nat(13, encode_formula_node(f->f1, ni));
  }
  throw CodecError("encode_formula_node: bad kind");
}

inline std::string name_at(const std::vector<std::string>& names,
                           const Nat& idx) {
  if (idx >= names.size()) throw CodecError("decode: name index out of range");
  return names[static_cast<std::size_t>(idx)];
}

inline TermPtr decode_term_node(const Nat& code,
                                const std::vector<std::string>& names,
                                int depth_left);

inline FormulaPtr decode_formula_node(const Nat& code,
                                      const std::vector<std::string>& names,
                                      int depth_left) {
  if (depth_left <= 0) throw CodecError("decode: nesting too deep");
  auto [tag, payload] = unpair_nat(code);
  switch (static_cast<unsigned>(tag > 13 ? 14 : tag)) {
    case 5: {
      auto [a, b] = unpair_nat(payload);
      return Formula::eq(decode_term_node(a, names, depth_left - 1),
                         decode_term_node(b, names, depth_left - 1));
    }
    case 6:
      return Formula::neg(decode_formula_node(payload, names, depth_left - 1));
    case 7: {
      auto [a, b] = unpair_nat(payload);
      return Formula::imp(decode_formula_node(a, names, depth_left - 1),
                          decode_formula_node(b, names, depth_left - 1));
    }
    case 8: {
      auto [a, b] = unpair_nat(payload);
      return Formula::conj(decode_formula_node(a, names, depth_left - 1),
                           decode_formula_node(b, names, depth_left - 1));
    }
    case 9: {
      auto [a, b] = unpair_nat(payload);
      return Formula::disj(decode_formula_node(a, names, depth_left - 1),
                           decode_formula_node(b, names, depth_left - 1));
    }
    case 10: {
      auto [a, b] = unpair_nat(payload);
      return Formula::iff(decode_formula_node(a, names, depth_left - 1),
                          decode_formula_node(b, names, depth_left - 1));
    }
    case 11: {
      auto [v, body] = unpair_nat(payload);
      return Formula::all(name_at(names, v),
                          decode_formula_node(body, names, depth_left - 1));
    }
    case 12: {
      auto [v, body] = unpair_nat(payload);
      return Formula::ex(name_at(names, v),
                         decode_formula_node(body, names, depth_left - 1));
    }
    case 13:
      return Formula::know(decode_formula_node(payload, names, depth_left - 1));
    default:
      throw CodecError("decode: not a formula tag");
  }
}

inline TermPtr decode_term_node(const Nat& code,
                                const std::vector<std::string>& names,
                                int depth_left) {
  if (depth_left <= 0) throw CodecError("decode: nesting too deep");
  auto [tag, payload] = unpair_nat(code);
  switch (static_cast<unsigned>(tag > 13 ? 14 : tag)) {
    case 0: return Term::var(name_at(names, payload));
    case 1: return Term::num(payload);
    case 2: return Term::succ(decode_term_node(payload, names, depth_left - 1));
    case 3: {
      auto [a, b] = unpair_nat(payload);
      return Term::sum(decode_term_node(a, names, depth_left - 1),
                       decode_term_node(b, names, depth_left - 1));
    }
    case 4: {
      auto [a, b] = unpair_nat(payload);
      return Term::prod(decode_term_node(a, names, depth_left - 1),
                        decode_term_node(b, names, depth_left - 1));
    }
    default:
      throw CodecError("decode: not a term tag");
  }
}

}  // namespace detail

struct GodelCode {
  Nat value;
};

inline GodelCode encode(const FormulaPtr& f) {
  detail::NameIndexer ni;
  Nat tree = detail::encode_formula_node(f, ni);
  std::vector<Nat> name_codes;
  name_codes.reserve(ni.names.size());
  for (const auto& n : ni.names) name_codes.push_back(encode_ident(n));
  return GodelCode{pair_nat(tree, list_encode(name_codes))};
}

inline FormulaPtr decode(const GodelCode& code) {
  auto [tree, names_code] = unpair_nat(code.value);
  std::vector<std::string> names;
  for (const auto& nc : list_decode(names_code)) {
    if (nc == 0) throw CodecError("decode: empty name");
    names.push_back(decode_ident(nc));
  }
  // Nesting depth is bounded by the bit length of the tree code, since each
  // pairing level at least doubles it. 4096 covers everything decodable.
  return detail::decode_formula_node(tree, names, 4096);
}

inline Nat encode_value(const FormulaPtr& f) { return encode(f).value; }

// Canonical numeric identity of a pattern atom: the code of its skeleton.
inline Nat pattern_code(const PatternAtom& atom) {
  return encode_value(atom.skeleton);
}

}  // namespace rk
