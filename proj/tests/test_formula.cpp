#include <catch2/catch_amalgamated.hpp>

#include "rk/coding.hpp"
#include "rk/enumerate.hpp"
#include "rk/parse.hpp"
#include "rk/pattern.hpp"
#include "rk/syntax.hpp"

using namespace rk;

namespace {

FormulaPtr P(const std::string& s) { return parse(s); }

// Seeded random formula generator used by round-trip property tests.
struct Gen {
  std::uint64_t state;
  explicit Gen(std::uint64_t seed) : state(mix64(seed ^ 0xabcdef)) {}
  std::uint64_t next() { return state = mix64(state); }
  std::uint64_t next(std::uint64_t n) { return next() % n; }

  TermPtr term(int depth) {
    switch (depth <= 0 ? next(2) : next(5)) {
      case 0: return Term::var(pool_var(next(4)));
      case 1: return Term::num(Nat(static_cast<unsigned long>(next(20))));
      case 2: return Term::succ(term(depth - 1));
      case 3: return Term::sum(term(depth - 1), term(depth - 1));
      default: return Term::prod(term(depth - 1), term(depth - 1));
    }
  }

  FormulaPtr formula(int depth) {
    switch (depth <= 0 ? 0 : next(9)) {
      case 0: return Formula::eq(term(depth), term(depth));
      case 1: return Formula::neg(formula(depth - 1));
      case 2: return Formula::imp(formula(depth - 1), formula(depth - 1));
      case 3: return Formula::conj(formula(depth - 1), formula(depth - 1));
      case 4: return Formula::disj(formula(depth - 1), formula(depth - 1));
      case 5: return Formula::iff(formula(depth - 1), formula(depth - 1));
      case 6: return Formula::all(pool_var(next(4)), formula(depth - 1));
      case 7: return Formula::ex(pool_var(next(4)), formula(depth - 1));
      default: return Formula::know(formula(depth - 1));
    }
  }
};

}  // namespace

TEST_CASE("pairing matches the diagonal enumeration") {
  // Independent oracle: walk the diagonals and count.
  std::vector<std::pair<Nat, Nat>> order;
  for (int d = 0; d <= 12; ++d)
    for (int b = 0; b <= d; ++b)
      order.emplace_back(Nat(d - b), Nat(b));
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(pair_nat(order[i].first, order[i].second) == Nat(i));
    auto [a, b] = unpair_nat(Nat(i));
    CHECK(a == order[i].first);
    CHECK(b == order[i].second);
  }
  CHECK(pair_nat(0, 0) == 0);
  CHECK(pair_nat(1, 2) == 8);
  CHECK(pair_nat(2, 1) == 7);
}

TEST_CASE("parsing the documented grammar") {
  auto f = P("x = y");
  REQUIRE(f->kind == Formula::Kind::Eq);
  CHECK(f->t1->name == "x");
  CHECK(f->t2->name == "y");

  auto g = P("K(forall y (y = x))");
  REQUIRE(g->kind == Formula::Kind::Know);
  REQUIRE(g->f1->kind == Formula::Kind::All);
  CHECK(g->f1->var == "y");

  auto h = P("S(S(0)) = 0");
  REQUIRE(h->kind == Formula::Kind::Eq);
  CHECK(h->t1->kind == Term::Kind::Num);
  CHECK(h->t1->value == 2);
  CHECK(h->t2->value == 0);

  // decimal sugar
  auto d = P("25 = S(24)");
  CHECK(term_eq(d->t1, d->t2));

  CHECK_THROWS_AS(P("x = "), ParseError);
  CHECK_THROWS_AS(P("x ? y"), ParseError);
  CHECK_THROWS_AS(P("$1 = 0"), ParseError);  // reserved name in user input
}

TEST_CASE("print/parse round trip") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Gen g(seed);
    auto f = g.formula(4);
    auto printed = print(f);
    auto back = parse(printed);
    INFO(printed);
    CHECK(formula_eq(f, back));
  }
}

TEST_CASE("free variables") {
  CHECK(free_vars(P("x = y")) == std::vector<std::string>{"x", "y"});
  CHECK(free_vars(P("forall x x = y")) == std::vector<std::string>{"y"});
  CHECK(free_vars(P("K(forall x x = y)")) == std::vector<std::string>{"y"});
  CHECK(is_sentence(P("forall x x = x")));
}

TEST_CASE("substitution") {
  auto f = subst(P("x = y"), "x", parse_term("S(0)"));
  CHECK(print(f) == "S(0)=y");

  auto g = P("forall y x = y & K(x = z)");
  CHECK(formula_eq(subst(g, "q", parse_term("0")), g));
  CHECK(formula_eq(subst(g, "x", Term::var("x")), g));

  CHECK_THROWS_AS(subst(P("forall y x = y"), "x", Term::var("y")),
                  CaptureError);
  // FV of result
  auto h = subst(P("x = y"), "x", parse_term("z + w0"));
  CHECK(free_vars(h) == std::vector<std::string>{"z", "w0", "y"});
}

TEST_CASE("grounding") {
  Assignment s(std::map<std::string, Nat>{{"x", Nat(0)}, {"y", Nat(2)}});
  auto f = ground(P("x = y"), s);
  CHECK(print(f) == "0=S(S(0))");
  CHECK(is_sentence(f));

  // sentences are fixed by grounding
  auto sent = P("forall x x = x");
  CHECK(formula_eq(ground(sent, s), sent));

  // K is transparent for grounding
  Assignment s1(std::map<std::string, Nat>{{"x", Nat(1)}});
  CHECK(print(ground(P("K(x = 0)"), s1)) == "K(S(0)=0)");

  // only FV matter
  Assignment s2(std::map<std::string, Nat>{{"x", Nat(0)}, {"y", Nat(2)}, {"q", Nat(9)}});
  CHECK(formula_eq(ground(P("x = y"), s), ground(P("x = y"), s2)));
}

TEST_CASE("alphabetic variants") {
  CHECK(variant_eq(P("forall y y = x"), P("forall z z = x")));
  CHECK_FALSE(variant_eq(P("forall y y = x"), P("forall z z = y")));
  CHECK_FALSE(variant_eq(P("K(forall y y = x)"), P("K(forall x x = x)")));
  // respects binding through shadowing
  CHECK_FALSE(variant_eq(P("forall x forall y x = 0"), P("forall y forall y y = 0")));
  CHECK(variant_eq(P("forall x forall y x = y"), P("forall y forall x y = x")));
  // reflexive / symmetric spot checks
  auto f = P("exists u forall v u = v -> K(u = w0)");
  CHECK(variant_eq(f, f));
}

TEST_CASE("pattern canonicalization") {
  auto [p1, a1] = pattern(P("K(x = y)"));
  CHECK(p1.arity == 2);
  CHECK(a1 == std::vector<std::string>{"x", "y"});

  auto [p2, a2] = pattern(P("K(x = x)"));
  CHECK(pattern_eq(p1, p2));
  CHECK(a2 == std::vector<std::string>{"x", "x"});

  auto [p3, a3] = pattern(P("K(S(0) = S(0))"));
  CHECK(p3.arity == 0);
  CHECK_FALSE(pattern_eq(p1, p3));

  // alphabetic variance inside K
  auto [p4, a4] = pattern(P("K(forall u u = x)"));
  auto [p5, a5] = pattern(P("K(forall v v = y)"));
  CHECK(pattern_eq(p4, p5));
  CHECK(a4 == std::vector<std::string>{"x"});
  CHECK(a5 == std::vector<std::string>{"y"});

  // bound variables are not slots
  auto [p6, a6] = pattern(P("K(forall u u = u)"));
  CHECK(p6.arity == 0);

  CHECK_THROWS_AS(pattern(P("x = y")), PreconditionError);
}

TEST_CASE("pattern equality is preserved by weak substitution and variance") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Gen g(seed ^ 0x5eed);
    auto body = g.formula(3);
    auto kappa = Formula::know(body);
    auto fv = free_vars(kappa);
    if (fv.empty()) continue;
    auto x = fv[g.next(fv.size())];
    auto y = pool_var(g.next(5));
    if (!substitutable(kappa, x, Term::var(y))) continue;
    auto kappa2 = subst(kappa, x, Term::var(y));
    auto [pa, argsa] = pattern(kappa);
    auto [pb, argsb] = pattern(kappa2);
    INFO(print(kappa) << "  (" << x << "|" << y << ")  " << print(kappa2));
    CHECK(pattern_eq(pa, pb));
    // args of the substituted formula are args with x renamed to y
    std::vector<std::string> expect;
    for (auto& v : argsa) expect.push_back(v == x ? y : v);
    CHECK(argsb == expect);
  }
}

TEST_CASE("variant formulas have identical patterns") {
  auto [pa, aa] = pattern(P("K(forall x exists y x = y + z)"));
  auto [pb, ab] = pattern(P("K(forall q exists r q = r + z)"));
  CHECK(pattern_eq(pa, pb));
  CHECK(aa == ab);
}

TEST_CASE("godel coding round trip") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Gen g(seed ^ 0xc0de);
    auto f = g.formula(3);
    auto c = encode(f);
    auto back = decode(c);
    INFO(print(f));
    CHECK(formula_eq(f, back));
  }
  // hand-computed table entries: zero is numeral 0, node code <1,0> = 1
  detail::NameIndexer ni;
  CHECK(detail::encode_term_node(Term::zero(), ni) == 1);
  // injectivity instance
  CHECK(encode(P("0 = 0")).value != encode(P("K(0 = 0)")).value);
  // determinism
  CHECK(encode(P("forall x x = x")).value == encode(P("forall x (x = x)")).value);
  CHECK_THROWS_AS(decode(GodelCode{pair_nat(pair_nat(14, 0), 0)}), CodecError);
}

TEST_CASE("identifier coding") {
  for (auto s : {"x", "y0", "foo_bar", "$1", "#27", "zz9"})
    CHECK(decode_ident(encode_ident(s)) == s);
}

TEST_CASE("structural enumeration hits small formulas early") {
  FormulaEnumerator en;
  bool found_eq = false;
  for (std::size_t i = 0; i < 50; ++i) {
    if (print(en.at(i)) == "0=0") { found_eq = true; break; }
  }
  CHECK(found_eq);

  // every formula appears exactly once among the first few weights
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < 2000; ++i) {
    auto s = print(en.at(i));
    CHECK(std::find(seen.begin(), seen.end(), s) == seen.end());
    seen.push_back(s);
  }

  FormulaStream xs(FormulaStream::Filter::FreeAtMostX);
  bool found_xx = false;
  for (std::size_t i = 0; i < 30; ++i) {
    auto fv = free_vars(xs.at(i));
    CHECK((fv.empty() || fv == std::vector<std::string>{"x"}));
    if (print(xs.at(i)) == "x=x") found_xx = true;
  }
  CHECK(found_xx);
}

TEST_CASE("universal closure binds in first-occurrence order") {
  auto f = P("y = x -> forall z z = q");
  auto c = universal_closure(f);
  CHECK(print(c) == "forall y forall x forall q (y=x -> forall z z=q)");
  CHECK(is_sentence(c));
}

TEST_CASE("grounding identities") {
  // ground(subst(phi,x,y), s) == ground(phi, s(x|s(y)))
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Gen g(seed ^ 0x600d);
    auto f = g.formula(3);
    auto x = pool_var(g.next(4));
    auto y = pool_var(g.next(4));
    if (!substitutable(f, x, Term::var(y))) continue;
    Assignment s(std::map<std::string, Nat>{
        {"x", Nat(g.next(9))}, {"y", Nat(g.next(9))},
        {"z", Nat(g.next(9))}, {"x1", Nat(g.next(9))}});
    auto lhs = ground(subst(f, x, Term::var(y)), s);
    auto rhs = ground(f, s.with(x, s.get(y)));
    INFO(print(f) << " x=" << x << " y=" << y);
    CHECK(formula_eq(lhs, rhs));
  }
  // ground(subst(phi,x,0), s) == ground(phi, s(x|0))
  // and ground(subst(phi,x,S(x)), s(x|m)) == ground(phi, s(x|m+1))
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Gen g(seed ^ 0xbead);
    auto f = g.formula(3);
    auto x = pool_var(g.next(4));
    Assignment s(std::map<std::string, Nat>{
        {"x", Nat(g.next(9))}, {"y", Nat(g.next(9))}, {"z", Nat(g.next(9))}});
    if (substitutable(f, x, Term::zero())) {
      CHECK(formula_eq(ground(subst(f, x, Term::zero()), s),
                       ground(f, s.with(x, 0))));
    }
    if (substitutable(f, x, Term::succ(Term::var(x)))) {
      Nat m = g.next(9);
      CHECK(formula_eq(ground(subst(f, x, Term::succ(Term::var(x))), s.with(x, m)),
                       ground(f, s.with(x, m + 1))));
    }
  }
}
