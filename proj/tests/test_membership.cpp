#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "rk/membership.hpp"
#include "rk/structure.hpp"

using namespace rk;

namespace {

BaseStructure std_model() {
  // knowledge oracle is irrelevant here; membership formulas are K-free
  return random_pattern_structure(0);
}

}  // namespace

TEST_CASE("membership formula shape") {
  auto tmpl = membership_template();
  CHECK(free_vars(tmpl) == std::vector<std::string>{"x", "e"});

  auto in6 = membership_formula(6);
  CHECK(free_vars(in6) == std::vector<std::string>{"x"});

  auto inp = in_pair_formula(Term::var("x"), Term::num(41), 7);
  CHECK(free_vars(inp) == std::vector<std::string>{"x"});
}

TEST_CASE("constant emitter membership is decided by evaluation") {
  auto m = std_model();
  // index 6 = the constant emitter of 3
  auto in6 = membership_formula(6);
  Assignment s;
  CHECK(eval(m, in6, s.with("x", 3), 10) == ThreeValued::True);
  // 4 is never emitted; never True (and in fact never False either)
  CHECK(eval(m, in6, s.with("x", 4), 50) == ThreeValued::Unknown);
}

TEST_CASE("pair-membership formula for the constant emitter") {
  auto m = std_model();
  // pair(1, 2) = 8, so the constant emitter of 8 (index 16) emits it
  auto f = in_pair_formula(Term::var("x"), Term::num(2), 2 * 8);
  Assignment s;
  CHECK(eval(m, f, s.with("x", 1), 60) == ThreeValued::True);
  CHECK(eval(m, f, s.with("x", 2), 60) == ThreeValued::Unknown);
}

TEST_CASE("beta and pair building blocks evaluate") {
  auto m = std_model();
  memb::Names nm;
  Assignment s;

  // pair equation: 26 = <1, 5>? pair(1,5) = 26
  CHECK(pair_nat(1, 5) == 26);
  auto pe = memb::pair_eq(Term::num(26), Term::num(1), Term::num(5));
  CHECK(eval(m, pe, s, 5) == ThreeValued::True);
  auto pe_bad = memb::pair_eq(Term::num(25), Term::num(1), Term::num(5));
  CHECK(eval(m, pe_bad, s, 5) == ThreeValued::False);

  // cons cell: cons(2, 0) = pair(2,0)+1 = 4
  auto ce = memb::cons_eq(nm, Term::num(4), Term::num(2), Term::num(0));
  CHECK(eval(m, ce, s, 20) == ThreeValued::True);

  // beta extraction on a tiny coded list
  auto coded = beta_encode({Nat(4), Nat(0), Nat(7)});
  auto [len, rest] = unpair_nat(coded);
  auto [b1, b2] = unpair_nat(rest);
  REQUIRE(len == 3);
  auto bi = memb::beta_is(nm, Term::num(b1), Term::num(b2), Term::num(1),
                          Term::num(0));
  // witness q here is b1 div m, within a computed bound
  Nat bbound = b1 / (1 + b2) + 4 * b2 + 100;
  CHECK(eval(m, bi, s, bbound) == ThreeValued::True);
  auto bi_bad = memb::beta_is(nm, Term::num(b1), Term::num(b2), Term::num(1),
                              Term::num(1));
  CHECK(eval(m, bi_bad, s, bbound) != ThreeValued::True);
}

TEST_CASE("step formula certifies micro machine transitions") {
  // Hand-built two-instruction program [PUSHI, HALT]: instruction codes
  // <1,0> = 1 and <13,0> = 91; beta coding with small numbers throughout so
  // brute-force evaluation is fast.
  std::vector<Nat> instrs{1, 91};
  auto co = beta_encode(instrs);
  auto [len, rest] = unpair_nat(co);
  auto [b1, b2] = unpair_nat(rest);
  REQUIRE(len == 2);

  memb::CodeParams P{Term::num(b1), Term::num(b2), Term::num(0), Term::num(1),
                     Term::num(0), Term::num(len)};
  auto m = std_model();
  Assignment s;
  memb::Names nm;

  // sigma0 = <0,<0,0>> = 0; after PUSHI: <1, <cons(0,0), 0>> = <1,<1,0>>
  Nat sigma0 = 0;
  Nat sigma1 = pair_nat(1, pair_nat(list_cons(0, 0), 0));
  Nat bound = b1 / (1 + b2) + 4 * b2 + 100;
  auto stf = memb::step_formula(nm, P, Term::num(sigma0), Term::num(sigma1));
  CHECK(eval(m, stf, s, bound) == ThreeValued::True);

  // wrong transitions are never certified (bounded negative checks)
  auto bad1 = memb::step_formula(nm, P, Term::num(sigma0), Term::num(sigma0));
  CHECK(eval(m, bad1, s, 60) != ThreeValued::True);
  Nat sigma_wrong = pair_nat(1, pair_nat(list_cons(5, 0), 0));
  auto bad2 = memb::step_formula(nm, P, Term::num(sigma0), Term::num(sigma_wrong));
  CHECK(eval(m, bad2, s, 60) != ThreeValued::True);
}

TEST_CASE("emits_at certifies the emitting configuration") {
  // program [EMIT, HALT]: codes <9,0> = 54 and <13,0> = 91
  CHECK(pair_nat(9, 0) == 45);
  std::vector<Nat> instrs{45, 91};
  auto co = beta_encode(instrs);
  auto [len, rest] = unpair_nat(co);
  auto [b1, b2] = unpair_nat(rest);

  memb::CodeParams P{Term::num(b1), Term::num(b2), Term::num(0), Term::num(1),
                     Term::num(0), Term::num(len)};
  auto m = std_model();
  Assignment s;
  memb::Names nm;

  Nat sigma = pair_nat(0, pair_nat(list_cons(7, 0), 0));
  Nat bound = b1 / (1 + b2) + 4 * b2 + 700;  // covers sigma components (<= 435)
  auto ok = memb::emits_at(nm, P, Term::num(sigma), Term::num(7));
  CHECK(eval(m, ok, s, bound) == ThreeValued::True);
  auto wrong_val = memb::emits_at(nm, P, Term::num(sigma), Term::num(8));
  CHECK(eval(m, wrong_val, s, 60) != ThreeValued::True);
  // pc = 1 is HALT, not EMIT
  Nat sigma_h = pair_nat(1, pair_nat(list_cons(7, 0), 0));
  auto wrong_pc = memb::emits_at(nm, P, Term::num(sigma_h), Term::num(7));
  CHECK(eval(m, wrong_pc, s, 60) != ThreeValued::True);
}

TEST_CASE("step formula certifies a real compiled program") {
  PrimTable prims;
  auto wrapped = Blueprint::seq({Blueprint::emit(Blueprint::constant(2))});
  Nat e = encode_blueprint(wrapped);
  REQUIRE(e % 2 == 1);

  auto [tcode, prog_code] = unpair_nat((e - 1) / 2);
  auto [cs, co] = unpair_nat(prog_code);
  auto [cn, cr] = unpair_nat(cs);
  auto [cb1, cb2] = unpair_nat(cr);
  auto [len, cr2] = unpair_nat(co);
  auto [b1, b2] = unpair_nat(cr2);

  auto prog = compile_blueprint(wrapped);
  std::vector<Nat> states;
  Budget budget(1000);
  Interpreter interp(prims);
  interp.exec(prog, 0, budget, [](const Nat&) {},
              [&](const Nat& st) { states.push_back(st); });
  REQUIRE(states.size() >= 3);
  CHECK(states[0] == 0);

  memb::CodeParams P{Term::num(b1), Term::num(b2), Term::num(cb1),
                     Term::num(cb2), Term::num(cn), Term::num(len)};
  auto m = std_model();
  Assignment s;
  memb::Names nm;

  Nat bound = b1 / (1 + b2) + cb1 / (1 + cb2) + (len + 2) * b2 + 100;
  for (const auto& st : states) {
    Nat cand = st + 10;
    if (cand > bound) bound = cand;
  }

  // the first transition (PUSHC) exercises the constant table too
  auto stf = memb::step_formula(nm, P, Term::num(states[0]),
                                Term::num(states[1]));
  CHECK(eval(m, stf, s, bound) == ThreeValued::True);

  // program layout is [PUSHC, EMIT, HALT]: states[1] is about to emit 2
  auto ef = memb::emits_at(nm, P, Term::num(states[1]), Term::num(2));
  CHECK(eval(m, ef, s, bound) == ThreeValued::True);
  // and it is not about to emit 5 (bounded negative check)
  auto ef_bad = memb::emits_at(nm, P, Term::num(states[1]), Term::num(5));
  CHECK(eval(m, ef_bad, s, 60) != ThreeValued::True);
}

TEST_CASE("membership witness matches the machine") {
  PrimTable prims;
  auto wrapped = Blueprint::seq({Blueprint::emit(Blueprint::constant(2))});
  Nat e = encode_blueprint(wrapped);
  auto w = membership_witness(e, 2, 1000, prims);
  REQUIRE(w.has_value());
  // the witness decomposes as <steps, <t1, t2>> with the coded trace
  auto [steps, t1t2] = unpair_nat(*w);
  auto [t1, t2] = unpair_nat(t1t2);
  CHECK(steps >= 1);
  CHECK(beta_get(t1, t2, 0) == 0);

  // the extracted configurations really step through the machine
  auto prog = compile_blueprint(wrapped);
  std::vector<Nat> states;
  Budget budget(1000);
  Interpreter interp(prims);
  interp.exec(prog, 0, budget, [](const Nat&) {},
              [&](const Nat& st) { states.push_back(st); });
  for (Nat i = 0; i <= steps; ++i)
    CHECK(beta_get(t1, t2, i) == states[static_cast<std::size_t>(i)]);

  // no witness for values never emitted
  CHECK_FALSE(membership_witness(e, 3, 1000, prims).has_value());

  // loops work too
  auto lp = parse_blueprint("(loop (const 4) (emit (idx 0)))");
  Nat le = encode_blueprint(lp);
  for (Nat x = 0; x < 4; ++x) CHECK(membership_witness(le, x, 10000, prims).has_value());
  CHECK_FALSE(membership_witness(le, 9, 10000, prims).has_value());

  // no witness across primitive or simulate steps
  auto simp = Blueprint::simulate(Blueprint::constant(6), Blueprint::constant(0));
  CHECK_FALSE(membership_witness(encode_blueprint(simp), 3, 1000, prims).has_value());
}
