#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rk/blueprint.hpp"
#include "rk/coding.hpp"
#include "rk/syntax.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// The membership formula In(x, e): a formula of the language whose
// standard-model truth expresses x in W_e.
//
//   In(x, e) = exists t ( x + x = e  \/  Trace(e, x, t) )
//
// The first disjunct covers the constant-emitter family (index 2v emits
// exactly v) as a plain term equation. Trace covers odd indices: it unpacks
// e into its beta-coded constant table and instruction list and asserts that
// t = <steps, <t1, t2>> beta-codes a configuration sequence of the stack
// machine starting at <0, <0, 0>>, each adjacent pair related by the step
// relation, with some configuration about to execute EMIT with x on top of
// the stack. Pair decoding is purely equational (2p = (a+b)(a+b+1) + 2b), so
// checking a pinned witness needs no arithmetic facts beyond evaluation.
//
// Primitive-call and simulate instructions have no step case, so runs that
// use them are not certifiable: In is sound for every index and
// extensionally complete for the pure fragment with loop nesting below
// kMembershipLoopDepth. The trace-validity clause sits under a universal
// quantifier, so bounded evaluation never reports a definite verdict for a
// whole trace; the constant-emitter disjunct is decided outright, and the
// step relation is checkable instance by instance.
//
// Quantifiers are scoped so that each variable is pinned by an equation on
// already-known values before the next variable is introduced; bounded
// evaluation of pinned instances then scans additively, not
// multiplicatively.
// ---------------------------------------------------------------------------

constexpr std::size_t kMembershipLoopDepth = 8;

namespace memb {

inline TermPtr v(const std::string& n) { return Term::var(n); }
inline TermPtr num(std::uint64_t k) { return Term::num(Nat(k)); }
inline TermPtr plus(const TermPtr& a, const TermPtr& b) { return Term::sum(a, b); }
inline TermPtr times(const TermPtr& a, const TermPtr& b) { return Term::prod(a, b); }
inline TermPtr succ(const TermPtr& a) { return Term::succ(a); }

inline FormulaPtr conj_all(const std::vector<FormulaPtr>& fs) {
  FormulaPtr out = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) out = Formula::conj(fs[i], out);
  return out;
}

inline FormulaPtr disj_all(const std::vector<FormulaPtr>& fs) {
  FormulaPtr out = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) out = Formula::disj(fs[i], out);
  return out;
}

// Fresh bound-variable supply; "u<k>" collides with nothing else used here.
struct Names {
  std::size_t k = 0;
  std::string fresh() { return "u" + std::to_string(++k); }
};

// exf(nm, [&](TermPtr u){ ... }) builds "exists u body(u)".
template <typename F>
inline FormulaPtr exf(Names& nm, F body) {
  auto name = nm.fresh();
  return Formula::ex(name, body(v(name)));
}

// p = <a, b>
inline FormulaPtr pair_eq(const TermPtr& p, const TermPtr& a, const TermPtr& b) {
  auto ab = plus(a, b);
  return Formula::eq(plus(p, p), plus(times(ab, succ(ab)), plus(b, b)));
}

// exists a b with p = <a, b>, continuing with body(a, b)
template <typename F>
inline FormulaPtr pair_destruct(Names& nm, const TermPtr& p, F body) {
  return exf(nm, [&](TermPtr a) {
    return exf(nm, [&](TermPtr b) {
      return Formula::conj(pair_eq(p, a, b), body(a, b));
    });
  });
}

// c = <h, t> + 1, h and t known: the predecessor is pinned first.
inline FormulaPtr cons_eq(Names& nm, const TermPtr& c, const TermPtr& h,
                          const TermPtr& t) {
  return exf(nm, [&](TermPtr p) {
    return Formula::conj(Formula::eq(c, succ(p)), pair_eq(p, h, t));
  });
}

// destructure a known cons cell c into head and tail
template <typename F>
inline FormulaPtr cons_destruct(Names& nm, const TermPtr& c, F body) {
  return exf(nm, [&](TermPtr p) {
    return Formula::conj(Formula::eq(c, succ(p)), pair_destruct(nm, p, body));
  });
}

inline FormulaPtr lt(Names& nm, const TermPtr& a, const TermPtr& b) {
  return exf(nm, [&](TermPtr d) { return Formula::eq(succ(plus(a, d)), b); });
}

inline FormulaPtr le(Names& nm, const TermPtr& a, const TermPtr& b) {
  return exf(nm, [&](TermPtr d) { return Formula::eq(plus(a, d), b); });
}

// beta(b1, b2, i) = w with m = 1 + (i+1) b2: w < m and b1 = q m + w. The
// small witness d comes before the division witness q.
inline FormulaPtr beta_is(Names& nm, const TermPtr& b1, const TermPtr& b2,
                          const TermPtr& i, const TermPtr& w) {
  auto m = succ(times(succ(i), b2));
  return exf(nm, [&](TermPtr d) {
    return Formula::conj(
        Formula::eq(succ(plus(w, d)), m),
        exf(nm, [&](TermPtr q) {
          return Formula::eq(b1, plus(times(q, m), w));
        }));
  });
}

// destructure a known beta pair at index i, continuing with body(w)
template <typename F>
inline FormulaPtr beta_destruct(Names& nm, const TermPtr& b1, const TermPtr& b2,
                                const TermPtr& i, F body) {
  return exf(nm, [&](TermPtr w) {
    return Formula::conj(beta_is(nm, b1, b2, i, w), body(w));
  });
}

// destructure a machine configuration s = <pc, <stack, loops>>
template <typename F>
inline FormulaPtr state_destruct(Names& nm, const TermPtr& s, F body) {
  return pair_destruct(nm, s, [&](TermPtr pc, TermPtr r) {
    return pair_destruct(nm, r, [&](TermPtr st, TermPtr lp) {
      return body(pc, st, lp);
    });
  });
}

struct CodeParams {
  TermPtr b1, b2;    // instruction-list beta pair
  TermPtr cb1, cb2;  // constant-table beta pair
  TermPtr cn;        // constant count
  TermPtr len;       // instruction count
};

inline FormulaPtr step_cases(Names& nm, const CodeParams& P, const TermPtr& pc,
                             const TermPtr& st, const TermPtr& lp,
                             const TermPtr& pc1, const TermPtr& st1,
                             const TermPtr& lp1, const TermPtr& op,
                             const TermPtr& pl);

// One machine step from s to s1.
inline FormulaPtr step_formula(Names& nm, const CodeParams& P, const TermPtr& s,
                               const TermPtr& s1) {
  return state_destruct(nm, s, [&](TermPtr pc, TermPtr st, TermPtr lp) {
    return state_destruct(nm, s1, [&](TermPtr pc1, TermPtr st1, TermPtr lp1) {
      return Formula::conj(
          lt(nm, pc, P.len),
          beta_destruct(nm, P.b1, P.b2, pc, [&](TermPtr w) {
            return pair_destruct(nm, w, [&](TermPtr op, TermPtr pl) {
              return step_cases(nm, P, pc, st, lp, pc1, st1, lp1, op, pl);
            });
          }));
    });
  });
}

inline FormulaPtr step_cases(Names& nm, const CodeParams& P, const TermPtr& pc,
                             const TermPtr& st, const TermPtr& lp,
                             const TermPtr& pc1, const TermPtr& st1,
                             const TermPtr& lp1, const TermPtr& op,
                             const TermPtr& pl) {
  auto pc_next = Formula::eq(pc1, succ(pc));
  auto same_loops = Formula::eq(lp1, lp);
  auto same_stack = Formula::eq(st1, st);
  auto is_op = [&](std::uint64_t k) { return Formula::eq(op, num(k)); };

  std::vector<FormulaPtr> cases;

  // 0 PUSHC: push consts[pl]
  cases.push_back(conj_all(
      {is_op(0), pc_next, same_loops, lt(nm, pl, P.cn),
       beta_destruct(nm, P.cb1, P.cb2, pl, [&](TermPtr cv) {
         return cons_eq(nm, st1, cv, st);
       })}));
  // 1 PUSHI (top-level input is 0)
  cases.push_back(
      conj_all({is_op(1), pc_next, same_loops, cons_eq(nm, st1, num(0), st)}));
  // 2 PUSHIDX k for each supported depth k
  for (std::size_t k = 0; k < kMembershipLoopDepth; ++k) {
    std::function<FormulaPtr(const TermPtr&, std::size_t)> peel =
        [&](const TermPtr& list, std::size_t depth) -> FormulaPtr {
      return cons_destruct(nm, list, [&](TermPtr f, TermPtr r) {
        if (depth == 0) {
          return pair_destruct(nm, f, [&](TermPtr c, TermPtr bd) {
            (void)bd;
            return cons_eq(nm, st1, c, st);
          });
        }
        (void)f;
        return peel(r, depth - 1);
      });
    };
    cases.push_back(conj_all({is_op(2), Formula::eq(pl, num(k)), pc_next,
                              same_loops, peel(lp, k)}));
  }
  // 3 PAIR
  cases.push_back(conj_all(
      {is_op(3), pc_next, same_loops,
       cons_destruct(nm, st, [&](TermPtr bv, TermPtr r1) {
         return cons_destruct(nm, r1, [&](TermPtr av, TermPtr r) {
           return exf(nm, [&](TermPtr pv) {
             return Formula::conj(pair_eq(pv, av, bv),
                                  cons_eq(nm, st1, pv, r));
           });
         });
       })}));
  // 4 FST, 5 SND
  for (int which = 0; which < 2; ++which) {
    cases.push_back(conj_all(
        {is_op(which == 0 ? 4 : 5), pc_next, same_loops,
         cons_destruct(nm, st, [&](TermPtr pv, TermPtr r) {
           return pair_destruct(nm, pv, [&](TermPtr a, TermPtr b) {
             return cons_eq(nm, st1, which == 0 ? a : b, r);
           });
         })}));
  }
  // 6 ADD, 7 MUL, 8 MONUS
  for (int aop = 6; aop <= 8; ++aop) {
    cases.push_back(conj_all(
        {is_op(static_cast<std::uint64_t>(aop)), pc_next, same_loops,
         cons_destruct(nm, st, [&](TermPtr bv, TermPtr r1) {
           return cons_destruct(nm, r1, [&](TermPtr av, TermPtr r) {
             if (aop == 6) return cons_eq(nm, st1, plus(av, bv), r);
             if (aop == 7) return cons_eq(nm, st1, times(av, bv), r);
             return exf(nm, [&](TermPtr mv) {
               return Formula::conj(
                   cons_eq(nm, st1, mv, r),
                   Formula::disj(
                       Formula::conj(le(nm, bv, av),
                                     Formula::eq(plus(mv, bv), av)),
                       Formula::conj(lt(nm, av, bv), Formula::eq(mv, num(0)))));
             });
           });
         })}));
  }
  // 9 EMIT: pop v, push 0
  cases.push_back(conj_all(
      {is_op(9), pc_next, same_loops,
       cons_destruct(nm, st, [&](TermPtr vv, TermPtr r) {
         (void)vv;
         return cons_eq(nm, st1, num(0), r);
       })}));
  // 10 POP
  cases.push_back(conj_all(
      {is_op(10), pc_next, same_loops,
       cons_destruct(nm, st, [&](TermPtr vv, TermPtr r) {
         (void)vv;
         return Formula::eq(st1, r);
       })}));
  // 11 LOOPSTART(target = pl)
  cases.push_back(conj_all(
      {is_op(11), cons_destruct(nm, st, [&](TermPtr bv, TermPtr r) {
         return Formula::conj(
             Formula::eq(st1, r),
             Formula::disj(
                 conj_all({Formula::eq(bv, num(0)), Formula::eq(pc1, pl),
                           same_loops}),
                 conj_all({lt(nm, num(0), bv), Formula::eq(pc1, succ(pc)),
                           exf(nm, [&](TermPtr fr) {
                             return Formula::conj(pair_eq(fr, num(0), bv),
                                                  cons_eq(nm, lp1, fr, lp));
                           })})));
       })}));
  // 12 LOOPEND(body start = pl)
  cases.push_back(conj_all(
      {is_op(12), same_stack,
       cons_destruct(nm, lp, [&](TermPtr fr, TermPtr lr) {
         return pair_destruct(nm, fr, [&](TermPtr c, TermPtr bd) {
           return Formula::disj(
               conj_all({lt(nm, succ(c), bd), Formula::eq(pc1, pl),
                         exf(nm, [&](TermPtr f2) {
                           return Formula::conj(pair_eq(f2, succ(c), bd),
                                                cons_eq(nm, lp1, f2, lr));
                         })}),
               conj_all({le(nm, bd, succ(c)), Formula::eq(pc1, succ(pc)),
                         Formula::eq(lp1, lr)}));
         });
       })}));
  return disj_all(cases);
}

// The configuration s is about to execute EMIT with x on top of the stack.
inline FormulaPtr emits_at(Names& nm, const CodeParams& P, const TermPtr& s,
                           const TermPtr& x) {
  return state_destruct(nm, s, [&](TermPtr pc, TermPtr st, TermPtr lp) {
    (void)lp;
    return conj_all(
        {lt(nm, pc, P.len),
         beta_destruct(nm, P.b1, P.b2, pc,
                       [&](TermPtr w) {
                         return exf(nm, [&](TermPtr pl) {
                           return pair_eq(w, num(9), pl);
                         });
                       }),
         exf(nm, [&](TermPtr r) { return cons_eq(nm, st, x, r); })});
  });
}

inline FormulaPtr trace_body(Names& nm, const CodeParams& P, const TermPtr& x,
                             const TermPtr& t);

// Trace(e, x, t): the odd-index general case. The index is peeled as
// e = 2<tree, <<cn, <cb1, cb2>>, <len, <b1, b2>>>> + 1.
inline FormulaPtr trace_formula(Names& nm, const TermPtr& e, const TermPtr& x,
                                const TermPtr& t) {
  return exf(nm, [&](TermPtr h) {
    return Formula::conj(
        Formula::eq(e, succ(plus(h, h))),
        pair_destruct(nm, h, [&](TermPtr tcode, TermPtr prog) {
          (void)tcode;
          return pair_destruct(nm, prog, [&](TermPtr cs, TermPtr co) {
            return pair_destruct(nm, cs, [&](TermPtr cn, TermPtr cr) {
              return pair_destruct(nm, cr, [&](TermPtr cb1, TermPtr cb2) {
                return pair_destruct(nm, co, [&](TermPtr len, TermPtr cr2) {
                  return pair_destruct(nm, cr2, [&](TermPtr b1, TermPtr b2) {
                    CodeParams P{b1, b2, cb1, cb2, cn, len};
                    return trace_body(nm, P, x, t);
                  });
                });
              });
            });
          });
        }));
  });
}

inline FormulaPtr trace_body(Names& nm, const CodeParams& P, const TermPtr& x,
                             const TermPtr& t) {
  return pair_destruct(nm, t, [&](TermPtr k, TermPtr tr) {
    return pair_destruct(nm, tr, [&](TermPtr t1, TermPtr t2) {
      auto ivar = nm.fresh();
      auto all_steps = Formula::all(
          ivar, Formula::imp(
                    lt(nm, v(ivar), k),
                    beta_destruct(nm, t1, t2, v(ivar), [&](TermPtr s) {
                      return beta_destruct(
                          nm, t1, t2, succ(v(ivar)), [&](TermPtr s1) {
                            return step_formula(nm, P, s, s1);
                          });
                    })));
      auto emit_somewhere = exf(nm, [&](TermPtr j) {
        return Formula::conj(lt(nm, j, k),
                             beta_destruct(nm, t1, t2, j, [&](TermPtr s) {
                               return emits_at(nm, P, s, x);
                             }));
      });
      return conj_all({beta_is(nm, t1, t2, num(0), num(0)), all_steps,
                       emit_somewhere});
    });
  });
}

}  // namespace memb

// In(x, e) with free variables exactly {x, e}.
inline FormulaPtr membership_template() {
  static const FormulaPtr cached = [] {
    memb::Names nm;
    auto x = memb::v("x");
    auto e = memb::v("e");
    return memb::exf(nm, [&](TermPtr t) {
      return Formula::disj(Formula::eq(memb::plus(x, x), e),
                           memb::trace_formula(nm, e, x, t));
    });
  }();
  return cached;
}

// In(x, e-bar) for a concrete index: free variable {x}.
inline FormulaPtr membership_formula(const Nat& e) {
  return subst(membership_template(), "e", Term::num(e));
}

// In(p, e-bar) with the membership slot renamed to p; cached per index since
// schema enumeration builds many instances against the same machine.
inline FormulaPtr membership_formula_at_p(const Nat& e) {
  static std::map<Nat, FormulaPtr> cache;
  auto it = cache.find(e);
  if (it != cache.end()) return it->second;
  auto f = subst(membership_formula(e), "x", Term::var("p"));
  cache.emplace(e, f);
  return f;
}

// <a, b> in W_e as a formula: exists p (p = <a,b> and In(p, e-bar)).
// The terms a and b must not contain the variable p.
inline FormulaPtr in_pair_formula(const TermPtr& a, const TermPtr& b,
                                  const Nat& e) {
  return Formula::ex(
      "p", Formula::conj(memb::pair_eq(Term::var("p"), a, b),
                         membership_formula_at_p(e)));
}

// Test-side witness: run the index and beta-encode the configuration prefix
// that certifies the first emission of x. Returns nullopt when x was not
// emitted within the budget or the run used a primitive/simulate step.
inline std::optional<Nat> membership_witness(const Nat& e, const Nat& x,
                                             std::uint64_t budget_limit,
                                             const PrimTable& prims) {
  BlueprintPtr b;
  try {
    b = decode_blueprint(e);
  } catch (const CodecError&) {
    return std::nullopt;
  }
  auto prog = compile_blueprint(b);
  for (const auto& in : prog.code)
    if (in.op == 14 || in.op == 15) return std::nullopt;
  std::vector<Nat> states;
  std::optional<std::size_t> emit_step;
  Budget budget(budget_limit);
  Interpreter interp(prims);
  try {
    interp.exec(
        prog, 0, budget,
        [&](const Nat& val) {
          if (!emit_step && val == x) emit_step = states.size() - 1;
        },
        [&](const Nat& st) {
          if (emit_step && states.size() > *emit_step + 1)
            throw BudgetExhausted{};
          states.push_back(st);
        });
  } catch (const BudgetExhausted&) {
  } catch (const BlueprintError&) {
    return std::nullopt;
  }
  if (!emit_step || states.size() < *emit_step + 2) return std::nullopt;
  std::size_t steps = *emit_step + 1;
  states.resize(steps + 1);
  auto coded = beta_encode(states);
  auto [len, b1b2] = unpair_nat(coded);
  return pair_nat(Nat(steps), b1b2);
}

}  // namespace rk
