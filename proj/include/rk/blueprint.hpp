#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rk/nat.hpp"
#include "rk/prover.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// The computation model: a minimal enumerator language with numeric indices.
//
// Programs are expression trees (constants, the input slot, loop indices,
// pairing, arithmetic, emit, bounded loops, quoting, host primitives, and
// simulation of another index). They compile to a small stack machine whose
// step relation is also what the membership formula arithmetizes, so the
// interpreter and the arithmetization share one semantics.
//
// Indices: the constant emitter emit(const v) gets index 2v; every other
// blueprint gets an odd index 2<T, <consts, code>> + 1 where T is a
// byte-serialized tree, consts is the beta-coded constant table and code the
// beta-coded instruction list. W_e of a well-formed index is the set of
// values it emits, the union of run(e, b) over all budgets.
// ---------------------------------------------------------------------------

class Blueprint;
using BlueprintPtr = std::shared_ptr<const Blueprint>;

class Blueprint {
 public:
  enum class Op : std::uint8_t {
    Const, Input, Idx, Pair, Fst, Snd, Add, Mul, Monus,
    Emit, Seq, Loop, Quote, CallPrim, Simulate
  };

  Op op;
  Nat value;                       // Const
  std::size_t idx = 0;             // Idx: de Bruijn loop index, 0 = innermost
  std::string prim;                // CallPrim name
  std::vector<BlueprintPtr> kids;  // operands; Loop: kids[0]=bound, rest=body
  BlueprintPtr quoted;             // Quote

  static BlueprintPtr constant(const Nat& v) {
    auto b = std::make_shared<Blueprint>();
    b->op = Op::Const;
    b->value = v;
    return b;
  }
  static BlueprintPtr input() { return mk(Op::Input, {}); }
  static BlueprintPtr loop_idx(std::size_t k) {
    auto b = std::make_shared<Blueprint>();
    b->op = Op::Idx;
    b->idx = k;
    return b;
  }
  static BlueprintPtr pair(BlueprintPtr a, BlueprintPtr b) { return mk(Op::Pair, {a, b}); }
  static BlueprintPtr fst(BlueprintPtr a) { return mk(Op::Fst, {a}); }
  static BlueprintPtr snd(BlueprintPtr a) { return mk(Op::Snd, {a}); }
  static BlueprintPtr add(BlueprintPtr a, BlueprintPtr b) { return mk(Op::Add, {a, b}); }
  static BlueprintPtr mul(BlueprintPtr a, BlueprintPtr b) { return mk(Op::Mul, {a, b}); }
  static BlueprintPtr monus(BlueprintPtr a, BlueprintPtr b) { return mk(Op::Monus, {a, b}); }
  static BlueprintPtr emit(BlueprintPtr v) { return mk(Op::Emit, {v}); }
  static BlueprintPtr seq(std::vector<BlueprintPtr> items) { return mk(Op::Seq, std::move(items)); }
  static BlueprintPtr loop(BlueprintPtr bound, std::vector<BlueprintPtr> body) {
    body.insert(body.begin(), bound);
    return mk(Op::Loop, std::move(body));
  }
  static BlueprintPtr quote(BlueprintPtr b) {
    auto q = std::make_shared<Blueprint>();
    q->op = Op::Quote;
    q->quoted = std::move(b);
    return q;
  }
  static BlueprintPtr call(const std::string& prim, std::vector<BlueprintPtr> args) {
    auto b = mkm(Op::CallPrim, std::move(args));
    b->prim = prim;
    return b;
  }
  static BlueprintPtr simulate(BlueprintPtr e, BlueprintPtr x) {
    return mk(Op::Simulate, {e, x});
  }

 private:
  static BlueprintPtr mk(Op op, std::vector<BlueprintPtr> kids) {
    return mkm(op, std::move(kids));
  }
  static std::shared_ptr<Blueprint> mkm(Op op, std::vector<BlueprintPtr> kids) {
    auto b = std::make_shared<Blueprint>();
    b->op = op;
    b->kids = std::move(kids);
    return b;
  }
};

struct BlueprintError : std::runtime_error {
  explicit BlueprintError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Host primitives. The table is fixed at startup and versioned; primitive
// calls charge their internal work to the same budget as the interpreter.
// ---------------------------------------------------------------------------

class Interpreter;

// The primitive manifest is part of the index coding and is versioned: the
// compiled CALLPRIM payload stores the manifest position of the primitive
// name. Implementations are bound at runtime in manifest order.
inline const char* kPrimTableVersion = "rk-prims-1";

inline const std::vector<std::string>& prim_manifest() {
  static const std::vector<std::string> names{
      "smn", "univ_first", "mk_const_emitter", "knowcheck",
      "compile_knower", "nth_formula_x"};
  return names;
}

inline int prim_manifest_index(const std::string& name) {
  const auto& m = prim_manifest();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] == name) return static_cast<int>(i);
  return -1;
}

struct PrimContext {
  Budget& budget;
  const class PrimTable& prims;
};

using PrimFn = std::function<Nat(const std::vector<Nat>&, PrimContext&)>;

class PrimTable {
 public:
  std::string version = kPrimTableVersion;
  std::vector<PrimFn> fns;  // manifest order

  void bind(const std::string& name, PrimFn fn) {
    std::size_t id = static_cast<std::size_t>(prim_manifest_index(name));
    if (fns.size() <= id) fns.resize(prim_manifest().size());
    fns[id] = std::move(fn);
  }
};

// ---------------------------------------------------------------------------
// Compiled form: a stack machine.
//
//   op  mnemonic    payload a        effect
//    0  PUSHC       const slot       push consts[a]
//    1  PUSHI                        push the run input
//    2  PUSHIDX     depth k          push k-th innermost loop counter
//    3  PAIR                         pop b, a; push <a,b>
//    4  FST                          pop v; push unpair(v).first
//    5  SND                          pop v; push unpair(v).second
//    6  ADD                          pop b, a; push a+b
//    7  MUL                          pop b, a; push a*b
//    8  MONUS                        pop b, a; push a-b clamped at 0
//    9  EMIT                         pop v; record emission; push 0
//   10  POP                          pop
//   11  LOOPSTART   end target       pop B; if B=0 jump a, else open frame
//   12  LOOPEND     body start       bump counter; jump a or close frame
//   13  HALT                         stop
//   14  CALLPRIM    <prim, argc>     pop argc args; push prim result
//   15  SIM                          pop x, e; run e on input x, forwarding
//                                    emissions, then push 0
// ---------------------------------------------------------------------------

struct Instr {
  std::uint8_t op;
  Nat a;
};

struct Program {
  std::vector<Instr> code;
  std::vector<Nat> consts;
};

Nat encode_blueprint(const BlueprintPtr& b);

namespace detail {

struct Compiler {
  Program prog;

  std::size_t slot(const Nat& v) {
    for (std::size_t i = 0; i < prog.consts.size(); ++i)
      if (prog.consts[i] == v) return i;
    prog.consts.push_back(v);
    return prog.consts.size() - 1;
  }

  void emit_op(std::uint8_t op, Nat a = 0) { prog.code.push_back({op, std::move(a)}); }

  void compile(const BlueprintPtr& b) {
    switch (b->op) {
      case Blueprint::Op::Const:
        emit_op(0, Nat(slot(b->value)));
        break;
      case Blueprint::Op::Input:
        emit_op(1);
        break;
      case Blueprint::Op::Idx:
        emit_op(2, Nat(b->idx));
        break;
      case Blueprint::Op::Pair:
        compile(b->kids[0]);
        compile(b->kids[1]);
        emit_op(3);
        break;
      case Blueprint::Op::Fst:
        compile(b->kids[0]);
        emit_op(4);
        break;
      case Blueprint::Op::Snd:
        compile(b->kids[0]);
        emit_op(5);
        break;
      case Blueprint::Op::Add:
        compile(b->kids[0]);
        compile(b->kids[1]);
        emit_op(6);
        break;
      case Blueprint::Op::Mul:
        compile(b->kids[0]);
        compile(b->kids[1]);
        emit_op(7);
        break;
      case Blueprint::Op::Monus:
        compile(b->kids[0]);
        compile(b->kids[1]);
        emit_op(8);
        break;
      case Blueprint::Op::Emit:
        compile(b->kids[0]);
        emit_op(9);
        break;
      case Blueprint::Op::Seq: {
        if (b->kids.empty()) {
          emit_op(0, Nat(slot(0)));
          break;
        }
        for (std::size_t i = 0; i < b->kids.size(); ++i) {
          compile(b->kids[i]);
          if (i + 1 < b->kids.size()) emit_op(10);
        }
        break;
      }
      case Blueprint::Op::Loop: {
        compile(b->kids[0]);  // bound
        std::size_t start_ix = prog.code.size();
        emit_op(11);  // target patched below
        std::size_t body_start = prog.code.size();
        for (std::size_t i = 1; i < b->kids.size(); ++i) {
          compile(b->kids[i]);
          emit_op(10);
        }
        emit_op(12, Nat(body_start));
        prog.code[start_ix].a = Nat(prog.code.size());
        emit_op(0, Nat(slot(0)));  // loop value is 0
        break;
      }
      case Blueprint::Op::Quote:
        emit_op(0, Nat(slot(encode_blueprint(b->quoted))));
        break;
      case Blueprint::Op::CallPrim: {
        for (const auto& k : b->kids) compile(k);
        int pid = prim_manifest_index(b->prim);
        if (pid < 0) throw BlueprintError("unknown primitive '" + b->prim + "'");
        emit_op(14, pair_nat(Nat(pid), Nat(b->kids.size())));
        break;
      }
      case Blueprint::Op::Simulate:
        compile(b->kids[0]);
        compile(b->kids[1]);
        emit_op(15);
        break;
    }
  }
};

}  // namespace detail

// Compilation is deterministic in (tree, primitive manifest version).
inline Program compile_blueprint(const BlueprintPtr& b) {
  detail::Compiler c;
  c.compile(b);
  c.emit_op(13);
  return std::move(c.prog);
}

// ---------------------------------------------------------------------------
// Tree serialization (bytes, then a natural with a leading sentinel digit).
// ---------------------------------------------------------------------------

namespace detail {

inline void put_nat(std::string& out, const Nat& v) {
  // 7-bit varint, most significant group first
  std::vector<std::uint8_t> groups;
  Nat x = v;
  do {
    groups.push_back(static_cast<std::uint8_t>(x & 0x7f));
    x >>= 7;
  } while (x > 0);
  for (std::size_t i = groups.size(); i-- > 1;)
    out.push_back(static_cast<char>(groups[i] | 0x80));
  out.push_back(static_cast<char>(groups[0]));
}

inline Nat get_nat(const std::string& in, std::size_t& pos) {
  Nat v = 0;
  while (true) {
    if (pos >= in.size()) throw CodecError("blueprint bytes truncated");
    std::uint8_t b = static_cast<std::uint8_t>(in[pos++]);
    v = (v << 7) | (b & 0x7f);
    if (!(b & 0x80)) return v;
  }
}

inline void serialize_tree(std::string& out, const BlueprintPtr& b) {
  out.push_back(static_cast<char>(b->op));
  switch (b->op) {
    case Blueprint::Op::Const:
      put_nat(out, b->value);
      break;
    case Blueprint::Op::Input:
      break;
    case Blueprint::Op::Idx:
      put_nat(out, Nat(b->idx));
      break;
    case Blueprint::Op::Quote:
      serialize_tree(out, b->quoted);
      break;
    case Blueprint::Op::CallPrim: {
      put_nat(out, encode_ident(b->prim));
      put_nat(out, Nat(b->kids.size()));
      for (const auto& k : b->kids) serialize_tree(out, k);
      break;
    }
    default: {
      put_nat(out, Nat(b->kids.size()));
      for (const auto& k : b->kids) serialize_tree(out, k);
      break;
    }
  }
}

inline BlueprintPtr deserialize_tree(const std::string& in, std::size_t& pos,
                                     int depth_left) {
  if (depth_left <= 0) throw CodecError("blueprint too deep");
  if (pos >= in.size()) throw CodecError("blueprint bytes truncated");
  auto op = static_cast<Blueprint::Op>(in[pos++]);
  auto kids_of = [&](std::size_t n) {
    std::vector<BlueprintPtr> kids;
    kids.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      kids.push_back(deserialize_tree(in, pos, depth_left - 1));
    return kids;
  };
  switch (op) {
    case Blueprint::Op::Const:
      return Blueprint::constant(get_nat(in, pos));
    case Blueprint::Op::Input:
      return Blueprint::input();
    case Blueprint::Op::Idx:
      return Blueprint::loop_idx(static_cast<std::size_t>(get_nat(in, pos)));
    case Blueprint::Op::Quote:
      return Blueprint::quote(deserialize_tree(in, pos, depth_left - 1));
    case Blueprint::Op::CallPrim: {
      auto name = decode_ident(get_nat(in, pos));
      std::size_t n = static_cast<std::size_t>(get_nat(in, pos));
      if (n > 16) throw CodecError("too many primitive args");
      auto b = std::make_shared<Blueprint>();
      b->op = Blueprint::Op::CallPrim;
      b->prim = name;
      b->kids = kids_of(n);
      return b;
    }
    default: {
      if (static_cast<std::uint8_t>(op) > 14)
        throw CodecError("bad blueprint op");
      std::size_t n = static_cast<std::size_t>(get_nat(in, pos));
      if (n > 4096) throw CodecError("too many children");
      auto b = std::make_shared<Blueprint>();
      b->op = op;
      b->kids = kids_of(n);
      // arity checks
      switch (op) {
        case Blueprint::Op::Pair:
        case Blueprint::Op::Add:
        case Blueprint::Op::Mul:
        case Blueprint::Op::Monus:
        case Blueprint::Op::Simulate:
          if (b->kids.size() != 2) throw CodecError("bad arity");
          break;
        case Blueprint::Op::Fst:
        case Blueprint::Op::Snd:
        case Blueprint::Op::Emit:
          if (b->kids.size() != 1) throw CodecError("bad arity");
          break;
        case Blueprint::Op::Loop:
          if (b->kids.empty()) throw CodecError("loop needs a bound");
          break;
        default:
          break;
      }
      return b;
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Beta coding of finite sequences: beta(b1, b2, i) = b1 mod (1 + (i+1)*b2).
// The encoder picks b2 as a multiple of lcm(1..len) exceeding every element,
// which makes the moduli pairwise coprime, then solves by CRT for the least
// b1. A sequence is stored as <len, <b1, b2>>.
// ---------------------------------------------------------------------------

namespace detail {

inline Nat egcd(const Nat& a, const Nat& b, Nat& x, Nat& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  Nat x1, y1;
  Nat g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

inline Nat mod_inverse(const Nat& a, const Nat& m) {
  Nat x, y;
  Nat g = egcd(((a % m) + m) % m, m, x, y);
  if (g != 1) throw CodecError("beta: moduli not coprime");
  return ((x % m) + m) % m;
}

}  // namespace detail

inline Nat beta_encode(const std::vector<Nat>& xs) {
  if (xs.empty()) return pair_nat(0, pair_nat(0, 1));
  Nat lcm = 1;
  for (std::size_t i = 1; i <= xs.size(); ++i)
    lcm = boost::multiprecision::lcm(lcm, Nat(i));
  Nat maxv = 0;
  for (const auto& x : xs)
    if (x > maxv) maxv = x;
  Nat b2 = lcm * ((maxv + lcm + 1) / lcm);
  // CRT: b1 = xs[i] mod (1 + (i+1) b2)
  Nat b1 = 0, M = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Nat m = 1 + Nat(i + 1) * b2;
    Nat r = ((xs[i] - b1) % m + m) % m;
    Nat inv = detail::mod_inverse(M % m, m);
    b1 += M * ((r * inv) % m);
    M *= m;
  }
  b1 %= M;
  return pair_nat(Nat(xs.size()), pair_nat(b1, b2));
}

inline Nat beta_get(const Nat& b1, const Nat& b2, const Nat& i) {
  return b1 % (1 + (i + 1) * b2);
}

inline std::vector<Nat> beta_decode(const Nat& coded) {
  auto [len, rest] = unpair_nat(coded);
  auto [b1, b2] = unpair_nat(rest);
  std::vector<Nat> out;
  for (Nat i = 0; i < len; ++i) out.push_back(beta_get(b1, b2, i));
  return out;
}

// ---------------------------------------------------------------------------
// Index coding.
// ---------------------------------------------------------------------------

inline Nat encode_instr(const Instr& in) { return pair_nat(Nat(in.op), in.a); }

inline Nat encode_program(const Program& p) {
  std::vector<Nat> instrs;
  instrs.reserve(p.code.size());
  for (const auto& in : p.code) instrs.push_back(encode_instr(in));
  return pair_nat(beta_encode(p.consts), beta_encode(instrs));
}

inline bool is_const_emitter(const BlueprintPtr& b, Nat& value_out) {
  if (b->op == Blueprint::Op::Emit && b->kids[0]->op == Blueprint::Op::Const) {
    value_out = b->kids[0]->value;
    return true;
  }
  return false;
}

inline Nat encode_blueprint(const BlueprintPtr& b) {
  Nat v;
  if (is_const_emitter(b, v)) return v * 2;
  std::string bytes;
  detail::serialize_tree(bytes, b);
  Nat tree = 1;  // sentinel digit keeps leading zero bytes
  for (char c : bytes) tree = (tree << 8) | static_cast<std::uint8_t>(c);
  Nat prog = encode_program(compile_blueprint(b));
  return 2 * pair_nat(tree, prog) + 1;
}

inline BlueprintPtr decode_blueprint(const Nat& e) {
  if (e % 2 == 0) return Blueprint::emit(Blueprint::constant(e / 2));
  auto [tree_code, prog_code] = unpair_nat((e - 1) / 2);
  if (tree_code < 1) throw CodecError("not a blueprint index");
  // strip the sentinel
  std::string bytes;
  Nat t = tree_code;
  while (t > 1) {
    bytes.push_back(static_cast<char>(static_cast<std::uint8_t>(t & 0xff)));
    t >>= 8;
  }
  if (t != 1) throw CodecError("not a blueprint index");
  std::reverse(bytes.begin(), bytes.end());
  std::size_t pos = 0;
  auto b = detail::deserialize_tree(bytes, pos, 512);
  if (pos != bytes.size()) throw CodecError("trailing blueprint bytes");
  Nat cv;
  if (is_const_emitter(b, cv))
    throw CodecError("non-canonical constant emitter index");
  // verify the embedded program matches recompilation
  if (encode_program(compile_blueprint(b)) != prog_code)
    throw CodecError("blueprint program table mismatch");
  return b;
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

struct Emission {
  std::uint64_t step;
  Nat value;
};

using EmissionTrace = std::vector<Emission>;

class Interpreter {
 public:
  explicit Interpreter(const PrimTable& prims) : prims_(prims) {}

  // Runs the program with the given input, forwarding emissions through the
  // callback. Stops on HALT or when the budget runs out (BudgetExhausted is
  // caught by run()). on_state, when set, receives the arithmetized
  // configuration <pc, <stack, loops>> before every instruction; this is the
  // exact step relation the membership formula describes.
  void exec(const Program& p, const Nat& input, Budget& budget,
            const std::function<void(const Nat&)>& on_emit,
            const std::function<void(const Nat&)>& on_state = {}) {
    std::vector<Nat> stack;
    std::vector<std::pair<Nat, Nat>> loops;  // (counter, bound)
    std::size_t pc = 0;
    auto coded_state = [&]() {
      // cons from bottom to top so the list head is the stack top; same for
      // loop frames (head = innermost)
      Nat s = 0;
      for (const auto& v : stack) s = list_cons(v, s);
      Nat l = 0;
      for (const auto& fr : loops) l = list_cons(pair_nat(fr.first, fr.second), l);
      return pair_nat(Nat(pc), pair_nat(s, l));
    };
    auto pop = [&]() {
      if (stack.empty()) throw BlueprintError("stack underflow");
      Nat v = std::move(stack.back());
      stack.pop_back();
      return v;
    };
    while (pc < p.code.size()) {
      if (!budget.tick()) throw BudgetExhausted{};
      if (on_state) on_state(coded_state());
      const Instr& in = p.code[pc];
      switch (in.op) {
        case 0: {
          std::size_t k = static_cast<std::size_t>(in.a);
          if (k >= p.consts.size()) throw BlueprintError("bad const slot");
          stack.push_back(p.consts[k]);
          ++pc;
          break;
        }
        case 1:
          stack.push_back(input);
          ++pc;
          break;
        case 2: {
          std::size_t k = static_cast<std::size_t>(in.a);
          if (k >= loops.size()) throw BlueprintError("bad loop index");
          stack.push_back(loops[loops.size() - 1 - k].first);
          ++pc;
          break;
        }
        case 3: {
          Nat b = pop(), a = pop();
          stack.push_back(pair_nat(a, b));
          ++pc;
          break;
        }
        case 4: {
          Nat v = pop();
          stack.push_back(unpair_nat(v).first);
          ++pc;
          break;
        }
        case 5: {
          Nat v = pop();
          stack.push_back(unpair_nat(v).second);
          ++pc;
          break;
        }
        case 6: {
          Nat b = pop(), a = pop();
          stack.push_back(a + b);
          ++pc;
          break;
        }
        case 7: {
          Nat b = pop(), a = pop();
          stack.push_back(a * b);
          ++pc;
          break;
        }
        case 8: {
          Nat b = pop(), a = pop();
          stack.push_back(a > b ? a - b : Nat(0));
          ++pc;
          break;
        }
        case 9: {
          Nat v = pop();
          on_emit(v);
          stack.push_back(0);
          ++pc;
          break;
        }
        case 10:
          pop();
          ++pc;
          break;
        case 11: {
          Nat bound = pop();
          if (bound == 0) {
            pc = static_cast<std::size_t>(in.a);
          } else {
            loops.emplace_back(Nat(0), bound);
            ++pc;
          }
          break;
        }
        case 12: {
          if (loops.empty()) throw BlueprintError("loop end without frame");
          auto& frame = loops.back();
          frame.first += 1;
          if (frame.first < frame.second) {
            pc = static_cast<std::size_t>(in.a);
          } else {
            loops.pop_back();
            ++pc;
          }
          break;
        }
        case 13:
          return;
        case 14: {
          auto [pid, argc] = unpair_nat(in.a);
          std::vector<Nat> args(static_cast<std::size_t>(argc));
          for (std::size_t i = args.size(); i-- > 0;) args[i] = pop();
          std::size_t id = static_cast<std::size_t>(pid);
          if (id >= prims_.fns.size() || !prims_.fns[id])
            throw BlueprintError("unbound primitive id");
          PrimContext ctx{budget, prims_};
          stack.push_back(prims_.fns[id](args, ctx));
          ++pc;
          break;
        }
        case 15: {
          Nat x = pop(), e = pop();
          auto inner = decode_blueprint(e);
          auto prog = compile_blueprint(inner);
          exec(prog, x, budget, on_emit);
          stack.push_back(0);
          ++pc;
          break;
        }
        default:
          throw BlueprintError("bad opcode");
      }
    }
  }

 private:
  const PrimTable& prims_;
};

// run(e, budget): the emission trace within budget. Monotone and
// prefix-closed in the budget; the union over budgets is W_e.
inline EmissionTrace run_trace(const Nat& e, std::uint64_t budget_limit,
                               const PrimTable& prims) {
  auto b = decode_blueprint(e);  // throws if not an index
  auto prog = compile_blueprint(b);
  EmissionTrace trace;
  Budget budget(budget_limit);
  Interpreter interp(prims);
  try {
    interp.exec(prog, 0, budget, [&](const Nat& v) {
      trace.push_back({budget.used, v});
    });
  } catch (const BudgetExhausted&) {
  } catch (const BlueprintError&) {
    // a crashed run emits nothing further
  }
  return trace;
}

inline std::vector<Nat> run_set(const Nat& e, std::uint64_t budget_limit,
                                const PrimTable& prims) {
  std::vector<Nat> out;
  for (const auto& em : run_trace(e, budget_limit, prims)) {
    bool seen = false;
    for (const auto& v : out)
      if (v == em.value) seen = true;
    if (!seen) out.push_back(em.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// s-m-n: fix the first argument of a two-input blueprint (inputs are packed
// as <first, second>). Realized by universal simulation, so the slice index
// runs e on <k, input> with constant overhead per step.
// ---------------------------------------------------------------------------
inline Nat smn(const Nat& e, const Nat& k) {
  decode_blueprint(e);  // not-a-blueprint check
  auto wrapped = Blueprint::simulate(
      Blueprint::constant(e),
      Blueprint::pair(Blueprint::constant(k), Blueprint::input()));
  return encode_blueprint(wrapped);
}

// ---------------------------------------------------------------------------
// Textual form (s-expressions), for docs, tests and the CLI.
// ---------------------------------------------------------------------------

inline void print_blueprint(std::ostream& os, const BlueprintPtr& b) {
  switch (b->op) {
    case Blueprint::Op::Const: os << "(const " << nat_to_string(b->value) << ")"; break;
    case Blueprint::Op::Input: os << "input"; break;
    case Blueprint::Op::Idx: os << "(idx " << b->idx << ")"; break;
    case Blueprint::Op::Quote:
      os << "(quote ";
      print_blueprint(os, b->quoted);
      os << ")";
      break;
    case Blueprint::Op::CallPrim: {
      os << "(prim " << b->prim;
      for (const auto& k : b->kids) {
        os << " ";
        print_blueprint(os, k);
      }
      os << ")";
      break;
    }
    default: {
      static const std::map<Blueprint::Op, std::string> names{
          {Blueprint::Op::Pair, "pair"}, {Blueprint::Op::Fst, "fst"},
          {Blueprint::Op::Snd, "snd"},   {Blueprint::Op::Add, "add"},
          {Blueprint::Op::Mul, "mul"},   {Blueprint::Op::Monus, "monus"},
          {Blueprint::Op::Emit, "emit"}, {Blueprint::Op::Seq, "seq"},
          {Blueprint::Op::Loop, "loop"}, {Blueprint::Op::Simulate, "sim"}};
      os << "(" << names.at(b->op);
      for (const auto& k : b->kids) {
        os << " ";
        print_blueprint(os, k);
      }
      os << ")";
      break;
    }
  }
}

inline std::string print(const BlueprintPtr& b) {
  std::ostringstream os;
  print_blueprint(os, b);
  return os.str();
}

class BlueprintParser {
 public:
  explicit BlueprintParser(std::string text) : text_(std::move(text)) {}

  BlueprintPtr parse_all() {
    auto b = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return b;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) throw ParseError("expected word", pos_);
    return text_.substr(start, pos_ - start);
  }

  BlueprintPtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end", pos_);
    if (text_[pos_] != '(') {
      auto w = word();
      if (w == "input") return Blueprint::input();
      throw ParseError("unknown atom '" + w + "'", pos_);
    }
    ++pos_;  // (
    auto head = word();
    BlueprintPtr result;
    if (head == "const") {
      result = Blueprint::constant(nat_from_string(word()));
    } else if (head == "idx") {
      result = Blueprint::loop_idx(std::stoul(word()));
    } else if (head == "quote") {
      result = Blueprint::quote(parse());
    } else if (head == "prim") {
      auto name = word();
      std::vector<BlueprintPtr> args;
      while (peek_not_close()) args.push_back(parse());
      result = Blueprint::call(name, std::move(args));
    } else {
      std::vector<BlueprintPtr> kids;
      while (peek_not_close()) kids.push_back(parse());
      if (head == "pair") result = Blueprint::pair(kids.at(0), kids.at(1));
      else if (head == "fst") result = Blueprint::fst(kids.at(0));
      else if (head == "snd") result = Blueprint::snd(kids.at(0));
      else if (head == "add") result = Blueprint::add(kids.at(0), kids.at(1));
      else if (head == "mul") result = Blueprint::mul(kids.at(0), kids.at(1));
      else if (head == "monus") result = Blueprint::monus(kids.at(0), kids.at(1));
      else if (head == "emit") result = Blueprint::emit(kids.at(0));
      else if (head == "sim") result = Blueprint::simulate(kids.at(0), kids.at(1));
      else if (head == "seq") result = Blueprint::seq(std::move(kids));
      else if (head == "loop") {
        if (kids.empty()) throw ParseError("loop needs a bound", pos_);
        auto bound = kids.front();
        kids.erase(kids.begin());
        result = Blueprint::loop(bound, std::move(kids));
      } else {
        throw ParseError("unknown form '" + head + "'", pos_);
      }
    }
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ')')
      throw ParseError("expected ')'", pos_);
    ++pos_;
    return result;
  }

  bool peek_not_close() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] != ')';
  }
};

inline BlueprintPtr parse_blueprint(const std::string& s) {
  return BlueprintParser(s).parse_all();
}

}  // namespace rk
