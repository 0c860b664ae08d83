#pragma once

#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "rk/proof.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Validity search: a systematic ground tableau over the pattern translation.
//
// The negated goal is decomposed by alpha/beta/delta rules; universals are
// instantiated fairly over an enumeration of the ground term universe
// (numeral 0, skolem constants, S, +, *); branches close on a congruence
// conflict of their literals or on a complementary pair F, nnf(~F).
// Iterative deepening on the per-branch count of gamma instantiations makes
// every iteration terminate; the budget is an abstract deterministic tick
// counter, so results are a pure function of (input, budget) and success is
// monotone in the budget.
// ---------------------------------------------------------------------------

// One master tick counter drives everything: proof search, axiom
// enumeration, schema recognition. Scoped caps carve deterministic slices
// out of the master stream (their positions depend only on work done so
// far, never on the master limit), so raising the limit only extends the
// execution prefix: results are monotone in the budget.
struct Budget {
  std::uint64_t limit = 0;
  std::uint64_t used = 0;
  std::vector<std::uint64_t> caps;  // absolute positions, innermost last

  explicit Budget(std::uint64_t lim = 0) : limit(lim) {}
  bool tick(std::uint64_t n = 1) {
    used += n;
    return used <= limit;
  }
  bool ok() const { return used <= limit; }
  std::uint64_t remaining() const { return used >= limit ? 0 : limit - used; }
  bool capped() const { return !caps.empty() && used >= caps.back(); }

  void push_cap(std::uint64_t extra) {
    std::uint64_t cap = used + extra;
    if (!caps.empty() && caps.back() < cap) cap = caps.back();
    caps.push_back(cap);
  }
  void pop_cap() { caps.pop_back(); }
};

struct CapScope {
  Budget& b;
  CapScope(Budget& budget, std::uint64_t extra) : b(budget) { b.push_cap(extra); }
  ~CapScope() { b.pop_cap(); }
};

struct BudgetExhausted {};  // master limit reached: the overall answer is Unknown
struct CapExhausted {};     // current slice used up: this attempt failed

namespace tableau {

struct PTree {
  enum class Kind { Conflict, Clash, Alpha, Beta, Gamma, Delta };
  Kind kind;
  FOFPtr principal;
  FOTermPtr term;                  // gamma instantiation / delta constant
  std::vector<FOFPtr> leaf_used;   // conflict: minimized literals; clash: pair
  std::vector<FOFPtr> used;        // pruned sequent at this node
  std::unique_ptr<PTree> left, right;
};
using PTreePtr = std::unique_ptr<PTree>;

enum class Status { Closed, Exhausted, Open };

struct Engine {
  Budget& budget;
  explicit Engine(Budget& b) : budget(b) {}

  // --- branch state ---
  struct QItem {
    FOFPtr f;
    int origin;
  };
  std::vector<QItem> queue;
  std::size_t cursor = 0;
  struct GammaEntry {
    FOFPtr f;
    int origin;
    std::size_t next_term = 0;
  };
  std::vector<GammaEntry> gammas;
  std::size_t gamma_rr = 0;
  std::size_t gamma_used = 0;
  std::size_t split_depth = 0;
  Congruence cc;
  std::unordered_multimap<std::uint64_t, FOFPtr> branch;
  std::vector<std::uint64_t> branch_log;
  std::vector<std::pair<FOFPtr, int>> literals;  // chronological, with origin
  std::unordered_map<std::uint64_t, int> origin_of;

  // --- global (per run) state ---
  std::size_t next_sko = 0;
  std::vector<std::size_t> sko_weight;
  std::vector<std::vector<FOTermPtr>> term_batches{{}};  // index = weight
  std::vector<FOTermPtr> term_flat;

  static constexpr std::size_t kMaxSplitDepth = 4000;

  bool in_branch(const FOFPtr& f) const {
    auto range = branch.equal_range(f->hash);
    for (auto it = range.first; it != range.second; ++it)
      if (fof_eq(it->second, f)) return true;
    return false;
  }

  void add_branch(const FOFPtr& f, int origin) {
    branch.emplace(f->hash, f);
    branch_log.push_back(f->hash);
    origin_of.emplace(f->hash, origin);
  }

  struct Checkpoint {
    std::size_t queue_size, cursor, gammas_size, gamma_rr, gamma_used;
    std::vector<std::size_t> gamma_next;
    std::size_t branch_log, literals;
    Congruence::Checkpoint cc;
  };

  Checkpoint save() {
    Checkpoint cp;
    cp.queue_size = queue.size();
    cp.cursor = cursor;
    cp.gammas_size = gammas.size();
    cp.gamma_rr = gamma_rr;
    cp.gamma_used = gamma_used;
    cp.gamma_next.reserve(gammas.size());
    for (const auto& g : gammas) cp.gamma_next.push_back(g.next_term);
    cp.branch_log = branch_log.size();
    cp.literals = literals.size();
    cp.cc = cc.save();
    return cp;
  }

  void restore(const Checkpoint& cp) {
    queue.resize(cp.queue_size);
    cursor = cp.cursor;
    gammas.resize(cp.gammas_size);
    for (std::size_t i = 0; i < gammas.size(); ++i)
      gammas[i].next_term = cp.gamma_next[i];
    gamma_rr = cp.gamma_rr;
    gamma_used = cp.gamma_used;
    while (branch_log.size() > cp.branch_log) {
      std::uint64_t h = branch_log.back();
      branch_log.pop_back();
      auto it = branch.find(h);
      if (it != branch.end()) branch.erase(it);
    }
    literals.resize(cp.literals);
    cc.restore(cp.cc);
  }

  // --- ground term universe ---
  void gen_batch() {
    std::size_t w = term_batches.size();
    std::vector<FOTermPtr> out;
    if (w == 1) out.push_back(FOTerm::num(0));
    for (std::size_t k = 0; k < next_sko; ++k)
      if (sko_weight[k] == w) out.push_back(FOTerm::sko(k));
    if (w >= 2)
      for (const auto& t : term_batches[w - 1])
        if (t->kind != FOTerm::Kind::Num) out.push_back(FOTerm::succ(t));
    if (w >= 2)
      for (const auto& t : term_batches[w - 1])
        if (t->kind == FOTerm::Kind::Num) out.push_back(FOTerm::num(t->value + 1));
    for (int kind = 0; kind < 2; ++kind)
      for (std::size_t wa = 1; wa + 1 < w; ++wa)
        for (const auto& a : term_batches[wa])
          for (const auto& b : term_batches[w - 1 - wa])
            out.push_back(kind == 0 ? FOTerm::sum(a, b) : FOTerm::prod(a, b));
    for (const auto& t : out) term_flat.push_back(t);
    term_batches.push_back(std::move(out));
  }

  FOTermPtr term_at(std::size_t i) {
    while (term_flat.size() <= i) gen_batch();
    return term_flat[i];
  }

  std::size_t fresh_sko() {
    std::size_t k = next_sko++;
    sko_weight.push_back(std::max<std::size_t>(term_batches.size(), 2));
    return k;
  }

  // --- search ---
  struct DfsResult {
    Status status;
    PTreePtr tree;
  };

  DfsResult dfs(std::size_t allowance) {
    struct Action {
      PTree::Kind kind;
      FOFPtr principal;
      FOTermPtr term;
    };
    std::vector<Action> actions;

    auto wrap = [&](PTreePtr leaf) -> PTreePtr {
      PTreePtr t = std::move(leaf);
      for (auto it = actions.rbegin(); it != actions.rend(); ++it) {
        auto node = std::make_unique<PTree>();
        node->kind = it->kind;
        node->principal = it->principal;
        node->term = it->term;
        node->left = std::move(t);
        t = std::move(node);
      }
      return t;
    };

    while (true) {
      if (!budget.tick()) throw BudgetExhausted{};
      if (budget.capped()) throw CapExhausted{};
      if (cursor < queue.size()) {
        QItem item = queue[cursor++];
        const FOFPtr& f = item.f;
        if (in_branch(f)) continue;
        add_branch(f, item.origin);
        auto comp = nnf(FOF::neg(f));
        if (in_branch(comp)) {
          auto leaf = std::make_unique<PTree>();
          leaf->kind = PTree::Kind::Clash;
          leaf->leaf_used = {f, comp};
          return {Status::Closed, wrap(std::move(leaf))};
        }
        if (Congruence::is_literal(f)) {
          literals.emplace_back(f, item.origin);
          if (cc.assert_literal(f)) {
            auto leaf = std::make_unique<PTree>();
            leaf->kind = PTree::Kind::Conflict;
            leaf->leaf_used = minimize_conflict();
            return {Status::Closed, wrap(std::move(leaf))};
          }
          continue;
        }
        switch (f->kind) {
          case FOF::Kind::And:
            actions.push_back({PTree::Kind::Alpha, f, nullptr});
            queue.push_back({f->f1, item.origin});
            queue.push_back({f->f2, item.origin});
            break;
          case FOF::Kind::Or: {
            if (split_depth >= kMaxSplitDepth) return {Status::Exhausted, nullptr};
            ++split_depth;
            Checkpoint cp = save();
            queue.push_back({f->f1, item.origin});
            DfsResult left = dfs(allowance);
            restore(cp);
            if (left.status != Status::Closed) {
              --split_depth;
              return left;
            }
            queue.push_back({f->f2, item.origin});
            DfsResult right = dfs(allowance);
            restore(cp);
            --split_depth;
            if (right.status != Status::Closed) return right;
            auto node = std::make_unique<PTree>();
            node->kind = PTree::Kind::Beta;
            node->principal = f;
            node->left = std::move(left.tree);
            node->right = std::move(right.tree);
            return {Status::Closed, wrap(std::move(node))};
          }
          case FOF::Kind::Ex: {
            std::size_t k = fresh_sko();
            auto inst = fo_subst(f->f1, f->var, FOTerm::sko(k));
            actions.push_back({PTree::Kind::Delta, f, FOTerm::sko(k)});
            queue.push_back({inst, item.origin});
            break;
          }
          case FOF::Kind::All:
            gammas.push_back({f, item.origin, 0});
            break;
          default:
            throw PreconditionError("tableau: formula not in NNF");
        }
      } else {
        if (gammas.empty()) return {Status::Open, nullptr};
        if (gamma_used >= allowance) return {Status::Exhausted, nullptr};
        GammaEntry& g = gammas[gamma_rr % gammas.size()];
        ++gamma_rr;
        FOTermPtr t = term_at(g.next_term++);
        ++gamma_used;
        auto inst = fo_subst(g.f->f1, g.f->var, t);
        actions.push_back({PTree::Kind::Gamma, g.f, t});
        queue.push_back({inst, g.origin});
      }
    }
  }

  // Greedy minimization of the conflicting literal set, checked against a
  // fresh congruence closure each time.
  std::vector<FOFPtr> minimize_conflict() {
    std::vector<FOFPtr> lits;
    lits.reserve(literals.size());
    for (const auto& [f, o] : literals) lits.push_back(f);
    // minimal conflicting prefix by binary search (set is chronological)
    std::size_t lo = 1, hi = lits.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      std::vector<FOFPtr> pre(lits.begin(), lits.begin() + static_cast<long>(mid));
      if (literals_conflict(pre))
        hi = mid;
      else
        lo = mid + 1;
    }
    lits.resize(lo);
    if (lits.size() <= 200) {
      for (std::size_t i = lits.size(); i-- > 0;) {
        std::vector<FOFPtr> without;
        without.reserve(lits.size() - 1);
        for (std::size_t j = 0; j < lits.size(); ++j)
          if (j != i) without.push_back(lits[j]);
        if (literals_conflict(without)) lits = std::move(without);
      }
    }
    return lits;
  }
};

// Bottom-up pruning: compute used sets and elide rules whose products were
// never needed. Returns the pruned tree (ownership moves).
inline PTreePtr prune(PTreePtr node) {
  auto contains = [](const std::vector<FOFPtr>& v, const FOFPtr& f) {
    for (const auto& g : v)
      if (fof_eq(g, f)) return true;
    return false;
  };
  auto remove_f = [](std::vector<FOFPtr>& v, const FOFPtr& f) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (fof_eq(v[i], f)) {
        v.erase(v.begin() + static_cast<long>(i));
        return;
      }
  };
  auto add_f = [&](std::vector<FOFPtr>& v, const FOFPtr& f) {
    if (!contains(v, f)) v.push_back(f);
  };

  switch (node->kind) {
    case PTree::Kind::Conflict:
    case PTree::Kind::Clash:
      node->used = node->leaf_used;
      return node;
    case PTree::Kind::Alpha: {
      auto child = prune(std::move(node->left));
      bool u1 = contains(child->used, node->principal->f1);
      bool u2 = contains(child->used, node->principal->f2);
      if (!u1 && !u2) return child;
      node->used = child->used;
      remove_f(node->used, node->principal->f1);
      remove_f(node->used, node->principal->f2);
      add_f(node->used, node->principal);
      node->left = std::move(child);
      return node;
    }
    case PTree::Kind::Delta: {
      auto child = prune(std::move(node->left));
      auto inst = fo_subst(node->principal->f1, node->principal->var, node->term);
      if (!contains(child->used, inst)) return child;
      node->used = child->used;
      remove_f(node->used, inst);
      add_f(node->used, node->principal);
      node->left = std::move(child);
      return node;
    }
    case PTree::Kind::Gamma: {
      auto child = prune(std::move(node->left));
      auto inst = fo_subst(node->principal->f1, node->principal->var, node->term);
      if (!contains(child->used, inst)) return child;
      node->used = child->used;
      remove_f(node->used, inst);
      add_f(node->used, node->principal);
      node->left = std::move(child);
      return node;
    }
    case PTree::Kind::Beta: {
      auto left = prune(std::move(node->left));
      if (!contains(left->used, node->principal->f1)) return left;
      auto right = prune(std::move(node->right));
      if (!contains(right->used, node->principal->f2)) return right;
      node->used = left->used;
      remove_f(node->used, node->principal->f1);
      for (const auto& f : right->used)
        if (!fof_eq(f, node->principal->f2)) add_f(node->used, f);
      add_f(node->used, node->principal);
      node->left = std::move(left);
      node->right = std::move(right);
      return node;
    }
  }
  return node;
}

// Linearize a pruned tree into proof steps (post-order).
inline std::size_t linearize(const PTreePtr& node, std::vector<ProofStep>& out) {
  ProofStep s;
  s.sequent = canonical_sequent(node->used);
  switch (node->kind) {
    case PTree::Kind::Conflict:
      s.rule = "conflict";
      break;
    case PTree::Kind::Clash:
      s.rule = "clash";
      break;
    case PTree::Kind::Alpha:
      s.rule = "alpha";
      s.principal = node->principal;
      s.premises = {linearize(node->left, out)};
      break;
    case PTree::Kind::Delta:
      s.rule = "delta";
      s.principal = node->principal;
      s.term = node->term;
      s.premises = {linearize(node->left, out)};
      break;
    case PTree::Kind::Gamma:
      s.rule = "gamma";
      s.principal = node->principal;
      s.term = node->term;
      s.premises = {linearize(node->left, out)};
      break;
    case PTree::Kind::Beta:
      s.rule = "beta";
      s.principal = node->principal;
      s.premises = {linearize(node->left, out), linearize(node->right, out)};
      break;
  }
  out.push_back(std::move(s));
  return out.size() - 1;
}

}  // namespace tableau

// ---------------------------------------------------------------------------
// Refutation of a seeded formula set (used directly by entails to track
// which axioms a proof needed).
// ---------------------------------------------------------------------------

struct RefutationResult {
  tableau::Status status = tableau::Status::Exhausted;
  bool hard_out = false;         // master budget (not just a cap) ran dry
  tableau::PTreePtr tree;        // pruned, on Closed
  std::set<int> used_origins;    // on Closed
};

inline RefutationResult refute(const std::vector<std::pair<FOFPtr, int>>& roots,
                               Budget& budget) {
  RefutationResult res;
  try {
    for (std::size_t allowance = 4;; allowance *= 2) {
      if (!budget.tick()) throw BudgetExhausted{};
      if (budget.capped()) throw CapExhausted{};
      tableau::Engine eng(budget);
      for (const auto& [f, origin] : roots) eng.queue.push_back({f, origin});
      auto r = eng.dfs(allowance);
      if (r.status == tableau::Status::Closed) {
        res.status = tableau::Status::Closed;
        res.tree = tableau::prune(std::move(r.tree));
        // read off used origins from the surviving sequents
        std::vector<const tableau::PTree*> stack{res.tree.get()};
        while (!stack.empty()) {
          const tableau::PTree* n = stack.back();
          stack.pop_back();
          for (const auto& f : n->used) {
            auto it = eng.origin_of.find(f->hash);
            if (it != eng.origin_of.end() && it->second >= 0)
              res.used_origins.insert(it->second);
          }
          for (const auto& f : n->leaf_used) {
            auto it = eng.origin_of.find(f->hash);
            if (it != eng.origin_of.end() && it->second >= 0)
              res.used_origins.insert(it->second);
          }
          if (n->left) stack.push_back(n->left.get());
          if (n->right) stack.push_back(n->right.get());
        }
        return res;
      }
      if (r.status == tableau::Status::Open) {
        res.status = tableau::Status::Open;
        return res;
      }
    }
  } catch (const BudgetExhausted&) {
    res.status = tableau::Status::Exhausted;
    res.hard_out = true;
    return res;
  } catch (const CapExhausted&) {
    res.status = tableau::Status::Exhausted;
    return res;
  }
}

// ---------------------------------------------------------------------------
// prove_valid: budgeted validity search with a checkable proof object.
// Unknown signals budget exhaustion (or saturation), never a disproof.
// ---------------------------------------------------------------------------

struct ProveResult {
  bool proved = false;
  bool saturated = false;  // open tableau: no proof at any budget
  Proof proof;
  std::uint64_t ticks = 0;
};

inline Proof assemble_proof(const FormulaPtr& conclusion,
                            const std::vector<FormulaPtr>& support,
                            PatternTable& table, const FOFPtr& goal,
                            const tableau::PTreePtr& tree) {
  Proof p;
  p.conclusion = conclusion;
  p.support = support;
  for (std::size_t i = 0; i < table.size(); ++i) p.table.push_back(table.at(i));
  std::size_t root = tableau::linearize(tree, p.steps);
  // force the refutation root sequent to be exactly the negated goal
  p.steps[root].sequent = canonical_sequent({nnf(FOF::neg(goal))});
  ProofStep valid;
  valid.rule = "valid";
  valid.fo_goal = goal;
  valid.premises = {root};
  p.steps.push_back(std::move(valid));
  ProofStep conclude;
  conclude.rule = "conclude";
  conclude.premises = {p.steps.size() - 1};
  p.steps.push_back(std::move(conclude));
  return p;
}

inline ProveResult prove_chain(const std::vector<FormulaPtr>& support,
                               const FormulaPtr& phi, Budget& budget) {
  ProveResult out;
  PatternTable table;
  auto chain = implication_chain(support, phi);
  auto goal = canonical_goal(chain, table);
  auto root = nnf(FOF::neg(goal));
  auto r = refute({{root, 0}}, budget);
  out.ticks = budget.used;
  if (r.status == tableau::Status::Closed) {
    out.proved = true;
    out.proof = assemble_proof(chain, support, table, goal, r.tree);
  } else if (r.status == tableau::Status::Open) {
    out.saturated = true;
  }
  return out;
}

inline ProveResult prove_valid(const FormulaPtr& phi, std::uint64_t budget_limit) {
  Budget b(budget_limit);
  return prove_chain({}, phi, b);
}

}  // namespace rk
