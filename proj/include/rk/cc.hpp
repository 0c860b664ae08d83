#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rk/fof.hpp"

namespace rk {

// ---------------------------------------------------------------------------
// Congruence closure over ground literals, with an undo trail so the tableau
// can backtrack across branch splits.
//
// Nodes are hash-consed ground terms (numerals, skolem constants, S, +, *)
// plus one application node per pattern-predicate atom. Asserted positive
// equalities merge classes; congruence propagates through parent lists. A
// conflict is a class marked both true and false (complementary atoms), a
// disequality whose endpoints merged, or an asserted ~(t=t).
//
// Numerals up to kNumeralStructureLimit expose their successor structure
// (numeral k is an S-application of numeral k-1), so congruences involving
// S behave exactly as for written-out S-chains. Larger numerals are opaque
// constants; closing a branch that needs the internal successor structure
// of an astronomically large numeral is out of reach, an accepted resource
// bound of this prover.
// ---------------------------------------------------------------------------

constexpr std::uint64_t kNumeralStructureLimit = 65536;

class Congruence {
 public:
  struct Checkpoint {
    std::size_t trail = 0;
    std::size_t nodes = 0;
    std::size_t diseqs = 0;
    bool conflict = false;
  };

  Checkpoint save() const {
    return {trail_.size(), nodes_.size(), diseqs_.size(), conflict_};
  }

  void restore(const Checkpoint& cp) {
    while (trail_.size() > cp.trail) {
      undo(trail_.back());
      trail_.pop_back();
    }
    while (nodes_.size() > cp.nodes) {
      node_index_.erase(nodes_.back().key);
      nodes_.pop_back();
      uf_.pop_back();
      rank_.pop_back();
      marks_.pop_back();
      parents_.pop_back();
    }
    diseqs_.resize(cp.diseqs);
    conflict_ = cp.conflict;
  }

  bool conflict() const { return conflict_; }

  // Asserts an NNF literal: Eq, Atom, or their negations. Returns the
  // conflict flag afterwards.
  bool assert_literal(const FOFPtr& lit) {
    if (conflict_) return true;
    bool positive = lit->kind != FOF::Kind::Not;
    const FOF* core = positive ? lit.get() : lit->f1.get();
    if (core->kind == FOF::Kind::Eq) {
      std::size_t a = intern_term(core->t1);
      std::size_t b = intern_term(core->t2);
      if (positive) {
        merge(a, b);
      } else {
        diseqs_.emplace_back(a, b);
        if (find(a) == find(b)) conflict_ = true;
      }
    } else if (core->kind == FOF::Kind::Atom) {
      std::size_t n = intern_atom(core);
      if (!conflict_) set_mark(find(n), positive ? Mark::True : Mark::False);
    } else {
      throw PreconditionError("assert_literal: not a literal");
    }
    return conflict_;
  }

  static bool is_literal(const FOFPtr& f) {
    if (f->kind == FOF::Kind::Eq || f->kind == FOF::Kind::Atom) return true;
    return f->kind == FOF::Kind::Not &&
           (f->f1->kind == FOF::Kind::Eq || f->f1->kind == FOF::Kind::Atom);
  }

 private:
  enum class NodeKind : std::uint8_t { Num, Sko, Succ, Sum, Prod, Atom };
  enum class Mark : std::uint8_t { None, True, False };

  struct Node {
    NodeKind kind;
    Nat value;                      // Num, and numeral-successor nodes
    std::size_t aux = 0;            // Sko id or Atom pred id + 1
    std::vector<std::size_t> args;  // child node ids
    std::uint64_t key = 0;          // interning key
  };

  struct TrailEntry {
    enum class Op : std::uint8_t { Union, Mark, SigInsert, SigReplace, Parent } op;
    std::size_t a = 0, b = 0;
    Mark old_mark = Mark::None;
    std::uint64_t sig_key = 0;
    std::size_t old_value = 0;
  };

  std::vector<Node> nodes_;
  std::vector<std::size_t> uf_;
  std::vector<std::size_t> rank_;
  std::vector<Mark> marks_;
  std::vector<std::vector<std::size_t>> parents_;  // per node id (valid on roots)
  std::unordered_map<std::uint64_t, std::size_t> node_index_;
  std::unordered_map<std::uint64_t, std::size_t> sig_table_;
  std::vector<std::pair<std::size_t, std::size_t>> diseqs_;
  std::vector<TrailEntry> trail_;
  bool conflict_ = false;

  std::size_t find(std::size_t x) const {
    while (uf_[x] != x) x = uf_[x];
    return x;
  }

  static std::uint64_t node_key(NodeKind k, const Nat& value, std::size_t aux,
                                const std::vector<std::size_t>& args) {
    std::uint64_t h = mix64(0x7777 ^ static_cast<std::uint64_t>(k));
    h = mix64(h ^ hash_nat(value));
    h = mix64(h ^ aux);
    for (auto a : args) h = mix64(h ^ (a * 0x9e3779b97f4a7c15ULL + 1));
    return h;
  }

  // Signature ignores the numeral value so that the numeral-successor node
  // for k and a plain S(t) node become congruent when t joins numeral k-1.
  std::uint64_t signature(std::size_t n) const {
    const Node& nd = nodes_[n];
    std::uint64_t h = mix64(0x8888 ^ static_cast<std::uint64_t>(nd.kind));
    h = mix64(h ^ nd.aux);
    for (auto a : nd.args) h = mix64(h ^ (find(a) * 0x9e3779b97f4a7c15ULL + 1));
    return h;
  }

  void add_parent(std::size_t root, std::size_t p) {
    trail_.push_back({TrailEntry::Op::Parent, 0, root, Mark::None, 0,
                      parents_[root].size()});
    parents_[root].push_back(p);
  }

  void sig_insert(std::size_t n) {
    std::uint64_t sig = signature(n);
    auto it = sig_table_.find(sig);
    if (it == sig_table_.end()) {
      trail_.push_back({TrailEntry::Op::SigInsert, 0, 0, Mark::None, sig, 0});
      sig_table_.emplace(sig, n);
    } else if (find(it->second) != find(n)) {
      merge(n, it->second);
    }
  }

  std::size_t new_node(Node nd) {
    std::size_t id = nodes_.size();
    std::uint64_t key = nd.key;
    nodes_.push_back(std::move(nd));
    uf_.push_back(id);
    rank_.push_back(0);
    marks_.push_back(Mark::None);
    parents_.emplace_back();
    node_index_.emplace(key, id);
    for (auto a : nodes_[id].args) add_parent(find(a), id);
    if (!nodes_[id].args.empty()) sig_insert(id);
    return id;
  }

  std::size_t get_or_make(NodeKind k, const Nat& value, std::size_t aux,
                          std::vector<std::size_t> args) {
    std::uint64_t key = node_key(k, value, aux, args);
    auto it = node_index_.find(key);
    if (it != node_index_.end()) {
      const Node& nd = nodes_[it->second];
      if (nd.kind == k && nd.value == value && nd.aux == aux && nd.args == args)
        return it->second;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& c = nodes_[i];
        if (c.kind == k && c.value == value && c.aux == aux && c.args == args)
          return i;
      }
    }
    Node nd;
    nd.kind = k;
    nd.value = value;
    nd.aux = aux;
    nd.args = std::move(args);
    nd.key = key;
    return new_node(std::move(nd));
  }

  std::size_t intern_num(const Nat& v) {
    if (v == 0 || v > kNumeralStructureLimit) {
      return get_or_make(NodeKind::Num, v, 0, {});
    }
    // Find the largest existing predecessor, then build the chain upward.
    // (Iterative: numeral chains can be tens of thousands of nodes.)
    Nat lo = v;
    std::vector<std::size_t> pending;  // values v, v-1, ..., lo+1 lack nodes
    std::size_t base = SIZE_MAX;
    while (true) {
      if (lo == 0 || lo > kNumeralStructureLimit) {
        base = get_or_make(NodeKind::Num, lo, 0, {});
        break;
      }
      // does the numeral node for lo exist already?
      std::uint64_t probe = mix64(hash_nat(lo) ^ 0x4e4d);  // see make_num_key
      auto it = num_cache_.find(probe);
      if (it != num_cache_.end() && it->second < nodes_.size() &&
          nodes_[it->second].value == lo &&
          (nodes_[it->second].kind == NodeKind::Succ ||
           nodes_[it->second].kind == NodeKind::Num) &&
          num_is_numeral_node(it->second, lo)) {
        base = it->second;
        break;
      }
      lo -= 1;
    }
    for (Nat k = lo + 1; k <= v; ++k) {
      base = get_or_make(NodeKind::Succ, k, 0, {base});
      num_cache_[mix64(hash_nat(k) ^ 0x4e4d)] = base;
    }
    return base;
  }

  bool num_is_numeral_node(std::size_t id, const Nat& v) const {
    const Node& nd = nodes_[id];
    if (nd.value != v) return false;
    if (nd.kind == NodeKind::Num) return nd.args.empty();
    return nd.kind == NodeKind::Succ && nd.args.size() == 1;
  }

  std::unordered_map<std::uint64_t, std::size_t> num_cache_;

  std::size_t intern_term(const FOTermPtr& t) {
    switch (t->kind) {
      case FOTerm::Kind::Num: return intern_num(t->value);
      case FOTerm::Kind::Sko: return get_or_make(NodeKind::Sko, 0, t->sko_id, {});
      case FOTerm::Kind::Succ:
        return get_or_make(NodeKind::Succ, 0, 0, {intern_term(t->a)});
      case FOTerm::Kind::Sum:
        return get_or_make(NodeKind::Sum, 0, 0,
                           {intern_term(t->a), intern_term(t->b)});
      case FOTerm::Kind::Prod:
        return get_or_make(NodeKind::Prod, 0, 0,
                           {intern_term(t->a), intern_term(t->b)});
      case FOTerm::Kind::Var:
        throw PreconditionError("congruence closure needs ground terms");
    }
    throw PreconditionError("intern_term: bad kind");
  }

  std::size_t intern_atom(const FOF* atom) {
    std::vector<std::size_t> args;
    args.reserve(atom->args.size());
    for (const auto& a : atom->args) args.push_back(intern_term(a));
    return get_or_make(NodeKind::Atom, 0, atom->pred + 1, std::move(args));
  }

  void set_mark(std::size_t root, Mark m) {
    if (marks_[root] == m) return;
    if (marks_[root] != Mark::None) {
      conflict_ = true;
      return;
    }
    trail_.push_back({TrailEntry::Op::Mark, root, 0, marks_[root], 0, 0});
    marks_[root] = m;
  }

  void undo(const TrailEntry& e) {
    switch (e.op) {
      case TrailEntry::Op::Union:
        uf_[e.a] = e.a;
        rank_[e.b] = e.old_value;
        break;
      case TrailEntry::Op::Mark:
        marks_[e.a] = e.old_mark;
        break;
      case TrailEntry::Op::SigInsert:
        sig_table_.erase(e.sig_key);
        break;
      case TrailEntry::Op::SigReplace:
        sig_table_[e.sig_key] = e.old_value;
        break;
      case TrailEntry::Op::Parent:
        parents_[e.b].resize(e.old_value);
        break;
    }
  }

  void merge(std::size_t a, std::size_t b) {
    std::vector<std::pair<std::size_t, std::size_t>> pending{{a, b}};
    while (!pending.empty() && !conflict_) {
      auto [x, y] = pending.back();
      pending.pop_back();
      std::size_t rx = find(x), ry = find(y);
      if (rx == ry) continue;
      if (rank_[rx] > rank_[ry]) std::swap(rx, ry);
      trail_.push_back(
          {TrailEntry::Op::Union, rx, ry, Mark::None, 0, rank_[ry]});
      uf_[rx] = ry;
      if (rank_[rx] == rank_[ry]) ++rank_[ry];
      if (marks_[rx] != Mark::None) {
        if (marks_[ry] == Mark::None) {
          trail_.push_back({TrailEntry::Op::Mark, ry, 0, marks_[ry], 0, 0});
          marks_[ry] = marks_[rx];
        } else if (marks_[ry] != marks_[rx]) {
          conflict_ = true;
          return;
        }
      }
      // move parents across, recomputing signatures
      for (std::size_t p : parents_[rx]) {
        std::uint64_t sig = signature(p);
        auto it = sig_table_.find(sig);
        if (it == sig_table_.end()) {
          trail_.push_back({TrailEntry::Op::SigInsert, 0, 0, Mark::None, sig, 0});
          sig_table_.emplace(sig, p);
        } else if (find(it->second) != find(p)) {
          pending.emplace_back(p, it->second);
        }
        add_parent(ry, p);
      }
      for (const auto& [s, t] : diseqs_) {
        if (find(s) == find(t)) {
          conflict_ = true;
          return;
        }
      }
    }
  }
};

// Do the given ground literals have a congruence conflict? Used by the proof
// checker to validate conflict leaves independently of the search.
inline bool literals_conflict(const std::vector<FOFPtr>& lits) {
  Congruence cc;
  for (const auto& l : lits) {
    if (!Congruence::is_literal(l)) continue;
    if (cc.assert_literal(l)) return true;
  }
  return cc.conflict();
}

}  // namespace rk
