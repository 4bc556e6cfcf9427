#include <algorithm>
#include <limits>
#include <tuple>
#include <unordered_map>
#include <map>
#include <set>

#include "closure.hpp"
#include "glab/unification.hpp"
#include "search_util.hpp"
#include "stack_language.hpp"

namespace glab {

namespace {

using detail::kUnbounded;

struct CompiledEq {
  bool value_eq;
  Arrow lhs;
  std::vector<int> lhs_path;
  Arrow rhs;
  std::vector<int> rhs_path;
  int value;
};

struct Slot {
  int category;  // nonterminal id, terminal id for lexicon words (-1 = ε)
  std::vector<CompiledEq> eqs;
  SchemaForm form = SchemaForm::Other;  // set for stack-shaped grammars
  int value = -1;
};

// Productions come first, then lexicon rules, in textual order.
struct CompiledRule {
  bool lexical;
  std::size_t source;
  int lhs;
  std::vector<Slot> body;  // lexical rules have exactly one slot
};

struct Compiled {
  explicit Compiled(const UnificationGrammar& g) {
    const auto& s = g.symbols();
    for (std::size_t i = 0; i < s.nonterminals.size(); ++i) nt[s.nonterminals[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < s.terminals.size(); ++i) term[s.terminals[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < s.attributes.size(); ++i) attr[s.attributes[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < s.values.size(); ++i) value[s.values[i]] = static_cast<int>(i);
    by_lhs.resize(s.nonterminals.size());
    std::vector<detail::SkeletonRule> skeleton;
    auto add = [&](CompiledRule r, detail::SkeletonRule sk) {
      by_lhs[r.lhs].push_back(static_cast<int>(rules.size()));
      rules.push_back(std::move(r));
      skeleton.push_back(std::move(sk));
    };
    for (std::size_t k = 0; k < g.productions().size(); ++k) {
      const auto& p = g.productions()[k];
      CompiledRule r{false, k, nt.at(p.mother), {}};
      detail::SkeletonRule sk{r.lhs, {}};
      for (const auto& d : p.daughters) {
        r.body.push_back({nt.at(d.category), compile(d.schema)});
        sk.body.emplace_back(true, r.body.back().category);
      }
      add(std::move(r), std::move(sk));
    }
    for (std::size_t k = 0; k < g.lexicon().size(); ++k) {
      const auto& l = g.lexicon()[k];
      int word = l.word.empty() ? -1 : term.at(l.word);
      CompiledRule r{true, k, nt.at(l.mother), {{word, compile(l.schema)}}};
      detail::SkeletonRule sk{r.lhs, {}};
      if (word >= 0) sk.body.emplace_back(false, word);
      add(std::move(r), std::move(sk));
    }
    bounds = detail::skeleton_bounds(s.nonterminals.size(), skeleton);
    start = nt.at(g.start());
    find_stack_shape(g);
  }

  // When every schema is a share, push or pop over next/idx, feature
  // structures stay stacks, and only pops read an open node's structure.
  void find_stack_shape(const UnificationGrammar& g) {
    if (!attr.count(kNext) || !attr.count(kIdx)) return;
    for (const auto& l : g.lexicon())
      if (!l.schema.empty()) return;
    const auto n = g.symbols().nonterminals.size();
    std::vector<std::vector<int>> edges(n);
    std::vector<std::pair<int, int>> pops;  // (mother, value)
    std::vector<std::pair<SchemaForm, int>> shapes;
    for (const auto& p : g.productions()) {
      for (const auto& d : p.daughters) {
        auto shape = classify_schema(d.schema);
        if (shape.form == SchemaForm::Other) return;
        int v = shape.form == SchemaForm::Share ? -1 : value.at(shape.value);
        if (shape.form == SchemaForm::Pop) pops.emplace_back(nt.at(p.mother), v);
        shapes.emplace_back(shape.form, v);
        edges[nt.at(p.mother)].push_back(nt.at(d.category));
      }
    }
    std::size_t at = 0;
    for (auto& r : rules)
      if (!r.lexical)
        for (auto& b : r.body) std::tie(b.form, b.value) = shapes[at++];
    auto reach = detail::reachable(edges);
    poppable.assign(n, std::vector<bool>(g.symbols().values.size(), false));
    for (std::size_t a = 0; a < n; ++a)
      for (auto [m, v] : pops)
        if (reach[a][m]) poppable[a][v] = true;
    next_attr = attr.at(kNext);
    idx_attr = attr.at(kIdx);
    stack_shaped = true;
  }

  std::vector<CompiledEq> compile(const Schema& schema) const {
    std::vector<CompiledEq> out;
    auto path = [&](const Path& p) {
      std::vector<int> ids;
      for (const auto& a : p) ids.push_back(attr.at(a));
      return ids;
    };
    for (const auto& e : schema) {
      if (const auto* pe = std::get_if<ArrowPathEq>(&e)) {
        out.push_back({false, pe->lhs, path(pe->lhs_path), pe->rhs, path(pe->rhs_path), -1});
      } else {
        const auto& ve = std::get<ArrowValueEq>(e);
        out.push_back({true, ve.side, path(ve.path), ve.side, {}, value.at(ve.value)});
      }
    }
    return out;
  }

  std::map<Symbol, int> nt, term, attr, value;
  std::vector<CompiledRule> rules;
  std::vector<std::vector<int>> by_lhs;
  detail::SkeletonBounds bounds;
  int start = 0;
  bool stack_shaped = false;
  int next_attr = -1, idx_attr = -1;
  // poppable[A][v]: a pop of v can happen at or below a node of category A.
  std::vector<std::vector<bool>> poppable;
};

// Stacks of stack-shaped grammars, mirrored outside the closure. Cells are
// hash-consed (value, below) pairs; the unknown bottom of a stack is a
// variable, bound when a pop reaches it. Bindings are undone on backtrack.
class SymbolicStacks {
 public:
  static bool is_variable(int st) { return st < 0; }
  static int variable(int st) { return -1 - st; }

  int fresh() {
    binding_.push_back(kFree);
    return -static_cast<int>(binding_.size());
  }
  std::size_t variables() const { return binding_.size(); }

  int resolve(int st) const {
    while (is_variable(st) && binding_[variable(st)] != kFree) st = binding_[variable(st)];
    return st;
  }

  std::pair<int, int> cell(int st) const { return cells_.cell(st); }

  // Stack of a daughter; a pop of a mismatched value leaves the clash to the
  // closure and returns anything.
  int daughter(int mother, SchemaForm form, int value) {
    switch (form) {
      case SchemaForm::Push: return cells_.cons(value, mother);
      case SchemaForm::Pop: {
        int st = resolve(mother);
        if (!is_variable(st)) return cells_.cell(st).second;
        int below = fresh();
        binding_[variable(st)] = cells_.cons(value, below);
        trail_.push_back(variable(st));
        return below;
      }
      default: return mother;
    }
  }

  std::pair<std::size_t, std::size_t> mark() const { return {binding_.size(), trail_.size()}; }
  void undo(std::pair<std::size_t, std::size_t> m) {
    while (trail_.size() > m.second) {
      auto v = static_cast<std::size_t>(trail_.back());
      trail_.pop_back();
      if (v < m.first) binding_[v] = kFree;
    }
    binding_.resize(m.first);
  }

 private:
  static constexpr int kFree = std::numeric_limits<int>::min();
  detail::ConsTable cells_;
  std::vector<int> binding_;
  std::vector<int> trail_;
};

std::optional<detail::StackSystem> stack_system(const Compiled& c) {
  if (!c.stack_shaped) return std::nullopt;
  detail::StackSystem sys;
  sys.nonterminals = c.nt.size();
  sys.indices = c.value.size();
  sys.start = c.start;
  sys.empty_start = false;
  for (const auto& r : c.rules) {
    detail::StackRule sr;
    sr.lhs = r.lhs;
    for (const auto& b : r.body) {
      if (r.lexical) {
        if (b.category >= 0) sr.items.push_back({true, b.category});
        continue;
      }
      detail::StackItem it{false, b.category};
      if (b.form == SchemaForm::Push) it.op = detail::StackOp::Push;
      if (b.form == SchemaForm::Pop) it.op = detail::StackOp::Pop;
      it.index = b.value;
      sr.items.push_back(it);
    }
    sys.rules.push_back(std::move(sr));
  }
  return sys;
}

enum class Mode { Exact, Language, Member };

// Leftmost depth-first construction of c-structures, as for indexed
// grammars. Outside Exact mode the equations are solved incrementally and
// inconsistent partial trees are cut.
class Search {
 public:
  Search(const UnificationGrammar& g, const Compiled& c, Mode mode) : g_(g), c_(c), mode_(mode) {}

  std::size_t node_limit = kUnbounded;
  std::size_t yield_limit = kUnbounded;
  std::size_t explore_limit = kUnbounded;
  std::vector<int> target;  // Exact and Member modes
  std::function<bool(const CStructure&)> on_tree;
  std::set<std::vector<int>> found;  // Language mode

  bool exhausted = false;
  bool pruned_by_nodes = false;
  bool stopped = false;
  std::size_t explored = 0;

  void run() {
    nodes_.push_back({-1, 0, false, c_.start, -1, 0, new_fs_node(), stacks_.fresh()});
    if (c_.bounds.min_nodes[c_.start] >= kUnbounded) return;
    agenda_.push_back(0);
    pending_yield_ = c_.bounds.min_yield[c_.start];
    pending_nodes_ = c_.bounds.min_nodes[c_.start] - 1;
    if (!within_bounds()) return;
    step();
  }

 private:
  struct Node {
    int parent;
    std::uint32_t child_no;
    bool leaf;
    int sym;   // nonterminal id; terminal id for leaves, -1 for ε
    int rule;  // licensing rule of the mother slot, -1 for the root
    int slot;
    int fs;    // closure node, -1 in Exact mode
    int st = 0;  // symbolic stack, stack-shaped grammars only
  };

  bool solving() const { return mode_ != Mode::Exact; }
  int new_fs_node() { return solving() ? closure_.add_node() : -1; }

  bool within_bounds() {
    if (nodes_.size() + pending_nodes_ > node_limit) {
      pruned_by_nodes = true;
      return false;
    }
    return emitted_.size() + pending_yield_ <= yield_limit;
  }

  bool has_target() const { return mode_ != Mode::Language; }

  void step() {
    const auto saved_emitted = emitted_.size();
    const auto saved_yield = pending_yield_;
    std::vector<int> popped;
    bool ok = true;
    while (!agenda_.empty() && nodes_[agenda_.back()].leaf) {
      int t = nodes_[agenda_.back()].sym;
      popped.push_back(agenda_.back());
      agenda_.pop_back();
      --pending_yield_;
      if (has_target() && (emitted_.size() >= target.size() || target[emitted_.size()] != t)) {
        ok = false;
        break;
      }
      emitted_.push_back(t);
    }
    if (ok) {
      if (agenda_.empty())
        complete();
      else if (mode_ == Mode::Exact || visit_state())
        expand();
    }
    emitted_.resize(saved_emitted);
    pending_yield_ = saved_yield;
    for (auto it = popped.rbegin(); it != popped.rend(); ++it) agenda_.push_back(*it);
  }

  // The future of a partial tree depends on the emitted prefix, the open
  // nodes, and the part of the constraint graph reachable from them. States
  // whose reachable graph is large are explored without memoization.
  bool visit_state() {
    key_.clear();
    key_.add(static_cast<std::int64_t>(emitted_.size()));
    if (mode_ == Mode::Language)
      for (int t : emitted_) key_.add(t);
    ++generation_;
    numbered_ = 0;
    number_.resize(c_.stack_shaped ? stacks_.variables() : closure_.node_count());
    for (auto it = agenda_.rbegin(); it != agenda_.rend(); ++it) {
      const auto& n = nodes_[*it];
      if (n.leaf) {
        key_.add(-2 - n.sym);
      } else {
        key_.add(n.sym);
        if (c_.stack_shaped)
          serialize_stack(n.sym, n.st);
        else if (!serialize(closure_.find(n.fs)))
          return true;
      }
    }
    return visited_.enter(key_.str(), node_limit - nodes_.size());
  }

  static constexpr int kKeyClassLimit = 256;

  bool serialize(int root) {
    auto& slot = number_[root];
    if (slot.first == generation_) {
      key_.add(slot.second);
      return true;
    }
    if (numbered_ == kKeyClassLimit) return false;
    slot = {generation_, numbered_++};
    key_.add(slot.second);
    key_.add(closure_.value(root) + 1);
    auto edges = closure_.edges(root);
    std::sort(edges.begin(), edges.end());
    key_.add(static_cast<std::int64_t>(edges.size()));
    for (auto [a, t] : edges) {
      key_.add(a);
      if (!serialize(closure_.find(t))) return false;
    }
    return true;
  }

  int number(int root) {
    auto& slot = number_[root];
    if (slot.first != generation_) slot = {generation_, numbered_++};
    return slot.second;
  }

  // The visible part of the stack as hash-consed segments, then the number
  // of the unknown bottom if the walk reaches it. Open nodes may share
  // bottoms, so those are numbered.
  void serialize_stack(int sym, int st) {
    for (;;) {
      st = stacks_.resolve(st);
      if (SymbolicStacks::is_variable(st)) {
        key_.add(-1 - number(SymbolicStacks::variable(st)));
        return;
      }
      auto [segment, rest] = visible(sym, st);
      key_.add(segment);
      if (rest == kTruncated) return;
      st = rest;
    }
  }

  static constexpr int kTruncated = std::numeric_limits<int>::min();

  // Cell contents never change, so the visible segment of (sym, cell) is
  // computed once: its id among segments, and the variable below it or
  // kTruncated.
  std::pair<int, int> visible(int sym, int cell) {
    auto key = (static_cast<std::uint64_t>(sym) << 32) | static_cast<std::uint32_t>(cell);
    if (auto it = visible_.find(key); it != visible_.end()) return it->second;
    auto [v, below] = stacks_.cell(cell);
    std::pair<int, int> out;
    if (!c_.poppable[sym][v]) {
      out = {segments_.cons(v, -1), kTruncated};
    } else if (SymbolicStacks::is_variable(below)) {
      out = {segments_.cons(v, -2), below};
    } else {
      auto [seg, rest] = visible(sym, below);
      out = {segments_.cons(v, seg), rest};
    }
    visible_.emplace(key, out);
    return out;
  }

  void apply(const CompiledEq& e, int mother, int daughter) {
    auto side = [&](Arrow a) { return a == Arrow::Up ? mother : daughter; };
    int lhs = closure_.walk(side(e.lhs), e.lhs_path);
    if (e.value_eq) {
      closure_.assign(lhs, e.value);
    } else {
      int rhs = closure_.walk(side(e.rhs), e.rhs_path);
      closure_.merge(lhs, rhs);
    }
  }

  // Exact acyclicity test over the whole class graph.
  bool acyclic() const {
    std::vector<char> color(closure_.node_count(), 0);
    std::vector<std::pair<int, std::size_t>> stack;
    for (std::size_t r0 = 0; r0 < closure_.node_count(); ++r0) {
      int r = closure_.find(static_cast<int>(r0));
      if (color[r]) continue;
      color[r] = 1;
      stack.emplace_back(r, 0);
      while (!stack.empty()) {
        auto& [node, next] = stack.back();
        const auto& edges = closure_.edges(node);
        if (next == edges.size()) {
          color[node] = 2;
          stack.pop_back();
          continue;
        }
        int t = closure_.find(edges[next++].second);
        if (color[t] == 1) return false;
        if (color[t] == 0) {
          color[t] = 1;
          stack.emplace_back(t, 0);
        }
      }
    }
    return true;
  }

  void expand() {
    const int x = agenda_.back();
    agenda_.pop_back();
    const auto base_yield = pending_yield_;
    const auto base_nodes = pending_nodes_;
    const int sym = nodes_[x].sym;
    pending_yield_ -= c_.bounds.min_yield[sym];
    pending_nodes_ -= c_.bounds.min_nodes[sym] - 1;

    for (int k : c_.by_lhs[sym]) {
      if (stopped) break;
      const auto& r = c_.rules[k];
      bool productive = true;
      if (!r.lexical)
        for (const auto& b : r.body)
          if (c_.bounds.min_nodes[b.category] >= kUnbounded) productive = false;
      if (!productive) continue;
      if (++explored > explore_limit) {
        exhausted = true;
        stopped = true;
        break;
      }
      const auto node_mark = nodes_.size();
      const auto agenda_mark = agenda_.size();
      const auto closure_mark = closure_.mark();
      const auto stacks_mark = stacks_.mark();
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        const auto& b = r.body[i];
        auto no = static_cast<std::uint32_t>(i + 1);
        nodes_.push_back({x, no, r.lexical, b.category, k, static_cast<int>(i), new_fs_node(), 0});
        if (c_.stack_shaped && !r.lexical) nodes_.back().st = stacks_.daughter(nodes_[x].st, b.form, b.value);
        if (r.lexical) {
          if (b.category >= 0) pending_yield_ += 1;
        } else {
          pending_yield_ += c_.bounds.min_yield[b.category];
          pending_nodes_ += c_.bounds.min_nodes[b.category] - 1;
        }
        if (solving())
          for (const auto& e : b.eqs) apply(e, nodes_[x].fs, nodes_.back().fs);
      }
      for (std::size_t i = nodes_.size(); i-- > node_mark;)
        if (!(nodes_[i].leaf && nodes_[i].sym < 0)) agenda_.push_back(static_cast<int>(i));
      bool consistent = !solving() || closure_.problems() == 0;
      if (consistent && within_bounds()) step();
      nodes_.resize(node_mark);
      agenda_.resize(agenda_mark);
      stacks_.undo(stacks_mark);
      if (solving()) {
        closure_.undo(closure_mark);
        closure_.clear_clash_log();
      }
      pending_yield_ = base_yield - c_.bounds.min_yield[sym];
      pending_nodes_ = base_nodes - (c_.bounds.min_nodes[sym] - 1);
    }
    agenda_.push_back(x);
    pending_yield_ = base_yield;
    pending_nodes_ = base_nodes;
  }

  void complete() {
    switch (mode_) {
      case Mode::Exact:
        if (nodes_.size() != node_limit || emitted_.size() != target.size()) return;
        if (on_tree && !on_tree(build())) stopped = true;
        break;
      case Mode::Language:
        if (acyclic()) found.insert(emitted_);
        break;
      case Mode::Member:
        if (emitted_.size() != target.size()) return;
        if (on_tree && !on_tree(build())) stopped = true;
        break;
    }
  }

  CStructure build() const {
    const auto& s = g_.symbols();
    std::vector<TreeAddress> addr(nodes_.size());
    CStructure cs;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      CNode node;
      node.leaf = n.leaf;
      if (n.leaf)
        node.category = n.sym < 0 ? Symbol{} : s.terminals[n.sym];
      else
        node.category = s.nonterminals[n.sym];
      if (n.parent >= 0) {
        addr[i] = addr[n.parent].child(n.child_no);
        const auto& r = c_.rules[n.rule];
        node.slot = SlotRef{r.lexical, r.source, static_cast<std::size_t>(n.slot)};
        node.schema = r.lexical ? g_.lexicon()[r.source].schema
                                : g_.productions()[r.source].daughters[n.slot].schema;
      }
      cs.nodes[addr[i]] = std::move(node);
    }
    return cs;
  }

  const UnificationGrammar& g_;
  const Compiled& c_;
  Mode mode_;
  std::vector<Node> nodes_;
  std::vector<int> agenda_;
  std::vector<int> emitted_;
  detail::Closure closure_;
  SymbolicStacks stacks_;
  detail::ConsTable segments_;
  std::unordered_map<std::uint64_t, std::pair<int, int>> visible_;
  std::vector<std::pair<std::uint64_t, int>> number_;
  std::uint64_t generation_ = 0;
  int numbered_ = 0;
  std::size_t pending_yield_ = 0;
  std::size_t pending_nodes_ = 0;
  detail::KeyBuilder key_;
  detail::VisitedStates visited_;
};

std::vector<int> terminal_ids(const Compiled& c, const Word& w) {
  std::vector<int> out;
  for (const auto& sym : w) {
    auto it = c.term.find(sym);
    if (it == c.term.end()) throw Error("symbol '" + sym + "' is not a terminal of the grammar");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::size_t enumerate_cstructures(const UnificationGrammar& g, const Word& yield, const Budget& budget,
                                  const std::function<bool(const CStructure&)>& visit) {
  Compiled c(g);
  auto target = terminal_ids(c, yield);
  std::size_t count = 0;
  bool stop = false;
  for (std::size_t n = 2; n <= budget.max_nodes && !stop && count < budget.max_trees; ++n) {
    Search s(g, c, Mode::Exact);
    s.node_limit = n;
    s.yield_limit = target.size();
    s.target = target;
    s.on_tree = [&](const CStructure& cs) {
      ++count;
      if (!visit(cs)) stop = true;
      return !stop && count < budget.max_trees;
    };
    s.run();
    if (!s.pruned_by_nodes) break;
  }
  return count;
}

std::vector<CStructure> enumerate_cstructures(const UnificationGrammar& g, const Word& yield,
                                              const Budget& budget) {
  std::vector<CStructure> out;
  enumerate_cstructures(g, yield, budget, [&](const CStructure& cs) {
    out.push_back(cs);
    return true;
  });
  return out;
}

namespace {

SugMembership find_witness(const UnificationGrammar& g, const Compiled& c, const std::vector<int>& target,
                           const Budget& budget, std::size_t spent) {
  SugMembership result;
  result.explored = spent;
  for (std::size_t limit = std::min<std::size_t>(8, budget.max_nodes);; limit = std::min(2 * limit, budget.max_nodes)) {
    Search s(g, c, Mode::Member);
    s.target = target;
    s.node_limit = limit;
    s.yield_limit = target.size();
    s.explore_limit = budget.max_trees > result.explored ? budget.max_trees - result.explored : 0;
    s.on_tree = [&](const CStructure& cs) {
      auto solved = generates_check(cs);
      if (!solved.consistent()) return true;
      result.member = true;
      result.witness = cs;
      result.model = std::move(solved.model);
      return false;
    };
    s.run();
    result.explored += s.explored;
    if (result.member) break;
    if (s.exhausted) {
      result.exhausted = true;
      break;
    }
    if (!s.pruned_by_nodes || limit == budget.max_nodes) break;
  }
  return result;
}

std::optional<detail::StackLanguage> exact_language(const Compiled& c, std::size_t maxlen,
                                                    const std::vector<int>* target, const Budget& budget) {
  auto sys = stack_system(c);
  if (!sys) return std::nullopt;
  return detail::stack_language(*sys, maxlen, target, budget.max_trees);
}

}  // namespace

SugMembership sug_membership(const UnificationGrammar& g, const Word& w, const Budget& budget) {
  Compiled c(g);
  const auto target = terminal_ids(c, w);
  auto exact = exact_language(c, 0, &target, budget);
  if (exact && exact->strings.empty()) {
    SugMembership result;
    result.explored = exact->work;
    return result;
  }
  return find_witness(g, c, target, budget, exact ? exact->work : 0);
}

SugLanguageSample sug_language_upto(const UnificationGrammar& g, std::size_t maxlen, const Budget& budget) {
  Compiled c(g);
  SugLanguageSample out;
  auto by_length = [](const Word& a, const Word& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; };
  auto add = [&](const std::vector<int>& ids) {
    Word w;
    for (int t : ids) w.push_back(g.symbols().terminals[t]);
    out.strings.push_back(std::move(w));
  };
  // Strings the stack analysis admits still need a witness within budget.
  if (auto exact = exact_language(c, maxlen, nullptr, budget)) {
    out.explored = exact->work;
    for (const auto& ids : exact->strings) {
      auto m = find_witness(g, c, ids, budget, out.explored);
      out.explored = m.explored;
      out.exhausted |= m.exhausted;
      if (m.member) add(ids);
    }
    std::sort(out.strings.begin(), out.strings.end(), by_length);
    return out;
  }
  Search s(g, c, Mode::Language);
  s.node_limit = budget.max_nodes;
  s.yield_limit = maxlen;
  s.explore_limit = budget.max_trees;
  s.run();
  for (const auto& ids : s.found) add(ids);
  std::sort(out.strings.begin(), out.strings.end(), by_length);
  out.exhausted = s.exhausted;
  out.explored = s.explored;
  return out;
}

}  // namespace glab
