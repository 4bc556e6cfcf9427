#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "glab/indexed.hpp"
#include "search_util.hpp"
#include "stack_language.hpp"

namespace glab {

namespace {

using detail::kUnbounded;

struct Item {
  bool nonterminal;
  int id;  // terminal id or nonterminal id
};

struct CompiledRule {
  RuleKind kind;
  int lhs;
  int index;  // -1 for plain
  std::vector<Item> body;
};

// Integer view of a grammar plus skeleton bounds.
struct Compiled {
  explicit Compiled(const IndexedGrammar& g) {
    const auto& s = g.symbols();
    for (std::size_t i = 0; i < s.nonterminals.size(); ++i) nt[s.nonterminals[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < s.terminals.size(); ++i) term[s.terminals[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < s.indices.size(); ++i) idx[s.indices[i]] = static_cast<int>(i);
    by_lhs.resize(s.nonterminals.size());
    std::vector<detail::SkeletonRule> skeleton;
    for (std::size_t k = 0; k < g.productions().size(); ++k) {
      const auto& p = g.productions()[k];
      CompiledRule r{p.kind, nt.at(p.lhs), p.kind == RuleKind::Plain ? -1 : idx.at(p.index), {}};
      detail::SkeletonRule sk{r.lhs, {}};
      for (const auto& b : p.rhs) {
        bool is_nt = nt.count(b) != 0;
        r.body.push_back({is_nt, is_nt ? nt.at(b) : term.at(b)});
        sk.body.emplace_back(is_nt, r.body.back().id);
      }
      rules.push_back(std::move(r));
      skeleton.push_back(std::move(sk));
      by_lhs[rules.back().lhs].push_back(static_cast<int>(k));
    }
    bounds = detail::skeleton_bounds(s.nonterminals.size(), skeleton);
    start = nt.at(g.start());

    std::vector<std::vector<int>> edges(s.nonterminals.size());
    for (const auto& r : rules)
      for (const auto& b : r.body)
        if (b.nonterminal) edges[r.lhs].push_back(b.id);
    auto reach = detail::reachable(edges);
    poppable.assign(s.nonterminals.size(), std::vector<bool>(s.indices.size(), false));
    for (std::size_t a = 0; a < s.nonterminals.size(); ++a)
      for (const auto& r : rules)
        if (r.kind == RuleKind::Pop && reach[a][r.lhs]) poppable[a][r.index] = true;
  }

  std::map<Symbol, int> nt, term, idx;
  // poppable[A][f]: some rule reachable from A pops f. A subtree of A never
  // looks below an index it cannot pop.
  std::vector<std::vector<bool>> poppable;
  std::vector<CompiledRule> rules;
  std::vector<std::vector<int>> by_lhs;
  detail::SkeletonBounds bounds;
  int start = 0;
};

detail::StackSystem stack_system(const Compiled& c) {
  detail::StackSystem sys;
  sys.nonterminals = c.nt.size();
  sys.indices = c.idx.size();
  sys.start = c.start;
  for (const auto& r : c.rules) {
    detail::StackRule sr;
    sr.lhs = r.lhs;
    if (r.kind == RuleKind::Pop) sr.pop = r.index;
    for (const auto& b : r.body) {
      detail::StackItem it{!b.nonterminal, b.id};
      if (r.kind == RuleKind::Push) {
        it.op = detail::StackOp::Push;
        it.index = r.index;
      }
      sr.items.push_back(it);
    }
    sys.rules.push_back(std::move(sr));
  }
  return sys;
}

enum class Mode { Exact, Language, Member };

// Leftmost depth-first construction of derivation trees. Nodes are expanded in
// tree order, so terminals come out left to right and the sequence of rules
// tried is ordered by production index at each address.
class Search {
 public:
  Search(const IndexedGrammar& g, const Compiled& c, Mode mode) : g_(g), c_(c), mode_(mode) {}

  std::size_t node_limit = kUnbounded;
  std::size_t yield_limit = kUnbounded;
  std::size_t explore_limit = kUnbounded;
  std::vector<int> target;  // Member mode
  // Member mode: cuts partial trees whose open nodes cannot derive the rest
  // of the target.
  detail::TargetAnalysis* analysis = nullptr;
  std::function<bool(const DerivationTree&)> on_tree;
  std::set<std::vector<int>> found;  // Language mode

  bool exhausted = false;
  bool pruned_by_nodes = false;
  bool stopped = false;
  std::size_t explored = 0;

  void run() {
    nodes_.push_back({-1, 0, false, c_.start, -1, -1});
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
    int sym;    // nonterminal id; terminal id for leaves, -1 for ε
    int stack;  // -1 = empty
    int rule;
  };

  int push_stack(int index, int below) { return cells_.cons(index, below); }

  bool within_bounds() {
    if (nodes_.size() + pending_nodes_ > node_limit) {
      pruned_by_nodes = true;
      return false;
    }
    return emitted_.size() + pending_yield_ <= yield_limit;
  }

  void step() {
    // Emit leading terminal leaves.
    const auto saved_emitted = emitted_.size();
    const auto saved_yield = pending_yield_;
    std::vector<int> popped;
    bool ok = true;
    while (!agenda_.empty() && nodes_[agenda_.back()].leaf) {
      int t = nodes_[agenda_.back()].sym;
      popped.push_back(agenda_.back());
      agenda_.pop_back();
      --pending_yield_;
      if (mode_ == Mode::Member && (emitted_.size() >= target.size() || target[emitted_.size()] != t)) {
        ok = false;
        break;
      }
      emitted_.push_back(t);
    }
    if (ok) {
      if (agenda_.empty())
        complete();
      else if (mode_ == Mode::Exact || (completable() && visit_state()))
        expand();
    }
    emitted_.resize(saved_emitted);
    pending_yield_ = saved_yield;
    for (auto it = popped.rbegin(); it != popped.rend(); ++it) agenda_.push_back(*it);
  }

  int summary(int stack) {
    if (stack < 0) return analysis->empty_stack();
    if (static_cast<std::size_t>(stack) >= summary_.size()) summary_.resize(stack + 1, -1);
    if (summary_[stack] < 0) {
      auto [top, below] = cells_.cell(stack);
      int s = analysis->push(top, summary(below));
      summary_[stack] = s;
    }
    return summary_[stack];
  }

  // Positions of the target reachable by the open nodes in order.
  bool completable() {
    if (!analysis) return true;
    const auto n = target.size();
    std::vector<char> reach(n + 1, 0), next(n + 1);
    reach[emitted_.size()] = 1;
    for (auto it = agenda_.rbegin(); it != agenda_.rend(); ++it) {
      const auto& node = nodes_[*it];
      std::fill(next.begin(), next.end(), 0);
      bool any = false;
      for (std::size_t i = 0; i <= n; ++i) {
        if (!reach[i]) continue;
        if (node.leaf) {
          if (i < n && target[i] == node.sym) next[i + 1] = any = true;
          continue;
        }
        int s = summary(node.stack);
        for (std::size_t j = i; j <= n; ++j)
          if (analysis->derives(node.sym, i, j, s)) next[j] = any = true;
      }
      if (!any) return false;
      reach.swap(next);
    }
    return reach[n] != 0;
  }

  // The stack cut just below the first index that `sym` cannot pop, as a
  // hash-consed cell.
  int visible_stack(int sym, int stack) {
    if (stack < 0) return -1;
    auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(stack)) << 32) |
               static_cast<std::uint32_t>(sym);
    if (auto it = visible_.find(key); it != visible_.end()) return it->second;
    auto [top, below] = cells_.cell(stack);
    int out = push_stack(top, c_.poppable[sym][top] ? visible_stack(sym, below) : -1);
    visible_.emplace(key, out);
    return out;
  }

  bool visit_state() {
    key_.clear();
    if (mode_ == Mode::Language) {
      key_.add(static_cast<std::int64_t>(emitted_.size()));
      for (int t : emitted_) key_.add(t);
    } else {
      key_.add(static_cast<std::int64_t>(emitted_.size()));
    }
    for (auto it = agenda_.rbegin(); it != agenda_.rend(); ++it) {
      const auto& n = nodes_[*it];
      if (n.leaf) {
        key_.add(-2 - n.sym);
      } else {
        key_.add(n.sym);
        key_.add(visible_stack(n.sym, n.stack) + 1);
      }
    }
    return visited_.enter(key_.str(), node_limit - nodes_.size());
  }

  void expand() {
    const int x = agenda_.back();
    agenda_.pop_back();
    const auto base_yield = pending_yield_;
    const auto base_nodes = pending_nodes_;
    const int sym = nodes_[x].sym;
    const int stack = nodes_[x].stack;
    pending_yield_ -= c_.bounds.min_yield[sym];
    pending_nodes_ -= c_.bounds.min_nodes[sym] - 1;

    for (int k : c_.by_lhs[sym]) {
      if (stopped) break;
      const auto& r = c_.rules[k];
      int child_stack = stack;
      if (r.kind == RuleKind::Push) {
        child_stack = push_stack(r.index, stack);
      } else if (r.kind == RuleKind::Pop) {
        if (stack < 0 || cells_.cell(stack).first != r.index) continue;
        child_stack = cells_.cell(stack).second;
      }
      bool productive = true;
      for (const auto& b : r.body)
        if (b.nonterminal && c_.bounds.min_nodes[b.id] >= kUnbounded) productive = false;
      if (!productive) continue;

      if (++explored > explore_limit) {
        exhausted = true;
        stopped = true;
        break;
      }
      const auto node_mark = nodes_.size();
      const auto agenda_mark = agenda_.size();
      nodes_[x].rule = k;
      if (r.body.empty()) {
        nodes_.push_back({x, 1, true, -1, -1, -1});
      } else {
        for (std::size_t i = 0; i < r.body.size(); ++i) {
          const auto& b = r.body[i];
          auto no = static_cast<std::uint32_t>(i + 1);
          if (b.nonterminal) {
            nodes_.push_back({x, no, false, b.id, child_stack, -1});
            pending_yield_ += c_.bounds.min_yield[b.id];
            pending_nodes_ += c_.bounds.min_nodes[b.id] - 1;
          } else {
            nodes_.push_back({x, no, true, b.id, -1, -1});
            pending_yield_ += 1;
          }
        }
        for (std::size_t i = nodes_.size(); i-- > node_mark;)
          if (!(nodes_[i].leaf && nodes_[i].sym < 0)) push_agenda(static_cast<int>(i));
      }
      if (within_bounds()) step();
      nodes_.resize(node_mark);
      agenda_.resize(agenda_mark);
      pending_yield_ = base_yield - c_.bounds.min_yield[sym];
      pending_nodes_ = base_nodes - (c_.bounds.min_nodes[sym] - 1);
    }
    nodes_[x].rule = -1;
    push_agenda(x);
    pending_yield_ = base_yield;
    pending_nodes_ = base_nodes;
  }

  void push_agenda(int node) { agenda_.push_back(node); }

  void complete() {
    switch (mode_) {
      case Mode::Exact:
        if (nodes_.size() != node_limit) return;
        if (on_tree && !on_tree(build_tree())) stopped = true;
        break;
      case Mode::Language:
        found.insert(emitted_);
        break;
      case Mode::Member:
        if (emitted_.size() != target.size()) return;
        if (on_tree) on_tree(build_tree());
        stopped = true;
        break;
    }
  }

  DerivationTree build_tree() const {
    const auto& s = g_.symbols();
    std::vector<TreeAddress> addr(nodes_.size());
    DerivationTree t;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (n.parent >= 0) addr[i] = addr[n.parent].child(n.child_no);
      if (n.leaf) {
        t.labels[addr[i]] = n.sym < 0 ? NodeLabel::epsilon() : NodeLabel::terminal(s.terminals[n.sym]);
      } else {
        Word stack;
        for (int c = n.stack; c >= 0; c = cells_.cell(c).second) stack.push_back(s.indices[cells_.cell(c).first]);
        t.labels[addr[i]] = NodeLabel::nonterminal(s.nonterminals[n.sym], std::move(stack));
      }
    }
    return t;
  }

  const IndexedGrammar& g_;
  const Compiled& c_;
  Mode mode_;
  std::vector<Node> nodes_;
  std::vector<int> agenda_;
  std::vector<int> emitted_;
  detail::ConsTable cells_;
  std::vector<int> summary_;
  std::unordered_map<std::uint64_t, int> visible_;
  std::size_t pending_yield_ = 0;
  std::size_t pending_nodes_ = 0;
  detail::KeyBuilder key_;
  detail::VisitedStates visited_;
};

bool shorter_then_lex(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::size_t enumerate_derivations(const IndexedGrammar& g, const Budget& budget,
                                  const std::function<bool(const DerivationTree&)>& visit) {
  Compiled c(g);
  std::size_t count = 0;
  bool stop = false;
  for (std::size_t n = 2; n <= budget.max_nodes && !stop && count < budget.max_trees; ++n) {
    Search s(g, c, Mode::Exact);
    s.node_limit = n;
    s.on_tree = [&](const DerivationTree& t) {
      ++count;
      if (!visit(t)) stop = true;
      return !stop && count < budget.max_trees;
    };
    s.run();
    // Nothing was cut at this size, so no larger tree exists.
    if (!s.pruned_by_nodes) break;
  }
  return count;
}

std::vector<DerivationTree> enumerate_derivations(const IndexedGrammar& g, const Budget& budget) {
  std::vector<DerivationTree> out;
  enumerate_derivations(g, budget, [&](const DerivationTree& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

namespace {

std::vector<int> terminal_ids(const Compiled& c, const Word& w) {
  std::vector<int> out;
  for (const auto& sym : w) {
    auto it = c.term.find(sym);
    if (it == c.term.end()) throw Error("symbol '" + sym + "' is not a terminal of the grammar");
    out.push_back(it->second);
  }
  return out;
}

// Doubling node bounds, so that small witnesses are found first.
IndexedMembership find_witness(const IndexedGrammar& g, const Compiled& c, const std::vector<int>& target,
                               const Budget& budget, std::size_t spent) {
  IndexedMembership result;
  auto analysis = detail::TargetAnalysis::build(stack_system(c), target, budget.max_trees);
  result.explored = spent + (analysis ? analysis->work() : 0);
  // An exact "no" spares the search.
  if (analysis && !analysis->derivable()) return result;
  for (std::size_t limit = std::min<std::size_t>(8, budget.max_nodes);; limit = std::min(2 * limit, budget.max_nodes)) {
    Search s(g, c, Mode::Member);
    s.target = target;
    s.analysis = analysis.get();
    s.node_limit = limit;
    s.yield_limit = target.size();
    s.explore_limit = budget.max_trees > result.explored ? budget.max_trees - result.explored : 0;
    s.on_tree = [&](const DerivationTree& t) {
      result.member = true;
      result.witness = t;
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

}  // namespace

IndexedMembership indexed_membership(const IndexedGrammar& g, const Word& w, const Budget& budget) {
  Compiled c(g);
  return find_witness(g, c, terminal_ids(c, w), budget, 0);
}

LanguageSample indexed_language_upto(const IndexedGrammar& g, std::size_t maxlen, const Budget& budget) {
  Compiled c(g);
  LanguageSample out;
  // Strings the stack analysis admits still need a witness within budget.
  if (auto exact = detail::stack_language(stack_system(c), maxlen, nullptr, budget.max_trees)) {
    out.explored = exact->work;
    for (const auto& ids : exact->strings) {
      auto m = find_witness(g, c, ids, budget, out.explored);
      out.explored = m.explored;
      out.exhausted |= m.exhausted;
      if (!m.member) continue;
      Word w;
      for (int t : ids) w.push_back(g.symbols().terminals[t]);
      out.strings.push_back(std::move(w));
    }
    std::sort(out.strings.begin(), out.strings.end(), shorter_then_lex);
    return out;
  }
  Search s(g, c, Mode::Language);
  s.node_limit = budget.max_nodes;
  s.yield_limit = maxlen;
  s.explore_limit = budget.max_trees;
  s.run();
  for (const auto& ids : s.found) {
    Word w;
    for (int t : ids) w.push_back(g.symbols().terminals[t]);
    out.strings.push_back(std::move(w));
  }
  std::sort(out.strings.begin(), out.strings.end(), shorter_then_lex);
  out.exhausted = s.exhausted;
  out.explored = s.explored;
  return out;
}

}  // namespace glab
