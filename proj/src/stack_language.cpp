#include "stack_language.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace glab::detail {

namespace {

using Clause = std::vector<int>;  // sorted state ids, all must accept

bool subset(const Clause& a, const Clause& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

Clause merge(const Clause& a, const Clause& b) {
  Clause out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct Budgeted {
  std::size_t work = 0;
  std::size_t limit = 0;
  bool failed = false;
  bool tick() {
    if (++work > limit) failed = true;
    return !failed;
  }
};

class Strings {
 public:
  int intern(const std::vector<int>& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<int>(all_.size()));
    if (inserted) all_.push_back(s);
    return it->second;
  }
  int find(const std::vector<int>& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
  }
  const std::vector<int>& operator[](int id) const { return all_[id]; }

 private:
  std::map<std::vector<int>, int> ids_;
  std::vector<std::vector<int>> all_;
};

class Solver {
 public:
  Solver(const StackSystem& s, std::size_t maxlen, const std::vector<int>* target, std::size_t limit)
      : s_(s), maxlen_(maxlen), target_(target) {
    b_.limit = limit;
  }

  bool saturate_all() {
    skeleton();
    if (b_.failed) return false;
    for (int w : sk_[s_.start])
      if (!target_ || strings_[w] == *target_) goals_.emplace_back(w, nt_state(s_.start, w));
    saturate();
    return !b_.failed;
  }

  bool accepted(int q) { return s_.empty_start ? states_[q].acc : nonempty(q); }

  // Existing (A, w) state, or -1 when no derivation of a goal uses one.
  int find_nt(int nt, const std::vector<int>& w) const {
    int str = strings_.find(w);
    if (str < 0) return -1;
    auto it = ids_.find(std::make_tuple(static_cast<int>(Kind::Nt), -1, nt, str));
    return it == ids_.end() ? -1 : it->second;
  }

  std::vector<int> accepting_empty() const {
    std::vector<int> out;
    for (std::size_t q = 0; q < states_.size(); ++q)
      if (states_[q].acc) out.push_back(static_cast<int>(q));
    return out;
  }

  std::vector<int> accepting_push(int f, const std::vector<int>& below) const {
    std::vector<int> out;
    for (std::size_t q = 0; q < states_.size(); ++q)
      for (const auto& c : states_[q].succ[f])
        if (subset(c, below)) {
          out.push_back(static_cast<int>(q));
          break;
        }
    return out;
  }

  std::size_t work() const { return b_.work; }
  const std::vector<std::pair<int, int>>& goals() const { return goals_; }

  std::optional<StackLanguage> run() {
    if (!saturate_all()) return std::nullopt;
    StackLanguage out;
    for (auto [w, q] : goals_) {
      bool yes = accepted(q);
      if (b_.failed) return std::nullopt;
      if (yes) out.strings.push_back(strings_[w]);
    }
    out.work = b_.work;
    return out;
  }

 private:
  enum class Kind { Nt, Push, Pop };
  struct State {
    Kind kind = Kind::Nt;
    int index = -1;
    int nt = -1;
    int str = -1;
    bool acc = false;
    std::vector<Clause> eps;
    std::vector<std::vector<Clause>> succ;  // per index
    std::vector<std::pair<int, int>> occurs;  // (state, eps clause) mentioning this state
    std::vector<int> pushers;  // Push states wrapping this one
  };
  enum class Event { Succ, Eps, Acc };
  struct Pending {
    Event e;
    int q;
    int f;
    int i;
  };

  bool allowed(const std::vector<int>& w) const {
    if (w.size() > maxlen_) return false;
    if (!target_ || w.empty()) return true;
    return std::search(target_->begin(), target_->end(), w.begin(), w.end()) != target_->end();
  }

  // Strings of the context-free skeleton, per nonterminal.
  void skeleton() {
    sk_.assign(s_.nonterminals, {});
    in_sk_.assign(s_.nonterminals, {});
    bool changed = true;
    std::vector<int> buf;
    while (changed && !b_.failed) {
      changed = false;
      for (const auto& r : s_.rules) {
        std::function<void(std::size_t)> go = [&](std::size_t k) {
          if (b_.failed) return;
          if (k == r.items.size()) {
            if (!b_.tick()) return;
            int id = strings_.intern(buf);
            if (in_sk_[r.lhs].insert(id).second) {
              sk_[r.lhs].push_back(id);
              changed = true;
            }
            return;
          }
          const auto& it = r.items[k];
          if (it.terminal) {
            buf.push_back(it.id);
            if (allowed(buf)) go(k + 1);
            buf.pop_back();
            return;
          }
          const auto n = sk_[it.id].size();
          for (std::size_t j = 0; j < n; ++j) {
            const auto& part = strings_[sk_[it.id][j]];
            auto base = buf.size();
            buf.insert(buf.end(), part.begin(), part.end());
            if (allowed(buf)) go(k + 1);
            buf.resize(base);
          }
        };
        go(0);
      }
    }
  }

  int state(Kind kind, int index, int nt, int str) {
    auto key = std::make_tuple(static_cast<int>(kind), index, nt, str);
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(states_.size()));
    if (!inserted) return it->second;
    int q = it->second;
    State st;
    st.kind = kind;
    st.index = index;
    st.nt = nt;
    st.str = str;
    st.succ.resize(s_.indices);
    states_.push_back(std::move(st));
    switch (kind) {
      case Kind::Nt: unexpanded_.push_back(q); break;
      case Kind::Push: {
        int inner = nt_state(nt, str);
        states_[inner].pushers.push_back(q);
        auto existing = states_[inner].succ[index];
        for (const auto& c : existing) add_eps(q, c);
        break;
      }
      case Kind::Pop: add_succ(q, index, {nt_state(nt, str)}); break;
    }
    return q;
  }
  int nt_state(int nt, int str) { return state(Kind::Nt, -1, nt, str); }

  void expand(int q) {
    const int a = states_[q].nt;
    const auto w = strings_[states_[q].str];
    std::vector<int> parts;
    for (const auto& r : s_.rules) {
      if (r.lhs != a) continue;
      std::function<void(std::size_t, std::size_t)> go = [&](std::size_t k, std::size_t pos) {
        if (b_.failed) return;
        if (k == r.items.size()) {
          if (pos != w.size() || !b_.tick()) return;
          Clause c;
          std::size_t p = 0;
          for (const auto& it : r.items) {
            if (it.terminal) continue;
            int str = parts[p++];
            switch (it.op) {
              case StackOp::Share: c.push_back(nt_state(it.id, str)); break;
              case StackOp::Push: c.push_back(state(Kind::Push, it.index, it.id, str)); break;
              case StackOp::Pop: c.push_back(state(Kind::Pop, it.index, it.id, str)); break;
            }
          }
          std::sort(c.begin(), c.end());
          c.erase(std::unique(c.begin(), c.end()), c.end());
          if (r.pop >= 0)
            add_succ(q, r.pop, std::move(c));
          else
            add_eps(q, std::move(c));
          return;
        }
        const auto& it = r.items[k];
        if (it.terminal) {
          if (pos < w.size() && w[pos] == it.id) go(k + 1, pos + 1);
          return;
        }
        for (std::size_t end = pos; end <= w.size(); ++end) {
          int id = strings_.find(std::vector<int>(w.begin() + pos, w.begin() + end));
          if (id < 0 || !in_sk_[it.id].count(id)) continue;
          parts.push_back(id);
          go(k + 1, end);
          parts.pop_back();
        }
      };
      go(0, 0);
    }
  }

  void add_succ(int q, int f, Clause c) {
    auto& list = states_[q].succ[f];
    for (const auto& old : list)
      if (subset(old, c)) return;
    list.push_back(std::move(c));
    events_.push_back({Event::Succ, q, f, static_cast<int>(list.size() - 1)});
  }

  void add_eps(int r, Clause c) {
    auto& list = states_[r].eps;
    for (const auto& old : list)
      if (subset(old, c)) return;
    list.push_back(std::move(c));
    int e = static_cast<int>(list.size() - 1);
    for (int m : states_[r].eps[e]) states_[m].occurs.emplace_back(r, e);
    events_.push_back({Event::Eps, r, -1, e});
  }

  void set_acc(int q) {
    if (states_[q].acc) return;
    states_[q].acc = true;
    events_.push_back({Event::Acc, q, -1, -1});
  }

  bool all_acc(const Clause& c) const {
    return std::all_of(c.begin(), c.end(), [&](int m) { return states_[m].acc; });
  }

  // Every way of reading f from all states in `members`, one successor
  // clause each, joined with `base`.
  void product(const std::vector<int>& members, int f, const Clause& base, const std::function<void(Clause)>& emit) {
    std::function<void(std::size_t, const Clause&)> go = [&](std::size_t k, const Clause& acc) {
      if (b_.failed) return;
      if (k == members.size()) {
        if (b_.tick()) emit(acc);
        return;
      }
      const auto n = states_[members[k]].succ[f].size();
      for (std::size_t j = 0; j < n; ++j) go(k + 1, merge(acc, states_[members[k]].succ[f][j]));
    };
    go(0, base);
  }

  void saturate() {
    while (!b_.failed && (!unexpanded_.empty() || !events_.empty())) {
      if (!unexpanded_.empty()) {
        int q = unexpanded_.back();
        unexpanded_.pop_back();
        expand(q);
        continue;
      }
      auto ev = events_.front();
      events_.pop_front();
      switch (ev.e) {
        case Event::Succ: {
          const Clause c = states_[ev.q].succ[ev.f][ev.i];
          const auto pushers = states_[ev.q].pushers;
          for (int p : pushers)
            if (states_[p].index == ev.f) add_eps(p, c);
          for (std::size_t k = 0; k < states_[ev.q].occurs.size(); ++k) {
            auto [r, e] = states_[ev.q].occurs[k];
            std::vector<int> others;
            for (int m : states_[r].eps[e])
              if (m != ev.q) others.push_back(m);
            product(others, ev.f, c, [&](Clause u) { add_succ(r, ev.f, std::move(u)); });
          }
          break;
        }
        case Event::Eps: {
          const Clause e = states_[ev.q].eps[ev.i];
          if (all_acc(e)) set_acc(ev.q);
          for (int f = 0; f < static_cast<int>(s_.indices); ++f)
            product(e, f, {}, [&](Clause u) { add_succ(ev.q, f, std::move(u)); });
          break;
        }
        case Event::Acc:
          for (std::size_t k = 0; k < states_[ev.q].occurs.size(); ++k) {
            auto [r, e] = states_[ev.q].occurs[k];
            if (all_acc(states_[r].eps[e])) set_acc(r);
          }
          break;
      }
    }
  }

  // Some stack is accepted from q: search over sets of states that must
  // all accept the rest of the stack.
  bool nonempty(int q) {
    std::set<Clause> seen{{q}};
    std::deque<Clause> work{{q}};
    while (!work.empty()) {
      auto m = std::move(work.front());
      work.pop_front();
      if (all_acc(m)) return true;
      bool found = false;
      for (int f = 0; f < static_cast<int>(s_.indices) && !found; ++f)
        product(m, f, {}, [&](Clause u) {
          if (u.empty()) found = true;
          if (seen.insert(u).second) work.push_back(std::move(u));
        });
      if (found) return true;
      if (b_.failed) return false;
    }
    return false;
  }

  const StackSystem& s_;
  std::size_t maxlen_;
  const std::vector<int>* target_;
  Budgeted b_;
  Strings strings_;
  std::vector<std::vector<int>> sk_;
  std::vector<std::set<int>> in_sk_;
  std::map<std::tuple<int, int, int, int>, int> ids_;
  std::vector<State> states_;
  std::vector<int> unexpanded_;
  std::deque<Pending> events_;
  std::vector<std::pair<int, int>> goals_;  // (string, state)
};

}  // namespace

struct TargetAnalysis::Impl {
  Impl(const StackSystem& s, const std::vector<int>& t, std::size_t limit)
      : target(t), solver(s, t.size(), &target, limit) {}
  std::vector<int> target;
  Solver solver;
  bool derivable = false;
  // Summaries are interned sets of accepting states.
  std::map<std::vector<int>, int> summary_ids;
  std::vector<std::vector<int>> summaries;
  std::map<std::pair<int, int>, int> pushed;
  // nt_states[nt][i][j - i]: state for target[i, j), -1 if absent.
  std::vector<std::vector<std::vector<int>>> nt_states;

  int intern(std::vector<int> set) {
    auto [it, inserted] = summary_ids.try_emplace(set, static_cast<int>(summaries.size()));
    if (inserted) summaries.push_back(std::move(set));
    return it->second;
  }
};

TargetAnalysis::TargetAnalysis(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
TargetAnalysis::~TargetAnalysis() = default;

std::unique_ptr<TargetAnalysis> TargetAnalysis::build(const StackSystem& s, const std::vector<int>& target,
                                                      std::size_t work_limit) {
  auto impl = std::make_unique<Impl>(s, target, work_limit);
  if (!impl->solver.saturate_all()) return nullptr;
  for (auto [w, q] : impl->solver.goals()) impl->derivable = impl->derivable || impl->solver.accepted(q);
  const auto n = target.size();
  impl->nt_states.assign(s.nonterminals, std::vector<std::vector<int>>(n + 1));
  for (std::size_t a = 0; a < s.nonterminals; ++a)
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j)
        impl->nt_states[a][i].push_back(impl->solver.find_nt(
            static_cast<int>(a), std::vector<int>(target.begin() + static_cast<std::ptrdiff_t>(i),
                                                  target.begin() + static_cast<std::ptrdiff_t>(j))));
  impl->intern(impl->solver.accepting_empty());
  return std::unique_ptr<TargetAnalysis>(new TargetAnalysis(std::move(impl)));
}

bool TargetAnalysis::derivable() const { return impl_->derivable; }
std::size_t TargetAnalysis::work() const { return impl_->solver.work(); }
int TargetAnalysis::empty_stack() const { return 0; }

int TargetAnalysis::push(int index, int below) {
  auto [it, inserted] = impl_->pushed.try_emplace({index, below}, -1);
  if (inserted) it->second = impl_->intern(impl_->solver.accepting_push(index, impl_->summaries[below]));
  return it->second;
}

bool TargetAnalysis::derives(int nt, std::size_t i, std::size_t j, int stack) const {
  int q = impl_->nt_states[nt][i][j - i];
  if (q < 0) return false;
  const auto& set = impl_->summaries[stack];
  return std::binary_search(set.begin(), set.end(), q);
}

std::optional<StackLanguage> stack_language(const StackSystem& s, std::size_t maxlen, const std::vector<int>* target,
                                            std::size_t work_limit) {
  if (target) maxlen = target->size();
  return Solver(s, maxlen, target, work_limit).run();
}

}  // namespace glab::detail
