#pragma once

// Incremental congruence closure over attribute graphs with an undo trail.
//
// Nodes are merged with union-by-size (no path compression, so every change is
// undoable). Each class root owns the out-edges and the atomic value of the
// class. Merging two classes merges their successors along equal attributes.
// Value clashes, atoms that gain out-edges and unions that close a cycle are
// counted, not thrown, so the search can test `problems()` and backtrack.
//
// A union of classes a and b closes a cycle exactly when one already reaches
// the other. That is tested by searching forward from one side and backward
// from the other in lockstep, which stops as soon as either side runs dry.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace glab::detail {

class Closure {
 public:
  struct Clash {
    int node;
    int first;
    int second;
  };

  int add_node() {
    int id = static_cast<int>(parent_.size());
    parent_.push_back(id);
    size_.push_back(1);
    value_.push_back(-1);
    ring_.push_back(id);
    edges_.emplace_back();
    in_.emplace_back();
    fwd_.push_back(0);
    bwd_.push_back(0);
    trail_.push_back({Op::NewNode, id, 0});
    return id;
  }

  std::size_t node_count() const { return parent_.size(); }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  int value(int x) const { return value_[find(x)]; }
  const std::vector<std::pair<int, int>>& edges(int root) const { return edges_[root]; }

  int edge(int x, int attr) const {
    for (auto [a, t] : edges_[find(x)])
      if (a == attr) return t;
    return -1;
  }

  /// Follows `path` from x, creating missing nodes and edges.
  int walk(int x, const std::vector<int>& path) {
    for (int a : path) {
      int next = edge(x, a);
      if (next < 0) {
        next = add_node();
        add_edge(find(x), a, next);
      }
      x = next;
    }
    return x;
  }

  void merge(int a, int b) {
    std::vector<std::pair<int, int>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      int rx = find(x), ry = find(y);
      if (rx == ry) continue;
      if (reaches(rx, ry) || reaches(ry, rx)) {
        ++cycle_count_;
        trail_.push_back({Op::CycleCount, rx, 0});
      }
      if (size_[rx] < size_[ry]) std::swap(rx, ry);
      // ry becomes a child of rx.
      parent_[ry] = rx;
      size_[rx] += size_[ry];
      std::swap(ring_[rx], ring_[ry]);
      trail_.push_back({Op::Union, ry, 0});
      if (value_[ry] >= 0) set_value(rx, value_[ry]);
      for (auto [attr, target] : edges_[ry]) {
        int mine = -1;
        for (auto [a2, t2] : edges_[rx])
          if (a2 == attr) mine = t2;
        if (mine >= 0)
          work.emplace_back(mine, target);
        else
          add_edge(rx, attr, target);
      }
      check_atomic(rx);
    }
  }

  void assign(int x, int v) {
    int r = find(x);
    set_value(r, v);
    check_atomic(r);
  }

  std::size_t problems() const { return clash_count_ + atomic_count_ + cycle_count_; }
  std::size_t clash_count() const { return clash_count_; }
  std::size_t atomic_count() const { return atomic_count_; }
  std::size_t cycle_count() const { return cycle_count_; }
  /// Clashes in the order they were detected (not undone by `undo`).
  const std::vector<Clash>& clash_log() const { return clash_log_; }
  void clear_clash_log() { clash_log_.clear(); }

  std::size_t mark() const { return trail_.size(); }

  void undo(std::size_t to) {
    while (trail_.size() > to) {
      auto e = trail_.back();
      trail_.pop_back();
      switch (e.op) {
        case Op::NewNode:
          parent_.pop_back();
          size_.pop_back();
          value_.pop_back();
          ring_.pop_back();
          edges_.pop_back();
          in_.pop_back();
          fwd_.pop_back();
          bwd_.pop_back();
          break;
        case Op::Union: {
          int root = parent_[e.node];
          size_[root] -= size_[e.node];
          parent_[e.node] = e.node;
          std::swap(ring_[root], ring_[e.node]);
          break;
        }
        case Op::EdgeAdd:
          edges_[e.node].pop_back();
          in_[e.extra].pop_back();
          break;
        case Op::ValueSet:
          value_[e.node] = e.extra;
          break;
        case Op::ClashCount:
          --clash_count_;
          break;
        case Op::AtomicCount:
          --atomic_count_;
          break;
        case Op::CycleCount:
          --cycle_count_;
          break;
      }
    }
  }

 private:
  enum class Op { NewNode, Union, EdgeAdd, ValueSet, ClashCount, AtomicCount, CycleCount };
  struct Entry {
    Op op;
    int node;
    int extra;
  };

  void add_edge(int root, int attr, int target) {
    edges_[root].emplace_back(attr, target);
    in_[target].push_back(root);
    trail_.push_back({Op::EdgeAdd, root, target});
    check_atomic(root);
  }

  void set_value(int root, int v) {
    if (value_[root] < 0) {
      trail_.push_back({Op::ValueSet, root, value_[root]});
      value_[root] = v;
    } else if (value_[root] != v) {
      clash_log_.push_back({root, value_[root], v});
      ++clash_count_;
      trail_.push_back({Op::ClashCount, root, 0});
    }
  }

  void check_atomic(int root) {
    if (value_[root] >= 0 && !edges_[root].empty()) {
      ++atomic_count_;
      trail_.push_back({Op::AtomicCount, root, 0});
    }
  }

  // Does class a reach class b along one or more edges?
  bool reaches(int a, int b) {
    ++stamp_;
    fs_.assign(1, a);
    bs_.assign(1, b);
    fwd_[a] = stamp_;
    bwd_[b] = stamp_;
    while (!fs_.empty() && !bs_.empty()) {
      int f = fs_.back();
      fs_.pop_back();
      for (auto [attr, t] : edges_[f]) {
        int s = find(t);
        if (bwd_[s] == stamp_) return true;
        if (fwd_[s] != stamp_) fwd_[s] = stamp_, fs_.push_back(s);
      }
      int g = bs_.back();
      bs_.pop_back();
      int m = g;
      do {
        for (int p0 : in_[m]) {
          int p = find(p0);
          if (fwd_[p] == stamp_) return true;
          if (bwd_[p] != stamp_) bwd_[p] = stamp_, bs_.push_back(p);
        }
        m = ring_[m];
      } while (m != g);
    }
    return false;
  }

  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> value_;
  std::vector<int> ring_;  // circular list of class members
  std::vector<std::vector<std::pair<int, int>>> edges_;
  std::vector<std::vector<int>> in_;  // edge owners at insertion time
  std::vector<std::uint64_t> fwd_, bwd_;
  std::vector<int> fs_, bs_;
  std::uint64_t stamp_ = 0;
  std::vector<Entry> trail_;
  std::vector<Clash> clash_log_;
  std::size_t clash_count_ = 0;
  std::size_t atomic_count_ = 0;
  std::size_t cycle_count_ = 0;
};

}  // namespace glab::detail
