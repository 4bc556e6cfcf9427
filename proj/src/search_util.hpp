#pragma once

// Helpers shared by the indexed and unification searches.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace glab::detail {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max() / 4;

/// Minimal yield length and minimal subtree size per nonterminal of the
/// context-free skeleton (index stacks / feature constraints ignored). Both are
/// lower bounds for the real grammar. kUnbounded marks unproductive symbols.
struct SkeletonBounds {
  std::vector<std::size_t> min_yield;
  std::vector<std::size_t> min_nodes;
};

/// A skeleton rule: lhs and a body of (is_nonterminal, id); an empty body is a
/// single ε leaf.
struct SkeletonRule {
  int lhs;
  std::vector<std::pair<bool, int>> body;
};

inline SkeletonBounds skeleton_bounds(std::size_t nonterminals, const std::vector<SkeletonRule>& rules) {
  SkeletonBounds b{std::vector<std::size_t>(nonterminals, kUnbounded),
                   std::vector<std::size_t>(nonterminals, kUnbounded)};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules) {
      std::size_t y = 0, n = 1;
      if (r.body.empty()) n = 2;
      for (auto [nt, id] : r.body) {
        if (nt) {
          y += b.min_yield[id];
          n += b.min_nodes[id];
        } else {
          y += 1;
          n += 1;
        }
      }
      y = std::min(y, kUnbounded);
      n = std::min(n, kUnbounded);
      if (y < b.min_yield[r.lhs]) b.min_yield[r.lhs] = y, changed = true;
      if (n < b.min_nodes[r.lhs]) b.min_nodes[r.lhs] = n, changed = true;
    }
  }
  return b;
}

/// For every nonterminal, the set of nonterminals reachable from it through
/// rule bodies (itself included). `edges[a]` lists the body nonterminals of
/// a's rules.
inline std::vector<std::vector<bool>> reachable(const std::vector<std::vector<int>>& edges) {
  const auto n = edges.size();
  std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<int> work{static_cast<int>(a)};
    out[a][a] = true;
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      for (int y : edges[x])
        if (!out[a][y]) out[a][y] = true, work.push_back(y);
    }
  }
  return out;
}

/// Hash-consed (head, tail) pairs; equal contents get equal ids.
class ConsTable {
 public:
  int cons(int head, int tail) {
    auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(head)) << 32) |
               static_cast<std::uint32_t>(tail);
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(cells_.size()));
    if (inserted) cells_.emplace_back(head, tail);
    return it->second;
  }
  const std::pair<int, int>& cell(int id) const { return cells_[id]; }

 private:
  std::vector<std::pair<int, int>> cells_;
  std::unordered_map<std::uint64_t, int> ids_;
};

/// Packs ints into a string key for the visited-state table.
class KeyBuilder {
 public:
  void clear() { key_.clear(); }
  void add(std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    do {
      auto byte = static_cast<char>(u & 0x7f);
      u >>= 7;
      if (u) byte = static_cast<char>(byte | 0x80);
      key_.push_back(byte);
    } while (u);
  }
  const std::string& str() const { return key_; }

 private:
  std::string key_;
};

/// Visited states keyed by (state) with the node budget that remained when
/// the state was explored. A state reached again with no more budget cannot
/// produce anything new.
class VisitedStates {
 public:
  /// True when the state must be explored (and records it).
  bool enter(const std::string& key, std::size_t remaining) {
    auto [it, inserted] = seen_.try_emplace(key, remaining);
    if (inserted) return true;
    if (it->second >= remaining) return false;
    it->second = remaining;
    return true;
  }
  std::size_t size() const { return seen_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> seen_;
};

}  // namespace glab::detail
