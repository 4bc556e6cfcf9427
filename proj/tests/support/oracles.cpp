#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace glab::testing {

namespace {

constexpr int kNone = -1;

struct Problem {
  std::vector<TreeAddress> names;
  std::vector<Attribute> attrs;
  std::vector<Symbol> values;
  // Equations with names, attributes and values replaced by indices.
  struct Eq {
    int x;
    std::vector<int> p;
    int y;  // -1 for a value equation
    std::vector<int> q;
    int value;
  };
  std::vector<Eq> eqs;
};

template <class T>
int index_of(std::vector<T>& v, const T& x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) return static_cast<int>(it - v.begin());
  v.push_back(x);
  return static_cast<int>(v.size() - 1);
}

Problem compile(const std::vector<Equation>& es) {
  Problem pr;
  auto path = [&](const Path& p) {
    std::vector<int> out;
    for (const auto& a : p) out.push_back(index_of(pr.attrs, a));
    return out;
  };
  for (const auto& e : es) {
    if (const auto* pe = std::get_if<PathEquation>(&e)) {
      pr.eqs.push_back({index_of(pr.names, pe->lhs_name), path(pe->lhs_path), index_of(pr.names, pe->rhs_name),
                        path(pe->rhs_path), -1});
    } else {
      const auto& ve = std::get<ValueEquation>(e);
      pr.eqs.push_back({index_of(pr.names, ve.name), path(ve.path), -1, {}, index_of(pr.values, ve.value)});
    }
  }
  return pr;
}

struct Search {
  const Problem& pr;
  int n;
  std::vector<int> delta;  // node * |attrs| + attr
  std::vector<int> alpha;
  std::vector<int> name;

  int walk(int q, const std::vector<int>& p) const {
    for (int a : p) {
      q = delta[q * pr.attrs.size() + a];
      if (q == kNone) return kNone;
    }
    return q;
  }

  bool satisfied() const {
    for (const auto& e : pr.eqs) {
      int l = walk(name[e.x], e.p);
      if (l == kNone) return false;
      if (e.y < 0) {
        if (alpha[l] != e.value) return false;
      } else {
        int r = walk(name[e.y], e.q);
        if (r != l) return false;
      }
    }
    return true;
  }

  bool names_from(std::size_t i) {
    if (i == pr.names.size()) return satisfied();
    for (int q = 0; q < n; ++q) {
      name[i] = q;
      if (names_from(i + 1)) return true;
    }
    return false;
  }

  bool alpha_from(int q) {
    if (q == n) return names_from(0);
    bool has_edge = false;
    for (std::size_t a = 0; a < pr.attrs.size(); ++a) has_edge |= delta[q * pr.attrs.size() + a] != kNone;
    alpha[q] = kNone;
    if (alpha_from(q + 1)) return true;
    if (has_edge) return false;
    for (int v = 0; v < static_cast<int>(pr.values.size()); ++v) {
      alpha[q] = v;
      if (alpha_from(q + 1)) return true;
    }
    alpha[q] = kNone;
    return false;
  }

  // Edges only go upwards in node number.
  bool delta_from(std::size_t slot) {
    if (slot == delta.size()) return alpha_from(0);
    int q = static_cast<int>(slot / std::max<std::size_t>(pr.attrs.size(), 1));
    delta[slot] = kNone;
    if (delta_from(slot + 1)) return true;
    for (int t = q + 1; t < n; ++t) {
      delta[slot] = t;
      if (delta_from(slot + 1)) return true;
    }
    delta[slot] = kNone;
    return false;
  }

  FeatureStructure structure() const {
    FeatureStructure m;
    m.node_count = static_cast<std::size_t>(n);
    for (int q = 0; q < n; ++q) {
      for (std::size_t a = 0; a < pr.attrs.size(); ++a)
        if (int t = delta[q * pr.attrs.size() + a]; t != kNone)
          m.delta[{static_cast<NodeId>(q), pr.attrs[a]}] = static_cast<NodeId>(t);
      if (alpha[q] != kNone) m.alpha[static_cast<NodeId>(q)] = pr.values[alpha[q]];
    }
    for (std::size_t i = 0; i < pr.names.size(); ++i) m.names[pr.names[i]] = static_cast<NodeId>(name[i]);
    return m;
  }
};

}  // namespace

std::optional<FeatureStructure> brute_force_model(const std::vector<Equation>& es, std::size_t max_nodes,
                                                  std::size_t min_nodes) {
  auto pr = compile(es);
  // A model never needs unreachable nodes, so smaller sizes are covered by
  // leaving the top nodes unused; still try them first for smaller witnesses.
  for (int n = static_cast<int>(std::max<std::size_t>(min_nodes, 1)); n <= static_cast<int>(max_nodes); ++n) {
    Search s{pr, n, std::vector<int>(n * pr.attrs.size(), kNone), std::vector<int>(n, kNone),
             std::vector<int>(pr.names.size(), 0)};
    if (s.delta_from(0)) return s.structure();
  }
  return std::nullopt;
}

std::size_t least_model_size(const SolveResult& r) {
  if (!r.model) return 0;
  const auto& m = *r.model;
  std::set<NodeId> seen;
  std::vector<NodeId> work;
  for (const auto& [x, q] : m.names) work.push_back(q);
  while (!work.empty()) {
    auto q = work.back();
    work.pop_back();
    if (!seen.insert(q).second) continue;
    for (const auto& [key, t] : m.delta)
      if (key.first == q) work.push_back(t);
  }
  return seen.size();
}

}  // namespace glab::testing
