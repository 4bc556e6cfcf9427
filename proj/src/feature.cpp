#include "glab/feature.hpp"

#include <algorithm>
#include <deque>

#include "closure.hpp"

namespace glab {

std::optional<NodeId> FeatureStructure::step(NodeId q, const Attribute& a) const {
  auto it = delta.find({q, a});
  if (it == delta.end()) return std::nullopt;
  return it->second;
}

Equation make_value_equation(TreeAddress name, Path path, Symbol value) {
  if (path.empty()) throw Error("a value equation needs a non-empty attribute path");
  return ValueEquation{std::move(name), std::move(path), std::move(value)};
}

std::string path_to_string(const TreeAddress& name, const Path& path) {
  std::string out = name.to_string();
  for (const auto& a : path) out += " " + a;
  return out;
}

std::string to_string(const Equation& e) {
  if (const auto* p = std::get_if<PathEquation>(&e))
    return path_to_string(p->lhs_name, p->lhs_path) + " = " + path_to_string(p->rhs_name, p->rhs_path);
  const auto& v = std::get<ValueEquation>(e);
  return path_to_string(v.name, v.path) + " = " + v.value;
}

std::string to_string(const Diagnosis& d) {
  if (const auto* c = std::get_if<ValueClash>(&d))
    return "value clash at " + c->term + ": " + c->first + " vs " + c->second;
  if (const auto* a = std::get_if<AtomicityViolation>(&d)) return "atomic value with out-edges at " + a->term;
  const auto& cyc = std::get<CycleDetected>(d);
  std::string path;
  for (const auto& a : cyc.cycle) path += " " + a;
  return "attribute cycle at " + cyc.term + " via" + path;
}

std::optional<NodeId> delta_path(const FeatureStructure& m, NodeId q, const Path& path) {
  if (q >= m.node_count) throw Error("node " + std::to_string(q) + " is not in the feature structure");
  std::optional<NodeId> cur = q;
  for (const auto& a : path) {
    cur = m.step(*cur, a);
    if (!cur) return std::nullopt;
  }
  return cur;
}

namespace {

std::vector<std::vector<std::pair<Attribute, NodeId>>> adjacency(const FeatureStructure& m) {
  std::vector<std::vector<std::pair<Attribute, NodeId>>> out(m.node_count);
  for (const auto& [key, target] : m.delta) out[key.first].emplace_back(key.second, target);
  return out;
}

// First cycle in DFS order from `roots`, as (entry node, attribute path).
std::optional<std::pair<NodeId, Path>> find_cycle(
    const std::vector<std::vector<std::pair<Attribute, NodeId>>>& adj, const std::vector<NodeId>& roots) {
  std::vector<int> color(adj.size(), 0);
  std::vector<std::pair<NodeId, Attribute>> stack;  // path of (node, attribute taken)
  std::optional<std::pair<NodeId, Path>> found;
  auto dfs = [&](auto&& self, NodeId q) -> void {
    color[q] = 1;
    for (const auto& [a, t] : adj[q]) {
      if (found) return;
      stack.emplace_back(q, a);
      if (color[t] == 1) {
        Path cyc;
        auto it = std::find_if(stack.begin(), stack.end(), [&](const auto& e) { return e.first == t; });
        for (; it != stack.end(); ++it) cyc.push_back(it->second);
        found = std::make_pair(t, cyc);
        return;
      }
      if (color[t] == 0) self(self, t);
      stack.pop_back();
    }
    color[q] = 2;
  };
  for (auto r : roots) {
    if (found) break;
    if (color[r] == 0) dfs(dfs, r);
  }
  return found;
}

}  // namespace

WellDefinedReport well_defined_check(const FeatureStructure& m) {
  WellDefinedReport r;
  auto adj = adjacency(m);

  std::vector<bool> seen(m.node_count, false);
  std::deque<NodeId> queue;
  for (const auto& [_, q] : m.names)
    if (!seen[q]) seen[q] = true, queue.push_back(q);
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    for (const auto& [a, t] : adj[q])
      if (!seen[t]) seen[t] = true, queue.push_back(t);
  }
  for (NodeId q = 0; q < m.node_count; ++q)
    if (!seen[q]) {
      r.describable = false;
      r.unreachable_node = q;
      break;
    }

  for (const auto& [q, v] : m.alpha)
    if (!adj[q].empty()) {
      r.atomic = false;
      r.atom_with_edge = q;
      break;
    }

  std::vector<NodeId> roots;
  for (NodeId q = 0; q < m.node_count; ++q) roots.push_back(q);
  if (auto cyc = find_cycle(adj, roots)) {
    r.acyclic = false;
    r.cycle = cyc->second;
  }
  return r;
}

namespace {

NodeId named(const FeatureStructure& m, const TreeAddress& x) {
  auto it = m.names.find(x);
  if (it == m.names.end()) throw Error("name " + x.to_string() + " is not in the name domain");
  return it->second;
}

}  // namespace

bool satisfies(const FeatureStructure& m, const Equation& e) {
  if (const auto* p = std::get_if<PathEquation>(&e)) {
    auto l = delta_path(m, named(m, p->lhs_name), p->lhs_path);
    auto r = delta_path(m, named(m, p->rhs_name), p->rhs_path);
    return l && r && *l == *r;
  }
  const auto& v = std::get<ValueEquation>(e);
  auto q = delta_path(m, named(m, v.name), v.path);
  if (!q) return false;
  auto it = m.alpha.find(*q);
  return it != m.alpha.end() && it->second == v.value;
}

bool satisfies_set(const FeatureStructure& m, const std::vector<Equation>& es) {
  return std::all_of(es.begin(), es.end(), [&](const Equation& e) { return satisfies(m, e); });
}

FeatureStructure canonicalize(const FeatureStructure& m) {
  auto adj = adjacency(m);  // attributes already sorted (map order)
  std::vector<long> order(m.node_count, -1);
  std::vector<NodeId> by_new;
  std::deque<NodeId> queue;
  auto visit = [&](NodeId q) {
    if (order[q] >= 0) return;
    order[q] = static_cast<long>(by_new.size());
    by_new.push_back(q);
    queue.push_back(q);
  };
  for (const auto& [_, q] : m.names) visit(q);
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    for (const auto& [a, t] : adj[q]) visit(t);
  }
  for (NodeId q = 0; q < m.node_count; ++q)
    if (order[q] < 0) {
      order[q] = static_cast<long>(by_new.size());
      by_new.push_back(q);
    }

  FeatureStructure out;
  out.node_count = m.node_count;
  for (const auto& [key, t] : m.delta)
    out.delta[{static_cast<NodeId>(order[key.first]), key.second}] = static_cast<NodeId>(order[t]);
  for (const auto& [q, v] : m.alpha) out.alpha[static_cast<NodeId>(order[q])] = v;
  for (const auto& [x, q] : m.names) out.names[x] = static_cast<NodeId>(order[q]);
  return out;
}

bool isomorphic(const FeatureStructure& a, const FeatureStructure& b) {
  if (a.node_count != b.node_count || a.delta.size() != b.delta.size() || a.alpha.size() != b.alpha.size())
    return false;
  if (!well_defined_check(a).describable || !well_defined_check(b).describable) return a == b;
  return canonicalize(a) == canonicalize(b);
}

FeatureStructure named_core(const FeatureStructure& m) {
  std::map<NodeId, NodeId> keep;
  std::map<Symbol, NodeId> atoms;
  FeatureStructure out;
  for (const auto& [x, q] : m.names) {
    if (keep.count(q)) continue;
    auto a = m.alpha.find(q);
    if (a != m.alpha.end()) {
      auto [it, fresh] = atoms.try_emplace(a->second, 0);
      if (fresh) it->second = out.add_node(), out.alpha[it->second] = a->second;
      keep[q] = it->second;
    } else {
      keep[q] = out.add_node();
    }
  }
  for (const auto& [q, v] : m.alpha) {
    if (keep.count(q)) continue;
    auto [it, fresh] = atoms.try_emplace(v, 0);
    if (fresh) it->second = out.add_node(), out.alpha[it->second] = v;
    keep[q] = it->second;
  }
  for (const auto& [key, t] : m.delta) {
    auto from = keep.find(key.first);
    auto to = keep.find(t);
    if (from != keep.end() && to != keep.end()) out.delta[{from->second, key.second}] = to->second;
  }
  for (const auto& [x, q] : m.names) out.names[x] = keep.at(q);
  return canonicalize(out);
}

FeatureStructure restrict_names(const FeatureStructure& m, const std::set<TreeAddress>& keep) {
  FeatureStructure out = m;
  std::erase_if(out.names, [&](const auto& kv) { return !keep.count(kv.first); });
  return out;
}

SolveResult solve(const std::vector<Equation>& input, const std::set<TreeAddress>& name_domain) {
  std::vector<Equation> es = input;
  std::sort(es.begin(), es.end());
  es.erase(std::unique(es.begin(), es.end()), es.end());

  std::set<Attribute> attr_set;
  std::set<Symbol> value_set;
  auto check_name = [&](const TreeAddress& x) {
    if (!name_domain.count(x)) throw Error("name " + x.to_string() + " is not in the name domain");
  };
  for (const auto& e : es) {
    if (const auto* p = std::get_if<PathEquation>(&e)) {
      check_name(p->lhs_name);
      check_name(p->rhs_name);
      attr_set.insert(p->lhs_path.begin(), p->lhs_path.end());
      attr_set.insert(p->rhs_path.begin(), p->rhs_path.end());
    } else {
      const auto& v = std::get<ValueEquation>(e);
      check_name(v.name);
      if (v.path.empty()) throw Error("a value equation needs a non-empty attribute path");
      attr_set.insert(v.path.begin(), v.path.end());
      value_set.insert(v.value);
    }
  }
  std::vector<Attribute> attrs(attr_set.begin(), attr_set.end());
  std::vector<Symbol> values(value_set.begin(), value_set.end());
  auto attr_id = [&](const Attribute& a) {
    return static_cast<int>(std::lower_bound(attrs.begin(), attrs.end(), a) - attrs.begin());
  };
  auto value_id = [&](const Symbol& v) {
    return static_cast<int>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
  };
  auto ids = [&](const Path& p) {
    std::vector<int> out;
    for (const auto& a : p) out.push_back(attr_id(a));
    return out;
  };

  detail::Closure c;
  std::map<TreeAddress, int> name_node;
  for (const auto& x : name_domain) name_node[x] = c.add_node();
  for (const auto& e : es) {
    if (const auto* p = std::get_if<PathEquation>(&e)) {
      int l = c.walk(name_node.at(p->lhs_name), ids(p->lhs_path));
      int r = c.walk(name_node.at(p->rhs_name), ids(p->rhs_path));
      c.merge(l, r);
    } else {
      const auto& v = std::get<ValueEquation>(e);
      c.assign(c.walk(name_node.at(v.name), ids(v.path)), value_id(v.value));
    }
  }

  // Class graph over roots, with the shortest term naming each class.
  std::map<int, NodeId> class_id;
  std::vector<int> roots;
  std::vector<std::string> term;
  std::deque<int> queue;
  auto reach = [&](int root, std::string t) {
    if (class_id.count(root)) return;
    class_id[root] = roots.size();
    roots.push_back(root);
    term.push_back(std::move(t));
    queue.push_back(root);
  };
  for (const auto& [x, n] : name_node) reach(c.find(n), x.to_string());
  while (!queue.empty()) {
    int r = queue.front();
    queue.pop_front();
    auto edges = c.edges(r);
    std::sort(edges.begin(), edges.end());
    for (auto [a, t] : edges) reach(c.find(t), term[class_id[r]] + " " + attrs[a]);
  }

  SolveResult result;
  if (!c.clash_log().empty()) {
    const auto& k = c.clash_log().front();
    result.diagnosis = ValueClash{term[class_id.at(c.find(k.node))], values[k.first], values[k.second]};
    return result;
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (c.value(roots[i]) >= 0 && !c.edges(roots[i]).empty()) {
      result.diagnosis = AtomicityViolation{term[i]};
      return result;
    }

  FeatureStructure m;
  m.node_count = roots.size();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (auto [a, t] : c.edges(roots[i])) m.delta[{i, attrs[a]}] = class_id.at(c.find(t));
    if (c.value(roots[i]) >= 0) m.alpha[i] = values[c.value(roots[i])];
  }
  for (const auto& [x, n] : name_node) m.names[x] = class_id.at(c.find(n));

  auto adj = adjacency(m);
  std::vector<NodeId> order;
  for (const auto& [x, q] : m.names) order.push_back(q);
  if (auto cyc = find_cycle(adj, order)) {
    result.diagnosis = CycleDetected{term[cyc->first], cyc->second};
    return result;
  }
  result.model = canonicalize(m);
  return result;
}

}  // namespace glab
