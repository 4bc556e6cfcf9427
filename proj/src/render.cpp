#include "glab/render.hpp"

#include <map>
#include <sstream>

namespace glab {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <class Map>
std::map<TreeAddress, std::size_t> ids_of(const Map& nodes) {
  std::map<TreeAddress, std::size_t> ids;
  for (const auto& [x, _] : nodes) ids.emplace(x, ids.size());
  return ids;
}

std::string indent(const TreeAddress& x) { return std::string(2 * x.depth(), ' '); }

std::string category(const CNode& n) { return n.category.empty() ? "ε" : n.category; }

}  // namespace

std::string to_dot(const DerivationTree& t, const std::string& graph_name) {
  std::ostringstream out;
  auto ids = ids_of(t.labels);
  out << "digraph " << quote(graph_name) << " {\n  node [shape=plaintext];\n";
  for (const auto& [x, label] : t.labels)
    out << "  n" << ids[x] << " [label=" << quote(label.to_string()) << "];\n";
  for (const auto& [x, _] : t.labels)
    if (!x.is_root()) out << "  n" << ids[x.parent()] << " -> n" << ids[x] << ";\n";
  out << "}\n";
  return out.str();
}

std::string to_dot(const CStructure& cs, const std::string& graph_name) {
  std::ostringstream out;
  auto ids = ids_of(cs.nodes);
  out << "digraph " << quote(graph_name) << " {\n  node [shape=plaintext];\n";
  for (const auto& [x, n] : cs.nodes) out << "  n" << ids[x] << " [label=" << quote(category(n)) << "];\n";
  for (const auto& [x, n] : cs.nodes) {
    if (x.is_root()) continue;
    out << "  n" << ids[x.parent()] << " -> n" << ids[x];
    if (!n.schema.empty()) out << " [label=" << quote(to_string(n.schema)) << "]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const FeatureStructure& m, const std::string& graph_name) {
  std::ostringstream out;
  out << "digraph " << quote(graph_name) << " {\n  node [shape=circle, label=\"\"];\n";
  for (NodeId q = 0; q < m.node_count; ++q) {
    out << "  q" << q;
    auto a = m.alpha.find(q);
    if (a != m.alpha.end()) out << " [shape=plaintext, label=" << quote(a->second) << "]";
    out << ";\n";
  }
  for (const auto& [key, t] : m.delta)
    out << "  q" << key.first << " -> q" << t << " [label=" << quote(key.second) << "];\n";
  std::size_t i = 0;
  for (const auto& [x, q] : m.names) {
    out << "  x" << i << " [shape=plaintext, label=" << quote(x.to_string()) << "];\n";
    out << "  x" << i << " -> q" << q << " [style=dashed, arrowhead=none];\n";
    ++i;
  }
  out << "}\n";
  return out.str();
}

std::string to_text(const DerivationTree& t) {
  std::ostringstream out;
  for (const auto& [x, label] : t.labels) out << indent(x) << x.to_string() << "  " << label.to_string() << '\n';
  return out.str();
}

std::string to_text(const CStructure& cs) {
  std::ostringstream out;
  for (const auto& [x, n] : cs.nodes) {
    out << indent(x) << x.to_string() << "  " << category(n);
    if (!x.is_root() && !n.schema.empty()) out << "  " << to_string(n.schema);
    out << '\n';
  }
  return out.str();
}

std::string to_text(const FeatureStructure& m) {
  std::ostringstream out;
  for (NodeId q = 0; q < m.node_count; ++q) {
    out << 'q' << q;
    auto a = m.alpha.find(q);
    if (a != m.alpha.end()) out << " = " << a->second;
    for (const auto& [key, t] : m.delta)
      if (key.first == q) out << "  " << key.second << " -> q" << t;
    out << '\n';
  }
  for (const auto& [x, q] : m.names) out << "m(" << x.to_string() << ") = q" << q << '\n';
  return out.str();
}

}  // namespace glab
