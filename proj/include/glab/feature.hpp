#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "glab/common.hpp"
#include "glab/tree.hpp"

namespace glab {

using Attribute = std::string;
using Path = std::vector<Attribute>;
using NodeId = std::size_t;

/// <Q, δ, α, m> with nodes 0..node_count-1 and names drawn from tree
/// addresses. δ and α are partial.
struct FeatureStructure {
  std::size_t node_count = 0;
  std::map<std::pair<NodeId, Attribute>, NodeId> delta;
  std::map<NodeId, Symbol> alpha;
  std::map<TreeAddress, NodeId> names;

  NodeId add_node() { return node_count++; }
  std::optional<NodeId> step(NodeId q, const Attribute& a) const;

  bool operator==(const FeatureStructure&) const = default;
};

/// x1 ψ1 ≐ x2 ψ2
struct PathEquation {
  TreeAddress lhs_name;
  Path lhs_path;
  TreeAddress rhs_name;
  Path rhs_path;
  auto operator<=>(const PathEquation&) const = default;
};

/// x ψ ≐ v, ψ non-empty.
struct ValueEquation {
  TreeAddress name;
  Path path;
  Symbol value;
  auto operator<=>(const ValueEquation&) const = default;
};

using Equation = std::variant<PathEquation, ValueEquation>;

/// Throws Error for a value equation with an empty path.
Equation make_value_equation(TreeAddress name, Path path, Symbol value);
std::string to_string(const Equation& e);
std::string path_to_string(const TreeAddress& name, const Path& path);

struct WellDefinedReport {
  bool describable = true;
  bool atomic = true;
  bool acyclic = true;
  /// Unreachable node, atom with an out-edge, first node on a cycle.
  std::optional<NodeId> unreachable_node;
  std::optional<NodeId> atom_with_edge;
  std::optional<Path> cycle;
  bool well_defined() const { return describable && atomic && acyclic; }
};

struct ValueClash {
  std::string term;
  Symbol first;
  Symbol second;
};
struct AtomicityViolation {
  std::string term;
};
struct CycleDetected {
  std::string term;
  /// Attribute path leading from the term back to itself.
  Path cycle;
};
using Diagnosis = std::variant<ValueClash, AtomicityViolation, CycleDetected>;

struct SolveResult {
  std::optional<FeatureStructure> model;
  std::optional<Diagnosis> diagnosis;
  bool consistent() const { return model.has_value(); }
};

std::string to_string(const Diagnosis& d);

/// δ(q, ψ); nullopt as soon as a step is undefined.
std::optional<NodeId> delta_path(const FeatureStructure& m, NodeId q, const Path& path);

WellDefinedReport well_defined_check(const FeatureStructure& m);

/// Throws Error when the equation mentions a name outside m's name domain.
bool satisfies(const FeatureStructure& m, const Equation& e);
bool satisfies_set(const FeatureStructure& m, const std::vector<Equation>& es);

/// Decides consistency by building the least model of `es` over the given
/// name domain. Every name in `es` must belong to `name_domain`.
SolveResult solve(const std::vector<Equation>& es, const std::set<TreeAddress>& name_domain);

/// Renumbers nodes by breadth-first discovery from the names in tree order,
/// attributes in sorted order. Unreachable nodes keep their relative order
/// after the reachable ones.
FeatureStructure canonicalize(const FeatureStructure& m);

/// Name-preserving isomorphism: a bijection on nodes that commutes with the
/// name mappings, δ and α.
bool isomorphic(const FeatureStructure& a, const FeatureStructure& b);

/// The part of a structure that does not depend on how a model lays out its
/// atoms and unnamed stack cells: named nodes plus one node per atomic value,
/// with every edge between them kept and edges to unnamed non-atoms dropped.
FeatureStructure named_core(const FeatureStructure& m);

/// The same structure with the name mapping cut down to `keep`.
FeatureStructure restrict_names(const FeatureStructure& m, const std::set<TreeAddress>& keep);

}  // namespace glab
