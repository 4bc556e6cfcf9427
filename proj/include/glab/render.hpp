#pragma once

#include <string>

#include "glab/feature.hpp"
#include "glab/indexed.hpp"
#include "glab/unification.hpp"

namespace glab {

/// Graphviz digraphs. Output depends only on the argument.
std::string to_dot(const DerivationTree& t, const std::string& graph_name = "derivation");
std::string to_dot(const CStructure& cs, const std::string& graph_name = "cstructure");
std::string to_dot(const FeatureStructure& m, const std::string& graph_name = "features");

/// Indented one-node-per-line listing, e.g. "1.1  S' g f".
std::string to_text(const DerivationTree& t);
std::string to_text(const CStructure& cs);
std::string to_text(const FeatureStructure& m);

}  // namespace glab
