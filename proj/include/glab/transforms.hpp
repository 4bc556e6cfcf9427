#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "glab/feature.hpp"
#include "glab/indexed.hpp"
#include "glab/unification.hpp"

namespace glab {

/// Indexed production `indexed` corresponds to production (or lexicon rule,
/// when `lexical`) `unification` of the other grammar.
struct RuleLink {
  std::size_t indexed = 0;
  bool lexical = false;
  std::size_t unification = 0;
  bool operator==(const RuleLink&) const = default;
};

struct RuleCorrespondence {
  std::vector<RuleLink> links;
  bool operator==(const RuleCorrespondence&) const = default;
};

struct UTransformResult {
  UnificationGrammar grammar;
  RuleCorrespondence correspondence;
};

struct ReverseUResult {
  IndexedGrammar grammar;
  RuleCorrespondence correspondence;
};

struct CStructureConversion {
  CStructure cstructure;
  FeatureStructure model;
};

/// Throws PreconditionError unless g is reduced with a marked index-end.
UTransformResult u_transform(const IndexedGrammar& g);

/// Throws PreconditionError unless g is a reduced UGI grammar with a
/// sink-mapped root.
ReverseUResult reverse_u(const UnificationGrammar& g);

/// Nodes are the suffixes of the given index strings plus one atom per index
/// symbol; δ(fγ, idx) = f, δ(fγ, next) = γ, α(f) = f, m(x) = stacks[x].
FeatureStructure index_string_structure(const std::map<TreeAddress, Word>& stacks);

CStructureConversion cstructure_from_derivation(const IndexedGrammar& g, const DerivationTree& t);

/// α(q) if defined; else idx_lst(δ(q, idx)) idx_lst(δ(q, next)) when both
/// edges exist; else ε. Needs an acyclic structure.
Word idx_lst(const FeatureStructure& m, NodeId q);
/// Shortest prefix of idx_lst(m, q) ending in `dollar`, or ε.
Word idx_lst_dollar(const FeatureStructure& m, NodeId q, const Symbol& dollar);

/// `dollar` is the index pushed by the start rule of g.
DerivationTree derivation_from_cstructure(const IndexedGrammar& g, const CStructure& cs, const FeatureStructure& m);
/// Uses the least model of cs.
DerivationTree derivation_from_cstructure(const IndexedGrammar& g, const CStructure& cs);

}  // namespace glab
