#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "glab/common.hpp"
#include "glab/tree.hpp"

namespace glab {

/// Declared vocabulary of an indexed grammar. Declaration order is kept and
/// used by the printer.
struct SymbolTable {
  std::vector<Symbol> nonterminals;
  std::vector<Symbol> terminals;
  std::vector<Symbol> indices;

  bool is_nonterminal(const Symbol& s) const;
  bool is_terminal(const Symbol& s) const;
  bool is_index(const Symbol& s) const;

  bool operator==(const SymbolTable&) const = default;
};

enum class RuleKind { Push, Pop, Plain };

/// One of `A -> B f` (push), `A f -> α` (pop) or `A -> α` (plain).
/// `index` is empty for plain rules; an empty `rhs` means ε.
struct IndexedProduction {
  RuleKind kind = RuleKind::Plain;
  Symbol lhs;
  Symbol index;
  Word rhs;

  static IndexedProduction push(Symbol lhs, Symbol rhs, Symbol index);
  static IndexedProduction pop(Symbol lhs, Symbol index, Word rhs);
  static IndexedProduction plain(Symbol lhs, Word rhs);

  /// Rendering in .ixg syntax, e.g. "A ^g -> a A".
  std::string to_string() const;

  bool operator==(const IndexedProduction&) const = default;
};

/// G = <N, T, I, P, S>. Validated on construction; immutable afterwards.
class IndexedGrammar {
 public:
  IndexedGrammar(SymbolTable symbols, std::vector<IndexedProduction> productions, Symbol start);

  const SymbolTable& symbols() const { return symbols_; }
  const std::vector<IndexedProduction>& productions() const { return productions_; }
  const Symbol& start() const { return start_; }

  bool operator==(const IndexedGrammar&) const = default;

 private:
  SymbolTable symbols_;
  std::vector<IndexedProduction> productions_;
  Symbol start_;
};

/// Label of a derivation-tree node: a nonterminal with its index stack
/// (front = top), or a leaf carrying a terminal or ε (empty symbol).
struct NodeLabel {
  Symbol symbol;
  Word stack;
  bool leaf = false;

  static NodeLabel nonterminal(Symbol s, Word stack) { return {std::move(s), std::move(stack), false}; }
  static NodeLabel terminal(Symbol t) { return {std::move(t), {}, true}; }
  static NodeLabel epsilon() { return {{}, {}, true}; }

  /// "S' g f", "a" or "ε".
  std::string to_string() const;

  bool operator==(const NodeLabel&) const = default;
};

/// <D, C_I>: the domain is the key set of `labels`.
struct DerivationTree {
  std::map<TreeAddress, NodeLabel> labels;

  TreeDomain domain() const;
  std::size_t size() const { return labels.size(); }
  const NodeLabel& at(const TreeAddress& x) const;

  bool operator==(const DerivationTree&) const = default;
};

/// Outcome of `validate_derivation_tree`. On success `license` maps every
/// internal address to the index of its licensing production.
struct TreeValidation {
  bool ok = false;
  std::optional<TreeAddress> where;
  /// "domain", "i", "ii" or "iii" on failure.
  std::string condition;
  std::string message;
  std::map<TreeAddress, std::size_t> license;
};

struct ReducedFormReport {
  bool reduced = true;
  /// Indices into the production list.
  std::vector<std::size_t> offenders;
};

/// Strings of length <= maxlen, ordered by length then lexicographically.
struct LanguageSample {
  std::vector<Word> strings;
  /// The search hit `max_trees` before covering the space.
  bool exhausted = false;
  /// Search steps plus stack-analysis steps.
  std::size_t explored = 0;
};

struct IndexedMembership {
  bool member = false;
  std::optional<DerivationTree> witness;
  bool exhausted = false;
  std::size_t explored = 0;
};

ReducedFormReport reduced_form_check(const IndexedGrammar& g);
bool marked_index_end_check(const IndexedGrammar& g);

/// Adds S_0 -> S $ with fresh S_0 and $.
IndexedGrammar mark_index_end(const IndexedGrammar& g);

/// Visits every derivation tree with at most `budget.max_nodes` nodes, by
/// ascending size and then by the sequence of production indices in tree
/// order. Stops after `budget.max_trees` trees or when `visit` returns false.
/// Returns the number of trees visited.
std::size_t enumerate_derivations(const IndexedGrammar& g, const Budget& budget,
                                  const std::function<bool(const DerivationTree&)>& visit);
std::vector<DerivationTree> enumerate_derivations(const IndexedGrammar& g, const Budget& budget);

TreeValidation validate_derivation_tree(const IndexedGrammar& g, const DerivationTree& t);
Word terminal_string(const DerivationTree& t);

/// Yes with a witness when some derivation within budget yields `w`. Node
/// bounds double from 8 up to `max_nodes`, so small witnesses come first.
/// A "no" is exact when the stack analysis behind `indexed_language_upto`
/// rules `w` out; otherwise it only means no witness within the node bound.
/// Throws Error when `w` uses an undeclared terminal.
IndexedMembership indexed_membership(const IndexedGrammar& g, const Word& w, const Budget& budget = {});
/// Every string comes with a witness within budget. An analysis of the index
/// stacks that can derive each short string (capped by `max_trees` steps)
/// first rules out the non-members, so the search runs once per candidate.
/// Past the cap, one bounded search covers all strings instead.
LanguageSample indexed_language_upto(const IndexedGrammar& g, std::size_t maxlen, const Budget& budget = {});

/// Picks `base`, or `base` followed by 1, 2, ... until it is not in `taken`.
Symbol fresh_symbol(const std::string& base, const std::set<Symbol>& taken);

}  // namespace glab
