#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "glab/common.hpp"
#include "glab/feature.hpp"
#include "glab/tree.hpp"

namespace glab {

enum class Arrow { Up, Down };

/// ↑/↓ψ ≐ ↑/↓ψ'
struct ArrowPathEq {
  Arrow lhs = Arrow::Up;
  Path lhs_path;
  Arrow rhs = Arrow::Down;
  Path rhs_path;
  auto operator<=>(const ArrowPathEq&) const = default;
};

/// ↑/↓ψ ≐ v with ψ non-empty.
struct ArrowValueEq {
  Arrow side = Arrow::Up;
  Path path;
  Symbol value;
  auto operator<=>(const ArrowValueEq&) const = default;
};

using EqSchema = std::variant<ArrowPathEq, ArrowValueEq>;
/// A finite set of schemata; kept in textual order for printing.
using Schema = std::vector<EqSchema>;

std::string to_string(const EqSchema& e);
std::string to_string(const Schema& s);

struct Daughter {
  Symbol category;
  Schema schema;
  bool operator==(const Daughter&) const = default;
};

/// A0 -> A1 ... An with one schema per daughter, n >= 1.
struct UProduction {
  Symbol mother;
  std::vector<Daughter> daughters;
  bool operator==(const UProduction&) const = default;
};

/// A -> t with value-equation schema; an empty `word` is ε.
struct LexRule {
  Symbol mother;
  Symbol word;
  Schema schema;
  bool operator==(const LexRule&) const = default;
};

struct UnificationSymbols {
  std::vector<Symbol> nonterminals;
  std::vector<Symbol> terminals;
  std::vector<Attribute> attributes;
  std::vector<Symbol> values;

  bool is_nonterminal(const Symbol& s) const;
  bool is_terminal(const Symbol& s) const;
  bool is_attribute(const Symbol& s) const;
  bool is_value(const Symbol& s) const;

  bool operator==(const UnificationSymbols&) const = default;
};

/// <N, T, P, L, S> over attributes A and values V. Validated on construction.
class UnificationGrammar {
 public:
  UnificationGrammar(UnificationSymbols symbols, std::vector<UProduction> productions,
                     std::vector<LexRule> lexicon, Symbol start);

  const UnificationSymbols& symbols() const { return symbols_; }
  const std::vector<UProduction>& productions() const { return productions_; }
  const std::vector<LexRule>& lexicon() const { return lexicon_; }
  const Symbol& start() const { return start_; }

  bool operator==(const UnificationGrammar&) const = default;

 private:
  UnificationSymbols symbols_;
  std::vector<UProduction> productions_;
  std::vector<LexRule> lexicon_;
  Symbol start_;
};

/// Which rule slot a c-structure node was licensed by.
struct SlotRef {
  bool lexicon = false;
  std::size_t rule = 0;
  std::size_t daughter = 0;
  bool operator==(const SlotRef&) const = default;
};

struct CNode {
  /// Nonterminal, terminal, or empty for ε.
  Symbol category;
  bool leaf = false;
  /// Absent for the root.
  std::optional<SlotRef> slot;
  Schema schema;
  bool operator==(const CNode&) const = default;
};

/// <D, C_U, E_U>; the domain is the key set of `nodes`.
struct CStructure {
  std::map<TreeAddress, CNode> nodes;

  TreeDomain domain() const;
  std::set<TreeAddress> addresses() const;
  std::size_t size() const { return nodes.size(); }
  const CNode& at(const TreeAddress& x) const;
  Word terminal_string() const;

  bool operator==(const CStructure&) const = default;
};

/// Shape of a schema under the restricted grammar class.
enum class SchemaForm { Share, Push, Pop, Other };
struct SchemaShape {
  SchemaForm form = SchemaForm::Other;
  Symbol value;  // for Push/Pop
};
SchemaShape classify_schema(const Schema& s);

/// {↑≐↓}, {↓next≐↑, ↓idx≐f} and {↑next≐↓, ↑idx≐f}.
Schema share_schema();
Schema push_schema(const Symbol& value);
Schema pop_schema(const Symbol& value);

struct UgiReport {
  bool is_ugi = false;
  bool is_reduced = false;
  bool has_sink_mapped_root = false;
  std::vector<std::string> offenders;
};

struct SugMembership {
  bool member = false;
  std::optional<CStructure> witness;
  std::optional<FeatureStructure> model;
  bool exhausted = false;
  std::size_t explored = 0;
};

struct SugLanguageSample {
  std::vector<Word> strings;
  bool exhausted = false;
  std::size_t explored = 0;
};

/// Substitutes ↑ by `mother` and ↓ by `daughter`.
std::vector<Equation> instantiate(const Schema& schema, const TreeAddress& mother, const TreeAddress& daughter);

/// Every c-structure (consistent or not) with at most `budget.max_nodes`
/// nodes whose terminal string is `yield`, by size then rule sequence.
/// Throws Error on an undeclared terminal.
std::size_t enumerate_cstructures(const UnificationGrammar& g, const Word& yield, const Budget& budget,
                                  const std::function<bool(const CStructure&)>& visit);
std::vector<CStructure> enumerate_cstructures(const UnificationGrammar& g, const Word& yield,
                                              const Budget& budget);

/// Checks the categories and schemata of `cs` against the rules of g.
/// Returns an empty string on success, otherwise a diagnostic.
std::string validate_cstructure(const UnificationGrammar& g, const CStructure& cs);

std::vector<Equation> collect_equations(const CStructure& cs);
SolveResult generates_check(const CStructure& cs);

/// Witness search as for indexed grammars. When every schema is a share,
/// push or pop, the same stack analysis rules out non-members first, with an
/// unconstrained stack at the root.
SugMembership sug_membership(const UnificationGrammar& g, const Word& w, const Budget& budget = {});
SugLanguageSample sug_language_upto(const UnificationGrammar& g, std::size_t maxlen, const Budget& budget = {});

UgiReport ugi_check(const UnificationGrammar& g);
/// Brings a UGI grammar to reduced form. Throws PreconditionError otherwise.
UnificationGrammar ugi_normalize(const UnificationGrammar& g);
/// Adds a fresh start rule pushing a fresh value. Throws PreconditionError
/// when g is not UGI.
UnificationGrammar sink_map_root(const UnificationGrammar& g);

/// The stack-of-addresses model of a UGI c-structure. Names cover the
/// internal nodes of cs. Throws PreconditionError on a non-UGI schema.
SolveResult canonical_fs(const CStructure& cs);

/// Attribute names used by the restricted grammar class.
inline const Attribute kNext = "next";
inline const Attribute kIdx = "idx";

}  // namespace glab
