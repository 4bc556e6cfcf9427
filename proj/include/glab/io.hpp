#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glab/indexed.hpp"
#include "glab/unification.hpp"

namespace glab {

/// .ixg text. Throws ParseError with the offending line.
IndexedGrammar parse_indexed_grammar(std::string_view text);
/// .ugr text. Throws ParseError with the offending line.
UnificationGrammar parse_unification_grammar(std::string_view text);

/// Canonical text; each entry of `comments` becomes a leading `# ` line.
std::string print_indexed_grammar(const IndexedGrammar& g, const std::vector<std::string>& comments = {});
std::string print_unification_grammar(const UnificationGrammar& g, const std::vector<std::string>& comments = {});

using AnyGrammar = std::variant<IndexedGrammar, UnificationGrammar>;

/// Dispatches on the extension (.ixg or .ugr).
AnyGrammar load_grammar(const std::string& path);
std::string read_file(const std::string& path);

}  // namespace glab
