#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "glab/io.hpp"

namespace glab {

struct LanguageResult {
  std::vector<Word> strings;
  bool exhausted = false;
  std::size_t explored = 0;
};

/// indexed_language_upto or sug_language_upto, by grammar kind.
LanguageResult language_upto(const AnyGrammar& g, std::size_t maxlen, const Budget& budget = {});

struct EquivVerdict {
  std::size_t maxlen = 0;
  std::vector<Word> left, right;
  std::vector<Word> left_only, right_only;
  bool agree = false;
  bool left_exhausted = false;
  bool right_exhausted = false;
};

EquivVerdict equiv(const AnyGrammar& a, const AnyGrammar& b, std::size_t maxlen, const Budget& budget = {});

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 usage or validation error, 2 no witness within budget or
/// disagreement.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glab
