#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace glab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grammar text that could not be parsed. `line()` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An operation was called on a grammar that does not meet its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Search limits shared by every enumeration and membership routine.
///
/// `max_nodes` bounds the size of a single tree. `max_trees` bounds the
/// number of trees the search may build, partial ones included; reaching it
/// marks the result as exhausted.
struct Budget {
  std::size_t max_nodes = 4096;
  std::size_t max_trees = 1'000'000;
};

using Symbol = std::string;
/// A word over terminals, or an index/value string. One element per symbol.
using Word = std::vector<Symbol>;

std::string join(const Word& w, const std::string& sep = "");

/// Splits on whitespace. Each character of a token-free string is not split
/// further; callers that want "aabbcc" as six symbols use `split_chars`.
Word split_words(const std::string& text);
Word split_chars(const std::string& text);

}  // namespace glab
