#pragma once

// Exact short-string languages of grammars whose only constraints are index
// stacks: indexed grammars, and unification grammars whose schemata are all
// shares, pushes and pops.
//
// For a nonterminal A and a string w, the stacks γ with A[γ] =>* w form a
// regular set. It is kept as an alternating automaton over index symbols
// whose states are (A, w) pairs plus push/pop wrappers, and built by
// saturation. Only strings of the context-free skeleton are considered.

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace glab::detail {

enum class StackOp { Share, Push, Pop };

struct StackItem {
  bool terminal = false;
  int id = -1;  // terminal or nonterminal id
  StackOp op = StackOp::Share;
  int index = -1;
};

struct StackRule {
  int lhs = 0;
  int pop = -1;  // index popped before the items see the stack, -1 if none
  std::vector<StackItem> items;  // empty for ε
};

struct StackSystem {
  std::size_t nonterminals = 0;
  std::size_t indices = 0;
  std::vector<StackRule> rules;
  int start = 0;
  // Indexed grammars start from the empty stack. Unification grammars start
  // from an unconstrained structure, so any stack will do.
  bool empty_start = true;
};

struct StackLanguage {
  std::vector<std::vector<int>> strings;  // unordered
  std::size_t work = 0;
};

/// Strings of length <= maxlen derivable from the start symbol. With a
/// target, only that string is decided (the result holds it or is empty).
/// Nothing when more than `work_limit` steps would be needed.
std::optional<StackLanguage> stack_language(const StackSystem& s, std::size_t maxlen,
                                            const std::vector<int>* target, std::size_t work_limit);

/// The automaton built for one target string, kept for pruning a witness
/// search. Stack acceptance is decided per stack, bottom up: a stack is
/// summarized by the set of states accepting it (under the empty-start
/// reading, where the stack is complete).
class TargetAnalysis {
 public:
  /// Nothing when more than `work_limit` steps would be needed.
  static std::unique_ptr<TargetAnalysis> build(const StackSystem& s, const std::vector<int>& target,
                                               std::size_t work_limit);
  ~TargetAnalysis();

  bool derivable() const;
  std::size_t work() const;
  /// Summary of the empty stack, and of index f pushed onto a summarized stack.
  int empty_stack() const;
  int push(int index, int below);
  /// A[γ] =>* target[i, j) where `stack` summarizes γ.
  bool derives(int nt, std::size_t i, std::size_t j, int stack) const;

 private:
  struct Impl;
  explicit TargetAnalysis(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace glab::detail
