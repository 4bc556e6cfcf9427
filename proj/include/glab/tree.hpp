#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

namespace glab {

/// A node name in a tree domain: a string of positive integers, empty for the
/// root. Ordering is the lexicographic tree order (a prefix precedes its
/// extensions, otherwise the first differing digit decides), which is exactly
/// std::vector's ordering.
class TreeAddress {
 public:
  TreeAddress() = default;
  TreeAddress(std::initializer_list<std::uint32_t> digits);
  explicit TreeAddress(std::vector<std::uint32_t> digits);

  static TreeAddress root() { return {}; }

  bool is_root() const { return digits_.empty(); }
  std::size_t depth() const { return digits_.size(); }
  const std::vector<std::uint32_t>& digits() const { return digits_; }

  TreeAddress child(std::uint32_t i) const;
  TreeAddress parent() const;
  bool is_prefix_of(const TreeAddress& other) const;

  /// "ε" for the root, otherwise digits joined by '.'.
  std::string to_string() const;
  /// Inverse of to_string; also accepts "e" and "" for the root.
  static TreeAddress parse(const std::string& text);

  auto operator<=>(const TreeAddress&) const = default;
  bool operator==(const TreeAddress&) const = default;

 private:
  std::vector<std::uint32_t> digits_;
};

/// A finite tree domain. Construction does not validate; call `valid()`.
class TreeDomain {
 public:
  TreeDomain() = default;
  explicit TreeDomain(std::set<TreeAddress> addresses) : addresses_(std::move(addresses)) {}

  /// Prefix-closed, left-sibling-closed and non-empty.
  bool valid() const;

  bool contains(const TreeAddress& x) const { return addresses_.count(x) != 0; }
  std::size_t size() const { return addresses_.size(); }
  std::size_t out_degree(const TreeAddress& x) const;
  /// term(D) in tree order.
  std::vector<TreeAddress> leaves() const;
  /// Longest address length.
  std::size_t height() const;

  const std::set<TreeAddress>& addresses() const { return addresses_; }
  void insert(const TreeAddress& x) { addresses_.insert(x); }

 private:
  std::set<TreeAddress> addresses_;
};

}  // namespace glab
