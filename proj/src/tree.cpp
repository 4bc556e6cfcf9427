#include "glab/tree.hpp"

#include <algorithm>
#include <sstream>

#include "glab/common.hpp"

namespace glab {

std::string join(const Word& w, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += w[i];
  }
  return out;
}

Word split_words(const std::string& text) {
  Word out;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

Word split_chars(const std::string& text) {
  Word out;
  for (char c : text) out.emplace_back(1, c);
  return out;
}

TreeAddress::TreeAddress(std::initializer_list<std::uint32_t> digits) : digits_(digits) {
  for (auto d : digits_)
    if (d == 0) throw Error("tree address digits must be positive");
}

TreeAddress::TreeAddress(std::vector<std::uint32_t> digits) : digits_(std::move(digits)) {
  for (auto d : digits_)
    if (d == 0) throw Error("tree address digits must be positive");
}

TreeAddress TreeAddress::child(std::uint32_t i) const {
  if (i == 0) throw Error("tree address digits must be positive");
  TreeAddress out = *this;
  out.digits_.push_back(i);
  return out;
}

TreeAddress TreeAddress::parent() const {
  if (is_root()) throw Error("the root has no parent");
  TreeAddress out = *this;
  out.digits_.pop_back();
  return out;
}

bool TreeAddress::is_prefix_of(const TreeAddress& other) const {
  return digits_.size() <= other.digits_.size() &&
         std::equal(digits_.begin(), digits_.end(), other.digits_.begin());
}

std::string TreeAddress::to_string() const {
  if (digits_.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(digits_[i]);
  }
  return out;
}

TreeAddress TreeAddress::parse(const std::string& text) {
  if (text.empty() || text == "ε" || text == "e") return {};
  std::vector<std::uint32_t> digits;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto dot = text.find('.', pos);
    if (dot == std::string::npos) dot = text.size();
    auto part = text.substr(pos, dot - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw Error("malformed tree address '" + text + "'");
    digits.push_back(static_cast<std::uint32_t>(std::stoul(part)));
    pos = dot + 1;
  }
  return TreeAddress(std::move(digits));
}

bool TreeDomain::valid() const {
  if (addresses_.empty() || !contains(TreeAddress::root())) return false;
  for (const auto& x : addresses_) {
    if (x.is_root()) continue;
    if (!contains(x.parent())) return false;
    auto last = x.digits().back();
    if (last > 1) {
      auto sibling = x.digits();
      sibling.back() = last - 1;
      if (!contains(TreeAddress(sibling))) return false;
    }
  }
  return true;
}

std::size_t TreeDomain::out_degree(const TreeAddress& x) const {
  std::size_t d = 0;
  while (contains(x.child(static_cast<std::uint32_t>(d + 1)))) ++d;
  return d;
}

std::vector<TreeAddress> TreeDomain::leaves() const {
  std::vector<TreeAddress> out;
  for (const auto& x : addresses_)
    if (!contains(x.child(1))) out.push_back(x);
  return out;
}

std::size_t TreeDomain::height() const {
  std::size_t h = 0;
  for (const auto& x : addresses_) h = std::max(h, x.depth());
  return h;
}

}  // namespace glab
