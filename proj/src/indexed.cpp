#include "glab/indexed.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace glab {

namespace {

bool contains(const std::vector<Symbol>& v, const Symbol& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void check_identifier(const Symbol& s, const char* what) {
  if (s.empty()) throw Error(std::string("empty ") + what + " name");
  for (unsigned char c : s)
    if (std::isspace(c)) throw Error(std::string(what) + " '" + s + "' contains whitespace");
  static const std::unordered_set<std::string> reserved{
      "_", "->", "{", "}", ";", "=", "nonterminals", "terminals", "indices", "start"};
  if (reserved.count(s) || s[0] == '^' || s[0] == '#')
    throw Error(std::string(what) + " name '" + s + "' is reserved");
}

}  // namespace

bool SymbolTable::is_nonterminal(const Symbol& s) const { return contains(nonterminals, s); }
bool SymbolTable::is_terminal(const Symbol& s) const { return contains(terminals, s); }
bool SymbolTable::is_index(const Symbol& s) const { return contains(indices, s); }

IndexedProduction IndexedProduction::push(Symbol lhs, Symbol rhs, Symbol index) {
  return {RuleKind::Push, std::move(lhs), std::move(index), Word{std::move(rhs)}};
}

IndexedProduction IndexedProduction::pop(Symbol lhs, Symbol index, Word rhs) {
  return {RuleKind::Pop, std::move(lhs), std::move(index), std::move(rhs)};
}

IndexedProduction IndexedProduction::plain(Symbol lhs, Word rhs) {
  return {RuleKind::Plain, std::move(lhs), {}, std::move(rhs)};
}

std::string IndexedProduction::to_string() const {
  std::string out = lhs;
  if (kind == RuleKind::Pop) out += " ^" + index;
  out += " ->";
  if (rhs.empty()) out += " _";
  for (const auto& s : rhs) out += " " + s;
  if (kind == RuleKind::Push) out += " ^" + index;
  return out;
}

IndexedGrammar::IndexedGrammar(SymbolTable symbols, std::vector<IndexedProduction> productions, Symbol start)
    : symbols_(std::move(symbols)), productions_(std::move(productions)), start_(std::move(start)) {
  std::unordered_set<Symbol> seen;
  auto declare = [&](const std::vector<Symbol>& v, const char* what) {
    for (const auto& s : v) {
      check_identifier(s, what);
      if (!seen.insert(s).second)
        throw Error("symbol '" + s + "' declared twice (nonterminals, terminals and indices must be disjoint)");
    }
  };
  declare(symbols_.nonterminals, "nonterminal");
  declare(symbols_.terminals, "terminal");
  declare(symbols_.indices, "index");
  if (!symbols_.is_nonterminal(start_)) throw Error("start symbol '" + start_ + "' is not a declared nonterminal");

  for (const auto& p : productions_) {
    const auto where = " in rule '" + p.to_string() + "'";
    if (!symbols_.is_nonterminal(p.lhs)) throw Error("undeclared nonterminal '" + p.lhs + "'" + where);
    if (p.kind != RuleKind::Plain && !symbols_.is_index(p.index))
      throw Error("undeclared index '" + p.index + "'" + where);
    if (p.kind == RuleKind::Plain && !p.index.empty()) throw Error("plain rule carries an index" + where);
    if (p.kind == RuleKind::Push) {
      if (p.rhs.size() != 1 || !symbols_.is_nonterminal(p.rhs[0]))
        throw Error("push rule needs exactly one nonterminal on the right" + where);
    }
    for (const auto& s : p.rhs)
      if (!symbols_.is_nonterminal(s) && !symbols_.is_terminal(s))
        throw Error("undeclared symbol '" + s + "'" + where);
  }
}

std::string NodeLabel::to_string() const {
  if (leaf) return symbol.empty() ? "ε" : symbol;
  std::string out = symbol;
  for (const auto& f : stack) out += " " + f;
  return out;
}

TreeDomain DerivationTree::domain() const {
  TreeDomain d;
  for (const auto& [x, _] : labels) d.insert(x);
  return d;
}

const NodeLabel& DerivationTree::at(const TreeAddress& x) const {
  auto it = labels.find(x);
  if (it == labels.end()) throw Error("address " + x.to_string() + " not in tree");
  return it->second;
}

ReducedFormReport reduced_form_check(const IndexedGrammar& g) {
  ReducedFormReport report;
  const auto& sym = g.symbols();
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    bool ok = false;
    switch (p.kind) {
      case RuleKind::Push:
        ok = true;
        break;
      case RuleKind::Pop:
        ok = p.rhs.size() == 1 && sym.is_nonterminal(p.rhs[0]);
        break;
      case RuleKind::Plain:
        ok = (p.rhs.size() == 2 && sym.is_nonterminal(p.rhs[0]) && sym.is_nonterminal(p.rhs[1])) ||
             (p.rhs.size() == 1 && sym.is_terminal(p.rhs[0])) || p.rhs.empty();
        break;
    }
    if (!ok) {
      report.reduced = false;
      report.offenders.push_back(i);
    }
  }
  return report;
}

bool marked_index_end_check(const IndexedGrammar& g) {
  const auto& start = g.start();
  std::optional<std::size_t> start_rule;
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    bool mentions = p.lhs == start || std::find(p.rhs.begin(), p.rhs.end(), start) != p.rhs.end();
    if (!mentions) continue;
    if (start_rule) return false;
    start_rule = i;
  }
  if (!start_rule) return false;
  const auto& root = g.productions()[*start_rule];
  if (root.kind != RuleKind::Push || root.lhs != start) return false;
  for (std::size_t i = 0; i < g.productions().size(); ++i)
    if (i != *start_rule && g.productions()[i].index == root.index) return false;
  return true;
}

Symbol fresh_symbol(const std::string& base, const std::set<Symbol>& taken) {
  if (!taken.count(base)) return base;
  for (std::size_t k = 1;; ++k) {
    auto candidate = base + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

IndexedGrammar mark_index_end(const IndexedGrammar& g) {
  std::set<Symbol> taken;
  for (const auto* v : {&g.symbols().nonterminals, &g.symbols().terminals, &g.symbols().indices})
    taken.insert(v->begin(), v->end());
  auto s0 = fresh_symbol(g.start() + "_0", taken);
  taken.insert(s0);
  auto dollar = fresh_symbol("$", taken);

  SymbolTable symbols = g.symbols();
  symbols.nonterminals.insert(symbols.nonterminals.begin(), s0);
  symbols.indices.insert(symbols.indices.begin(), dollar);
  std::vector<IndexedProduction> rules;
  rules.push_back(IndexedProduction::push(s0, g.start(), dollar));
  rules.insert(rules.end(), g.productions().begin(), g.productions().end());
  return IndexedGrammar(std::move(symbols), std::move(rules), s0);
}

Word terminal_string(const DerivationTree& t) {
  Word out;
  auto domain = t.domain();
  for (const auto& x : domain.leaves()) {
    const auto& label = t.at(x);
    if (!label.symbol.empty()) out.push_back(label.symbol);
  }
  return out;
}

namespace {

// Does production p license node x whose children are `kids`? `stack` is x's.
bool licenses(const IndexedGrammar& g, const IndexedProduction& p, const Word& stack,
              const std::vector<const NodeLabel*>& kids) {
  const auto& sym = g.symbols();
  auto child_ok = [&](const NodeLabel& kid, const Symbol& expect, const Word& inherited) {
    if (sym.is_nonterminal(expect)) return !kid.leaf && kid.symbol == expect && kid.stack == inherited;
    return kid.leaf && kid.symbol == expect;
  };
  auto body_ok = [&](const Word& inherited) {
    if (p.rhs.empty()) return kids.size() == 1 && kids[0]->leaf && kids[0]->symbol.empty();
    if (kids.size() != p.rhs.size()) return false;
    for (std::size_t i = 0; i < kids.size(); ++i)
      if (!child_ok(*kids[i], p.rhs[i], inherited)) return false;
    return true;
  };
  switch (p.kind) {
    case RuleKind::Push: {
      Word pushed = stack;
      pushed.insert(pushed.begin(), p.index);
      return kids.size() == 1 && child_ok(*kids[0], p.rhs[0], pushed);
    }
    case RuleKind::Pop: {
      if (stack.empty() || stack.front() != p.index) return false;
      return body_ok(Word(stack.begin() + 1, stack.end()));
    }
    case RuleKind::Plain:
      return body_ok(stack);
  }
  return false;
}

}  // namespace

TreeValidation validate_derivation_tree(const IndexedGrammar& g, const DerivationTree& t) {
  TreeValidation r;
  auto fail = [&](const TreeAddress& x, std::string cond, std::string msg) {
    r.ok = false;
    r.where = x;
    r.condition = std::move(cond);
    r.message = std::move(msg);
    r.license.clear();
    return r;
  };
  auto domain = t.domain();
  if (!domain.valid()) return fail(TreeAddress::root(), "domain", "not a tree domain");
  if (domain.size() < 2) return fail(TreeAddress::root(), "i", "a derivation needs at least one expansion");

  const auto& root = t.at(TreeAddress::root());
  if (root.leaf || root.symbol != g.start() || !root.stack.empty())
    return fail(TreeAddress::root(), "i", "root must be the start symbol with an empty index string");

  const auto& sym = g.symbols();
  for (const auto& [x, label] : t.labels) {
    auto d = domain.out_degree(x);
    if (d == 0) {
      if (!label.leaf || (!label.symbol.empty() && !sym.is_terminal(label.symbol)))
        return fail(x, "iii", "leaf '" + label.to_string() + "' is not a terminal or ε");
      continue;
    }
    if (label.leaf || !sym.is_nonterminal(label.symbol))
      return fail(x, "ii", "internal node '" + label.to_string() + "' is not a nonterminal");
    for (const auto& f : label.stack)
      if (!sym.is_index(f)) return fail(x, "ii", "undeclared index '" + f + "'");
    std::vector<const NodeLabel*> kids;
    for (std::size_t i = 1; i <= d; ++i) kids.push_back(&t.at(x.child(static_cast<std::uint32_t>(i))));
    bool found = false;
    for (std::size_t k = 0; k < g.productions().size() && !found; ++k) {
      const auto& p = g.productions()[k];
      if (p.lhs == label.symbol && licenses(g, p, label.stack, kids)) {
        r.license[x] = k;
        found = true;
      }
    }
    if (!found) return fail(x, "ii", "no production licenses node '" + label.to_string() + "'");
  }
  r.ok = true;
  return r;
}

}  // namespace glab
