#include "generators.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace glab::testing {

namespace {

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

const std::vector<Symbol> kNonterminals{"A", "B", "C", "D"};
const std::vector<Symbol> kIndices{"f", "g"};
const std::vector<Symbol> kTerminals{"a", "b"};

std::vector<Symbol> used_in_order(const std::vector<Symbol>& declared, const std::set<Symbol>& used) {
  std::vector<Symbol> out;
  for (const auto& s : declared)
    if (used.count(s)) out.push_back(s);
  return out;
}

}  // namespace

IndexedGrammar random_reduced_marked(Rng& rng) {
  std::vector<Symbol> nts(kNonterminals.begin(), kNonterminals.begin() + between(rng, 1, 3));
  std::vector<Symbol> idx(kIndices.begin(), kIndices.begin() + between(rng, 1, 2));
  std::vector<IndexedProduction> ps{IndexedProduction::push("S", nts.front(), "$")};
  std::set<Symbol> used_t;
  auto terminal_rule = [&](const Symbol& lhs) {
    if (coin(rng, 0.15)) return IndexedProduction::plain(lhs, {});
    const auto& t = pick(rng, kTerminals);
    used_t.insert(t);
    return IndexedProduction::plain(lhs, {t});
  };
  ps.push_back(terminal_rule(pick(rng, nts)));
  auto extra = between(rng, 1, 6);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto& lhs = pick(rng, nts);
    switch (below(rng, 4)) {
      case 0: ps.push_back(IndexedProduction::push(lhs, pick(rng, nts), pick(rng, idx))); break;
      case 1: ps.push_back(IndexedProduction::pop(lhs, pick(rng, idx), {pick(rng, nts)})); break;
      case 2: ps.push_back(IndexedProduction::plain(lhs, {pick(rng, nts), pick(rng, nts)})); break;
      default: ps.push_back(terminal_rule(lhs)); break;
    }
  }
  std::shuffle(ps.begin() + 1, ps.end(), rng);
  std::vector<Symbol> n{"S"};
  n.insert(n.end(), nts.begin(), nts.end());
  std::vector<Symbol> i{"$"};
  i.insert(i.end(), idx.begin(), idx.end());
  auto t = used_in_order(kTerminals, used_t);
  if (t.empty()) t.push_back("a");
  return IndexedGrammar({n, t, i}, std::move(ps), "S");
}

IndexedGrammar random_indexed(Rng& rng) {
  std::vector<Symbol> nts{"S"};
  nts.insert(nts.end(), kNonterminals.begin(), kNonterminals.begin() + between(rng, 0, 2));
  std::vector<Symbol> idx(kIndices.begin(), kIndices.begin() + between(rng, 1, 2));
  auto symbol = [&]() { return coin(rng, 0.6) ? pick(rng, nts) : pick(rng, kTerminals); };
  auto rhs = [&](std::size_t lo) {
    Word w;
    auto len = between(rng, lo, 3);
    for (std::size_t k = 0; k < len; ++k) w.push_back(symbol());
    return w;
  };
  std::vector<IndexedProduction> ps;
  // At least one way to stop.
  ps.push_back(IndexedProduction::pop(pick(rng, nts), pick(rng, idx), {pick(rng, kTerminals)}));
  ps.push_back(IndexedProduction::push("S", pick(rng, nts), pick(rng, idx)));
  auto extra = between(rng, 1, 5);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto& lhs = pick(rng, nts);
    switch (below(rng, 3)) {
      case 0: ps.push_back(IndexedProduction::push(lhs, pick(rng, nts), pick(rng, idx))); break;
      case 1: ps.push_back(IndexedProduction::pop(lhs, pick(rng, idx), rhs(0))); break;
      default: ps.push_back(IndexedProduction::plain(lhs, rhs(0))); break;
    }
  }
  std::shuffle(ps.begin(), ps.end(), rng);
  return IndexedGrammar({nts, kTerminals, idx}, std::move(ps), "S");
}

UnificationGrammar random_ugi_reduced_sink_mapped(Rng& rng) {
  std::vector<Symbol> nts(kNonterminals.begin(), kNonterminals.begin() + between(rng, 1, 4));
  std::vector<Symbol> vals(kIndices.begin(), kIndices.begin() + between(rng, 0, 2));
  std::vector<UProduction> ps{{"S", {{nts.front(), push_schema("$")}}}};
  std::vector<LexRule> lex;
  std::set<Symbol> used_v{"$"}, used_t;
  auto add_lex = [&](const Symbol& lhs) {
    Symbol w = coin(rng, 0.15) ? Symbol{} : pick(rng, kTerminals);
    if (!w.empty()) used_t.insert(w);
    lex.push_back({lhs, w, {}});
  };
  add_lex(pick(rng, nts));
  auto extra = between(rng, 1, 7);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto& lhs = pick(rng, nts);
    auto kind = vals.empty() ? 2 + below(rng, 2) : below(rng, 4);
    if (kind < 2) {
      const auto& f = pick(rng, vals);
      used_v.insert(f);
      ps.push_back({lhs, {{pick(rng, nts), kind == 0 ? push_schema(f) : pop_schema(f)}}});
    } else if (kind == 2) {
      ps.push_back({lhs, {{pick(rng, nts), share_schema()}, {pick(rng, nts), share_schema()}}});
    } else {
      add_lex(lhs);
    }
  }
  std::shuffle(ps.begin() + 1, ps.end(), rng);
  std::shuffle(lex.begin(), lex.end(), rng);

  std::vector<Symbol> n{"S"};
  n.insert(n.end(), nts.begin(), nts.end());
  std::shuffle(n.begin(), n.end(), rng);
  auto t = used_in_order(kTerminals, used_t);
  if (t.empty()) t.push_back("a");
  std::vector<Symbol> v(used_v.begin(), used_v.end());
  std::shuffle(v.begin(), v.end(), rng);
  return UnificationGrammar({n, t, {kNext, kIdx}, v}, std::move(ps), std::move(lex), "S");
}

UnificationGrammar random_ugi(Rng& rng) {
  std::vector<Symbol> nts{"S"};
  nts.insert(nts.end(), kNonterminals.begin(), kNonterminals.begin() + between(rng, 1, 3));
  std::vector<Symbol> vals(kIndices.begin(), kIndices.begin() + between(rng, 1, 2));
  auto schema = [&]() -> Schema {
    switch (below(rng, 4)) {
      case 0: return push_schema(pick(rng, vals));
      case 1: return pop_schema(pick(rng, vals));
      default: return share_schema();
    }
  };
  std::vector<UProduction> ps;
  std::vector<LexRule> lex;
  auto extra = between(rng, 2, 7);
  for (std::size_t k = 0; k < extra; ++k) {
    UProduction p{pick(rng, nts), {}};
    auto arity = between(rng, 1, 3);
    for (std::size_t d = 0; d < arity; ++d) p.daughters.push_back({pick(rng, nts), schema()});
    ps.push_back(std::move(p));
  }
  auto lexical = between(rng, 1, 3);
  for (std::size_t k = 0; k < lexical; ++k)
    lex.push_back({pick(rng, nts), coin(rng, 0.15) ? Symbol{} : pick(rng, kTerminals), {}});
  return UnificationGrammar({nts, kTerminals, {kNext, kIdx}, vals}, std::move(ps), std::move(lex), "S");
}

std::optional<CStructure> random_cstructure(const UnificationGrammar& g, Rng& rng, std::size_t depth) {
  std::map<Symbol, std::vector<std::size_t>> prods, lexs;
  for (std::size_t i = 0; i < g.productions().size(); ++i) prods[g.productions()[i].mother].push_back(i);
  for (std::size_t i = 0; i < g.lexicon().size(); ++i) lexs[g.lexicon()[i].mother].push_back(i);

  CStructure cs;
  std::function<bool(const TreeAddress&, const Symbol&, std::size_t)> grow = [&](const TreeAddress& x,
                                                                                 const Symbol& a,
                                                                                 std::size_t left) -> bool {
    const auto& p = prods[a];
    const auto& l = lexs[a];
    bool use_lex = p.empty() || left == 0 || (!l.empty() && coin(rng, 0.3));
    if (use_lex) {
      if (l.empty()) return false;
      auto k = pick(rng, l);
      const auto& rule = g.lexicon()[k];
      cs.nodes[x.child(1)] = CNode{rule.word, true, SlotRef{true, k, 0}, rule.schema};
      return true;
    }
    auto k = pick(rng, p);
    const auto& rule = g.productions()[k];
    for (std::size_t d = 0; d < rule.daughters.size(); ++d) {
      auto y = x.child(static_cast<std::uint32_t>(d + 1));
      cs.nodes[y] = CNode{rule.daughters[d].category, false, SlotRef{false, k, d}, rule.daughters[d].schema};
      if (!grow(y, rule.daughters[d].category, left - 1)) return false;
    }
    return true;
  };
  cs.nodes[TreeAddress::root()] = CNode{g.start(), false, std::nullopt, {}};
  if (!grow(TreeAddress::root(), g.start(), depth)) return std::nullopt;
  return cs;
}

std::vector<Equation> random_equations(Rng& rng, std::size_t max_path_length) {
  const std::vector<TreeAddress> names{TreeAddress{1}, TreeAddress{2}, TreeAddress{3}};
  const std::vector<Attribute> attrs{"a", "b"};
  const std::vector<Symbol> values{"u", "v"};
  std::size_t budget = between(rng, 1, max_path_length);
  auto path = [&](std::size_t lo) {
    Path p;
    auto len = std::min(budget, between(rng, lo, 3));
    for (std::size_t k = 0; k < len; ++k) p.push_back(pick(rng, attrs));
    budget -= len;
    return p;
  };
  std::vector<Equation> es;
  auto count = between(rng, 1, 4);
  for (std::size_t k = 0; k < count; ++k) {
    if (coin(rng, 0.4)) {
      if (budget == 0) break;
      auto x = pick(rng, names);
      auto p = path(1);
      es.push_back(make_value_equation(x, p, pick(rng, values)));
    } else {
      auto x = pick(rng, names);
      auto p = path(0);
      auto y = pick(rng, names);
      auto q = path(0);
      es.push_back(PathEquation{x, p, y, q});
    }
  }
  return es;
}

}  // namespace glab::testing
