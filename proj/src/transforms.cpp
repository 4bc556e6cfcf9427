#include "glab/transforms.hpp"

#include <algorithm>
#include <functional>

namespace glab {

UTransformResult u_transform(const IndexedGrammar& g) {
  auto reduced = reduced_form_check(g);
  if (!reduced.reduced)
    throw PreconditionError("U transform needs reduced form; rule " + std::to_string(reduced.offenders.front() + 1) +
                            " (" + g.productions()[reduced.offenders.front()].to_string() + ") is not");
  if (!marked_index_end_check(g)) throw PreconditionError("U transform needs a marked index-end");

  const auto& s = g.symbols();
  UnificationSymbols symbols{s.nonterminals, s.terminals, {kNext, kIdx}, s.indices};
  std::vector<UProduction> productions;
  std::vector<LexRule> lexicon;
  RuleCorrespondence corr;
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    switch (p.kind) {
      case RuleKind::Push:
        productions.push_back({p.lhs, {{p.rhs.at(0), push_schema(p.index)}}});
        break;
      case RuleKind::Pop:
        productions.push_back({p.lhs, {{p.rhs.at(0), pop_schema(p.index)}}});
        break;
      case RuleKind::Plain:
        if (p.rhs.size() == 2) {
          productions.push_back({p.lhs, {{p.rhs[0], share_schema()}, {p.rhs[1], share_schema()}}});
        } else {
          lexicon.push_back({p.lhs, p.rhs.empty() ? Symbol{} : p.rhs[0], {}});
          corr.links.push_back({i, true, lexicon.size() - 1});
          continue;
        }
        break;
    }
    corr.links.push_back({i, false, productions.size() - 1});
  }
  return {UnificationGrammar(std::move(symbols), std::move(productions), std::move(lexicon), g.start()),
          std::move(corr)};
}

ReverseUResult reverse_u(const UnificationGrammar& g) {
  auto report = ugi_check(g);
  if (!report.is_ugi || !report.is_reduced || !report.has_sink_mapped_root)
    throw PreconditionError("reverse U needs a reduced UGI grammar with a sink-mapped root: " +
                            report.offenders.front());
  std::vector<IndexedProduction> productions;
  RuleCorrespondence corr;
  std::set<Symbol> used;
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    if (p.daughters.size() == 2) {
      productions.push_back(IndexedProduction::plain(p.mother, {p.daughters[0].category, p.daughters[1].category}));
    } else {
      auto shape = classify_schema(p.daughters[0].schema);
      used.insert(shape.value);
      if (shape.form == SchemaForm::Push)
        productions.push_back(IndexedProduction::push(p.mother, p.daughters[0].category, shape.value));
      else
        productions.push_back(IndexedProduction::pop(p.mother, shape.value, {p.daughters[0].category}));
    }
    corr.links.push_back({productions.size() - 1, false, i});
  }
  for (std::size_t i = 0; i < g.lexicon().size(); ++i) {
    const auto& l = g.lexicon()[i];
    productions.push_back(IndexedProduction::plain(l.mother, l.word.empty() ? Word{} : Word{l.word}));
    corr.links.push_back({productions.size() - 1, true, i});
  }
  const auto& s = g.symbols();
  SymbolTable table{s.nonterminals, s.terminals, {}};
  for (const auto& v : s.values)
    if (used.count(v)) table.indices.push_back(v);
  return {IndexedGrammar(std::move(table), std::move(productions), g.start()), std::move(corr)};
}

FeatureStructure index_string_structure(const std::map<TreeAddress, Word>& stacks) {
  FeatureStructure m;
  std::map<Word, NodeId> strings;
  std::map<Symbol, NodeId> atoms;
  std::function<NodeId(const Word&)> node_for = [&](const Word& w) -> NodeId {
    auto it = strings.find(w);
    if (it != strings.end()) return it->second;
    auto id = m.add_node();
    strings.emplace(w, id);
    if (!w.empty()) {
      auto [a, fresh] = atoms.try_emplace(w.front(), 0);
      if (fresh) {
        a->second = m.add_node();
        m.alpha[a->second] = w.front();
      }
      m.delta[{id, kIdx}] = a->second;
      m.delta[{id, kNext}] = node_for(Word(w.begin() + 1, w.end()));
    }
    return id;
  };
  for (const auto& [x, w] : stacks) m.names[x] = node_for(w);
  return canonicalize(m);
}

CStructureConversion cstructure_from_derivation(const IndexedGrammar& g, const DerivationTree& t) {
  auto u = u_transform(g);
  auto v = validate_derivation_tree(g, t);
  if (!v.ok) throw PreconditionError("derivation tree is not valid: " + v.message);
  std::map<std::size_t, RuleLink> by_production;
  for (const auto& l : u.correspondence.links) by_production[l.indexed] = l;

  CStructureConversion out;
  std::map<TreeAddress, Word> stacks;
  for (const auto& [x, label] : t.labels) {
    CNode node;
    node.leaf = label.leaf;
    node.category = label.symbol;
    if (!x.is_root()) {
      const auto& link = by_production.at(v.license.at(x.parent()));
      auto slot = static_cast<std::size_t>(x.digits().back() - 1);
      node.slot = SlotRef{link.lexical, link.unification, slot};
      node.schema = link.lexical ? u.grammar.lexicon()[link.unification].schema
                                 : u.grammar.productions()[link.unification].daughters.at(slot).schema;
    }
    out.cstructure.nodes[x] = std::move(node);
    stacks[x] = label.stack;
  }
  out.model = index_string_structure(stacks);
  return out;
}

Word idx_lst(const FeatureStructure& m, NodeId q) {
  std::map<NodeId, Word> memo;
  std::function<const Word&(NodeId)> go = [&](NodeId n) -> const Word& {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    Word w;
    auto a = m.alpha.find(n);
    if (a != m.alpha.end()) {
      w.push_back(a->second);
    } else {
      auto idx = m.step(n, kIdx);
      auto next = m.step(n, kNext);
      if (idx && next) {
        w = go(*idx);
        const auto& rest = go(*next);
        w.insert(w.end(), rest.begin(), rest.end());
      }
    }
    return memo.emplace(n, std::move(w)).first->second;
  };
  return go(q);
}

Word idx_lst_dollar(const FeatureStructure& m, NodeId q, const Symbol& dollar) {
  auto w = idx_lst(m, q);
  auto it = std::find(w.begin(), w.end(), dollar);
  if (it == w.end()) return {};
  return Word(w.begin(), it + 1);
}

namespace {

Symbol start_index(const IndexedGrammar& g) {
  for (const auto& p : g.productions())
    if (p.lhs == g.start() && p.kind == RuleKind::Push) return p.index;
  throw PreconditionError("grammar has no start rule pushing an index");
}

}  // namespace

DerivationTree derivation_from_cstructure(const IndexedGrammar& g, const CStructure& cs, const FeatureStructure& m) {
  auto u = u_transform(g);
  auto problem = validate_cstructure(u.grammar, cs);
  if (!problem.empty()) throw PreconditionError("c-structure does not belong to U(G): " + problem);
  if (!well_defined_check(m).well_defined()) throw Error("feature structure is not well defined");
  if (!satisfies_set(m, collect_equations(cs))) throw Error("feature structure does not satisfy the c-structure");
  const auto dollar = start_index(g);

  DerivationTree t;
  for (const auto& [x, node] : cs.nodes) {
    if (node.leaf) {
      t.labels[x] = node.category.empty() ? NodeLabel::epsilon() : NodeLabel::terminal(node.category);
      continue;
    }
    Word stack;
    if (!x.is_root()) stack = idx_lst_dollar(m, m.names.at(x), dollar);
    t.labels[x] = NodeLabel::nonterminal(node.category, std::move(stack));
  }
  auto v = validate_derivation_tree(g, t);
  if (!v.ok) throw std::logic_error("reconstructed derivation is invalid at condition " + v.condition + ": " + v.message);
  return t;
}

DerivationTree derivation_from_cstructure(const IndexedGrammar& g, const CStructure& cs) {
  auto solved = generates_check(cs);
  if (!solved.consistent()) throw Error("c-structure is inconsistent: " + to_string(*solved.diagnosis));
  return derivation_from_cstructure(g, cs, *solved.model);
}

}  // namespace glab
