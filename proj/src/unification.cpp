#include "glab/unification.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <unordered_set>

#include "glab/indexed.hpp"

namespace glab {

namespace {

bool contains(const std::vector<Symbol>& v, const Symbol& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void check_identifier(const Symbol& s, const char* what) {
  if (s.empty()) throw Error(std::string("empty ") + what + " name");
  for (unsigned char c : s)
    if (std::isspace(c) || c == '{' || c == '}' || c == ';' || c == '=')
      throw Error(std::string(what) + " '" + s + "' contains whitespace or one of { } ; =");
  static const std::set<std::string> reserved{"_",     "->",           "up",        "dn",
                                              "rule",  "lex",          "start",     "values",
                                              "attributes", "nonterminals", "terminals"};
  if (reserved.count(s) || s[0] == '#') throw Error(std::string(what) + " name '" + s + "' is reserved");
}

const char* arrow_name(Arrow a) { return a == Arrow::Up ? "up" : "dn"; }

std::string side(Arrow a, const Path& p) {
  std::string out = arrow_name(a);
  for (const auto& x : p) out += " " + x;
  return out;
}

}  // namespace

bool UnificationSymbols::is_nonterminal(const Symbol& s) const { return contains(nonterminals, s); }
bool UnificationSymbols::is_terminal(const Symbol& s) const { return contains(terminals, s); }
bool UnificationSymbols::is_attribute(const Symbol& s) const { return contains(attributes, s); }
bool UnificationSymbols::is_value(const Symbol& s) const { return contains(values, s); }

std::string to_string(const EqSchema& e) {
  if (const auto* p = std::get_if<ArrowPathEq>(&e)) return side(p->lhs, p->lhs_path) + " = " + side(p->rhs, p->rhs_path);
  const auto& v = std::get<ArrowValueEq>(e);
  return side(v.side, v.path) + " = " + v.value;
}

std::string to_string(const Schema& s) {
  if (s.empty()) return "{ }";
  std::string out = "{ ";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " ; ";
    out += to_string(s[i]);
  }
  return out + " }";
}

UnificationGrammar::UnificationGrammar(UnificationSymbols symbols, std::vector<UProduction> productions,
                                       std::vector<LexRule> lexicon, Symbol start)
    : symbols_(std::move(symbols)),
      productions_(std::move(productions)),
      lexicon_(std::move(lexicon)),
      start_(std::move(start)) {
  std::unordered_set<Symbol> categories;
  for (const auto* v : {&symbols_.nonterminals, &symbols_.terminals}) {
    for (const auto& s : *v) {
      check_identifier(s, "symbol");
      if (!categories.insert(s).second)
        throw Error("symbol '" + s + "' declared twice (nonterminals and terminals must be disjoint)");
    }
  }
  std::unordered_set<Symbol> seen_attr, seen_value;
  for (const auto& a : symbols_.attributes) {
    check_identifier(a, "attribute");
    if (!seen_attr.insert(a).second) throw Error("attribute '" + a + "' declared twice");
  }
  for (const auto& v : symbols_.values) {
    check_identifier(v, "value");
    if (!seen_value.insert(v).second) throw Error("value '" + v + "' declared twice");
  }
  if (!symbols_.is_nonterminal(start_)) throw Error("start symbol '" + start_ + "' is not a declared nonterminal");

  auto check_path = [&](const Path& p, const std::string& where) {
    for (const auto& a : p)
      if (!symbols_.is_attribute(a)) throw Error("undeclared attribute '" + a + "'" + where);
  };
  auto check_schema = [&](const Schema& s, bool lexical, const std::string& where) {
    for (const auto& e : s) {
      if (const auto* p = std::get_if<ArrowPathEq>(&e)) {
        if (lexical) throw Error("lexicon schemata may only contain value equations" + where);
        check_path(p->lhs_path, where);
        check_path(p->rhs_path, where);
      } else {
        const auto& v = std::get<ArrowValueEq>(e);
        if (v.path.empty()) throw Error("value equation needs a non-empty path" + where);
        check_path(v.path, where);
        if (!symbols_.is_value(v.value)) throw Error("undeclared value '" + v.value + "'" + where);
      }
    }
  };
  for (std::size_t i = 0; i < productions_.size(); ++i) {
    const auto& p = productions_[i];
    auto where = " in production " + std::to_string(i + 1) + " (" + p.mother + ")";
    if (!symbols_.is_nonterminal(p.mother)) throw Error("undeclared nonterminal '" + p.mother + "'" + where);
    if (p.daughters.empty()) throw Error("production needs at least one daughter" + where);
    for (const auto& d : p.daughters) {
      if (!symbols_.is_nonterminal(d.category))
        throw Error("daughter '" + d.category + "' is not a declared nonterminal" + where);
      check_schema(d.schema, false, where);
    }
  }
  for (std::size_t i = 0; i < lexicon_.size(); ++i) {
    const auto& l = lexicon_[i];
    auto where = " in lexicon rule " + std::to_string(i + 1) + " (" + l.mother + ")";
    if (!symbols_.is_nonterminal(l.mother)) throw Error("undeclared nonterminal '" + l.mother + "'" + where);
    if (!l.word.empty() && !symbols_.is_terminal(l.word))
      throw Error("undeclared terminal '" + l.word + "'" + where);
    check_schema(l.schema, true, where);
  }
}

TreeDomain CStructure::domain() const {
  TreeDomain d;
  for (const auto& [x, _] : nodes) d.insert(x);
  return d;
}

std::set<TreeAddress> CStructure::addresses() const {
  std::set<TreeAddress> out;
  for (const auto& [x, _] : nodes) out.insert(x);
  return out;
}

const CNode& CStructure::at(const TreeAddress& x) const {
  auto it = nodes.find(x);
  if (it == nodes.end()) throw Error("address " + x.to_string() + " not in c-structure");
  return it->second;
}

Word CStructure::terminal_string() const {
  Word out;
  for (const auto& x : domain().leaves()) {
    const auto& n = at(x);
    if (!n.category.empty()) out.push_back(n.category);
  }
  return out;
}

namespace {

// Orients a two-sided equation so that the side with the longer path comes
// first; ↑ψ ≐ ↓ and ↓ ≐ ↑ψ describe the same constraint.
ArrowPathEq oriented(ArrowPathEq e) {
  if (e.lhs_path.size() < e.rhs_path.size() ||
      (e.lhs_path.size() == e.rhs_path.size() && e.lhs == Arrow::Down && e.rhs == Arrow::Up)) {
    std::swap(e.lhs, e.rhs);
    std::swap(e.lhs_path, e.rhs_path);
  }
  return e;
}

}  // namespace

SchemaShape classify_schema(const Schema& s) {
  std::set<EqSchema> set;
  for (const auto& e : s) {
    if (const auto* p = std::get_if<ArrowPathEq>(&e))
      set.insert(oriented(*p));
    else
      set.insert(e);
  }
  SchemaShape out;
  if (set.size() == 1) {
    const auto* p = std::get_if<ArrowPathEq>(&*set.begin());
    if (p && p->lhs_path.empty() && p->rhs_path.empty() && p->lhs != p->rhs) out.form = SchemaForm::Share;
    return out;
  }
  if (set.size() != 2) return out;
  const ArrowPathEq* link = nullptr;
  const ArrowValueEq* value = nullptr;
  for (const auto& e : set) {
    if (const auto* p = std::get_if<ArrowPathEq>(&e)) link = p;
    if (const auto* v = std::get_if<ArrowValueEq>(&e)) value = v;
  }
  if (!link || !value) return out;
  if (link->lhs_path != Path{kNext} || !link->rhs_path.empty() || link->lhs == link->rhs) return out;
  if (value->path != Path{kIdx} || value->side != link->lhs) return out;
  // ↓ next ≐ ↑ pushes, ↑ next ≐ ↓ pops.
  out.form = link->lhs == Arrow::Down ? SchemaForm::Push : SchemaForm::Pop;
  out.value = value->value;
  return out;
}

Schema share_schema() { return {ArrowPathEq{Arrow::Up, {}, Arrow::Down, {}}}; }

Schema push_schema(const Symbol& f) {
  return {ArrowPathEq{Arrow::Down, {kNext}, Arrow::Up, {}}, ArrowValueEq{Arrow::Down, {kIdx}, f}};
}

Schema pop_schema(const Symbol& f) {
  return {ArrowPathEq{Arrow::Up, {kNext}, Arrow::Down, {}}, ArrowValueEq{Arrow::Up, {kIdx}, f}};
}

std::vector<Equation> instantiate(const Schema& schema, const TreeAddress& mother, const TreeAddress& daughter) {
  if (daughter.is_root() || daughter.parent() != mother)
    throw Error("address " + daughter.to_string() + " is not a daughter of " + mother.to_string());
  auto name = [&](Arrow a) { return a == Arrow::Up ? mother : daughter; };
  std::vector<Equation> out;
  for (const auto& e : schema) {
    if (const auto* p = std::get_if<ArrowPathEq>(&e))
      out.push_back(PathEquation{name(p->lhs), p->lhs_path, name(p->rhs), p->rhs_path});
    else {
      const auto& v = std::get<ArrowValueEq>(e);
      out.push_back(make_value_equation(name(v.side), v.path, v.value));
    }
  }
  return out;
}

std::string validate_cstructure(const UnificationGrammar& g, const CStructure& cs) {
  auto domain = cs.domain();
  if (!domain.valid()) return "not a tree domain";
  const auto& root = cs.at(TreeAddress::root());
  if (root.leaf || root.category != g.start()) return "root is not the start symbol";
  const auto& sym = g.symbols();
  for (const auto& [x, node] : cs.nodes) {
    auto d = domain.out_degree(x);
    if (d == 0) {
      if (!node.leaf || (!node.category.empty() && !sym.is_terminal(node.category)))
        return "leaf " + x.to_string() + " is not a terminal or ε";
      continue;
    }
    if (node.leaf || !sym.is_nonterminal(node.category)) return "internal node " + x.to_string() + " is not a nonterminal";
    std::vector<const CNode*> kids;
    for (std::size_t i = 1; i <= d; ++i) kids.push_back(&cs.at(x.child(static_cast<std::uint32_t>(i))));
    bool ok = false;
    for (const auto& p : g.productions()) {
      if (p.mother != node.category || p.daughters.size() != d) continue;
      bool match = true;
      for (std::size_t i = 0; i < d && match; ++i)
        match = !kids[i]->leaf && kids[i]->category == p.daughters[i].category && kids[i]->schema == p.daughters[i].schema;
      if (match) ok = true;
    }
    for (const auto& l : g.lexicon()) {
      if (l.mother == node.category && d == 1 && kids[0]->leaf && kids[0]->category == l.word &&
          kids[0]->schema == l.schema)
        ok = true;
    }
    if (!ok) return "no rule licenses node " + x.to_string();
  }
  return {};
}

std::vector<Equation> collect_equations(const CStructure& cs) {
  std::vector<Equation> out;
  for (const auto& [x, node] : cs.nodes) {
    if (x.is_root()) continue;
    auto eqs = instantiate(node.schema, x.parent(), x);
    out.insert(out.end(), eqs.begin(), eqs.end());
  }
  return out;
}

SolveResult generates_check(const CStructure& cs) { return solve(collect_equations(cs), cs.addresses()); }

UgiReport ugi_check(const UnificationGrammar& g) {
  UgiReport r;
  r.is_ugi = true;
  auto attrs_ok = [&](const Schema& s) {
    for (const auto& e : s) {
      const Path* paths[2] = {nullptr, nullptr};
      if (const auto* p = std::get_if<ArrowPathEq>(&e))
        paths[0] = &p->lhs_path, paths[1] = &p->rhs_path;
      else
        paths[0] = &std::get<ArrowValueEq>(e).path;
      for (const auto* p : paths)
        if (p)
          for (const auto& a : *p)
            if (a != kNext && a != kIdx) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    for (std::size_t k = 0; k < p.daughters.size(); ++k) {
      const auto& s = p.daughters[k].schema;
      if (!attrs_ok(s) || classify_schema(s).form == SchemaForm::Other) {
        r.is_ugi = false;
        r.offenders.push_back("production " + std::to_string(i + 1) + " daughter " + std::to_string(k + 1) +
                              ": schema " + to_string(s) + " is not a share, push or pop set");
      }
    }
  }
  for (std::size_t i = 0; i < g.lexicon().size(); ++i)
    if (!g.lexicon()[i].schema.empty()) {
      r.is_ugi = false;
      r.offenders.push_back("lexicon rule " + std::to_string(i + 1) + ": schema must be empty");
    }
  if (!r.is_ugi) return r;

  r.is_reduced = true;
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    bool ok = false;
    if (p.daughters.size() == 1) {
      auto form = classify_schema(p.daughters[0].schema).form;
      ok = form == SchemaForm::Push || form == SchemaForm::Pop;
    } else if (p.daughters.size() == 2) {
      ok = classify_schema(p.daughters[0].schema).form == SchemaForm::Share &&
           classify_schema(p.daughters[1].schema).form == SchemaForm::Share;
    }
    if (!ok) {
      r.is_reduced = false;
      r.offenders.push_back("production " + std::to_string(i + 1) + ": not in reduced form");
    }
  }

  // Unique start rule S -> A pushing a value used nowhere else.
  std::vector<std::size_t> start_rules;
  std::size_t start_mentions = 0;
  for (std::size_t i = 0; i < g.productions().size(); ++i) {
    const auto& p = g.productions()[i];
    bool mentions = p.mother == g.start();
    for (const auto& d : p.daughters) mentions = mentions || d.category == g.start();
    if (mentions) ++start_mentions, start_rules.push_back(i);
  }
  for (const auto& l : g.lexicon())
    if (l.mother == g.start()) ++start_mentions;
  r.has_sink_mapped_root = false;
  if (start_mentions == 1 && start_rules.size() == 1) {
    const auto& p = g.productions()[start_rules[0]];
    if (p.mother == g.start() && p.daughters.size() == 1) {
      auto shape = classify_schema(p.daughters[0].schema);
      if (shape.form == SchemaForm::Push) {
        bool unique = true;
        for (std::size_t i = 0; i < g.productions().size() && unique; ++i) {
          if (i == start_rules[0]) continue;
          for (const auto& d : g.productions()[i].daughters) {
            auto other = classify_schema(d.schema);
            if (other.form != SchemaForm::Share && other.value == shape.value) unique = false;
          }
        }
        r.has_sink_mapped_root = unique;
      }
    }
  }
  if (!r.has_sink_mapped_root)
    r.offenders.push_back("start symbol is not confined to a single rule pushing a reserved value");
  return r;
}

namespace {

std::set<Symbol> all_names(const UnificationSymbols& s) {
  std::set<Symbol> out;
  for (const auto* v : {&s.nonterminals, &s.terminals, &s.attributes, &s.values}) out.insert(v->begin(), v->end());
  return out;
}

class FreshNames {
 public:
  explicit FreshNames(std::set<Symbol> taken) : taken_(std::move(taken)) {}
  Symbol next() {
    for (;;) {
      auto name = "X_" + std::to_string(++counter_);
      if (taken_.insert(name).second) return name;
    }
  }

 private:
  std::set<Symbol> taken_;
  std::size_t counter_ = 0;
};

}  // namespace

UnificationGrammar ugi_normalize(const UnificationGrammar& g) {
  auto report = ugi_check(g);
  if (!report.is_ugi) throw PreconditionError("ugi-normalize needs a UGI grammar: " + report.offenders.front());
  auto symbols = g.symbols();
  FreshNames fresh(all_names(symbols));

  // (i) detach push/pop daughters of non-unary rules; (ii) binarize.
  std::vector<UProduction> staged;
  for (const auto& p : g.productions()) {
    if (p.daughters.size() == 1) {
      staged.push_back(p);
      continue;
    }
    UProduction shared{p.mother, {}};
    for (const auto& d : p.daughters) {
      if (classify_schema(d.schema).form == SchemaForm::Share) {
        shared.daughters.push_back({d.category, share_schema()});
        continue;
      }
      auto x = fresh.next();
      symbols.nonterminals.push_back(x);
      staged.push_back({x, {d}});
      shared.daughters.push_back({x, share_schema()});
    }
    while (shared.daughters.size() > 2) {
      auto x = fresh.next();
      symbols.nonterminals.push_back(x);
      UProduction tail{x, {shared.daughters.end() - 2, shared.daughters.end()}};
      shared.daughters.resize(shared.daughters.size() - 2);
      shared.daughters.push_back({x, share_schema()});
      staged.push_back(std::move(tail));
    }
    staged.push_back(std::move(shared));
  }

  // (iii) unit-rule elimination.
  auto is_unit = [](const UProduction& p) {
    return p.daughters.size() == 1 && classify_schema(p.daughters[0].schema).form == SchemaForm::Share;
  };
  std::map<Symbol, std::vector<Symbol>> unit_edges;
  for (const auto& p : staged)
    if (is_unit(p)) unit_edges[p.mother].push_back(p.daughters[0].category);

  std::vector<UProduction> productions;
  std::vector<LexRule> lexicon = g.lexicon();
  auto add_production = [&](UProduction p) {
    if (std::find(productions.begin(), productions.end(), p) == productions.end()) productions.push_back(std::move(p));
  };
  auto add_lex = [&](LexRule l) {
    if (std::find(lexicon.begin(), lexicon.end(), l) == lexicon.end()) lexicon.push_back(std::move(l));
  };
  for (const auto& p : staged)
    if (!is_unit(p)) add_production(p);
  const auto base_productions = productions;
  const auto base_lexicon = g.lexicon();
  for (const auto& a : symbols.nonterminals) {
    // Nonterminals reachable from a through unit rules, breadth first.
    std::vector<Symbol> order{a};
    std::set<Symbol> seen{a};
    for (std::size_t i = 0; i < order.size(); ++i)
      for (const auto& b : unit_edges[order[i]])
        if (seen.insert(b).second) order.push_back(b);
    for (std::size_t i = 1; i < order.size(); ++i) {
      for (const auto& p : base_productions)
        if (p.mother == order[i]) add_production({a, p.daughters});
      for (const auto& l : base_lexicon)
        if (l.mother == order[i]) add_lex({a, l.word, l.schema});
    }
  }
  return UnificationGrammar(std::move(symbols), std::move(productions), std::move(lexicon), g.start());
}

UnificationGrammar sink_map_root(const UnificationGrammar& g) {
  auto report = ugi_check(g);
  if (!report.is_ugi) throw PreconditionError("sink-map needs a UGI grammar: " + report.offenders.front());
  auto symbols = g.symbols();
  auto taken = all_names(symbols);
  auto take = [&](const std::string& base) {
    auto s = fresh_symbol(base, taken);
    taken.insert(s);
    return s;
  };
  const auto s0 = take(g.start() + "_0");
  const auto s_prime = take(g.start() + "'");
  const auto s_eps = take(g.start() + "_eps");
  const auto dollar = take("$");

  std::vector<Symbol> used;
  for (const auto& v : symbols.values) {
    bool in_use = false;
    for (const auto& p : g.productions())
      for (const auto& d : p.daughters) {
        auto shape = classify_schema(d.schema);
        if (shape.form != SchemaForm::Share && shape.value == v) in_use = true;
      }
    if (in_use) used.push_back(v);
  }

  symbols.nonterminals.insert(symbols.nonterminals.begin(), {s0, s_prime, s_eps});
  symbols.values.insert(symbols.values.begin(), dollar);
  for (const auto& a : {kNext, kIdx})
    if (!symbols.is_attribute(a)) symbols.attributes.push_back(a);

  std::vector<UProduction> productions;
  productions.push_back({s0, {{s_prime, push_schema(dollar)}}});
  productions.push_back({s_prime, {{g.start(), share_schema()}, {s_eps, share_schema()}}});
  for (const auto& f : used) productions.push_back({s_prime, {{s_prime, push_schema(f)}}});
  productions.insert(productions.end(), g.productions().begin(), g.productions().end());
  std::vector<LexRule> lexicon{{s_eps, {}, {}}};
  lexicon.insert(lexicon.end(), g.lexicon().begin(), g.lexicon().end());
  return UnificationGrammar(std::move(symbols), std::move(productions), std::move(lexicon), s0);
}

SolveResult canonical_fs(const CStructure& cs) {
  using Sequence = std::vector<TreeAddress>;
  const auto domain = cs.domain();
  const auto height = domain.height();

  std::map<TreeAddress, Sequence> m;
  std::map<Sequence, std::pair<Symbol, TreeAddress>> demand;  // idx value and who demanded it
  std::set<Symbol> values;
  SolveResult result;
  auto require = [&](const Sequence& q, const Symbol& f, const TreeAddress& who) -> bool {
    values.insert(f);
    auto [it, fresh] = demand.try_emplace(q, f, who);
    if (!fresh && it->second.first != f) {
      result.diagnosis = ValueClash{it->second.second.to_string() + " " + kIdx, it->second.first, f};
      return false;
    }
    return true;
  };

  m[TreeAddress::root()] = Sequence(height + 1, TreeAddress::root());
  // Map order is tree order, so mothers are mapped before daughters.
  for (const auto& [x, node] : cs.nodes) {
    if (x.is_root()) continue;
    if (node.leaf) {
      if (!node.schema.empty()) throw PreconditionError("lexicon schema at " + x.to_string() + " is not empty");
      continue;
    }
    const auto mother = x.parent();
    const auto& up = m.at(mother);
    auto shape = classify_schema(node.schema);
    switch (shape.form) {
      case SchemaForm::Share:
        m[x] = up;
        break;
      case SchemaForm::Pop:
        if (up.empty()) throw std::logic_error("canonical structure: pop below the root sequence");
        if (!require(up, shape.value, mother)) return result;
        m[x] = Sequence(up.begin() + 1, up.end());
        break;
      case SchemaForm::Push: {
        Sequence q{x};
        q.insert(q.end(), up.begin(), up.end());
        m[x] = q;
        if (!require(q, shape.value, x)) return result;
        break;
      }
      case SchemaForm::Other:
        throw PreconditionError("schema " + to_string(node.schema) + " at " + x.to_string() + " is not UGI");
    }
  }

  // Reachable part: each named sequence and its suffixes, plus demanded atoms.
  std::map<Sequence, NodeId> seq_node;
  FeatureStructure fs;
  std::deque<Sequence> queue;
  auto node_for = [&](const Sequence& q) {
    auto [it, fresh] = seq_node.try_emplace(q, 0);
    if (fresh) {
      it->second = fs.add_node();
      queue.push_back(q);
    }
    return it->second;
  };
  for (const auto& [x, q] : m) fs.names[x] = node_for(q);
  std::map<Symbol, NodeId> atom;
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    auto id = seq_node.at(q);
    if (!q.empty()) fs.delta[{id, kNext}] = node_for(Sequence(q.begin() + 1, q.end()));
    auto d = demand.find(q);
    if (d != demand.end()) {
      auto [it, fresh] = atom.try_emplace(d->second.first, 0);
      if (fresh) {
        it->second = fs.add_node();
        fs.alpha[it->second] = d->second.first;
      }
      fs.delta[{id, kIdx}] = it->second;
    }
  }
  result.model = canonicalize(fs);
  return result;
}

}  // namespace glab
