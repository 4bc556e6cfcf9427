#include "glab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "glab/render.hpp"
#include "glab/transforms.hpp"

namespace glab {

using nlohmann::json;

namespace {

bool shorter_then_lex(const Word& a, const Word& b) {
  return a.size() != b.size() ? a.size() < b.size() : a < b;
}

// Symbols of one character are written without separators.
std::string show(const Word& w) {
  bool compact = std::all_of(w.begin(), w.end(), [](const Symbol& s) { return s.size() == 1; });
  return join(w, compact ? "" : " ");
}

std::string show_text(const Word& w) { return w.empty() ? "ε" : show(w); }

std::string show_list(const std::vector<Word>& ws) {
  std::string out;
  for (const auto& w : ws) out += (out.empty() ? "" : " ") + show_text(w);
  return out;
}

json words_json(const std::vector<Word>& ws) {
  json out = json::array();
  for (const auto& w : ws) out.push_back(show(w));
  return out;
}

// A word given on the command line: whitespace separates symbols when
// present, otherwise every character is a symbol.
Word parse_word(const std::string& s) {
  if (s.find_first_of(" \t\n") != std::string::npos) return split_words(s);
  return split_chars(s);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

json tree_json(const DerivationTree& t) {
  json nodes = json::array();
  for (const auto& [x, l] : t.labels) {
    json n{{"address", x.to_string()}, {"symbol", l.leaf && l.symbol.empty() ? "" : l.symbol}, {"leaf", l.leaf}};
    if (!l.leaf) n["stack"] = l.stack;
    nodes.push_back(std::move(n));
  }
  return json{{"nodes", std::move(nodes)}};
}

json cstructure_json(const CStructure& cs) {
  json nodes = json::array();
  for (const auto& [x, n] : cs.nodes) {
    json j{{"address", x.to_string()}, {"category", n.category}, {"leaf", n.leaf}};
    if (!x.is_root()) j["schema"] = to_string(n.schema);
    nodes.push_back(std::move(j));
  }
  return json{{"nodes", std::move(nodes)}};
}

json fs_json(const FeatureStructure& m) {
  json delta = json::array(), alpha = json::array(), names = json::array();
  for (const auto& [key, t] : m.delta) delta.push_back({key.first, key.second, t});
  for (const auto& [q, v] : m.alpha) alpha.push_back({q, v});
  for (const auto& [x, q] : m.names) names.push_back({x.to_string(), q});
  return json{{"node_count", m.node_count}, {"delta", delta}, {"alpha", alpha}, {"names", names}};
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

int cmd_check(const std::string& path, bool as_json, std::ostream& out) {
  auto g = load_grammar(path);
  json j;
  std::ostringstream text;
  if (const auto* ig = std::get_if<IndexedGrammar>(&g)) {
    const auto& s = ig->symbols();
    auto reduced = reduced_form_check(*ig);
    bool marked = marked_index_end_check(*ig);
    json offenders = json::array();
    for (auto i : reduced.offenders) offenders.push_back(ig->productions()[i].to_string());
    j = {{"kind", "indexed"},
         {"nonterminals", s.nonterminals.size()},
         {"terminals", s.terminals.size()},
         {"indices", s.indices.size()},
         {"productions", ig->productions().size()},
         {"start", ig->start()},
         {"reduced_form", reduced.reduced},
         {"offenders", offenders},
         {"marked_index_end", marked}};
    text << "kind: indexed\n"
         << "nonterminals: " << s.nonterminals.size() << "\nterminals: " << s.terminals.size()
         << "\nindices: " << s.indices.size() << "\nproductions: " << ig->productions().size()
         << "\nstart: " << ig->start() << "\nreduced-form: " << yes_no(reduced.reduced) << '\n';
    for (auto i : reduced.offenders)
      text << "  offender: rule " << i + 1 << ": " << ig->productions()[i].to_string() << '\n';
    text << "marked-index-end: " << yes_no(marked) << '\n';
  } else {
    const auto& ug = std::get<UnificationGrammar>(g);
    const auto& s = ug.symbols();
    auto r = ugi_check(ug);
    j = {{"kind", "unification"},
         {"nonterminals", s.nonterminals.size()},
         {"terminals", s.terminals.size()},
         {"attributes", s.attributes.size()},
         {"values", s.values.size()},
         {"productions", ug.productions().size()},
         {"lexicon", ug.lexicon().size()},
         {"start", ug.start()},
         {"ugi", r.is_ugi},
         {"reduced", r.is_reduced},
         {"sink_mapped_root", r.has_sink_mapped_root},
         {"offenders", r.offenders}};
    text << "kind: unification\n"
         << "nonterminals: " << s.nonterminals.size() << "\nterminals: " << s.terminals.size()
         << "\nattributes: " << s.attributes.size() << "\nvalues: " << s.values.size()
         << "\nproductions: " << ug.productions().size() << "\nlexicon: " << ug.lexicon().size()
         << "\nstart: " << ug.start() << "\nugi: " << yes_no(r.is_ugi) << "\nreduced: " << yes_no(r.is_reduced)
         << "\nsink-mapped-root: " << yes_no(r.has_sink_mapped_root) << '\n';
    for (const auto& o : r.offenders) text << "  offender: " << o << '\n';
  }
  out << (as_json ? j.dump(2) + "\n" : text.str());
  return 0;
}

int cmd_member(const std::string& path, const std::string& word, const Budget& budget, bool as_json,
               std::ostream& out) {
  auto g = load_grammar(path);
  auto w = parse_word(word);
  json j{{"word", show(w)}};
  std::ostringstream text;
  bool member = false;
  if (const auto* ig = std::get_if<IndexedGrammar>(&g)) {
    auto r = indexed_membership(*ig, w, budget);
    member = r.member;
    j["member"] = r.member;
    j["exhausted"] = r.exhausted;
    j["explored"] = r.explored;
    if (r.member) {
      j["witness"] = tree_json(*r.witness);
      text << "member: yes\nwitness:\n" << to_text(*r.witness);
    } else {
      text << "member: no-within-budget\nexhausted: " << yes_no(r.exhausted) << "\nexplored: " << r.explored << '\n';
    }
  } else {
    auto r = sug_membership(std::get<UnificationGrammar>(g), w, budget);
    member = r.member;
    j["member"] = r.member;
    j["exhausted"] = r.exhausted;
    j["explored"] = r.explored;
    if (r.member) {
      j["witness"] = cstructure_json(*r.witness);
      j["model"] = fs_json(*r.model);
      text << "member: yes\nwitness:\n" << to_text(*r.witness) << "model:\n" << to_text(*r.model);
    } else {
      text << "member: no-within-budget\nexhausted: " << yes_no(r.exhausted) << "\nexplored: " << r.explored << '\n';
    }
  }
  out << (as_json ? j.dump(2) + "\n" : text.str());
  return member ? 0 : 2;
}

int cmd_enum(const std::string& path, std::size_t maxlen, const Budget& budget, bool as_json, std::ostream& out,
             std::ostream& err) {
  auto r = language_upto(load_grammar(path), maxlen, budget);
  if (as_json) {
    out << json{{"max_len", maxlen}, {"strings", words_json(r.strings)}, {"exhausted", r.exhausted},
                {"explored", r.explored}}
               .dump(2)
        << '\n';
  } else {
    for (const auto& w : r.strings) out << show_text(w) << '\n';
  }
  if (r.exhausted) err << "warning: search budget exhausted; the list may be incomplete\n";
  return 0;
}

std::vector<std::string> correspondence_lines(const RuleCorrespondence& c, bool indexed_first) {
  std::vector<std::string> out;
  for (const auto& l : c.links) {
    auto ix = "indexed rule " + std::to_string(l.indexed + 1);
    auto ug = std::string(l.lexical ? "lex " : "rule ") + std::to_string(l.unification + 1);
    out.push_back(indexed_first ? ix + " <-> " + ug : ug + " <-> " + ix);
  }
  return out;
}

int cmd_transform(const std::string& path, const std::string& op, const std::string& output, std::ostream& out) {
  auto g = load_grammar(path);
  auto need_indexed = [&]() -> const IndexedGrammar& {
    if (const auto* ig = std::get_if<IndexedGrammar>(&g)) return *ig;
    throw PreconditionError("--op " + op + " needs an indexed grammar (.ixg)");
  };
  auto need_unification = [&]() -> const UnificationGrammar& {
    if (const auto* ug = std::get_if<UnificationGrammar>(&g)) return *ug;
    throw PreconditionError("--op " + op + " needs a unification grammar (.ugr)");
  };
  std::string text;
  if (op == "mark-end") {
    text = print_indexed_grammar(mark_index_end(need_indexed()), {"mark-end"});
  } else if (op == "u") {
    auto r = u_transform(need_indexed());
    auto comments = correspondence_lines(r.correspondence, true);
    comments.insert(comments.begin(), "u");
    text = print_unification_grammar(r.grammar, comments);
  } else if (op == "reverse-u") {
    auto r = reverse_u(need_unification());
    auto comments = correspondence_lines(r.correspondence, true);
    comments.insert(comments.begin(), "reverse-u");
    text = print_indexed_grammar(r.grammar, comments);
  } else if (op == "ugi-normalize") {
    text = print_unification_grammar(ugi_normalize(need_unification()), {"ugi-normalize"});
  } else if (op == "sink-map") {
    text = print_unification_grammar(sink_map_root(need_unification()), {"sink-map"});
  } else {
    throw Error("unknown --op '" + op + "'");
  }
  write_output(output, text, out);
  return 0;
}

int cmd_equiv(const std::string& a, const std::string& b, std::size_t maxlen, const Budget& budget, bool as_json,
              std::ostream& out) {
  auto v = equiv(load_grammar(a), load_grammar(b), maxlen, budget);
  if (as_json) {
    out << json{{"max_len", v.maxlen},
                {"agree", v.agree},
                {"left", words_json(v.left)},
                {"right", words_json(v.right)},
                {"left_only", words_json(v.left_only)},
                {"right_only", words_json(v.right_only)},
                {"left_exhausted", v.left_exhausted},
                {"right_exhausted", v.right_exhausted}}
               .dump(2)
        << '\n';
  } else {
    out << "agree: " << yes_no(v.agree) << "\nleft: " << show_list(v.left) << "\nright: " << show_list(v.right)
        << "\nleft-only: " << show_list(v.left_only) << "\nright-only: " << show_list(v.right_only)
        << "\nleft-exhausted: " << yes_no(v.left_exhausted) << "\nright-exhausted: " << yes_no(v.right_exhausted)
        << '\n';
  }
  return v.agree ? 0 : 2;
}

int cmd_derive(const std::string& path, const std::string& word, const std::string& dot, const Budget& budget,
               std::ostream& out) {
  auto g = load_grammar(path);
  auto w = parse_word(word);
  std::string text;
  if (const auto* ig = std::get_if<IndexedGrammar>(&g)) {
    auto r = indexed_membership(*ig, w, budget);
    if (!r.member) {
      out << "member: no-within-budget\n";
      return 2;
    }
    text = to_dot(*r.witness);
  } else {
    auto r = sug_membership(std::get<UnificationGrammar>(g), w, budget);
    if (!r.member) {
      out << "member: no-within-budget\n";
      return 2;
    }
    text = to_dot(*r.witness) + to_dot(*r.model);
  }
  write_output(dot, text, out);
  return 0;
}

}  // namespace

LanguageResult language_upto(const AnyGrammar& g, std::size_t maxlen, const Budget& budget) {
  if (const auto* ig = std::get_if<IndexedGrammar>(&g)) {
    auto r = indexed_language_upto(*ig, maxlen, budget);
    return {std::move(r.strings), r.exhausted, r.explored};
  }
  auto r = sug_language_upto(std::get<UnificationGrammar>(g), maxlen, budget);
  return {std::move(r.strings), r.exhausted, r.explored};
}

EquivVerdict equiv(const AnyGrammar& a, const AnyGrammar& b, std::size_t maxlen, const Budget& budget) {
  auto l = language_upto(a, maxlen, budget);
  auto r = language_upto(b, maxlen, budget);
  EquivVerdict v;
  v.maxlen = maxlen;
  v.left = l.strings;
  v.right = r.strings;
  std::set_difference(v.left.begin(), v.left.end(), v.right.begin(), v.right.end(), std::back_inserter(v.left_only),
                      shorter_then_lex);
  std::set_difference(v.right.begin(), v.right.end(), v.left.begin(), v.left.end(), std::back_inserter(v.right_only),
                      shorter_then_lex);
  v.agree = v.left_only.empty() && v.right_only.empty();
  v.left_exhausted = l.exhausted;
  v.right_exhausted = r.exhausted;
  return v;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Indexed and unification grammar laboratory", "glab"};
  app.require_subcommand(1);

  std::string path, path_b, word, op, output, dot;
  std::size_t maxlen = 0;
  Budget budget;
  bool as_json = false;
  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--max-nodes", budget.max_nodes, "Largest tree considered")->capture_default_str();
    sub->add_option("--budget", budget.max_trees, "Search steps before giving up")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "Validate and classify a grammar");
  check->add_option("grammar", path, ".ixg or .ugr file")->required();
  check->add_flag("--json", as_json);

  auto* member = app.add_subcommand("member", "Bounded membership test");
  member->add_option("grammar", path)->required();
  member->add_option("word", word, "Symbols separated by spaces, or one symbol per character")->required();
  add_budget(member);
  member->add_flag("--json", as_json);

  auto* enumerate = app.add_subcommand("enum", "List the strings up to a length");
  enumerate->add_option("grammar", path)->required();
  enumerate->add_option("--max-len", maxlen)->required();
  add_budget(enumerate);
  enumerate->add_flag("--json", as_json);

  auto* transform = app.add_subcommand("transform", "Apply a grammar transformation");
  transform->add_option("grammar", path)->required();
  transform->add_option("--op", op)
      ->required()
      ->check(CLI::IsMember({"mark-end", "u", "reverse-u", "ugi-normalize", "sink-map"}));
  transform->add_option("-o,--output", output, "Output file (default: stdout)");

  auto* eq = app.add_subcommand("equiv", "Compare two languages up to a length");
  eq->add_option("left", path)->required();
  eq->add_option("right", path_b)->required();
  eq->add_option("--max-len", maxlen)->required();
  add_budget(eq);
  eq->add_flag("--json", as_json);

  auto* derive = app.add_subcommand("derive", "Render a witness as Graphviz DOT");
  derive->add_option("grammar", path)->required();
  derive->add_option("word", word)->required();
  derive->add_option("--dot", dot, "Output file (default: stdout)");
  add_budget(derive);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*check) return cmd_check(path, as_json, out);
    if (*member) return cmd_member(path, word, budget, as_json, out);
    if (*enumerate) return cmd_enum(path, maxlen, budget, as_json, out, err);
    if (*transform) return cmd_transform(path, op, output, out);
    if (*eq) return cmd_equiv(path, path_b, maxlen, budget, as_json, out);
    if (*derive) return cmd_derive(path, word, dot, budget, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace glab
