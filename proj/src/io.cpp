#include "glab/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace glab {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

bool is_punct(char c) { return c == '{' || c == '}' || c == ';' || c == '='; }

// Whitespace tokens; `#` at the start of a token comments out the rest of the
// line. With `punct`, the characters { } ; = are tokens of their own.
std::vector<Line> tokenize(std::string_view text, bool punct) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    Line line{number, {}};
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) line.tokens.push_back(std::move(cur));
      cur.clear();
    };
    for (char c : raw) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (c == '#' && cur.empty()) {
        break;
      } else if (punct && is_punct(c)) {
        flush();
        line.tokens.emplace_back(1, c);
      } else {
        cur.push_back(c);
      }
    }
    flush();
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
  }
  return out;
}

// Header lines shared by both formats. Returns true when `line` was a header.
class Headers {
 public:
  explicit Headers(std::vector<std::string> keywords) {
    for (auto& k : keywords) lists_[k];
  }

  bool take(const Line& line) {
    const auto& key = line.tokens[0];
    if (key == "start") {
      if (line.tokens.size() != 2) throw ParseError(line.number, "expected 'start <nonterminal>'");
      if (!start_.empty()) throw ParseError(line.number, "start symbol given twice");
      start_ = line.tokens[1];
      return true;
    }
    auto it = lists_.find(key);
    if (it == lists_.end()) return false;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
      const auto& s = line.tokens[i];
      auto [d, fresh] = declared_.emplace(s, key);
      if (!fresh)
        throw ParseError(line.number, "symbol '" + s + "' declared twice (in " + d->second + " and " + key + ")");
      it->second.push_back(s);
    }
    return true;
  }

  const std::vector<Symbol>& list(const std::string& key) const { return lists_.at(key); }
  const Symbol& start() const { return start_; }
  bool declared(const Symbol& s, const std::string& key) const {
    auto it = declared_.find(s);
    return it != declared_.end() && it->second == key;
  }

 private:
  std::map<std::string, std::vector<Symbol>> lists_;
  std::map<Symbol, std::string> declared_;
  Symbol start_;
};

// Re-raises validation errors of the grammar constructors as parse errors.
template <class F>
auto validated(std::size_t line, F&& make) {
  try {
    return make();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace

IndexedGrammar parse_indexed_grammar(std::string_view text) {
  Headers headers({"nonterminals", "terminals", "indices"});
  struct Pending {
    std::size_t line;
    IndexedProduction rule;
  };
  std::vector<Pending> rules;
  std::size_t last_line = 0;
  for (const auto& line : tokenize(text, false)) {
    last_line = line.number;
    if (headers.take(line)) continue;
    const auto& t = line.tokens;
    std::size_t arrow = 0;
    while (arrow < t.size() && t[arrow] != "->") ++arrow;
    if (arrow == t.size()) throw ParseError(line.number, "expected a header or a rule with '->'");
    if (arrow == 0 || arrow > 2) throw ParseError(line.number, "left-hand side must be 'A' or 'A ^f'");
    Word rhs(t.begin() + static_cast<std::ptrdiff_t>(arrow) + 1, t.end());
    auto is_marker = [](const std::string& s) { return s.size() > 1 && s[0] == '^'; };
    if (rhs.size() == 1 && rhs[0] == "_") rhs.clear();
    for (const auto& s : rhs)
      if (s == "_") throw ParseError(line.number, "'_' must stand alone on the right-hand side");
    if (arrow == 2) {
      if (!is_marker(t[1])) throw ParseError(line.number, "expected '^index' after the left-hand nonterminal");
      for (const auto& s : rhs)
        if (s[0] == '^') throw ParseError(line.number, "a pop rule cannot also push");
      rules.push_back({line.number, IndexedProduction::pop(t[0], t[1].substr(1), rhs)});
    } else if (!rhs.empty() && is_marker(rhs.back())) {
      if (rhs.size() != 2 || rhs[0][0] == '^')
        throw ParseError(line.number, "a push rule has the form 'A -> B ^f'");
      rules.push_back({line.number, IndexedProduction::push(t[0], rhs[0], rhs[1].substr(1))});
    } else {
      for (const auto& s : rhs)
        if (s[0] == '^') throw ParseError(line.number, "misplaced index marker '" + s + "'");
      rules.push_back({line.number, IndexedProduction::plain(t[0], rhs)});
    }
  }
  if (headers.start().empty()) throw ParseError(last_line, "missing 'start' line");
  for (const auto& [line, r] : rules) {
    if (!headers.declared(r.lhs, "nonterminals"))
      throw ParseError(line, "undeclared nonterminal '" + r.lhs + "'");
    if (r.kind != RuleKind::Plain && !headers.declared(r.index, "indices"))
      throw ParseError(line, "undeclared index '" + r.index + "'");
    for (const auto& s : r.rhs)
      if (!headers.declared(s, "nonterminals") && !headers.declared(s, "terminals"))
        throw ParseError(line, "undeclared symbol '" + s + "'");
    if (r.kind == RuleKind::Push && !headers.declared(r.rhs[0], "nonterminals"))
      throw ParseError(line, "push rule needs a nonterminal on the right, got '" + r.rhs[0] + "'");
  }
  std::vector<IndexedProduction> productions;
  for (auto& p : rules) productions.push_back(std::move(p.rule));
  return validated(0, [&] {
    return IndexedGrammar(SymbolTable{headers.list("nonterminals"), headers.list("terminals"), headers.list("indices")},
                          std::move(productions), headers.start());
  });
}

namespace {

class SchemaParser {
 public:
  SchemaParser(const Line& line, std::size_t pos, const Headers& headers, bool lexical)
      : line_(line), pos_(pos), headers_(headers), lexical_(lexical) {}

  std::size_t pos() const { return pos_; }

  Schema parse() {
    expect("{");
    Schema out;
    if (peek() == "}") {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(equation());
      auto t = next();
      if (t == "}") return out;
      if (t != ";") fail("expected ';' or '}' in equation set, got '" + t + "'");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_.number, msg); }

  std::string peek() const { return pos_ < line_.tokens.size() ? line_.tokens[pos_] : std::string{}; }
  std::string next() {
    if (pos_ >= line_.tokens.size()) fail("unexpected end of line");
    return line_.tokens[pos_++];
  }
  void expect(const std::string& t) {
    auto got = next();
    if (got != t) fail("expected '" + t + "', got '" + got + "'");
  }

  std::pair<Arrow, Path> side() {
    auto t = next();
    if (t != "up" && t != "dn") fail("equation side must start with 'up' or 'dn', got '" + t + "'");
    Path p;
    while (pos_ < line_.tokens.size()) {
      auto a = peek();
      if (a == "=" || a == ";" || a == "}" || a == "{") break;
      if (!headers_.declared(a, "attributes")) fail("undeclared attribute '" + a + "'");
      p.push_back(a);
      ++pos_;
    }
    return {t == "up" ? Arrow::Up : Arrow::Down, std::move(p)};
  }

  EqSchema equation() {
    auto [lhs, lhs_path] = side();
    expect("=");
    auto t = peek();
    if (t == "up" || t == "dn") {
      if (lexical_) fail("lexicon rules only allow value equations");
      auto [rhs, rhs_path] = side();
      return ArrowPathEq{lhs, std::move(lhs_path), rhs, std::move(rhs_path)};
    }
    auto v = next();
    if (!headers_.declared(v, "values")) fail("undeclared value '" + v + "'");
    if (lhs_path.empty()) fail("a value equation needs a non-empty attribute path");
    return ArrowValueEq{lhs, std::move(lhs_path), v};
  }

  const Line& line_;
  std::size_t pos_;
  const Headers& headers_;
  bool lexical_;
};

}  // namespace

UnificationGrammar parse_unification_grammar(std::string_view text) {
  Headers headers({"nonterminals", "terminals", "attributes", "values"});
  std::vector<std::pair<std::size_t, UProduction>> productions;
  std::vector<std::pair<std::size_t, LexRule>> lexicon;
  std::size_t last_line = 0;
  for (const auto& line : tokenize(text, true)) {
    last_line = line.number;
    const auto& t = line.tokens;
    if (t[0] != "rule" && t[0] != "lex") {
      if (headers.take(line)) continue;
      throw ParseError(line.number, "expected a header, 'rule' or 'lex'");
    }
    if (t.size() < 4 || t[2] != "->") throw ParseError(line.number, "expected '" + t[0] + " A -> ...'");
    if (t[0] == "lex") {
      if (t[3].size() == 1 && is_punct(t[3][0])) throw ParseError(line.number, "expected a terminal or '_'");
      SchemaParser schema(line, 4, headers, true);
      LexRule l{t[1], t[3] == "_" ? Symbol{} : t[3], schema.parse()};
      if (schema.pos() != t.size()) throw ParseError(line.number, "trailing tokens after lexicon rule");
      lexicon.emplace_back(line.number, std::move(l));
      continue;
    }
    UProduction p{t[1], {}};
    std::size_t pos = 3;
    while (pos < t.size()) {
      Daughter d{t[pos], {}};
      if (d.category == "{" || d.category == "}") throw ParseError(line.number, "expected a daughter category");
      SchemaParser schema(line, pos + 1, headers, false);
      d.schema = schema.parse();
      pos = schema.pos();
      p.daughters.push_back(std::move(d));
    }
    if (p.daughters.empty()) throw ParseError(line.number, "a production needs at least one daughter");
    productions.emplace_back(line.number, std::move(p));
  }
  if (headers.start().empty()) throw ParseError(last_line, "missing 'start' line");
  for (const auto& [line, p] : productions) {
    if (!headers.declared(p.mother, "nonterminals")) throw ParseError(line, "undeclared nonterminal '" + p.mother + "'");
    for (const auto& d : p.daughters)
      if (!headers.declared(d.category, "nonterminals"))
        throw ParseError(line, "daughter '" + d.category + "' is not a declared nonterminal");
  }
  for (const auto& [line, l] : lexicon) {
    if (!headers.declared(l.mother, "nonterminals")) throw ParseError(line, "undeclared nonterminal '" + l.mother + "'");
    if (!l.word.empty() && !headers.declared(l.word, "terminals"))
      throw ParseError(line, "undeclared terminal '" + l.word + "'");
  }
  std::vector<UProduction> ps;
  std::vector<LexRule> ls;
  for (auto& [_, p] : productions) ps.push_back(std::move(p));
  for (auto& [_, l] : lexicon) ls.push_back(std::move(l));
  return validated(0, [&] {
    return UnificationGrammar(UnificationSymbols{headers.list("nonterminals"), headers.list("terminals"),
                                                 headers.list("attributes"), headers.list("values")},
                              std::move(ps), std::move(ls), headers.start());
  });
}

namespace {

void header(std::ostringstream& out, const std::string& key, const std::vector<Symbol>& symbols) {
  out << key;
  for (const auto& s : symbols) out << ' ' << s;
  out << '\n';
}

void comment_block(std::ostringstream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

std::string print_indexed_grammar(const IndexedGrammar& g, const std::vector<std::string>& comments) {
  std::ostringstream out;
  comment_block(out, comments);
  const auto& s = g.symbols();
  header(out, "nonterminals", s.nonterminals);
  header(out, "terminals", s.terminals);
  header(out, "indices", s.indices);
  out << "start " << g.start() << "\n\n";
  for (const auto& p : g.productions()) out << p.to_string() << '\n';
  return out.str();
}

std::string print_unification_grammar(const UnificationGrammar& g, const std::vector<std::string>& comments) {
  std::ostringstream out;
  comment_block(out, comments);
  const auto& s = g.symbols();
  header(out, "nonterminals", s.nonterminals);
  header(out, "terminals", s.terminals);
  header(out, "attributes", s.attributes);
  header(out, "values", s.values);
  out << "start " << g.start() << "\n\n";
  for (const auto& p : g.productions()) {
    out << "rule " << p.mother << " ->";
    for (const auto& d : p.daughters) out << ' ' << d.category << ' ' << to_string(d.schema);
    out << '\n';
  }
  for (const auto& l : g.lexicon())
    out << "lex " << l.mother << " -> " << (l.word.empty() ? "_" : l.word) << ' ' << to_string(l.schema) << '\n';
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AnyGrammar load_grammar(const std::string& path) {
  auto ends_with = [&](const std::string& ext) {
    return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends_with(".ixg")) return parse_indexed_grammar(read_file(path));
  if (ends_with(".ugr")) return parse_unification_grammar(read_file(path));
  throw Error("unknown grammar file extension for '" + path + "' (expected .ixg or .ugr)");
}

}  // namespace glab
