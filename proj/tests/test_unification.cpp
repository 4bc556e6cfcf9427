#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "glab/io.hpp"
#include "glab/transforms.hpp"
#include "glab/unification.hpp"

using namespace glab;

namespace {

UnificationGrammar example2_u() {
  return parse_unification_grammar(read_file(std::string(GLAB_FIXTURES) + "/example2_u.ugr"));
}

UnificationGrammar ugr(const std::string& rules, const std::string& values = "f g") {
  return parse_unification_grammar("nonterminals S A B C D\nterminals a b\nattributes next idx\nvalues " + values +
                                   "\nstart S\n" + rules);
}

std::vector<Word> words(std::initializer_list<const char*> ws) {
  std::vector<Word> out;
  for (const char* w : ws) out.push_back(split_chars(w));
  return out;
}

}  // namespace

TEST_CASE("parse the unification fixture") {
  auto g = example2_u();
  CHECK(g.productions().size() == 7);
  CHECK(g.lexicon().size() == 1);
  CHECK(g.start() == "S");
  CHECK(classify_schema(g.productions()[0].daughters[0].schema).form == SchemaForm::Push);
  CHECK(classify_schema(g.productions()[0].daughters[0].schema).value == "$");
  CHECK(classify_schema(g.productions()[4].daughters[0].schema).form == SchemaForm::Pop);
  CHECK(classify_schema(g.productions()[3].daughters[1].schema).form == SchemaForm::Share);
  CHECK(parse_unification_grammar(print_unification_grammar(g)) == g);
  CHECK_THROWS_AS(ugr("rule S -> Q { up = dn }\n"), ParseError);
}

TEST_CASE("schema instantiation") {
  TreeAddress m{1}, d{1, 2};
  CHECK(instantiate({}, m, d).empty());
  auto es = instantiate(push_schema("f"), m, d);
  REQUIRE(es.size() == 2);
  CHECK(std::count(es.begin(), es.end(), Equation{PathEquation{d, {kNext}, m, {}}}) == 1);
  CHECK(std::count(es.begin(), es.end(), Equation{ValueEquation{d, {kIdx}, "f"}}) == 1);
  auto share = instantiate(share_schema(), m, d);
  REQUIRE(share.size() == 1);
  CHECK(share[0] == Equation{PathEquation{m, {}, d, {}}});
}

TEST_CASE("collect equations") {
  auto g = ugr("rule S -> A { up = dn } B { up = dn }\nlex A -> a { }\nlex B -> b { }\n");
  auto cs = enumerate_cstructures(g, split_chars("ab"), {16, 1000});
  REQUIRE(cs.size() == 1);
  auto es = collect_equations(cs[0]);
  CHECK(es.size() == 2);
  for (const auto& e : es) {
    const auto& p = std::get<PathEquation>(e);
    CHECK(p.lhs_name.is_root());
  }
  auto r = generates_check(cs[0]);
  REQUIRE(r.consistent());
  CHECK(r.model->names.at({1}) == r.model->names.at({}));
  CHECK(r.model->names.at({2}) == r.model->names.at({}));
}

TEST_CASE("generates check") {
  auto u = example2_u();
  auto m = sug_membership(u, split_chars("dddd"));
  REQUIRE(m.member);
  CHECK(validate_cstructure(u, *m.witness).empty());
  CHECK(generates_check(*m.witness).consistent());
  CHECK(m.witness->terminal_string() == split_chars("dddd"));

  auto clash = ugr(
      "rule S -> A { up next = dn ; up idx = f } B { up next = dn ; up idx = g }\n"
      "lex A -> a { }\nlex B -> b { }\n");
  auto cs = enumerate_cstructures(clash, split_chars("ab"), {16, 1000});
  REQUIRE(cs.size() == 1);
  auto r = generates_check(cs[0]);
  REQUIRE_FALSE(r.consistent());
  CHECK(std::holds_alternative<ValueClash>(*r.diagnosis));
  CHECK_FALSE(sug_membership(clash, split_chars("ab")).member);

  auto free = ugr("rule S -> A { } B { }\nlex A -> a { }\nlex B -> b { }\n");
  auto fcs = enumerate_cstructures(free, split_chars("ab"), {16, 1000});
  REQUIRE(fcs.size() == 1);
  auto isolated = generates_check(fcs[0]);
  REQUIRE(isolated.consistent());
  CHECK(isolated.model->node_count == fcs[0].size());
  CHECK(isolated.model->delta.empty());
}

TEST_CASE("unification membership and languages") {
  auto u = example2_u();
  CHECK(sug_language_upto(u, 8).strings == words({"dd", "dddd", "dddddddd"}));
  auto no = sug_membership(u, split_chars("ddd"));
  CHECK_FALSE(no.member);
  CHECK_FALSE(no.exhausted);
  CHECK_THROWS_AS(sug_membership(u, split_chars("x")), Error);
}

TEST_CASE("ugi classification") {
  auto r = ugi_check(example2_u());
  CHECK(r.is_ugi);
  CHECK(r.is_reduced);
  CHECK(r.has_sink_mapped_root);

  auto head = parse_unification_grammar(
      "nonterminals S A\nterminals a\nattributes head\nvalues f\nstart S\n"
      "rule S -> A { up head = dn }\nlex A -> a { }\n");
  CHECK_FALSE(ugi_check(head).is_ugi);
  CHECK_THROWS_AS(ugi_normalize(head), PreconditionError);
  CHECK_THROWS_AS(sink_map_root(head), PreconditionError);

  auto two = ugr(
      "rule S -> A { dn next = up ; dn idx = f }\nrule S -> B { dn next = up ; dn idx = f }\n"
      "lex A -> a { }\nlex B -> b { }\n");
  auto r2 = ugi_check(two);
  CHECK(r2.is_ugi);
  CHECK_FALSE(r2.has_sink_mapped_root);
}

TEST_CASE("normalization binarizes long rules") {
  auto g = ugr("rule S -> A { up = dn } B { up = dn } C { up = dn }\nlex A -> a { }\nlex B -> b { }\nlex C -> a { }\n");
  CHECK_FALSE(ugi_check(g).is_reduced);
  auto n = ugi_normalize(g);
  CHECK(ugi_check(n).is_reduced);
  std::size_t binary = 0;
  for (const auto& p : n.productions()) binary += p.daughters.size() == 2;
  CHECK(binary == 2);
  CHECK(std::find(n.symbols().nonterminals.begin(), n.symbols().nonterminals.end(), "X_1") !=
        n.symbols().nonterminals.end());
  CHECK(sug_language_upto(n, 4).strings == sug_language_upto(g, 4).strings);

  auto push = ugr("rule S -> A { dn next = up ; dn idx = f } B { up = dn }\nrule A -> C { up next = dn ; up idx = f }\n"
                  "lex C -> a { }\nlex B -> b { }\n");
  auto pn = ugi_normalize(push);
  CHECK(ugi_check(pn).is_reduced);
  CHECK(sug_language_upto(pn, 4).strings == words({"ab"}));
  CHECK(sug_language_upto(push, 4).strings == words({"ab"}));

  auto reduced = example2_u();
  CHECK(ugi_normalize(reduced) == reduced);
}

TEST_CASE("sink map adds five rules for two values") {
  auto g = ugr("rule S -> A { dn next = up ; dn idx = f }\nrule A -> B { up next = dn ; up idx = g }\n"
               "rule A -> B { up next = dn ; up idx = f }\nlex B -> b { }\n");
  auto s = sink_map_root(g);
  CHECK(s.productions().size() + s.lexicon().size() == g.productions().size() + g.lexicon().size() + 5);
  CHECK(s.start() != g.start());
  auto r = ugi_check(s);
  CHECK(r.is_ugi);
  CHECK(r.has_sink_mapped_root);
  CHECK(sug_language_upto(s, 4).strings == sug_language_upto(g, 4).strings);
}

TEST_CASE("canonical structures") {
  auto g = ugr("rule S -> A { up = dn }\nlex A -> a { }\n");
  auto cs = enumerate_cstructures(g, split_chars("a"), {16, 1000});
  REQUIRE(cs.size() == 1);
  auto r = canonical_fs(cs[0]);
  REQUIRE(r.consistent());
  CHECK(r.model->names.at({}) == r.model->names.at({1}));

  auto u = example2_u();
  auto m = sug_membership(u, split_chars("dddd"));
  REQUIRE(m.member);
  auto c = canonical_fs(*m.witness);
  REQUIRE(c.consistent());
  CHECK(well_defined_check(*c.model).well_defined());
  CHECK(satisfies_set(*c.model, collect_equations(*m.witness)));
}

TEST_CASE("canonical and least models agree on random c-structures") {
  glab::testing::Rng rng(5);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    auto g = glab::testing::random_ugi(rng);
    auto cs = glab::testing::random_cstructure(g, rng, 6);
    if (!cs) continue;
    CHECK(validate_cstructure(g, *cs).empty());
    auto a = generates_check(*cs);
    auto b = canonical_fs(*cs);
    CHECK(a.consistent() == b.consistent());
    if (b.consistent()) {
      CHECK(satisfies_set(*b.model, collect_equations(*cs)));
      // The root sequence has height + 1 entries; the last one never gets idx.
      Path down(cs->domain().height(), kNext);
      auto bottom = delta_path(*b.model, b.model->names.at(TreeAddress::root()), down);
      REQUIRE(bottom);
      CHECK_FALSE(b.model->step(*bottom, kIdx));
    }
    ++compared;
  }
  CHECK(compared > 50);
}

TEST_CASE("normalize and sink map preserve languages") {
  glab::testing::Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    auto g = glab::testing::random_ugi(rng);
    Budget b{24, 200000};
    auto base = sug_language_upto(g, 4, b);
    auto n = sug_language_upto(ugi_normalize(g), 4, b);
    auto s = sug_language_upto(sink_map_root(g), 4, b);
    if (base.exhausted || n.exhausted || s.exhausted) continue;
    CHECK(n.strings == base.strings);
    CHECK(s.strings == base.strings);
  }
}
