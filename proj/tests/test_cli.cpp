#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "glab/cli.hpp"
#include "glab/io.hpp"

using namespace glab;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return std::string(GLAB_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("check") {
  auto r = run({"check", fx("example2.ixg")});
  CHECK(r.code == 0);
  CHECK(r.out.find("reduced-form: yes") != std::string::npos);
  CHECK(r.out.find("marked-index-end: yes") != std::string::npos);

  auto j = run({"check", fx("example2_u.ugr"), "--json"});
  REQUIRE(j.code == 0);
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["ugi"] == true);
  CHECK(doc["reduced"] == true);
  CHECK(doc["sink_mapped_root"] == true);
}

TEST_CASE("member") {
  CHECK(run({"member", fx("example1.ixg"), "aabbcc"}).code == 0);
  CHECK(run({"member", fx("example1.ixg"), "a a b b c c"}).code == 0);
  auto no = run({"member", fx("example2.ixg"), "ddd"});
  CHECK(no.code == 2);
  CHECK(no.out.find("no-within-budget") != std::string::npos);
  CHECK(run({"member", fx("example2_u.ugr"), "dddd"}).code == 0);

  auto j = run({"member", fx("example1.ixg"), "abc", "--json"});
  REQUIRE(j.code == 0);
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["member"] == true);
  CHECK(doc["witness"]["nodes"].size() == 8);  // S, S', A B C and three leaves

  CHECK(run({"member", fx("example1.ixg"), "xyz"}).code == 1);
}

TEST_CASE("enum and equiv") {
  auto e = run({"enum", fx("example1.ixg"), "--max-len", "9"});
  CHECK(e.code == 0);
  CHECK(e.out == "abc\naabbcc\naaabbbccc\n");

  auto same = run({"equiv", fx("example2.ixg"), fx("example2_u.ugr"), "--max-len", "8"});
  CHECK(same.code == 0);
  CHECK(same.out.find("agree: yes") != std::string::npos);
  CHECK(run({"equiv", fx("example1.ixg"), fx("example2.ixg"), "--max-len", "4"}).code == 2);
}

TEST_CASE("transform") {
  auto u = run({"transform", fx("example2.ixg"), "--op", "u"});
  REQUIRE(u.code == 0);
  CHECK(parse_unification_grammar(u.out) == parse_unification_grammar(read_file(fx("example2_u.ugr"))));

  auto back = run({"transform", fx("example2_u.ugr"), "--op", "reverse-u"});
  REQUIRE(back.code == 0);
  CHECK(parse_indexed_grammar(back.out) == parse_indexed_grammar(read_file(fx("example2.ixg"))));

  auto marked = run({"transform", fx("example1.ixg"), "--op", "mark-end"});
  REQUIRE(marked.code == 0);
  CHECK(parse_indexed_grammar(marked.out).productions().size() == 10);

  auto path = (std::filesystem::temp_directory_path() / "glab_test_out.ugr").string();
  CHECK(run({"transform", fx("example2_u.ugr"), "--op", "sink-map", "-o", path}).code == 0);
  CHECK(ugi_check(parse_unification_grammar(read_file(path))).has_sink_mapped_root);
  std::filesystem::remove(path);

  CHECK(run({"transform", fx("example1.ixg"), "--op", "u"}).code == 1);
  CHECK(run({"transform", fx("example1.ixg"), "--op", "sideways"}).code == 1);
}

TEST_CASE("derive") {
  auto d = run({"derive", fx("example2.ixg"), "dd"});
  CHECK(d.code == 0);
  CHECK(d.out.rfind("digraph", 0) == 0);
  CHECK(run({"derive", fx("example2.ixg"), "ddd"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"check", fx("missing.ixg")}).code == 1);
  CHECK(run({"enum", fx("example1.ixg")}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("output is deterministic") {
  std::vector<std::string> args{"enum", fx("example2_u.ugr"), "--max-len", "8"};
  CHECK(run(args).out == run(args).out);
}
