// Acceptance run: one PASS/FAIL line per criterion.
//
//   glab_acceptance [fixture-dir]
//
// Exit status is 0 when every criterion passes, or when the only failures are
// the ones marked "expected" (a bound in the criterion itself is too small;
// see the line for the evidence).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "generators.hpp"
#include "glab/cli.hpp"
#include "glab/transforms.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace glab;
using namespace glab::testing;
using json = nlohmann::json;

namespace {

fs::path fixtures;
fs::path scratch;

struct Outcome {
  bool pass = false;
  std::string detail;
  bool expected_failure = false;
};

struct Cli {
  int code;
  std::string out, err;
};

Cli cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (fixtures / name).string(); }

std::string list(const std::vector<std::string>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s + "}";
}

Outcome example1_language() {
  auto r = cli({"enum", fixture("example1.ixg"), "--max-len", "9", "--json"});
  auto j = json::parse(r.out);
  auto got = j["strings"].get<std::vector<std::string>>();
  std::vector<std::string> want{"abc", "aabbcc", "aaabbbccc"};
  bool ok = r.code == 0 && got == want && !j["exhausted"].get<bool>();
  return {ok, "enum max-len 9 = " + list(got)};
}

Outcome example2_cross() {
  auto ugr = (scratch / "example2_u.ugr").string();
  auto t = cli({"transform", fixture("example2.ixg"), "--op", "u", "-o", ugr});
  if (t.code != 0) return {false, "transform failed: " + t.err};
  auto r = cli({"equiv", fixture("example2.ixg"), ugr, "--max-len", "8", "--json"});
  auto j = json::parse(r.out);
  auto left = j["left"].get<std::vector<std::string>>();
  std::vector<std::string> want{"dd", "dddd", "dddddddd"};
  bool ok = r.code == 0 && j["agree"].get<bool>() && left == want && j["right"] == j["left"] &&
            !j["left_exhausted"].get<bool>() && !j["right_exhausted"].get<bool>();
  return {ok, "equiv max-len 8 agree=" + std::string(j["agree"].get<bool>() ? "yes" : "no") + " on " + list(left)};
}

Outcome witness_checks() {
  std::string detail;
  bool ok = true;

  auto m1 = cli({"member", fixture("example1.ixg"), "aabbcc"});
  auto g1 = std::get<IndexedGrammar>(load_grammar(fixture("example1.ixg")));
  auto w1 = indexed_membership(g1, split_chars("aabbcc"));
  bool fig1 = m1.code == 0 && w1.member && validate_derivation_tree(g1, *w1.witness).ok &&
              terminal_string(*w1.witness) == split_chars("aabbcc");
  ok &= fig1;
  detail += std::string("aabbcc witness ") + (fig1 ? "valid" : "INVALID");

  auto g2 = std::get<IndexedGrammar>(load_grammar(fixture("example2.ixg")));
  auto u = u_transform(g2).grammar;
  auto ugr = (scratch / "example2_u.ugr").string();
  std::ofstream(ugr) << print_unification_grammar(u);
  auto m2 = cli({"member", ugr, "dddd"});
  auto w2 = sug_membership(u, split_chars("dddd"));
  bool fig2 = m2.code == 0 && w2.member && validate_cstructure(u, *w2.witness).empty() &&
              generates_check(*w2.witness).consistent();
  ok &= fig2;
  detail += std::string("; dddd witness ") + (fig2 ? "consistent" : "INCONSISTENT");
  if (!fig2) return {false, detail};

  auto canonical = canonical_fs(*w2.witness);
  std::set<TreeAddress> internal;
  for (const auto& [x, n] : w2.witness->nodes)
    if (!n.leaf) internal.insert(x);
  bool iso = canonical.consistent() &&
             isomorphic(named_core(restrict_names(*w2.model, internal)), named_core(*canonical.model));
  ok &= iso;
  detail += std::string("; model vs canonical structure ") + (iso ? "isomorphic" : "NOT isomorphic");
  return {ok, detail};
}

Outcome u_image_fuzz() {
  Rng rng(20240401);
  const Budget budget{512, 2'000'000};
  std::size_t n = 0, disagree = 0, exhausted = 0, nonempty = 0;
  while (n < 120) {
    auto g = random_reduced_marked(rng);
    auto u = u_transform(g).grammar;
    auto a = indexed_language_upto(g, 4, budget);
    // Membership of every string up to length 4 over the terminals.
    std::vector<Word> b;
    bool ex = a.exhausted;
    std::vector<Word> frontier{{}};
    for (std::size_t len = 0; len <= 4; ++len) {
      std::vector<Word> next;
      for (const auto& w : frontier) {
        auto r = sug_membership(u, w, budget);
        ex |= r.exhausted;
        if (r.member) b.push_back(w);
        for (const auto& t : g.symbols().terminals) {
          auto v = w;
          v.push_back(t);
          next.push_back(std::move(v));
        }
      }
      frontier = std::move(next);
    }
    ++n;
    if (ex) ++exhausted;
    if (!a.strings.empty()) ++nonempty;
    if (a.strings != b) {
      ++disagree;
      std::cerr << "U-image disagreement:\n" << print_indexed_grammar(g);
    }
  }
  return {disagree == 0 && exhausted == 0,
          std::to_string(n) + " grammars (" + std::to_string(nonempty) + " with non-empty languages), " +
              std::to_string(disagree) + " disagreements, " + std::to_string(exhausted) + " exhausted"};
}

bool same_up_to_order(const UnificationGrammar& a, const UnificationGrammar& b) {
  auto lines = [](const UnificationGrammar& g) {
    std::istringstream in(print_unification_grammar(g));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
      std::istringstream words(line);
      std::string head;
      words >> head;
      if (head == "nonterminals" || head == "terminals" || head == "attributes" || head == "values") {
        std::vector<std::string> syms{head};
        for (std::string s; words >> s;) syms.push_back(s);
        std::sort(syms.begin() + 1, syms.end());
        line.clear();
        for (const auto& s : syms) line += s + " ";
      }
      out.push_back(line);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return lines(a) == lines(b);
}

Outcome reverse_u_round_trip() {
  Rng rng(6);
  std::size_t n = 0, failures = 0, exact = 0;
  for (; n < 150; ++n) {
    auto g = random_ugi_reduced_sink_mapped(rng);
    auto back = u_transform(reverse_u(g).grammar).grammar;
    if (back == g) ++exact;
    if (!same_up_to_order(back, g)) {
      ++failures;
      std::cerr << "reverse U round trip failed:\n" << print_unification_grammar(g);
    }
  }
  return {failures == 0, std::to_string(n) + " grammars, " + std::to_string(failures) + " failures (" +
                             std::to_string(exact) + " identical including declaration order)"};
}

Outcome canonical_agreement() {
  Rng rng(5);
  std::size_t n = 0, disagree = 0, consistent = 0;
  while (n < 1200) {
    auto g = random_ugi(rng);
    for (int k = 0; k < 4; ++k) {
      auto cs = random_cstructure(g, rng, 1 + k);
      if (!cs) continue;
      ++n;
      bool a = generates_check(*cs).consistent();
      bool b = canonical_fs(*cs).consistent();
      consistent += a;
      if (a != b) {
        ++disagree;
        std::cerr << "canonical structure disagreement (generates=" << a << ")\n" << print_unification_grammar(g);
      }
    }
  }
  return {disagree == 0, std::to_string(n) + " c-structures (" + std::to_string(consistent) + " consistent), " +
                             std::to_string(disagree) + " disagreements"};
}

Outcome transformations() {
  Rng rng(7);
  const Budget budget{512, 2'000'000};
  struct Tally {
    std::size_t compared = 0, failed = 0, skipped = 0;
  };
  Tally mark, norm, sink;
  auto tally = [](Tally& t, const LanguageResult& a, const LanguageResult& b) {
    if (a.exhausted || b.exhausted) {
      ++t.skipped;
      return;
    }
    ++t.compared;
    if (a.strings != b.strings) ++t.failed;
  };
  while (mark.compared < 60) {
    auto g = random_indexed(rng);
    tally(mark, language_upto(g, 4, budget), language_upto(mark_index_end(g), 4, budget));
  }
  while (norm.compared < 60 || sink.compared < 60) {
    auto g = random_ugi(rng);
    auto base = language_upto(g, 4, budget);
    if (norm.compared < 60) tally(norm, base, language_upto(ugi_normalize(g), 4, budget));
    if (sink.compared < 60) tally(sink, base, language_upto(sink_map_root(g), 4, budget));
  }
  auto show = [](const char* name, const Tally& t) {
    return std::string(name) + " " + std::to_string(t.compared - t.failed) + "/" + std::to_string(t.compared) +
           (t.skipped ? " (" + std::to_string(t.skipped) + " skipped, budget)" : "");
  };
  return {mark.failed + norm.failed + sink.failed == 0,
          show("mark_index_end", mark) + ", " + show("ugi_normalize", norm) + ", " + show("sink_map_root", sink)};
}

Outcome solver_oracle() {
  Rng rng(8);
  std::size_t n = 0, agree = 0, beyond = 0, unexplained = 0;
  for (; n < 300; ++n) {
    auto es = random_equations(rng);
    std::set<TreeAddress> names;
    for (const auto& e : es) {
      if (const auto* p = std::get_if<PathEquation>(&e)) {
        names.insert(p->lhs_name);
        names.insert(p->rhs_name);
      } else {
        names.insert(std::get<ValueEquation>(e).name);
      }
    }
    auto r = solve(es, names);
    auto oracle = brute_force_model(es, 4);
    if (r.consistent() == oracle.has_value()) {
      ++agree;
      continue;
    }
    // solve found a model the 4-node search cannot hold. Check that model
    // directly: it must be well defined, satisfy every equation and need
    // more than 4 nodes.
    if (r.consistent() && well_defined_check(*r.model).well_defined() && satisfies_set(*r.model, es) &&
        least_model_size(r) > 4) {
      ++beyond;
    } else {
      ++unexplained;
      std::cerr << "solver disagreement:";
      for (const auto& e : es) std::cerr << " " << to_string(e) << ";";
      std::cerr << '\n';
    }
  }
  Outcome o{agree == n, std::to_string(agree) + "/" + std::to_string(n) + " agree with the <=4-node search"};
  if (beyond) {
    o.detail += "; " + std::to_string(beyond) +
                " consistent sets have no model with <=4 nodes (verified model of solve is larger), " +
                std::to_string(unexplained) + " unexplained";
    o.expected_failure = unexplained == 0;
  }
  return o;
}

Outcome determinism() {
  std::vector<std::vector<std::string>> runs;
  auto ixg1 = fixture("example1.ixg"), ixg2 = fixture("example2.ixg"), ugr = fixture("example2_u.ugr");
  for (const auto& f : {ixg1, ixg2, ugr}) {
    runs.push_back({"check", f});
    runs.push_back({"check", f, "--json"});
    runs.push_back({"enum", f, "--max-len", "6"});
    runs.push_back({"enum", f, "--max-len", "6", "--json"});
  }
  runs.push_back({"member", ixg1, "aabbcc"});
  runs.push_back({"member", ixg1, "aabbcc", "--json"});
  runs.push_back({"member", ixg2, "ddddd"});
  runs.push_back({"member", ugr, "dddd", "--json"});
  runs.push_back({"transform", ixg1, "--op", "mark-end"});
  runs.push_back({"transform", ixg1, "--op", "u"});
  runs.push_back({"transform", ixg2, "--op", "u"});
  runs.push_back({"transform", ugr, "--op", "reverse-u"});
  runs.push_back({"transform", ugr, "--op", "ugi-normalize"});
  runs.push_back({"transform", ugr, "--op", "sink-map"});
  runs.push_back({"equiv", ixg2, ugr, "--max-len", "8"});
  runs.push_back({"equiv", ixg1, ixg2, "--max-len", "6", "--json"});
  runs.push_back({"derive", ixg1, "aabbcc"});
  runs.push_back({"derive", ugr, "dddd"});
  runs.push_back({"derive", ixg1, "aabbcc", "--dot", (scratch / "fig1.dot").string()});
  runs.push_back({"derive", ugr, "dddd", "--dot", (scratch / "fig2.dot").string()});
  runs.push_back({"transform", ixg2, "--op", "u", "-o", (scratch / "u.ugr").string()});

  auto capture = [](const std::vector<std::string>& args) {
    auto r = cli(args);
    std::string files;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--dot" || args[i] == "-o") {
        std::ifstream in(args[i + 1], std::ios::binary);
        files.assign(std::istreambuf_iterator<char>(in), {});
        fs::remove(args[i + 1]);
      }
    }
    return std::to_string(r.code) + '\0' + r.out + '\0' + r.err + '\0' + files;
  };
  std::size_t differ = 0;
  for (const auto& args : runs) {
    if (capture(args) != capture(args)) {
      ++differ;
      std::cerr << "non-deterministic:";
      for (const auto& a : args) std::cerr << ' ' << a;
      std::cerr << '\n';
    }
  }
  return {differ == 0, std::to_string(runs.size()) + " command lines run twice, " + std::to_string(differ) +
                           " with differing output"};
}

}  // namespace

int main(int argc, char** argv) {
  fixtures = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
  scratch = fs::temp_directory_path() / ("glab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);

  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"example 1 language", 5, example1_language},
      {"example 2 cross-formalism equivalence", 60, example2_cross},
      {"witness checks", 60, witness_checks},
      {"indexed vs U-image language fuzz", 600, u_image_fuzz},
      {"reverse U round trip", 600, reverse_u_round_trip},
      {"c-structure consistency agreement", 600, canonical_agreement},
      {"transformations preserve languages", 600, transformations},
      {"solver vs brute-force oracle", 600, solver_oracle},
      {"determinism", 600, determinism},
  };

  bool gate = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < criteria[i].limit_seconds;
    bool pass = o.pass && in_time;
    if (!in_time) o.detail += "; over the time limit";
    if (!pass && !(o.expected_failure && in_time)) gate = false;
    std::printf("%zu %s  %s: %s [%.2fs < %.0fs]%s\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].name,
                o.detail.c_str(), secs, criteria[i].limit_seconds,
                !pass && o.expected_failure ? " (expected: bound in the criterion)" : "");
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  return gate ? 0 : 1;
}
