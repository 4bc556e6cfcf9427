#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "glab/cli.hpp"
#include "glab/render.hpp"
#include "glab/transforms.hpp"

namespace py = pybind11;
using namespace glab;

namespace {

Word to_word(const py::object& w) {
  if (py::isinstance<py::str>(w)) {
    auto s = w.cast<std::string>();
    if (s.find_first_of(" \t\n") != std::string::npos) return split_words(s);
    return split_chars(s);
  }
  return w.cast<Word>();
}

Budget budget(std::size_t max_nodes, std::size_t max_trees) { return Budget{max_nodes, max_trees}; }

py::dict tree_dict(const DerivationTree& t) {
  py::dict d;
  for (const auto& [x, l] : t.labels) d[py::str(x.to_string())] = l.to_string();
  return d;
}

py::dict cstructure_dict(const CStructure& cs) {
  py::dict d;
  for (const auto& [x, n] : cs.nodes) {
    auto label = n.category.empty() ? std::string("ε") : n.category;
    if (!x.is_root()) label += " " + to_string(n.schema);
    d[py::str(x.to_string())] = label;
  }
  return d;
}

py::dict fs_dict(const FeatureStructure& m) {
  py::list delta, alpha;
  py::dict names;
  for (const auto& [key, t] : m.delta) delta.append(py::make_tuple(key.first, key.second, t));
  for (const auto& [q, v] : m.alpha) alpha.append(py::make_tuple(q, v));
  for (const auto& [x, q] : m.names) names[py::str(x.to_string())] = q;
  py::dict d;
  d["node_count"] = m.node_count;
  d["delta"] = delta;
  d["alpha"] = alpha;
  d["names"] = names;
  return d;
}

Path to_path(const py::object& p) {
  if (py::isinstance<py::str>(p)) return split_words(p.cast<std::string>());
  return p.cast<Path>();
}

// ("path", x, ψ, y, ψ') or ("value", x, ψ, v); names are address strings.
Equation to_equation(const py::tuple& t) {
  auto kind = t[0].cast<std::string>();
  auto name = [](const py::handle& h) { return TreeAddress::parse(h.cast<std::string>()); };
  if (kind == "path" && t.size() == 5)
    return PathEquation{name(t[1]), to_path(t[2]), name(t[3]), to_path(t[4])};
  if (kind == "value" && t.size() == 4)
    return make_value_equation(name(t[1]), to_path(t[2]), t[3].cast<std::string>());
  throw Error("equation tuples are ('path', x, p, y, q) or ('value', x, p, v)");
}

}  // namespace

PYBIND11_MODULE(_glab, m) {
  m.doc() = "Indexed grammars, simple unification grammars and the transformations between them";

  py::register_exception<Error>(m, "GlabError", PyExc_ValueError);

  py::class_<IndexedGrammar>(m, "IndexedGrammar")
      .def_property_readonly("start", &IndexedGrammar::start)
      .def_property_readonly("nonterminals", [](const IndexedGrammar& g) { return g.symbols().nonterminals; })
      .def_property_readonly("terminals", [](const IndexedGrammar& g) { return g.symbols().terminals; })
      .def_property_readonly("indices", [](const IndexedGrammar& g) { return g.symbols().indices; })
      .def_property_readonly("productions",
                             [](const IndexedGrammar& g) {
                               std::vector<std::string> out;
                               for (const auto& p : g.productions()) out.push_back(p.to_string());
                               return out;
                             })
      .def("__str__", [](const IndexedGrammar& g) { return print_indexed_grammar(g); })
      .def("__eq__", [](const IndexedGrammar& a, const IndexedGrammar& b) { return a == b; });

  py::class_<UnificationGrammar>(m, "UnificationGrammar")
      .def_property_readonly("start", &UnificationGrammar::start)
      .def_property_readonly("production_count", [](const UnificationGrammar& g) { return g.productions().size(); })
      .def_property_readonly("lexicon_count", [](const UnificationGrammar& g) { return g.lexicon().size(); })
      .def("__str__", [](const UnificationGrammar& g) { return print_unification_grammar(g); })
      .def("__eq__", [](const UnificationGrammar& a, const UnificationGrammar& b) { return a == b; });

  m.def("parse_indexed_grammar", [](const std::string& text) { return parse_indexed_grammar(text); });
  m.def("parse_unification_grammar", [](const std::string& text) { return parse_unification_grammar(text); });
  m.def("load_grammar", [](const std::string& path) -> py::object {
    auto g = load_grammar(path);
    if (auto* ig = std::get_if<IndexedGrammar>(&g)) return py::cast(std::move(*ig));
    return py::cast(std::get<UnificationGrammar>(std::move(g)));
  });

  m.def("reduced_form_check", [](const IndexedGrammar& g) {
    auto r = reduced_form_check(g);
    std::vector<std::string> offenders;
    for (auto i : r.offenders) offenders.push_back(g.productions()[i].to_string());
    return py::make_tuple(r.reduced, offenders);
  });
  m.def("marked_index_end_check", &marked_index_end_check);
  m.def("mark_index_end", &mark_index_end);

  m.def(
      "indexed_membership",
      [](const IndexedGrammar& g, const py::object& w, std::size_t max_nodes, std::size_t max_trees) {
        auto r = indexed_membership(g, to_word(w), budget(max_nodes, max_trees));
        py::dict d;
        d["member"] = r.member;
        d["exhausted"] = r.exhausted;
        d["explored"] = r.explored;
        d["witness"] = r.witness ? py::object(tree_dict(*r.witness)) : py::none();
        d["valid"] = r.witness ? validate_derivation_tree(g, *r.witness).ok : false;
        return d;
      },
      py::arg("grammar"), py::arg("word"), py::arg("max_nodes") = 4096, py::arg("max_trees") = 1'000'000);

  m.def(
      "indexed_language_upto",
      [](const IndexedGrammar& g, std::size_t maxlen, std::size_t max_nodes, std::size_t max_trees) {
        return indexed_language_upto(g, maxlen, budget(max_nodes, max_trees)).strings;
      },
      py::arg("grammar"), py::arg("maxlen"), py::arg("max_nodes") = 4096, py::arg("max_trees") = 1'000'000);

  m.def(
      "sug_membership",
      [](const UnificationGrammar& g, const py::object& w, std::size_t max_nodes, std::size_t max_trees) {
        auto r = sug_membership(g, to_word(w), budget(max_nodes, max_trees));
        py::dict d;
        d["member"] = r.member;
        d["exhausted"] = r.exhausted;
        d["explored"] = r.explored;
        d["witness"] = r.witness ? py::object(cstructure_dict(*r.witness)) : py::none();
        d["model"] = r.model ? py::object(fs_dict(*r.model)) : py::none();
        return d;
      },
      py::arg("grammar"), py::arg("word"), py::arg("max_nodes") = 4096, py::arg("max_trees") = 1'000'000);

  m.def(
      "sug_language_upto",
      [](const UnificationGrammar& g, std::size_t maxlen, std::size_t max_nodes, std::size_t max_trees) {
        return sug_language_upto(g, maxlen, budget(max_nodes, max_trees)).strings;
      },
      py::arg("grammar"), py::arg("maxlen"), py::arg("max_nodes") = 4096, py::arg("max_trees") = 1'000'000);

  m.def("ugi_check", [](const UnificationGrammar& g) {
    auto r = ugi_check(g);
    py::dict d;
    d["is_ugi"] = r.is_ugi;
    d["is_reduced"] = r.is_reduced;
    d["has_sink_mapped_root"] = r.has_sink_mapped_root;
    d["offenders"] = r.offenders;
    return d;
  });
  m.def("ugi_normalize", &ugi_normalize);
  m.def("sink_map_root", &sink_map_root);
  m.def("u_transform", [](const IndexedGrammar& g) { return u_transform(g).grammar; });
  m.def("reverse_u", [](const UnificationGrammar& g) { return reverse_u(g).grammar; });

  m.def(
      "solve",
      [](const std::vector<py::tuple>& equations, const std::vector<std::string>& names) {
        std::vector<Equation> es;
        for (const auto& t : equations) es.push_back(to_equation(t));
        std::set<TreeAddress> domain;
        for (const auto& n : names) domain.insert(TreeAddress::parse(n));
        for (const auto& e : es) {
          if (const auto* p = std::get_if<PathEquation>(&e)) {
            domain.insert(p->lhs_name);
            domain.insert(p->rhs_name);
          } else {
            domain.insert(std::get<ValueEquation>(e).name);
          }
        }
        auto r = solve(es, domain);
        py::dict d;
        d["consistent"] = r.consistent();
        d["model"] = r.model ? py::object(fs_dict(*r.model)) : py::none();
        d["diagnosis"] = r.diagnosis ? py::object(py::str(to_string(*r.diagnosis))) : py::none();
        return d;
      },
      py::arg("equations"), py::arg("names") = std::vector<std::string>{});

  m.def(
      "equiv",
      [](const py::object& a, const py::object& b, std::size_t maxlen, std::size_t max_nodes, std::size_t max_trees) {
        auto grammar = [](const py::object& o) -> AnyGrammar {
          if (py::isinstance<IndexedGrammar>(o)) return o.cast<IndexedGrammar>();
          return o.cast<UnificationGrammar>();
        };
        auto v = equiv(grammar(a), grammar(b), maxlen, budget(max_nodes, max_trees));
        py::dict d;
        d["agree"] = v.agree;
        d["left"] = v.left;
        d["right"] = v.right;
        d["left_only"] = v.left_only;
        d["right_only"] = v.right_only;
        d["left_exhausted"] = v.left_exhausted;
        d["right_exhausted"] = v.right_exhausted;
        return d;
      },
      py::arg("left"), py::arg("right"), py::arg("maxlen"), py::arg("max_nodes") = 4096,
      py::arg("max_trees") = 1'000'000);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
