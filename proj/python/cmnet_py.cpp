#include "cmnet/errors.hpp"
#include "cmnet/json_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using cmnet::Json;

namespace {

// Arguments arrive as JSON text; anything else is a builtin spec or a path.
bool is_json_text(const std::string& s) { return !s.empty() && (s.front() == '{' || s.front() == '['); }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw cmnet::SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

Json load_doc(const std::string& arg) { return is_json_text(arg) ? parse(arg) : cmnet::read_json_file(arg); }

cmnet::TupleSet tuples_for(const std::string& arg, const Json& net_doc, const cmnet::Network& net) {
  if (!arg.empty()) {
    return is_json_text(arg) ? cmnet::tuples_from_json(parse(arg), net) : cmnet::load_tuples(arg, net);
  }
  if (net_doc.contains("tuples")) return cmnet::tuples_from_json(net_doc, net);
  return cmnet::TupleSet::constants(net.num_sources(), net.colors);
}

struct Loaded {
  Json doc;
  cmnet::Network net;
  cmnet::TupleSet tuples;
};

Loaded load(const std::string& network, const std::string& tuples) {
  Json doc = load_doc(network);
  cmnet::Network net = cmnet::network_from_json(doc);
  cmnet::TupleSet t = tuples_for(tuples, doc, net);
  return {std::move(doc), std::move(net), std::move(t)};
}

cmnet::QuantumModel model_for(const Loaded& l, const std::string& refinement) {
  cmnet::QuantumModel model = cmnet::QuantumModel::cm(l.net, l.tuples);
  if (refinement.empty()) return model;
  const auto list = is_json_text(refinement) ? cmnet::refinements_from_json(parse(refinement), l.net, l.tuples)
                                             : cmnet::load_refinements(refinement, l.net, l.tuples);
  for (const auto& u : list) model.set_refinement(u);
  return model;
}

std::string validate(const std::string& network) {
  const cmnet::Network net = cmnet::network_from_json(load_doc(network));
  const auto problems = cmnet::validate_network(net);
  Json r = {{"valid", problems.empty()}, {"errors", problems}};
  if (problems.empty()) {
    r["ecs"] = cmnet::check_ecs(net).holds;
    const auto w = cmnet::solve_pfis(net);
    r["weights"] = w ? cmnet::to_json(*w)["weights"] : Json(nullptr);
  }
  return r.dump();
}

std::string pcolor(const std::string& network, const std::string& tuples, const std::string& mode) {
  if (mode != "exact" && mode != "float") throw cmnet::PreconditionError("mode must be 'exact' or 'float'");
  const Loaded l = load(network, tuples);
  const cmnet::Distribution d = cmnet::compute_pcolor(l.net, l.tuples);
  return cmnet::to_json(mode == "exact" ? d : cmnet::to_float(d)).dump();
}

std::string patterns(const std::string& network, const std::string& tuples) {
  const Loaded l = load(network, tuples);
  return Json(cmnet::enumerate_hidden_patterns(l.net, l.tuples)).dump();
}

std::string simulate(const std::string& network, const std::string& refinement, const std::string& tuples) {
  const Loaded l = load(network, tuples);
  return cmnet::to_json(cmnet::simulate(model_for(l, refinement))).dump();
}

std::string finner(const std::string& network, const std::string& distribution, const std::string& weights) {
  const cmnet::Network net = cmnet::network_from_json(load_doc(network));
  const cmnet::Distribution d = cmnet::distribution_from_json(load_doc(distribution));
  cmnet::FinnerWeights w;
  if (!weights.empty()) {
    w = cmnet::weights_from_json(load_doc(weights));
  } else {
    const auto found = cmnet::solve_pfis(net);
    if (!found) throw cmnet::PreconditionError("network admits no perfect fractional independent set");
    w = *found;
  }
  return cmnet::to_json(cmnet::finner_check(net, d, w)).dump();
}

std::string certify(const std::string& network, const std::string& refinement, const std::string& tuples) {
  const Loaded l = load(network, tuples);
  if (!cmnet::check_ecs(l.net).holds) throw cmnet::PreconditionError("network is not ECS");
  return cmnet::to_json(cmnet::certify(model_for(l, refinement))).dump();
}

std::string search(const std::string& network, const std::string& tuples, std::uint64_t seed, std::size_t iterations,
                   std::size_t restarts, double budget_seconds, bool per_party, std::size_t threads) {
  const Loaded l = load(network, tuples);
  cmnet::SearchConfig config;
  config.seed = seed;
  config.iterations = iterations;
  config.restarts = restarts;
  config.time_budget_seconds = budget_seconds;
  config.shared_unitary = !per_party;
  config.threads = threads;
  cmnet::SearchResult r;
  {
    py::gil_scoped_release release;
    r = cmnet::search_nonlocal(l.net, l.tuples, config);
  }
  return cmnet::to_json(r).dump();
}

std::string generate(const std::string& family, int size, int colors) {
  if (family == "kn") return cmnet::to_json(cmnet::make_kn(size, colors > 0 ? colors : 2)).dump();
  if (family == "gm") return cmnet::to_json(cmnet::make_gm(size, colors > 0 ? colors : -1)).dump();
  throw cmnet::PreconditionError("family must be 'kn' or 'gm'");
}

}  // namespace

PYBIND11_MODULE(_cmnet, m) {
  m.doc() = "Color-matching network certificates (JSON text in, JSON text out)";
  m.attr("__version__") = CMNET_VERSION;

  py::register_exception<cmnet::SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<cmnet::IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<cmnet::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<cmnet::CapExceededError>(m, "CapExceededError", PyExc_RuntimeError);
  py::register_exception<cmnet::SolverError>(m, "SolverError", PyExc_RuntimeError);

  // Carries its tuple set so that every call on it sees hidden patterns.
  m.def("fig1_network", [] {
    Json doc = cmnet::to_json(cmnet::make_fig1_network());
    doc["tuples"] = cmnet::to_json(cmnet::TupleSet::fig1())["tuples"];
    return doc.dump();
  });
  m.def("generate", &generate, py::arg("family"), py::arg("size"), py::arg("colors") = 0);
  m.def("validate", &validate, py::arg("network"));
  m.def("pcolor", &pcolor, py::arg("network"), py::arg("tuples") = "", py::arg("mode") = "exact");
  m.def("patterns", &patterns, py::arg("network"), py::arg("tuples") = "");
  m.def("simulate", &simulate, py::arg("network"), py::arg("refinement") = "", py::arg("tuples") = "");
  m.def("finner", &finner, py::arg("network"), py::arg("distribution"), py::arg("weights") = "");
  m.def("certify", &certify, py::arg("network"), py::arg("refinement") = "", py::arg("tuples") = "");
  m.def("search", &search, py::arg("network"), py::arg("tuples") = "", py::arg("seed") = 1,
        py::arg("iterations") = cmnet::SearchConfig{}.iterations, py::arg("restarts") = cmnet::SearchConfig{}.restarts,
        py::arg("budget_seconds") = cmnet::SearchConfig{}.time_budget_seconds, py::arg("per_party") = false,
        py::arg("threads") = 0);
}
