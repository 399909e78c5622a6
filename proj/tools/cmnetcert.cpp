// Command-line front end: JSON in, one JSON report out.
//
// Exit codes: 0 completed (whatever the verdict), 2 I/O or schema failure,
// 3 precondition refusal, 4 internal or solver failure.

#include "cmnet/errors.hpp"
#include "cmnet/json_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using cmnet::Json;

struct Options {
  std::string network;
  std::string tuples;
  std::string refinement;
  std::string weights;
  std::string distribution;
  std::string out = "-";
  std::string pcolor_mode = "exact";
  std::string simulate_mode = "float";
  std::uint64_t seed = 1;
  std::size_t iters = cmnet::SearchConfig{}.iterations;
  std::size_t restarts = cmnet::SearchConfig{}.restarts;
  double budget_seconds = cmnet::SearchConfig{}.time_budget_seconds;
  std::size_t threads = 0;
  bool per_party = false;
  bool record_timing = false;
  std::string family;
  int size = 0;
  int colors = 0;
};

// Collects what the manifest reports about the run.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void input(const std::string& flag, const std::string& path) {
    if (path.empty() || path.rfind("builtin:", 0) == 0) {
      inputs_[flag] = {{"path", path}};
      return;
    }
    inputs_[flag] = {{"path", path}, {"fnv1a64", cmnet::fnv1a64_hex(cmnet::read_text_file(path))}};
  }
  Json& config() { return config_; }

  Json finish(const Json& summary, std::optional<double> seconds) const {
    Json m;
    m["command"] = command_;
    m["version"] = CMNET_VERSION;
    m["inputs"] = inputs_;
    m["config"] = config_;
    m["summary"] = summary;
    if (seconds) m["wallClockSeconds"] = *seconds;
    return m;
  }

 private:
  std::string command_;
  Json inputs_ = Json::object();
  Json config_ = Json::object();
};

cmnet::Network load_network(const Options& o, Manifest& m) {
  if (o.network.empty()) throw cmnet::PreconditionError("--network is required");
  m.input("network", o.network);
  return cmnet::network_from_json(cmnet::read_json_file(o.network));
}

// --tuples, else a "tuples" array embedded in the network document, else the
// constant tuples.
cmnet::TupleSet load_tuples(const Options& o, const cmnet::Network& net, Manifest& m) {
  if (!o.tuples.empty()) {
    m.input("tuples", o.tuples);
    return cmnet::load_tuples(o.tuples, net);
  }
  const Json doc = cmnet::read_json_file(o.network);
  if (doc.contains("tuples")) return cmnet::tuples_from_json(doc, net);
  m.input("tuples", "builtin:constants");
  return cmnet::TupleSet::constants(net.num_sources(), net.colors);
}

Json tuple_names(const cmnet::Network& net, const cmnet::ColorAssignment& a) {
  Json colors = Json::object();
  for (std::size_t s = 0; s < net.num_sources(); ++s) colors[net.sources[s].name] = a[s];
  return colors;
}

Json run_validate(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  const auto problems = cmnet::validate_network(net);
  Json r;
  r["valid"] = problems.empty();
  r["errors"] = problems;
  if (!problems.empty()) {
    r["ecs"] = nullptr;
    r["pfis"] = nullptr;
    return r;
  }
  const cmnet::EcsResult ecs = cmnet::check_ecs(net);
  r["ecs"] = ecs.holds;
  Json witnesses = Json::object();
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& w = ecs.witnesses[s];
    witnesses[net.sources[s].name] = w ? Json::array({w->first, w->second}) : Json(nullptr);
  }
  r["ecsWitnesses"] = witnesses;
  const auto weights = cmnet::solve_pfis(net);
  r["pfis"] = weights ? "found" : "none";
  r["weights"] = weights ? cmnet::to_json(*weights)["weights"] : Json(nullptr);
  return r;
}

Json run_pcolor(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  const cmnet::TupleSet tuples = load_tuples(o, net, m);
  m.config()["mode"] = o.pcolor_mode;
  const cmnet::Distribution d = cmnet::compute_pcolor(net, tuples);
  return cmnet::to_json(o.pcolor_mode == "exact" ? d : cmnet::to_float(d));
}

Json run_patterns(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  const cmnet::TupleSet tuples = load_tuples(o, net, m);
  const auto patterns = cmnet::enumerate_hidden_patterns(net, tuples);
  Json list = Json::array();
  for (std::size_t t = 0; t < patterns.size(); ++t) {
    list.push_back({{"t", t + 1}, {"assignment", patterns[t]}, {"colors", tuple_names(net, patterns[t])}});
  }
  return {{"count", patterns.size()}, {"patterns", list}};
}

cmnet::QuantumModel load_model(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  const cmnet::TupleSet tuples = load_tuples(o, net, m);
  cmnet::QuantumModel model = cmnet::QuantumModel::cm(net, tuples);
  if (!o.refinement.empty()) {
    m.input("refinement", o.refinement);
    for (auto& u : cmnet::load_refinements(o.refinement, net, tuples)) model.set_refinement(std::move(u));
  }
  return model;
}

Json run_simulate(const Options& o, Manifest& m) {
  if (o.simulate_mode == "exact") throw cmnet::PreconditionError("quantum simulation is floating point; use --mode float");
  m.config()["mode"] = o.simulate_mode;
  return cmnet::to_json(cmnet::simulate(load_model(o, m)));
}

Json run_finner(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  cmnet::Distribution d;
  if (!o.distribution.empty()) {
    m.input("distribution", o.distribution);
    d = cmnet::distribution_from_json(cmnet::read_json_file(o.distribution));
  } else {
    d = cmnet::compute_pcolor(net, load_tuples(o, net, m));
  }
  cmnet::FinnerWeights w;
  if (!o.weights.empty()) {
    m.input("weights", o.weights);
    w = cmnet::weights_from_json(cmnet::read_json_file(o.weights));
  } else {
    const auto found = cmnet::solve_pfis(net);
    if (!found) throw cmnet::PreconditionError("network admits no perfect fractional independent set");
    w = *found;
  }
  Json r = cmnet::to_json(cmnet::finner_check(net, d, w));
  r["weights"] = cmnet::to_json(w)["weights"];
  return r;
}

Json run_certify(const Options& o, Manifest& m) {
  const cmnet::QuantumModel model = load_model(o, m);
  const cmnet::EcsResult ecs = cmnet::check_ecs(model.network);
  if (!ecs.holds) throw cmnet::PreconditionError("network is not ECS");
  if (!cmnet::solve_pfis(model.network)) {
    throw cmnet::PreconditionError("network admits no perfect fractional independent set");
  }
  return cmnet::to_json(cmnet::certify(model));
}

Json run_search(const Options& o, Manifest& m) {
  const cmnet::Network net = load_network(o, m);
  const cmnet::TupleSet tuples = load_tuples(o, net, m);
  cmnet::SearchConfig config;
  config.seed = o.seed;
  config.iterations = o.iters;
  config.restarts = o.restarts;
  config.time_budget_seconds = o.budget_seconds;
  config.shared_unitary = !o.per_party;
  config.threads = o.threads;
  Json& c = m.config();
  c["seed"] = config.seed;
  c["iterations"] = config.iterations;
  c["restarts"] = config.restarts;
  c["budgetSeconds"] = config.time_budget_seconds;
  c["sharedUnitary"] = config.shared_unitary;
  c["scales"] = config.scales;
  c["temperature"] = config.temperature;
  c["certifyMargin"] = config.certify_margin;
  const auto result = cmnet::search_nonlocal(net, tuples, config, [](const cmnet::TrajectoryEntry& e) {
    const Json line = {{"restart", e.restart}, {"iteration", e.iteration}, {"margin", e.margin}, {"best", e.best}};
    std::cerr << line.dump() << '\n';
  });
  Json r = cmnet::to_json(result);
  r["seed"] = config.seed;
  return r;
}

Json run_generate(const Options& o, Manifest& m) {
  m.config()["family"] = o.family;
  m.config()["size"] = o.size;
  if (o.family == "kn") {
    m.config()["colors"] = o.colors > 0 ? o.colors : 2;
    return cmnet::to_json(cmnet::make_kn(o.size, o.colors > 0 ? o.colors : 2));
  }
  m.config()["colors"] = o.colors > 0 ? o.colors : o.size;
  return cmnet::to_json(cmnet::make_gm(o.size, o.colors > 0 ? o.colors : -1));
}

Json summarize(const std::string& command, const Json& report) {
  Json s = Json::object();
  for (const char* key : {"result", "valid", "ecs", "pfis", "count", "holds", "margin"}) {
    if (report.contains(key)) s[key] = report[key];
  }
  if (report.contains("table")) s["support"] = report["table"].size();
  if (command == "generate") s["parties"] = report["parties"].size();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Color-matching network nonlocality certification"};
  app.set_version_flag("--version", std::string(CMNET_VERSION));
  app.require_subcommand(1);
  Options o;

  auto add_network = [&](CLI::App* sub) {
    sub->add_option("--network", o.network, "Network JSON file")->required();
  };
  auto add_tuples = [&](CLI::App* sub) {
    sub->add_option("--tuples", o.tuples,
                    "Tuple set: JSON file, builtin:fig1 or builtin:constants "
                    "(default: the network's embedded \"tuples\", else builtin:constants)");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Report file, - for stdout")->capture_default_str();
    sub->add_flag("--record-timing", o.record_timing, "Record wall-clock seconds in the manifest");
  };
  auto add_refinement = [&](CLI::App* sub) {
    sub->add_option("--refinement", o.refinement, "Refinement JSON file or builtin:identity");
  };

  std::map<std::string, std::function<Json(const Options&, Manifest&)>> runners;

  auto* validate = app.add_subcommand("validate", "Check network validity, ECS and PFIS");
  add_network(validate);
  add_common(validate);
  runners["validate"] = run_validate;

  auto* pcolor = app.add_subcommand("pcolor", "Classical color-matching distribution P_color");
  add_network(pcolor);
  add_tuples(pcolor);
  add_common(pcolor);
  pcolor->add_option("--mode", o.pcolor_mode, "exact or float")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  runners["pcolor"] = run_pcolor;

  auto* patterns = app.add_subcommand("patterns", "Hidden patterns (all parties ambiguous)");
  add_network(patterns);
  add_tuples(patterns);
  add_common(patterns);
  runners["patterns"] = run_patterns;

  auto* simulate = app.add_subcommand("simulate", "Born-rule distribution of the quantum strategy");
  add_network(simulate);
  add_tuples(simulate);
  add_refinement(simulate);
  add_common(simulate);
  simulate->add_option("--mode", o.simulate_mode, "float (quantum output is floating point)")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  runners["simulate"] = run_simulate;

  auto* finner = app.add_subcommand("finner", "Finner inequality check");
  add_network(finner);
  add_tuples(finner);
  add_common(finner);
  finner->add_option("--distribution", o.distribution, "Distribution JSON (default: P_color of --tuples)");
  finner->add_option("--weights", o.weights, "Weights JSON (default: solved PFIS)");
  runners["finner"] = run_finner;

  auto* certify = app.add_subcommand("certify", "Build and solve the hidden-pattern LP");
  add_network(certify);
  add_tuples(certify);
  add_refinement(certify);
  add_common(certify);
  runners["certify"] = run_certify;

  auto* search = app.add_subcommand("search", "Search refinement unitaries for a nonlocality certificate");
  add_network(search);
  add_tuples(search);
  add_common(search);
  search->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  search->add_option("--iters", o.iters, "Iterations per restart")->capture_default_str();
  search->add_option("--restarts", o.restarts, "Number of restarts")->capture_default_str();
  search->add_option("--budget-seconds", o.budget_seconds, "Wall-clock budget")->capture_default_str();
  search->add_option("--threads", o.threads, "Worker threads (0: CM_NETCERT_THREADS, else 1)")
      ->capture_default_str();
  search->add_flag("--per-party", o.per_party, "Independent unitary per party instead of a shared one");
  runners["search"] = run_search;

  auto* generate = app.add_subcommand("generate", "Emit a canonical K_n or G_m network");
  add_common(generate);
  generate->add_option("family", o.family, "kn or gm")->required()->check(CLI::IsMember({"kn", "gm"}));
  generate->add_option("--size", o.size, "n for K_n, m for G_m")->required();
  generate->add_option("--colors", o.colors, "Color count (default: 2 for K_n, m for G_m)");
  runners["generate"] = run_generate;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Manifest manifest(command);
  const auto start = std::chrono::steady_clock::now();
  auto seconds = [&]() -> std::optional<double> {
    if (!o.record_timing) return std::nullopt;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto emit = [&](Json report) {
    report["manifest"] = manifest.finish(summarize(command, report), seconds());
    cmnet::write_json_file(o.out, report);
  };
  auto refuse = [&](const std::string& kind, const std::string& message, int code) {
    std::cerr << "cmnetcert " << command << ": " << message << '\n';
    try {
      emit({{"refused", true}, {"error", kind}, {"message", message}});
    } catch (const std::exception&) {
    }
    return code;
  };

  try {
    emit(runners.at(command)(o, manifest));
    return 0;
  } catch (const cmnet::SchemaError& e) {
    return refuse("schema", e.what(), 2);
  } catch (const cmnet::IoError& e) {
    return refuse("io", e.what(), 2);
  } catch (const cmnet::PreconditionError& e) {
    return refuse("precondition", e.what(), 3);
  } catch (const cmnet::CapExceededError& e) {
    return refuse("precondition", e.what(), 3);
  } catch (const std::exception& e) {
    return refuse("internal", e.what(), 4);
  }
}
