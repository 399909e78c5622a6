#include "cmnet/json_io.hpp"

#include "cmnet/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cmnet {

namespace {

[[noreturn]] void schema(const std::string& what) { throw SchemaError(what); }

const Json& field(const Json& obj, const char* key, const std::string& ctx) {
  if (!obj.is_object()) schema(ctx + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema(ctx + ": missing field '" + key + "'");
  return *it;
}

std::string string_of(const Json& v, const std::string& ctx) {
  if (!v.is_string()) schema(ctx + ": expected a string");
  return v.get<std::string>();
}

std::vector<std::string> strings_of(const Json& v, const std::string& ctx) {
  if (!v.is_array()) schema(ctx + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(string_of(e, ctx));
  return out;
}

long long integer_of(const Json& v, const std::string& ctx) {
  if (!v.is_number_integer()) schema(ctx + ": expected an integer");
  return v.get<long long>();
}

double number_of(const Json& v, const std::string& ctx) {
  if (!v.is_number()) schema(ctx + ": expected a number");
  return v.get<double>();
}

Rational rational_of(const Json& v, const std::string& ctx) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      schema(ctx + ": " + e.what());
    }
  }
  schema(ctx + ": expected a rational string such as \"1/2\"");
}

Json tuple_to_json(const OutcomeTuple& t) {
  Json a = Json::array();
  for (const auto& o : t) a.push_back(o.str());
  return a;
}

OutcomeTuple tuple_from_json(const Json& v, const std::string& ctx) {
  OutcomeTuple t;
  for (const auto& s : strings_of(v, ctx)) {
    try {
      t.push_back(Outcome::parse(s));
    } catch (const std::exception& e) {
      schema(ctx + ": " + e.what());
    }
  }
  return t;
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const std::string& path, const Json& doc) {
  const std::string text = dump(doc);
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("cannot write '" + path + "'");
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Network& net) {
  Json doc;
  doc["colors"] = net.colors;
  Json sources = Json::array();
  for (const auto& s : net.sources) sources.push_back({{"name", s.name}, {"legs", s.legs}});
  doc["sources"] = sources;
  Json parties = Json::array();
  for (const auto& p : net.parties) parties.push_back({{"name", p.name}, {"view", p.view}});
  doc["parties"] = parties;
  return doc;
}

Network network_from_json(const Json& doc) {
  Network net;
  const long long colors = integer_of(field(doc, "colors", "network"), "network.colors");
  if (colors < 0 || colors > 36) schema("network.colors: must be between 0 and 36");
  net.colors = static_cast<int>(colors);
  const Json& sources = field(doc, "sources", "network");
  if (!sources.is_array()) schema("network.sources: expected an array");
  for (const auto& s : sources) {
    net.sources.push_back({string_of(field(s, "name", "source"), "source.name"),
                           strings_of(field(s, "legs", "source"), "source.legs")});
  }
  const Json& parties = field(doc, "parties", "network");
  if (!parties.is_array()) schema("network.parties: expected an array");
  for (const auto& p : parties) {
    net.parties.push_back({string_of(field(p, "name", "party"), "party.name"),
                           strings_of(field(p, "view", "party"), "party.view")});
  }
  return net;
}

Json to_json(const TupleSet& tuples) { return {{"tuples", tuples.tuples()}}; }

TupleSet tuples_from_json(const Json& doc, const Network& net) {
  const Json& list = field(doc, "tuples", "tuples");
  if (!list.is_array()) schema("tuples: expected an array");
  std::vector<ColorAssignment> out;
  for (const auto& t : list) {
    if (!t.is_array()) schema("tuples: every tuple must be an array of colors");
    ColorAssignment a;
    for (const auto& c : t) a.push_back(static_cast<int>(integer_of(c, "tuples")));
    out.push_back(std::move(a));
  }
  return TupleSet(net.num_sources(), net.colors, std::move(out));
}

TupleSet load_tuples(const std::string& spec, const Network& net) {
  if (spec == "builtin:fig1") {
    TupleSet t = TupleSet::fig1();
    if (t.num_sources() != net.num_sources() || t.colors() != net.colors) {
      throw PreconditionError("builtin:fig1 needs three sources and three colors");
    }
    return t;
  }
  if (spec == "builtin:constants") return TupleSet::constants(net.num_sources(), net.colors);
  if (spec.rfind("builtin:", 0) == 0) throw SchemaError("unknown tuple set '" + spec + "'");
  return tuples_from_json(read_json_file(spec), net);
}

Json to_json(const Distribution& d) {
  Json doc;
  doc["mode"] = d.exact() ? "exact" : "float";
  doc["parties"] = d.parties();
  Json table = Json::array();
  if (d.exact()) {
    for (const auto& [t, p] : d.exact_table()) table.push_back({{"outcome", tuple_to_json(t)}, {"p", to_string(p)}});
  } else {
    for (const auto& [t, p] : d.float_table()) table.push_back({{"outcome", tuple_to_json(t)}, {"p", p}});
  }
  doc["table"] = table;
  return doc;
}

Distribution distribution_from_json(const Json& doc) {
  const std::string mode = string_of(field(doc, "mode", "distribution"), "distribution.mode");
  if (mode != "exact" && mode != "float") schema("distribution.mode: expected \"exact\" or \"float\"");
  auto parties = strings_of(field(doc, "parties", "distribution"), "distribution.parties");
  const Json& table = field(doc, "table", "distribution");
  if (!table.is_array()) schema("distribution.table: expected an array");
  std::map<OutcomeTuple, Rational> exact;
  std::map<OutcomeTuple, double> real;
  for (const auto& row : table) {
    OutcomeTuple t = tuple_from_json(field(row, "outcome", "table row"), "table row.outcome");
    if (t.size() != parties.size()) schema("distribution.table: outcome arity differs from party count");
    const Json& p = field(row, "p", "table row");
    const bool fresh = mode == "exact" ? exact.emplace(t, rational_of(p, "table row.p")).second
                                       : real.emplace(t, number_of(p, "table row.p")).second;
    if (!fresh) schema("distribution.table: duplicate outcome " + to_string(t));
  }
  Distribution d = mode == "exact" ? Distribution(std::move(parties), std::move(exact))
                                   : Distribution(std::move(parties), std::move(real));
  try {
    d.check();
  } catch (const PreconditionError& e) {
    schema(std::string("distribution: ") + e.what());
  }
  return d;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& z : row) r.push_back(complex_to_json(z));
    rows.push_back(r);
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& doc) {
  if (!doc.is_array()) schema("matrix: expected an array of rows");
  ComplexMatrix m;
  for (const auto& row : doc) {
    if (!row.is_array()) schema("matrix: expected an array of rows");
    std::vector<Complex> r;
    for (const auto& z : row) {
      if (!z.is_array() || z.size() != 2) schema("matrix: entries are [re, im] pairs");
      r.emplace_back(number_of(z[0], "matrix entry"), number_of(z[1], "matrix entry"));
    }
    m.push_back(std::move(r));
  }
  return m;
}

Json to_json(const RefinementUnitary& u) { return {{"party", u.party}, {"matrix", matrix_to_json(u.matrix)}}; }

std::vector<RefinementUnitary> refinements_from_json(const Json& doc, const Network& net,
                                                     const TupleSet& tuples) {
  std::vector<RefinementUnitary> out;
  auto add = [&](const Json& obj) {
    const std::string party = string_of(field(obj, "party", "refinement"), "refinement.party");
    ComplexMatrix m = matrix_from_json(field(obj, "matrix", "refinement"));
    if (party != "*") {
      out.push_back({party, std::move(m)});
      return;
    }
    const CmStrategy strategy(net, tuples);
    for (std::size_t p = 0; p < net.num_parties(); ++p) {
      if (!strategy.ambiguous_views(p).empty()) out.push_back({net.parties[p].name, m});
    }
  };
  if (doc.is_object() && doc.contains("refinements")) {
    const Json& list = doc["refinements"];
    if (!list.is_array()) schema("refinements: expected an array");
    for (const auto& e : list) add(e);
  } else if (doc.is_array()) {
    for (const auto& e : doc) add(e);
  } else {
    add(doc);
  }
  return out;
}

std::vector<RefinementUnitary> load_refinements(const std::string& spec, const Network& net,
                                                const TupleSet& tuples) {
  if (spec == "builtin:identity") {
    const CmStrategy strategy(net, tuples);
    std::vector<RefinementUnitary> out;
    for (std::size_t p = 0; p < net.num_parties(); ++p) {
      const std::size_t d = strategy.ambiguous_views(p).size();
      if (d > 0) out.push_back({net.parties[p].name, identity_matrix(d)});
    }
    return out;
  }
  if (spec.rfind("builtin:", 0) == 0) throw SchemaError("unknown refinement '" + spec + "'");
  return refinements_from_json(read_json_file(spec), net, tuples);
}

Json to_json(const SourceState& s) {
  Json amps = Json::array();
  for (const auto& z : s.amplitudes) amps.push_back(complex_to_json(z));
  return {{"legs", s.legs}, {"colors", s.colors}, {"amplitudes", amps}};
}

SourceState source_state_from_json(const Json& doc) {
  SourceState s;
  const long long legs = integer_of(field(doc, "legs", "source state"), "source state.legs");
  const long long colors = integer_of(field(doc, "colors", "source state"), "source state.colors");
  if (legs < 0 || colors < 0) schema("source state: legs and colors must be nonnegative");
  s.legs = static_cast<std::size_t>(legs);
  s.colors = static_cast<int>(colors);
  const Json& amps = field(doc, "amplitudes", "source state");
  if (!amps.is_array()) schema("source state.amplitudes: expected an array");
  for (const auto& z : amps) {
    if (!z.is_array() || z.size() != 2) schema("source state.amplitudes: entries are [re, im] pairs");
    s.amplitudes.emplace_back(number_of(z[0], "amplitude"), number_of(z[1], "amplitude"));
  }
  return s;
}

Json to_json(const FinnerWeights& w) {
  Json weights = Json::object();
  for (const auto& [party, value] : w) weights[party] = to_string(value);
  return {{"weights", weights}};
}

FinnerWeights weights_from_json(const Json& doc) {
  const Json& weights = field(doc, "weights", "weights");
  if (!weights.is_object()) schema("weights: expected an object mapping parties to rationals");
  FinnerWeights w;
  for (const auto& [party, value] : weights.items()) w[party] = rational_of(value, "weights." + party);
  return w;
}

Json to_json(const FinnerReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"outcome", tuple_to_json(v.outcome)}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  Json equalities = Json::array();
  for (const auto& t : r.equalities) equalities.push_back(tuple_to_json(t));
  return {{"exact", r.exact},
          {"holds", r.violations.empty()},
          {"violations", violations},
          {"equalities", equalities},
          {"maxRatio", r.max_ratio}};
}

Json to_json(const Certification& c) {
  const FeasibilityResult& f = c.feasibility;
  Json doc;
  doc["result"] = c.verdict();
  doc["status"] = to_string(f.status);
  doc["margin"] = f.margin;
  doc["certificate"] = f.certificate ? Json(f.certificate->y) : Json::array();
  if (f.status == FeasibilityResult::Status::kInfeasible && f.verified_by) {
    doc["verification"] = to_string(*f.verified_by);
  } else if (f.certificate) {
    doc["verification"] = "failed";
  } else {
    doc["verification"] = nullptr;
  }
  if (f.status == FeasibilityResult::Status::kFeasible) doc["residual"] = f.residual;
  Json patterns = Json::array();
  for (const auto& p : c.patterns) patterns.push_back(p);
  doc["patterns"] = patterns;
  Json rvalues = Json::array();
  for (const auto& [key, value] : c.r_values) {
    rvalues.push_back({{"party", c.lp.model ? c.lp.model->network.parties[key.party].name : std::to_string(key.party)},
                       {"refined", key.refined},
                       {"pattern", key.pattern + 1},
                       {"value", value.value}});
  }
  doc["rValues"] = rvalues;
  Json tags = Json::object();
  for (RowTag tag : {RowTag::kBlockMarginal, RowTag::kPartyPattern, RowTag::kNormalization, RowTag::kGeneric}) {
    if (const std::size_t n = c.lp.count(tag)) tags[to_string(tag)] = n;
  }
  doc["lp"] = {{"rows", c.lp.rows.size()}, {"cols", c.lp.num_vars}, {"tags", tags}};
  return doc;
}

Json to_json(const SearchResult& r, std::size_t max_history) {
  Json doc;
  doc["result"] = r.verdict();
  doc["margin"] = r.margin;
  doc["bestRestart"] = r.best_restart;
  doc["evaluations"] = r.evaluations;
  doc["budgetExhausted"] = r.budget_exhausted;
  doc["params"] = r.params;
  Json refinements = Json::array();
  for (const auto& u : r.refinements) refinements.push_back(to_json(u));
  doc["refinements"] = refinements;
  Json history = Json::array();
  const std::size_t n = r.trajectory.size();
  const std::size_t keep = std::min(n, std::max<std::size_t>(max_history, 1));
  for (std::size_t k = 0; k < keep; ++k) {
    // Evenly spaced indices, the last one always n - 1.
    const std::size_t i = keep == 1 ? n - 1 : k * (n - 1) / (keep - 1);
    const auto& e = r.trajectory[i];
    history.push_back({{"restart", e.restart}, {"iteration", e.iteration}, {"margin", e.margin}, {"best", e.best}});
  }
  doc["history"] = history;
  doc["certification"] = r.certification ? to_json(*r.certification) : Json(nullptr);
  return doc;
}

}  // namespace cmnet
