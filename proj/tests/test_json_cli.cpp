#include "cmnet/errors.hpp"
#include "cmnet/json_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace cmnet;

namespace {

namespace fs = std::filesystem;

const std::string kTool = CMNETCERT_PATH;
const std::string kData = CMNET_DATA_DIR;

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "cmnet_cli_test";
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path out = scratch() / "out.json";
  fs::remove(out);
  const std::string cmd = kTool + " " + args + " --out " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, ""};
  if (fs::exists(out)) r.out = read_text_file(out.string());
  return r;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("network JSON round trip") {
  const Network net = make_fig1_network();
  const Network back = network_from_json(Json::parse(dump(to_json(net))));
  CHECK(dump(to_json(back)) == dump(to_json(net)));
  CHECK_THROWS_AS(network_from_json(Json::parse(R"({"colors": 3})")), SchemaError);
  CHECK_THROWS_AS(network_from_json(Json::parse(R"({"colors": "3", "sources": [], "parties": []})")), SchemaError);
}

TEST_CASE("refinement and weights JSON") {
  const Network net = make_fig1_network();
  const TupleSet t = TupleSet::fig1();
  const auto all = refinements_from_json(Json::parse(read_text_file(kData + "/identity.json")), net, t);
  CHECK(all.size() == 4);
  const auto one = refinements_from_json(to_json(RefinementUnitary{"B", identity_matrix(3)}), net, t);
  REQUIRE(one.size() == 1);
  CHECK(one[0].party == "B");
  CHECK(load_refinements("builtin:identity", net, t).size() == 4);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2]]")), SchemaError);

  const FinnerWeights w = *solve_pfis(net);
  CHECK(weights_from_json(to_json(w)) == w);
}

TEST_CASE("source state JSON round trip") {
  const SourceState s = cm_source_state(3, 3);
  const SourceState back = source_state_from_json(to_json(s));
  CHECK(back.amplitudes == s.amplitudes);
  CHECK(back.legs == 3);
}

TEST_CASE("fnv1a64 digest") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("cli validate") {
  Run r = run("validate --network " + kData + "/fig1.json");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["valid"] == true);
  CHECK(j["ecs"] == true);
  CHECK(j["pfis"] == "found");
  CHECK(j["manifest"]["command"] == "validate");
  CHECK(j["manifest"]["inputs"]["network"].contains("fnv1a64"));

  r = run("validate --network " + kData + "/parallel-sources.json");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["ecs"] == false);

  r = run("validate --network " + write("bad.json", "{\"colors\": 3,"));
  CHECK(r.code == 2);
  CHECK(Json::parse(r.out)["error"] == "schema");

  CHECK(run("validate --network /nonexistent/net.json").code == 2);
}

TEST_CASE("cli pcolor and patterns") {
  Run r = run("pcolor --network " + kData + "/fig1.json --tuples builtin:fig1");
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  bool found = false;
  for (const auto& row : j["table"]) {
    if (row["outcome"] == Json::array({"00", "00", "00", "00"})) found = row["p"] == "1/27";
  }
  CHECK(found);
  r = run("patterns --network " + kData + "/fig1.json --tuples builtin:fig1");
  CHECK(Json::parse(r.out)["count"] == 3);
}

TEST_CASE("cli certify and refusal") {
  Run r = run("certify --network " + kData + "/fig1.json --refinement " + kData + "/identity.json");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"] == "inconclusive");

  r = run("certify --network " + kData + "/parallel-sources.json");
  CHECK(r.code == 3);
  const Json j = Json::parse(r.out);
  CHECK(j["refused"] == true);
  CHECK(j["error"] == "precondition");
}

TEST_CASE("cli outputs feed downstream commands") {
  const fs::path dir = scratch();
  const std::string net = kData + "/fig1.json";
  const std::string gen = (dir / "k4.json").string();
  CHECK(std::system((kTool + " generate kn --size 4 --out " + gen).c_str()) == 0);
  CHECK(Json::parse(run("validate --network " + gen).out)["ecs"] == true);

  const std::string dist = (dir / "pcolor.json").string();
  CHECK(std::system((kTool + " pcolor --network " + net + " --out " + dist).c_str()) == 0);
  const Json f = Json::parse(run("finner --network " + net + " --distribution " + dist).out);
  CHECK(f["holds"] == true);
  CHECK(f["equalities"].size() == 6);

  const std::string sim = (dir / "sim.json").string();
  CHECK(std::system((kTool + " simulate --network " + net + " --refinement builtin:identity --out " + sim).c_str()) == 0);
  CHECK(Json::parse(run("finner --network " + net + " --distribution " + sim).out).contains("holds"));

  const std::string search = (dir / "search.json").string();
  CHECK(std::system((kTool + " search --network " + net + " --iters 3 --restarts 1 --out " + search + " 2>/dev/null")
                        .c_str()) == 0);
  CHECK(run("certify --network " + net + " --refinement " + search).code == 0);
}
