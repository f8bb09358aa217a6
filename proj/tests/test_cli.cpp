#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = lmd::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lmd_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("distance of the textbook pair") {
  const Run r = invoke({"distance", "x1^2*x2*x3^2*x4", "x1*x2^2*x3*x5*x6"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["distances"][0][1] == 3);
  CHECK(j["distances"][1][0] == 3);
}

TEST_CASE("distance tables") {
  const Run same = invoke({"distance", "x1*x2", "x1*x2"});
  CHECK(json::parse(same.out)["distances"][0][1] == 0);

  const Run three = invoke({"distance", "a^2*b", "b*c", "a*c^3"});
  const json d = json::parse(three.out)["distances"];
  REQUIRE(d.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(d[i][i] == 0);
    for (int k = 0; k < 3; ++k) CHECK(d[i][k] == d[k][i]);
  }

  const Run csv = invoke({"distance", "--format", "csv", "x1", "x2"});
  CHECK(csv.out == "monomial,x1,x2\nx1,0,1\nx2,1,0\n");
}

TEST_CASE("distance from a polynomial file with an explicit order") {
  const fs::path p = scratch("polys.txt");
  std::ofstream(p) << "x2*x3 + 2*x1\n\nx3^2\n";
  const Run r = invoke({"distance", "--poly-file", p.string(), "--vars", "x1,x2,x3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["monomials"] == json::array({"x1", "x2*x3", "x3^2"}));
}

TEST_CASE("parse errors are positional and exit 2") {
  const Run r = invoke({"distance", "--vars", "x1,x2", "x1*", "x2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("offset 3") != std::string::npos);
  const Run unknown = invoke({"distance", "--vars", "x1", "x9"});
  CHECK(unknown.code == 2);
}

TEST_CASE("design family report") {
  const Run r = invoke({"nw", "--n", "5", "--k", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["count"] == 25);
  CHECK(j["min_pairwise_distance"] >= 1);
  CHECK(j["single_monomial_derivatives"] == true);

  const Run bad = invoke({"nw", "--n", "4", "--k", "1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("not prime") != std::string::npos);
}

TEST_CASE("restricted IMM family report") {
  const Run r = invoke({"imm-lm", "--n", "16", "--k", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["count"] == 169);
  CHECK(j["min_pairwise_distance"] >= 4);
  CHECK(invoke({"imm-lm", "--n", "10", "--k", "1"}).code == 2);
  const Run imm = invoke({"imm", "--n", "3", "--d", "3"});
  CHECK(json::parse(imm.out)["count"] == 9);
}

TEST_CASE("randomized suites are seeded and byte-identical") {
  const Run a = invoke({"lemma3", "--trials", "20", "--seed", "7"});
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  CHECK(j["passed"] == 20);
  CHECK(j["failed"] == 0);
  CHECK(invoke({"lemma3", "--trials", "20", "--seed", "7"}).out == a.out);
  CHECK(invoke({"lemma3", "--trials", "20", "--seed", "8"}).out != a.out);

  for (const char* suite : {"prop7", "lemma9"}) {
    const Run x = invoke({suite, "--trials", "10", "--seed", "3"});
    CHECK(x.code == 0);
    CHECK(invoke({suite, "--trials", "10", "--seed", "3"}).out == x.out);
  }

  const Run csv = invoke({"lemma3", "--trials", "3", "--format", "csv"});
  CHECK(csv.out.rfind("trial,n_vars,s,ell,d,exact,bound,ok,monomials\n", 0) == 0);
}

TEST_CASE("explicit instances") {
  const Run p7 = invoke({"prop7", "--poly", "x1*x2", "--k", "1", "--ell", "1"});
  REQUIRE(p7.code == 0);
  const json r = json::parse(p7.out)["results"][0];
  CHECK(r["dimension"] == 5);
  CHECK(r["lm_count"] == "5");

  const Run l3 = invoke({"lemma3", "x1^2", "x2^2", "--ell", "2", "--d", "2"});
  const json q = json::parse(l3.out)["results"][0];
  CHECK(q["exact"] == "11");
  CHECK(q["bound"] == "8");

  // pair closer than d
  CHECK(invoke({"lemma3", "x1^2", "x1*x2", "--ell", "2", "--d", "2"}).code == 2);

  const Run l9 = invoke({"lemma9", "--top", "3", "--fanin", "2", "--k", "0", "--t", "2", "--n-vars", "4", "--ell", "0"});
  CHECK(json::parse(l9.out)["bound"] == "3");
}

TEST_CASE("bound sweeps") {
  const Run empty = invoke({"bounds", "--grid", ""});
  CHECK(empty.code == 0);
  CHECK(std::count(empty.out.begin(), empty.out.end(), '\n') == 1);

  for (const char* preset : {"nw", "imm", "custom"}) {
    const Run r = invoke({"bounds", "--preset", preset, "--grid", "100,10000"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
  }

  const Run infeasible = invoke({"bounds", "--preset", "nw", "--grid", "1000", "--epsilon", "0.2", "--format", "json"});
  REQUIRE(infeasible.code == 0);
  CHECK(json::parse(infeasible.out)[0]["feasible"] == false);

  CHECK(invoke({"bounds", "--preset", "other"}).code == 2);
  CHECK(invoke({"bounds", "--grid", "12x"}).code == 2);
}

TEST_CASE("witness construction and replay") {
  const Run r = invoke({"witness", "--n", "4", "--d", "5", "--verify"});
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out)["report"];
  CHECK(rep["pass"] == true);
  CHECK(rep["rank_mod_p"] >= 15);

  const Run two = invoke({"witness", "--n", "2", "--d", "2", "--verify", "--exact-rank"});
  const json r2 = json::parse(two.out)["report"];
  CHECK(r2["rank_mod_p"] == 4);
  CHECK(r2["rank_exact"] == 4);

  const fs::path file = scratch("witness.json");
  REQUIRE(invoke({"witness", "--n", "3", "--d", "4", "--verify", "--out", file.string()}).code == 0);
  std::ifstream in(file);
  const std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Run replay = invoke({"witness", "--in", file.string()});
  CHECK(replay.code == 0);
  CHECK(replay.out == saved);

  // tampered file fails with exit 1
  json doc = json::parse(saved);
  for (auto& a : doc["witness"]["assignments"]) {
    if (a["t"] == 1 && a["i"] == 1 && a["j"] == 1) a["value"] = 5;
  }
  const fs::path bad = scratch("tampered.json");
  std::ofstream(bad) << doc.dump();
  const Run failed = invoke({"witness", "--in", bad.string()});
  CHECK(failed.code == 1);
  CHECK(json::parse(failed.out)["report"]["zero_ok"] == false);
}

TEST_CASE("Hessian subcommands") {
  const Run d2 = invoke({"det-hessian", "--m", "2"});
  CHECK(json::parse(d2.out)["rank"] == 4);
  const Run d5 = invoke({"det-hessian", "--m", "5", "--exact-rank"});
  CHECK(json::parse(d5.out)["pattern_violations"] == 0);
  CHECK(d5.code == 0);
  CHECK(invoke({"det-hessian", "--m", "9"}).code == 2);
  const Run cmp = invoke({"compare", "--n", "2", "--d", "3"});
  CHECK(json::parse(cmp.out)["m"] == 5);
  CHECK(cmp.code == 0);
}

TEST_CASE("factorial ratio calibration") {
  const Run r = invoke({"lemma1", "--grid", "100,10000"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["pass"] == true);
}

TEST_CASE("environment overrides mirror flags") {
  const std::string flag = invoke({"lemma3", "--trials", "5", "--seed", "99"}).out;
  ::setenv("LMD_SEED", "99", 1);
  const std::string env = invoke({"lemma3", "--trials", "5"}).out;
  ::unsetenv("LMD_SEED");
  CHECK(env == flag);
}

TEST_CASE("help and usage") {
  const Run help = invoke({"--help"});
  CHECK(help.code == 0);
  for (const char* word : {"--seed", "--budget-cells", "--format", "--out", "--exact-rank", "--prime", "LMD_SEED"}) {
    CHECK(help.out.find(word) != std::string::npos);
  }
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"nw", "--n", "5", "--k", "1", "--format", "csv"}).code == 2);
  CHECK(invoke({"nw", "--n", "7", "--k", "2", "--budget-cells", "10"}).code == 2);
  CHECK(invoke({"witness", "--verify", "--prime", "15"}).code == 2);
}
