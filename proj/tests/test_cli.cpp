#include "dimgrp/cli.hpp"
#include "dimgrp/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

using dimgrp::cli::run_cli;
namespace fs = std::filesystem;
namespace io = dimgrp::io;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dimgrp_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

// Built once per test binary.
const fs::path& dyadic_bundle() {
  static const fs::path path = [] {
    const fs::path p = scratch("dyadic.json");
    REQUIRE(run({"build", "--gen", "2", "--depth", "4", "--seed", "7", "-o", p.string()}).code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("cli subgroup queries") {
  CHECK(run({"subgroup", "--gen", "2/3", "--contains", "4/9"}).out == "contains 4/9: true\n");
  CHECK(run({"subgroup", "--gen", "2", "--equiv", "3", "6"}).out == "equiv 3 6: true\n");
  CHECK(run({"subgroup", "--contains", "1"}).out == "contains 1: true\n");
  const Run two = run({"subgroup", "--gen", "2", "--equiv", "3", "6", "--equiv", "3", "4"});
  CHECK(two.out == "equiv 3 6: true\nequiv 3 4: false\n");
  const Run json = run({"subgroup", "--gen", "2/3", "--contains", "2", "--json"});
  CHECK(io::parse_json(json.out)["answers"][0]["answer"] == false);
}

TEST_CASE("cli usage and parse errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const Run bad = run({"subgroup", "--gen", "2/x"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("1:3") != std::string::npos);
  CHECK(run({"build", "--depth", "0"}).code == 2);
  CHECK(run({"build", "--policy", "other"}).code == 2);
  CHECK(run({"verify", scratch("missing.json").string()}).code == 2);

  const fs::path broken = scratch("broken.json");
  io::write_file(broken, "{\n  \"schema_version\": 1,\n  oops\n}\n");
  const Run syntax = run({"verify", broken.string()});
  CHECK(syntax.code == 2);
  CHECK(syntax.err.find(broken.string() + ":3:") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli build is deterministic") {
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  REQUIRE(run({"build", "--gen", "2", "--depth", "4", "--seed", "7", "-o", a.string()}).code == 0);
  REQUIRE(run({"build", "--gen", "2", "--depth", "4", "--seed", "7", "-o", b.string()}).code == 0);
  CHECK(io::read_file(a) == io::read_file(b));
  CHECK(io::parse_json(io::read_file(a))["config"]["seed"] == 7);

  const Run stdout_build = run({"build", "--gen", "2", "--gen", "5/3", "--depth", "3"});
  REQUIRE(stdout_build.code == 0);
  const io::json j = io::parse_json(stdout_build.out);
  REQUIRE(j["levels"].size() == 4);
  // F_{n+1} contains F_n and every product F_n F_i with i <= n.
  std::size_t grown = 0;
  for (std::size_t n = 0; n + 1 < j["levels"].size(); ++n) {
    std::set<dimgrp::ratlattice::PosRat> next;
    for (const auto& h : j["levels"][n + 1]["F"]) next.insert(dimgrp::ratlattice::PosRat::parse(h.get<std::string>()));
    for (const auto& h : j["levels"][n]["F"]) {
      const auto g = dimgrp::ratlattice::PosRat::parse(h.get<std::string>());
      CHECK(next.contains(g));
      for (std::size_t i = 1; i <= n; ++i)
        for (const auto& term : j["enumeration"][i - 1]["terms"])
          CHECK(next.contains(g * dimgrp::ratlattice::PosRat::parse(term["h"].get<std::string>())));
    }
    grown += next.size() > j["levels"][n]["F"].size();
  }
  CHECK(grown > 0);
}

TEST_CASE("cli verify") {
  const Run ok = run({"verify", dyadic_bundle().string(), "--oracle-box", "3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("[PASS] oracle") != std::string::npos);
  CHECK(ok.out.ends_with("overall: PASS\n"));

  const fs::path report = scratch("report.json");
  const Run json = run({"verify", dyadic_bundle().string(), "--json", "-o", report.string()});
  CHECK(json.code == 0);
  CHECK(io::read_file(report) == json.out);
  CHECK(io::parse_json(json.out)["passed"] == true);
  CHECK(run({"verify", dyadic_bundle().string(), "--json"}).out == json.out);

  io::json corrupted = io::parse_json(io::read_file(dyadic_bundle()));
  auto& value = corrupted["residues"][0]["value"];
  value = value.get<long>() + 1;
  const fs::path bad = scratch("corrupted.json");
  io::write_file(bad, io::dump(corrupted));
  const Run fail = run({"verify", bad.string()});
  CHECK(fail.code == 1);
  CHECK(fail.out.find("[FAIL] reconstruction") != std::string::npos);
  CHECK(fail.out.find("reconstruction: (i=") != std::string::npos);
}

TEST_CASE("cli matrix type certificates") {
  const Run two = run({"mt", dyadic_bundle().string(), "1", "2"});
  CHECK(two.code == 0);
  CHECK(two.out.starts_with("certificate h = 2 "));
  CHECK(two.out.ends_with("valid\n"));

  const Run refused = run({"mt", dyadic_bundle().string(), "3", "4"});
  CHECK(refused.code == 0);
  CHECK(refused.out == "3/4 ∉ H\n");

  const Run same = run({"mt", dyadic_bundle().string(), "5", "5", "--json", "--matrices"});
  const io::json j = io::parse_json(same.out);
  CHECK(j["h"] == "1");
  CHECK(j["valid"] == true);
  CHECK(j["actions"][0].contains("matrix"));
  CHECK(run({"mt", dyadic_bundle().string(), "0", "5"}).code == 2);
}

TEST_CASE("cli export") {
  const Run dot = run({"export", dyadic_bundle().string(), "--dot"});
  CHECK(dot.out.find("[label=\"n=2 rank=7\"]") != std::string::npos);
  CHECK(run({"export", dyadic_bundle().string(), "--format", "dot"}).out == dot.out);

  const Run json = run({"export", dyadic_bundle().string(), "--json"});
  CHECK(json.out == io::read_file(dyadic_bundle()));

  const Run pres = run({"export", dyadic_bundle().string(), "--presentation"});
  const dimgrp::bratteli::UltramatricialPresentation p = io::presentation_from_json(io::parse_json(pres.out));
  CHECK(p.size() == 5);
  CHECK(run({"export", dyadic_bundle().string(), "--presentation", "--dot"}).out.starts_with("digraph"));
}
