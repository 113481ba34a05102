#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "topattr/cli.hpp"
#include "topattr/phase.hpp"

using namespace topattr;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "topattr");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t rows(const std::string& csv) {
  std::size_t n = 0;
  for (char c : csv) n += c == '\n';
  return n - 1;  // header
}

std::filesystem::path scratch() {
  auto p = std::filesystem::temp_directory_path() / "topattr_cli_test";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze counterexample") {
  const auto dir = scratch();
  const std::string prefix = (dir / "ce").string();
  Run r = run({"analyze", "--map", "counterexample", "--delta", "0.4", "--depth", "8", "--boxes-out", prefix});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["attractors"].size() == 1);
  CHECK(j["attractors"][0]["violations"].size() >= 1);
  CHECK(j["attractors"][0]["basin_fraction"] == 1.0);
  CHECK(j["attractors"][0]["boxes_csv_path"] == prefix + "_A1.csv");
  std::ifstream f(prefix + "_A1.csv");
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(rows(ss.str()) == 2);
  std::stringstream again(ss.str());
  CHECK(read_cover_csv(again, make_interval_space(-1, 1, {2})).size() == 2);
}

TEST_CASE("analyze octupling") {
  Run r = run({"analyze", "--map", "mtupling:8", "--delta", "0.1", "--depth", "10", "--grid", "31", "--tail", "3000"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["attractors"].size() == 1);
  CHECK(j["attractors"][0]["flags"]["transitive"] == true);
  CHECK(j["attractors"][0]["flags"]["sensitive"] == true);
}

TEST_CASE("validation and exit codes") {
  CHECK(run({"analyze", "--map", "bogus"}).code == 2);
  CHECK(run({"analyze", "--delta", "-1"}).code == 2);
  CHECK(run({"analyze", "--depth", "notanumber"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"omega", "--map", "counterexample", "--x", "1.5"}).code == 2);
  CHECK(run({"omega", "--map", "counterexample"}).code == 2);
  CHECK(run({"wordsearch", "--radius", "1e-9", "--max-len", "3"}).code == 3);
}

TEST_CASE("omega") {
  Run r = run({"omega", "--map", "counterexample", "--x", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(rows(r.out) == 2);
  r = run({"omega", "--map", "mtupling:2", "--x", "0"});
  REQUIRE(r.code == 0);
  CHECK(rows(r.out) == 1);
  r = run({"omega", "--map", "skewproduct", "--x", "0.1,0,0", "--depth", "5", "--fiber-depth", "4"});
  REQUIRE(r.code == 0);
  std::stringstream ss(r.out);
  const BoxCover c = read_cover_csv(ss, make_solid_torus_space(3.0));
  for (const Box& b : c.boxes()) {
    const bool in_d = b.lo[1] < 0.0;
    const bool at_q = b.lo[1] <= 2.0 && b.hi[1] >= 2.0 && b.lo[2] <= 0.0 && b.hi[2] >= 0.0;
    CHECK((in_d || at_q));
  }
}

TEST_CASE("ifs and wordsearch") {
  Run r = run({"ifs", "--verify"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["fiber_properties"]["all_pass"] == true);
  CHECK(j["fiber_properties"]["properties"].size() == 4);

  r = run({"wordsearch", "--center", "-1.5,0.5", "--radius", "0.2"});
  REQUIRE(r.code == 0);
  const auto w = nlohmann::json::parse(r.out);
  CHECK(w["length"].get<int>() > 0);
  CHECK(w["certificate"].get<double>() <= 0.2);

  r = run({"wordsearch", "--center", "-1.5,0.5", "--radius", "10"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["word"] == "");
}

TEST_CASE("config file with flag override") {
  const auto path = scratch() / "run.cfg";
  {
    std::ofstream f(path);
    f << "map=counterexample\ndelta=0.4\ndepth=8\ngrid=11\n";
  }
  Run a = run({"analyze", "--config", path.string()});
  REQUIRE(a.code == 0);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["map"] == "counterexample");
  CHECK(j["params"]["grid"] == 11);
  Run b = run({"analyze", "--config", path.string(), "--grid", "7"});
  REQUIRE(b.code == 0);
  CHECK(nlohmann::json::parse(b.out)["params"]["grid"] == 7);
  Run c = run({"analyze", "--config", path.string()});
  CHECK(c.out == a.out);
}

}
