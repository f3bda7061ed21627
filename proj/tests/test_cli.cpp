#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "runner.hpp"

using namespace ozawa;
using namespace ozawa::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ozawa_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ozawa");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config("{"), Error);
  CHECK_THROWS_AS(parse_config(R"({"construction": "nope"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"construction": "folner", "epsilon": 2})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"construction": "folner", "window_radius": "big"})"), Error);
  const auto c = parse_config(R"({"construction": "folner", "R": 2, "window_radius": "auto"})");
  CHECK(c.R == 2);
  CHECK_FALSE(c.window_radius.has_value());
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::Schema) == 2);
  CHECK(exit_code_for(ErrorKind::Parameter) == 2);
  CHECK(exit_code_for(ErrorKind::PlanInfeasible) == 3);
  CHECK(exit_code_for(ErrorKind::WindowTooSmall) == 3);
  CHECK(exit_code_for(ErrorKind::Numerical) == 4);
  CHECK(exit_code_for(ErrorKind::CoverViolation) == 1);

  const auto dir = scratch("codes");
  std::ofstream(dir / "bad.json") << R"({"construction": 3})";
  CHECK(invoke({"run", "--config", (dir / "bad.json").string()}) == 2);
  CHECK(invoke({"run"}) == 2);
  CHECK(invoke({"frobnicate"}) == 2);
  std::ofstream(dir / "tree.json") << R"({"construction": "tree", "R": 2, "epsilon": 1, "params": {"S": 1}})";
  CHECK(invoke({"run", "--config", (dir / "tree.json").string()}) == 2);
  std::ofstream(dir / "folner.json") << R"({"construction": "folner", "R": 1, "epsilon": 0.5})";
  CHECK(invoke({"run", "--config", (dir / "folner.json").string()}) == 0);
  CHECK(invoke({"plan", "--config", (dir / "folner.json").string()}) == 0);
  std::ofstream(dir / "bs.json") << R"({"construction": "bs", "R": 1, "epsilon": 0.5})";
  CHECK(invoke({"run", "--config", (dir / "bs.json").string()}) == 3);
}

TEST_CASE("extension run confirms the width bound") {
  const auto c = parse_config(
      R"({"construction": "extension", "R": 1, "epsilon": 0.5, "params": {"sequence": "product", "S1": 4, "S2": 4}})");
  const auto o = run(c, {});
  REQUIRE(o.report.has_value());
  CHECK(o.exit_code == 0);
  CHECK(o.report->predicted_width == 12);
  CHECK(o.report->pass_width);
  CHECK(o.report->observed_width <= 12);
  bool factorization = false;
  for (const auto& e : o.extra) factorization = factorization || (e.name == "factorization" && e.pass);
  CHECK(factorization);
}

TEST_CASE("artifacts are deterministic and verify round-trips") {
  const auto c = parse_config(
      R"({"construction": "extension", "R": 1, "epsilon": 0.5, "params": {"sequence": "dihedral", "S1": 4}})");
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto oa = run(c, {a.string(), 1, {}, {}});
  const auto ob = run(c, {b.string(), 1, {}, {}});
  CHECK(oa.exit_code == 0);
  REQUIRE(oa.artifacts == ob.artifacts);
  for (const auto& f : oa.artifacts) {
    INFO(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(verify_saved(a.string(), {}).exit_code == 0);

  // A tampered entry is caught.
  std::string csv = slurp(a / "kernel.csv");
  const auto pos = csv.find('\n', csv.find('\n') + 1);
  csv.insert(pos, "9");
  std::ofstream(a / "kernel.csv", std::ios::binary) << csv;
  CHECK(verify_saved(a.string(), {}).exit_code != 0);
}

TEST_CASE("window cap from the environment") {
  const auto c = parse_config(R"({"construction": "tree", "R": 2, "epsilon": 1, "params": {"S": 5}})");
  CHECK(run(c, {}).exit_code == 0);
  ::setenv("OZAWA_MAX_WINDOW", "10", 1);
  const auto o = run(c, {});
  ::unsetenv("OZAWA_MAX_WINDOW");
  CHECK(o.exit_code == 3);
}
