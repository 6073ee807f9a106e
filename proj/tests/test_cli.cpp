#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vkplate/cli.hpp"

using namespace vkplate;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vkplate_test_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is);
}

}  // namespace

TEST_CASE("config text parses keys, comments and lambda multiples") {
  RunConfig rc;
  parse_config_text(rc, "# plate\nsigma = 0.3\nk=0.5  # cables\n\nlam = 1.05*lambda1\nseed = 42\n");
  CHECK(rc.plate.sigma == 0.3);
  CHECK(rc.plate.k == 0.5);
  CHECK(rc.solver.seed == 42u);
  const PlateConfig p = effective_plate(rc);
  CHECK(p.lambda == doctest::Approx(1.05 * lambda1_value(p)).epsilon(1e-14));
  CHECK(resolve_lambda("lambda1", p) == doctest::Approx(lambda1_value(p)).epsilon(1e-15));
  CHECK(resolve_lambda("0.25", p) == 0.25);
}

TEST_CASE("malformed configuration is a ConfigError") {
  RunConfig rc;
  CHECK_THROWS_AS(set_config_value(rc, "nope", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(rc, "sigma", "abc"), ConfigError);
  CHECK_THROWS_AS(set_config_value(rc, "M", "2.5"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(rc, "sigma 0.3\n"), ConfigError);
  CHECK_FALSE(config_keys().empty());
}

TEST_CASE("invalid physics maps to exit code 2") {
  RunConfig rc;
  set_config_value(rc, "sigma", "0.6");
  rc.out = scratch("bad").string();
  std::ostringstream log, err;
  CHECK(run_command("solve", rc, log, err) == kExitConfigError);
  CHECK(err.str().find("sigma") != std::string::npos);
  CHECK(run_command("frobnicate", RunConfig{}, log, err) == kExitConfigError);
}

TEST_CASE("spectrum output grows monotonically with lam_max") {
  RunConfig rc;
  std::ostringstream log, err;
  rc.out = scratch("spec_a").string();
  rc.lam_max = 10.0;
  REQUIRE(run_command("spectrum", rc, log, err) == kExitOk);
  const auto a = read_json(fs::path(rc.out) / "spectrum.json")["modes"];
  rc.out = scratch("spec_b").string();
  rc.lam_max = 40.0;
  REQUIRE(run_command("spectrum", rc, log, err) == kExitOk);
  const auto b = read_json(fs::path(rc.out) / "spectrum.json")["modes"];
  REQUIRE(b.size() > a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i]["lambda"] == b[i]["lambda"]);
  CHECK(fs::exists(fs::path(rc.out) / "modes.csv"));
  CHECK(fs::exists(fs::path(rc.out) / "modes.csv.meta.json"));
}

TEST_CASE("solve is deterministic for a fixed seed") {
  RunConfig rc;
  rc.M = 6;
  rc.N = 32;
  rc.lam = "0.965";
  rc.solver.n_starts = 4;
  std::ostringstream log, err;
  rc.out = scratch("det_a").string();
  REQUIRE(run_command("solve", rc, log, err) == kExitOk);
  auto a = read_json(fs::path(rc.out) / "equilibria.json");
  rc.out = scratch("det_b").string();
  REQUIRE(run_command("solve", rc, log, err) == kExitOk);
  auto b = read_json(fs::path(rc.out) / "equilibria.json");
  CHECK(a["solutions"] == b["solutions"]);
  CHECK(a["solutions"].size() == 3);
  CHECK(a["metadata"]["seed"] == rc.solver.seed);
  CHECK(fs::exists(fs::path(rc.out) / "u_0.csv.meta.json"));
}

TEST_CASE("sweep writes branches and bifurcations") {
  RunConfig rc;
  rc.M = 6;
  rc.N = 32;
  rc.lam_from = "0.95";
  rc.lam_to = "0.98";
  rc.steps = 4;
  rc.solver.n_starts = 3;
  rc.out = scratch("sweep").string();
  std::ostringstream log, err;
  REQUIRE(run_command("sweep", rc, log, err) == kExitOk);
  const auto j = read_json(fs::path(rc.out) / "bifurcations.json");
  CHECK_FALSE(j["bifurcations"].empty());
  std::ifstream csv(fs::path(rc.out) / "branches.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "lambda,branch,parent,energy,amplitude,norm_star,residual,stability");
}

TEST_CASE("verify runs a single suite") {
  RunConfig rc;
  rc.only = "lambda1";
  std::ostringstream log, err;
  CHECK(run_command("verify", rc, log, err) == kExitOk);
  CHECK(log.str().rfind("PASS", 0) == 0);
  rc.only = "nonsense";
  CHECK(run_command("verify", rc, log, err) == kExitConfigError);
}

TEST_CASE("sweep below lambda1 keeps the single trivial branch") {
  RunConfig rc;
  rc.M = 6;
  rc.N = 32;
  rc.lam_from = "0.2";
  rc.lam_to = "0.9";
  rc.steps = 3;
  rc.solver.n_starts = 3;
  rc.out = scratch("sweep_low").string();
  std::ostringstream log, err;
  REQUIRE(run_command("sweep", rc, log, err) == kExitOk);
  CHECK(read_json(fs::path(rc.out) / "bifurcations.json")["bifurcations"].empty());
  std::ifstream csv(fs::path(rc.out) / "branches.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.rfind(",0,,0,0,0,0,STABLE") != std::string::npos);
  }
  CHECK(rows == rc.steps);
}
