#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string("SIE_MAX_N=8192 ") + SIE_CLI_PATH + " " + args + " > /dev/null 2>&1";
  int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("sie_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* faraday_config = R"({
  "id": "cage", "family": "laplace", "preset": "faraday",
  "params": {"n": 4, "r": 0.1}, "zero_charge": true,
  "incident": {"type": "log", "source": [2.0, 0.5]},
  "tol": 1e-14, "grid": {"nx": 5, "ny": 4}
})";

}  // namespace

TEST_CASE("malformed JSON is a config error") {
  auto d = scratch("bad");
  write(d / "bad.json", "{ \"family\": ");
  CHECK(run("run --config " + (d / "bad.json").string()) == 1);
  write(d / "nofam.json", R"({"family": "maxwell", "segments": [[0,0,1,0]], "incident": {"type": "log", "source": [3,0]}})");
  CHECK(run("run --config " + (d / "nofam.json").string()) == 1);
  CHECK(run("run --config " + (d / "missing.json").string()) == 1);
}

TEST_CASE("unattainable tolerance is a resolution failure") {
  auto d = scratch("tol");
  write(d / "c.json", faraday_config);
  CHECK(run("run --config " + (d / "c.json").string() + " --tol 1e-30") == 2);
}

TEST_CASE("Faraday run writes the artifacts") {
  auto d = scratch("run");
  write(d / "c.json", faraday_config);
  REQUIRE(run("run --config " + (d / "c.json").string() + " --out " + (d / "out").string()) == 0);
  auto r = nlohmann::json::parse(slurp(d / "out" / "report.json"));
  for (const char* key : {"id", "family", "bc", "segments", "tol", "dof", "dof_per_segment", "timings", "residuals", "u0", "grid"})
    CHECK(r.contains(key));
  for (const char* key : {"kernel_assembly", "adaptive_qr", "evaluation_per_target"}) {
    REQUIRE(r["timings"].contains(key));
    CHECK(r["timings"][key].get<double>() >= 0.0);
  }
  for (const char* key : {"coefficient", "boundary", "qr_tail", "rhs_norm", "charge"}) CHECK(r["residuals"].contains(key));
  CHECK(r["dof"].get<long>() > 0);
  CHECK(r["id"] == "cage");

  auto csv = slurp(d / "out" / "field.csv");
  CHECK(csv.rfind("re_z,im_z,re_u,im_u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  auto dens = nlohmann::json::parse(slurp(d / "out" / "densities.json"));
  CHECK(dens.size() == 4);
  CHECK(dens[0].contains("basis"));
}

TEST_CASE("property: identical config and seed give identical dumps") {
  auto d = scratch("det");
  write(d / "c.json", faraday_config);
  REQUIRE(run("run --config " + (d / "c.json").string() + " --seed 7 --out " + (d / "a").string()) == 0);
  REQUIRE(run("run --config " + (d / "c.json").string() + " --seed 7 --out " + (d / "b").string()) == 0);
  CHECK(slurp(d / "a" / "densities.json") == slurp(d / "b" / "densities.json"));
  CHECK(slurp(d / "a" / "field.csv") == slurp(d / "b" / "field.csv"));
}

TEST_CASE("subcommands") {
  auto d = scratch("sub");
  CHECK(run("ode-demo --eps 1e-2 --out " + (d / "ode").string()) == 0);
  auto r = nlohmann::json::parse(slurp(d / "ode" / "report.json"));
  CHECK(r["degree"].get<long>() > 0);
  CHECK(run("faraday --plates 5 --radius 0.05") == 0);
  CHECK(run("helmholtz --k 5 --bc dirichlet") == 0);
  CHECK(run("selftest") == 0);
  CHECK(run("nonsense") != 0);
}
