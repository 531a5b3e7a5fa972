#ifndef SIE_SCENARIO_HPP
#define SIE_SCENARIO_HPP

#include <string>

#include "json.hpp"
#include "sie/physics.hpp"

namespace sie {

struct GridSpec {
  double xmin = -3, xmax = 3, ymin = -3, ymax = 3;
  int nx = 0, ny = 0;  // no grid when zero
};

// {family, params:{k|E}, segments:[[ax,ay,bx,by],...], bc, incident:{type, params}, tol, grid}
// Optional: "preset" (faraday | screens | gravity) fills segments, "zero_charge" adds the
// Faraday constraint, "id" names the run.
struct ScenarioConfig {
  std::string id = "scenario";
  ScatteringProblem problem;
  double tol = 1e-14;
  double kernel_tol = 1e-14;
  GridSpec grid;
  std::uint64_t seed = 0;
  nlohmann::json source;  // the parsed input
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

struct RunArtifacts {
  nlohmann::json report;
  ScatteringSolution solution;
};

// Solves, evaluates the grid and writes report.json, densities.json and field.csv into out_dir
// (nothing is written when out_dir is empty).
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

nlohmann::json densities_json(const ScatteringSolution& s);
CVec grid_points(const GridSpec& g);

}  // namespace sie

#endif
