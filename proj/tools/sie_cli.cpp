#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sie/fieldeval.hpp"
#include "sie/infqr.hpp"
#include "sie/opalg.hpp"
#include "sie/physics.hpp"
#include "sie/scenario.hpp"
#include "sie/sio.hpp"

using namespace sie;
using nlohmann::json;

namespace {

struct Overrides {
  std::string out;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::vector<int> grid;
};

void apply(json& cfg, const Overrides& o) {
  if (o.tol) cfg["tol"] = *o.tol;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.grid.size() == 2) {
    if (!cfg.contains("grid")) cfg["grid"] = json::object();
    cfg["grid"]["nx"] = o.grid[0];
    cfg["grid"]["ny"] = o.grid[1];
  }
}

int run_config(const json& cfg, const Overrides& o) {
  json c = cfg;
  apply(c, o);
  auto art = run_scenario(parse_scenario(c), o.out);
  std::cout << art.report.dump(2) << '\n';
  return 0;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--out", o.out, "output directory for report.json, densities.json and field.csv");
  app->add_option("--tol", o.tol, "solver tolerance");
  app->add_option("--seed", o.seed, "seed for the boundary check points");
  app->add_option("--grid", o.grid, "field grid size NX NY")->expected(2);
}

// eps (eps + x^2) u'' = x u, u(-1) = 1, u(1) = 0
int ode_demo(double eps, const Overrides& o) {
  double tol = o.tol.value_or(std::numeric_limits<double>::epsilon());
  CoeffExpansion a2(Basis::T(), {eps * eps + 0.5 * eps, 0.0, 0.5 * eps});
  CoeffExpansion a1(Basis::T(), {0.0});
  CoeffExpansion a0(Basis::T(), {0.0, -1.0});
  auto sys = assemble_ode({a0, a1, a2},
                          {boundary_functional(FunctionalKind::eval_left, Basis::T()),
                           boundary_functional(FunctionalKind::eval_right, Basis::T())},
                          {1.0, 0.0}, CoeffExpansion(Basis::T(), {0.0}));
  auto t0 = std::chrono::steady_clock::now();
  SolveInfo info;
  auto u = adaptive_qr_solve(sys, tol, &info);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json r = {{"id", "ode-demo"},   {"eps", eps},           {"tol", tol},
            {"degree", info.n},   {"qr_tail", info.tail}, {"rhs_norm", info.rhs_norm},
            {"adaptive_qr", secs}, {"u0", {u(0.0).real(), u(0.0).imag()}}};
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    std::ofstream(o.out + "/report.json") << r.dump(2) << '\n';
    std::ofstream(o.out + "/densities.json") << json::array({to_json(u)}).dump(1) << '\n';
    if (o.grid.size() == 2 && o.grid[0] > 0) {
      std::ofstream f(o.out + "/solution.csv");
      f << "x,re_u,im_u\n";
      for (int i = 0; i < o.grid[0]; ++i) {
        double x = o.grid[0] == 1 ? 0.0 : -1.0 + 2.0 * i / double(o.grid[0] - 1);
        cplx v = u(x);
        f << x << ',' << v.real() << ',' << v.imag() << '\n';
      }
    }
  }
  std::cout << r.dump(2) << '\n';
  return 0;
}

int selftest() {
  int passed = 0, failed = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "pass " : "FAIL ") << name << '\n';
    (ok ? passed : failed)++;
  };
  auto section_max = [](const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); };

  {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      cplx z = std::polar(0.1 + 0.02 * i, 0.7 * i);
      worst = std::max(worst, std::abs(joukowsky(joukowsky_inv_plus(z)) - z));
    }
    check("joukowsky round trip", worst < 1e-13);
  }
  {
    auto dl = op_compose(derivative_op(1), log_op(Basis::WT()));
    check("derivative of log transform", section_max(dl.section(40, 40) + hilbert_op(Basis::WT()).section(40, 40)) < 1e-12);
  }
  {
    auto ld = op_compose(op_scale(-0.5, log_op(Basis::WT())), dirichlet_preconditioner());
    auto hn = op_compose(op_scale(0.5, hadamard_op(Basis::WU())), neumann_preconditioner());
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(40, 40);
    check("preconditioners", section_max(ld.section(40, 40) - id) < 1e-13 && section_max(hn.section(40, 40) - id) < 1e-13);
  }
  {
    // jump of the Cauchy transform of sqrt(1 - x^2)
    double x = 0.3, e = 1e-7;
    cplx jump = cauchy_WU({1.0}, cplx(x, e)) - cauchy_WU({1.0}, cplx(x, -e));
    check("Plemelj jump", std::abs(jump - std::sqrt(1 - x * x)) < 1e-6);
  }
  {
    auto f = adaptive_fit([](cplx x) { return std::exp(x); }, 1e-15);
    check("exp fit length", f.size() >= 13 && f.size() <= 17);
  }
  {
    ScatteringProblem p;
    p.segments = {Segment()};
    p.incident.u = [](cplx x) { return cplx(-0.25 * (2 * x.real() * x.real() - 1)); };
    auto s = solve_scattering(p);
    check("laplace segment density", std::abs(s.densities[0].coeff(2) + 1.0) < 1e-13);
  }
  {
    cplx a = gravity_riemann_uv(cplx(0.5, 0.2), 0.7, 2.0), b = gravity_riemann_bromwich(cplx(0.5, 0.2), 0.7, 2.0);
    check("riemann series and contour", std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
  }
  {
    auto s = solve_faraday(faraday_plates(4, 0.1, true), cplx(2.0, 0.0));
    check("faraday forward error", faraday_forward_error(s) < 1e-12 && s.charge < 1e-12);
  }
  std::cout << "selftest: " << passed << " passed, " << failed << " failed\n";
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for singular integral equations on segments"};
  app.require_subcommand(1);
  Overrides o;

  std::string config;
  auto* run = app.add_subcommand("run", "solve the scenario in a JSON config");
  run->add_option("--config", config, "scenario JSON")->required();
  add_common(run, o);

  int plates = 10;
  double radius = 0.1;
  std::vector<double> source{2.0, 0.0};
  auto* far = app.add_subcommand("faraday", "Laplace Faraday cage");
  far->add_option("--config", config, "scenario JSON overriding the defaults");
  far->add_option("--plates", plates, "number of plates");
  far->add_option("--radius", radius, "plate radius");
  far->add_option("--source", source, "source point X Y")->expected(2);
  add_common(far, o);

  double k = 20.0;
  std::string bc = "neumann";
  auto* helm = app.add_subcommand("helmholtz", "plane wave scattered by screens");
  helm->add_option("--config", config, "scenario JSON overriding the defaults");
  helm->add_option("--k", k, "wavenumber");
  helm->add_option("--bc", bc, "dirichlet or neumann");
  add_common(helm, o);

  double E = 20.0;
  auto* grav = app.add_subcommand("gravity", "point source in a gravity Helmholtz medium");
  grav->add_option("--config", config, "scenario JSON overriding the defaults");
  grav->add_option("--E", E, "energy");
  add_common(grav, o);

  double eps = 1e-2;
  auto* ode = app.add_subcommand("ode-demo", "boundary-layer ODE eps (eps + x^2) u'' = x u");
  ode->add_option("--eps", eps, "small parameter");
  add_common(ode, o);

  auto* self = app.add_subcommand("selftest", "run built-in consistency checks");

  CLI11_PARSE(app, argc, argv);

  try {
    auto base = [&](json defaults) {
      if (config.empty()) return defaults;
      json user = load_scenario(config).source;
      defaults.merge_patch(user);
      return defaults;
    };
    if (run->parsed()) return run_config(load_scenario(config).source, o);
    if (far->parsed()) {
      json d = {{"id", "faraday"},
                {"family", "laplace"},
                {"preset", "faraday"},
                {"params", {{"n", plates}, {"r", radius}}},
                {"zero_charge", true},
                {"incident", {{"type", "log"}, {"source", source}}}};
      return run_config(base(d), o);
    }
    if (helm->parsed()) {
      json d = {{"id", "helmholtz"},
                {"family", "helmholtz"},
                {"preset", "screens"},
                {"params", {{"k", k}}},
                {"bc", bc},
                {"incident", {{"type", "plane"}, {"direction", {1.0, -1.0}}}}};
      return run_config(base(d), o);
    }
    if (grav->parsed()) {
      json d = {{"id", "gravity"},
                {"family", "gravity"},
                {"preset", "gravity"},
                {"params", {{"E", E}}},
                {"incident", {{"type", "point"}, {"source", {0.0, 2.0}}}}};
      return run_config(base(d), o);
    }
    if (ode->parsed()) return ode_demo(eps, o);
    if (self->parsed()) return selftest();
  } catch (const ResolutionFailure& e) {
    std::cerr << "resolution failure: " << e.what() << " (tail " << e.tail_estimate() << ")\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::resolution_failure) return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
