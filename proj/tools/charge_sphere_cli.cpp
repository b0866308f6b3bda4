#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csphere/equilibrium.hpp"
#include "csphere/fekete.hpp"
#include "csphere/render.hpp"
#include "csphere/serialization.hpp"
#include "csphere/verification.hpp"

namespace fs = std::filesystem;
using namespace csphere;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  unexpected error\n"
    "  2  missing or invalid input (file not found, bad JSON, unsupported topology)\n"
    "  3  solver failed to converge\n"
    "  4  map validation failed\n"
    "  5  verification checks failed\n";

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const IoError& e) {
    report_error("io", e.what());
    return 2;
  } catch (const SerializationError& e) {
    report_error("serialization", e.what());
    return 2;
  } catch (const UnsupportedTopologyError& e) {
    report_error("unsupported_topology", e.what());
    return 2;
  } catch (const NoConvergenceError& e) {
    std::cerr << json{{"error", "no_convergence"},
                      {"message", e.what()},
                      {"final_residual", e.final_residual()}}
                     .dump()
              << "\n";
    return 3;
  } catch (const InvalidResultError& e) {
    report_error("invalid_result", e.what());
    return 4;
  } catch (const Error& e) {
    report_error("error", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("unexpected", e.what());
    return 1;
  }
}

void write_solution_files(const EquilibriumSolution& sol, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  save_json((out_dir / "solution.json").string(), solution_to_json(sol));
  save_text((out_dir / "boundary.csv").string(), boundary_csv(sol));
  save_text((out_dir / "figure_plane.svg").string(), figure_plane_svg(sol));
  save_text((out_dir / "figure_sphere.svg").string(), figure_sphere_svg(sol));
}

int cmd_solve(const std::string& input, const std::string& out_dir, int quad_order) {
  const ChargeConfig cfg = charges_from_json(load_json(input));
  EquilibriumSolution sol = solve(cfg);
  if (sol.regime != Regime::Uniform) {
    VerifyOptions vo;
    vo.quad_radial = quad_order;
    vo.quad_angular = 2 * quad_order;
    sol.frostman_constant = frostman_residual(sol, vo).mean;
  }
  write_solution_files(sol, out_dir);
  std::cout << "regime: " << regime_name(sol.regime) << "\n"
            << "caps: " << sol.caps.size() << "  components: " << sol.components.size() << "\n";
  for (const auto& c : sol.components) {
    std::cout << "component fit residual " << c.fit_residual << ", map terms:";
    for (const auto& t : c.map.terms()) std::cout << " (A=" << t.A << ", C=" << t.C << ")";
    std::cout << "\n";
  }
  if (!std::isnan(sol.frostman_constant)) {
    std::cout << "frostman constant (mean residual): " << sol.frostman_constant << "\n";
  }
  return 0;
}

int cmd_analyze_map(const std::string& input, const std::string& out_dir, int quad_order) {
  const RationalMapD m = map_from_json(load_json(input));
  const ValidityReport rep = validate_map(m);
  if (!rep.valid) {
    std::string diag = rep.detail;
    if (rep.failing_check == "pole_inside_disc") diag = "pole inside unit disc: " + rep.detail;
    report_error("validate_map:" + rep.failing_check, diag);
    return 4;
  }
  const QuadratureDataD planar = planar_quadrature_data(m);
  const QuadratureDataD spherical = spherical_quadrature_data(m);
  const ChargeConfig derived = charges_from_map(m);

  EquilibriumSolution sol;
  sol.regime = Regime::Merged;
  sol.cfg = derived;
  SolvedComponent sc;
  for (int i = 0; i < static_cast<int>(derived.size()); ++i) sc.indices.push_back(i);
  sc.t_reduced = 1.0;
  sc.map = m;
  sc.planar = planar;
  sc.spherical = spherical;
  sol.components.push_back(sc);

  json analysis = {{"map", map_to_json(m)},
                   {"planar", quadrature_to_json(planar)},
                   {"spherical", quadrature_to_json(spherical)},
                   {"charges", charges_to_json(derived).at("charges")},
                   {"q", derived.q()}};
  if (m.order() == 1) {
    const auto& t = m.terms()[0];
    analysis["disc"] = {{"center", t.A * t.C / (t.C * t.C - 1.0)},
                        {"radius", std::abs(t.A) / (t.C * t.C - 1.0)}};
  }
  {
    DiscRuleD rule(quad_order, 2 * quad_order);
    analysis["area"] = mapped_area(m, rule);
    analysis["sigma_mass"] = mapped_sigma_mass(m, rule);
  }
  fs::create_directories(out_dir);
  save_json((fs::path(out_dir) / "analysis.json").string(), analysis);
  write_solution_files(sol, out_dir);
  std::cout << analysis.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& input, const std::string& out_dir, int quad_order,
               double tol) {
  const EquilibriumSolution sol = solution_from_json(load_json(input));
  VerifyOptions vo;
  vo.quad_radial = quad_order;
  vo.quad_angular = 2 * quad_order;
  json report;
  bool pass = true;

  if (sol.regime == Regime::Uniform) {
    report["frostman"] = nullptr;
  } else {
    const FrostmanReport fr = frostman_residual(sol, vo);
    const bool ok = fr.std_dev < tol;
    pass = pass && ok;
    report["frostman"] = frostman_report_to_json(fr);
    report["frostman"]["pass"] = ok;
    std::cout << "frostman: mean " << fr.mean << "  std " << fr.std_dev << "  max_dev "
              << fr.max_dev << "  " << (ok ? "ok" : "FAIL") << "\n";
  }

  json f3 = json::array();
  for (std::size_t c = 0; c < sol.components.size(); ++c) {
    double extent = 0;
    for (const auto& w : boundary_trace(sol.components[c].map, 512)) {
      extent = std::max(extent, std::abs(w));
    }
    const double radius = extent + 1.0;
    for (int k = 0; k < 20; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 20.0;
      const PlanePointD z(radius * std::cos(th), radius * std::sin(th));
      const double resid = f3_boundary_check(sol, c, z);
      const bool ok = resid < 1e-8;
      pass = pass && ok;
      f3.push_back({{"component", c},
                    {"z", {z.real(), z.imag()}},
                    {"residual", resid},
                    {"pass", ok}});
    }
    std::cout << "f3 component " << c << ": 20 exterior points checked\n";
  }
  report["f3"] = f3;

  json quad = json::array();
  DiscRuleD rule(quad_order, 2 * quad_order);
  for (std::size_t c = 0; c < sol.components.size(); ++c) {
    for (const auto& chk : quadrature_identity_suite(sol.components[c].map, rule)) {
      const bool ok = chk.error < 1e-8;
      pass = pass && ok;
      quad.push_back(
          {{"component", c}, {"identity", chk.label}, {"error", chk.error}, {"pass", ok}});
      std::cout << "quadrature [" << chk.label << "]: " << chk.error << "  "
                << (ok ? "ok" : "FAIL") << "\n";
    }
  }
  report["quadrature"] = quad;
  report["pass"] = pass;

  fs::create_directories(out_dir);
  save_json((fs::path(out_dir) / "report.json").string(), report);
  std::cout << (pass ? "verify: all checks passed" : "verify: FAILED") << "\n";
  return pass ? 0 : 5;
}

int cmd_fekete(const std::string& input, const std::string& out_dir, int n_particles,
               int iterations, std::uint64_t seed) {
  const ChargeConfig cfg = charges_from_json(load_json(input));
  ParticleSystem sys = init_particles(n_particles, cfg, seed);
  MinimizeOptions mo;
  mo.iterations = iterations;
  sys = minimize(sys, mo);

  fs::create_directories(out_dir);
  std::ostringstream csv;
  csv.precision(15);
  csv << "x,y,z\n";
  for (const auto& p : sys.positions) {
    csv << p.x() << "," << p.y() << "," << p.z() << "\n";
  }
  save_text((fs::path(out_dir) / "fekete.csv").string(), csv.str());

  json summary = {{"n", n_particles},
                  {"iterations", iterations},
                  {"seed", seed},
                  {"energy", energy(sys)}};
  if (cfg.size() == 0) {
    summary["cap_discrepancy"] = cap_discrepancy(sys.positions, 100, seed + 1);
    summary["exclusion_fraction"] = nullptr;
  } else {
    try {
      const EquilibriumSolution sol = solve(cfg);
      summary["exclusion_fraction"] = exclusion_fraction(sys, sol, 0.05);
    } catch (const Error& e) {
      summary["exclusion_fraction"] = nullptr;
      summary["solve_error"] = e.what();
    }
  }
  save_json((fs::path(out_dir) / "fekete.json").string(), summary);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& out_dir) {
  const EquilibriumSolution sol = solution_from_json(load_json(input));
  fs::create_directories(out_dir);
  save_text((fs::path(out_dir) / "boundary.csv").string(), boundary_csv(sol));
  save_text((fs::path(out_dir) / "figure_plane.svg").string(), figure_plane_svg(sol));
  save_text((fs::path(out_dir) / "figure_sphere.svg").string(), figure_sphere_svg(sol));
  std::cout << "wrote boundary.csv, figure_plane.svg, figure_sphere.svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "charge-sphere: equilibrium-measure supports on the unit sphere under point-charge "
      "fields, via planar quadrature domains"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string input, out_dir = ".";
  int quad_order = 128;
  int n_particles = 1000;
  int iterations = 20000;
  std::uint64_t seed = 1;
  double tol = 1e-6;

  auto add_common = [&](CLI::App* cmd, bool with_quad) {
    cmd->add_option("--input", input, "input JSON file")->required();
    cmd->add_option("--out-dir", out_dir, "output directory (default .)");
    if (with_quad) {
      cmd->add_option("--quad-order", quad_order,
                      "radial quadrature order; angular order is twice this (default 128)");
    }
  };

  auto* c_solve = app.add_subcommand(
      "solve", "charge config JSON -> solution.json, boundary.csv, figures");
  add_common(c_solve, true);

  auto* c_map = app.add_subcommand(
      "analyze-map", "map JSON -> quadrature data, derived charges, figures");
  add_common(c_map, true);

  auto* c_verify = app.add_subcommand(
      "verify", "solution.json -> report.json; exit 5 if any identity check fails");
  add_common(c_verify, true);
  c_verify->add_option("--tol", tol, "Frostman residual std threshold (default 1e-6)");

  auto* c_fekete = app.add_subcommand(
      "fekete", "charge config JSON -> minimized particle positions CSV + summary");
  add_common(c_fekete, false);
  c_fekete->add_option("--n-particles", n_particles, "particle count (default 1000)");
  c_fekete->add_option("--iterations", iterations, "gradient iterations (default 20000)");
  c_fekete->add_option("--seed", seed, "RNG seed (default 1)");

  auto* c_render = app.add_subcommand("render", "solution.json -> figures + boundary.csv");
  add_common(c_render, false);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(c_solve)) {
    return guarded([&] { return cmd_solve(input, out_dir, quad_order); });
  }
  if (app.got_subcommand(c_map)) {
    return guarded([&] { return cmd_analyze_map(input, out_dir, quad_order); });
  }
  if (app.got_subcommand(c_verify)) {
    return guarded([&] { return cmd_verify(input, out_dir, quad_order, tol); });
  }
  if (app.got_subcommand(c_fekete)) {
    return guarded([&] { return cmd_fekete(input, out_dir, n_particles, iterations, seed); });
  }
  return guarded([&] { return cmd_render(input, out_dir); });
}
