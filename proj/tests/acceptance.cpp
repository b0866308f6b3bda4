// Acceptance suite. Each invocation runs one criterion, prints a single
// verdict line on stdout (report lines may precede it), and exits 0 on pass.
//
//   acceptance <1..10|2x|3x|9x>
//
// 2x, 3x and 9x are companions to criteria that compare against reference
// values; they check the data relationships behind the discrepancies.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "csphere/fekete.hpp"
#include "csphere/verification.hpp"

namespace {

using namespace csphere;

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[1024];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct Clauses {
  std::vector<std::string> failures;
  std::string note;

  void require(bool ok, std::string what) {
    if (!ok) failures.push_back(std::move(what));
  }
  void budget(const Timer& t, double limit) {
    require(t.seconds() < limit, fmt("runtime %.2fs exceeds the %.0fs budget", t.seconds(), limit));
  }
};

int verdict(const std::string& tag, const Clauses& c, const Timer& t) {
  if (c.failures.empty()) {
    std::printf("[%s] PASS: %s (%.2fs)\n", tag.c_str(), c.note.c_str(), t.seconds());
    return 0;
  }
  std::string all;
  for (std::size_t i = 0; i < c.failures.size(); ++i) {
    if (i) all += "; ";
    all += c.failures[i];
  }
  std::printf("[%s] FAIL: %s (%.2fs)\n", tag.c_str(), all.c_str(), t.seconds());
  return 1;
}

RationalMapD symmetric_map() { return RationalMapD({{2.0, 2.0}, {2.0, -2.0}}); }

// Charge pair at (+-16/25, 0, -3 sqrt(41)/25); these positions are exactly
// unit vectors. The reference per-charge intensity is (41 - 3 sqrt(41))/82.
const double kRefIntensity = (41.0 - 3.0 * std::sqrt(41.0)) / 82.0;

ChargeConfig paired_config(double intensity) {
  const double z = -3.0 * std::sqrt(41.0) / 25.0;
  return ChargeConfig({{SpherePointD(16.0 / 25.0, 0.0, z), intensity},
                       {SpherePointD(-16.0 / 25.0, 0.0, z), intensity}});
}

std::vector<Charge> sorted_by_x(const ChargeConfig& cfg) {
  std::vector<Charge> ch(cfg.charges().begin(), cfg.charges().end());
  std::sort(ch.begin(), ch.end(),
            [](const Charge& a, const Charge& b) { return a.pos.x() < b.pos.x(); });
  return ch;
}

// --- c1: planar quadrature data of the symmetric two-pole map ---

int c1() {
  Timer t;
  Clauses c;
  QuadratureDataD d = planar_quadrature_data(symmetric_map());
  std::sort(d.points.begin(), d.points.end(),
            [](const auto& a, const auto& b) { return a.node.real() < b.node.real(); });
  c.require(d.points.size() == 2, fmt("expected 2 planar nodes, got %zu", d.points.size()));
  double node_err = 0, coeff_err = 0;
  if (d.points.size() == 2) {
    const double n0 = 8.0 / 15.0;
    const double c0 = 136.0 * kPi / 225.0;
    node_err = std::max(std::abs(d.points[0].node - PlanePointD(-n0, 0.0)),
                        std::abs(d.points[1].node - PlanePointD(n0, 0.0)));
    coeff_err = std::max(std::abs(d.points[0].coefficient - c0),
                         std::abs(d.points[1].coefficient - c0));
    c.require(node_err < 1e-10, fmt("node error %.2e against +-8/15", node_err));
    c.require(coeff_err < 1e-10, fmt("coefficient error %.2e against 136 pi/225", coeff_err));
  }
  c.budget(t, 1.0);
  c.note = fmt("planar nodes +-8/15 to %.1e, coefficients 136 pi/225 to %.1e", node_err, coeff_err);
  return verdict("c1", c, t);
}

// --- c2: derived charges of the symmetric map against reference values ---

int c2() {
  Timer t;
  Clauses c;
  const ChargeConfig derived = charges_from_map(symmetric_map());
  const std::vector<Charge> ch = sorted_by_x(derived);
  c.require(ch.size() == 2, fmt("expected 2 derived charges, got %zu", ch.size()));
  double pos_err = 0;
  if (ch.size() == 2) {
    const double z = -3.0 * std::sqrt(41.0) / 25.0;
    pos_err = std::max((ch[0].pos - SpherePointD(-16.0 / 25.0, 0.0, z)).norm(),
                       (ch[1].pos - SpherePointD(16.0 / 25.0, 0.0, z)).norm());
    c.require(pos_err < 1e-8, fmt("position error %.2e against (+-16/25, 0, -3 sqrt(41)/25)", pos_err));
    const double int_err =
        std::max(std::abs(ch[0].q - kRefIntensity), std::abs(ch[1].q - kRefIntensity));
    if (int_err >= 1e-8) {
      const double qt = derived.q();
      c.require(false,
                fmt("derived intensity %.8f differs from the reference value %.8f by %.2e; the "
                    "reference value equals the raw spherical coefficient of the map, and "
                    "coefficient * (1 + q_total) = %.8f with q_total = %.8f reproduces the "
                    "derived intensity exactly",
                    ch[0].q, kRefIntensity, int_err, kRefIntensity * (1.0 + qt), qt));
    }
  }
  c.budget(t, 1.0);
  c.note = fmt("positions match to %.1e and intensities match the reference value", pos_err);
  return verdict("c2", c, t);
}

// Companion: the reference intensity is the spherical coefficient before the
// intensity normalization, and rescaling it by (1 + q_total) recovers the
// derived intensity.
int c2x() {
  Timer t;
  Clauses c;
  const ChargeConfig derived = charges_from_map(symmetric_map());
  const std::vector<Charge> ch = sorted_by_x(derived);
  const double s41 = std::sqrt(41.0);
  const double z = -3.0 * s41 / 25.0;
  double pos_err = 0;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const double x = (i == 0 ? -16.0 : 16.0) / 25.0;
    pos_err = std::max(pos_err, (ch[i].pos - SpherePointD(x, 0.0, z)).norm());
  }
  c.require(pos_err < 1e-8, fmt("position error %.2e", pos_err));
  const double qt = derived.q();
  c.require(std::abs(qt - (s41 - 3.0) / 3.0) < 1e-10,
            fmt("q_total %.12f differs from (sqrt(41) - 3)/3", qt));
  double resc_err = 0;
  for (const auto& d : ch) resc_err = std::max(resc_err, std::abs(kRefIntensity * (1.0 + qt) - d.q));
  c.require(resc_err < 1e-12,
            fmt("reference value times (1 + q_total) differs from the derived intensity by %.2e",
                resc_err));
  double coeff_err = 0;
  for (const auto& p : spherical_quadrature_data(symmetric_map()).points) {
    coeff_err = std::max(coeff_err, std::abs(p.coefficient - kRefIntensity));
  }
  c.require(coeff_err < 1e-10,
            fmt("spherical coefficient differs from the reference value by %.2e", coeff_err));
  c.budget(t, 1.0);
  c.note = fmt("the reference value %.8f is the spherical coefficient itself; scaled by "
               "(1 + q_total) = %.8f it gives the derived intensity %.8f",
               kRefIntensity, 1.0 + qt, kRefIntensity * (1.0 + qt));
  return verdict("c2x", c, t);
}

// --- c3: solve on the reference charge pair ---

int c3() {
  Timer t;
  Clauses c;
  const ChargeConfig cfg = paired_config(kRefIntensity);
  const EquilibriumSolution sol = solve(cfg);
  c.require(sol.regime == Regime::Merged && sol.components.size() == 1,
            fmt("expected one merged component, got %zu", sol.components.size()));
  double data_err = 0;
  if (sol.components.size() == 1) {
    const SolvedComponent& comp = sol.components[0];

    // Input data round trip: spherical nodes against the projected charge
    // positions, coefficients times (1 + q_total) against the intensities.
    std::vector<std::pair<double, PlanePointD>> want;
    for (const auto& ch : cfg.charges()) {
      const SpherePointD local = comp.rotation * ch.pos;
      want.emplace_back(ch.q, project(local));
    }
    std::vector<std::pair<double, PlanePointD>> got;
    for (const auto& p : comp.spherical.points) {
      got.emplace_back(p.coefficient * (1.0 + cfg.q()), p.node);
    }
    auto by_re = [](const auto& a, const auto& b) { return a.second.real() < b.second.real(); };
    std::sort(want.begin(), want.end(), by_re);
    std::sort(got.begin(), got.end(), by_re);
    for (std::size_t i = 0; i < want.size() && i < got.size(); ++i) {
      data_err = std::max(data_err, std::abs(want[i].second - got[i].second));
      data_err = std::max(data_err, std::abs(want[i].first - got[i].first));
    }
    c.require(data_err < 1e-8, fmt("input data round trip error %.2e", data_err));
    c.require(comp.fit_residual < 1e-8, fmt("fit residual %.2e", comp.fit_residual));

    std::vector<MapTermD> terms = comp.map.terms();
    std::sort(terms.begin(), terms.end(),
              [](const MapTermD& a, const MapTermD& b) { return a.C < b.C; });
    double term_err = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      term_err = std::max(term_err, std::abs(terms[i].A - 2.0));
      term_err = std::max(term_err, std::abs(terms[i].C - (i == 0 ? -2.0 : 2.0)));
    }
    if (term_err >= 1e-6) {
      const double q22 = charges_from_map(symmetric_map()).charges()[0].q;
      c.require(false,
                fmt("map terms (A, C) = (%.8f, %.8f) and (%.8f, %.8f) differ from (2, -2) and "
                    "(2, 2) by %.2f; the fitted map reproduces the input charge data to %.1e, "
                    "while the map with terms (2, +-2) carries per-charge intensity %.8f, not "
                    "the input intensity %.8f",
                    terms[0].A, terms[0].C, terms[1].A, terms[1].C, term_err, data_err, q22,
                    kRefIntensity));
    }
  }
  c.budget(t, 10.0);
  c.note = fmt("one merged component reproducing the inputs to %.1e with map terms (2, +-2)",
               data_err);
  return verdict("c3", c, t);
}

// Companion: the charge pair that does lead back to map terms (2, +-2) is the
// same pair of positions with the derived intensity.
int c3x() {
  Timer t;
  Clauses c;
  const double qi = (std::sqrt(41.0) - 3.0) / 6.0;
  const ChargeConfig cfg = paired_config(qi);
  const EquilibriumSolution sol = solve(cfg);
  c.require(sol.regime == Regime::Merged && sol.components.size() == 1,
            fmt("expected one merged component, got %zu", sol.components.size()));
  double term_err = 0, resid = 0;
  if (sol.components.size() == 1) {
    std::vector<MapTermD> terms = sol.components[0].map.terms();
    std::sort(terms.begin(), terms.end(),
              [](const MapTermD& a, const MapTermD& b) { return a.C < b.C; });
    for (std::size_t i = 0; i < terms.size(); ++i) {
      term_err = std::max(term_err, std::abs(terms[i].A - 2.0));
      term_err = std::max(term_err, std::abs(terms[i].C - (i == 0 ? -2.0 : 2.0)));
    }
    resid = sol.components[0].fit_residual;
    c.require(term_err < 1e-6, fmt("map terms differ from (2, +-2) by %.2e", term_err));
    c.require(resid < 1e-8, fmt("fit residual %.2e", resid));
  }
  c.budget(t, 10.0);
  c.note = fmt("intensity %.8f at the same positions recovers map terms (2, +-2) to %.1e "
               "(fit residual %.1e)",
               qi, term_err, resid);
  return verdict("c3x", c, t);
}

// --- c4: stationarity of the weighted potential off the support ---

int c4() {
  Timer t;
  Clauses c;
  const EquilibriumSolution sol = solve(paired_config(kRefIntensity));
  const FrostmanReport rep = frostman_residual(sol);
  c.require(rep.samples.size() >= 200, fmt("only %zu residual samples", rep.samples.size()));
  c.require(rep.std_dev < 1e-6,
            fmt("residual std %.2e over %zu points", rep.std_dev, rep.samples.size()));
  const FrostmanReport bad = frostman_residual(inflate_regions(sol, 1.05));
  c.require(bad.max_dev > 1e-3,
            fmt("max deviation %.2e after 5%% boundary inflation is not above 1e-3", bad.max_dev));
  c.budget(t, 60.0);
  c.note = fmt("residual std %.2e over %zu points; 5%% boundary inflation lifts the max "
               "deviation to %.2e",
               rep.std_dev, rep.samples.size(), bad.max_dev);
  return verdict("c4", c, t);
}

// --- c5/c7 shared map list: two fixed maps plus five sampled valid pairs ---

struct LabeledMap {
  std::string label;
  RationalMapD map;
};

std::vector<LabeledMap> quadrature_suite_maps() {
  std::vector<LabeledMap> out;
  out.push_back({"symmetric two-pole", symmetric_map()});
  out.push_back({"order-1", RationalMapD({{1.2, 2.0}})});
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> log_amp(std::log(0.3), std::log(2.5));
  std::uniform_real_distribution<double> pole(1.35, 3.2);
  int attempt = 0;
  while (out.size() < 7 && attempt < 500) {
    ++attempt;
    const double a1 = std::exp(log_amp(rng));
    const double c1 = pole(rng);
    const double a2 = std::exp(log_amp(rng));
    const double c2 = -pole(rng);
    try {
      RationalMapD m({{a1, c1}, {a2, c2}});
      if (!validate_map(m).valid) continue;
      charges_from_map(m);
      out.push_back({fmt("sampled pair %d", attempt), std::move(m)});
    } catch (const Error&) {
    }
  }
  if (out.size() < 7) throw Error("map sampling did not produce 5 valid two-pole maps");
  return out;
}

// --- c5: quadrature identities on the shared map list ---

int c5() {
  Timer t;
  Clauses c;
  const DiscRuleD rule(128, 256);
  double worst = 0;
  std::string worst_label = "none";
  int checks = 0;
  for (const auto& lm : quadrature_suite_maps()) {
    for (const auto& chk : quadrature_identity_suite(lm.map, rule)) {
      ++checks;
      if (chk.error > worst) {
        worst = chk.error;
        worst_label = lm.label + ", " + chk.label;
      }
    }
  }
  c.require(worst < 1e-8, fmt("relative error %.2e (%s)", worst, worst_label.c_str()));
  c.budget(t, 30.0);
  c.note = fmt("%d identities over 7 maps, worst relative error %.1e (%s)", checks, worst,
               worst_label.c_str());
  return verdict("c5", c, t);
}

// --- c6: exterior moment identity for the solved reference pair ---

int c6() {
  Timer t;
  Clauses c;
  const EquilibriumSolution sol = solve(paired_config(kRefIntensity));
  c.require(!sol.components.empty(), "no solved component");
  double worst = 0, radius = 0;
  if (!sol.components.empty()) {
    double extent = 0;
    for (const auto& w : boundary_trace(sol.components[0].map, 512)) {
      extent = std::max(extent, std::abs(w));
    }
    radius = extent + 1.0;
    for (int k = 0; k < 20; ++k) {
      const double th = 2.0 * kPi * (k + 0.5) / 20.0;
      worst = std::max(worst, f3_boundary_check(sol, 0, std::polar(radius, th)));
    }
    c.require(worst < 1e-8, fmt("moment residual %.2e over 20 exterior points", worst));
  }
  c.budget(t, 10.0);
  c.note = fmt("20 exterior points at radius %.2f, largest residual %.1e", radius, worst);
  return verdict("c6", c, t);
}

// --- c7: spherical coefficient sum equals q/(1+q) on the shared map list ---

int c7() {
  Timer t;
  Clauses c;
  const DiscRuleD rule(128, 256);
  double worst_mass = 0, worst_quad = 0;
  std::string worst_label = "none";
  for (const auto& lm : quadrature_suite_maps()) {
    double total = 0;
    for (const auto& p : spherical_quadrature_data(lm.map).points) total += p.coefficient;
    const double q = charges_from_map(lm.map).q();
    const double mass_err = std::abs(total - q / (1.0 + q));
    if (mass_err > worst_mass) {
      worst_mass = mass_err;
      worst_label = lm.label;
    }
    worst_quad = std::max(worst_quad, std::abs(total - mapped_sigma_mass(lm.map, rule)));
  }
  c.require(worst_mass < 1e-8,
            fmt("coefficient sum differs from q/(1+q) by %.2e (%s)", worst_mass,
                worst_label.c_str()));
  c.require(worst_quad < 1e-8,
            fmt("coefficient sum differs from the sigma mass integral by %.2e", worst_quad));
  c.note = fmt("7 maps; coefficient sum matches q/(1+q) to %.1e and the sigma mass integral "
               "to %.1e",
               worst_mass, worst_quad);
  return verdict("c7", c, t);
}

// --- c8: Fekete points respect the excluded regions; no-field run is uniform ---

int c8() {
  Timer t;
  Clauses c;
  const ChargeConfig cfg = paired_config(kRefIntensity);
  const EquilibriumSolution sol = solve(cfg);
  const SolutionGeometry geo(sol);
  MinimizeOptions mo;
  mo.iterations = 20000;
  const ParticleSystem sys = minimize(init_particles(1000, cfg, 1), mo);
  const double excl = exclusion_fraction(sys, geo, 0.05);
  c.require(excl < 0.01, fmt("exclusion fraction %.4f at margin 0.05", excl));

  MinimizeOptions free_opts;
  free_opts.iterations = 5000;
  const ParticleSystem free_sys =
      minimize(init_particles(500, ChargeConfig(std::vector<Charge>{}), 2), free_opts);
  const double disc = cap_discrepancy(free_sys.positions, 100, 11);
  c.require(disc < 0.05, fmt("no-field cap discrepancy %.4f", disc));
  c.budget(t, 300.0);
  c.note = fmt("N=1000 exclusion fraction %.4f at margin 0.05; no-field cap discrepancy %.4f",
               excl, disc);
  return verdict("c8", c, t);
}

// --- c9: reconciliation of the asymmetric reference pair ---

const double kRefNodes[2] = {-1.79, 0.45};
const double kRefCoeffs[2] = {10.66, 1.15};

// Planar data (node, coefficient) per term of the map with parameters
// x = (A1, C1, A2, C2); false when the parameters do not form a map.
bool planar_data_of(const double* x, double* out) {
  try {
    const RationalMapD m({{x[0], x[1]}, {x[2], x[3]}});
    for (int k = 0; k < 2; ++k) {
      const double A = m.terms()[k].A, C = m.terms()[k].C;
      const PlanePointD z(1.0 / C, 0.0);
      out[2 * k] = eval(m, z).real();
      out[2 * k + 1] = kPi * (A / (C * C)) * derivative(m, z).real();
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

double planar_data_residual(const double* x) {
  double d[4];
  if (!planar_data_of(x, d)) return 1e9;
  const double r[4] = {d[0] - kRefNodes[0], d[1] - kRefCoeffs[0], d[2] - kRefNodes[1],
                       d[3] - kRefCoeffs[1]};
  double s = 0;
  for (double v : r) s += v * v;
  return std::sqrt(s);
}

// Least-squares map parameters for the reference planar data: coarse geometric
// grid, then damped finite-difference Newton.
double fit_planar_data(double* x) {
  double best[4] = {0, 0, 0, 0};
  double bestr = 1e18;
  for (double a1 = 0.1; a1 < 6.5; a1 *= 1.6)
    for (double c1 = -1.05; c1 > -4.5; c1 *= 1.25)
      for (double a2 = 0.1; a2 < 6.5; a2 *= 1.6)
        for (double c2 = 1.05; c2 < 4.5; c2 *= 1.25) {
          const double cand[4] = {a1, c1, a2, c2};
          const double r = planar_data_residual(cand);
          if (r < bestr) {
            bestr = r;
            std::copy(cand, cand + 4, best);
          }
        }
  std::copy(best, best + 4, x);
  for (int it = 0; it < 200; ++it) {
    double f0[4];
    if (!planar_data_of(x, f0)) break;
    Eigen::Vector4d rv(f0[0] - kRefNodes[0], f0[1] - kRefCoeffs[0], f0[2] - kRefNodes[1],
                       f0[3] - kRefCoeffs[1]);
    Eigen::Matrix4d J;
    const double h = 1e-7;
    for (int j = 0; j < 4; ++j) {
      double xp[4];
      std::copy(x, x + 4, xp);
      xp[j] += h;
      double fp[4];
      if (!planar_data_of(xp, fp)) {
        J.col(j).setZero();
        continue;
      }
      for (int i = 0; i < 4; ++i) J(i, j) = (fp[i] - f0[i]) / h;
    }
    const Eigen::Vector4d dx = J.colPivHouseholderQr().solve(rv);
    const double r0 = rv.norm();
    double lam = 1.0;
    bool moved = false;
    for (int b = 0; b < 30; ++b, lam *= 0.5) {
      double xn[4];
      for (int i = 0; i < 4; ++i) xn[i] = x[i] - lam * dx[i];
      if (planar_data_residual(xn) < r0) {
        std::copy(xn, xn + 4, x);
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (planar_data_residual(x) < 1e-12) break;
  }
  return planar_data_residual(x);
}

struct Reconciliation {
  ChargeConfig cfg;          // the two reference charges, positions normalized
  double separation = 0;
  double cap_radius[2] = {0, 0};
  bool fit_refused = false;  // merged-domain fit of the charges
  double fit_floor = 0;      // its best data residual
  std::string fit_error;
  double data_residual = 1e99;  // planar-data fit quality
  bool data_fit_ok = false;
  RationalMapD data_map;
  ValidityReport validity;
  bool have_derived = false;
  ChargeConfig derived;      // charges of the planar-data map
  Regime solve_regime = Regime::Uniform;
  std::size_t solve_caps = 0;
};

Reconciliation reconcile() {
  Reconciliation R;
  const SpherePointD p1 = SpherePointD(-0.95, 0.0, -0.31).normalized();
  const SpherePointD p2 = SpherePointD(0.62, 0.0, -0.79).normalized();
  R.cfg = ChargeConfig({{p1, 0.12}, {p2, 0.07}});
  R.separation = geodesic_distance(p1, p2);
  R.cap_radius[0] = cap_of_influence(R.cfg, 0).angular_radius;
  R.cap_radius[1] = cap_of_influence(R.cfg, 1).angular_radius;

  FitOptions fo;
  fo.require_merged = false;
  try {
    const FitResult fr = fit_map_to_charges(R.cfg, {0, 1}, fo);
    R.fit_floor = fr.residual;
  } catch (const NoConvergenceError& e) {
    R.fit_refused = true;
    R.fit_floor = e.final_residual();
    R.fit_error = "no convergence";
  } catch (const Error& e) {
    R.fit_refused = true;
    R.fit_error = e.what();
  }

  double x[4];
  R.data_residual = fit_planar_data(x);
  if (R.data_residual < 1e-6) {
    try {
      R.data_map = RationalMapD({{x[0], x[1]}, {x[2], x[3]}});
      R.data_fit_ok = true;
      R.validity = validate_map(R.data_map);
      if (R.validity.valid) {
        R.derived = charges_from_map(R.data_map);
        R.have_derived = true;
      }
    } catch (const Error&) {
    }
  }

  const EquilibriumSolution sol = solve(R.cfg);
  R.solve_regime = sol.regime;
  R.solve_caps = sol.caps.size();
  return R;
}

void print_reconciliation(const Reconciliation& R) {
  const auto& ch = R.cfg.charges();
  std::printf("reconciliation report\n");
  std::printf("  input charges: (%.4f, %.4f, %.4f) q=%.2f and (%.4f, %.4f, %.4f) q=%.2f\n",
              ch[0].pos.x(), ch[0].pos.y(), ch[0].pos.z(), ch[0].q, ch[1].pos.x(), ch[1].pos.y(),
              ch[1].pos.z(), ch[1].q);
  std::printf("  caps of influence: radii %.4f and %.4f rad, center separation %.4f rad; "
              "the caps are %s\n",
              R.cap_radius[0], R.cap_radius[1], R.separation,
              R.separation > R.cap_radius[0] + R.cap_radius[1] ? "disjoint" : "overlapping");
  if (R.fit_refused) {
    std::printf("  merged-domain fit of these charges: refused (%s), best data residual %.6f\n",
                R.fit_error.c_str(), R.fit_floor);
  } else {
    std::printf("  merged-domain fit of these charges: residual %.2e\n", R.fit_floor);
  }
  std::printf("  equilibrium for these charges: %zu separate caps (regime %s)\n", R.solve_caps,
              R.solve_regime == Regime::DisjointCaps ? "disjoint caps"
              : R.solve_regime == Regime::Merged     ? "merged"
                                                     : "uniform");
  std::printf("  reference planar data: nodes %.2f and %.2f, coefficients %.2f and %.2f "
              "(comparison tolerance 0.02)\n",
              kRefNodes[0], kRefNodes[1], kRefCoeffs[0], kRefCoeffs[1]);
  if (!R.data_fit_ok) {
    std::printf("  no two-pole map reproduces the reference planar data (best residual %.2e)\n",
                R.data_residual);
    return;
  }
  const auto& tm = R.data_map.terms();
  std::printf("  two-pole map matching the reference planar data to %.1e: "
              "(A, C) = (%.8f, %.8f) and (%.8f, %.8f); validity: %s\n",
              R.data_residual, tm[0].A, tm[0].C, tm[1].A, tm[1].C,
              R.validity.valid ? "valid" : R.validity.failing_check.c_str());
  double x[4] = {tm[0].A, tm[0].C, tm[1].A, tm[1].C};
  double d[4];
  if (planar_data_of(x, d)) {
    std::printf("    its planar data: nodes %.6f and %.6f (off by %.1e, %.1e), coefficients "
                "%.6f and %.6f (off by %.1e, %.1e)\n",
                d[0], d[2], std::abs(d[0] - kRefNodes[0]), std::abs(d[2] - kRefNodes[1]), d[1],
                d[3], std::abs(d[1] - kRefCoeffs[0]), std::abs(d[3] - kRefCoeffs[1]));
  }
  if (R.have_derived) {
    for (const auto& dc : R.derived.charges()) {
      std::size_t nearest = 0;
      double best = 1e99;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const double g = (dc.pos - ch[i].pos).norm();
        if (g < best) {
          best = g;
          nearest = i;
        }
      }
      std::printf("    its charge (%.6f, %.6f, %.6f) q=%.6f sits %.1e from input charge "
                  "(%.4f, %.4f, %.4f) q=%.2f; intensity gap %.2f\n",
                  dc.pos.x(), dc.pos.y(), dc.pos.z(), dc.q, best, ch[nearest].pos.x(),
                  ch[nearest].pos.y(), ch[nearest].pos.z(), ch[nearest].q,
                  std::abs(dc.q - ch[nearest].q));
    }
    std::printf("  the reference planar data belong to a map whose charge positions match the "
                "inputs to print precision while its intensities (%.2f, %.2f) and total charge "
                "%.2f do not match the input intensities\n",
                R.derived.charges()[0].q, R.derived.charges()[1].q, R.derived.q());
  }
}

int c9() {
  Timer t;
  Clauses c;
  const Reconciliation R = reconcile();
  print_reconciliation(R);
  c.require(!R.fit_refused,
            fmt("fitting the two charges does not produce a valid map: the fit is refused with "
                "best data residual %.4f; their caps of influence are disjoint (separation "
                "%.4f rad against radius sum %.4f rad) and the equilibrium for these charges "
                "is %zu separate caps, so no merged domain carries this charge data",
                R.fit_floor, R.separation, R.cap_radius[0] + R.cap_radius[1], R.solve_caps));
  c.budget(t, 30.0);
  c.note = "charge fit produced a valid map matching the reference planar data";
  return verdict("c9", c, t);
}

// Companion: the structured comparison behind c9. The reference planar data
// determine a valid map whose charge positions reproduce the reference
// positions; the refusal floor of the charge fit sits far above the
// comparison tolerance.
int c9x() {
  Timer t;
  Clauses c;
  const Reconciliation R = reconcile();
  print_reconciliation(R);
  c.require(R.fit_refused, "merged-domain fit of the reference charges unexpectedly succeeded");
  c.require(R.fit_floor > 0.02,
            fmt("charge fit residual floor %.4f is not above the 0.02 comparison tolerance",
                R.fit_floor));
  c.require(R.data_fit_ok && R.data_residual < 1e-9,
            fmt("no map matches the reference planar data (best residual %.2e)", R.data_residual));
  c.require(R.validity.valid, fmt("the data-matching map fails validity (%s)",
                                  R.validity.failing_check.c_str()));
  c.require(R.have_derived, "no charge data derived from the data-matching map");
  double pos_gap = 0;
  if (R.have_derived) {
    for (const auto& dc : R.derived.charges()) {
      double best = 1e99;
      for (const auto& ic : R.cfg.charges()) best = std::min(best, (dc.pos - ic.pos).norm());
      pos_gap = std::max(pos_gap, best);
    }
    c.require(pos_gap < 0.02,
              fmt("derived charge positions differ from the inputs by %.2e", pos_gap));
  }
  c.budget(t, 30.0);
  if (R.have_derived) {
    c.note = fmt("the reference planar data come from a valid map whose charge positions match "
                 "the inputs to %.1e but whose intensities are (%.2f, %.2f), total charge %.2f",
                 pos_gap, R.derived.charges()[0].q, R.derived.charges()[1].q, R.derived.q());
  }
  return verdict("c9x", c, t);
}

// --- c10: cap boundary against the empirical Fekete boundary ---

int c10() {
  Timer t;
  Clauses c;
  double worst_gap = 0, worst_q = 0;
  for (const double q : {0.1, 0.5, 1.0, 2.0}) {
    const ChargeConfig cfg({{SpherePointD(0.0, 0.0, -1.0), q}});
    const EquilibriumSolution sol = solve(cfg);
    const double theta = sol.caps.at(0).angular_radius;
    const double closed = std::acos(1.0 - 2.0 * q / (1.0 + q));
    c.require(std::abs(theta - closed) < 1e-10,
              fmt("q=%.1f: cap radius %.12f differs from acos(1 - 2q/(1+q)) = %.12f", q, theta,
                  closed));
    MinimizeOptions mo;
    mo.iterations = 6000;
    const ParticleSystem sys = minimize(init_particles(1000, cfg, 1), mo);
    const double emp = empirical_cap_radius(sys.positions, SpherePointD(0.0, 0.0, -1.0), q);
    const double gap = std::abs(emp - theta);
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_q = q;
    }
    c.require(gap < 0.05,
              fmt("q=%.1f: empirical boundary %.4f against cap radius %.4f (gap %.4f)", q, emp,
                  theta, gap));
  }
  c.note = fmt("largest boundary gap %.4f rad (at q=%.1f) over q in {0.1, 0.5, 1, 2}", worst_gap,
               worst_q);
  return verdict("c10", c, t);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <1..10|2x|3x|9x>\n");
    return 2;
  }
  const std::string which = argv[1];
  try {
    if (which == "1") return c1();
    if (which == "2") return c2();
    if (which == "2x") return c2x();
    if (which == "3") return c3();
    if (which == "3x") return c3x();
    if (which == "4") return c4();
    if (which == "5") return c5();
    if (which == "6") return c6();
    if (which == "7") return c7();
    if (which == "8") return c8();
    if (which == "9") return c9();
    if (which == "9x") return c9x();
    if (which == "10") return c10();
  } catch (const std::exception& e) {
    std::printf("[c%s] FAIL: unexpected error: %s\n", which.c_str(), e.what());
    return 1;
  }
  std::fprintf(stderr, "unknown criterion: %s\n", which.c_str());
  return 2;
}
