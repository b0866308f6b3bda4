#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "csphere/equilibrium.hpp"
#include "csphere/quadrature.hpp"

// Independent numerical checks of the defining identities: constancy of the
// Frostman residual over the support, the boundary-integral identity for the
// Cauchy transform of the spherical measure, quadrature identities, and
// potential evaluation. All region integrals run over the bounded exclusion
// regions, never the unbounded support.

namespace csphere {

struct FrostmanSample {
  PlanePointD z;
  double value = 0;
};

struct FrostmanReport {
  std::vector<FrostmanSample> samples;
  double mean = 0;
  double std_dev = 0;
  double max_dev = 0;  // max |value - mean|
};

struct VerifyOptions {
  int quad_radial = 128;
  int quad_angular = 256;
  double plane_margin = 1e-3;
  int trace_samples = 1024;
};

struct ProjectedDisc {
  PlanePointD center;
  double radius = 0;
};

// Stereographic image of a cap that avoids the north pole. The two boundary
// points on the meridian through the cap center project to a diameter.
inline ProjectedDisc project_cap(const SpherePointD& center, double angular_radius) {
  const SpherePointD n = SpherePointD::UnitZ();
  if (geodesic_distance(center, n) <= angular_radius + 1e-12) {
    throw Error("project_cap: cap contains the projection pole");
  }
  SpherePointD e = n - n.dot(center) * center;
  if (e.norm() < 1e-9) e = SpherePointD::UnitX();  // cap centered at a pole
  e.normalize();
  const SpherePointD p1 = std::cos(angular_radius) * center + std::sin(angular_radius) * e;
  const SpherePointD p2 = std::cos(angular_radius) * center - std::sin(angular_radius) * e;
  const PlanePointD w1 = project(p1), w2 = project(p2);
  return {PlanePointD(0.5) * (w1 + w2), 0.5 * std::abs(w1 - w2)};
}

// Solution geometry re-expressed in the presentation frame (solution.rotation
// applied), where every exclusion region projects to a bounded set.
struct PresentedRegions {
  struct MappedRegion {
    RationalMapD map;
    RotationD to_presentation;  // fit frame -> presentation frame
  };
  std::vector<ProjectedDisc> discs;
  std::vector<MappedRegion> mapped;
  std::vector<std::vector<PlanePointD>> boundaries;  // one polyline per region
  std::vector<PlanePointD> charge_pos;
  std::vector<double> charge_q;
  double q_total = 0;
  double extent = 0;  // max |w| over all boundaries
};

inline PresentedRegions present_regions(const EquilibriumSolution& sol,
                                        int trace_samples = 1024) {
  PresentedRegions P;
  P.q_total = sol.cfg.q();
  const RotationD& R = sol.rotation;
  for (const auto& c : sol.cfg.charges()) {
    P.charge_pos.push_back(project(SpherePointD(R * c.pos)));
    P.charge_q.push_back(c.q);
  }
  for (const auto& cap : sol.caps) {
    const ProjectedDisc d = project_cap(R * cap.center, cap.angular_radius);
    std::vector<PlanePointD> bd;
    for (int k = 0; k < trace_samples; ++k) {
      const double th = 2.0 * std::numbers::pi * k / trace_samples;
      bd.push_back(d.center + d.radius * PlanePointD(std::cos(th), std::sin(th)));
    }
    P.discs.push_back(d);
    P.boundaries.push_back(std::move(bd));
  }
  for (const auto& comp : sol.components) {
    PresentedRegions::MappedRegion mr;
    mr.map = comp.map;
    mr.to_presentation = R * comp.rotation.transpose();
    std::vector<PlanePointD> bd;
    for (const auto& w : boundary_trace(comp.map, trace_samples)) {
      bd.push_back(project(SpherePointD(mr.to_presentation * unproject(w))));
    }
    P.mapped.push_back(std::move(mr));
    P.boundaries.push_back(std::move(bd));
  }
  for (const auto& bd : P.boundaries) {
    for (const auto& w : bd) P.extent = std::max(P.extent, std::abs(w));
  }
  return P;
}

namespace detail {

inline void check_test_point(const PresentedRegions& P, const PlanePointD& z, double margin) {
  for (std::size_t i = 0; i < P.boundaries.size(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& w : P.boundaries[i]) dmin = std::min(dmin, std::abs(w - z));
    if (dmin < margin || point_in_polygon(z, P.boundaries[i])) {
      throw TestPointInsideDomainError("test point is inside or within margin of a region");
    }
  }
}

}  // namespace detail

// R(z) = sum_j q_j ln(1/|z - z_j|) - (1+q) int_Omega ln(1/|w - z|) dsigma*(w).
// Constant (and zero when the north pole lies in the support) over the
// projected support; the leading log terms cancel because sigma*(Omega)
// equals q/(1+q).
inline double frostman_residual_at(const PresentedRegions& P, const DiscRuleD& rule,
                                   const PlanePointD& z) {
  double val = 0;
  for (std::size_t j = 0; j < P.charge_pos.size(); ++j) {
    val += P.charge_q[j] * std::log(1.0 / std::abs(z - P.charge_pos[j]));
  }
  double integral = 0;
  for (const auto& d : P.discs) {
    integral += rule.integrate_disc(d.center, d.radius, [&](const PlanePointD& w) {
      return std::log(1.0 / std::abs(w - z)) * spherical_density(w);
    });
  }
  for (const auto& mr : P.mapped) {
    integral += rule.integrate_unit_disc([&](const PlanePointD& zeta) {
      const PlanePointD wloc = eval(mr.map, zeta);
      const PlanePointD wpres = project(SpherePointD(mr.to_presentation * unproject(wloc)));
      return std::log(1.0 / std::abs(wpres - z)) * spherical_density(wloc) *
             std::norm(derivative(mr.map, zeta));
    });
  }
  return val - (1.0 + P.q_total) * integral;
}

inline std::vector<PlanePointD> default_test_points(const PresentedRegions& P, int n = 200) {
  const double base = std::max(1.5, 1.25 * P.extent);
  const double radii[3] = {base, 2.0 * base, base * 20.0 / 3.0};
  std::vector<PlanePointD> out;
  for (int c = 0; c < 3; ++c) {
    const int nc = n / 3 + (c < n % 3 ? 1 : 0);
    for (int k = 0; k < nc; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nc;
      out.emplace_back(radii[c] * std::cos(th), radii[c] * std::sin(th));
    }
  }
  return out;
}

inline FrostmanReport frostman_residual(const EquilibriumSolution& sol,
                                        const std::vector<PlanePointD>& test_points,
                                        const VerifyOptions& opts = {}) {
  if (test_points.size() < 2) throw Error("frostman_residual: need at least 2 test points");
  const PresentedRegions P = present_regions(sol, opts.trace_samples);
  const DiscRuleD rule(opts.quad_radial, opts.quad_angular);
  FrostmanReport rep;
  for (const auto& z : test_points) {
    detail::check_test_point(P, z, opts.plane_margin);
    rep.samples.push_back({z, frostman_residual_at(P, rule, z)});
  }
  double sum = 0;
  for (const auto& s : rep.samples) sum += s.value;
  rep.mean = sum / rep.samples.size();
  double var = 0;
  for (const auto& s : rep.samples) {
    var += (s.value - rep.mean) * (s.value - rep.mean);
    rep.max_dev = std::max(rep.max_dev, std::abs(s.value - rep.mean));
  }
  rep.std_dev = std::sqrt(var / rep.samples.size());
  return rep;
}

inline FrostmanReport frostman_residual(const EquilibriumSolution& sol,
                                        const VerifyOptions& opts = {}) {
  const PresentedRegions P = present_regions(sol, opts.trace_samples);
  return frostman_residual(sol, default_test_points(P), opts);
}

// Negative-control helper: scale every exclusion region by `factor` (cap radii
// and map coefficients are both linear in the region size).
inline EquilibriumSolution inflate_regions(const EquilibriumSolution& sol, double factor) {
  EquilibriumSolution out = sol;
  for (auto& cap : out.caps) cap.angular_radius *= factor;
  for (auto& comp : out.components) {
    std::vector<MapTermD> terms = comp.map.terms();
    for (auto& t : terms) t.A *= factor;
    comp.map = RationalMapD(terms);
  }
  return out;
}

// |LHS - RHS| of the boundary identity
// (1/2pi i) oint [1/(w + 1/conj(w))] dw/(w - z) = (1/(q+1)) sum q_i/(z_i - z)
// for one component in its fit frame; the contour is phi(e^{i theta}),
// counterclockwise, by trapezoid quadrature.
inline double f3_boundary_check(const RationalMapD& m,
                                const std::vector<std::pair<PlanePointD, double>>& charges,
                                double q_total, const PlanePointD& z, int samples = 8192) {
  std::complex<double> lhs = 0;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    const PlanePointD zeta(std::cos(th), std::sin(th));
    const PlanePointD w = eval(m, zeta);
    const PlanePointD dw = derivative(m, zeta) * zeta;  // dw/dtheta = i * this
    lhs += dw / ((w + 1.0 / std::conj(w)) * (w - z));
  }
  lhs /= static_cast<double>(samples);
  std::complex<double> rhs = 0;
  for (const auto& [zi, qi] : charges) rhs += qi / (zi - z);
  rhs /= (q_total + 1.0);
  return std::abs(lhs - rhs);
}

inline double f3_boundary_check(const EquilibriumSolution& sol, std::size_t component,
                                const PlanePointD& z, int samples = 8192) {
  const auto& comp = sol.components.at(component);
  std::vector<std::pair<PlanePointD, double>> charges;
  for (const auto& p : comp.spherical.points) {
    charges.emplace_back(p.node, p.coefficient * (1.0 + sol.cfg.q()));
  }
  return f3_boundary_check(comp.map, charges, sol.cfg.q(), z, samples);
}

// U^mu(p) = sum m_k ln(1/|p - y_k|) with the straight-line distance in R^3.
inline double potential_of_discrete(const std::vector<std::pair<SpherePointD, double>>& measure,
                                    const SpherePointD& p) {
  double u = 0;
  for (const auto& [y, m] : measure) {
    const double d = chordal_distance(p, y);
    if (d < 1e-12) throw SingularPotentialError("potential evaluated at an atom");
    u += m * std::log(1.0 / d);
  }
  return u;
}

inline double potential_of_discrete_planar(
    const std::vector<std::pair<PlanePointD, double>>& measure, const PlanePointD& z) {
  double u = 0;
  for (const auto& [w, m] : measure) {
    const double d = std::abs(z - w);
    if (d < 1e-12) throw SingularPotentialError("potential evaluated at an atom");
    u += m * std::log(1.0 / d);
  }
  return u;
}

// Quadrature identities for both reference measures over the mapped domain,
// on a fixed suite of analytic test functions. Errors are relative with a
// floor of 1 in the denominator (several suite values are exact zeros).
struct QuadratureCheck {
  std::string label;
  double error = 0;
};

inline std::vector<QuadratureCheck> quadrature_identity_suite(const RationalMapD& m,
                                                              const DiscRuleD& rule) {
  using F = std::function<PlanePointD(const PlanePointD&)>;
  const std::vector<std::pair<std::string, F>> fns = {
      {"1", [](const PlanePointD&) { return PlanePointD(1, 0); }},
      {"w", [](const PlanePointD& w) { return w; }},
      {"w^2", [](const PlanePointD& w) { return w * w; }},
      {"1/(w-5)", [](const PlanePointD& w) { return 1.0 / (w - PlanePointD(5, 0)); }},
      {"1/(w-3i)", [](const PlanePointD& w) { return 1.0 / (w - PlanePointD(0, 3)); }},
  };
  const QuadratureDataD planar = planar_quadrature_data(m);
  const QuadratureDataD spherical = spherical_quadrature_data(m);
  std::vector<QuadratureCheck> out;
  for (const auto& [label, f] : fns) {
    const PlanePointD ip = rule.integrate_unit_disc([&](const PlanePointD& zeta) {
      return f(eval(m, zeta)) * std::norm(derivative(m, zeta));
    });
    PlanePointD qp = 0;
    for (const auto& p : planar.points) qp += p.coefficient * f(p.node);
    out.push_back({"planar " + label, std::abs(ip - qp) / std::max(1.0, std::abs(qp))});

    const PlanePointD is = rule.integrate_unit_disc([&](const PlanePointD& zeta) {
      const PlanePointD w = eval(m, zeta);
      return f(w) * spherical_density(w) * std::norm(derivative(m, zeta));
    });
    PlanePointD qs = 0;
    for (const auto& p : spherical.points) qs += p.coefficient * f(p.node);
    out.push_back({"spherical " + label, std::abs(is - qs) / std::max(1.0, std::abs(qs))});
  }
  return out;
}

}  // namespace csphere
