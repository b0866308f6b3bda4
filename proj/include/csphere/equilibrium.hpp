#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csphere/charges.hpp"
#include "csphere/conformal.hpp"
#include "csphere/schwarz.hpp"

// End-to-end solver. Forward: a valid map determines a charge configuration
// for which its mapped domain is the exclusion region (total charge
// q = sum(c~)/(1 - sum(c~)), intensities c~_k (1+q), positions at the
// unprojected spherical nodes). Inverse: given charges, either disjoint caps
// (closed form) or a fitted rational map per merged two-charge component.

namespace csphere {

struct ChargeComponent {
  std::vector<int> indices;
  double t_reduced = 0;  // 1 + q - sum of component intensities
};

inline std::vector<ChargeComponent> make_components(const ChargeConfig& cfg,
                                                    const RegimeInfo& info) {
  std::vector<ChargeComponent> out;
  for (const auto& idx : info.components) {
    ChargeComponent c;
    c.indices = idx;
    double s = 0;
    for (int i : idx) s += cfg.charges()[i].q;
    c.t_reduced = 1.0 + cfg.q() - s;
    if (!(c.t_reduced > 0)) throw Error("component reduced mass must be positive");
    out.push_back(std::move(c));
  }
  return out;
}

inline ChargeConfig charges_from_map(const RationalMapD& m) {
  const QuadratureDataD sph = spherical_quadrature_data(m);
  double total = 0;
  for (const auto& p : sph.points) total += p.coefficient;
  if (total >= 1.0 - 1e-12) {
    throw MassOverflowError("charges_from_map: spherical coefficients sum to >= 1");
  }
  const double q = total / (1.0 - total);
  std::vector<Charge> charges;
  for (const auto& p : sph.points) {
    charges.push_back({unproject(p.node), p.coefficient * (1.0 + q)});
  }
  return ChargeConfig(std::move(charges));
}

// Rotation sending the spherical midpoint of the pair to the negative z-axis
// and both charges into the xz-plane, first charge toward +x.
inline RotationD canonical_pair_rotation(const SpherePointD& p1, const SpherePointD& p2) {
  const SpherePointD mid = p1 + p2;
  if (mid.norm() < 1e-9) {
    throw Error("canonical_pair_rotation: antipodal pair has no canonical frame");
  }
  return frame_rotation<double>(mid.normalized(), p1);
}

struct FitOptions {
  double residual_tol = 1e-10;  // acceptance gate on the data residual norm
  double newton_target = 1e-12;
  double fd_step = 1e-7;
  int max_newton_iter = 120;
  bool require_merged = true;   // refuse components that are not in the merged regime
  bool validate = true;
};

struct FitResult {
  RationalMapD map;
  double residual = std::numeric_limits<double>::infinity();
  bool symmetric = false;
  bool used_homotopy = false;
  int newton_iterations = 0;
};

namespace detail {

struct FitTargets {
  std::vector<double> nodes;   // ascending
  std::vector<double> coeffs;  // q_i/(1+q), matched to nodes
};

// Data residual of a candidate map against the targets; errors (wrong root
// count, invalid poles, non-real data) surface as a large constant residual.
inline Eigen::VectorXd fit_residual(const RationalMapD& m, const FitTargets& t) {
  const int n = static_cast<int>(t.nodes.size());
  Eigen::VectorXd r = Eigen::VectorXd::Constant(2 * n, 1e6);
  try {
    const QuadratureDataD d = spherical_quadrature_data(m, false);
    if (static_cast<int>(d.points.size()) != n) return r;
    for (int i = 0; i < n; ++i) {
      r(2 * i) = d.points[i].node.real() - t.nodes[i];
      r(2 * i + 1) = d.points[i].coefficient - t.coeffs[i];
    }
  } catch (const Error&) {
  }
  return r;
}

inline RationalMapD decode_params(const Eigen::VectorXd& x, bool symmetric) {
  if (symmetric) {
    return RationalMapD({{x(0), x(1)}, {x(0), -x(1)}});
  }
  if (x.size() == 2) return RationalMapD({{x(0), x(1)}});
  return RationalMapD({{x(0), -x(1)}, {x(2), x(3)}});  // left lobe pole < -1, right pole > 1
}

inline void clamp_params(Eigen::VectorXd& x) {
  for (int i = 0; i < x.size(); i += 2) {
    x(i) = std::clamp(x(i), 1e-4, 1e4);       // A
    x(i + 1) = std::clamp(x(i + 1), 1.0 + 1e-6, 1e4);  // |C|
  }
}

inline double residual_norm(const RationalMapD& m, const FitTargets& t) {
  return fit_residual(m, t).norm();
}

struct NewtonOutcome {
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

inline NewtonOutcome newton_fit(Eigen::VectorXd x0, bool symmetric, const FitTargets& t,
                                const FitOptions& opts) {
  NewtonOutcome out;
  Eigen::VectorXd x = x0;
  clamp_params(x);
  Eigen::VectorXd r = fit_residual(decode_params(x, symmetric), t);
  double rn = r.norm();
  const int dim = static_cast<int>(x.size());
  for (int it = 0; it < opts.max_newton_iter && rn > opts.newton_target; ++it) {
    ++out.iterations;
    Eigen::MatrixXd J(r.size(), dim);
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd xh = x;
      xh(k) += opts.fd_step;
      J.col(k) = (fit_residual(decode_params(xh, symmetric), t) - r) / opts.fd_step;
    }
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt) {
      Eigen::VectorXd xn = x - lambda * step;
      clamp_params(xn);
      const Eigen::VectorXd rvn = fit_residual(decode_params(xn, symmetric), t);
      if (rvn.norm() < rn) {
        x = xn;
        r = rvn;
        rn = rvn.norm();
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  out.x = x;
  out.residual = rn;
  return out;
}

inline std::vector<Eigen::VectorXd> grid_seeds(bool symmetric, const FitTargets& t,
                                               std::size_t keep) {
  std::vector<std::pair<double, Eigen::VectorXd>> scored;
  auto push = [&](const Eigen::VectorXd& x) {
    scored.emplace_back(residual_norm(decode_params(x, symmetric), t), x);
  };
  auto geom = [](double lo, double hi, int n, int i) {
    return lo * std::pow(hi / lo, double(i) / double(n - 1));
  };
  if (symmetric) {
    for (int ia = 0; ia < 16; ++ia) {
      for (int ic = 0; ic < 16; ++ic) {
        Eigen::VectorXd x(2);
        x << geom(0.05, 8.0, 16, ia), 1.0 + geom(0.02, 7.0, 16, ic);
        push(x);
      }
    }
  } else {
    for (int ia = 0; ia < 7; ++ia) {
      for (int ic = 0; ic < 7; ++ic) {
        for (int ja = 0; ja < 7; ++ja) {
          for (int jc = 0; jc < 7; ++jc) {
            Eigen::VectorXd x(4);
            x << geom(0.05, 8.0, 7, ia), 1.0 + geom(0.02, 5.0, 7, ic),
                geom(0.05, 8.0, 7, ja), 1.0 + geom(0.02, 5.0, 7, jc);
            push(x);
          }
        }
      }
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < std::min(keep, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace detail

// Fits a rational map whose spherical quadrature data reproduce the projected
// nodes and coefficients q_i/(1+q) of one merged component. Precondition: the
// component's charges already lie on the xz-plane (caller applies the
// canonical rotation). Damped Newton with finite-difference Jacobian, seeded
// by a coarse deterministic grid search; an intensity homotopy from the cap
// tangency threshold is the fallback.
inline FitResult fit_map_to_charges(const ChargeConfig& cfg, const std::vector<int>& indices,
                                    const FitOptions& opts = {}) {
  if (indices.size() != 2) {
    throw UnsupportedTopologyError("fit_map_to_charges: only two-charge components supported");
  }
  if (opts.require_merged) {
    const RegimeInfo info = detect_regime(cfg);
    bool merged_together = false;
    for (const auto& comp : info.components) {
      if (std::find(comp.begin(), comp.end(), indices[0]) != comp.end() &&
          std::find(comp.begin(), comp.end(), indices[1]) != comp.end() && comp.size() >= 2) {
        merged_together = true;
      }
    }
    if (info.regime != Regime::Merged || !merged_together) {
      throw Error("fit_map_to_charges: component is not in the merged regime");
    }
  }

  const auto& ch = cfg.charges();
  std::array<Charge, 2> pair{ch[indices[0]], ch[indices[1]]};
  for (const auto& c : pair) {
    if (std::abs(c.pos.y()) > 1e-9) {
      throw Error("fit_map_to_charges: charges must lie on the xz-plane (rotate first)");
    }
  }
  const double q_total = cfg.q();

  auto targets_for = [&](double scale) {
    // Intensities scaled by `scale` (homotopy parameter); scale 1 is the input.
    detail::FitTargets t;
    std::vector<std::pair<double, double>> data;
    const double qs = scale * (pair[0].q + pair[1].q) + (q_total - pair[0].q - pair[1].q);
    for (const auto& c : pair) {
      const PlanePointD w = project(c.pos);
      data.emplace_back(w.real(), scale * c.q / (1.0 + qs));
    }
    std::sort(data.begin(), data.end());
    for (const auto& [n, m] : data) {
      t.nodes.push_back(n);
      t.coeffs.push_back(m);
    }
    return t;
  };
  const detail::FitTargets target = targets_for(1.0);

  const bool symmetric = std::abs(target.nodes[0] + target.nodes[1]) <=
                             1e-12 * (1.0 + std::abs(target.nodes[0])) &&
                         std::abs(target.coeffs[0] - target.coeffs[1]) <=
                             1e-12 * (1.0 + target.coeffs[0]);

  FitResult result;
  result.symmetric = symmetric;

  auto try_seeds = [&](const std::vector<Eigen::VectorXd>& seeds, const detail::FitTargets& t,
                       detail::NewtonOutcome& best) {
    for (const auto& s : seeds) {
      const detail::NewtonOutcome o = detail::newton_fit(s, symmetric, t, opts);
      result.newton_iterations += o.iterations;
      if (o.residual < best.residual) best = o;
      if (best.residual < opts.newton_target) break;
    }
  };

  detail::NewtonOutcome best;
  try_seeds(detail::grid_seeds(symmetric, target, symmetric ? 4 : 6), target, best);

  if (best.residual > opts.residual_tol) {
    // Homotopy in intensity: find the cap tangency scale by bisection, then
    // walk the scale up in ten steps reusing each fit as the next seed.
    const auto cap_gap = [&](double scale) {
      const double qs = scale * (pair[0].q + pair[1].q) + (q_total - pair[0].q - pair[1].q);
      const double th0 = std::acos(1.0 - 2.0 * scale * pair[0].q / (1.0 + qs));
      const double th1 = std::acos(1.0 - 2.0 * scale * pair[1].q / (1.0 + qs));
      return geodesic_distance(pair[0].pos, pair[1].pos) - th0 - th1;
    };
    double lo = 1e-6, hi = 1.0, tangency = 1.0;
    if (cap_gap(1.0) < 0) {  // caps overlap at full intensity: tangency scale exists below 1
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cap_gap(mid) > 0 ? lo : hi) = mid;
      }
      tangency = hi;
    }
    detail::NewtonOutcome walk;
    for (int k = 1; k <= 10; ++k) {
      const double scale = tangency + (1.0 - tangency) * double(k) / 10.0;
      const detail::FitTargets t = targets_for(scale);
      detail::NewtonOutcome step_best;
      if (walk.x.size() == 0) {
        try_seeds(detail::grid_seeds(symmetric, t, symmetric ? 4 : 6), t, step_best);
      } else {
        try_seeds({walk.x}, t, step_best);
        if (step_best.residual > opts.residual_tol) {
          try_seeds(detail::grid_seeds(symmetric, t, symmetric ? 4 : 6), t, step_best);
        }
      }
      walk = step_best;
      if (walk.residual > 1e3) break;  // the family left the feasible set
    }
    if (walk.residual < best.residual) {
      best = walk;
      result.used_homotopy = true;
    }
  }

  result.residual = best.residual;
  if (!(best.residual <= opts.residual_tol)) {
    throw NoConvergenceError("fit_map_to_charges: residual above tolerance", best.residual);
  }
  result.map = detail::decode_params(best.x, symmetric);
  if (opts.validate) {
    const ValidityReport rep = validate_map(result.map);
    if (!rep.valid) {
      throw InvalidResultError("fit_map_to_charges: fitted map fails validation (" +
                               rep.failing_check + ")");
    }
  }
  return result;
}

struct SolvedComponent {
  std::vector<int> indices;
  double t_reduced = 0;
  RotationD rotation = RotationD::Identity();  // input frame -> component fit frame
  RationalMapD map;
  QuadratureDataD planar;
  QuadratureDataD spherical;
  double fit_residual = 0;
};

struct EquilibriumSolution {
  Regime regime = Regime::Uniform;
  ChargeConfig cfg;  // the input configuration (input frame)
  std::vector<CapRegion> caps;
  std::vector<int> cap_charge;  // charge index per cap
  std::vector<SolvedComponent> components;
  RotationD rotation = RotationD::Identity();  // input frame -> presentation frame
  double frostman_constant = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct RegionSamples {
  std::vector<SpherePointD> boundary;  // input-frame sphere points
  SpherePointD center = SpherePointD::UnitZ();
  double radius = 0;  // max geodesic radius around center
};

inline std::vector<RegionSamples> region_samples(const EquilibriumSolution& sol, int samples) {
  std::vector<RegionSamples> out;
  for (const auto& cap : sol.caps) {
    RegionSamples r;
    r.center = cap.center;
    r.radius = cap.angular_radius;
    const RotationD F = frame_rotation<double>(
        -cap.center, std::abs(cap.center.z()) < 0.9 ? SpherePointD::UnitZ()
                                                    : SpherePointD::UnitX());
    for (int k = 0; k < samples; ++k) {
      const double th = 2.0 * std::numbers::pi * k / samples;
      // frame_rotation sends -center to -z, so the cap circle sits at +z locally.
      const SpherePointD local(std::sin(cap.angular_radius) * std::cos(th),
                               std::sin(cap.angular_radius) * std::sin(th),
                               std::cos(cap.angular_radius));
      r.boundary.push_back(F.transpose() * local);
    }
    out.push_back(std::move(r));
  }
  for (const auto& comp : sol.components) {
    RegionSamples r;
    SpherePointD acc = SpherePointD::Zero();
    std::vector<SpherePointD> pts;
    for (const auto& w : boundary_trace(comp.map, samples)) {
      const SpherePointD p = comp.rotation.transpose() * unproject(w);
      pts.push_back(p);
      acc += p;
    }
    r.center = acc.normalized();
    for (const auto& p : pts) r.radius = std::max(r.radius, geodesic_distance(r.center, p));
    r.boundary = std::move(pts);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

// Even-odd membership test of w against a closed polygon.
inline bool point_in_polygon(const PlanePointD& w, const std::vector<PlanePointD>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = poly[i].imag(), yj = poly[j].imag();
    if ((yi > w.imag()) != (yj > w.imag())) {
      const double xint =
          poly[j].real() + (poly[i].real() - poly[j].real()) * (w.imag() - yj) / (yi - yj);
      if (w.real() < xint) inside = !inside;
    }
  }
  return inside;
}

// Geometry cache for membership queries against a solution's exclusion
// regions. Points are given in the input frame.
class SolutionGeometry {
 public:
  // Holds a pointer to the solution; the solution must outlive the geometry.
  explicit SolutionGeometry(EquilibriumSolution&& sol, int trace_samples = 2048) = delete;
  explicit SolutionGeometry(const EquilibriumSolution& sol, int trace_samples = 2048)
      : sol_(&sol) {
    for (const auto& comp : sol.components) {
      traces_.push_back(boundary_trace(comp.map, trace_samples));
      std::vector<SpherePointD> sphere_bd;
      for (const auto& w : traces_.back()) {
        sphere_bd.push_back(comp.rotation.transpose() * unproject(w));
      }
      sphere_traces_.push_back(std::move(sphere_bd));
    }
  }

  bool excluded(const SpherePointD& p_input, double margin = 0) const {
    for (std::size_t i = 0; i < sol_->caps.size(); ++i) {
      if (geodesic_distance(p_input, sol_->caps[i].center) <=
          sol_->caps[i].angular_radius - margin) {
        return true;
      }
    }
    for (std::size_t c = 0; c < sol_->components.size(); ++c) {
      const SpherePointD p_loc = sol_->components[c].rotation * p_input;
      if (is_north_pole(p_loc, 1e-12)) continue;  // north pole is in the support
      const PlanePointD w = project(p_loc);
      if (!point_in_polygon(w, traces_[c])) continue;
      if (margin <= 0) return true;
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& b : sphere_traces_[c]) {
        dmin = std::min(dmin, geodesic_distance(p_input, b));
      }
      if (dmin >= margin) return true;
    }
    return false;
  }

  const std::vector<std::vector<PlanePointD>>& plane_traces() const { return traces_; }
  const std::vector<std::vector<SpherePointD>>& sphere_traces() const { return sphere_traces_; }

 private:
  const EquilibriumSolution* sol_;
  std::vector<std::vector<PlanePointD>> traces_;
  std::vector<std::vector<SpherePointD>> sphere_traces_;
};

namespace detail {

// Presentation frame for cap-only solutions: rotate so the north pole sits as
// far as possible from every cap (keeps every projected region bounded).
inline RotationD clearance_rotation(const std::vector<CapRegion>& caps) {
  if (caps.empty()) return RotationD::Identity();
  std::vector<SpherePointD> candidates = {SpherePointD::UnitZ(),  -SpherePointD::UnitZ(),
                                          SpherePointD::UnitX(),  -SpherePointD::UnitX(),
                                          SpherePointD::UnitY(),  -SpherePointD::UnitY()};
  SpherePointD centroid = SpherePointD::Zero();
  for (const auto& c : caps) centroid += c.center;
  if (centroid.norm() > 1e-9) candidates.push_back((-centroid).normalized());
  const int nf = 64;
  for (int i = 0; i < nf; ++i) {  // Fibonacci sweep for robustness
    const double z = 1.0 - 2.0 * (i + 0.5) / nf;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = std::numbers::pi * (3.0 - std::sqrt(5.0)) * i;
    candidates.emplace_back(r * std::cos(th), r * std::sin(th), z);
  }
  double best_margin = -std::numeric_limits<double>::infinity();
  SpherePointD best = SpherePointD::UnitZ();
  for (const auto& u : candidates) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& c : caps) {
      margin = std::min(margin, geodesic_distance(u, c.center) - c.angular_radius);
    }
    if (margin > best_margin) {
      best_margin = margin;
      best = u;
    }
  }
  if (best_margin < 1e-3) {
    throw Error("clearance_rotation: no direction clear of all caps");
  }
  // Send `best` to the north pole: frame_rotation aims -best at -z.
  return frame_rotation<double>(-best, std::abs(best.z()) < 0.9 ? SpherePointD::UnitZ()
                                                                : SpherePointD::UnitX());
}

}  // namespace detail

struct SolveOptions {
  FitOptions fit;
  double round_trip_tol = 1e-8;
};

inline EquilibriumSolution solve(const ChargeConfig& cfg, const SolveOptions& opts = {}) {
  EquilibriumSolution sol;
  sol.cfg = cfg;
  if (cfg.size() == 0) {
    sol.regime = Regime::Uniform;
    sol.frostman_constant = 0.0;
    return sol;
  }
  const RegimeInfo info = detect_regime(cfg);
  const std::vector<ChargeComponent> comps = make_components(cfg, info);
  sol.regime = info.regime;

  for (const auto& comp : comps) {
    if (comp.indices.size() == 1) {
      sol.caps.push_back(cap_of_influence(cfg, comp.indices[0]));
      sol.cap_charge.push_back(comp.indices[0]);
      continue;
    }
    if (comp.indices.size() > 2) {
      throw UnsupportedTopologyError("solve: merged components of 3+ charges are out of scope");
    }
    SolvedComponent sc;
    sc.indices = comp.indices;
    sc.t_reduced = comp.t_reduced;
    const auto& ch = cfg.charges();
    sc.rotation = canonical_pair_rotation(ch[comp.indices[0]].pos, ch[comp.indices[1]].pos);
    const ChargeConfig local = cfg.rotated(sc.rotation);
    const FitResult fit = fit_map_to_charges(local, comp.indices, opts.fit);
    sc.map = fit.map;
    sc.fit_residual = fit.residual;
    sc.planar = planar_quadrature_data(sc.map);
    sc.spherical = spherical_quadrature_data(sc.map);

    // Round trip: the fitted map's spherical data must reproduce this
    // component's charges (with the global total charge).
    std::vector<std::pair<double, double>> want;  // (projected node, intensity)
    for (int i : comp.indices) {
      want.emplace_back(project(local.charges()[i].pos).real(), local.charges()[i].q);
    }
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < want.size(); ++k) {
      const auto& p = sc.spherical.points[k];
      const double pos_err =
          chordal_distance(unproject(p.node), unproject(PlanePointD(want[k].first, 0)));
      const double q_err = std::abs(p.coefficient * (1.0 + cfg.q()) - want[k].second);
      if (pos_err > opts.round_trip_tol || q_err > opts.round_trip_tol) {
        throw InvalidResultError("solve: fitted map fails the charge round-trip check");
      }
    }
    sol.components.push_back(std::move(sc));
  }

  if (sol.components.size() == 1 && sol.caps.empty()) {
    sol.rotation = sol.components[0].rotation;
  } else if (sol.components.empty()) {
    sol.rotation = detail::clearance_rotation(sol.caps);
  } else {
    // Mixed regimes keep the input frame unless a cap swallows the north pole.
    std::vector<CapRegion> all_caps = sol.caps;
    for (const auto& comp : sol.components) {
      CapRegion pseudo;
      SpherePointD acc = SpherePointD::Zero();
      for (const auto& p : comp.spherical.points) {
        acc += comp.rotation.transpose() * unproject(p.node);
      }
      pseudo.center = acc.normalized();
      pseudo.angular_radius = 0;
      for (const auto& w : boundary_trace(comp.map, 256)) {
        const SpherePointD b = comp.rotation.transpose() * unproject(w);
        pseudo.angular_radius =
            std::max(pseudo.angular_radius, geodesic_distance(pseudo.center, b));
      }
      pseudo.sigma_mass = 0;
      all_caps.push_back(pseudo);
    }
    sol.rotation = detail::clearance_rotation(all_caps);
  }

  // Exclusion regions must stay pairwise disjoint.
  const auto regions = detail::region_samples(sol, 256);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& a : regions[i].boundary) {
        for (const auto& b : regions[j].boundary) {
          dmin = std::min(dmin, geodesic_distance(a, b));
        }
      }
      if (dmin <= 1e-9) {
        throw InvalidResultError("solve: exclusion regions are not pairwise disjoint");
      }
    }
  }
  return sol;
}

}  // namespace csphere
