#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "csphere/errors.hpp"
#include "csphere/sphere_plane.hpp"

// Rational conformal maps phi(zeta) = sum_k A_k/(C_k - zeta) from the unit
// disc, with real parameters. Orders 1 and 2 are supported; higher orders are
// out of scope (the disjoint/merged analysis never needs them).

namespace csphere {

template <typename Scalar>
struct MapTerm {
  Scalar A = 0;
  Scalar C = 0;
};

using MapTermD = MapTerm<double>;

template <typename Scalar>
class RationalMap {
 public:
  RationalMap() = default;

  explicit RationalMap(std::vector<MapTerm<Scalar>> terms) : terms_(std::move(terms)) {
    if (terms_.empty() || terms_.size() > 2) {
      throw UnsupportedTopologyError("RationalMap: order must be 1 or 2");
    }
    for (const auto& t : terms_) {
      if (t.A == Scalar(0)) throw Error("RationalMap: zero coefficient term");
      if (t.C == Scalar(0)) throw Error("RationalMap: pole at the origin");
    }
  }

  const std::vector<MapTerm<Scalar>>& terms() const { return terms_; }
  int order() const { return static_cast<int>(terms_.size()); }

 private:
  std::vector<MapTerm<Scalar>> terms_;
};

using RationalMapD = RationalMap<double>;

namespace detail {
template <typename Scalar>
void check_not_near_pole(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& z) {
  for (const auto& t : m.terms()) {
    if (std::abs(z - PlanePoint<Scalar>(t.C, 0)) < Scalar(1e-12)) {
      throw NearPoleError("evaluation within 1e-12 of a pole");
    }
  }
}
}  // namespace detail

template <typename Scalar>
PlanePoint<Scalar> eval(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& z) {
  detail::check_not_near_pole(m, z);
  PlanePoint<Scalar> s{};
  for (const auto& t : m.terms()) s += t.A / (PlanePoint<Scalar>(t.C, 0) - z);
  return s;
}

template <typename Scalar>
PlanePoint<Scalar> derivative(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& z) {
  detail::check_not_near_pole(m, z);
  PlanePoint<Scalar> s{};
  for (const auto& t : m.terms()) {
    const PlanePoint<Scalar> d = PlanePoint<Scalar>(t.C, 0) - z;
    s += t.A / (d * d);
  }
  return s;
}

// phi(1/zeta) in the pole-free form A_k zeta/(C_k zeta - 1), stable for all
// zeta including 0 (where the value is 0). Its poles sit at zeta = 1/C_k.
template <typename Scalar>
PlanePoint<Scalar> eval_recip(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& z) {
  PlanePoint<Scalar> s{};
  for (const auto& t : m.terms()) {
    const PlanePoint<Scalar> d = PlanePoint<Scalar>(t.C, 0) * z - PlanePoint<Scalar>(1, 0);
    if (std::abs(d) < Scalar(1e-12) * std::abs(t.C)) {
      throw NearPoleError("eval_recip: zeta within 1e-12 of 1/C_k");
    }
    s += t.A * z / d;
  }
  return s;
}

// d/dzeta of phi(1/zeta); equals -phi'(1/zeta)/zeta^2.
template <typename Scalar>
PlanePoint<Scalar> derivative_recip(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& z) {
  PlanePoint<Scalar> s{};
  for (const auto& t : m.terms()) {
    const PlanePoint<Scalar> d = PlanePoint<Scalar>(t.C, 0) * z - PlanePoint<Scalar>(1, 0);
    if (std::abs(d) < Scalar(1e-12) * std::abs(t.C)) {
      throw NearPoleError("derivative_recip: zeta within 1e-12 of 1/C_k");
    }
    s += -t.A / (d * d);
  }
  return s;
}

// Damped Newton inversion of phi with multistart. Returns zeta with
// |zeta| <= 1 + 1e-9 and phi(zeta) = w to 1e-11 (relative to |w| scale).
template <typename Scalar>
PlanePoint<Scalar> invert(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& w,
                          const PlanePoint<Scalar>& seed) {
  const Scalar tol = Scalar(1e-11) * std::max(Scalar(1), std::abs(w));
  std::vector<PlanePoint<Scalar>> seeds{seed};
  for (int k = 0; k < 32; ++k) {
    const Scalar th = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(32);
    seeds.emplace_back(Scalar(0.5) * std::cos(th), Scalar(0.5) * std::sin(th));
  }
  int iterations = 0;
  const int max_iterations = 200;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& s0 : seeds) {
    PlanePoint<Scalar> z = s0;
    try {
      Scalar r = std::abs(eval(m, z) - w);
      while (iterations < max_iterations) {
        if (r < tol) {
          if (std::abs(z) <= Scalar(1) + Scalar(1e-9)) return z;
          break;  // converged outside the disc: wrong branch, try next seed
        }
        ++iterations;
        const PlanePoint<Scalar> dz = (eval(m, z) - w) / derivative(m, z);
        Scalar lambda = 1;
        bool stepped = false;
        for (int bt = 0; bt < 10; ++bt) {
          const PlanePoint<Scalar> zn = z - lambda * dz;
          Scalar rn;
          try {
            rn = std::abs(eval(m, zn) - w);
          } catch (const NearPoleError&) {
            lambda *= Scalar(0.5);
            continue;
          }
          if (rn < r) {
            z = zn;
            r = rn;
            stepped = true;
            break;
          }
          lambda *= Scalar(0.5);
        }
        best = std::min(best, r);
        if (!stepped) break;  // stalled, restart from the next seed
      }
      best = std::min(best, r);
    } catch (const NearPoleError&) {
      continue;
    }
    if (iterations >= max_iterations) break;
  }
  throw NoConvergenceError("invert: no preimage in the closed disc", static_cast<double>(best));
}

template <typename Scalar>
std::vector<PlanePoint<Scalar>> boundary_trace(const RationalMap<Scalar>& m, int samples) {
  if (samples < 16) throw Error("boundary_trace: need at least 16 samples");
  std::vector<PlanePoint<Scalar>> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const Scalar th = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(samples);
    out.push_back(eval(m, PlanePoint<Scalar>(std::cos(th), std::sin(th))));
  }
  return out;
}

struct ValidityReport {
  bool valid = true;
  std::string failing_check;  // "pole_inside_disc" | "derivative_vanishes" | "self_intersection"
  std::string detail;
};

namespace detail {

// Proper crossing test for closed polygons (shared endpoints not counted).
template <typename Scalar>
bool polyline_self_intersects(const std::vector<PlanePoint<Scalar>>& p) {
  const int n = static_cast<int>(p.size());
  auto orient = [](const PlanePoint<Scalar>& a, const PlanePoint<Scalar>& b,
                   const PlanePoint<Scalar>& c) {
    return (b.real() - a.real()) * (c.imag() - a.imag()) -
           (b.imag() - a.imag()) * (c.real() - a.real());
  };
  std::vector<Scalar> xlo(n), xhi(n), ylo(n), yhi(n);
  for (int i = 0; i < n; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % n];
    xlo[i] = std::min(a.real(), b.real());
    xhi[i] = std::max(a.real(), b.real());
    ylo[i] = std::min(a.imag(), b.imag());
    yhi[i] = std::max(a.imag(), b.imag());
  }
  for (int i = 0; i < n; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % n];
    const int jend = (i == 0) ? n - 1 : n;
    for (int j = i + 2; j < jend; ++j) {
      if (xhi[j] < xlo[i] || xhi[i] < xlo[j] || yhi[j] < ylo[i] || yhi[i] < ylo[j]) continue;
      const auto& c = p[j];
      const auto& d = p[(j + 1) % n];
      if (orient(a, b, c) * orient(a, b, d) < Scalar(0) &&
          orient(c, d, a) * orient(c, d, b) < Scalar(0)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

// Univalence checks: (a) poles strictly outside the closed disc, (b) phi'
// bounded away from zero on a 64x64 polar grid of the closed disc, (c) the
// 4096-point boundary polygon has no self-intersection.
template <typename Scalar>
ValidityReport validate_map(const RationalMap<Scalar>& m) {
  ValidityReport rep;
  for (const auto& t : m.terms()) {
    if (!(std::abs(t.C) > Scalar(1) + Scalar(1e-9))) {
      rep.valid = false;
      rep.failing_check = "pole_inside_disc";
      rep.detail = "pole at " + std::to_string(static_cast<double>(t.C)) +
                   " is not strictly outside the unit disc";
      return rep;
    }
  }
  Scalar min_dphi = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < 64; ++i) {
    const Scalar r = Scalar(i) / Scalar(63);
    for (int j = 0; j < 64; ++j) {
      const Scalar th = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(j) / Scalar(64);
      const PlanePoint<Scalar> z(r * std::cos(th), r * std::sin(th));
      min_dphi = std::min(min_dphi, std::abs(derivative(m, z)));
    }
  }
  if (!(min_dphi > Scalar(1e-8))) {
    rep.valid = false;
    rep.failing_check = "derivative_vanishes";
    rep.detail = "min |phi'| on the closed disc grid is " + std::to_string(double(min_dphi));
    return rep;
  }
  if (detail::polyline_self_intersects(boundary_trace(m, 4096))) {
    rep.valid = false;
    rep.failing_check = "self_intersection";
    rep.detail = "4096-point boundary trace crosses itself";
    return rep;
  }
  return rep;
}

}  // namespace csphere
