#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "csphere/conformal.hpp"
#include "csphere/polyroots.hpp"
#include "csphere/quadrature.hpp"

// Schwarz function S of a mapped domain (the analytic continuation of conj(w)
// off the boundary), its spherical companion S~ = S/(pi(1 + w S)), and the
// quadrature data both encode: planar nodes/coefficients from the poles of S,
// spherical nodes/coefficients from the poles of S~.

namespace csphere {

enum class Measure { PlanarLebesgue, Spherical };

template <typename Scalar>
struct QuadraturePoint {
  PlanePoint<Scalar> node;
  Scalar coefficient = 0;
};

template <typename Scalar>
struct QuadratureData {
  Measure measure = Measure::PlanarLebesgue;
  std::vector<QuadraturePoint<Scalar>> points;
};

using QuadratureDataD = QuadratureData<double>;

// S(w) = phi(1/phi^{-1}(w)), evaluated through the pole-free reciprocal form.
// Poles of S are the planar nodes phi(1/C_k), reached when the preimage comes
// within 1e-9 of a reciprocal point 1/C_k.
template <typename Scalar>
PlanePoint<Scalar> schwarz_eval(const RationalMap<Scalar>& m, const PlanePoint<Scalar>& w,
                                const PlanePoint<Scalar>& seed = PlanePoint<Scalar>(0.3, 0.1)) {
  const PlanePoint<Scalar> zeta = invert(m, w, seed);
  for (const auto& t : m.terms()) {
    if (std::abs(zeta - PlanePoint<Scalar>(Scalar(1) / t.C, 0)) < Scalar(1e-9)) {
      throw PoleOfSError("schwarz_eval: w is a pole of the Schwarz function");
    }
  }
  return eval_recip(m, zeta);
}

namespace detail {

// (1/2 pi i) contour integral of f around center on a small circle.
template <typename Scalar, typename F>
PlanePoint<Scalar> contour_residue(F&& f, const PlanePoint<Scalar>& center, Scalar radius,
                                   int samples = 128) {
  PlanePoint<Scalar> sum{};
  for (int k = 0; k < samples; ++k) {
    const Scalar th = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(samples);
    const PlanePoint<Scalar> e(std::cos(th), std::sin(th));
    sum += f(center + radius * e) * e;
  }
  return sum * (radius / Scalar(samples));
}

}  // namespace detail

// Planar data: nodes z_k = phi(1/C_k), coefficients pi (A_k/C_k^2) phi'(1/C_k).
// The closed form is cross-checked against a contour residue of
// phi(1/zeta) phi'(zeta) around 1/C_k (an independent arithmetic route).
template <typename Scalar>
QuadratureData<Scalar> planar_quadrature_data(const RationalMap<Scalar>& m) {
  QuadratureData<Scalar> out;
  out.measure = Measure::PlanarLebesgue;
  const auto& terms = m.terms();
  // Keep contour radii clear of the unit circle and of the other 1/C_k.
  Scalar min_gap = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    min_gap = std::min(min_gap, Scalar(1) - std::abs(Scalar(1) / terms[i].C));
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      min_gap = std::min(min_gap,
                         std::abs(Scalar(1) / terms[i].C - Scalar(1) / terms[j].C));
    }
  }
  const Scalar radius = std::max(Scalar(1e-6), Scalar(0.25) * min_gap);
  for (const auto& t : terms) {
    const PlanePoint<Scalar> pre(Scalar(1) / t.C, 0);
    const PlanePoint<Scalar> node = eval(m, pre);
    const PlanePoint<Scalar> closed =
        std::numbers::pi_v<Scalar> * (t.A / (t.C * t.C)) * derivative(m, pre);
    const PlanePoint<Scalar> contour =
        std::numbers::pi_v<Scalar> *
        detail::contour_residue(
            [&](const PlanePoint<Scalar>& z) { return eval_recip(m, z) * derivative(m, z); },
            pre, radius);
    if (std::abs(closed - contour) > Scalar(1e-10) * std::max(Scalar(1), std::abs(closed))) {
      throw ResidueMismatchError("planar residue: closed form and contour route disagree");
    }
    if (!(closed.real() > Scalar(0)) || std::abs(closed.imag()) > Scalar(1e-10)) {
      throw InvalidResultError("planar quadrature coefficient is not positive real");
    }
    out.points.push_back({node, closed.real()});
  }
  return out;
}

// Ascending coefficients of the polynomial whose in-disc roots zeta* satisfy
// 1 + phi(zeta) phi(1/zeta) = 0: clear denominators with Q1 = prod(C_k - z),
// Q2 = prod(C_k z - 1), N1 = sum_k A_k prod_{j!=k}(C_j - z),
// N2 = z sum_k A_k prod_{j!=k}(C_j z - 1); the polynomial is Q1 Q2 + N1 N2.
template <typename Scalar>
std::vector<Scalar> spherical_node_polynomial(const RationalMap<Scalar>& m) {
  const auto& terms = m.terms();
  std::vector<Scalar> Q1{Scalar(1)}, Q2{Scalar(1)};
  for (const auto& t : terms) {
    Q1 = poly_mul(Q1, {t.C, Scalar(-1)});
    Q2 = poly_mul(Q2, {Scalar(-1), t.C});
  }
  std::vector<Scalar> N1{Scalar(0)}, N2{Scalar(0)};
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::vector<Scalar> t1{terms[k].A}, t2{terms[k].A};
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (j == k) continue;
      t1 = poly_mul(t1, {terms[j].C, Scalar(-1)});
      t2 = poly_mul(t2, {Scalar(-1), terms[j].C});
    }
    N1 = poly_add(N1, t1);
    N2 = poly_add(N2, t2);
  }
  N2 = poly_mul(N2, {Scalar(0), Scalar(1)});
  return poly_add(poly_mul(Q1, Q2), poly_mul(N1, N2));
}

// Spherical data: nodes phi(zeta*) for the in-disc roots of the condition
// above; coefficients pi Res S~ = S/(S + w S') at the node, with the chain
// rule S'(phi(zeta)) phi'(zeta) = -phi'(1/zeta)/zeta^2. Cross-checked against
// a contour residue of phi(1/z) phi'(z)/(1 + phi(z) phi(1/z)).
template <typename Scalar>
QuadratureData<Scalar> spherical_quadrature_data(const RationalMap<Scalar>& m,
                                                 bool cross_check = true) {
  const auto roots = poly_roots(spherical_node_polynomial(m));
  std::vector<PlanePoint<Scalar>> inside;
  for (const auto& r : roots) {
    const Scalar a = std::abs(r);
    if (std::abs(a - Scalar(1)) < Scalar(1e-9)) {
      throw RootCountMismatchError("spherical node condition has a root on the unit circle");
    }
    if (a < Scalar(1)) inside.push_back(r);
  }
  if (static_cast<int>(inside.size()) != m.order()) {
    throw RootCountMismatchError("in-disc spherical root count " +
                                 std::to_string(inside.size()) + " != map order " +
                                 std::to_string(m.order()));
  }
  std::sort(inside.begin(), inside.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (std::size_t i = 0; i + 1 < inside.size(); ++i) {
    if (std::abs(inside[i] - inside[i + 1]) < Scalar(1e-9)) {
      throw RootCountMismatchError("confluent spherical nodes are not supported");
    }
  }

  QuadratureData<Scalar> out;
  out.measure = Measure::Spherical;
  for (const auto& zeta : inside) {
    const PlanePoint<Scalar> node = eval(m, zeta);
    const PlanePoint<Scalar> dphi = derivative(m, zeta);
    const PlanePoint<Scalar> S = eval_recip(m, zeta);
    const PlanePoint<Scalar> Sprime = derivative_recip(m, zeta) / dphi;
    const PlanePoint<Scalar> closed = S / (S + node * Sprime);

    if (cross_check) {
      Scalar gap = Scalar(1) - std::abs(zeta);
      for (const auto& other : inside) {
        if (&other != &zeta) gap = std::min(gap, std::abs(zeta - other));
      }
      for (const auto& t : m.terms()) {
        gap = std::min(gap, std::abs(zeta - PlanePoint<Scalar>(Scalar(1) / t.C, 0)));
      }
      const Scalar radius = std::max(Scalar(1e-6), Scalar(0.25) * gap);
      const PlanePoint<Scalar> contour = detail::contour_residue(
          [&](const PlanePoint<Scalar>& z) {
            return eval_recip(m, z) * derivative(m, z) /
                   (PlanePoint<Scalar>(1, 0) + eval(m, z) * eval_recip(m, z));
          },
          zeta, radius);
      if (std::abs(closed - contour) > Scalar(1e-10) * std::max(Scalar(1), std::abs(closed))) {
        throw ResidueMismatchError("spherical residue: closed form and contour route disagree");
      }
    }
    if (std::abs(node.imag()) > Scalar(1e-9) || std::abs(closed.imag()) > Scalar(1e-9)) {
      throw InvalidResultError("spherical node data is not real (conjugate-pair nodes)");
    }
    if (!(closed.real() > Scalar(0))) {
      throw InvalidResultError("spherical quadrature coefficient is not positive");
    }
    if (cross_check) {
      // Node must sit strictly inside the mapped domain.
      const PlanePoint<Scalar> check = invert(m, node, zeta);
      if (!(std::abs(check) < Scalar(1) - Scalar(1e-9))) {
        throw NodeOutsideDomainError("spherical node does not invert strictly inside the disc");
      }
    }
    out.points.push_back({node, closed.real()});
  }
  return out;
}

// Domain area by pullback of the quadrature identity test function f == 1.
template <typename Scalar>
Scalar mapped_area(const RationalMap<Scalar>& m, const DiscRule<Scalar>& rule) {
  return rule.integrate_unit_disc(
      [&](const PlanePoint<Scalar>& z) { return std::norm(derivative(m, z)); });
}

// Spherical measure of the mapped domain by pullback of the density.
template <typename Scalar>
Scalar mapped_sigma_mass(const RationalMap<Scalar>& m, const DiscRule<Scalar>& rule) {
  return rule.integrate_unit_disc([&](const PlanePoint<Scalar>& z) {
    return std::norm(derivative(m, z)) * spherical_density(eval(m, z));
  });
}

}  // namespace csphere
