#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "csphere/errors.hpp"

// Geometry kernel: points on the unit sphere, complex plane points, and the
// stereographic projection tying them together.
//
// Convention: projection from the north pole (0,0,1) onto the equatorial
// plane, w = (x + iy)/(1 - z). The south pole maps to the origin and the
// equator to the unit circle. Under this map the normalized surface measure
// d(sigma) pulls back to dA / (pi (1 + |w|^2)^2).

namespace csphere {

template <typename Scalar>
using SpherePoint = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using PlanePoint = std::complex<Scalar>;
template <typename Scalar>
using Rotation = Eigen::Matrix<Scalar, 3, 3>;

using SpherePointD = SpherePoint<double>;
using PlanePointD = PlanePoint<double>;
using RotationD = Rotation<double>;

// Tag for the projection image of the north pole itself. project() refuses the
// north pole instead of emitting large floats; this type exists so callers that
// need a total function can represent the excluded value explicitly.
struct PointAtInfinity {};

template <typename Scalar>
bool is_unit_length(const SpherePoint<Scalar>& p, Scalar tol = Scalar(1e-12)) {
  using std::abs;
  return abs(p.squaredNorm() - Scalar(1)) <= Scalar(3) * tol;
}

template <typename Scalar>
bool is_north_pole(const SpherePoint<Scalar>& p, Scalar tol = Scalar(1e-14)) {
  return (p - SpherePoint<Scalar>(Scalar(0), Scalar(0), Scalar(1))).norm() < tol;
}

template <typename Scalar>
PlanePoint<Scalar> project(const SpherePoint<Scalar>& p) {
  if (is_north_pole(p)) {
    throw NorthPoleError("project: point is the projection source (north pole)");
  }
  const Scalar d = Scalar(1) - p.z();
  return PlanePoint<Scalar>(p.x() / d, p.y() / d);
}

template <typename Scalar>
SpherePoint<Scalar> unproject(const PlanePoint<Scalar>& w) {
  const Scalar n = std::norm(w);
  const Scalar d = Scalar(1) + n;
  return SpherePoint<Scalar>(Scalar(2) * w.real() / d, Scalar(2) * w.imag() / d,
                             (n - Scalar(1)) / d);
}

// Density of the pulled-back normalized spherical measure at w.
template <typename Scalar>
Scalar spherical_density(const PlanePoint<Scalar>& w) {
  const Scalar d = Scalar(1) + std::norm(w);
  return Scalar(1) / (std::numbers::pi_v<Scalar> * d * d);
}

template <typename Scalar>
Scalar chordal_distance(const SpherePoint<Scalar>& p, const SpherePoint<Scalar>& q) {
  return (p - q).norm();
}

template <typename Scalar>
Scalar geodesic_distance(const SpherePoint<Scalar>& p, const SpherePoint<Scalar>& q) {
  using std::atan2;
  return atan2(p.cross(q).norm(), p.dot(q));
}

// Rotation with rows chosen so that R * to_neg_z = (0,0,-1) and the component
// of x_hint orthogonal to to_neg_z maps to the +x direction. Right handed.
template <typename Scalar>
Rotation<Scalar> frame_rotation(const SpherePoint<Scalar>& to_neg_z,
                                const SpherePoint<Scalar>& x_hint) {
  SpherePoint<Scalar> axis = to_neg_z.normalized();
  SpherePoint<Scalar> t = x_hint - x_hint.dot(axis) * axis;
  const Scalar tn = t.norm();
  if (tn < Scalar(1e-13)) {
    throw Error("frame_rotation: x_hint parallel to the target axis");
  }
  t /= tn;
  const SpherePoint<Scalar> r0 = t;
  const SpherePoint<Scalar> r2 = -axis;
  const SpherePoint<Scalar> r1 = r2.cross(r0);
  Rotation<Scalar> R;
  R.row(0) = r0.transpose();
  R.row(1) = r1.transpose();
  R.row(2) = r2.transpose();
  return R;
}

}  // namespace csphere
