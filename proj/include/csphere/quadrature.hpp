#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "csphere/sphere_plane.hpp"

namespace csphere {

// Gauss-Legendre nodes and weights on [-1, 1] by Golub-Welsch: eigenvalues of
// the symmetric tridiagonal Jacobi matrix are the nodes, weights come from the
// first eigenvector components.
template <typename Scalar>
struct GaussLegendre {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;

  explicit GaussLegendre(int n) {
    nodes.resize(n);
    weights.resize(n);
    if (n == 1) {
      nodes[0] = Scalar(0);
      weights[0] = Scalar(2);
      return;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> J =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const Scalar b = Scalar(k) / std::sqrt(Scalar(4) * k * k - Scalar(1));
      J(k, k - 1) = b;
      J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(J);
    for (int k = 0; k < n; ++k) {
      nodes[k] = es.eigenvalues()(k);
      const Scalar v0 = es.eigenvectors()(0, k);
      weights[k] = Scalar(2) * v0 * v0;
    }
  }
};

// Tensor rule on the unit disc: Gauss-Legendre radially (mapped to [0,1] with
// the polar Jacobian r), trapezoid in angle (spectrally accurate for smooth
// periodic integrands). integrate_unit_disc(f) ~ Int_{|z|<1} f(z) dA.
template <typename Scalar>
class DiscRule {
 public:
  DiscRule(int radial, int angular) : gl_(radial), angular_(angular) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    for (int j = 0; j < angular_; ++j) {
      const Scalar th = two_pi * Scalar(j) / Scalar(angular_);
      dirs_.emplace_back(std::cos(th), std::sin(th));
    }
    for (std::size_t i = 0; i < gl_.nodes.size(); ++i) {
      radii_.push_back((gl_.nodes[i] + Scalar(1)) / Scalar(2));
      // dA = r dr dtheta; dr maps [-1,1] -> [0,1] with factor 1/2.
      radial_w_.push_back(gl_.weights[i] * radii_.back() / Scalar(2) * two_pi /
                          Scalar(angular_));
    }
  }

  template <typename F>
  auto integrate_unit_disc(F&& f) const {
    using R = decltype(f(PlanePoint<Scalar>{}));
    R sum{};
    for (std::size_t i = 0; i < radii_.size(); ++i) {
      R ring{};
      for (int j = 0; j < angular_; ++j) {
        ring += f(radii_[i] * dirs_[j]);
      }
      sum += radial_w_[i] * ring;
    }
    return sum;
  }

  template <typename F>
  auto integrate_disc(const PlanePoint<Scalar>& center, Scalar radius, F&& f) const {
    return radius * radius *
           integrate_unit_disc([&](const PlanePoint<Scalar>& z) { return f(center + radius * z); });
  }

  int radial_order() const { return static_cast<int>(radii_.size()); }
  int angular_order() const { return angular_; }

 private:
  GaussLegendre<Scalar> gl_;
  int angular_;
  std::vector<PlanePoint<Scalar>> dirs_;
  std::vector<Scalar> radii_;
  std::vector<Scalar> radial_w_;
};

using DiscRuleD = DiscRule<double>;

}  // namespace csphere
