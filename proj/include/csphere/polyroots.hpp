#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "csphere/errors.hpp"

namespace csphere {

// Roots of a real polynomial c[0] + c[1] x + ... + c[n] x^n via the companion
// matrix of the monic normalization, followed by two Newton polishing steps.
template <typename Scalar>
std::vector<std::complex<Scalar>> poly_roots(std::vector<Scalar> c) {
  using C = std::complex<Scalar>;
  while (!c.empty() && std::abs(c.back()) == Scalar(0)) c.pop_back();
  if (c.size() < 2) {
    if (c.empty()) throw Error("poly_roots: zero polynomial");
    return {};
  }
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<C> roots;
  if (n == 1) {
    roots = {C(-c[0] / c[1])};
  } else {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> companion =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = Scalar(1);
    Eigen::EigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(companion,
                                                                                 false);
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i));
  }
  auto horner = [&](C x, C& p, C& dp) {
    p = C(c[n]);
    dp = C(0);
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * x + p;
      p = p * x + C(c[i]);
    }
  };
  for (auto& r : roots) {
    for (int it = 0; it < 2; ++it) {
      C p, dp;
      horner(r, p, dp);
      if (std::abs(dp) > Scalar(0)) r -= p / dp;
    }
  }
  return roots;
}

// Convolution product of ascending coefficient arrays.
template <typename Scalar>
std::vector<Scalar> poly_mul(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  std::vector<Scalar> out(a.size() + b.size() - 1, Scalar(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

template <typename Scalar>
std::vector<Scalar> poly_add(std::vector<Scalar> a, const std::vector<Scalar>& b) {
  if (b.size() > a.size()) a.resize(b.size(), Scalar(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

}  // namespace csphere
