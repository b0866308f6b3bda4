#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "csphere/sphere_plane.hpp"

// Charge configurations on the sphere, the external field they generate, the
// cap of influence swept clean around an isolated charge, and detection of
// whether caps stay disjoint or merge.

namespace csphere {

struct Charge {
  SpherePointD pos;
  double q = 0;
};

class ChargeConfig {
 public:
  ChargeConfig() = default;

  explicit ChargeConfig(std::vector<Charge> charges) : charges_(std::move(charges)) {
    for (const auto& c : charges_) {
      if (!(c.q > 0)) throw InvalidIntensityError("charge intensities must be positive");
      if (!is_unit_length(c.pos)) throw Error("charge positions must be unit length");
    }
    for (std::size_t i = 0; i < charges_.size(); ++i) {
      for (std::size_t j = i + 1; j < charges_.size(); ++j) {
        if (chordal_distance(charges_[i].pos, charges_[j].pos) <= 1e-9) {
          throw Error("charge positions must be pairwise distinct");
        }
      }
    }
    q_ = std::accumulate(charges_.begin(), charges_.end(), 0.0,
                         [](double s, const Charge& c) { return s + c.q; });
  }

  const std::vector<Charge>& charges() const { return charges_; }
  std::size_t size() const { return charges_.size(); }
  double q() const { return q_; }

  ChargeConfig rotated(const RotationD& R) const {
    std::vector<Charge> out = charges_;
    for (auto& c : out) c.pos = (R * c.pos).normalized();
    return ChargeConfig(std::move(out));
  }

 private:
  std::vector<Charge> charges_;
  double q_ = 0;
};

struct CapRegion {
  SpherePointD center;
  double angular_radius = 0;  // radians
  double sigma_mass = 0;      // normalized spherical measure, (1 - cos theta)/2
};

inline double field_Q(const ChargeConfig& cfg, const SpherePointD& p) {
  double sum = 0;
  for (const auto& c : cfg.charges()) {
    const double d = chordal_distance(p, c.pos);
    if (d < 1e-12) throw SingularFieldError("field_Q: evaluation point coincides with a charge");
    sum += c.q * std::log(1.0 / d);
  }
  return sum;
}

// Cap swept clean around charge i. Mass preservation of the swept charge
// forces sigma(cap) = q_i/(1+q), hence cos(theta) = 1 - 2 q_i/(1+q).
inline CapRegion cap_of_influence(const ChargeConfig& cfg, std::size_t i) {
  if (i >= cfg.size()) throw Error("cap_of_influence: index out of range");
  const double mass = cfg.charges()[i].q / (1.0 + cfg.q());
  if (mass >= 1.0) throw InvalidIntensityError("cap_of_influence: cap mass >= 1");
  CapRegion cap;
  cap.center = cfg.charges()[i].pos;
  cap.sigma_mass = mass;
  cap.angular_radius = std::acos(1.0 - 2.0 * mass);
  return cap;
}

enum class Regime { Uniform, DisjointCaps, Merged };

struct RegimeInfo {
  Regime regime = Regime::DisjointCaps;
  // Connected components of the cap-overlap graph, each a list of charge indices.
  std::vector<std::vector<int>> components;
};

// Caps overlapping within margin eps_reg (tangency included) are merged.
inline RegimeInfo detect_regime(const ChargeConfig& cfg, double eps_reg = 1e-9) {
  const int n = static_cast<int>(cfg.size());
  RegimeInfo info;
  if (n == 0) {
    info.regime = Regime::Uniform;
    return info;
  }
  std::vector<CapRegion> caps;
  caps.reserve(n);
  for (int i = 0; i < n; ++i) caps.push_back(cap_of_influence(cfg, i));

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  bool any_overlap = false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double sep = geodesic_distance(caps[i].center, caps[j].center);
      if (sep <= caps[i].angular_radius + caps[j].angular_radius + eps_reg) {
        any_overlap = true;
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> buckets(n);
  for (int i = 0; i < n; ++i) buckets[find(i)].push_back(i);
  for (auto& b : buckets)
    if (!b.empty()) info.components.push_back(std::move(b));
  info.regime = any_overlap ? Regime::Merged : Regime::DisjointCaps;
  return info;
}

}  // namespace csphere
