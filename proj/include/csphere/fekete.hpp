#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "csphere/charges.hpp"
#include "csphere/equilibrium.hpp"

// Weighted Fekete simulation: a brute-force oracle for the exclusion regions
// that never touches the conformal machinery. Minimizes
// E = sum_{i<j} ln(1/|x_i - x_j|) + (N-1) sum_i Q(x_i) by projected gradient
// descent with backtracking. All pair loops run over 64 fixed chunks whose
// partial results are combined in chunk order, so results are bit-identical
// for any thread count.

namespace csphere {

struct ParticleSystem {
  std::vector<SpherePointD> positions;
  ChargeConfig cfg;
  std::uint64_t rng_seed = 0;
};

inline int thread_count() {
  if (const char* s = std::getenv("CHARGE_SPHERE_THREADS")) {
    const int v = std::atoi(s);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

namespace detail {

constexpr int kChunks = 64;

// Row ranges with near-equal pair counts (row i owns pairs (i, j > i)).
inline std::vector<int> chunk_bounds(int n) {
  std::vector<int> bounds{0};
  const double total = 0.5 * double(n) * double(n - 1);
  double acc = 0;
  int next = 1;
  for (int i = 0; i < n && next < kChunks; ++i) {
    acc += n - 1 - i;
    while (next < kChunks && acc >= total * next / kChunks) {
      bounds.push_back(i + 1);
      ++next;
    }
  }
  while (static_cast<int>(bounds.size()) < kChunks + 1) bounds.push_back(n);
  return bounds;
}

template <typename Fn>
void run_chunks(Fn&& fn) {
  const int nt = std::min(thread_count(), kChunks);
  if (nt <= 1) {
    for (int t = 0; t < kChunks; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int k = 0; k < nt; ++k) {
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < kChunks; t = next.fetch_add(1)) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

// Accumulates sum of ln(d^2) as a running product with exponent harvesting,
// so the pair loop performs no per-pair logarithm.
struct LogAccum {
  double prod = 1.0;
  double logs = 0.0;
  void mul(double v) {
    prod *= v;
    if (prod < 1e-150 || prod > 1e150) {
      int e;
      prod = std::frexp(prod, &e);
      logs += e * std::numbers::ln2;
    }
  }
  double value() const { return logs + std::log(prod); }
};

struct SoA {
  std::vector<double> x, y, z;
  explicit SoA(const std::vector<SpherePointD>& p) {
    const std::size_t n = p.size();
    x.resize(n);
    y.resize(n);
    z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = p[i].x();
      y[i] = p[i].y();
      z[i] = p[i].z();
    }
  }
};

}  // namespace detail

// E = sum_{i<j} ln(1/|x_i-x_j|) + (N-1) sum_i Q(x_i).
inline double energy(const std::vector<SpherePointD>& pos, const ChargeConfig& cfg) {
  const int n = static_cast<int>(pos.size());
  const detail::SoA p(pos);
  const auto bounds = detail::chunk_bounds(n);
  std::vector<double> partial(detail::kChunks, 0.0);
  std::vector<double> mind2(detail::kChunks, std::numeric_limits<double>::infinity());
  detail::run_chunks([&](int t) {
    detail::LogAccum acc;
    double m2 = std::numeric_limits<double>::infinity();
    for (int i = bounds[t]; i < bounds[t + 1]; ++i) {
      const double xi = p.x[i], yi = p.y[i], zi = p.z[i];
      for (int j = i + 1; j < n; ++j) {
        const double dx = xi - p.x[j], dy = yi - p.y[j], dz = zi - p.z[j];
        const double d2 = dx * dx + dy * dy + dz * dz;
        acc.mul(d2);
        if (d2 < m2) m2 = d2;
      }
    }
    partial[t] = acc.value();
    mind2[t] = m2;
  });
  double log_sum = 0;
  double m2 = std::numeric_limits<double>::infinity();
  for (int t = 0; t < detail::kChunks; ++t) {
    log_sum += partial[t];
    m2 = std::min(m2, mind2[t]);
  }
  if (m2 < 1e-20) throw CollisionError("particles closer than 1e-10");
  double field = 0;
  for (const auto& x : pos) field += field_Q(cfg, x);
  return -0.5 * log_sum + (n - 1) * field;
}

inline double energy(const ParticleSystem& sys) { return energy(sys.positions, sys.cfg); }

inline ParticleSystem init_particles(int n, const ChargeConfig& cfg, std::uint64_t seed) {
  if (n < 50) throw Error("init_particles: need at least 50 particles");
  ParticleSystem sys;
  sys.cfg = cfg;
  sys.rng_seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * i;
    SpherePointD p(r * std::cos(th), r * std::sin(th), z);
    SpherePointD e1 = SpherePointD::UnitZ().cross(p);
    if (e1.norm() < 1e-6) e1 = SpherePointD::UnitX();
    e1.normalize();
    const SpherePointD e2 = p.cross(e1).normalized();
    p = (p + noise(rng) * e1 + noise(rng) * e2).normalized();
    for (int tries = 0; tries < 100; ++tries) {
      bool clear = true;
      for (const auto& c : cfg.charges()) {
        if (chordal_distance(p, c.pos) < 1e-9) clear = false;
      }
      if (clear) break;
      p = (p + 1e-6 * e1).normalized();
    }
    sys.positions.push_back(p);
  }
  return sys;
}

struct MinimizeOptions {
  int iterations = 20000;  // hard cap 50000
  double step = 0;         // 0 = auto-scale from N
  double step_growth = 1.05;
  double step_max = 0.05;
  int max_backtracks = 30;
};

namespace detail {

// Tangent-projected Euclidean gradient of E. Per-chunk private accumulators,
// combined in chunk order.
inline void gradient(const SoA& p, const ChargeConfig& cfg, int n,
                     const std::vector<int>& bounds, std::vector<std::vector<double>>& scratch,
                     std::vector<double>& gx, std::vector<double>& gy,
                     std::vector<double>& gz) {
  for (auto& s : scratch) std::fill(s.begin(), s.end(), 0.0);
  run_chunks([&](int t) {
    double* g = scratch[t].data();
    for (int i = bounds[t]; i < bounds[t + 1]; ++i) {
      const double xi = p.x[i], yi = p.y[i], zi = p.z[i];
      double ax = 0, ay = 0, az = 0;
      for (int j = i + 1; j < n; ++j) {
        const double dx = xi - p.x[j], dy = yi - p.y[j], dz = zi - p.z[j];
        const double inv = 1.0 / (dx * dx + dy * dy + dz * dz);
        const double fx = dx * inv, fy = dy * inv, fz = dz * inv;
        ax -= fx;
        ay -= fy;
        az -= fz;
        g[3 * j] += fx;
        g[3 * j + 1] += fy;
        g[3 * j + 2] += fz;
      }
      g[3 * i] += ax;
      g[3 * i + 1] += ay;
      g[3 * i + 2] += az;
    }
  });
  std::fill(gx.begin(), gx.end(), 0.0);
  std::fill(gy.begin(), gy.end(), 0.0);
  std::fill(gz.begin(), gz.end(), 0.0);
  for (int t = 0; t < kChunks; ++t) {
    const double* g = scratch[t].data();
    for (int i = 0; i < n; ++i) {
      gx[i] += g[3 * i];
      gy[i] += g[3 * i + 1];
      gz[i] += g[3 * i + 2];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (const auto& c : cfg.charges()) {
      const double dx = p.x[i] - c.pos.x(), dy = p.y[i] - c.pos.y(), dz = p.z[i] - c.pos.z();
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < 1e-18) throw SingularFieldError("particle within 1e-9 of a charge");
      const double s = (n - 1) * c.q / d2;
      gx[i] -= s * dx;
      gy[i] -= s * dy;
      gz[i] -= s * dz;
    }
    // project out the radial component and flip to the descent convention
    const double rad = gx[i] * p.x[i] + gy[i] * p.y[i] + gz[i] * p.z[i];
    gx[i] -= rad * p.x[i];
    gy[i] -= rad * p.y[i];
    gz[i] -= rad * p.z[i];
  }
}

}  // namespace detail

inline ParticleSystem minimize(ParticleSystem sys, const MinimizeOptions& opts = {}) {
  const int n = static_cast<int>(sys.positions.size());
  const int iters = std::min(opts.iterations, 50000);
  const auto bounds = detail::chunk_bounds(n);
  std::vector<std::vector<double>> scratch(detail::kChunks, std::vector<double>(3 * n, 0.0));
  std::vector<double> gx(n), gy(n), gz(n);
  double step = opts.step > 0 ? opts.step : 0.2 / (double(n) * std::sqrt(double(n)));

  double e = energy(sys.positions, sys.cfg);
  std::vector<SpherePointD> trial(sys.positions.size());
  for (int it = 0; it < iters; ++it) {
    const detail::SoA p(sys.positions);
    detail::gradient(p, sys.cfg, n, bounds, scratch, gx, gy, gz);
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (int i = 0; i < n; ++i) {
        trial[i] = SpherePointD(p.x[i] - step * gx[i], p.y[i] - step * gy[i],
                                p.z[i] - step * gz[i])
                       .normalized();
      }
      const double en = energy(trial, sys.cfg);
      if (en <= e) {
        sys.positions.swap(trial);
        e = en;
        step = std::min(step * opts.step_growth, opts.step_max);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // at the numerical floor; smaller steps cannot help
  }
  return sys;
}

// Fraction of particles strictly inside the exclusion regions eroded by the
// geodesic margin.
inline double exclusion_fraction(const ParticleSystem& sys, const SolutionGeometry& geo,
                                 double margin) {
  if (margin < 0) throw Error("exclusion_fraction: margin must be >= 0");
  int count = 0;
  for (const auto& x : sys.positions) {
    if (geo.excluded(x, margin)) ++count;
  }
  return double(count) / double(sys.positions.size());
}

inline double exclusion_fraction(const ParticleSystem& sys, const EquilibriumSolution& sol,
                                 double margin) {
  return exclusion_fraction(sys, SolutionGeometry(sol), margin);
}

// Max over random caps of |empirical fraction - sigma mass|; caps drawn with
// uniform centers and sigma-uniform radii.
inline double cap_discrepancy(const std::vector<SpherePointD>& pos, int n_caps,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(-0.98, 0.98);
  double worst = 0;
  for (int c = 0; c < n_caps; ++c) {
    SpherePointD center(gauss(rng), gauss(rng), gauss(rng));
    while (center.norm() < 1e-6) center = SpherePointD(gauss(rng), gauss(rng), gauss(rng));
    center.normalize();
    const double cos_th = unif(rng);
    int inside = 0;
    for (const auto& x : pos) {
      if (x.dot(center) >= cos_th) ++inside;
    }
    const double mass = 0.5 * (1.0 - cos_th);
    worst = std::max(worst, std::abs(double(inside) / double(pos.size()) - mass));
  }
  return worst;
}

// Empirical cap radius around `center` by quantile matching: outside the cap
// the density is (1+q) sigma, so the m-th nearest particle at geodesic d_m
// satisfies sigma_cap(theta) ~ sigma_cap(d_m) - (m - 1/2)/(N (1+q)).
// Averaging over the first k particles cancels the O(spacing) bias of the
// plain minimum.
inline double empirical_cap_radius(const std::vector<SpherePointD>& pos,
                                   const SpherePointD& center, double q_total, int k = 20) {
  std::vector<double> d;
  for (const auto& x : pos) d.push_back(geodesic_distance(x, center));
  std::sort(d.begin(), d.end());
  k = std::min<int>(k, static_cast<int>(d.size()));
  const double scale = double(pos.size()) * (1.0 + q_total);
  double sum = 0;
  for (int m = 1; m <= k; ++m) {
    const double s = std::max(0.0, 0.5 * (1.0 - std::cos(d[m - 1])) - (m - 0.5) / scale);
    sum += std::acos(1.0 - 2.0 * s);
  }
  return sum / k;
}

}  // namespace csphere
