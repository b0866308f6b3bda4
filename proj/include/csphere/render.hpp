#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "csphere/equilibrium.hpp"
#include "csphere/verification.hpp"

// File renderers: hand-rolled SVG (no plotting dependency) and CSV traces.
// Plane figure conventions: region boundaries solid, caps of influence
// dotted, planar nodes as diamonds, spherical nodes as asterisks, dotted
// equal-area circles around the planar nodes. Sphere figure: orthographic
// view from +y; hidden-side curves dashed.

namespace csphere {

namespace svg {

struct Canvas {
  std::ostringstream body;
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;

  void grow(double x, double y) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, -y);
    max_y = std::max(max_y, -y);
  }

  static std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  }

  void polyline(const std::vector<PlanePointD>& pts, const std::string& color, double width_px,
                bool dashed, bool closed) {
    if (pts.size() < 2) return;
    body << "<path d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body << (i == 0 ? "M" : "L") << num(pts[i].real()) << " " << num(-pts[i].imag()) << " ";
      grow(pts[i].real(), pts[i].imag());
    }
    if (closed) body << "Z";
    body << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width_px
         << "\" vector-effect=\"non-scaling-stroke\"";
    if (dashed) body << " stroke-dasharray=\"5 4\"";
    body << "/>\n";
  }

  void circle(const PlanePointD& c, double r, const std::string& color, double width_px,
              bool dotted) {
    body << "<circle cx=\"" << num(c.real()) << "\" cy=\"" << num(-c.imag()) << "\" r=\""
         << num(r) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width_px
         << "\" vector-effect=\"non-scaling-stroke\"";
    if (dotted) body << " stroke-dasharray=\"2 3\"";
    body << "/>\n";
    grow(c.real() - r, c.imag() - r);
    grow(c.real() + r, c.imag() + r);
  }

  void diamond(const PlanePointD& c, double s, const std::string& color) {
    body << "<path d=\"M" << num(c.real()) << " " << num(-c.imag() - s) << " L"
         << num(c.real() + s) << " " << num(-c.imag()) << " L" << num(c.real()) << " "
         << num(-c.imag() + s) << " L" << num(c.real() - s) << " " << num(-c.imag())
         << " Z\" fill=\"" << color << "\" stroke=\"none\"/>\n";
    grow(c.real() - s, c.imag() - s);
    grow(c.real() + s, c.imag() + s);
  }

  void asterisk(const PlanePointD& c, double s, const std::string& color) {
    for (int k = 0; k < 3; ++k) {
      const double th = std::numbers::pi * k / 3.0;
      const double dx = s * std::cos(th), dy = s * std::sin(th);
      body << "<path d=\"M" << num(c.real() - dx) << " " << num(-(c.imag() - dy)) << " L"
           << num(c.real() + dx) << " " << num(-(c.imag() + dy)) << "\" stroke=\"" << color
           << "\" stroke-width=\"1.2\" vector-effect=\"non-scaling-stroke\"/>\n";
    }
    grow(c.real() - s, c.imag() - s);
    grow(c.real() + s, c.imag() + s);
  }

  void dot(const PlanePointD& c, double s, const std::string& color) {
    body << "<circle cx=\"" << num(c.real()) << "\" cy=\"" << num(-c.imag()) << "\" r=\""
         << num(s) << "\" fill=\"" << color << "\" stroke=\"none\"/>\n";
    grow(c.real() - s, c.imag() - s);
    grow(c.real() + s, c.imag() + s);
  }

  std::string finish(int width_px = 640) const {
    const double pad = 0.06 * std::max(max_x - min_x, max_y - min_y) + 1e-9;
    const double x0 = min_x - pad, y0 = min_y - pad;
    const double w = (max_x - min_x) + 2 * pad, h = (max_y - min_y) + 2 * pad;
    const int height_px = static_cast<int>(width_px * h / w + 0.5);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
        << height_px << "\" viewBox=\"" << num(x0) << " " << num(y0) << " " << num(w) << " "
        << num(h) << "\">\n"
        << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

}  // namespace svg

namespace detail {

// Input-frame boundary samples for every region, caps first then components,
// with a shared sample count.
inline std::vector<std::vector<SpherePointD>> input_frame_boundaries(
    const EquilibriumSolution& sol, int samples) {
  std::vector<std::vector<SpherePointD>> out;
  for (const auto& cap : sol.caps) {
    RotationD F = frame_rotation<double>(
        -cap.center,
        std::abs(cap.center.z()) < 0.9 ? SpherePointD::UnitZ() : SpherePointD::UnitX());
    std::vector<SpherePointD> bd;
    for (int k = 0; k < samples; ++k) {
      const double th = 2.0 * std::numbers::pi * k / samples;
      const SpherePointD local(std::sin(cap.angular_radius) * std::cos(th),
                               std::sin(cap.angular_radius) * std::sin(th),
                               std::cos(cap.angular_radius));
      bd.push_back(F.transpose() * local);
    }
    out.push_back(std::move(bd));
  }
  for (const auto& comp : sol.components) {
    std::vector<SpherePointD> bd;
    for (const auto& w : boundary_trace(comp.map, samples)) {
      bd.push_back(comp.rotation.transpose() * unproject(w));
    }
    out.push_back(std::move(bd));
  }
  return out;
}

inline std::vector<SpherePointD> cap_circle(const SpherePointD& center, double radius,
                                            int samples) {
  RotationD F = frame_rotation<double>(
      -center, std::abs(center.z()) < 0.9 ? SpherePointD::UnitZ() : SpherePointD::UnitX());
  std::vector<SpherePointD> bd;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    bd.push_back(F.transpose() * SpherePointD(std::sin(radius) * std::cos(th),
                                              std::sin(radius) * std::sin(th),
                                              std::cos(radius)));
  }
  return bd;
}

// Splits a closed sphere curve into runs of constant visibility (y >= 0 is
// toward the viewer) and draws back runs dashed gray, front runs in color.
inline void draw_sphere_curve(svg::Canvas& cv, const std::vector<SpherePointD>& pts,
                              const std::string& color, bool dotted) {
  if (pts.size() < 2) return;
  auto flush = [&](std::vector<PlanePointD>& run, bool front) {
    if (run.size() >= 2) {
      cv.polyline(run, front ? color : "#b0b0b0", front ? 1.6 : 1.0, dotted || !front, false);
    }
    run.clear();
  };
  std::vector<PlanePointD> run;
  bool front = pts.empty() ? true : pts[0].y() >= 0;
  for (std::size_t i = 0; i <= pts.size(); ++i) {
    const SpherePointD& p = pts[i % pts.size()];
    const bool f = p.y() >= 0;
    run.emplace_back(p.x(), p.z());
    if (f != front) {
      flush(run, front);
      run.emplace_back(p.x(), p.z());
      front = f;
    }
    if (i == pts.size()) flush(run, front);
  }
}

}  // namespace detail

inline std::string boundary_csv(const EquilibriumSolution& sol, int samples = 512) {
  std::ostringstream out;
  out.precision(15);
  out << "region,sample,w_re,w_im,x,y,z\n";
  const auto regions = detail::input_frame_boundaries(sol, samples);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (std::size_t k = 0; k < regions[r].size(); ++k) {
      const SpherePointD& p = regions[r][k];
      const PlanePointD w = project(SpherePointD(sol.rotation * p));
      out << r << "," << k << "," << w.real() << "," << w.imag() << "," << p.x() << ","
          << p.y() << "," << p.z() << "\n";
    }
  }
  return out.str();
}

inline std::string figure_plane_svg(const EquilibriumSolution& sol) {
  svg::Canvas cv;
  const PresentedRegions P = present_regions(sol, 1024);
  double scale = std::max(0.5, P.extent);
  // caps of influence of every charge, where they project to discs
  for (std::size_t i = 0; i < sol.cfg.charges().size(); ++i) {
    try {
      const CapRegion cap = cap_of_influence(sol.cfg, static_cast<int>(i));
      const ProjectedDisc d = project_cap(sol.rotation * cap.center, cap.angular_radius);
      cv.circle(d.center, d.radius, "#2ca02c", 1.0, true);
    } catch (const Error&) {
      // cap reaches the projection pole; it has no bounded planar image
    }
  }
  for (const auto& bd : P.boundaries) {
    cv.polyline(bd, "#d62728", 1.8, false, true);
  }
  for (const auto& comp : sol.components) {
    const RotationD pres = sol.rotation * comp.rotation.transpose();
    for (const auto& p : comp.planar.points) {
      const PlanePointD w = project(SpherePointD(pres * unproject(p.node)));
      cv.diamond(w, 0.02 * scale, "#000000");
      cv.circle(w, std::sqrt(p.coefficient / std::numbers::pi), "#7f7f7f", 1.0, true);
    }
    for (const auto& p : comp.spherical.points) {
      cv.asterisk(project(SpherePointD(pres * unproject(p.node))), 0.025 * scale, "#000000");
    }
  }
  for (const auto& w : P.charge_pos) {
    cv.dot(w, 0.012 * scale, "#1f77b4");
  }
  return cv.finish();
}

inline std::string figure_sphere_svg(const EquilibriumSolution& sol) {
  svg::Canvas cv;
  // silhouette of the unit sphere seen from +y
  cv.circle(PlanePointD(0, 0), 1.0, "#404040", 1.2, false);
  const auto regions = detail::input_frame_boundaries(sol, 1024);
  for (const auto& bd : regions) {
    detail::draw_sphere_curve(cv, bd, "#d62728", false);
  }
  for (std::size_t i = 0; i < sol.cfg.charges().size(); ++i) {
    const CapRegion cap = cap_of_influence(sol.cfg, static_cast<int>(i));
    detail::draw_sphere_curve(cv, detail::cap_circle(cap.center, cap.angular_radius, 512),
                              "#2ca02c", true);
  }
  for (const auto& comp : sol.components) {
    for (const auto& p : comp.spherical.points) {
      const SpherePointD s = comp.rotation.transpose() * unproject(p.node);
      if (s.y() >= 0) cv.asterisk(PlanePointD(s.x(), s.z()), 0.03, "#000000");
    }
  }
  for (const auto& c : sol.cfg.charges()) {
    cv.dot(PlanePointD(c.pos.x(), c.pos.z()), 0.015, c.pos.y() >= 0 ? "#1f77b4" : "#9ecae1");
  }
  return cv.finish();
}

}  // namespace csphere
