#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "csphere/charges.hpp"
#include "csphere/conformal.hpp"
#include "csphere/equilibrium.hpp"
#include "csphere/schwarz.hpp"
#include "csphere/verification.hpp"

namespace csphere {

using nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw SerializationError(path + ": " + e.what());
  }
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

inline json charges_to_json(const ChargeConfig& cfg) {
  json arr = json::array();
  for (const auto& c : cfg.charges()) {
    arr.push_back({{"pos", {c.pos.x(), c.pos.y(), c.pos.z()}}, {"q", c.q}});
  }
  return {{"charges", arr}};
}

inline ChargeConfig charges_from_json(const json& j) {
  std::vector<Charge> charges;
  try {
    for (const auto& e : j.at("charges")) {
      const auto& p = e.at("pos");
      SpherePointD pos(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
      const double norm = pos.norm();
      if (std::abs(norm - 1.0) > 1e-6) {
        throw SerializationError("charge position is not unit length (off by more than 1e-6)");
      }
      charges.push_back({pos / norm, e.at("q").get<double>()});
    }
  } catch (const json::exception& e) {
    throw SerializationError(std::string("charge config: ") + e.what());
  }
  return ChargeConfig(std::move(charges));
}

inline json map_to_json(const RationalMapD& m) {
  json arr = json::array();
  for (const auto& t : m.terms()) arr.push_back({{"A", t.A}, {"C", t.C}});
  return {{"terms", arr}};
}

inline RationalMapD map_from_json(const json& j) {
  std::vector<MapTermD> terms;
  try {
    for (const auto& e : j.at("terms")) {
      terms.push_back({e.at("A").get<double>(), e.at("C").get<double>()});
    }
  } catch (const json::exception& e) {
    throw SerializationError(std::string("map: ") + e.what());
  }
  return RationalMapD(std::move(terms));
}

inline json quadrature_to_json(const QuadratureDataD& d) {
  json pts = json::array();
  for (const auto& p : d.points) {
    pts.push_back({{"node", {p.node.real(), p.node.imag()}}, {"coefficient", p.coefficient}});
  }
  return {{"measure", d.measure == Measure::PlanarLebesgue ? "planar" : "spherical"},
          {"points", pts}};
}

inline QuadratureDataD quadrature_from_json(const json& j) {
  QuadratureDataD d;
  try {
    const std::string m = j.at("measure").get<std::string>();
    if (m == "planar") {
      d.measure = Measure::PlanarLebesgue;
    } else if (m == "spherical") {
      d.measure = Measure::Spherical;
    } else {
      throw SerializationError("unknown measure tag: " + m);
    }
    for (const auto& e : j.at("points")) {
      d.points.push_back({PlanePointD(e.at("node").at(0).get<double>(),
                                      e.at("node").at(1).get<double>()),
                          e.at("coefficient").get<double>()});
    }
  } catch (const json::exception& e) {
    throw SerializationError(std::string("quadrature data: ") + e.what());
  }
  return d;
}

inline json rotation_to_json(const RotationD& r) {
  json arr = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) arr.push_back(r(i, k));
  }
  return arr;
}

inline RotationD rotation_from_json(const json& j) {
  RotationD r;
  try {
    if (j.size() != 9) throw SerializationError("rotation must have 9 entries (row-major)");
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) r(i, k) = j.at(3 * i + k).get<double>();
    }
  } catch (const json::exception& e) {
    throw SerializationError(std::string("rotation: ") + e.what());
  }
  return r;
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Uniform:
      return "uniform";
    case Regime::DisjointCaps:
      return "disjoint_caps";
    default:
      return "merged";
  }
}

inline Regime regime_from_name(const std::string& s) {
  if (s == "uniform") return Regime::Uniform;
  if (s == "disjoint_caps") return Regime::DisjointCaps;
  if (s == "merged") return Regime::Merged;
  throw SerializationError("unknown regime tag: " + s);
}

inline json solution_to_json(const EquilibriumSolution& sol) {
  json caps = json::array();
  for (std::size_t i = 0; i < sol.caps.size(); ++i) {
    const auto& c = sol.caps[i];
    caps.push_back({{"center", {c.center.x(), c.center.y(), c.center.z()}},
                    {"angular_radius", c.angular_radius},
                    {"sigma_mass", c.sigma_mass},
                    {"charge_index", sol.cap_charge[i]}});
  }
  json comps = json::array();
  for (const auto& c : sol.components) {
    comps.push_back({{"indices", c.indices},
                     {"t_reduced", c.t_reduced},
                     {"rotation", rotation_to_json(c.rotation)},
                     {"map", map_to_json(c.map)},
                     {"planar", quadrature_to_json(c.planar)},
                     {"spherical", quadrature_to_json(c.spherical)},
                     {"fit_residual", c.fit_residual}});
  }
  json j = {{"regime", regime_name(sol.regime)},
            {"charges", charges_to_json(sol.cfg).at("charges")},
            {"q", sol.cfg.q()},
            {"caps", caps},
            {"components", comps},
            {"rotation", rotation_to_json(sol.rotation)}};
  if (std::isnan(sol.frostman_constant)) {
    j["frostman_constant"] = nullptr;
  } else {
    j["frostman_constant"] = sol.frostman_constant;
  }
  return j;
}

inline EquilibriumSolution solution_from_json(const json& j) {
  EquilibriumSolution sol;
  try {
    sol.regime = regime_from_name(j.at("regime").get<std::string>());
    sol.cfg = charges_from_json(json{{"charges", j.at("charges")}});
    for (const auto& e : j.at("caps")) {
      CapRegion cap;
      cap.center = SpherePointD(e.at("center").at(0).get<double>(),
                                e.at("center").at(1).get<double>(),
                                e.at("center").at(2).get<double>());
      cap.angular_radius = e.at("angular_radius").get<double>();
      cap.sigma_mass = e.at("sigma_mass").get<double>();
      sol.caps.push_back(cap);
      sol.cap_charge.push_back(e.at("charge_index").get<int>());
    }
    for (const auto& e : j.at("components")) {
      SolvedComponent c;
      c.indices = e.at("indices").get<std::vector<int>>();
      c.t_reduced = e.at("t_reduced").get<double>();
      c.rotation = rotation_from_json(e.at("rotation"));
      c.map = map_from_json(e.at("map"));
      c.planar = quadrature_from_json(e.at("planar"));
      c.spherical = quadrature_from_json(e.at("spherical"));
      c.fit_residual = e.at("fit_residual").get<double>();
      sol.components.push_back(std::move(c));
    }
    sol.rotation = rotation_from_json(j.at("rotation"));
    if (j.contains("frostman_constant") && !j.at("frostman_constant").is_null()) {
      sol.frostman_constant = j.at("frostman_constant").get<double>();
    }
  } catch (const json::exception& e) {
    throw SerializationError(std::string("solution: ") + e.what());
  }
  return sol;
}

inline json frostman_report_to_json(const FrostmanReport& rep) {
  json samples = json::array();
  for (const auto& s : rep.samples) {
    samples.push_back({{"z", {s.z.real(), s.z.imag()}}, {"value", s.value}});
  }
  return {{"mean", rep.mean},
          {"std", rep.std_dev},
          {"max_dev", rep.max_dev},
          {"samples", samples}};
}

}  // namespace csphere
