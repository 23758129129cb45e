#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cmg/contact.hpp"
#include "cmg/parser.hpp"

namespace cmg::verify {

// Structure-definition file (JSON):
//   {
//     "eta":  [expr, expr, expr],                         required
//     "g":    [[expr x3], [expr x3], [expr x3]],          required, symmetric
//     "xi":   [expr, expr, expr],                         optional (else derived)
//     "phi":  [[expr x3], [expr x3], [expr x3]],          optional (else derived
//                                                          from d(eta) = 2 g(., phi .))
//     "domain": {
//       "bounds":  [[lo,hi], [lo,hi], [lo,hi]],
//       "periods": [null | length, ...],                  optional
//       "grid":    [nx, ny, nz]  or  "random": count,     optional
//       "seed":    integer                                optional
//     }
//   }
// Expressions follow the jetcalc grammar (x, y, z, decimal literals,
// + - * / ^int, sin, cos, exp).
inline contactcore::ContactStructure load_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructureError("cannot open structure file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw StructureError("structure file '" + path + "': " + e.what());
  }

  auto parse_field = [&](const nlohmann::json& j, const char* what) -> ScalarField {
    if (!j.is_string() && !j.is_number())
      throw StructureError(std::string("structure file: ") + what +
                           " must be an expression string");
    try {
      if (j.is_number()) return ScalarField(j.get<double>());
      return parse_expression(j.get<std::string>());
    } catch (const ParseError& e) {
      throw StructureError(std::string("structure file: bad expression for ") + what + ": " +
                           e.what());
    }
  };

  if (!doc.contains("eta") || !doc["eta"].is_array() || doc["eta"].size() != 3)
    throw StructureError("structure file: 'eta' must be an array of 3 expressions");
  if (!doc.contains("g") || !doc["g"].is_array() || doc["g"].size() != 3)
    throw StructureError("structure file: 'g' must be a 3x3 expression matrix");

  OneFormField eta;
  for (int i = 0; i < 3; ++i) eta.c[i] = parse_field(doc["eta"][i], "eta");

  std::array<std::array<ScalarField, 3>, 3> graw;
  for (int i = 0; i < 3; ++i) {
    if (!doc["g"][i].is_array() || doc["g"][i].size() != 3)
      throw StructureError("structure file: 'g' must be a 3x3 expression matrix");
    for (int j = 0; j < 3; ++j) graw[i][j] = parse_field(doc["g"][i][j], "g");
  }

  SampleDomain domain;
  if (doc.contains("domain")) {
    const auto& d = doc["domain"];
    if (d.contains("bounds")) {
      const auto& b = d["bounds"];
      if (!b.is_array() || b.size() != 3)
        throw StructureError("structure file: domain.bounds must have 3 entries");
      for (int i = 0; i < 3; ++i)
        domain.bounds[i] = {b[i][0].get<double>(), b[i][1].get<double>()};
    }
    if (d.contains("periods")) {
      const auto& p = d["periods"];
      for (int i = 0; i < 3; ++i)
        if (!p[i].is_null()) domain.periods[i] = p[i].get<double>();
    }
    if (d.contains("grid")) {
      domain.strategy = SampleDomain::Strategy::Grid;
      for (int i = 0; i < 3; ++i) domain.grid_dims[i] = d["grid"][i].get<int>();
    } else if (d.contains("random")) {
      domain.strategy = SampleDomain::Strategy::QuasiRandom;
      domain.random_count = d["random"].get<int>();
    }
    if (d.contains("seed")) domain.seed = d["seed"].get<std::uint64_t>();
  }

  // declared periods apply to every component field
  auto declare = [&domain](ScalarField f) {
    for (int a = 0; a < 3; ++a)
      if (domain.periods[a] && f.depends_on(a)) f = f.with_period(a, *domain.periods[a]);
    return f;
  };
  for (int i = 0; i < 3; ++i) eta.c[i] = declare(eta.c[i]);

  // symmetry of g is verified by evaluation at probe points
  std::vector<Vec3> probes = sample_points(domain, 5, 99);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (const Vec3& p : probes)
        if (std::abs(graw[i][j](p) - graw[j][i](p)) > 1e-12)
          throw StructureError("structure file: 'g' is not symmetric");

  SymTensorField gs;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) gs.entry(i, j) = declare(graw[i][j]);
  MetricField g(gs);

  VectorField xi = contactcore::reeb_field(eta, g);
  if (doc.contains("xi")) {
    VectorField supplied;
    for (int i = 0; i < 3; ++i) supplied.c[i] = declare(parse_field(doc["xi"][i], "xi"));
    VectorField gap = supplied - xi;
    for (const Vec3& p : probes) {
      Evaluator ev(p);
      if (norm(ev(gap)) > 1e-10)
        throw StructureError(
            "structure file: supplied xi disagrees with the derived Reeb field");
    }
    xi = supplied;
  }

  EndoField phi;
  if (doc.contains("phi")) {
    if (!doc["phi"].is_array() || doc["phi"].size() != 3)
      throw StructureError("structure file: 'phi' must be a 3x3 expression matrix");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) phi.entry(i, j) = declare(parse_field(doc["phi"][i][j], "phi"));
  } else {
    phi = contactcore::derive_phi_from_compatibility(eta, g);
  }

  contactcore::ContactStructure s(eta, xi, phi, g, domain);
  s.name = "file:" + path;
  return s;
}

}  // namespace cmg::verify

namespace cmg {
using verify::load_structure_file;
}  // namespace cmg
