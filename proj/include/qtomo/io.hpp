// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON state files, tomogram CSV and report serialization.
//
// State file: {"dim": N, "rho_re": [[...]], "rho_im": [[...]]} plus an
// optional "metadata" object. Tomogram CSV: header X,mu,nu,W, one row per
// sample; rows of one ray are contiguous and share (mu, nu).

#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtomo/error.hpp"
#include "qtomo/fock.hpp"
#include "qtomo/positivity.hpp"
#include "qtomo/reconstruction.hpp"
#include "qtomo/tomogram.hpp"
#include "qtomo/weyl_heisenberg.hpp"

namespace qtomo::io {

using nlohmann::json;

inline json point_json(PhasePoint v) { return json::array({v.mu, v.nu}); }
inline json element_json(const GroupElement& g) { return json::array({g.mu, g.nu, g.t}); }

inline json matrix_json(const CMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Serializes any square complex matrix in the state-file layout.
inline json matrix_state_json(const CMatrix& m, const json& metadata = nullptr) {
  json j{{"dim", m.rows()}, {"rho_re", matrix_json(m, false)}, {"rho_im", matrix_json(m, true)}};
  if (!metadata.is_null()) j["metadata"] = metadata;
  return j;
}

inline json state_json(const DensityState& s, const json& metadata = nullptr) {
  return matrix_state_json(s.matrix(), metadata);
}

/// Parses the state layout into a raw matrix; shape errors raise InvalidInput.
inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("state file: top level must be an object");
  for (const char* key : {"dim", "rho_re", "rho_im"})
    if (!j.contains(key)) throw InvalidInput(std::string("state file: missing field '") + key + "'");
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
    throw InvalidInput("state file: 'dim' must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long long>());
  CMatrix m(n, n);
  for (int part = 0; part < 2; ++part) {
    const char* key = part == 0 ? "rho_re" : "rho_im";
    const json& a = j[key];
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n)
      throw InvalidInput(std::string("state file: '") + key + "' must have dim rows");
    for (Eigen::Index r = 0; r < n; ++r) {
      const json& row = a[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw InvalidInput(std::string("state file: row ") + std::to_string(r) + " of '" + key +
                           "' must have dim entries");
      for (Eigen::Index c = 0; c < n; ++c) {
        const json& x = row[static_cast<std::size_t>(c)];
        if (!x.is_number()) throw InvalidInput(std::string("state file: non-numeric entry in '") + key + "'");
        const double val = x.get<double>();
        if (part == 0) m(r, c) = cplx(val, 0.0);
        else m(r, c) += cplx(0.0, val);
      }
    }
  }
  return m;
}

/// Parses and validates a state; invariant violations raise InvalidState.
inline DensityState state_from_json(const json& j, const StateTolerances& tol = {}) {
  return DensityState::from_matrix(matrix_from_json(j), tol);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline DensityState load_state(const std::string& path, const StateTolerances& tol = {}) {
  return state_from_json(read_json_file(path), tol);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

struct TomogramRow {
  double x, mu, nu, w;
};

inline void write_csv(std::ostream& os, const std::vector<TomogramRow>& rows) {
  os << "X,mu,nu,W\n" << std::setprecision(17);
  for (const auto& r : rows) os << r.x << ',' << r.mu << ',' << r.nu << ',' << r.w << '\n';
}

/// Reads a tabulated tomogram. Each ray needs at least two rows on a uniform,
/// increasing X grid.
inline std::vector<TabulatedRay> read_csv(std::istream& is, const std::string& name = "csv") {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput(name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "X,mu,nu,W") throw InvalidInput(name + ": header must be 'X,mu,nu,W'");

  std::vector<TabulatedRay> rays;
  std::vector<std::vector<double>> xs;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[4];
    int k = 0;
    while (std::getline(ls, cell, ',')) {
      if (k == 4) { k = 5; break; }
      try {
        std::size_t used = 0;
        v[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidInput(name + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      if (!std::isfinite(v[k])) throw InvalidInput(name + ":" + std::to_string(lineno) + ": non-finite value");
      ++k;
    }
    if (k != 4) throw InvalidInput(name + ":" + std::to_string(lineno) + ": expected 4 columns");
    const PhasePoint ray{v[1], v[2]};
    if (rays.empty() || !(rays.back().ray == ray)) {
      if (ray.is_origin()) throw DegenerateRay();
      for (const auto& r : rays)
        if (r.ray == ray) throw InvalidInput(name + ":" + std::to_string(lineno) + ": rows of a ray must be contiguous");
      rays.push_back({ray, 0.0, 0.0, {}});
      xs.emplace_back();
    }
    xs.back().push_back(v[0]);
    rays.back().values.push_back(v[3]);
  }
  if (rays.empty()) throw InvalidInput(name + ": no data rows");
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const auto& x = xs[r];
    if (x.size() < 2) throw InvalidInput(name + ": every ray needs at least two rows");
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    if (!(h > 0.0)) throw InvalidInput(name + ": X must increase along each ray");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(x[i] - (x.front() + static_cast<double>(i) * h)) > 1e-9 * std::max(1.0, std::abs(x[i])))
        throw InvalidInput(name + ": X grid must be uniform along each ray");
    rays[r].x_min = x.front();
    rays[r].x_max = x.back();
  }
  return rays;
}

inline std::vector<TabulatedRay> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_csv(in, path);
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const PropertyChecks& pc) {
  json rays = json::array();
  for (const auto& r : pc.normalization.rays) rays.push_back(point_json(r));
  return {
      {"normalization",
       {{"rays", rays}, {"integrals", pc.normalization.integrals},
        {"max_defect", pc.normalization.max_defect}, {"passed", pc.normalization.passed}}},
      {"nonnegativity",
       {{"min_value", pc.nonnegativity.min_value}, {"argmin_x", pc.nonnegativity.argmin_x},
        {"argmin_ray", point_json(pc.nonnegativity.argmin_ray)}, {"passed", pc.nonnegativity.passed}}},
      {"homogeneity",
       {{"samples", pc.homogeneity.samples}, {"max_deviation", pc.homogeneity.max_deviation},
        {"passed", pc.homogeneity.passed}}},
  };
}

inline json to_json(const CertificationReport& r) {
  json witness = json::array();
  for (const auto& v : r.witness) witness.push_back(point_json(v));
  const double lmin = r.min_eigenvalue_overall;
  return {
      {"verdict", to_string(r.verdict)},
      {"source", r.source},
      {"seed", r.options.seed},
      {"budget",
       {{"trials", r.options.trials}, {"tuple_size", r.options.tuple_size}, {"radius", r.options.radius},
        {"fail_tol", r.options.fail_tol}}},
      {"formulation", to_string(r.formulation)},
      {"fail_threshold", r.fail_threshold},
      {"min_eigenvalue", std::isfinite(lmin) ? json(lmin) : json(nullptr)},
      {"gram_violation", r.gram_violation},
      {"witness_trial", r.witness_trial},
      {"witness", witness},
      {"property_checks", to_json(r.property_checks)},
      {"diagnostics", r.diagnostics},
  };
}

inline json to_json(const SearchResult& r) {
  json witness = json::array();
  for (const auto& g : r.witness)
    witness.push_back(r.kind == GramKind::wh_group ? element_json(g) : point_json(g.projection()));
  return {{"kind", to_string(r.kind)},   {"trials", r.trials},
          {"tuple_size", r.tuple_size},  {"min_eigenvalue", r.min_eigenvalue},
          {"witness_trial", r.witness_trial}, {"witness", witness}};
}

inline json to_json(const ReconstructionResult& r) {
  return {{"source", r.source},
          {"disk_radius", r.quadrature.radius},
          {"nodes", r.quadrature.nodes},
          {"nodes_in_disk", r.nodes_in_disk},
          {"trace", r.trace},
          {"min_eigenvalue", r.min_eigenvalue},
          {"hermiticity_defect", r.hermiticity_defect},
          {"edge_magnitude", r.edge_magnitude},
          {"diagnostics", r.diagnostics}};
}

inline json to_json(const StateValidation& v) {
  return {{"accepted", v.accepted},
          {"hermiticity_defect", v.hermiticity_defect},
          {"trace_defect", v.trace_defect},
          {"min_eigenvalue", v.min_eigenvalue},
          {"reasons", v.reasons}};
}

}  // namespace qtomo::io
