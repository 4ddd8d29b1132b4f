#pragma once

// JSON (de)serialization. Complex matrices are rows of [re, im] pairs.
// Non-finite doubles are written as null.

#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include <json.hpp>

#include "parabolic/deformation.hpp"
#include "parabolic/solver.hpp"

namespace parabolic::io {

using nlohmann::json;

inline constexpr const char* kToolName = "parabolic";
inline constexpr const char* kToolVersion = "0.1.0";

inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrix_to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw InvalidInput("schema error at " + where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

inline int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<int>();
}

inline double real(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

}  // namespace detail

inline CMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_array() || j.empty()) detail::schema_error(where, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      detail::schema_error(where, "expected a square matrix");
    for (Eigen::Index c = 0; c < n; ++c) {
      const json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2) detail::schema_error(where, "entries must be [re, im]");
      m(r, c) = Complex(detail::real(z[0], where), detail::real(z[1], where));
    }
  }
  return m;
}

// ---------------------------------------------------------------- surface

inline json to_json(const SurfaceData& d) {
  json classes = json::array();
  for (const auto& c : d.classes) classes.push_back(c.angles());
  return {{"genus", d.genus}, {"punctures", d.punctures}, {"rank", d.rank}, {"classes", classes}};
}

inline SurfaceData surface_from_json(const json& j, const std::string& where = "input") {
  SurfaceData d;
  d.genus = detail::integer(detail::field(j, "genus", where), where + ".genus");
  d.punctures = detail::integer(detail::field(j, "punctures", where), where + ".punctures");
  d.rank = detail::integer(detail::field(j, "rank", where), where + ".rank");
  const json& classes = detail::field(j, "classes", where);
  if (!classes.is_array()) detail::schema_error(where + ".classes", "expected an array");
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const std::string w = where + ".classes[" + std::to_string(k) + "]";
    if (!classes[k].is_array()) detail::schema_error(w, "expected an array of angles");
    std::vector<double> angles;
    for (const json& a : classes[k]) angles.push_back(detail::real(a, w));
    d.classes.emplace_back(std::move(angles));
  }
  d.validate();
  return d;
}

// ---------------------------------------------------------------- manifest

struct RunManifest {
  std::string command;
  SurfaceData input;
  json config = json::object();
  std::uint64_t seed = 0;
  std::map<std::string, double> timings_ms;
  bool record_timings = true;

  json to_json() const {
    json j = {{"tool", kToolName},
              {"version", kToolVersion},
              {"command", command},
              {"seed", seed},
              {"input", io::to_json(input)},
              {"config", config}};
    if (record_timings) j["timings_ms"] = timings_ms;
    return j;
  }
};

/// Wall-clock timer that records into a manifest when it goes out of scope.
class StageTimer {
 public:
  StageTimer(RunManifest& m, std::string stage)
      : manifest_(m), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto dt = std::chrono::steady_clock::now() - start_;
    manifest_.timings_ms[stage_] = std::chrono::duration<double, std::milli>(dt).count();
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunManifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- solver

inline json to_json(const SolverConfig& c) {
  return {{"max_iters", c.max_iters},     {"tolerance", c.tolerance},   {"seed", c.seed},
          {"initial_step", c.initial_step}, {"armijo", c.armijo},       {"backtrack", c.backtrack},
          {"max_backtracks", c.max_backtracks}, {"restarts", c.restarts}, {"threads", c.threads},
          {"prefer_irreducible", c.prefer_irreducible}};
}

inline json representation_to_json(const Representation& rho) {
  const auto& pres = rho.presentation();
  json gens = json::array(), mats = json::array();
  for (int i = 0; i < pres.num_generators(); ++i) {
    gens.push_back(pres.generator_name(i));
    mats.push_back(matrix_to_json(rho.image(i).matrix()));
  }
  return {{"generators", gens}, {"matrices", mats}};
}

inline json to_json(const SolveResult& r, const SurfaceData& data) {
  json j = {{"status", r.success ? "success" : "no_convergence"},
            {"residual", number(r.residual)},
            {"irreducible", r.irreducible},
            {"iterations", r.iterations},
            {"restarts_used", r.restarts_used},
            {"residual_history", r.residual_history},
            {"surface", to_json(data)}};
  if (r.representation) j["representation"] = representation_to_json(*r.representation);
  return j;
}

/// Reads the representation from a solve.json document (or any object
/// with "surface" and "representation"). Validates the relation and the
/// classes at `tol`.
inline Representation representation_from_json(const json& j, double tol = kRepresentationTolerance) {
  const SurfaceData data = surface_from_json(detail::field(j, "surface", "document"), "surface");
  const json& rep = detail::field(j, "representation", "document");
  const json& mats = detail::field(rep, "matrices", "representation");
  const PresentationInfo pres(data.genus, data.punctures);
  if (!mats.is_array() || static_cast<int>(mats.size()) != pres.num_generators())
    detail::schema_error("representation.matrices",
                         "expected " + std::to_string(pres.num_generators()) + " matrices");
  std::vector<UnitaryElement> images;
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const std::string w = "representation.matrices[" + std::to_string(k) + "]";
    const CMatrix m = matrix_from_json(mats[k], w);
    if (m.rows() != data.rank) detail::schema_error(w, "size differs from rank");
    try {
      images.emplace_back(m);
    } catch (const InvalidInput& e) {
      detail::schema_error(w, e.what());
    }
  }
  Representation rho(data, std::move(images));
  rho.validate(tol);
  return rho;
}

// ---------------------------------------------------------------- analysis

inline json to_json(const SpectralGap& g) {
  return {{"kept", number(g.kept)}, {"dropped", number(g.dropped)}, {"ratio", number(g.ratio())}};
}

inline json to_json(const AnalysisReport& r) {
  json gaps = json::object();
  for (const auto& [name, g] : r.spectral_gaps) gaps[name] = to_json(g);
  return {{"h1_dim", r.h1_dim},
          {"tangent_dim", r.tangent_dim},
          {"expected_dim", r.expected_dim},
          {"relative_h2_dim", r.relative_h2_dim},
          {"relative_h2_dim_full", r.relative_h2_dim_full},
          {"centralizer_dim", r.centralizer_dim},
          {"irreducible", r.irreducible},
          {"property_p", r.property_p},
          {"smooth", r.smooth},
          {"spectral_gaps", gaps}};
}

// ---------------------------------------------------------------- gram

inline json to_json(const GramMatrix& g) {
  return {{"basis_dim", g.basis_dim()},
          {"entries", matrix_to_json(g.entries)},
          {"rank", g.rank},
          {"smallest_singular_value", number(g.smallest_singular_value)},
          {"largest_singular_value", number(g.largest_singular_value)},
          {"skew_defect", number(g.skew_defect())},
          {"normalization", "lemma4.1"}};
}

// ---------------------------------------------------------------- deformation

inline json to_json(const VerificationReport& v) {
  json samples = json::array();
  for (const auto& s : v.samples)
    samples.push_back({{"t", s.t},
                       {"relation_residual", s.relation_residual},
                       {"conjugacy_residual", s.conjugacy_residual},
                       {"per_puncture", s.per_puncture}});
  return {{"order", v.order},
          {"samples", samples},
          {"base_relation_residual", v.base_relation_residual},
          {"noise_floor", v.noise_floor},
          {"relation_slope", number(v.relation_slope)},
          {"conjugacy_slope", number(v.conjugacy_slope)},
          {"fitted_order", number(v.fitted_order)},
          {"exact", v.exact()}};
}

inline json to_json(const DeformationState& s) {
  const auto& pres = s.base().presentation();
  json gens = json::object(), conj = json::array();
  for (int i = 0; i < pres.free_rank(); ++i) {
    json coeffs = json::array();
    for (int m = 1; m <= s.order(); ++m) coeffs.push_back(matrix_to_json(s.exponent(i, m).matrix()));
    gens[pres.generator_name(i)] = coeffs;
  }
  for (int j = 0; j < pres.punctures(); ++j) {
    json coeffs = json::array();
    for (int m = 1; m <= s.order(); ++m) coeffs.push_back(matrix_to_json(s.conjugator(j, m).matrix()));
    conj.push_back(coeffs);
  }
  return {{"order", s.order()}, {"exponents", gens}, {"conjugators", conj}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace parabolic::io
