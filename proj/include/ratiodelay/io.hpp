#pragma once

// JSON and CSV encodings shared by the CLI, the HTTP service and the explorer.

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratiodelay/linearize.hpp"
#include "ratiodelay/model.hpp"
#include "ratiodelay/oracle.hpp"
#include "ratiodelay/simulate.hpp"
#include "ratiodelay/stability.hpp"

namespace ratiodelay::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// ModelParams

inline json to_json(const ModelParams& p) {
  json preds = json::array();
  for (const auto& pred : p.predators) {
    preds.push_back({{"kind", to_string(pred.response.kind)},
                     {"m", pred.response.m},
                     {"a", pred.response.a},
                     {"d", pred.d}});
  }
  return {{"r", p.r}, {"K", p.growth.K}, {"alpha", p.alpha ? json(*p.alpha) : json(nullptr)}, {"predators", preds}};
}

namespace detail {
inline double number_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorCode::Validation, "", where + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::Validation, "", where + ": field '" + key + "' must be a number");
  return v.get<double>();
}
}  // namespace detail

/// Parses and validates; keys outside the schema are ignored so that request
/// bodies can carry per-endpoint options next to the parameters.
inline ModelParams params_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Validation, "", "parameters must be a JSON object");
  ModelParams p;
  p.r = detail::number_field(j, "r", "params");
  p.growth.K = detail::number_field(j, "K", "params");
  if (j.contains("alpha") && !j.at("alpha").is_null()) p.alpha = detail::number_field(j, "alpha", "params");
  if (!j.contains("predators") || !j.at("predators").is_array()) {
    throw Error(ErrorCode::Validation, "", "params: 'predators' must be an array");
  }
  std::size_t idx = 0;
  for (const auto& pj : j.at("predators")) {
    const std::string where = "predator " + std::to_string(++idx);
    if (!pj.is_object()) throw Error(ErrorCode::Validation, "", where + " must be an object");
    Predator pred;
    const std::string kind = pj.value("kind", std::string("holling"));
    if (kind == "holling") pred.response.kind = ResponseKind::Holling;
    else if (kind == "ivlev") pred.response.kind = ResponseKind::Ivlev;
    else throw Error(ErrorCode::Validation, "", where + ": kind must be 'holling' or 'ivlev'");
    pred.response.m = detail::number_field(pj, "m", where);
    pred.response.a = detail::number_field(pj, "a", where);
    pred.d = detail::number_field(pj, "d", where);
    p.predators.push_back(pred);
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const Equilibrium& eq) {
  return {{"x_star", eq.x_star}, {"y_star", eq.y_star}, {"q_star", eq.q_star}, {"u_star", eq.u_star}};
}

inline json to_json(const State& s) {
  json j = {{"x", s.x}, {"y", s.y}};
  j["q"] = s.q ? json(*s.q) : json(nullptr);
  return j;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const JacobianLabels& l) {
  json j = {{"a11", l.a11}, {"a_diag", l.a_diag}, {"a_row", l.a_row}, {"a_col", l.a_col}, {"slope", l.slope}};
  j["alpha"] = l.alpha ? json(*l.alpha) : json(nullptr);
  return j;
}

inline json to_json(const JacobianPair& jac) {
  return {{"A", matrix_to_json(jac.A)},
          {"A_d", jac.A_d ? matrix_to_json(*jac.A_d) : json(nullptr)},
          {"labels", to_json(jac.labels)}};
}

inline json to_json(const std::vector<Complex>& values) {
  json arr = json::array();
  for (const auto& z : values) arr.push_back({z.real(), z.imag()});
  return arr;
}

inline json to_json(const Polynomial& p) { return p.coeffs(); }

inline json to_json(const QuarticCoeffs& c) { return {{"a3", c.a3}, {"a2", c.a2}, {"a1", c.a1}, {"a0", c.a0}}; }

inline json to_json(const HCubic& h) { return {{"A3", h.A3t}, {"A2", h.A2t}, {"A1", h.A1t}, {"A0", h.A0t}}; }

inline json to_json(const SignStabilityFlags& f) {
  return {{"a11_nonpositive", f.a11_nonpositive},
          {"slope_negative", f.slope_negative},
          {"row_negative", f.row_negative},
          {"all", f.all}};
}

inline json to_json(const Main3Flags& f) {
  json preds = json::array();
  for (const auto& p : f.predators) {
    preds.push_back({{"prey_dominates", p.prey_dominates},
                     {"self_limits_coupling", p.self_limits_coupling},
                     {"holds", p.holds()}});
  }
  return {{"applicable", f.applicable}, {"predators", preds}, {"delay_robust", f.delay_robust}};
}

inline json to_json(const StrategyFlags& f) {
  json j = {{"kind", to_string(f.kind)},       {"bound", f.bound},
            {"threshold", f.threshold},        {"exact_bound", f.exact_bound},
            {"direct", f.direct}};
  if (f.kind == ResponseKind::Ivlev) j["above_half"] = f.above_half;
  return j;
}

inline json to_json(const StabilityReport& r) {
  json j;
  j["has_equilibrium"] = r.has_equilibrium;
  if (!r.has_equilibrium) return j;
  j["equilibrium"] = to_json(*r.equilibrium);
  j["a11"] = r.jacobians->labels.a11;
  j["allee_zone"] = to_string(r.allee_zone);
  j["sign_stable_conditions"] = to_json(r.sign_stable_conditions);
  j["hurwitz_necessary"] = r.hurwitz ? json(r.hurwitz->necessary) : json(nullptr);
  j["hurwitz_sufficient"] = r.hurwitz ? json(r.hurwitz->sufficient) : json(nullptr);
  j["H"] = r.hurwitz ? json(r.hurwitz->H) : json(nullptr);
  j["quartic"] = r.quartic ? to_json(*r.quartic) : json(nullptr);
  j["h_cubic"] = r.h_cubic ? to_json(*r.h_cubic) : json(nullptr);
  j["main3_conditions"] = r.main3 ? to_json(*r.main3) : json(nullptr);
  json strat = json::array();
  for (const auto& s : r.strategy) strat.push_back(to_json(s));
  j["strategy"] = strat;
  j["strategy_threshold"] = r.strategy_threshold;
  j["eigenvalues_A"] = to_json(r.eigenvalues_A);
  j["spectral_abscissa_A"] = r.spectral_abscissa_A;
  j["stability_A"] = to_string(r.stability_A);
  j["eigenvalues_Ad"] = r.spectral_abscissa_Ad ? to_json(r.eigenvalues_Ad) : json(nullptr);
  j["spectral_abscissa_Ad"] = r.spectral_abscissa_Ad ? json(*r.spectral_abscissa_Ad) : json(nullptr);
  j["stability_Ad"] = r.stability_Ad ? json(to_string(*r.stability_Ad)) : json(nullptr);
  return j;
}

inline json to_json(const SwitchPoint& s) {
  return {{"alpha", s.alpha},
          {"H", s.H},
          {"H_scale", s.H_scale},
          {"a1", s.a1},
          {"a3", s.a3},
          {"omega", s.omega ? json(*s.omega) : json(nullptr)},
          {"nearest_real", s.nearest_real},
          {"nearest_imag", s.nearest_imag},
          {"stabilizing", s.stabilizing}};
}

inline json to_json(const AlphaScan& s) {
  json flags = json::array();
  for (auto st : s.stability) flags.push_back(to_string(st));
  json sw = json::array();
  for (const auto& p : s.switch_points) sw.push_back(to_json(p));
  return {{"alphas", s.alphas},     {"H_values", s.H_values},   {"abscissae", s.abscissae},
          {"stability", flags},     {"switch_points", sw},      {"h_cubic", to_json(s.cubic)}};
}

inline json to_json(const Trajectory& t) {
  json states = json::array();
  for (const auto& s : t.states) states.push_back(s.to_vector());
  return {{"times", t.times},
          {"states", states},
          {"delayed", t.delayed()},
          {"accepted_steps", t.accepted_steps},
          {"rejected_steps", t.rejected_steps}};
}

inline json to_json(const NullclineMesh& m) {
  json cells = json::array();
  for (const auto& c : m.cells) cells.push_back({{"y1", c.y1}, {"y2", c.y2}, {"x", c.roots}});
  return {{"y1", {{"lo", m.y1_range.lo}, {"hi", m.y1_range.hi}, {"count", m.y1_range.count}}},
          {"y2", {{"lo", m.y2_range.lo}, {"hi", m.y2_range.hi}, {"count", m.y2_range.count}}},
          {"cells", cells}};
}

inline json to_json(const oracle::OracleReport& r) {
  return {{"name", r.name},
          {"max_abs_error", r.max_abs_error},
          {"max_rel_error", r.max_rel_error},
          {"cases", r.cases},
          {"worst_case", r.worst_case}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// alpha,H,abscissa,stable
inline std::string to_csv(const AlphaScan& s) {
  std::string out = "alpha,H,abscissa,stable\n";
  for (std::size_t k = 0; k < s.alphas.size(); ++k) {
    out += fmt_number(s.alphas[k]) + "," + fmt_number(s.H_values[k]) + "," + fmt_number(s.abscissae[k]) + "," +
           to_string(s.stability[k]) + "\n";
  }
  return out;
}

/// t,x,y1..yn[,q]
inline std::string to_csv(const Trajectory& t) {
  const std::size_t n = t.params_snapshot.n();
  std::string out = "t,x";
  for (std::size_t i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
  if (t.delayed()) out += ",q";
  out += "\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    out += fmt_number(t.times[k]);
    for (double v : t.states[k].to_vector()) out += "," + fmt_number(v);
    out += "\n";
  }
  return out;
}

/// y1,y2,x with one row per root; cells without a root carry an empty x.
inline std::string to_csv(const NullclineMesh& m) {
  std::string out = "y1,y2,x\n";
  for (const auto& c : m.cells) {
    if (c.roots.empty()) out += fmt_number(c.y1) + "," + fmt_number(c.y2) + ",\n";
    for (double x : c.roots) out += fmt_number(c.y1) + "," + fmt_number(c.y2) + "," + fmt_number(x) + "\n";
  }
  return out;
}

}  // namespace ratiodelay::io
