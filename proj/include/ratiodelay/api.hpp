#pragma once

// Request/response documents shared by the command line and the HTTP
// service. Both front ends serialise exactly these values, so identical
// inputs give byte-identical JSON.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratiodelay/budget.hpp"
#include "ratiodelay/io.hpp"
#include "ratiodelay/model.hpp"
#include "ratiodelay/simulate.hpp"
#include "ratiodelay/stability.hpp"

namespace ratiodelay {

// ---------------------------------------------------------------------------
// Presets

/// Two Holling predators on logistic prey: K = 0.1, m = (16, 18),
/// a = (4, 2), d = (8, 12). The positive equilibrium exists for r > 5.
inline ModelParams paper_example(double r = 13.0, std::optional<double> alpha = 1.0) {
  ModelParams p;
  p.r = r;
  p.growth.K = 0.1;
  p.predators = {Predator{{ResponseKind::Holling, 16.0, 4.0}, 8.0}, Predator{{ResponseKind::Holling, 18.0, 2.0}, 12.0}};
  p.alpha = alpha;
  return p;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepParam { R, K, Alpha };

struct SweepRow {
  double value = 0.0;
  std::string classification;  // none | unstable | marginal | stable | sign-stable | delay-robust
  bool has_equilibrium = false;
  bool a_stable = false;
  bool sign_stable = false;
  bool delay_robust = false;
  std::optional<bool> ad_stable;
  std::optional<double> a11;
  std::optional<double> abscissa_A;
  std::optional<double> abscissa_Ad;
  std::optional<double> H;
};

/// Strongest property that holds, in the order
/// none < unstable/marginal < stable < sign-stable < delay-robust.
inline std::string classify(const StabilityReport& rep) {
  if (!rep.has_equilibrium) return "none";
  if (rep.main3 && rep.main3->delay_robust) return "delay-robust";
  if (rep.sign_stable_conditions.all) return "sign-stable";
  if (rep.stability_A == Stability::Stable) return "stable";
  return rep.stability_A == Stability::Marginal ? "marginal" : "unstable";
}

inline SweepRow sweep_row(const ModelParams& params, double value) {
  SweepRow row;
  row.value = value;
  const StabilityReport rep = analyze(params);
  row.classification = classify(rep);
  row.has_equilibrium = rep.has_equilibrium;
  if (!rep.has_equilibrium) return row;
  row.a_stable = rep.stability_A == Stability::Stable;
  row.sign_stable = rep.sign_stable_conditions.all;
  row.delay_robust = rep.main3 && rep.main3->delay_robust;
  if (rep.stability_Ad) row.ad_stable = *rep.stability_Ad == Stability::Stable;
  row.a11 = rep.jacobians->labels.a11;
  row.abscissa_A = rep.spectral_abscissa_A;
  row.abscissa_Ad = rep.spectral_abscissa_Ad;
  if (rep.hurwitz) row.H = rep.hurwitz->H;
  return row;
}

inline double sweep_value(double from, double to, std::size_t steps, std::size_t k) {
  if (steps <= 1) return from;
  return from + (to - from) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

inline std::vector<SweepRow> sweep_parameter(const ModelParams& base, SweepParam which, double from, double to,
                                             std::size_t steps, const Budget& budget = {}) {
  if (steps == 0) throw Error(ErrorCode::Validation, "", "sweep needs at least one step");
  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    budget.check();
    const double v = sweep_value(from, to, steps, k);
    ModelParams p = base;
    switch (which) {
      case SweepParam::R: p.r = v; break;
      case SweepParam::K: p.growth.K = v; break;
      case SweepParam::Alpha: p.alpha = v; break;
    }
    rows.push_back(sweep_row(p, v));
  }
  return rows;
}

namespace io {

inline json to_json(const SweepRow& r) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return {{"value", r.value},          {"class", r.classification},   {"has_equilibrium", r.has_equilibrium},
          {"A_stable", r.a_stable},    {"sign_stable", r.sign_stable}, {"delay_robust", r.delay_robust},
          {"Ad_stable", opt(r.ad_stable)}, {"a11", opt(r.a11)},         {"abscissa_A", opt(r.abscissa_A)},
          {"abscissa_Ad", opt(r.abscissa_Ad)}, {"H", opt(r.H)}};
}

/// value,class,has_equilibrium,A_stable,sign_stable,delay_robust,Ad_stable,a11,abscissa_A,abscissa_Ad,H
inline std::string to_csv(const std::vector<SweepRow>& rows, const std::string& param_name) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  auto opt = [](const std::optional<double>& v) { return v ? fmt_number(*v) : std::string(); };
  std::string out = param_name + ",class,has_equilibrium,A_stable,sign_stable,delay_robust,Ad_stable,a11,abscissa_A,"
                                 "abscissa_Ad,H\n";
  for (const auto& r : rows) {
    out += fmt_number(r.value) + "," + r.classification + "," + b(r.has_equilibrium) + "," + b(r.a_stable) + "," +
           b(r.sign_stable) + "," + b(r.delay_robust) + "," + (r.ad_stable ? b(*r.ad_stable) : std::string()) +
           "," + opt(r.a11) + "," + opt(r.abscissa_A) + "," + opt(r.abscissa_Ad) + "," + opt(r.H) + "\n";
  }
  return out;
}

}  // namespace io

// ---------------------------------------------------------------------------
// Endpoint documents

namespace api {

using json = nlohmann::json;

inline constexpr std::size_t kMaxSamples = 100000;

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoPositiveEquilibrium: return 422;
    case ErrorCode::NumericFailure: return 500;
    case ErrorCode::BudgetExceeded: return 408;
    default: return 400;
  }
}

inline json error_body(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"paper_condition", e.condition()}, {"message", e.what()}};
}

inline json applicability(const StabilityReport& rep) {
  return {{"has_equilibrium", rep.has_equilibrium}, {"failed_conditions", rep.failed_conditions()}};
}

namespace detail {
inline json envelope(const ModelParams& p, const StabilityReport& rep) {
  return {{"params", io::to_json(p)}, {"applicability", applicability(rep)}};
}

inline StabilityReport require_equilibrium(const ModelParams& p) {
  StabilityReport rep = analyze(p);
  if (!rep.has_equilibrium) equilibrium(p);  // rethrows NoPositiveEquilibrium with its message
  return rep;
}

inline double option(const json& body, const char* key, double fallback) {
  if (!body.is_object() || !body.contains(key) || body.at(key).is_null()) return fallback;
  if (!body.at(key).is_number()) {
    throw Error(ErrorCode::Validation, "", std::string("option '") + key + "' must be a number");
  }
  return body.at(key).get<double>();
}

inline std::size_t count_option(const json& body, const char* key, std::size_t fallback) {
  const double v = option(body, key, static_cast<double>(fallback));
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw Error(ErrorCode::Validation, "", std::string("option '") + key + "' must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

inline GridRange range_option(const json& body, const char* key, GridRange fallback) {
  if (!body.is_object() || !body.contains(key)) return fallback;
  const json& r = body.at(key);
  return GridRange{option(r, "lo", fallback.lo), option(r, "hi", fallback.hi), count_option(r, "count", fallback.count)};
}
}  // namespace detail

inline json equilibrium_response(const ModelParams& p) {
  const StabilityReport rep = detail::require_equilibrium(p);
  json out = detail::envelope(p, rep);
  out["equilibrium"] = io::to_json(*rep.equilibrium);
  return out;
}

inline json jacobian_response(const ModelParams& p) {
  const StabilityReport rep = detail::require_equilibrium(p);
  json out = detail::envelope(p, rep);
  out["jacobian"] = io::to_json(*rep.jacobians);
  return out;
}

inline json stability_response(const ModelParams& p) {
  const StabilityReport rep = detail::require_equilibrium(p);
  json out = detail::envelope(p, rep);
  out["report"] = io::to_json(rep);
  return out;
}

struct HCurveOptions {
  double alpha_min = 0.01;
  double alpha_max = 100.0;
  std::size_t points = 200;

  static HCurveOptions from_json(const json& body) {
    HCurveOptions o;
    o.alpha_min = detail::option(body, "alpha_min", o.alpha_min);
    o.alpha_max = detail::option(body, "alpha_max", o.alpha_max);
    o.points = detail::count_option(body, "points", o.points);
    if (o.points > kMaxSamples) throw Error(ErrorCode::Validation, "", "too many alpha points");
    return o;
  }
};

inline AlphaScan hcurve_scan(const ModelParams& p, const HCurveOptions& o, const Budget& budget = {}) {
  if (p.n() != 2) throw Error(ErrorCode::UnsupportedDimension, condition::kTwoPredators, "H(alpha) needs n = 2");
  return alpha_scan(build_jacobians(p), o.alpha_min, o.alpha_max, o.points, budget);
}

inline json hcurve_response(const ModelParams& p, const HCurveOptions& o, const Budget& budget = {}) {
  const StabilityReport rep = detail::require_equilibrium(p);
  json out = detail::envelope(p, rep);
  out["scan"] = io::to_json(hcurve_scan(p, o, budget));
  return out;
}

struct SimulateOptions {
  double t_end = 100.0;
  double dt = 0.05;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double perturbation = 0.01;    // relative offset from the equilibrium when no initial state is given
  std::optional<State> initial;

  static SimulateOptions from_json(const json& body, std::size_t n) {
    SimulateOptions o;
    o.t_end = detail::option(body, "t_end", o.t_end);
    o.dt = detail::option(body, "dt", o.dt);
    o.rel_tol = detail::option(body, "rel_tol", o.rel_tol);
    o.abs_tol = detail::option(body, "abs_tol", o.abs_tol);
    o.perturbation = detail::option(body, "perturbation", o.perturbation);
    if (body.is_object() && body.contains("initial") && !body.at("initial").is_null()) {
      const json& s = body.at("initial");
      State st;
      st.x = detail::option(s, "x", NAN);
      if (!s.contains("y") || !s.at("y").is_array() || s.at("y").size() != n) {
        throw Error(ErrorCode::Validation, "", "initial.y must list one value per predator");
      }
      for (const auto& v : s.at("y")) {
        if (!v.is_number()) throw Error(ErrorCode::Validation, "", "initial.y must be numbers");
        st.y.push_back(v.get<double>());
      }
      if (s.contains("q") && !s.at("q").is_null()) st.q = detail::option(s, "q", NAN);
      o.initial = st;
    }
    return o;
  }

  std::size_t sample_count() const {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorCode::Validation, "", "t_end and dt must be positive");
    const double count = std::floor(t_end / dt) + 2.0;
    if (count > static_cast<double>(kMaxSamples)) {
      throw Error(ErrorCode::Validation, "", "sample count exceeds 100000; increase dt or shorten t_end");
    }
    return static_cast<std::size_t>(count);
  }
};

/// Runs one simulation; the default start is the equilibrium scaled by
/// (1 + perturbation) in every component.
inline Trajectory run_simulation(const ModelParams& p, const SimulateOptions& o, const Budget& budget = {}) {
  o.sample_count();
  State s0;
  if (o.initial) {
    s0 = *o.initial;
  } else {
    const Equilibrium eq = equilibrium(p);
    s0 = p.alpha ? eq.delayed_state() : eq.undelayed_state();
    s0.x *= 1.0 + o.perturbation;
    for (double& y : s0.y) y *= 1.0 + o.perturbation;
    if (s0.q) *s0.q *= 1.0 + o.perturbation;
  }
  return integrate(p, s0, o.t_end, o.rel_tol, o.abs_tol, uniform_samples(o.t_end, o.dt), budget);
}

inline json simulate_response(const ModelParams& p, const SimulateOptions& o, const Budget& budget = {}) {
  const StabilityReport rep = analyze(p);
  if (!o.initial && !rep.has_equilibrium) equilibrium(p);
  const Trajectory traj = run_simulation(p, o, budget);
  json out = detail::envelope(p, rep);
  out["trajectory"] = io::to_json(traj);
  const OscillationEstimate osc = detect_oscillation(traj);
  out["oscillation"] = {{"heuristic", true},
                        {"sustained", osc.sustained},
                        {"amplitude_early", osc.amplitude_early},
                        {"amplitude_late", osc.amplitude_late}};
  if (rep.has_equilibrium) {
    out["equilibrium"] = io::to_json(p.alpha ? rep.equilibrium->delayed_state() : rep.equilibrium->undelayed_state());
  }
  return out;
}

struct NullclineOptions {
  GridRange y1;
  GridRange y2;

  static NullclineOptions defaults(const ModelParams& p) {
    const double K = p.growth.K;
    return {GridRange{K * 1e-3, 0.5 * K, 21}, GridRange{K * 1e-3, 0.5 * K, 21}};
  }

  static NullclineOptions from_json(const json& body, const ModelParams& p) {
    NullclineOptions o = defaults(p);
    o.y1 = detail::range_option(body, "y1", o.y1);
    o.y2 = detail::range_option(body, "y2", o.y2);
    if (o.y1.count * o.y2.count > 40000) throw Error(ErrorCode::Validation, "", "nullcline grid too large");
    return o;
  }
};

inline json nullcline_response(const ModelParams& p, const NullclineOptions& o) {
  const StabilityReport rep = analyze(p);
  json out = detail::envelope(p, rep);
  out["nullcline"] = io::to_json(prey_nullcline_sample(p, o.y1, o.y2));
  return out;
}

inline SweepParam sweep_param_from(const std::string& name) {
  if (name == "r") return SweepParam::R;
  if (name == "K") return SweepParam::K;
  if (name == "alpha") return SweepParam::Alpha;
  throw Error(ErrorCode::Validation, "", "sweep parameter must be r, K or alpha");
}

inline json bifurcate_response(const ModelParams& base, const std::string& param, double from, double to,
                               std::size_t steps, const Budget& budget = {}) {
  const auto rows = sweep_parameter(base, sweep_param_from(param), from, to, steps, budget);
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(io::to_json(r));
  return {{"params", io::to_json(base)},
          {"sweep", {{"param", param}, {"from", from}, {"to", to}, {"steps", steps}}},
          {"rows", arr}};
}

inline json presets() { return {{"paper-example", io::to_json(paper_example())}}; }

/// Model parameters of a request body. The body may name a preset and
/// override any of its fields; option keys next to the parameters are ignored.
inline ModelParams params_from_request(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::Validation, "", "request body must be a JSON object");
  if (!body.contains("preset")) return io::params_from_json(body);
  const json all = presets();
  const json& name = body.at("preset");
  if (!name.is_string() || !all.contains(name.get<std::string>())) {
    throw Error(ErrorCode::Validation, "", "unknown preset");
  }
  json merged = all.at(name.get<std::string>());
  for (const char* key : {"r", "K", "alpha", "predators"}) {
    if (body.contains(key)) merged[key] = body.at(key);
  }
  return io::params_from_json(merged);
}

/// OpenAPI-style description of the service.
inline json schema() {
  const json params_schema = {
      {"type", "object"},
      {"required", {"r", "K", "predators"}},
      {"properties",
       {{"r", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"K", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"alpha", {{"type", {"number", "null"}}, {"exclusiveMinimum", 0}}},
        {"predators",
         {{"type", "array"},
          {"minItems", 1},
          {"items",
           {{"type", "object"},
            {"required", {"kind", "m", "a", "d"}},
            {"properties",
             {{"kind", {{"enum", {"holling", "ivlev"}}}},
              {"m", {{"type", "number"}}},
              {"a", {{"type", "number"}}},
              {"d", {{"type", "number"}}}}}}}}}}}};
  const json error_schema = {{"type", "object"},
                             {"properties",
                              {{"code", {{"type", "string"}}},
                               {"paper_condition", {{"type", "string"}}},
                               {"message", {{"type", "string"}}}}}};
  auto post = [&](const char* summary, json extra_options) {
    return json{{"post",
                 {{"summary", summary},
                  {"requestBody", {{"content", {{"application/json", {{"schema", params_schema}}}}}}},
                  {"x-options", std::move(extra_options)},
                  {"responses",
                   {{"200", {{"description", "result wrapped with params and applicability"}}},
                    {"400", {{"description", "validation error"}, {"schema", error_schema}}},
                    {"408", {{"description", "time budget exceeded"}, {"schema", error_schema}}},
                    {"422", {{"description", "no positive equilibrium"}, {"schema", error_schema}}},
                    {"500", {{"description", "numeric failure"}, {"schema", error_schema}}}}}}}};
  };
  return {{"openapi", "3.0.0"},
          {"info", {{"title", "ratiodelay"}, {"version", "1.0.0"}}},
          {"paths",
           {{"/api/equilibrium", post("positive equilibrium", json::object())},
            {"/api/jacobian", post("Jacobians with named entries", json::object())},
            {"/api/stability", post("stability report", json::object())},
            {"/api/hcurve", post("H(alpha) curve and switch points",
                                 {{"alpha_min", 0.01}, {"alpha_max", 100.0}, {"points", 200}})},
            {"/api/simulate", post("trajectory of the system",
                                   {{"t_end", 100.0}, {"dt", 0.05}, {"rel_tol", 1e-9}, {"abs_tol", 1e-12},
                                    {"perturbation", 0.01}, {"initial", "{x, y[], q?} or null"}})},
            {"/api/nullcline", post("prey nullcline surface (n = 2)",
                                    {{"y1", "{lo, hi, count}"}, {"y2", "{lo, hi, count}"}})},
            {"/api/presets", {{"get", {{"summary", "named parameter sets"}}}}},
            {"/api/schema", {{"get", {{"summary", "this document"}}}}},
            {"/healthz", {{"get", {{"summary", "liveness, returns ok"}}}}}}}};
}

}  // namespace api
}  // namespace ratiodelay
