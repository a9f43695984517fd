#pragma once

// One prey, n predators with ratio-dependent birth rates and an optional
// exponentially fading memory of past prey quantities.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratiodelay/errors.hpp"

namespace ratiodelay {

enum class GrowthKind { Logistic };

/// Per-capita prey growth factor g(x, K); r * g is the growth rate.
struct GrowthLaw {
  GrowthKind kind = GrowthKind::Logistic;
  double K = 1.0;

  double value(double x) const {
    switch (kind) {
      case GrowthKind::Logistic: return 1.0 - x / K;
    }
    return 0.0;
  }

  double slope(double /*x*/) const {
    switch (kind) {
      case GrowthKind::Logistic: return -1.0 / K;
    }
    return 0.0;
  }
};

enum class ResponseKind { Holling, Ivlev };

inline const char* to_string(ResponseKind kind) {
  return kind == ResponseKind::Holling ? "holling" : "ivlev";
}

/// Predator birth rate as a function of the predator/prey ratio u = y/x.
struct FunctionalResponse {
  ResponseKind kind = ResponseKind::Holling;
  double m = 1.0;  // supremum of the birth rate
  double a = 1.0;  // half-saturation constant
};

struct Predator {
  FunctionalResponse response;
  double d = 0.0;  // death rate
};

struct ModelParams {
  double r = 1.0;
  GrowthLaw growth;
  std::vector<Predator> predators;
  std::optional<double> alpha;  // memory rate; absent for the undelayed system

  std::size_t n() const { return predators.size(); }
  bool delayed() const { return alpha.has_value(); }

  /// Throws Error(Validation / NoSurvival) when the parameter set is not admissible.
  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (predators.empty()) {
      throw Error(ErrorCode::Validation, condition::kPositiveParams, "at least one predator is required");
    }
    if (!positive(r)) throw Error(ErrorCode::Validation, condition::kPositiveParams, "r must be positive");
    if (!positive(growth.K)) throw Error(ErrorCode::Validation, condition::kPositiveParams, "K must be positive");
    if (alpha && !positive(*alpha)) {
      throw Error(ErrorCode::Validation, condition::kMemoryRate, "alpha must be positive when present");
    }
    for (std::size_t i = 0; i < predators.size(); ++i) {
      const auto& p = predators[i];
      const std::string who = "predator " + std::to_string(i + 1);
      if (!positive(p.d) || !positive(p.response.m) || !positive(p.response.a)) {
        throw Error(ErrorCode::Validation, condition::kPositiveParams, who + ": m, a, d must be positive");
      }
      if (!(p.response.m > p.d)) {
        throw Error(ErrorCode::NoSurvival, condition::kSurvival,
                    who + ": maximal birth rate m must exceed death rate d");
      }
    }
  }
};

/// Phase-space point; q is the memory variable and is only present for the
/// delayed system.
struct State {
  double x = 0.0;
  std::vector<double> y;
  std::optional<double> q;

  std::size_t size() const { return 1 + y.size() + (q ? 1 : 0); }

  std::vector<double> to_vector() const {
    std::vector<double> v;
    v.reserve(size());
    v.push_back(x);
    v.insert(v.end(), y.begin(), y.end());
    if (q) v.push_back(*q);
    return v;
  }

  static State from_vector(std::span<const double> v, std::size_t n, bool with_memory) {
    State s;
    s.x = v[0];
    s.y.assign(v.begin() + 1, v.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    if (with_memory) s.q = v[n + 1];
    return s;
  }
};

struct Equilibrium {
  double x_star = 0.0;
  std::vector<double> y_star;
  double q_star = 0.0;
  std::vector<double> u_star;

  State undelayed_state() const { return State{x_star, y_star, std::nullopt}; }
  State delayed_state() const { return State{x_star, y_star, q_star}; }
};

// ---------------------------------------------------------------------------
// Functional responses

namespace detail {
// Above this exponent e^{-1/(a u)} is treated as zero.
inline constexpr double kIvlevExponentCutoff = 700.0;

inline void require_positive_ratio(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw Error(ErrorCode::Domain, condition::kPositiveState, "response evaluated at non-positive ratio");
  }
}

inline double response_value_unchecked(const FunctionalResponse& resp, double u) {
  switch (resp.kind) {
    case ResponseKind::Holling: return resp.m / (resp.a * u + 1.0);
    case ResponseKind::Ivlev: {
      const double z = 1.0 / (resp.a * u);
      if (z > kIvlevExponentCutoff) return resp.m;
      return -resp.m * std::expm1(-z);
    }
  }
  return 0.0;
}
}  // namespace detail

inline double response_value(const FunctionalResponse& resp, double u) {
  detail::require_positive_ratio(u);
  return detail::response_value_unchecked(resp, u);
}

/// dp/du, strictly negative for both kinds.
inline double response_derivative(const FunctionalResponse& resp, double u) {
  detail::require_positive_ratio(u);
  switch (resp.kind) {
    case ResponseKind::Holling: {
      const double s = resp.a * u + 1.0;
      return -resp.m * resp.a / (s * s);
    }
    case ResponseKind::Ivlev: {
      // -m e^{-z} / (a u^2) with z = 1/(a u), i.e. -m a z^2 e^{-z}
      const double z = 1.0 / (resp.a * u);
      return -std::exp(std::log(resp.m * resp.a * z * z) - z);
    }
  }
  return 0.0;
}

/// The unique ratio u* with p(u*) = d.
inline double equilibrium_ratio(const FunctionalResponse& resp, double d) {
  if (!(resp.m > d) || !(d > 0.0)) {
    throw Error(ErrorCode::NoSurvival, condition::kSurvival, "no ratio solves p(u) = d unless m > d > 0");
  }
  switch (resp.kind) {
    case ResponseKind::Holling: return (resp.m - d) / (resp.a * d);
    case ResponseKind::Ivlev: return 1.0 / (resp.a * -std::log1p(-d / resp.m));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Equilibrium

/// Solves r g(x) = load on (0, K) by bisection. g changes sign at K, so a
/// root exists whenever 0 < load < r g(0).
inline double solve_prey_level_bisect(const GrowthLaw& growth, double r, double load, double tol = 1e-14) {
  double lo = 0.0;
  double hi = growth.K;
  auto f = [&](double x) { return r * growth.value(x) - load; };
  if (!(f(lo) > 0.0)) {
    throw Error(ErrorCode::NoPositiveEquilibrium, condition::kPositiveEquilibrium,
                "prey growth cannot balance predator load");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline Equilibrium equilibrium(const ModelParams& params) {
  params.validate();
  Equilibrium eq;
  double load = 0.0;  // sum_i d_i u_i*
  for (const auto& p : params.predators) {
    const double u = equilibrium_ratio(p.response, p.d);
    eq.u_star.push_back(u);
    load += p.d * u;
  }
  if (params.r <= load) {
    throw Error(ErrorCode::NoPositiveEquilibrium, condition::kPositiveEquilibrium,
                "no positive equilibrium: r = " + std::to_string(params.r) +
                    " does not exceed sum d_i u_i* = " + std::to_string(load));
  }
  switch (params.growth.kind) {
    case GrowthKind::Logistic: eq.x_star = params.growth.K * (1.0 - load / params.r); break;
    default: eq.x_star = solve_prey_level_bisect(params.growth, params.r, load); break;
  }
  for (double u : eq.u_star) eq.y_star.push_back(u * eq.x_star);
  eq.q_star = eq.x_star;
  return eq;
}

// ---------------------------------------------------------------------------
// Right-hand sides

namespace detail {

// Undelayed when out.size() == n + 1, delayed (ratio taken against q) when n + 2.
inline void rhs_unchecked(const ModelParams& params, std::span<const double> s, std::span<double> out) {
  const std::size_t n = params.n();
  const bool with_memory = out.size() == n + 2;
  const double x = s[0];
  const double ratio_base = with_memory ? s[n + 1] : x;
  double prey = params.r * x * params.growth.value(x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pred = params.predators[i];
    const double y = s[i + 1];
    prey -= y * response_value_unchecked(pred.response, y / x);
    out[i + 1] = y * response_value_unchecked(pred.response, y / ratio_base) - pred.d * y;
  }
  out[0] = prey;
  if (with_memory) out[n + 1] = *params.alpha * (x - s[n + 1]);
}

inline void require_interior(const State& s, std::size_t n, bool with_memory) {
  if (s.y.size() != n) {
    throw Error(ErrorCode::Validation, condition::kPositiveState, "state has wrong number of predators");
  }
  if (with_memory != s.q.has_value()) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate,
                with_memory ? "delayed system needs the memory component q" : "undelayed system has no q");
  }
  if (s.x == 0.0 || (s.q && *s.q == 0.0)) {
    throw Error(ErrorCode::Singularity, condition::kPositiveState, "ratio y/x undefined at zero prey");
  }
  bool ok = s.x > 0.0 && (!s.q || *s.q > 0.0);
  for (double y : s.y) ok = ok && y > 0.0;
  if (!ok) throw Error(ErrorCode::Domain, condition::kPositiveState, "state outside the open positive orthant");
}

}  // namespace detail

/// (x', y_1', ..., y_n') of the memoryless system.
inline std::vector<double> rhs_undelayed(const ModelParams& params, const State& s) {
  detail::require_interior(s, params.n(), false);
  const auto v = s.to_vector();
  std::vector<double> out(params.n() + 1);
  detail::rhs_unchecked(params, v, out);
  return out;
}

/// (x', y_1', ..., y_n', q') of the system with fading memory.
inline std::vector<double> rhs_delayed(const ModelParams& params, const State& s) {
  if (!params.alpha) throw Error(ErrorCode::Validation, condition::kMemoryRate, "alpha is required");
  detail::require_interior(s, params.n(), true);
  const auto v = s.to_vector();
  std::vector<double> out(params.n() + 2);
  detail::rhs_unchecked(params, v, out);
  return out;
}

/// Prey component F1(x, y) = r x g(x) - sum_i y_i p_i(y_i / x).
inline double prey_rate(const ModelParams& params, double x, std::span<const double> y) {
  double f = params.r * x * params.growth.value(x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    f -= y[i] * detail::response_value_unchecked(params.predators[i].response, y[i] / x);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Prey nullcline surface (two predators)

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double at(std::size_t k) const {
    if (count <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
};

struct NullclineCell {
  double y1 = 0.0;
  double y2 = 0.0;
  std::vector<double> roots;  // empty marks a cell without a root in (0, K)
};

struct NullclineMesh {
  GridRange y1_range;
  GridRange y2_range;
  std::vector<NullclineCell> cells;  // row-major, y1 outer
};

/// For every (y1, y2) on the grid, all x in (0, K) with F1(x, y1, y2) = 0.
/// Roots are bracketed on a uniform scan of (0, K) and refined by bisection.
inline NullclineMesh prey_nullcline_sample(const ModelParams& params, const GridRange& y1_range,
                                           const GridRange& y2_range, std::size_t scan_points = 400) {
  params.validate();
  if (params.n() != 2) {
    throw Error(ErrorCode::UnsupportedDimension, condition::kTwoPredators, "nullcline surface needs n = 2");
  }
  if (!(y1_range.lo > 0.0) || !(y2_range.lo > 0.0) || y1_range.count == 0 || y2_range.count == 0) {
    throw Error(ErrorCode::Validation, condition::kPositiveState, "grid must lie in the positive quadrant");
  }
  const double K = params.growth.K;
  NullclineMesh mesh{y1_range, y2_range, {}};
  mesh.cells.reserve(y1_range.count * y2_range.count);
  for (std::size_t i = 0; i < y1_range.count; ++i) {
    for (std::size_t j = 0; j < y2_range.count; ++j) {
      NullclineCell cell{y1_range.at(i), y2_range.at(j), {}};
      const double y[2] = {cell.y1, cell.y2};
      auto f = [&](double x) { return prey_rate(params, x, y); };
      // F1(K) < 0 always; the scan excludes the singular endpoint x = 0.
      double x_prev = K / static_cast<double>(scan_points) * 1e-3;
      double f_prev = f(x_prev);
      for (std::size_t k = 1; k <= scan_points; ++k) {
        const double x_next = K * static_cast<double>(k) / static_cast<double>(scan_points);
        const double f_next = f(x_next);
        if (f_prev == 0.0) {
          cell.roots.push_back(x_prev);
        } else if ((f_prev < 0.0) != (f_next < 0.0) && f_next != 0.0) {
          double lo = x_prev, hi = x_next, flo = f_prev;
          for (int it = 0; it < 200 && hi - lo > 1e-16 * K; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) { lo = hi = mid; break; }
            if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
          }
          cell.roots.push_back(0.5 * (lo + hi));
        }
        x_prev = x_next;
        f_prev = f_next;
      }
      mesh.cells.push_back(std::move(cell));
    }
  }
  return mesh;
}

}  // namespace ratiodelay
