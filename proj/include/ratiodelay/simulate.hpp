#pragma once

// Time integration of the memoryless (n+1) and fading-memory (n+2) systems
// with the Dormand-Prince 5(4) pair and its fourth-order dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ratiodelay/budget.hpp"
#include "ratiodelay/model.hpp"

namespace ratiodelay {

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  ModelParams params_snapshot;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  bool delayed() const { return !states.empty() && states.front().q.has_value(); }
};

/// Integration failure that keeps what was computed before it.
class IntegrationError : public Error {
 public:
  IntegrationError(ErrorCode code, const std::string& message, Trajectory partial)
      : Error(code, condition::kPositiveState, message), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

inline constexpr double kPositivityFloor = 1e-30;

namespace detail::dopri {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
// Fifth minus fourth order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail::dopri

/// Integrates from t = 0 to t_end. With sample_times empty every accepted step
/// is recorded; otherwise states are interpolated at the requested times. The
/// first record is always the initial condition at t = 0. When params carry
/// alpha and s0 has no memory component, q0 = x0.
inline Trajectory integrate(const ModelParams& params, const State& s0, double t_end, double rel_tol,
                            double abs_tol, std::vector<double> sample_times = {}, const Budget& budget = {}) {
  params.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::Validation, "", "t_end must be positive");
  }
  auto tol_ok = [](double t) { return t >= 1e-13 && t <= 1e-2; };
  if (!tol_ok(rel_tol) || !tol_ok(abs_tol)) {
    throw Error(ErrorCode::Validation, "", "tolerances must lie in [1e-13, 1e-2]");
  }
  State start = s0;
  if (params.alpha && !start.q) start.q = start.x;
  if (!params.alpha && start.q) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate, "initial q given but alpha is absent");
  }
  const bool with_memory = start.q.has_value();
  const std::size_t n = params.n();
  detail::require_interior(start, n, with_memory);

  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
  if (!sample_times.empty() && (sample_times.front() < 0.0 || sample_times.back() > t_end)) {
    throw Error(ErrorCode::Validation, "", "sample times must lie in [0, t_end]");
  }
  const bool dense = !sample_times.empty();
  std::size_t next_sample = 0;
  if (dense && sample_times.front() == 0.0) next_sample = 1;

  Trajectory traj;
  traj.params_snapshot = params;
  traj.times.push_back(0.0);
  traj.states.push_back(start);

  const std::size_t dim = start.size();
  using Vec = std::vector<double>;
  auto f = [&](const Vec& y, Vec& out) { detail::rhs_unchecked(params, y, out); };
  auto weighted_rms = [&](const Vec& v, const Vec& ya, const Vec& yb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double sk = abs_tol + rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      acc += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(acc / static_cast<double>(dim));
  };

  Vec y = start.to_vector();
  Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), y_new(dim), err(dim);
  f(y, k1);

  // Initial step size from the local scale of y and y'.
  double h;
  {
    const double d0 = weighted_rms(y, y, y);
    const double d1 = weighted_rms(k1, y, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h0 * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) err[i] = (k2[i] - k1[i]) / h0;
    const double d2 = weighted_rms(err, y, y);
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, t_end});
  }

  namespace dp = detail::dopri;
  const double h_min = 1e-14 * t_end;
  double t = 0.0;
  bool last_rejected = false;
  constexpr std::size_t kMaxSteps = 20'000'000;
  std::array<Vec, 5> rcont;
  for (auto& r : rcont) r.resize(dim);

  auto fail = [&](ErrorCode code, const std::string& msg) { throw IntegrationError(code, msg, traj); };

  while (t < t_end) {
    budget.check();
    if (traj.accepted_steps + traj.rejected_steps > kMaxSteps) fail(ErrorCode::NumericFailure, "step limit reached");
    if (t + h > t_end) h = t_end - t;
    if (h < h_min) fail(ErrorCode::NumericFailure, "step size underflow at t = " + std::to_string(t));

    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * dp::a21 * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (dp::a31 * k1[i] + dp::a32 * k2[i]);
    f(tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (dp::a41 * k1[i] + dp::a42 * k2[i] + dp::a43 * k3[i]);
    f(tmp, k4);
    for (std::size_t i = 0; i < dim; ++i) {
      tmp[i] = y[i] + h * (dp::a51 * k1[i] + dp::a52 * k2[i] + dp::a53 * k3[i] + dp::a54 * k4[i]);
    }
    f(tmp, k5);
    for (std::size_t i = 0; i < dim; ++i) {
      tmp[i] = y[i] + h * (dp::a61 * k1[i] + dp::a62 * k2[i] + dp::a63 * k3[i] + dp::a64 * k4[i] + dp::a65 * k5[i]);
    }
    f(tmp, k6);
    for (std::size_t i = 0; i < dim; ++i) {
      y_new[i] = y[i] + h * (dp::a71 * k1[i] + dp::a73 * k3[i] + dp::a74 * k4[i] + dp::a75 * k5[i] + dp::a76 * k6[i]);
    }
    f(y_new, k7);
    for (std::size_t i = 0; i < dim; ++i) {
      err[i] = h * (dp::e1 * k1[i] + dp::e3 * k3[i] + dp::e4 * k4[i] + dp::e5 * k5[i] + dp::e6 * k6[i] + dp::e7 * k7[i]);
    }
    const double e = weighted_rms(err, y, y_new);

    if (!(e <= 1.0)) {  // also catches NaN from leaving the orthant mid-step
      ++traj.rejected_steps;
      const double shrink = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2;
      h *= shrink;
      last_rejected = true;
      continue;
    }

    ++traj.accepted_steps;
    const double t_new = (t_end - (t + h) <= 1e-15 * t_end) ? t_end : t + h;
    if (dense) {
      for (std::size_t i = 0; i < dim; ++i) {
        rcont[0][i] = y[i];
        rcont[1][i] = y_new[i] - y[i];
        rcont[2][i] = h * k1[i] - rcont[1][i];
        rcont[3][i] = rcont[1][i] - h * k7[i] - rcont[2][i];
        rcont[4][i] = h * (dp::d1 * k1[i] + dp::d3 * k3[i] + dp::d4 * k4[i] + dp::d5 * k5[i] + dp::d6 * k6[i] +
                           dp::d7 * k7[i]);
      }
      while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
        const double theta = (sample_times[next_sample] - t) / h;
        const double theta1 = 1.0 - theta;
        for (std::size_t i = 0; i < dim; ++i) {
          tmp[i] = rcont[0][i] +
                   theta * (rcont[1][i] + theta1 * (rcont[2][i] + theta * (rcont[3][i] + theta1 * rcont[4][i])));
        }
        traj.times.push_back(sample_times[next_sample]);
        traj.states.push_back(State::from_vector(tmp, n, with_memory));
        ++next_sample;
      }
    }
    t = t_new;
    y.swap(y_new);
    k1.swap(k7);
    if (!dense) {
      traj.times.push_back(t);
      traj.states.push_back(State::from_vector(y, n, with_memory));
    }
    for (double v : y) {
      if (!(v >= kPositivityFloor)) {
        fail(ErrorCode::NumericFailure, "state left the positive orthant (component below 1e-30) at t = " +
                                            std::to_string(t));
      }
    }

    double grow = std::isfinite(e) && e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
    grow = std::clamp(grow, 0.2, 5.0);
    if (last_rejected) grow = std::min(grow, 1.0);
    h *= grow;
    last_rejected = false;
  }
  return traj;
}

/// Uniform sample times 0, dt, 2 dt, ..., t_end.
inline std::vector<double> uniform_samples(double t_end, double dt) {
  std::vector<double> out;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  out.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) out.push_back(std::min(t_end, dt * static_cast<double>(k)));
  if (out.back() < t_end) out.push_back(t_end);
  return out;
}

/// Rebuilds q from the prey samples through the integral form
///   q(t) = q(t0) e^{-alpha (t - t0)} + alpha * int_{t0}^{t} x(s) e^{-alpha (t - s)} ds
/// with the trapezoidal rule panel by panel, and returns the largest deviation
/// from the integrated q. The deviation is O(step^2).
inline double memory_consistency_check(const Trajectory& traj) {
  if (!traj.delayed() || !traj.params_snapshot.alpha) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate, "trajectory has no memory component");
  }
  if (traj.times.size() < 2) return 0.0;
  const double alpha = *traj.params_snapshot.alpha;
  double max_step = 0.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) max_step = std::max(max_step, traj.times[k] - traj.times[k - 1]);
  if (max_step > 0.01 * (1.0 + 1e-9)) {
    throw Error(ErrorCode::Validation, "", "memory check needs samples at most 0.01 apart");
  }
  double q = *traj.states.front().q;
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double h = traj.times[k] - traj.times[k - 1];
    const double decay = std::exp(-alpha * h);
    q = q * decay + 0.5 * alpha * h * (traj.states[k - 1].x * decay + traj.states[k].x);
    worst = std::max(worst, std::abs(q - *traj.states[k].q));
  }
  return worst;
}

/// Heuristic flag for apparently periodic behaviour: the peak-to-peak
/// amplitude of x over the last quarter of the run has not decayed relative
/// to the quarter before it. Not a proof of a periodic orbit.
struct OscillationEstimate {
  bool sustained = false;
  double amplitude_early = 0.0;
  double amplitude_late = 0.0;
};

inline OscillationEstimate detect_oscillation(const Trajectory& traj, double decay_ratio = 0.9) {
  OscillationEstimate est;
  if (traj.times.size() < 8) return est;
  const double t0 = traj.times.front(), t1 = traj.times.back();
  const double mid = t0 + 0.5 * (t1 - t0), three_q = t0 + 0.75 * (t1 - t0);
  double lo_a = INFINITY, hi_a = -INFINITY, lo_b = INFINITY, hi_b = -INFINITY;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k], x = traj.states[k].x;
    if (t >= mid && t < three_q) { lo_a = std::min(lo_a, x); hi_a = std::max(hi_a, x); }
    if (t >= three_q) { lo_b = std::min(lo_b, x); hi_b = std::max(hi_b, x); }
  }
  if (!(hi_a >= lo_a) || !(hi_b >= lo_b)) return est;
  est.amplitude_early = hi_a - lo_a;
  est.amplitude_late = hi_b - lo_b;
  const double scale = std::max(1e-12, std::abs(hi_b));
  est.sustained = est.amplitude_late > 1e-6 * scale && est.amplitude_late >= decay_ratio * est.amplitude_early;
  return est;
}

}  // namespace ratiodelay
