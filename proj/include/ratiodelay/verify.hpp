#pragma once

// Reproducible verification suite: every numbered acceptance criterion is
// evaluated here, so the command line and the test binary print identical
// verdicts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ratiodelay/api.hpp"
#include "ratiodelay/oracle.hpp"
#include "ratiodelay/sampling.hpp"

namespace ratiodelay::verify {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  void add(std::string name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
};

namespace detail {

inline std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double max_entry_error(const Matrix& got, const Matrix& want, bool relative) {
  if (got.rows() != want.rows() || got.cols() != want.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.rows(); ++i) {
    for (Eigen::Index j = 0; j < got.cols(); ++j) {
      const double scale = relative ? std::max(1.0, std::abs(want(i, j))) : 1.0;
      worst = std::max(worst, std::abs(got(i, j) - want(i, j)) / scale);
    }
  }
  return worst;
}

/// Largest coefficientwise relative error, with a floor of 1e-14 times the
/// largest expected magnitude for coefficients that vanish.
inline double poly_error(const Polynomial& got, const Polynomial& want) {
  double scale = 0.0;
  for (double c : want.coeffs()) scale = std::max(scale, std::abs(c));
  return max_relative_coeff_error(got, want, 1e-14 * std::max(scale, 1.0));
}

inline double distance(const State& a, const State& b) {
  const auto va = a.to_vector(), vb = b.to_vector();
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) acc += (va[i] - vb[i]) * (va[i] - vb[i]);
  return std::sqrt(acc);
}

inline State scaled(State s, double factor) {
  s.x *= factor;
  for (double& y : s.y) y *= factor;
  if (s.q) *s.q *= factor;
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult equilibrium_exactness() {
  CriterionResult c{1, "Equilibrium exactness", {}};
  const Equilibrium eq = equilibrium(paper_example(13.0));
  const double x = 0.1 * (1.0 - 5.0 / 13.0), y = (1.0 / 40.0) * (1.0 - 5.0 / 13.0);
  const double ex = detail::rel_err(eq.x_star, x);
  const double ey = std::max(detail::rel_err(eq.y_star[0], y), detail::rel_err(eq.y_star[1], y));
  c.add("x* = 0.1(1-5/13)", ex <= 1e-12, "rel err " + detail::num(ex));
  c.add("y_i* = (1/40)(1-5/13)", ey <= 1e-12, "rel err " + detail::num(ey));
  c.add("q* = x*", eq.q_star == eq.x_star);
  return c;
}

inline CriterionResult jacobian_exactness() {
  CriterionResult c{2, "Jacobian exactness", {}};
  const JacobianPair jac = build_jacobians(paper_example(13.0, 1.0));
  Matrix A(3, 3);
  A << -5, -4, -8, 1, -4, 0, 1, 0, -4;
  Matrix Ad(4, 4);
  Ad << -5, -4, -8, 0, 0, -4, 0, 1, 0, 0, -4, 1, 1, 0, 0, -1;
  const double eA = detail::max_entry_error(jac.A, A, false);
  const double eAd = jac.A_d ? detail::max_entry_error(*jac.A_d, Ad, false) : INFINITY;
  c.add("A at r=13", eA <= 1e-12, "max abs err " + detail::num(eA));
  c.add("A_d at r=13, alpha=1", eAd <= 1e-12, "max abs err " + detail::num(eAd));
  return c;
}

inline CriterionResult characteristic_polynomials() {
  CriterionResult c{3, "Characteristic polynomials", {}};
  const Polynomial lam = Polynomial::linear_factor(0.0);
  const Polynomial m4 = Polynomial::constant(-4.0) - lam;
  double worst_A = 0.0, worst_schur = 0.0, worst_direct = 0.0;
  for (double r : {6.0, 7.0, 8.0, 13.0}) {
    for (double alpha : {0.2, 1.0, 10.0}) {
      const JacobianPair jac = build_jacobians(paper_example(r, alpha));
      const Polynomial dA = m4 * (lam * lam + lam * (r - 4.0) + Polynomial::constant(4.0 * (r - 5.0)));
      const Polynomial dAd =
          m4 * ((Polynomial::constant(8.0 - r) - lam) * m4 * (Polynomial::constant(-alpha) - lam) -
                Polynomial::constant(12.0 * alpha));
      worst_A = std::max(worst_A, detail::poly_error(char_poly(jac.A), dA.monic()));
      worst_schur = std::max(worst_schur, detail::poly_error(char_poly_delayed_schur(jac), dAd.monic()));
      worst_direct = std::max(worst_direct, detail::poly_error(char_poly(*jac.A_d), dAd.monic()));
    }
  }
  c.add("char_poly(A) vs factored form", worst_A <= 1e-10, "max rel err " + detail::num(worst_A));
  c.add("char_poly_delayed_schur vs factored form", worst_schur <= 1e-10, "max rel err " + detail::num(worst_schur));
  c.add("char_poly(A_d) vs factored form", worst_direct <= 1e-10, "max rel err " + detail::num(worst_direct));
  return c;
}

inline CriterionResult thresholds() {
  CriterionResult c{4, "Thresholds in r", {}};
  std::vector<SweepRow> rows = sweep_parameter(paper_example(13.0, 1.0), SweepParam::R, 4.0, 14.0, 101);
  for (double probe : {4.9, 5.0, 5.1, 7.9, 8.0, 8.1, 11.9, 12.0, 12.1}) rows.push_back(sweep_row(paper_example(probe, 1.0), probe));
  std::size_t bad_none = 0, bad_stable = 0, bad_sign = 0, bad_robust = 0;
  for (const auto& row : rows) {
    const double r = row.value;
    bad_none += row.has_equilibrium == (r <= 5.0) ? 1 : 0;
    bad_stable += (row.has_equilibrium && row.a_stable) != (r > 5.0) ? 1 : 0;
    bad_sign += (row.has_equilibrium && row.sign_stable) != (r >= 8.0) ? 1 : 0;
    bad_robust += (row.has_equilibrium && row.delay_robust) != (r > 12.0) ? 1 : 0;
  }
  const std::string of = " mismatches of " + std::to_string(rows.size());
  c.add("no equilibrium iff r <= 5", bad_none == 0, std::to_string(bad_none) + of);
  c.add("A stable iff r > 5", bad_stable == 0, std::to_string(bad_stable) + of);
  c.add("sign-stability conditions iff r >= 8", bad_sign == 0, std::to_string(bad_sign) + of);
  c.add("delay-robust conditions iff r > 12", bad_robust == 0, std::to_string(bad_robust) + of);
  return c;
}

inline CriterionResult delay_robust_case() {
  CriterionResult c{5, "Delay-robust case r=13", {}};
  const JacobianPair jac = build_jacobians(paper_example(13.0, 1.0));
  const AlphaScan scan = alpha_scan(jac, 0.01, 100.0, 200);
  std::size_t bad_H = 0, bad_stable = 0;
  for (std::size_t k = 0; k < scan.alphas.size(); ++k) {
    bad_H += scan.H_values[k] > 0.0 ? 0 : 1;
    bad_stable += scan.abscissae[k] < 0.0 ? 0 : 1;
  }
  c.add("H(alpha) > 0 on 200 log-spaced alpha", bad_H == 0 && scan.alphas.size() == 200,
        std::to_string(bad_H) + " failures");
  c.add("abscissa(A_d) < 0 on the same grid", bad_stable == 0, std::to_string(bad_stable) + " failures");
  const double h1 = hurwitz_quartic(quartic_coeffs(jac)).H;
  c.add("H(1) = 95976", detail::rel_err(h1, 95976.0) <= 1e-6, "H(1) = " + detail::num(h1));
  return c;
}

inline CriterionResult delay_induced_instability() {
  CriterionResult c{6, "Delay-induced instability r=7", {}};
  const JacobianPair jac1 = build_jacobians(paper_example(7.0, 1.0));
  const JacobianPair jac10 = with_alpha(jac1, 10.0);
  const double h1 = hurwitz_quartic(quartic_coeffs(jac1)).H;
  const double h10 = hurwitz_quartic(quartic_coeffs(jac10)).H;
  c.add("H(1) = -1584", detail::rel_err(h1, -1584.0) <= 1e-9, "H(1) = " + detail::num(h1));
  c.add("A_d unstable at alpha=1", oracle::eigen_stability_oracle(*jac1.A_d) == Stability::Unstable);
  c.add("H(10) = 117648", detail::rel_err(h10, 117648.0) <= 1e-9, "H(10) = " + detail::num(h10));
  c.add("A_d stable at alpha=10", oracle::eigen_stability_oracle(*jac10.A_d) == Stability::Stable);
  const AlphaScan scan = alpha_scan(jac1, 0.01, 100.0, 200);
  std::size_t found = 0;
  std::string where;
  for (const auto& sp : scan.switch_points) {
    if (!(sp.alpha > 1.0 && sp.alpha < 10.0) || !sp.omega) continue;
    if (std::abs(sp.nearest_real) < 1e-6 && std::abs(sp.nearest_imag - *sp.omega) <= 1e-6) {
      ++found;
      where += (where.empty() ? "alpha = " : ", ") + detail::num(sp.alpha);
    }
  }
  c.add("switch in (1,10) with root pair +-i sqrt(a1/a3)", found >= 1,
        found ? where : std::to_string(scan.switch_points.size()) + " switches, none qualifying");
  return c;
}

inline CriterionResult property_suites(std::size_t samples = 10000) {
  CriterionResult c{7, "Lemma and theorem property suites", {}};
  sampling::Rng rng(20240701);

  std::size_t bad = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto jac = assemble_jacobians(sampling::random_pattern_labels(rng, 2, sampling::A11Sign::NonPositive));
    const QuarticCoeffs q = quartic_coeffs(jac);
    bad += (q.a3 > 0 && q.a2 > 0 && q.a1 > 0 && q.a0 > 0) ? 0 : 1;
  }
  c.add("quartic coefficients positive for a11 <= 0", bad == 0, std::to_string(bad) + " of " + std::to_string(samples));

  bad = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto jac = assemble_jacobians(sampling::random_pattern_labels(rng, 2, sampling::A11Sign::Negative));
    const HCubic h = h_cubic(jac);
    bad += (h.A3t > 0 && h.A0t > 0) ? 0 : 1;
  }
  c.add("leading and constant H coefficients positive for a11 < 0", bad == 0,
        std::to_string(bad) + " of " + std::to_string(samples));

  bad = 0;
  std::size_t unstable = 0;
  const std::vector<double> grid = log_grid(1e-3, 1e3, 13);
  for (std::size_t k = 0; k < samples; ++k) {
    const auto jac = assemble_jacobians(sampling::random_robust_labels(rng, 2));
    const HCubic h = h_cubic(jac);
    bad += (h.A1t > 0 && h.A2t > 0) ? 0 : 1;
    for (double alpha : grid) {
      if (spectral_abscissa(eigenvalues(assemble_delayed(jac.labels, alpha))) >= 0.0) {
        ++unstable;
        break;
      }
    }
  }
  c.add("delay-robust conditions give positive middle H coefficients", bad == 0,
        std::to_string(bad) + " of " + std::to_string(samples));
  c.add("delay-robust conditions give stability over alpha in [1e-3, 1e3]", unstable == 0,
        std::to_string(unstable) + " of " + std::to_string(samples));

  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double m = sampling::log_uniform(rng, 0.5, 50.0);
    const double d = m * sampling::uniform(rng, 0.02, 0.98);
    const FunctionalResponse resp{ResponseKind::Holling, m, 1.0};
    const double u = equilibrium_ratio(resp, d);
    const double slope = response_derivative(resp, u);
    const double diag = u * slope, row = -d - u * slope, col = -u * u * slope;
    worst = std::max(worst, std::abs(diag * diag + row * col) / (diag * diag));
  }
  c.add("Holling boundary identity at a = 1", worst <= 1e-12, "max rel gap " + detail::num(worst));

  std::size_t disagree = 0, ivlev_cases = 0;
  std::string example;
  for (double m : {1.0, 4.0, 16.0, 50.0}) {
    for (double frac : {0.05, 0.2, 0.5, 0.8, 0.95}) {
      const double d = m * frac;
      for (double a : {0.1, 0.2, 0.3, 0.35, 0.45, 0.5, 0.55, 0.6, 0.8, 1.0, 2.0}) {
        ModelParams p;
        p.r = 1.0;
        p.growth.K = 1.0;
        p.predators = {Predator{{ResponseKind::Ivlev, m, a}, d}};
        const StrategyFlags f = check_strategy_threshold(p).front();
        ++ivlev_cases;
        if (f.threshold != f.direct) {
          if (example.empty()) {
            example = "e.g. m=" + detail::num(m) + " d=" + detail::num(d) + " a=" + detail::num(a) +
                      ": closed form bound " + detail::num(f.bound) + ", direct bound " +
                      detail::num(f.exact_bound);
          }
          ++disagree;
        }
      }
    }
  }
  c.add("Ivlev closed-form bound agrees with direct checks", disagree == 0,
        std::to_string(disagree) + " of " + std::to_string(ivlev_cases) + " disagree" +
            (example.empty() ? std::string() : "; " + example));

  bool monotone = true, below_half = true;
  double prev = INFINITY;
  for (double lx = std::log(1.0 + 1e-4); lx <= std::log(100.0); lx += 0.01) {
    const double v = ivlev_printed_bound_x(std::exp(lx));
    monotone = monotone && v < prev;
    below_half = below_half && v < 0.5;
    prev = v;
  }
  const double near_one = ivlev_printed_bound_x(1.0 + 1e-4);
  c.add("Ivlev bound increases monotonically toward its supremum 1/2",
        monotone && below_half && std::abs(near_one - 0.5) < 1e-3, "value at x=1+1e-4: " + detail::num(near_one));
  return c;
}

inline CriterionResult schur_identity(std::size_t per_n = 100) {
  CriterionResult c{8, "Schur identity", {}};
  sampling::Rng rng(8128);
  for (std::size_t n = 1; n <= 6; ++n) {
    oracle::OracleReport rep{"schur n=" + std::to_string(n), 0.0, 0.0, 0, {}};
    for (std::size_t k = 0; k < per_n; ++k) {
      const auto jac = assemble_jacobians(sampling::random_pattern_labels(rng, n, sampling::A11Sign::Any));
      const Polynomial brute = oracle::charpoly_bruteforce(*jac.A_d);
      const double err = detail::poly_error(char_poly_delayed_schur(jac), brute);
      rep.record(err, err, oracle::snapshot(*jac.A_d));
    }
    c.add("n = " + std::to_string(n), rep.max_rel_error <= 1e-9, "max rel err " + detail::num(rep.max_rel_error));
  }
  return c;
}

inline CriterionResult hurwitz_vs_eigen(std::size_t samples = 1000) {
  CriterionResult c{9, "Hurwitz vs eigenvalue oracle", {}};
  sampling::Rng rng(31337);
  std::size_t agree = 0, disagree = 0, marginal = 0, stable = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto jac = assemble_jacobians(sampling::random_pattern_labels(rng, 2, sampling::A11Sign::NonPositive));
    const Stability truth = oracle::eigen_stability_oracle(*jac.A_d);
    if (truth == Stability::Marginal) {
      ++marginal;
      continue;
    }
    const bool hurwitz_stable = hurwitz_quartic(quartic_coeffs(jac)).sufficient;
    stable += truth == Stability::Stable ? 1 : 0;
    if (hurwitz_stable == (truth == Stability::Stable)) ++agree;
    else ++disagree;
  }
  c.add("classifications agree", disagree == 0,
        std::to_string(agree) + " agree (" + std::to_string(stable) + " stable, " +
            std::to_string(agree + disagree - stable) + " unstable), " + std::to_string(disagree) + " disagree, " +
            std::to_string(marginal) + " marginal skipped");
  return c;
}

inline CriterionResult simulation() {
  CriterionResult c{10, "Simulation", {}};
  {
    const ModelParams p = paper_example(13.0, 1.0);
    const State star = equilibrium(p).delayed_state();
    const Trajectory t = integrate(p, detail::scaled(star, 1.1), 200.0, 1e-10, 1e-13);
    const double dist = detail::distance(t.states.back(), star);
    c.add("r=13: E_d* + 10% returns within 1e-4 by t=200", dist < 1e-4, "distance " + detail::num(dist));
  }
  {
    const ModelParams p = paper_example(7.0, 1.0);
    const State star = equilibrium(p).delayed_state();
    const State s0 = detail::scaled(star, 1.01);
    Trajectory t;
    std::string note;
    try {
      t = integrate(p, s0, 200.0, 1e-10, 1e-13, uniform_samples(200.0, 0.1));
    } catch (const IntegrationError& e) {
      t = e.partial();
      note = "; run stopped at t = " + detail::num(t.times.back()) + " as x fell below the positivity floor";
    }
    const double d0 = detail::distance(s0, star);
    double peak = 0.0, when = 0.0;
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      const double d = detail::distance(t.states[k], star);
      if (d > peak) {
        peak = d;
        when = t.times[k];
      }
    }
    c.add("r=7: E_d* + 1% distance grows x10 by t=200", peak > 10.0 * d0,
          "max growth factor " + detail::num(peak / d0) + " at t = " + detail::num(when) + note);
  }
  {
    const ModelParams p = paper_example(13.0, 1.0);
    const State s0 = detail::scaled(equilibrium(p).delayed_state(), 1.1);
    const double coarse = memory_consistency_check(integrate(p, s0, 20.0, 1e-12, 1e-13, uniform_samples(20.0, 0.01)));
    const double fine = memory_consistency_check(integrate(p, s0, 20.0, 1e-12, 1e-13, uniform_samples(20.0, 0.005)));
    c.add("memory residual < 1e-3 at step 0.01", coarse < 1e-3, "residual " + detail::num(coarse));
    const double ratio = coarse / fine;
    c.add("halving the step quarters the residual", ratio >= 3.5 && ratio <= 4.5, "ratio " + detail::num(ratio));
  }
  return c;
}

inline CriterionResult finite_difference_jacobians(std::size_t per_kind = 100) {
  CriterionResult c{11, "Finite-difference Jacobians", {}};
  sampling::Rng rng(4242);
  for (ResponseKind kind : {ResponseKind::Holling, ResponseKind::Ivlev}) {
    double worst = 0.0;
    for (std::size_t k = 0; k < per_kind; ++k) {
      const ModelParams p = sampling::random_params(rng, 1 + k % 3, kind, true);
      const Equilibrium eq = equilibrium(p);
      const JacobianPair jac = build_jacobians(p, eq);
      worst = std::max(worst, detail::max_entry_error(
                                  oracle::finite_difference_jacobian(p, eq.undelayed_state(), 1e-6), jac.A, true));
      worst = std::max(worst, detail::max_entry_error(
                                  oracle::finite_difference_jacobian(p, eq.delayed_state(), 1e-6), *jac.A_d, true));
    }
    c.add(std::string(to_string(kind)) + " systems", worst <= 1e-6, "max err " + detail::num(worst));
  }
  return c;
}

// ---------------------------------------------------------------------------

inline std::vector<std::function<CriterionResult()>> criteria() {
  return {equilibrium_exactness,
          jacobian_exactness,
          characteristic_polynomials,
          thresholds,
          delay_robust_case,
          delay_induced_instability,
          [] { return property_suites(); },
          [] { return schur_identity(); },
          [] { return hurwitz_vs_eigen(); },
          simulation,
          [] { return finite_difference_jacobians(); }};
}

/// Evaluates one criterion; an exception counts as a failed check.
inline CriterionResult run_guarded(int id, const std::function<CriterionResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    CriterionResult c{id, "criterion " + std::to_string(id), {}};
    c.add("evaluation", false, std::string("exception: ") + e.what());
    return c;
  }
}

inline std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  int id = 0;
  for (const auto& fn : criteria()) out.push_back(run_guarded(++id, fn));
  return out;
}

/// One PASS/FAIL line per criterion followed by indented sub-check lines.
inline std::string format_results(const std::vector<CriterionResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += std::string(r.passed() ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + ": " + r.title + "\n";
    for (const auto& ch : r.checks) {
      out += std::string("      [") + (ch.passed ? "ok" : "!!") + "] " + ch.name;
      if (!ch.detail.empty()) out += " (" + ch.detail + ")";
      out += "\n";
    }
  }
  return out;
}

inline nlohmann::json results_to_json(const std::vector<CriterionResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"checks", checks}});
  }
  return arr;
}

}  // namespace ratiodelay::verify
