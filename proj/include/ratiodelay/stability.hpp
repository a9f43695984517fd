#pragma once

// Stability machinery at the positive equilibrium: sufficient conditions for
// sign-stability of the memoryless Jacobian, Routh-Hurwitz tests of the
// quartic for two predators, the Hurwitz expression H as a cubic in the memory
// rate, the Schur-complement form of the delayed characteristic polynomial,
// and scans over alpha for stability switches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ratiodelay/budget.hpp"
#include "ratiodelay/linearize.hpp"
#include "ratiodelay/model.hpp"
#include "ratiodelay/polynomial.hpp"
#include "ratiodelay/spectral.hpp"

namespace ratiodelay {

/// a > b by more than `rel` of the larger magnitude.
inline bool clearly_greater(double a, double b, double rel = 1e-12) {
  return a - b > rel * std::max(std::abs(a), std::abs(b));
}

// ---------------------------------------------------------------------------
// Sign-stability (sufficient conditions)

struct SignStabilityFlags {
  bool a11_nonpositive = false;
  std::vector<bool> slope_negative;  // p_i'(u_i*) < 0
  std::vector<bool> row_negative;    // -d_i - u_i* p_i' < 0
  bool all = false;
};

inline SignStabilityFlags check_sign_stability(const JacobianPair& jac) {
  const auto& l = jac.labels;
  SignStabilityFlags f;
  f.a11_nonpositive = l.a11 <= 0.0;
  f.all = f.a11_nonpositive;
  for (std::size_t i = 0; i < l.n(); ++i) {
    const bool slope_neg = l.slope.empty() ? l.a_diag[i] < 0.0 : l.slope[i] < 0.0;
    const bool row_neg = l.a_row[i] < 0.0;
    f.slope_negative.push_back(slope_neg);
    f.row_negative.push_back(row_neg);
    f.all = f.all && slope_neg && row_neg;
  }
  return f;
}

/// Full sign pattern of the delayed Jacobian: the sufficient conditions plus
/// a_col > 0 (which holds automatically when built from a model).
inline bool conforms_to_delayed_pattern(const JacobianLabels& l) {
  bool ok = l.a11 <= 0.0;
  for (std::size_t i = 0; i < l.n(); ++i) ok = ok && l.a_diag[i] < 0.0 && l.a_row[i] < 0.0 && l.a_col[i] > 0.0;
  return ok;
}

enum class AlleeZone { Inside, Outside, Boundary };

inline const char* to_string(AlleeZone z) {
  switch (z) {
    case AlleeZone::Inside: return "inside";
    case AlleeZone::Outside: return "outside";
    case AlleeZone::Boundary: return "boundary";
  }
  return "unknown";
}

inline AlleeZone allee_zone(double a11) {
  if (a11 > 0.0) return AlleeZone::Inside;
  if (a11 < 0.0) return AlleeZone::Outside;
  return AlleeZone::Boundary;
}

// ---------------------------------------------------------------------------
// Two predators: quartic and Routh-Hurwitz

/// lambda^4 + a3 lambda^3 + a2 lambda^2 + a1 lambda + a0
struct QuarticCoeffs {
  double a3 = 0.0, a2 = 0.0, a1 = 0.0, a0 = 0.0;

  /// a3 (a1 a2 - a0 a3) - a1^2
  double hurwitz_value() const { return a3 * (a1 * a2 - a0 * a3) - a1 * a1; }
  Polynomial polynomial() const { return Polynomial({a0, a1, a2, a3, 1.0}); }
};

namespace detail {
inline void require_two_predators(const JacobianPair& jac) {
  if (jac.n() != 2) {
    throw Error(ErrorCode::UnsupportedDimension, condition::kTwoPredators, "operation is defined for n = 2 only");
  }
}
inline void require_memory(const JacobianPair& jac) {
  if (!jac.A_d || !jac.labels.alpha) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate, "delayed Jacobian needs alpha");
  }
}
}  // namespace detail

/// Coefficients of the monic characteristic polynomial of A_d.
inline QuarticCoeffs quartic_coeffs(const JacobianPair& jac) {
  detail::require_two_predators(jac);
  detail::require_memory(jac);
  const Polynomial p = char_poly(*jac.A_d);
  return QuarticCoeffs{p[3], p[2], p[1], p[0]};
}

struct HurwitzFlags {
  bool necessary = false;   // all coefficients positive
  bool sufficient = false;  // necessary and H > 0
  double H = 0.0;
};

inline HurwitzFlags hurwitz_quartic(const QuarticCoeffs& c) {
  HurwitzFlags f;
  f.H = c.hurwitz_value();
  f.necessary = c.a3 > 0.0 && c.a2 > 0.0 && c.a1 > 0.0 && c.a0 > 0.0;
  f.sufficient = f.necessary && f.H > 0.0;
  return f;
}

/// H(alpha) = A3 alpha^3 + A2 alpha^2 + A1 alpha + A0.
struct HCubic {
  double A3t = 0.0, A2t = 0.0, A1t = 0.0, A0t = 0.0;

  double operator()(double alpha) const { return ((A3t * alpha + A2t) * alpha + A1t) * alpha + A0t; }
  /// Sum of term magnitudes at alpha; the natural scale for |H(alpha)|.
  double scale(double alpha) const {
    const double a = std::abs(alpha);
    return ((std::abs(A3t) * a + std::abs(A2t)) * a + std::abs(A1t)) * a + std::abs(A0t);
  }
  Polynomial polynomial() const { return Polynomial({A0t, A1t, A2t, A3t}); }
};

/// H evaluated from the quartic at alpha = 1, 2, 3, 4 and interpolated; H is
/// exactly cubic in alpha, so the four nodes determine it.
inline HCubic h_cubic(const JacobianPair& jac) {
  detail::require_two_predators(jac);
  constexpr double nodes[4] = {1.0, 2.0, 3.0, 4.0};
  double dd[4];
  for (int k = 0; k < 4; ++k) dd[k] = quartic_coeffs(with_alpha(jac, nodes[k])).hurwitz_value();
  // Newton divided differences, in place.
  for (int level = 1; level < 4; ++level) {
    for (int k = 3; k >= level; --k) dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level]);
  }
  Polynomial basis = Polynomial::constant(1.0);
  Polynomial h = Polynomial::constant(dd[0]);
  for (int k = 1; k < 4; ++k) {
    basis = basis * Polynomial::linear_factor(nodes[k - 1]);
    h = h + basis * dd[k];
  }
  return HCubic{h[3], h[2], h[1], h[0]};
}

/// Per-predator parts of the delay-robustness conditions:
///   a11^2 > a_ii^2 > -a_row_i a_col_i.
struct PredatorRobustness {
  bool prey_dominates = false;      // a11^2 > a_ii^2
  bool self_limits_coupling = false;  // a_ii^2 > -a_row_i a_col_i
  bool holds() const { return prey_dominates && self_limits_coupling; }
};

struct Main3Flags {
  bool applicable = false;  // sign pattern of the delayed Jacobian holds
  std::vector<PredatorRobustness> predators;
  bool delay_robust = false;  // stable for every alpha > 0
};

inline Main3Flags check_main3(const JacobianPair& jac) {
  detail::require_two_predators(jac);
  const auto& l = jac.labels;
  Main3Flags f;
  f.applicable = conforms_to_delayed_pattern(l);
  const double a11_sq = l.a11 * l.a11;
  bool all = true;
  for (std::size_t i = 0; i < l.n(); ++i) {
    const double aii_sq = l.a_diag[i] * l.a_diag[i];
    PredatorRobustness pr;
    pr.prey_dominates = clearly_greater(a11_sq, aii_sq);
    pr.self_limits_coupling = clearly_greater(aii_sq, -l.a_row[i] * l.a_col[i]);
    all = all && pr.holds();
    f.predators.push_back(pr);
  }
  f.delay_robust = f.applicable && all;
  return f;
}

// ---------------------------------------------------------------------------
// Half-saturation thresholds

/// Ivlev threshold in the closed form printed for it, as a function of
/// x = m/(m-d) > 1: (1 - 1/x - ln(x)/x) / ln(x)^2.
inline double ivlev_printed_bound_x(double x) {
  const double L = std::log(x);
  return (1.0 - 1.0 / x - L / x) / (L * L);
}

inline double ivlev_printed_bound(double m, double d) {
  const double L = -std::log1p(-d / m);  // ln(m/(m-d))
  return (d / m - (m - d) / m * L) / (L * L);
}

/// Threshold obtained by substituting the Ivlev response directly into
/// a_ii^2 > -a_row_i a_col_i: a > (x - 1 - ln x) / ln(x)^2.
inline double ivlev_exact_bound(double m, double d) {
  const double L = -std::log1p(-d / m);
  return (d - (m - d) * L) / ((m - d) * L * L);
}

struct StrategyFlags {
  ResponseKind kind = ResponseKind::Holling;
  double bound = 0.0;          // Holling: 1; Ivlev: printed closed-form bound
  bool threshold = false;      // a > bound
  bool above_half = false;     // Ivlev uniform test a > 1/2 (always false for Holling)
  double exact_bound = 0.0;    // threshold implied by the entries themselves
  bool direct = false;         // a_ii^2 > -a_row_i a_col_i evaluated on the entries
};

inline std::vector<StrategyFlags> check_strategy_threshold(const ModelParams& params) {
  params.validate();
  std::vector<StrategyFlags> out;
  for (const auto& pred : params.predators) {
    const auto& resp = pred.response;
    StrategyFlags f;
    f.kind = resp.kind;
    if (resp.kind == ResponseKind::Holling) {
      f.bound = 1.0;
      f.exact_bound = 1.0;
    } else {
      f.bound = ivlev_printed_bound(resp.m, pred.d);
      f.exact_bound = ivlev_exact_bound(resp.m, pred.d);
      f.above_half = resp.a > 0.5;
    }
    f.threshold = resp.a > f.bound;
    const double u = equilibrium_ratio(resp, pred.d);
    const double slope = response_derivative(resp, u);
    const double diag = u * slope;
    const double row = -pred.d - u * slope;
    const double col = -u * u * slope;
    f.direct = clearly_greater(diag * diag, -row * col);
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// General n

/// Monic det(lambda I - A_d) assembled from the memoryless Jacobian alone:
///   alpha * det(lambda I - A) + lambda * prod_i (lambda - A_ii).
inline Polynomial char_poly_delayed_schur(const JacobianPair& jac) {
  detail::require_memory(jac);
  const double alpha = *jac.labels.alpha;
  Polynomial diag_product = Polynomial::constant(1.0);
  for (Eigen::Index i = 0; i < jac.A.rows(); ++i) diag_product = diag_product * Polynomial::linear_factor(jac.A(i, i));
  return char_poly(jac.A) * alpha + Polynomial({0.0, 1.0}) * diag_product;
}

struct AlphaCertificate {
  double alpha = 0.0;
  Polynomial char_poly;
  bool coefficients_positive = false;
  double abscissa = 0.0;
  Stability stability = Stability::Marginal;
};

struct GeneralNReport {
  bool applicable = false;
  std::string reason;  // why not applicable
  AlphaCertificate small;
  AlphaCertificate large;
};

/// Certifies stability of A_d at two caller-chosen memory rates, after
/// checking the hypotheses (a11 < 0 and the slope/row conditions).
inline GeneralNReport classify_general_n(const JacobianPair& jac, double alpha_small, double alpha_large) {
  GeneralNReport report;
  const auto& l = jac.labels;
  if (!(l.a11 < 0.0)) {
    report.reason = "a11 < 0 fails";
    return report;
  }
  const auto flags = check_sign_stability(jac);
  if (!flags.all) {
    report.reason = condition::kSignPattern;
    return report;
  }
  if (!(alpha_small > 0.0) || !(alpha_large > 0.0)) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate, "alpha values must be positive");
  }
  report.applicable = true;
  auto certify = [&](double alpha) {
    AlphaCertificate c;
    c.alpha = alpha;
    const Matrix Ad = assemble_delayed(l, alpha);
    c.char_poly = char_poly(Ad);
    c.coefficients_positive = std::all_of(c.char_poly.coeffs().begin(), c.char_poly.coeffs().end(),
                                          [](double v) { return v > 0.0; });
    c.abscissa = spectral_abscissa(eigenvalues(Ad));
    c.stability = classify_abscissa(c.abscissa);
    return c;
  };
  report.small = certify(alpha_small);
  report.large = certify(alpha_large);
  return report;
}

// ---------------------------------------------------------------------------
// Alpha scans

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw Error(ErrorCode::Validation, condition::kMemoryRate, "log grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> g(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = std::exp(llo + (lhi - llo) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct SwitchPoint {
  double alpha = 0.0;
  double H = 0.0;
  double H_scale = 0.0;
  double a1 = 0.0;
  double a3 = 0.0;
  std::optional<double> omega;  // sqrt(a1/a3) when a1/a3 > 0
  double nearest_real = 0.0;    // eigenvalue with Im > 0 closest to i*omega
  double nearest_imag = 0.0;
  bool stabilizing = false;     // H turns positive as alpha grows
};

struct AlphaScan {
  std::vector<double> alphas;
  std::vector<double> H_values;
  std::vector<double> abscissae;
  std::vector<Stability> stability;
  std::vector<SwitchPoint> switch_points;
  HCubic cubic;
};

inline AlphaScan alpha_scan(const JacobianPair& jac, double lo, double hi, std::size_t points,
                            const Budget& budget = {}) {
  detail::require_two_predators(jac);
  AlphaScan scan;
  scan.cubic = h_cubic(jac);
  scan.alphas = log_grid(lo, hi, points);
  for (double alpha : scan.alphas) {
    budget.check();
    scan.H_values.push_back(scan.cubic(alpha));
    const double abscissa = spectral_abscissa(eigenvalues(assemble_delayed(jac.labels, alpha)));
    scan.abscissae.push_back(abscissa);
    scan.stability.push_back(classify_abscissa(abscissa));
  }
  const auto& H = scan.cubic;
  for (std::size_t k = 0; k + 1 < scan.alphas.size(); ++k) {
    const double h0 = scan.H_values[k], h1 = scan.H_values[k + 1];
    const bool exact_root = h0 == 0.0 && k > 0;
    if (!exact_root && !((h0 < 0.0 && h1 > 0.0) || (h0 > 0.0 && h1 < 0.0))) continue;
    double alo = scan.alphas[k], ahi = scan.alphas[k + 1];
    double root = alo;
    if (!exact_root) {
      double flo = h0;
      for (int it = 0; it < 200 && ahi - alo > 1e-15 * ahi; ++it) {
        const double mid = 0.5 * (alo + ahi);
        const double fm = H(mid);
        if (fm == 0.0) { alo = ahi = mid; break; }
        if ((fm < 0.0) == (flo < 0.0)) { alo = mid; flo = fm; } else { ahi = mid; }
      }
      root = 0.5 * (alo + ahi);
    }
    SwitchPoint sp;
    sp.alpha = root;
    sp.H = H(root);
    sp.H_scale = H.scale(root);
    sp.stabilizing = h1 > 0.0;
    const JacobianPair at_root = with_alpha(jac, root);
    const QuarticCoeffs c = quartic_coeffs(at_root);
    sp.a1 = c.a1;
    sp.a3 = c.a3;
    if (c.a3 != 0.0 && c.a1 / c.a3 > 0.0) sp.omega = std::sqrt(c.a1 / c.a3);
    const auto eig = eigenvalues(*at_root.A_d);
    const double target = sp.omega.value_or(0.0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : eig) {
      if (z.imag() <= 0.0) continue;
      const double dist = std::abs(z.imag() - target);
      if (dist < best) { best = dist; sp.nearest_real = z.real(); sp.nearest_imag = z.imag(); }
    }
    scan.switch_points.push_back(sp);
  }
  return scan;
}

inline AlphaScan alpha_scan(const ModelParams& params, double lo, double hi, std::size_t points,
                            const Budget& budget = {}) {
  return alpha_scan(build_jacobians(params), lo, hi, points, budget);
}

// ---------------------------------------------------------------------------
// Full report

struct StabilityReport {
  bool has_equilibrium = false;
  std::optional<Equilibrium> equilibrium;
  std::optional<JacobianPair> jacobians;
  SignStabilityFlags sign_stable_conditions;
  std::optional<QuarticCoeffs> quartic;
  std::optional<HurwitzFlags> hurwitz;
  std::optional<HCubic> h_cubic;
  std::optional<Main3Flags> main3;
  std::vector<StrategyFlags> strategy;
  bool strategy_threshold = false;
  std::vector<Complex> eigenvalues_A;
  std::vector<Complex> eigenvalues_Ad;
  double spectral_abscissa_A = 0.0;
  std::optional<double> spectral_abscissa_Ad;
  Stability stability_A = Stability::Marginal;
  std::optional<Stability> stability_Ad;
  AlleeZone allee_zone = AlleeZone::Boundary;

  /// Names of the conditions that failed, for applicability summaries.
  std::vector<std::string> failed_conditions() const {
    std::vector<std::string> out;
    if (!has_equilibrium) {
      out.emplace_back(condition::kPositiveEquilibrium);
      return out;
    }
    if (!sign_stable_conditions.a11_nonpositive) out.emplace_back("a11 <= 0 (outside the Allee zone)");
    for (std::size_t i = 0; i < sign_stable_conditions.slope_negative.size(); ++i) {
      if (!sign_stable_conditions.slope_negative[i]) out.push_back("p_" + std::to_string(i + 1) + "' < 0");
      if (!sign_stable_conditions.row_negative[i]) out.push_back("-d_" + std::to_string(i + 1) + " - u p' < 0");
    }
    if (hurwitz && !hurwitz->necessary) out.emplace_back("Hurwitz necessary: a3, a2, a1, a0 > 0");
    if (hurwitz && !hurwitz->sufficient) out.emplace_back("Hurwitz: a3(a1 a2 - a0 a3) - a1^2 > 0");
    if (main3 && !main3->applicable) out.emplace_back(condition::kSignPattern);
    if (main3) {
      for (std::size_t i = 0; i < main3->predators.size(); ++i) {
        const auto k = std::to_string(i + 1);
        if (!main3->predators[i].prey_dominates) out.push_back("a11^2 > a_" + k + k + "^2 (predator " + k + ")");
        if (!main3->predators[i].self_limits_coupling) {
          out.push_back("a_ii^2 > -a_row a_col (predator " + k + ")");
        }
      }
    }
    return out;
  }
};

inline StabilityReport analyze(const ModelParams& params) {
  params.validate();
  StabilityReport rep;
  Equilibrium eq;
  try {
    eq = equilibrium(params);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPositiveEquilibrium) throw;
    return rep;
  }
  rep.has_equilibrium = true;
  rep.equilibrium = eq;
  JacobianPair jac = build_jacobians(params, eq);
  rep.sign_stable_conditions = check_sign_stability(jac);
  rep.allee_zone = allee_zone(jac.labels.a11);
  rep.eigenvalues_A = eigenvalues(jac.A);
  rep.spectral_abscissa_A = spectral_abscissa(rep.eigenvalues_A);
  rep.stability_A = classify_abscissa(rep.spectral_abscissa_A);
  if (jac.A_d) {
    rep.eigenvalues_Ad = eigenvalues(*jac.A_d);
    rep.spectral_abscissa_Ad = spectral_abscissa(rep.eigenvalues_Ad);
    rep.stability_Ad = classify_abscissa(*rep.spectral_abscissa_Ad);
  }
  if (params.n() == 2) {
    rep.main3 = check_main3(jac);
    rep.h_cubic = h_cubic(jac);
    if (jac.A_d) {
      rep.quartic = quartic_coeffs(jac);
      rep.hurwitz = hurwitz_quartic(*rep.quartic);
    }
  }
  rep.strategy = check_strategy_threshold(params);
  rep.strategy_threshold = std::all_of(rep.strategy.begin(), rep.strategy.end(),
                                       [](const StrategyFlags& f) { return f.threshold; });
  rep.jacobians = std::move(jac);
  return rep;
}

}  // namespace ratiodelay
