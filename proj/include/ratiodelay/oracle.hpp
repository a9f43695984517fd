#pragma once

// Independent cross-checks. Nothing here calls the production code path it
// is meant to check: determinants by cofactor expansion, the closed-form
// coefficient formulas for two predators, central-difference Jacobians, and
// stability read off the spectrum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <vector>

#include "ratiodelay/linearize.hpp"
#include "ratiodelay/model.hpp"
#include "ratiodelay/polynomial.hpp"
#include "ratiodelay/spectral.hpp"
#include "ratiodelay/stability.hpp"

namespace ratiodelay::oracle {

struct OracleReport {
  std::string name;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::size_t cases = 0;
  std::string worst_case;  // snapshot of the input with the largest relative error

  void record(double abs_err, double rel_err, const std::string& snapshot) {
    ++cases;
    max_abs_error = std::max(max_abs_error, abs_err);
    if (rel_err > max_rel_error || cases == 1) {
      max_rel_error = std::max(max_rel_error, rel_err);
      worst_case = snapshot;
    }
  }
};

inline std::string snapshot(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? ",[" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      s += buf;
    }
    s += "]";
  }
  return s + "]";
}

inline constexpr Eigen::Index kBruteForceMaxDim = 8;

/// Monic det(lambda I - M) by Laplace expansion along rows over polynomial
/// entries, memoised on the set of columns already used.
inline Polynomial charpoly_bruteforce(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorCode::Validation, "", "matrix must be square");
  if (m.rows() > kBruteForceMaxDim) {
    throw Error(ErrorCode::UnsupportedDimension, "", "cofactor expansion refused above dimension 8");
  }
  const auto n = static_cast<int>(m.rows());
  auto entry = [&](int i, int j) {  // (M - lambda E)_ij
    return i == j ? Polynomial({m(i, j), -1.0}) : Polynomial::constant(m(i, j));
  };
  std::unordered_map<std::uint32_t, Polynomial> memo;
  // det of rows [row, n) restricted to columns not in `used`
  auto minor_det = [&](auto&& self, int row, std::uint32_t used) -> Polynomial {
    if (row == n) return Polynomial::constant(1.0);
    if (auto it = memo.find(used); it != memo.end()) return it->second;
    Polynomial acc;
    int sign = 1;
    for (int j = 0; j < n; ++j) {
      if (used & (1u << j)) continue;
      if (m(row, j) != 0.0 || row == j) {
        acc = acc + entry(row, j) * self(self, row + 1, used | (1u << j)) * static_cast<double>(sign);
      }
      sign = -sign;
    }
    memo.emplace(used, acc);
    return acc;
  };
  const Polynomial det = minor_det(minor_det, 0, 0u);  // det(M - lambda E)
  return n % 2 == 0 ? det : det * -1.0;
}

/// Named entries of the delayed Jacobian for two predators in matrix-index
/// notation.
struct TwoPredatorEntries {
  double a11, a22, a33, a12, a13, a24, a34;

  static TwoPredatorEntries from(const JacobianLabels& l) {
    return {l.a11, l.a_diag[0], l.a_diag[1], l.a_row[0], l.a_row[1], l.a_col[0], l.a_col[1]};
  }
};

/// The four closed-form quartic coefficients, transcribed term by term.
inline QuarticCoeffs paper_quartic_formulas(const JacobianLabels& l, double alpha) {
  if (l.n() != 2) throw Error(ErrorCode::UnsupportedDimension, condition::kTwoPredators, "n = 2 only");
  const auto [a11, a22, a33, a12, a13, a24, a34] = TwoPredatorEntries::from(l);
  QuarticCoeffs c;
  c.a3 = -a11 - a22 - a33 + alpha;
  c.a2 = a11 * a22 + a11 * a33 + a22 * a33 - alpha * (a11 + a22 + a33);
  c.a1 = -a11 * a22 * a33 + alpha * (a11 * a22 + a11 * a33 + a22 * a33) - alpha * (a12 * a24 + a13 * a34);
  c.a0 = alpha * (-a11 * a22 * a33 + a22 * a13 * a34 + a33 * a12 * a24);
  return c;
}

/// The expanded coefficients of H(alpha), transcribed term by term.
inline HCubic paper_h_cubic_formulas(const JacobianLabels& l) {
  if (l.n() != 2) throw Error(ErrorCode::UnsupportedDimension, condition::kTwoPredators, "n = 2 only");
  const auto [a11, a22, a33, a12, a13, a24, a34] = TwoPredatorEntries::from(l);
  const double p11_2 = a11 * a11, p11_3 = p11_2 * a11;
  const double p22_2 = a22 * a22, p22_3 = p22_2 * a22;
  const double p33_2 = a33 * a33, p33_3 = p33_2 * a33;
  HCubic h;
  h.A3t = -a22 * p11_2 - a33 * p11_2 - p22_2 * a11 - p33_2 * a11 + a12 * a24 * a11 - 2 * a22 * a33 * a11 +
          a13 * a34 * a11 - a22 * p33_2 + a12 * a22 * a24 - p22_2 * a33 + a13 * a33 * a34;
  h.A2t = a22 * p11_3 + a33 * p11_3 + 2 * p22_2 * p11_2 + 2 * p33_2 * p11_2 - a12 * a24 * p11_2 +
          4 * a22 * a33 * p11_2 - a13 * a34 * p11_2 + p22_3 * a11 + p33_3 * a11 + 4 * a22 * p33_2 * a11 -
          a12 * a22 * a24 * a11 + 4 * p22_2 * a33 * a11 + a12 * a24 * a33 * a11 + a13 * a22 * a34 * a11 -
          a13 * a33 * a34 * a11 + a22 * p33_3 - a12 * a12 * a24 * a24 + 2 * p22_2 * p33_2 + a12 * a24 * p33_2 -
          a13 * a13 * a34 * a34 - a12 * p22_2 * a24 + p22_3 * a33 + a12 * a22 * a24 * a33 + a13 * p22_2 * a34 -
          a13 * p33_2 * a34 - 2 * a12 * a13 * a24 * a34 + a13 * a22 * a33 * a34;
  h.A1t = -p22_2 * p11_3 - p33_2 * p11_3 - 2 * a22 * a33 * p11_3 - p22_3 * p11_2 - p33_3 * p11_2 -
          4 * a22 * p33_2 * p11_2 + a12 * a22 * a24 * p11_2 - 4 * p22_2 * a33 * p11_2 + a13 * a33 * a34 * p11_2 -
          2 * a22 * p33_3 * a11 - 4 * p22_2 * p33_2 * a11 - a12 * a24 * p33_2 * a11 + a12 * p22_2 * a24 * a11 -
          2 * p22_3 * a33 * a11 - a12 * a22 * a24 * a33 * a11 - a13 * p22_2 * a34 * a11 +
          a13 * p33_2 * a34 * a11 - a13 * a22 * a33 * a34 * a11 - p22_2 * p33_3 - a12 * a24 * p33_3 -
          p22_3 * p33_2 - a12 * a22 * a24 * p33_2 - a13 * p22_3 * a34 - a13 * p22_2 * a33 * a34;
  h.A0t = a11 * p22_2 * p33_3 + p11_2 * a22 * p33_3 + a11 * p22_3 * p33_2 + 2 * p11_2 * p22_2 * p33_2 +
          p11_3 * a22 * p33_2 + p11_2 * p22_3 * a33 + p11_3 * p22_2 * a33;
  return h;
}

/// Regrouped forms of the alpha and alpha^2 coefficients of H, arranged so
/// that the delay-robustness conditions make the sums visibly positive.
struct RobustDecomposition {
  double A1t = 0.0;
  double A2t = 0.0;
  std::vector<double> A1_terms;
  std::vector<double> A2_terms;
};

inline RobustDecomposition paper_robust_decomposition(const JacobianLabels& l) {
  const auto [a11, a22, a33, a12, a13, a24, a34] = TwoPredatorEntries::from(l);
  const double s22 = a22 * a22 + a12 * a24;  // a22^2 - (-a12 a24)
  const double s33 = a33 * a33 + a13 * a34;
  RobustDecomposition r;
  r.A1_terms = {
      s22 * (-a33 * a33 * a33 - a11 * a33 * a33 - a11 * a22 * a33),
      s33 * (-a22 * a22 * a22 - a11 * a22 * a22 - a11 * a22 * a33),
      (a11 * a11 - a33 * a33) * (a22 * a12 * a24),
      (a11 * a11 - a22 * a22) * (a33 * a13 * a34),
      -a11 * a11 * a11 * a22 * a22 - a11 * a11 * a22 * a22 * a22 + a11 * a22 * a22 * a12 * a24 -
          2 * a11 * a11 * a11 * a22 * a33 - 4 * a11 * a11 * a22 * a22 * a33 - a11 * a22 * a22 * a22 * a33 -
          a11 * a11 * a11 * a33 * a33 - 4 * a11 * a11 * a22 * a33 * a33 - 2 * a11 * a22 * a22 * a33 * a33 -
          a11 * a11 * a33 * a33 * a33 - a11 * a22 * a33 * a33 * a33 + a11 * a33 * a33 * a13 * a34,
  };
  r.A2_terms = {
      s22 * (a11 * a33 + a22 * a33 + a33 * a33 - a12 * a24),
      s33 * (a11 * a22 + a22 * a33 + a22 * a22 - a13 * a34),
      -a11 * a11 * a12 * a24 - a11 * a11 * a13 * a34 - 2 * a12 * a24 * a13 * a34,
      a11 * a11 * a11 * a22 + 2 * a11 * a11 * a22 * a22 + a11 * a22 * a22 * a22 - a11 * a22 * a12 * a24 +
          a11 * a11 * a11 * a33 + 4 * a11 * a11 * a22 * a33 + 3 * a11 * a22 * a22 * a33 +
          2 * a11 * a11 * a33 * a33 + 3 * a11 * a22 * a33 * a33 + a11 * a33 * a33 * a33 - a11 * a33 * a13 * a34,
  };
  for (double t : r.A1_terms) r.A1t += t;
  for (double t : r.A2_terms) r.A2t += t;
  return r;
}

/// Central-difference Jacobian of the right-hand side matching the state
/// (memoryless when `point` has no q).
inline Matrix finite_difference_jacobian(const ModelParams& params, const State& point, double h) {
  if (!(h >= 1e-8 && h <= 1e-4)) throw Error(ErrorCode::Validation, "", "step h must lie in [1e-8, 1e-4]");
  const bool with_memory = point.q.has_value();
  auto rhs = [&](const State& s) { return with_memory ? rhs_delayed(params, s) : rhs_undelayed(params, s); };
  const std::vector<double> base = point.to_vector();
  const auto dim = static_cast<Eigen::Index>(base.size());
  Matrix J(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto k = static_cast<std::size_t>(j);
    // relative step keeps perturbations inside the orthant for small states
    const double step = h * std::max(std::abs(base[k]), 1e-3);
    std::vector<double> plus = base, minus = base;
    plus[k] += step;
    minus[k] -= step;
    const auto fp = rhs(State::from_vector(plus, params.n(), with_memory));
    const auto fm = rhs(State::from_vector(minus, params.n(), with_memory));
    for (Eigen::Index i = 0; i < dim; ++i) {
      J(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * step);
    }
  }
  return J;
}

/// Central-difference Jacobian of a generic vector field, used to check the
/// difference scheme itself on fields with known Jacobians.
template <typename Field>
Matrix finite_difference_jacobian(Field&& field, const std::vector<double>& point, double h) {
  const auto dim = static_cast<Eigen::Index>(point.size());
  Matrix J(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::vector<double> plus = point, minus = point;
    plus[static_cast<std::size_t>(j)] += h;
    minus[static_cast<std::size_t>(j)] -= h;
    const std::vector<double> fp = field(plus), fm = field(minus);
    for (Eigen::Index i = 0; i < dim; ++i) {
      J(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
  }
  return J;
}

/// Stability from the spectral abscissa with the +-1e-9 marginal band.
inline Stability eigen_stability_oracle(const Matrix& m) {
  return classify_abscissa(spectral_abscissa(eigenvalues(m)));
}

}  // namespace ratiodelay::oracle
