#pragma once

// Characteristic polynomials, eigenvalues and root finding for the small
// dense matrices produced by linearisation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ratiodelay/errors.hpp"
#include "ratiodelay/polynomial.hpp"

namespace ratiodelay {

using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

inline constexpr Eigen::Index kMaxSpectralDim = 64;
inline constexpr double kMarginalBand = 1e-9;

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "unknown";
}

/// Stable below -band, unstable above +band, marginal in between.
inline Stability classify_abscissa(double abscissa, double band = kMarginalBand) {
  if (abscissa < -band) return Stability::Stable;
  if (abscissa > band) return Stability::Unstable;
  return Stability::Marginal;
}

namespace detail {
inline void require_square(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::Validation, "", "matrix must be square and non-empty");
  }
  if (m.rows() > kMaxSpectralDim) {
    throw Error(ErrorCode::UnsupportedDimension, "", "matrix dimension exceeds 64");
  }
  if (!m.allFinite()) throw Error(ErrorCode::NumericFailure, "", "matrix has non-finite entries");
}

inline void sort_spectrum(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}
}  // namespace detail

/// Monic det(lambda I - M). The matrix is first reduced to upper Hessenberg
/// form by orthogonal similarity, then the leading-block recurrence
///   p_k = (lambda - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
/// builds the polynomial without forming any determinant explicitly.
inline Polynomial char_poly(const Matrix& m) {
  detail::require_square(m);
  const Eigen::Index n = m.rows();
  Matrix h = m;
  if (n > 2) h = Eigen::HessenbergDecomposition<Matrix>(m).matrixH();

  std::vector<Polynomial> p;
  p.reserve(static_cast<std::size_t>(n) + 1);
  p.emplace_back(Polynomial::constant(1.0));
  for (Eigen::Index k = 0; k < n; ++k) {
    Polynomial next = Polynomial::linear_factor(h(k, k)) * p[static_cast<std::size_t>(k)];
    double sub = 1.0;  // product of subdiagonal entries h(i..k, i-1..k-1)
    for (Eigen::Index i = k; i-- > 0;) {
      sub *= h(i + 1, i);
      if (sub == 0.0) break;
      next = next - p[static_cast<std::size_t>(i)] * (h(i, k) * sub);
    }
    p.push_back(std::move(next));
  }
  return p.back();
}

inline std::vector<Complex> eigenvalues(const Matrix& m) {
  detail::require_square(m);
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericFailure, "", "eigenvalue iteration did not converge");
  }
  std::vector<Complex> values(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  detail::sort_spectrum(values);
  return values;
}

/// Roots of p. Computed as companion-matrix eigenvalues, polished by Newton
/// steps, and clusters that behave like one multiple root are replaced by
/// their centroid.
inline std::vector<Complex> eigenvalues(const Polynomial& poly) {
  const Polynomial p = poly.trimmed();
  const std::size_t deg = p.degree();
  if (deg < 1) throw Error(ErrorCode::Validation, "", "polynomial of degree zero has no roots");
  if (deg > static_cast<std::size_t>(kMaxSpectralDim)) {
    throw Error(ErrorCode::UnsupportedDimension, "", "polynomial degree exceeds 64");
  }
  const auto n = static_cast<Eigen::Index>(deg);
  Matrix companion = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) companion(0, k) = -p[deg - 1 - static_cast<std::size_t>(k)] / p.leading();
  for (Eigen::Index k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  std::vector<Complex> roots = eigenvalues(companion);

  const Polynomial dp = p.derivative();
  auto weight = [&](const Complex& z) {  // sum |c_k| |z|^k
    double w = 0.0, zk = 1.0;
    for (double c : p.coeffs()) { w += std::abs(c) * zk; zk *= std::abs(z); }
    return w;
  };
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      const Complex fz = p(z);
      const Complex dz = dp(z);
      if (std::abs(dz) == 0.0) break;
      const Complex cand = z - fz / dz;
      if (std::abs(p(cand)) < std::abs(fz)) z = cand; else break;
    }
  }

  // Group roots lying within a loose radius; accept the centroid of a group
  // of size k when the first k-1 derivatives also nearly vanish there.
  std::vector<bool> used(roots.size(), false);
  std::vector<Complex> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> group{i};
    used[i] = true;
    for (std::size_t g = 0; g < group.size(); ++g) {
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (used[j]) continue;
        const double radius = 1e-4 * std::max(1.0, std::abs(roots[group[g]]));
        if (std::abs(roots[j] - roots[group[g]]) < radius) { used[j] = true; group.push_back(j); }
      }
    }
    Complex centroid = 0.0;
    for (auto idx : group) centroid += roots[idx];
    centroid /= static_cast<double>(group.size());
    bool multiple = group.size() > 1;
    if (multiple) {
      Polynomial d = p;
      for (std::size_t k = 0; k < group.size() && multiple; ++k) {
        double wd = 0.0, zk = 1.0;
        for (double c : d.coeffs()) { wd += std::abs(c) * zk; zk *= std::abs(centroid); }
        multiple = std::abs(d(centroid)) <= 1e-7 * wd;
        d = d.derivative();
      }
    }
    if (multiple) {
      for (std::size_t k = 0; k < group.size(); ++k) out.push_back(centroid);
    } else {
      for (auto idx : group) out.push_back(roots[idx]);
    }
  }
  for (const auto& z : out) {
    if (std::abs(p(z)) > 1e-9 * weight(z)) {
      throw Error(ErrorCode::NumericFailure, "", "polynomial root residual above tolerance");
    }
  }
  // snap conjugate-symmetric noise on real roots
  for (auto& z : out) {
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z.real()))) z = Complex(z.real(), 0.0);
  }
  detail::sort_spectrum(out);
  return out;
}

inline double spectral_abscissa(const std::vector<Complex>& values) {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) a = std::max(a, v.real());
  return a;
}

}  // namespace ratiodelay
