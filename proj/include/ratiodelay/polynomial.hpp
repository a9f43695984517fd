#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ratiodelay/errors.hpp"

namespace ratiodelay {

/// Real polynomial with coefficients in ascending degree order.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { normalize_storage(); }
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { normalize_storage(); }

  static Polynomial constant(double c) { return Polynomial({c}); }
  /// (x - root)
  static Polynomial linear_factor(double root) { return Polynomial({-root, 1.0}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
  double leading() const { return coeffs_.back(); }

  template <typename T>
  T operator()(T x) const {
    T acc = T(coeffs_.back());
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * x + T(coeffs_[k]);
    return acc;
  }

  /// Largest coefficient magnitude.
  double scale() const {
    double s = 0.0;
    for (double c : coeffs_) s = std::max(s, std::abs(c));
    return s;
  }

  /// Drops leading coefficients below `rel` times the largest magnitude.
  Polynomial trimmed(double rel = 1e-14) const {
    Polynomial p = *this;
    const double cutoff = rel * scale();
    while (p.coeffs_.size() > 1 && std::abs(p.coeffs_.back()) <= cutoff) p.coeffs_.pop_back();
    return p;
  }

  Polynomial monic() const {
    const Polynomial p = trimmed();
    if (p.leading() == 0.0) throw Error(ErrorCode::NumericFailure, "", "cannot normalise the zero polynomial");
    return p * (1.0 / p.leading());
  }

  Polynomial derivative() const {
    if (coeffs_.size() == 1) return Polynomial();
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * -1.0; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, double s) {
    std::vector<double> c = a.coeffs_;
    for (double& v : c) v *= s;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(double s, const Polynomial& a) { return a * s; }

 private:
  // Exact zeros at the top are structural, not numerical, so they are always dropped.
  void normalize_storage() {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  }

  std::vector<double> coeffs_;
};

/// Largest relative coefficient deviation, each coefficient measured against
/// max(|expected_k|, floor * expected.scale()).
inline double max_relative_coeff_error(const Polynomial& got, const Polynomial& expected, double floor = 1e-300) {
  const std::size_t len = std::max(got.coeffs().size(), expected.coeffs().size());
  const double base = floor * expected.scale();
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double denom = std::max(std::abs(expected[k]), base);
    const double diff = std::abs(got[k] - expected[k]);
    worst = std::max(worst, denom > 0.0 ? diff / denom : diff);
  }
  return worst;
}

}  // namespace ratiodelay
