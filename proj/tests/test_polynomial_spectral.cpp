#include <cmath>

#include <gtest/gtest.h>

#include "ratiodelay/oracle.hpp"
#include "ratiodelay/sampling.hpp"

using namespace ratiodelay;

namespace {

Matrix random_matrix(sampling::Rng& rng, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = sampling::uniform(rng, -3, 3);
  }
  return m;
}

}  // namespace

TEST(Polynomial, ArithmeticAndEvaluation) {
  const Polynomial p({1, -3, 2});  // 2x^2 - 3x + 1
  EXPECT_EQ(p.degree(), 2u);
  EXPECT_DOUBLE_EQ(p(2.0), 3.0);
  EXPECT_DOUBLE_EQ(p.leading(), 2.0);
  const Polynomial q = Polynomial::linear_factor(1.0) * Polynomial::linear_factor(0.5) * 2.0;
  EXPECT_DOUBLE_EQ(max_relative_coeff_error(q, p), 0.0);
  EXPECT_EQ((p - p).degree(), 0u);
  EXPECT_EQ(p.derivative().coeffs(), (std::vector<double>{-3, 4}));
  EXPECT_DOUBLE_EQ(p.monic().leading(), 1.0);
}

TEST(Polynomial, TrimmedDropsNegligibleLeadingTerms) {
  const Polynomial p({1.0, 2.0, 1e-20});
  EXPECT_EQ(p.degree(), 2u);
  EXPECT_EQ(p.trimmed().degree(), 1u);
}

TEST(CharPoly, PresetUndelayedMatrix) {
  Matrix A(3, 3);
  A << -5, -4, -8, 1, -4, 0, 1, 0, -4;
  const Polynomial p = char_poly(A);
  const std::vector<double> expected{128, 68, 13, 1};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(p[k], expected[k], 1e-12 * expected[k]);
}

TEST(CharPoly, IdentityGivesCubeOfLinearFactor) {
  const Polynomial p = char_poly(Matrix::Identity(3, 3));
  const Polynomial want = Polynomial::linear_factor(1) * Polynomial::linear_factor(1) * Polynomial::linear_factor(1);
  EXPECT_LT(max_relative_coeff_error(p, want), 1e-15);
}

TEST(CharPoly, EmptyMatrixIsRejected) {
  EXPECT_THROW(char_poly(Matrix(0, 0)), Error);
  EXPECT_THROW(char_poly(Matrix(2, 3)), Error);
}

TEST(CharPoly, MatchesCofactorOracleOnRandomMatrices) {
  sampling::Rng rng(5);
  for (Eigen::Index n = 1; n <= 7; ++n) {
    oracle::OracleReport rep{"char_poly", 0, 0, 0, {}};
    for (int k = 0; k < 50; ++k) {
      const Matrix m = random_matrix(rng, n);
      const Polynomial want = oracle::charpoly_bruteforce(m);
      double scale = 1.0;
      for (double c : want.coeffs()) scale = std::max(scale, std::abs(c));
      const double err = max_relative_coeff_error(char_poly(m), want, 1e-12 * scale);
      rep.record(err, err, oracle::snapshot(m));
    }
    EXPECT_LT(rep.max_rel_error, 1e-9) << "n=" << n << " worst " << rep.worst_case;
  }
}

TEST(Eigenvalues, QuadraticFactorOfPreset) {
  const auto roots = eigenvalues(Polynomial({32, 9, 1}));
  ASSERT_EQ(roots.size(), 2u);
  for (const auto& z : roots) {
    EXPECT_NEAR(z.real(), -4.5, 1e-12);
    EXPECT_NEAR(std::abs(z.imag()), std::sqrt(47.0) / 2, 1e-12);
  }
}

TEST(Eigenvalues, TripleRootIsClustered) {
  const Polynomial p = Polynomial::linear_factor(1) * Polynomial::linear_factor(1) * Polynomial::linear_factor(1);
  const auto roots = eigenvalues(p);
  ASSERT_EQ(roots.size(), 3u);
  for (const auto& z : roots) {
    EXPECT_NEAR(z.real(), 1.0, 1e-4);
    EXPECT_NEAR(z.imag(), 0.0, 1e-4);
  }
}

TEST(Eigenvalues, SortedByDecreasingRealPart) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << -3, 2, -1;
  const auto ev = eigenvalues(m);
  EXPECT_DOUBLE_EQ(ev[0].real(), 2);
  EXPECT_DOUBLE_EQ(ev[2].real(), -3);
  EXPECT_DOUBLE_EQ(spectral_abscissa(ev), 2);
}

TEST(Eigenvalues, PolynomialRootsHaveSmallResidual) {
  sampling::Rng rng(6);
  for (int k = 0; k < 200; ++k) {
    const Polynomial p = char_poly(random_matrix(rng, 4));
    for (const auto& z : eigenvalues(p)) {
      double weight = 0.0;
      for (std::size_t j = 0; j <= p.degree(); ++j) weight += std::abs(p[j]) * std::pow(std::abs(z), double(j));
      EXPECT_LT(std::abs(p(z)), 1e-9 * weight);
    }
  }
}

TEST(Eigenvalues, MatrixAndPolynomialRootsAgree) {
  sampling::Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const Matrix m = random_matrix(rng, 5);
    const auto a = eigenvalues(m);
    const auto b = eigenvalues(char_poly(m));
    ASSERT_EQ(a.size(), b.size());
    EXPECT_NEAR(spectral_abscissa(a), spectral_abscissa(b), 1e-6);
  }
}

TEST(Classify, MarginalBand) {
  EXPECT_EQ(classify_abscissa(-1e-3), Stability::Stable);
  EXPECT_EQ(classify_abscissa(1e-3), Stability::Unstable);
  EXPECT_EQ(classify_abscissa(5e-10), Stability::Marginal);
  EXPECT_EQ(classify_abscissa(-5e-10), Stability::Marginal);
  EXPECT_STREQ(to_string(Stability::Marginal), "marginal");
}
