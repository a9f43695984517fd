#pragma once

// Linearisation at the positive equilibrium. Both Jacobians are arrow-like
// and fully determined by a handful of named scalars, which are kept next to
// the dense matrices so that stability conditions can be stated on them.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ratiodelay/model.hpp"
#include "ratiodelay/spectral.hpp"

namespace ratiodelay {

/// Named entries shared by the undelayed and delayed Jacobians.
struct JacobianLabels {
  double a11 = 0.0;
  std::vector<double> a_diag;  // u_i* p_i'(u_i*)               < 0
  std::vector<double> a_row;   // -d_i - u_i* p_i'(u_i*)
  std::vector<double> a_col;   // -(u_i*)^2 p_i'(u_i*)          > 0
  std::vector<double> slope;   // p_i'(u_i*); empty when built from raw entries
  std::optional<double> alpha;

  std::size_t n() const { return a_diag.size(); }
};

struct JacobianPair {
  Matrix A;                    // (n+1) x (n+1)
  std::optional<Matrix> A_d;   // (n+2) x (n+2), present iff alpha is
  JacobianLabels labels;

  std::size_t n() const { return labels.n(); }
};

/// Memoryless Jacobian: a11 top-left, a_row along the first row, a_col down
/// the first column, a_diag on the remaining diagonal.
inline Matrix assemble_undelayed(const JacobianLabels& l) {
  const auto n = static_cast<Eigen::Index>(l.n());
  Matrix A = Matrix::Zero(n + 1, n + 1);
  A(0, 0) = l.a11;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    A(0, i + 1) = l.a_row[k];
    A(i + 1, 0) = l.a_col[k];
    A(i + 1, i + 1) = l.a_diag[k];
  }
  return A;
}

/// Jacobian with memory: the a_col coupling moves from the prey column to the
/// memory column, and the memory row reads (alpha, 0, ..., 0, -alpha).
inline Matrix assemble_delayed(const JacobianLabels& l, double alpha) {
  const auto n = static_cast<Eigen::Index>(l.n());
  Matrix Ad = Matrix::Zero(n + 2, n + 2);
  Ad(0, 0) = l.a11;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Ad(0, i + 1) = l.a_row[k];
    Ad(i + 1, i + 1) = l.a_diag[k];
    Ad(i + 1, n + 1) = l.a_col[k];
  }
  Ad(n + 1, 0) = alpha;
  Ad(n + 1, n + 1) = -alpha;
  return Ad;
}

inline JacobianPair assemble_jacobians(JacobianLabels labels) {
  JacobianPair jac;
  jac.A = assemble_undelayed(labels);
  if (labels.alpha) jac.A_d = assemble_delayed(labels, *labels.alpha);
  jac.labels = std::move(labels);
  return jac;
}

/// Same entries with a different memory rate.
inline JacobianPair with_alpha(const JacobianPair& jac, double alpha) {
  JacobianLabels labels = jac.labels;
  labels.alpha = alpha;
  return assemble_jacobians(std::move(labels));
}

/// Relative size under which a11 is treated as an exact zero.
inline constexpr double kA11ZeroBand = 1e-12;

/// dF1/dx at the equilibrium: r g(x*) + r x* g'(x*) + sum_i (u_i*)^2 p_i'(u_i*).
/// The terms cancel exactly on the boundary of the Allee zone; a result
/// within rounding of their magnitudes is returned as 0.
inline double build_a11(const ModelParams& params, const Equilibrium& eq) {
  const double x = eq.x_star;
  const double growth_part = params.r * params.growth.value(x);
  const double slope_part = params.r * x * params.growth.slope(x);
  double sum = growth_part + slope_part;
  double magnitude = std::abs(growth_part) + std::abs(slope_part);
  for (std::size_t i = 0; i < params.n(); ++i) {
    const double u = eq.u_star[i];
    const double term = u * u * response_derivative(params.predators[i].response, u);
    sum += term;
    magnitude += std::abs(term);
  }
  if (std::abs(sum) <= kA11ZeroBand * magnitude) return 0.0;
  return sum;
}

inline JacobianPair build_jacobians(const ModelParams& params, const Equilibrium& eq) {
  params.validate();
  JacobianLabels l;
  l.a11 = build_a11(params, eq);
  for (std::size_t i = 0; i < params.n(); ++i) {
    const auto& pred = params.predators[i];
    const double u = eq.u_star[i];
    const double slope = response_derivative(pred.response, u);
    l.slope.push_back(slope);
    l.a_diag.push_back(u * slope);
    l.a_row.push_back(-pred.d - u * slope);
    l.a_col.push_back(-u * u * slope);
  }
  l.alpha = params.alpha;
  return assemble_jacobians(std::move(l));
}

inline JacobianPair build_jacobians(const ModelParams& params) {
  return build_jacobians(params, equilibrium(params));
}

}  // namespace ratiodelay
