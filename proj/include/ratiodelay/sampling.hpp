#pragma once

// Seeded random systems for property checks and the verification suite.

#include <cmath>
#include <cstddef>
#include <random>

#include "ratiodelay/linearize.hpp"
#include "ratiodelay/model.hpp"

namespace ratiodelay::sampling {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

enum class A11Sign { Negative, NonPositive, Any };

/// Entries with the delayed sign pattern: a11 per `a11`, a_diag < 0,
/// a_row < 0, a_col > 0, alpha > 0. Magnitudes are log-uniform in [0.1, 10].
inline JacobianLabels random_pattern_labels(Rng& rng, std::size_t n, A11Sign a11 = A11Sign::Negative) {
  JacobianLabels l;
  const double mag = log_uniform(rng, 0.1, 10.0);
  switch (a11) {
    case A11Sign::Negative: l.a11 = -mag; break;
    case A11Sign::NonPositive: l.a11 = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : -mag; break;
    case A11Sign::Any: l.a11 = uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag; break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    l.a_diag.push_back(-log_uniform(rng, 0.1, 10.0));
    l.a_row.push_back(-log_uniform(rng, 0.1, 10.0));
    l.a_col.push_back(log_uniform(rng, 0.1, 10.0));
  }
  l.alpha = log_uniform(rng, 1e-2, 1e2);
  return l;
}

/// Pattern-conforming entries that also satisfy
///   a11^2 > a_ii^2 > -a_row_i a_col_i for every predator.
inline JacobianLabels random_robust_labels(Rng& rng, std::size_t n) {
  JacobianLabels l;
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diag = log_uniform(rng, 0.1, 10.0);
    largest = std::max(largest, diag);
    const double row = log_uniform(rng, 0.1, 10.0);
    const double col = uniform(rng, 0.01, 0.99) * diag * diag / row;
    l.a_diag.push_back(-diag);
    l.a_row.push_back(-row);
    l.a_col.push_back(col);
  }
  l.a11 = -largest * uniform(rng, 1.01, 3.0);
  l.alpha = log_uniform(rng, 1e-2, 1e2);
  return l;
}

/// Random admissible model (m > d) with the given response kind; r is chosen
/// so that a positive equilibrium exists.
inline ModelParams random_params(Rng& rng, std::size_t n, ResponseKind kind, bool with_memory) {
  ModelParams p;
  p.growth.K = log_uniform(rng, 0.05, 20.0);
  double load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Predator pred;
    pred.response.kind = kind;
    pred.response.m = log_uniform(rng, 0.5, 20.0);
    pred.d = pred.response.m * uniform(rng, 0.05, 0.95);
    pred.response.a = log_uniform(rng, 0.1, 10.0);
    load += pred.d * equilibrium_ratio(pred.response, pred.d);
    p.predators.push_back(pred);
  }
  p.r = load * uniform(rng, 1.05, 4.0);
  if (with_memory) p.alpha = log_uniform(rng, 0.05, 20.0);
  return p;
}

}  // namespace ratiodelay::sampling
