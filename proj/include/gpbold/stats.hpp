#pragma once

#include <cmath>

#include "gpbold/types.hpp"

namespace gpbold {

inline double mean(const Vector& x) { return x.mean(); }

/// Unbiased sample variance (n-1 denominator).
inline double sample_variance(const Vector& x) {
  const Index n = x.size();
  if (n < 2) return 0.0;
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(n - 1);
}

inline double sample_sd(const Vector& x) { return std::sqrt(sample_variance(x)); }

/// Rescale to zero mean, unit sample variance. Errors on constant input.
inline Vector standardized(const Vector& x) {
  const double sd = sample_sd(x);
  if (!(sd > 0.0)) throw NumericalError("standardize: input has zero variance");
  return (x.array() - x.mean()) / sd;
}

/// Pearson correlation. Errors if either input is constant.
inline double pearson_corr(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ShapeError("pearson_corr: length mismatch");
  const double sx = sample_sd(x), sy = sample_sd(y);
  if (!(sx > 0.0) || !(sy > 0.0))
    throw NumericalError("pearson_corr: correlation undefined for constant input");
  const Index n = x.size();
  const double cov =
      ((x.array() - x.mean()) * (y.array() - y.mean())).sum() / static_cast<double>(n - 1);
  return cov / (sx * sy);
}

}  // namespace gpbold
