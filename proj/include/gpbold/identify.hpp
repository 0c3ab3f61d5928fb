#pragma once

#include <vector>

#include "gpbold/types.hpp"

namespace gpbold {

/// Result of the identifying transformation H(F): per-column sup-norm and
/// sign normalization followed by the correlation-maximizing column
/// permutation against the prior mean.
struct LatentBold {
  Matrix raw;                    // F as sampled
  Matrix transformed;            // H(F), every column sup-norm 1, entries in [-1, 1]
  std::vector<int> permutation;  // transformed.col(m) was built from raw.col(permutation[m])
};

/// f / (||f||_inf * sign(f' prior_mean)). sign(0) is taken as +1 with a
/// warning on stderr (measure-zero event under the continuous prior).
Vector normalize_column(const Vector& f, const Vector& prior_mean);

/// Ordering sigma maximizing sum_m |corr(f_post[sigma(m)], f0[m])|; the
/// absolute value resolves sign flips, which normalize_column removes per
/// destination slot. Exhaustive search; M <= 8.
std::vector<int> match_permutation(const Matrix& f_post, const Matrix& f0);

/// Full H(F): permutation match, then per-destination-slot normalization.
LatentBold transform(const Matrix& f, const Matrix& f0);

}  // namespace gpbold
