#include "gpbold/identify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "gpbold/stats.hpp"

namespace gpbold {

Vector normalize_column(const Vector& f, const Vector& prior_mean) {
  if (f.size() != prior_mean.size()) throw ShapeError("normalize_column: length mismatch");
  const double sup = f.cwiseAbs().maxCoeff();
  if (sup == 0.0) throw NumericalError("normalize_column: zero vector");
  const double dot = f.dot(prior_mean);
  double sign = 1.0;
  if (dot < 0.0) {
    sign = -1.0;
  } else if (dot == 0.0) {
    std::cerr << "gpbold: normalize_column: f' m == 0 exactly, taking sign(0) = +1\n";
  }
  return f / (sup * sign);
}

std::vector<int> match_permutation(const Matrix& f_post, const Matrix& f0) {
  const int m_count = static_cast<int>(f_post.cols());
  if (m_count < 1) throw ShapeError("match_permutation: no columns");
  if (f0.cols() != m_count || f0.rows() != f_post.rows())
    throw ShapeError("match_permutation: shape mismatch");
  if (m_count == 1) return {0};
  if (m_count > 8)
    throw ParameterError("match_permutation: exhaustive search supports at most 8 stimuli");

  // |corr| table: source column c against destination mean column m
  Matrix score(m_count, m_count);
  for (int c = 0; c < m_count; ++c)
    for (int m = 0; m < m_count; ++m)
      score(c, m) = std::abs(pearson_corr(f_post.col(c), f0.col(m)));

  std::vector<int> perm(m_count), best(m_count);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_total = -1.0;
  do {
    double total = 0.0;
    for (int m = 0; m < m_count; ++m) total += score(perm[m], m);
    if (total > best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

LatentBold transform(const Matrix& f, const Matrix& f0) {
  LatentBold out;
  out.raw = f;
  const int m_count = static_cast<int>(f.cols());
  if (m_count == 1) {
    out.permutation = {0};
    out.transformed = normalize_column(f.col(0), f0.col(0));
    return out;
  }
  out.permutation = match_permutation(f, f0);
  out.transformed.resize(f.rows(), m_count);
  for (int m = 0; m < m_count; ++m)
    out.transformed.col(m) = normalize_column(f.col(out.permutation[m]), f0.col(m));
  return out;
}

}  // namespace gpbold
