#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "gpbold/identify.hpp"
#include "gpbold/rng.hpp"
#include "gpbold/stats.hpp"

using namespace gpbold;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) m.col(j) = rng.normal_vector(rows);
  return m;
}

// Exhaustive assignment oracle written independently of match_permutation.
std::vector<int> exhaustive_match(const Matrix& f_post, const Matrix& f0) {
  const int m = static_cast<int>(f_post.cols());
  std::vector<int> perm(m), best(m);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_total = -1e300;
  do {
    double total = 0.0;
    for (int slot = 0; slot < m; ++slot)
      total += std::abs(pearson_corr(f_post.col(perm[slot]), f0.col(slot)));
    if (total > best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("normalize_column is a fixed point on already normalized input") {
  Vector f(4);
  f << 0.25, -0.5, 1.0, 0.75;  // sup norm 1
  Vector m(4);
  m << 0.2, -0.4, 0.9, 0.7;  // positively aligned
  const Vector h = normalize_column(f, m);
  CHECK((h - f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalize_column corrects a sign flip") {
  Vector m(3);
  m << 1.0, 2.0, -0.5;
  const Vector h = normalize_column(Vector(-m), m);
  const Vector expected = m / m.cwiseAbs().maxCoeff();
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("normalize_column is invariant to nonzero column scaling") {
  Rng rng(5);
  const Vector g = rng.normal_vector(20);
  const Vector m = rng.normal_vector(20);
  for (double c : {2.0, -3.5, 1e-6, -1e8}) {
    const Vector a = normalize_column(c * g, m);
    const Vector b = normalize_column(g, m);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalize_column rejects the zero vector") {
  CHECK_THROWS_AS(normalize_column(Vector::Zero(5), Vector::Ones(5)), NumericalError);
}

TEST_CASE("zero inner product falls back to positive sign") {
  Vector f(2), m(2);
  f << 1.0, 0.0;
  m << 0.0, 1.0;  // exactly orthogonal
  const Vector h = normalize_column(f, m);
  CHECK(h[0] == 1.0);
}

TEST_CASE("match_permutation on one column is the identity") {
  Rng rng(11);
  const Matrix f = random_matrix(15, 1, rng);
  CHECK(match_permutation(f, f) == std::vector<int>{0});
}

TEST_CASE("match_permutation recovers a swap") {
  Rng rng(42);
  const Matrix f0 = random_matrix(30, 2, rng);
  Matrix swapped(30, 2);
  swapped.col(0) = f0.col(1);
  swapped.col(1) = f0.col(0);
  const std::vector<int> perm = match_permutation(swapped, f0);
  CHECK(perm == std::vector<int>({1, 0}));
}

TEST_CASE("match_permutation equals the exhaustive oracle for M = 3") {
  Rng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    const Matrix f0 = random_matrix(25, 3, rng);
    const Matrix fp = random_matrix(25, 3, rng);
    CHECK(match_permutation(fp, f0) == exhaustive_match(fp, f0));
  }
}

TEST_CASE("match_permutation rejects constant columns and oversized M") {
  Matrix f = Matrix::Ones(10, 2);
  Matrix f0 = Matrix::Random(10, 2);
  CHECK_THROWS_AS(match_permutation(f, f0), NumericalError);
  Matrix big = Matrix::Random(10, 9);
  CHECK_THROWS_AS(match_permutation(big, big), ParameterError);
}

TEST_CASE("transform fixes scale and sign for a single stimulus") {
  Rng rng(3);
  const Vector f0 = rng.normal_vector(40);
  const LatentBold lb = transform(f0, f0);
  CHECK(lb.permutation == std::vector<int>{0});
  CHECK((lb.transformed - f0 / f0.cwiseAbs().maxCoeff()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(lb.transformed.cwiseAbs().maxCoeff() == 1.0);
}

TEST_CASE("transform is invariant to per-column rescaling") {
  Rng rng(21);
  const Matrix f0 = random_matrix(40, 3, rng);
  Matrix f = f0;
  f.col(0) *= 4.2;
  f.col(1) *= -0.003;
  f.col(2) *= -77.0;
  const LatentBold a = transform(f, f0);
  const LatentBold b = transform(f0, f0);
  CHECK((a.transformed - b.transformed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transform undoes permutation, sign flip and rescaling together") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng.below(3));  // 2..4
    Matrix f0 = random_matrix(35, m, rng);
    // S = diagonal scale * sign times a permutation
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Matrix fs(35, m);
    for (int c = 0; c < m; ++c) {
      double scale = 0.0;
      while (std::abs(scale) < 0.05) scale = 3.0 * (rng.uniform() - 0.5);
      fs.col(c) = scale * f0.col(perm[c]);
    }
    const LatentBold a = transform(fs, f0);
    const LatentBold b = transform(f0, f0);
    CHECK((a.transformed - b.transformed).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("every transformed column has sup-norm exactly one") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix f0 = random_matrix(28, 2, rng);
    const Matrix f = random_matrix(28, 2, rng);
    const LatentBold lb = transform(f, f0);
    for (Index c = 0; c < 2; ++c) CHECK(lb.transformed.col(c).cwiseAbs().maxCoeff() == 1.0);
  }
}

TEST_CASE("transform is idempotent on its image") {
  Rng rng(13);
  const Matrix f0 = random_matrix(30, 2, rng);
  const Matrix f = random_matrix(30, 2, rng);
  const LatentBold once = transform(f, f0);
  const LatentBold twice = transform(once.transformed, f0);
  CHECK((twice.transformed - once.transformed).cwiseAbs().maxCoeff() < 1e-12);
}
