#include <doctest.h>

#include <cmath>

#include "gpbold/paradigm.hpp"
#include "gpbold/simulation.hpp"
#include "gpbold/stats.hpp"

using namespace gpbold;

namespace {

Paradigm impulse_paradigm(int n_time, int presample, double tr, double onset) {
  Paradigm p;
  p.tr = tr;
  p.n_time = n_time;
  p.presample = presample;
  p.stimuli.push_back({{onset, 0.0}});
  return p;
}

// Independent direct-sum convolution oracle: indicator and HRF tap by tap.
Vector brute_force_mean(const Paradigm& p, const HrfParams& hrf, int m) {
  const int taps = static_cast<int>(std::floor(hrf.kernel_length / p.tr)) + 1;
  Vector out(p.n_points());
  for (int i = 0; i < p.n_points(); ++i) {
    const int idx = p.first_index() + i;
    double acc = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double t = (idx - k) * p.tr;
      double s = 0.0;
      for (const auto& e : p.stimuli[m]) {
        if (e.duration <= 0.0) {
          if (std::abs(t - e.onset) < 0.5 * p.tr) s += 1.0;
        } else if (t >= e.onset - 1e-12 && t < e.onset + e.duration - 1e-12) {
          s += 1.0;
        }
      }
      acc += s * double_gamma(k * p.tr, hrf);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("double_gamma is causal and vanishes at the origin") {
  HrfParams hrf;
  CHECK(double_gamma(-1.0, hrf) == 0.0);
  CHECK(double_gamma(0.0, hrf) == 0.0);
  CHECK(double_gamma(5.0, hrf) > 0.0);
}

TEST_CASE("double_gamma peaks near 5 s with default parameters") {
  HrfParams hrf;
  double best_t = 0.0, best_v = -1.0;
  for (double t = 0.0; t <= 30.0; t += 0.01) {
    const double v = double_gamma(t, hrf);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  CHECK(std::abs(best_t - 5.0) <= 0.5);
}

TEST_CASE("double_gamma rejects non-positive dispersion") {
  HrfParams hrf;
  hrf.peak_dispersion = 0.0;
  CHECK_THROWS_AS(double_gamma(1.0, hrf), ParameterError);
  hrf.peak_dispersion = 1.0;
  hrf.undershoot_dispersion = -2.0;
  CHECK_THROWS_AS(double_gamma(1.0, hrf), ParameterError);
}

TEST_CASE("mean function of an empty event list is all zero before standardization") {
  Paradigm p;
  p.tr = 1.0;
  p.n_time = 40;
  p.presample = 2;
  p.stimuli.push_back({});
  const MeanFunction mf = build_mean_function(p, HrfParams{}, false);
  CHECK(mf.values.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(build_mean_function(p, HrfParams{}, true), NumericalError);
}

TEST_CASE("unit impulse at t=0 reproduces the sampled HRF") {
  const Paradigm p = impulse_paradigm(40, 0, 1.0, 0.0);
  const HrfParams hrf;
  const MeanFunction mf = build_mean_function(p, hrf, false);
  const Vector taps = sample_hrf(hrf, p.tr);
  for (int i = 0; i < p.n_time; ++i) {
    const int lag = p.first_index() + i;
    const double expected = (lag >= 0 && lag < taps.size()) ? taps[lag] : 0.0;
    CHECK(mf.values(i, 0) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("paradigm with zero stimulus types is rejected") {
  Paradigm p;
  p.tr = 1.0;
  p.n_time = 10;
  CHECK_THROWS_AS(build_mean_function(p, HrfParams{}, false), ParameterError);
}

TEST_CASE("block paradigm matches the direct-sum convolution oracle") {
  const Paradigm p = block_paradigm();
  const HrfParams hrf;
  const MeanFunction mf = build_mean_function(p, hrf, false);
  const Vector oracle = brute_force_mean(p, hrf, 0);
  CHECK((mf.values.col(0) - oracle).cwiseAbs().maxCoeff() < 1e-10);

  // five rise-plateau-fall cycles cross the midline ten times
  const Vector v = mf.values.col(0);
  const double mid = 0.5 * (v.maxCoeff() + v.minCoeff());
  int crossings = 0;
  for (int i = 1; i < v.size(); ++i)
    if ((v[i - 1] < mid) != (v[i] < mid)) ++crossings;
  CHECK(crossings == 10);
}

TEST_CASE("convolution is linear in the paradigm") {
  Paradigm a = block_paradigm();
  Paradigm b = block_paradigm();
  b.stimuli[0] = {{12.0, 7.0}, {80.0, 3.0}};
  Paradigm both = a;
  both.stimuli[0].insert(both.stimuli[0].end(), b.stimuli[0].begin(), b.stimuli[0].end());

  const HrfParams hrf;
  const Vector fa = build_mean_function(a, hrf, false).values.col(0);
  const Vector fb = build_mean_function(b, hrf, false).values.col(0);
  const Vector fab = build_mean_function(both, hrf, false).values.col(0);
  CHECK((fab - fa - fb).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shifting onsets shifts the mean function") {
  Paradigm base = impulse_paradigm(60, 0, 1.0, 5.0);
  base.stimuli[0] = {{5.0, 4.0}};
  Paradigm shifted = base;
  const double s = 7.0;
  for (auto& e : shifted.stimuli[0]) e.onset += s;

  const HrfParams hrf;
  const Vector f0 = build_mean_function(base, hrf, false).values.col(0);
  const Vector f1 = build_mean_function(shifted, hrf, false).values.col(0);
  const int lag = static_cast<int>(s / base.tr);
  for (int i = lag; i < f0.size(); ++i)
    CHECK(f1[i] == doctest::Approx(f0[i - lag]).epsilon(1e-12));
}

TEST_CASE("standardized mean function has zero mean and unit variance") {
  const MeanFunction mf = build_mean_function(block_paradigm(), HrfParams{}, true);
  CHECK(std::abs(mean(mf.values.col(0))) < 1e-12);
  CHECK(std::abs(sample_variance(mf.values.col(0)) - 1.0) < 1e-12);
  CHECK(mf.standardized);
}

TEST_CASE("paradigm json round trip") {
  const Paradigm p = block_paradigm();
  const Paradigm q = Paradigm::from_json_text(p.to_json_text());
  CHECK(q.tr == p.tr);
  CHECK(q.n_time == p.n_time);
  CHECK(q.presample == p.presample);
  REQUIRE(q.stimuli.size() == p.stimuli.size());
  REQUIRE(q.stimuli[0].size() == p.stimuli[0].size());
  CHECK(q.stimuli[0][3].onset == p.stimuli[0][3].onset);
  CHECK(q.stimuli[0][3].duration == p.stimuli[0][3].duration);
}

TEST_CASE("paradigm validation rejects bad events") {
  Paradigm p = block_paradigm();
  p.stimuli[0][0].onset = -1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = block_paradigm();
  p.stimuli[0][0] = {149.0, 5.0};
  CHECK_THROWS_AS(p.validate(), ParameterError);
}
