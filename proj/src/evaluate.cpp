#include "gpbold/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "gpbold/stats.hpp"

namespace gpbold {

double t_ratio(const Vector& draws, double c) {
  if (draws.size() < 2) throw ParameterError("t_ratio: needs at least two draws");
  const double sd = sample_sd(draws);
  if (!(sd > 0.0)) throw NumericalError("t_ratio: undefined for zero posterior variance");
  return (draws.mean() - c) / sd;
}

double ppm(const Vector& draws, double c) {
  if (draws.size() < 1) throw ParameterError("ppm: needs at least one draw");
  return static_cast<double>((draws.array() > c).count()) / static_cast<double>(draws.size());
}

Vector default_thresholds() {
  Vector t(60);
  for (Index i = 0; i < 60; ++i) t[i] = 1.0 + 3.0 * static_cast<double>(i) / 59.0;
  return t;
}

RocCurve roc_curve(const Vector& t_values, const std::vector<bool>& truth,
                   const Vector& thresholds) {
  if (static_cast<Index>(truth.size()) != t_values.size())
    throw ShapeError("roc_curve: t-values and truth lengths differ");
  Index n_pos = 0;
  for (bool a : truth) n_pos += a;
  const Index n_neg = static_cast<Index>(truth.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ParameterError("roc_curve: truth needs at least one active and one inactive voxel");

  RocCurve curve;
  curve.thresholds = thresholds;
  curve.tpr.resize(thresholds.size());
  curve.fpr.resize(thresholds.size());
  for (Index i = 0; i < thresholds.size(); ++i) {
    Index tp = 0, fp = 0;
    for (Index v = 0; v < t_values.size(); ++v) {
      if (t_values[v] > thresholds[i]) {
        if (truth[v]) ++tp;
        else ++fp;
      }
    }
    curve.tpr[i] = static_cast<double>(tp) / static_cast<double>(n_pos);
    curve.fpr[i] = static_cast<double>(fp) / static_cast<double>(n_neg);
  }

  // trapezoid over (fpr, tpr) sorted by fpr, extended to the corners
  std::vector<std::pair<double, double>> pts;
  pts.reserve(thresholds.size() + 2);
  pts.emplace_back(0.0, 0.0);
  for (Index i = 0; i < thresholds.size(); ++i) pts.emplace_back(curve.fpr[i], curve.tpr[i]);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += 0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
  curve.auc = auc;
  return curve;
}

RocCurve average_roc(const std::vector<RocCurve>& curves) {
  if (curves.empty()) throw ParameterError("average_roc: no curves");
  RocCurve avg;
  avg.thresholds = curves[0].thresholds;
  avg.tpr = Vector::Zero(avg.thresholds.size());
  avg.fpr = Vector::Zero(avg.thresholds.size());
  for (const auto& c : curves) {
    if (c.thresholds.size() != avg.thresholds.size())
      throw ShapeError("average_roc: threshold grids differ");
    avg.tpr += c.tpr;
    avg.fpr += c.fpr;
  }
  avg.tpr /= static_cast<double>(curves.size());
  avg.fpr /= static_cast<double>(curves.size());

  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 0.0);
  for (Index i = 0; i < avg.thresholds.size(); ++i) pts.emplace_back(avg.fpr[i], avg.tpr[i]);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += 0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
  avg.auc = auc;
  return avg;
}

Matrix scale_global_mean(const Matrix& y) {
  std::vector<Index> degenerate;
  Matrix scaled(y.rows(), y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const double sd = sample_sd(y.col(j));
    if (!(sd > 0.0)) {
      degenerate.push_back(j);
      continue;
    }
    scaled.col(j) = y.col(j) / sd;
  }
  if (!degenerate.empty()) {
    std::string msg = "scale_global_mean: zero-sd voxel column(s):";
    for (Index j : degenerate) msg += " " + std::to_string(j);
    throw NumericalError(msg);
  }
  const double gm = scaled.mean();
  if (gm == 0.0) throw NumericalError("scale_global_mean: grand mean is zero");
  return scaled * (100.0 / gm);
}

ActivityMap activity_map(const PosteriorDraws& draws, double c) {
  const bool derivative_basis = draws.model == "fixed-deriv";
  const Index stride = derivative_basis ? 2 : 1;
  const Index m_count = draws.n_bold / stride;
  ActivityMap map;
  map.effect_threshold = c;
  map.parcel_id = draws.parcel_id;
  map.t_values.resize(m_count, draws.n_voxels);
  map.ppm.resize(m_count, draws.n_voxels);
  for (Index m = 0; m < m_count; ++m) {
    for (Index j = 0; j < draws.n_voxels; ++j) {
      const Vector b = draws.b_draws(m * stride, j);
      map.t_values(m, j) = t_ratio(b, c);
      map.ppm(m, j) = ppm(b, c);
    }
  }
  return map;
}

}  // namespace gpbold
