#pragma once

#include <string>
#include <vector>

#include "gpbold/model.hpp"
#include "gpbold/types.hpp"

namespace gpbold {

/// Bayesian t-ratio (E[b|y] - c) / sd(b|y) over retained draws.
double t_ratio(const Vector& draws, double c);

/// Fraction of retained draws exceeding c.
double ppm(const Vector& draws, double c);

struct RocCurve {
  Vector thresholds;
  Vector tpr;
  Vector fpr;
  double auc = 0.0;
};

/// 60 equidistant thresholds on [1, 4].
Vector default_thresholds();

/// Per threshold a: TPR = P(t > a | active), FPR = P(t > a | inactive).
/// AUC by trapezoid over (FPR, TPR) extended to (0,0) and (1,1).
RocCurve roc_curve(const Vector& t_values, const std::vector<bool>& truth,
                   const Vector& thresholds);

/// Pointwise average of per-dataset curves on a shared threshold grid.
RocCurve average_roc(const std::vector<RocCurve>& curves);

/// Column-wise sd normalization followed by 100/GM rescaling, GM being the
/// grand mean of the sd-normalized data. Resulting grand mean is 100.
Matrix scale_global_mean(const Matrix& y);

/// t-ratios and posterior probability maps for every (stimulus, voxel).
/// For the fixed-derivative model only the first basis row per stimulus is
/// reported.
struct ActivityMap {
  Matrix t_values;  // M x J
  Matrix ppm;       // M x J
  double effect_threshold = 0.0;
  std::string parcel_id;
};

ActivityMap activity_map(const PosteriorDraws& draws, double c);

}  // namespace gpbold
