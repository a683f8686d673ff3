#pragma once

#include <map>
#include <utility>
#include <vector>

#include "platecount/core.hpp"

namespace platecount {

/// Per-class pixel F1 plus overall accuracy for a predicted-vs-truth mask
/// pair. Classes absent from both masks cannot have an F1 (0/0); they are
/// listed in absent_classes and excluded from macro_f1.
struct MaskMetrics {
  std::map<ClassId, double> per_class_f1;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<ClassId> absent_classes;
};

/// Statistics of predicted counts within one actual-size group. `cv` is
/// std/mean and is NaN when the mean is 0 (serialized as null). Groups of a
/// single record report std = 0 and are flagged. The pooled row over all
/// records carries overall = true.
struct GroupStats {
  unsigned actual_size = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, n-1 denominator
  double cv = 0.0;
  double se = 0.0;
  bool single_sample = false;
  bool overall = false;
};

/// Ordinary least squares of predicted on actual.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Normalized square-root inverse-frequency weights:
/// w_i = sqrt(1/f_i) / sum_j sqrt(1/f_j). Throws std::invalid_argument on an
/// empty list or any nonpositive frequency.
std::vector<double> class_weights(const std::vector<double>& frequencies);

MaskMetrics mask_metrics(const LabelMask& pred, const LabelMask& truth);

/// One row per distinct actual size (ascending), then the pooled overall
/// row. Every record must carry `actual`; throws std::invalid_argument
/// otherwise or on empty input.
std::vector<GroupStats> group_stats(const std::vector<CountRecord>& records);

/// pairs = (actual, predicted). Needs >= 2 pairs with at least two distinct
/// actual values. r2 = 1 - SSres/SStot, defined as 1 when SStot = 0.
RegressionFit linear_fit(const std::vector<std::pair<double, double>>& pairs);

}  // namespace platecount
