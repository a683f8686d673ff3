#include "platecount/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace platecount {

std::vector<double> class_weights(const std::vector<double>& frequencies) {
  if (frequencies.empty()) throw std::invalid_argument("class_weights: empty frequency list");
  std::vector<double> weights(frequencies.size());
  double total = 0.0;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0.0)) {
      throw std::invalid_argument("class_weights: frequency " + std::to_string(i) +
                                  " is not positive");
    }
    weights[i] = std::sqrt(1.0 / frequencies[i]);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

MaskMetrics mask_metrics(const LabelMask& pred, const LabelMask& truth) {
  if (pred.height() != truth.height() || pred.width() != truth.width()) {
    throw std::invalid_argument(
        "dimension mismatch: pred " + std::to_string(pred.height()) + "x" +
        std::to_string(pred.width()) + " vs truth " + std::to_string(truth.height()) + "x" +
        std::to_string(truth.width()));
  }

  std::array<std::array<std::size_t, kClassCount>, kClassCount> confusion{};
  const auto& p = pred.labels();
  const auto& t = truth.labels();
  std::size_t agree = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    confusion[t[i]][p[i]]++;
    if (p[i] == t[i]) ++agree;
  }

  MaskMetrics out;
  out.accuracy = static_cast<double>(agree) / static_cast<double>(p.size());

  double f1_sum = 0.0;
  int f1_count = 0;
  for (int cls = 0; cls < kClassCount; ++cls) {
    std::size_t tp = confusion[cls][cls];
    std::size_t fn = 0, fp = 0;
    for (int other = 0; other < kClassCount; ++other) {
      if (other == cls) continue;
      fn += confusion[cls][other];
      fp += confusion[other][cls];
    }
    if (tp + fn + fp == 0) {
      out.absent_classes.push_back(static_cast<ClassId>(cls));
      continue;
    }
    const double f1 = 2.0 * static_cast<double>(tp) /
                      static_cast<double>(2 * tp + fp + fn);
    out.per_class_f1[static_cast<ClassId>(cls)] = f1;
    f1_sum += f1;
    ++f1_count;
  }
  out.macro_f1 = f1_count > 0 ? f1_sum / f1_count : 0.0;
  return out;
}

namespace {

GroupStats stats_of(unsigned actual_size, const std::vector<double>& values, bool overall) {
  GroupStats g;
  g.actual_size = actual_size;
  g.overall = overall;
  g.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  g.mean = sum / static_cast<double>(g.n);
  if (g.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.stddev = std::sqrt(ss / static_cast<double>(g.n - 1));
  } else {
    g.stddev = 0.0;
    g.single_sample = true;
  }
  g.cv = g.mean > 0.0 ? g.stddev / g.mean : std::numeric_limits<double>::quiet_NaN();
  g.se = g.stddev / std::sqrt(static_cast<double>(g.n));
  return g;
}

}  // namespace

std::vector<GroupStats> group_stats(const std::vector<CountRecord>& records) {
  if (records.empty()) throw std::invalid_argument("group_stats: no records");

  std::map<unsigned, std::vector<double>> groups;
  std::vector<double> pooled;
  pooled.reserve(records.size());
  for (const CountRecord& rec : records) {
    if (!rec.actual.has_value()) {
      throw std::invalid_argument("group_stats: record " + std::to_string(rec.cluster_id) +
                                  " has no ground-truth count");
    }
    groups[*rec.actual].push_back(static_cast<double>(rec.count));
    pooled.push_back(static_cast<double>(rec.count));
  }

  std::vector<GroupStats> out;
  out.reserve(groups.size() + 1);
  for (const auto& [size, values] : groups) {
    out.push_back(stats_of(size, values, false));
  }
  out.push_back(stats_of(0, pooled, true));
  return out;
}

RegressionFit linear_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("linear_fit: needs at least 2 pairs");

  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : pairs) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(pairs.size());
  mean_y /= static_cast<double>(pairs.size());

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: all actual values are equal");

  RegressionFit fit;
  fit.n = pairs.size();
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ss_res = 0.0;
  for (const auto& [x, y] : pairs) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
  return fit;
}

}  // namespace platecount
