#include "platecount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "platecount/rng.hpp"

namespace platecount {

namespace {

constexpr double kDistractorAmplitude = 0.9;
constexpr double kDistractorSigma = 1.3;
constexpr int kDistractorRetries = 1000;

void accumulate_blob(std::vector<double>& field, int height, int width, double row,
                     double col, double amplitude, double sigma) {
  // 6-sigma cutoff: tails below ~1.5e-8 are dropped deterministically.
  const int reach = static_cast<int>(std::ceil(6.0 * sigma));
  const int r0 = std::max(static_cast<int>(std::floor(row)) - reach, 0);
  const int r1 = std::min(static_cast<int>(std::ceil(row)) + reach, height - 1);
  const int c0 = std::max(static_cast<int>(std::floor(col)) - reach, 0);
  const int c1 = std::min(static_cast<int>(std::ceil(col)) + reach, width - 1);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double dr = r - row;
      const double dc = c - col;
      field[static_cast<std::size_t>(r) * width + c] +=
          amplitude * std::exp(-(dr * dr + dc * dc) * inv);
    }
  }
}

std::vector<std::size_t> field_footprint(const std::vector<double>& field,
                                         double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] >= threshold) out.push_back(i);
  }
  return out;
}

void validate_spec(const SceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1) {
    throw std::invalid_argument("scene dimensions must be at least 1x1");
  }
  if (!(spec.background_level >= 0.0 && spec.background_level <= 1.0)) {
    throw std::invalid_argument("background_level must be in [0,1]");
  }
  if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  if (spec.distractors < 0) throw std::invalid_argument("distractors must be >= 0");
  for (const AggregateSpec& agg : spec.aggregates) {
    if (agg.n_platelets < 1) throw std::invalid_argument("n_platelets must be >= 1");
    if (!(agg.spacing > 0.0)) throw std::invalid_argument("spacing must be > 0");
    if (!(agg.blob_sigma > 0.0)) throw std::invalid_argument("blob_sigma must be > 0");
    if (!(agg.amplitude > 0.0 && agg.amplitude <= 1.0)) {
      throw std::invalid_argument("amplitude must be in (0,1]");
    }
    if (agg.center.row < 0 || agg.center.row >= spec.height || agg.center.col < 0 ||
        agg.center.col >= spec.width) {
      throw std::invalid_argument("aggregate center outside the grid");
    }
  }
}

}  // namespace

Scene render_scene(const SceneSpec& spec) {
  validate_spec(spec);
  const int h = spec.height;
  const int w = spec.width;
  const std::size_t n_px = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);

  // Blob centers, rounded to the pixel grid; these are the ground truth.
  SceneTruth truth;
  std::vector<std::vector<PixelCoord>> agg_centers(spec.aggregates.size());
  for (std::size_t a = 0; a < spec.aggregates.size(); ++a) {
    const AggregateSpec& agg = spec.aggregates[a];
    // The center-to-center step is rounded once and reused, so the chain is
    // exactly collinear with uniform pixel spacing. Rounding every blob
    // independently can collapse the middle pair of an even-sized aggregate
    // to 2 px, where two blobs blur into a single intensity bump.
    const int step_r = static_cast<int>(std::lround(agg.spacing * std::sin(agg.orientation)));
    const int step_c = static_cast<int>(std::lround(agg.spacing * std::cos(agg.orientation)));
    const double half = (agg.n_platelets - 1) / 2.0;
    const int anchor_r = static_cast<int>(std::lround(agg.center.row - half * step_r));
    const int anchor_c = static_cast<int>(std::lround(agg.center.col - half * step_c));
    std::set<PixelCoord> unique;
    for (unsigned i = 0; i < agg.n_platelets; ++i) {
      const PixelCoord p{anchor_r + static_cast<int>(i) * step_r,
                         anchor_c + static_cast<int>(i) * step_c};
      if (p.row < 0 || p.row >= h || p.col < 0 || p.col >= w) {
        throw std::invalid_argument("platelet center of aggregate " + std::to_string(a) +
                                    " falls outside the grid");
      }
      if (!unique.insert(p).second) {
        throw std::invalid_argument("platelet centers of aggregate " + std::to_string(a) +
                                    " collide after rounding (spacing too small)");
      }
      agg_centers[a].push_back(p);
      truth.platelet_centers.push_back({p, static_cast<unsigned>(a)});
    }
    truth.aggregate_counts.push_back(agg.n_platelets);
  }

  // Per-aggregate contribution fields; labels come from the noise-free
  // signal so ground truth does not depend on the noise draw.
  std::vector<double> signal(n_px, 0.0);
  std::vector<int> owner(n_px, -1);
  LabelMask mask(h, w);
  for (std::size_t a = 0; a < spec.aggregates.size(); ++a) {
    const AggregateSpec& agg = spec.aggregates[a];
    std::vector<double> field(n_px, 0.0);
    for (const PixelCoord& p : agg_centers[a]) {
      accumulate_blob(field, h, w, p.row, p.col, agg.amplitude, agg.blob_sigma);
    }
    const ClassId cls =
        agg.n_platelets == 1 ? ClassId::platelet : ClassId::platelet_aggregate;
    for (std::size_t i : field_footprint(field, agg.amplitude / 2.0)) {
      if (owner[i] != -1) {
        throw std::invalid_argument("aggregates " + std::to_string(owner[i]) + " and " +
                                    std::to_string(a) + " overlap");
      }
      owner[i] = static_cast<int>(a);
      mask.set(PixelCoord{static_cast<int>(i / w), static_cast<int>(i % w)}, cls);
    }
    for (std::size_t i = 0; i < n_px; ++i) signal[i] += field[i];
  }

  Rng rng(spec.seed);

  // Distractors: bright larger blobs labeled rbc-exterior, rejected until
  // their footprint is disjoint from everything already placed.
  for (int d = 0; d < spec.distractors; ++d) {
    bool placed = false;
    for (int attempt = 0; attempt < kDistractorRetries && !placed; ++attempt) {
      const int row = rng.uniform_int(h);
      const int col = rng.uniform_int(w);
      std::vector<double> field(n_px, 0.0);
      accumulate_blob(field, h, w, row, col, kDistractorAmplitude, kDistractorSigma);
      const std::vector<std::size_t> footprint =
          field_footprint(field, kDistractorAmplitude / 2.0);
      bool clash = false;
      for (std::size_t i : footprint) {
        if (owner[i] != -1) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      for (std::size_t i : footprint) {
        owner[i] = static_cast<int>(spec.aggregates.size()) + d;
        mask.set(PixelCoord{static_cast<int>(i / w), static_cast<int>(i % w)},
                 ClassId::rbc_exterior);
      }
      for (std::size_t i = 0; i < n_px; ++i) signal[i] += field[i];
      placed = true;
    }
    if (!placed) {
      throw std::invalid_argument("could not place distractor " + std::to_string(d) +
                                  " without overlap");
    }
  }

  // Intensity: noise is drawn per pixel in row-major order, after all
  // placement draws.
  std::vector<double> values(n_px);
  for (std::size_t i = 0; i < n_px; ++i) {
    const double v = spec.background_level + signal[i] + rng.gaussian() * spec.noise_sigma;
    values[i] = std::clamp(v, 0.0, 1.0);
  }

  return Scene{IntensityPlane(h, w, std::move(values)), std::move(mask), std::move(truth)};
}

std::vector<BenchmarkScene> benchmark_suite(std::uint64_t seed,
                                            const std::vector<unsigned>& sizes,
                                            int per_size, Difficulty difficulty,
                                            int height, int width) {
  if (sizes.empty()) throw std::invalid_argument("benchmark_suite: sizes must be nonempty");
  if (per_size < 1) throw std::invalid_argument("benchmark_suite: per_size must be >= 1");
  for (unsigned s : sizes) {
    if (s < 1) throw std::invalid_argument("benchmark_suite: aggregate sizes must be >= 1");
  }

  const double spacing = difficulty == Difficulty::clean ? 3.0 : 1.5;
  const double noise = difficulty == Difficulty::clean ? 0.01 : 0.03;

  std::vector<BenchmarkScene> out;
  out.reserve(sizes.size() * static_cast<std::size_t>(per_size));
  std::uint64_t index = 0;
  for (unsigned size : sizes) {
    // The rendered step vector rounds to at most ceil(spacing) per axis.
    const double half_span = (size - 1) / 2.0 * std::ceil(spacing);
    const int pad = static_cast<int>(std::ceil(half_span)) + 4;
    if (2 * pad >= height || 2 * pad >= width) {
      throw std::invalid_argument("benchmark_suite: grid too small for aggregate size " +
                                  std::to_string(size));
    }
    for (int rep = 0; rep < per_size; ++rep, ++index) {
      Rng place(splitmix64_at(seed, index));
      AggregateSpec agg;
      agg.center = PixelCoord{pad + place.uniform_int(height - 2 * pad),
                              pad + place.uniform_int(width - 2 * pad)};
      agg.n_platelets = size;
      agg.spacing = spacing;
      agg.orientation = place.uniform() * std::numbers::pi;

      SceneSpec spec;
      spec.height = height;
      spec.width = width;
      spec.aggregates = {agg};
      spec.noise_sigma = noise;
      spec.seed = place.next_u64();
      out.push_back(BenchmarkScene{spec, render_scene(spec)});
    }
  }
  return out;
}

}  // namespace platecount
