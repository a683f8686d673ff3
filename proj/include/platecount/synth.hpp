#pragma once

#include <cstdint>
#include <vector>

#include "platecount/core.hpp"

namespace platecount {

/// One synthetic platelet aggregate: n_platelets Gaussian blobs placed
/// collinearly about `center` at the given center-to-center spacing and
/// orientation (radians, measured from the column axis). Blob centers are
/// rounded to the pixel grid. The default blob_sigma makes the
/// half-amplitude footprint of an isolated blob exactly the center pixel
/// plus its 4-neighbors (5 px, inside the nominal 3-5 px platelet band) and
/// keeps spacing-3 aggregates 4-connected at every orientation.
struct AggregateSpec {
  PixelCoord center;
  unsigned n_platelets = 1;
  double spacing = 3.0;
  double orientation = 0.0;
  double amplitude = 0.95;
  double blob_sigma = 1.05;
};

/// Scene parameters. `distractors` adds bright non-platelet blobs labeled
/// rbc-exterior, useful for exercising the restrict-to-cluster guard of the
/// peak counter. Rendering is fully determined by the spec, including seed.
struct SceneSpec {
  int height = 64;
  int width = 64;
  std::vector<AggregateSpec> aggregates;
  double background_level = 0.2;
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
  int distractors = 0;
};

struct PlateletCenter {
  PixelCoord pos;
  unsigned aggregate_id = 0;
};

struct SceneTruth {
  std::vector<PlateletCenter> platelet_centers;
  std::vector<unsigned> aggregate_counts;  // indexed by aggregate id

  std::vector<PixelCoord> centers() const {
    std::vector<PixelCoord> out;
    out.reserve(platelet_centers.size());
    for (const PlateletCenter& c : platelet_centers) out.push_back(c.pos);
    return out;
  }
};

struct Scene {
  IntensityPlane plane;
  LabelMask mask;
  SceneTruth truth;
};

/// Renders intensity = clip(background + sum of blob Gaussians + noise, 0, 1)
/// and labels a pixel with the aggregate's class (platelet for n = 1,
/// platelet-aggregate for n >= 2) iff the aggregate's noise-free contribution
/// is >= amplitude/2. Labels never depend on the noise draw. Throws
/// std::invalid_argument when aggregate footprints overlap or a platelet
/// center falls outside the grid.
Scene render_scene(const SceneSpec& spec);

enum class Difficulty { clean, overlapping };

struct BenchmarkScene {
  SceneSpec spec;
  Scene scene;
};

/// One single-aggregate scene per (size, repeat) pair, ordered by size then
/// repeat. clean: spacing 3.0, noise 0.01. overlapping: spacing 1.5, noise
/// 0.03. Scene parameters derive from splitmix64_at(seed, scene_index), so
/// the suite is reproducible and scenes can be rendered independently.
std::vector<BenchmarkScene> benchmark_suite(std::uint64_t seed,
                                            const std::vector<unsigned>& sizes,
                                            int per_size, Difficulty difficulty,
                                            int height = 64, int width = 64);

}  // namespace platecount
