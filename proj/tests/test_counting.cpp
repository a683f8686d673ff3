#include <doctest.h>

#include <cmath>

#include "platecount/counting.hpp"
#include "platecount/rng.hpp"
#include "platecount/synth.hpp"

using namespace platecount;

TEST_CASE("cluster_bbox squares the tight box around its center") {
  SUBCASE("already square") {
    const Cluster c(0, {{2, 3}, {2, 4}, {3, 3}});
    CHECK(cluster_bbox(c) == BBox{2, 3, 3, 4});
  }
  SUBCASE("single pixel") {
    const Cluster c(0, {{5, 5}});
    CHECK(cluster_bbox(c) == BBox{5, 5, 5, 5});
  }
  SUBCASE("1x3 row expands symmetrically, may overhang") {
    const Cluster c(0, {{0, 0}, {0, 1}, {0, 2}});
    CHECK(cluster_bbox(c) == BBox{-1, 0, 1, 2});
  }
  SUBCASE("odd leftover goes to the high side") {
    // Tight 2x3: one extra row, low gets 0, high gets 1.
    const Cluster c(0, {{4, 0}, {4, 1}, {4, 2}, {5, 0}, {5, 1}, {5, 2}});
    CHECK(cluster_bbox(c) == BBox{4, 0, 6, 2});
  }
}

TEST_CASE("pad_and_clamp extends then clamps") {
  CHECK(pad_and_clamp(BBox{2, 3, 3, 4}, 5, 100, 100) == BBox{0, 0, 8, 9});
  CHECK(pad_and_clamp(BBox{2, 3, 3, 4}, 0, 100, 100) == BBox{2, 3, 3, 4});
  CHECK(pad_and_clamp(BBox{0, 0, 1, 1}, 5, 4, 4) == BBox{0, 0, 3, 3});
  CHECK_THROWS_AS(pad_and_clamp(BBox{0, 0, 1, 1}, -1, 4, 4), std::invalid_argument);
}

TEST_CASE("crop_and_normalize applies min-max over the crop") {
  SUBCASE("values stretch to [0,1]") {
    const IntensityPlane plane(1, 3, std::vector<double>{0.2, 0.6, 1.0});
    const NormalizedCrop crop = crop_and_normalize(plane, BBox{0, 0, 0, 2});
    CHECK(crop.tag == Normalization::minmax);
    CHECK(crop.grid.at(0, 0) == doctest::Approx(0.0));
    CHECK(crop.grid.at(0, 1) == doctest::Approx(0.5));
    CHECK(crop.grid.at(0, 2) == doctest::Approx(1.0));
  }
  SUBCASE("constant crop degenerates to zeros") {
    const IntensityPlane plane(2, 2, 0.7);
    const NormalizedCrop crop = crop_and_normalize(plane, BBox{0, 0, 1, 1});
    CHECK(crop.tag == Normalization::degenerate_flat);
    for (double v : crop.grid.values()) CHECK(v == 0.0);
  }
  SUBCASE("a crop already spanning [0,1] is unchanged") {
    const IntensityPlane plane(1, 3, std::vector<double>{0.0, 0.25, 1.0});
    const NormalizedCrop crop = crop_and_normalize(plane, BBox{0, 0, 0, 2});
    CHECK(crop.grid.values() == plane.values());
  }
  SUBCASE("out-of-bounds crop rejected") {
    const IntensityPlane plane(2, 2);
    CHECK_THROWS_AS(crop_and_normalize(plane, BBox{0, 0, 2, 1}), std::out_of_range);
  }
}

namespace {

NormalizedCrop crop_of(const IntensityPlane& plane) {
  return crop_and_normalize(plane, BBox{0, 0, plane.height() - 1, plane.width() - 1});
}

}  // namespace

TEST_CASE("find_peaks worked examples") {
  SUBCASE("unique center maximum") {
    IntensityPlane g(3, 3, 0.1);
    g.set(PixelCoord{1, 1}, 1.0);
    const PeakSet peaks = find_peaks(crop_of(g), 0.9);
    CHECK(peaks.peaks == std::vector<PixelCoord>{{1, 1}});
  }
  SUBCASE("plateau merges, separate maximum stays") {
    const IntensityPlane g(1, 4, std::vector<double>{1.0, 1.0, 0.2, 1.0});
    const PeakSet peaks = find_peaks(crop_of(g), 0.9);
    CHECK(peaks.peaks == std::vector<PixelCoord>{{0, 0}, {0, 3}});
  }
  SUBCASE("uniform grid has no peaks after degenerate normalization") {
    const IntensityPlane g(3, 3, 0.5);
    const NormalizedCrop crop = crop_of(g);
    CHECK(crop.tag == Normalization::degenerate_flat);
    CHECK(find_peaks(crop, 0.9).peaks.empty());
  }
  SUBCASE("threshold filters shoulder maxima") {
    const IntensityPlane g(1, 5, std::vector<double>{0.5, 0.2, 0.1, 0.2, 1.0});
    // Index 0 is a local max but normalizes to (0.5-0.1)/0.9 < 0.9.
    const PeakSet peaks = find_peaks(crop_of(g), 0.9);
    CHECK(peaks.peaks == std::vector<PixelCoord>{{0, 4}});
  }
  SUBCASE("restrict set keeps only plateaus touching it") {
    IntensityPlane g(3, 5, 0.1);
    g.set(PixelCoord{1, 1}, 1.0);
    g.set(PixelCoord{1, 4}, 1.0);
    PixelSet keep;
    keep.insert(PixelCoord{1, 1});
    const PeakSet peaks = find_peaks(crop_of(g), 0.9, &keep);
    CHECK(peaks.peaks == std::vector<PixelCoord>{{1, 1}});
  }
  SUBCASE("peaks are reported in full-image coordinates") {
    IntensityPlane plane(10, 10, 0.1);
    plane.set(PixelCoord{5, 6}, 1.0);
    const NormalizedCrop crop = crop_and_normalize(plane, BBox{4, 5, 7, 8});
    const PeakSet peaks = find_peaks(crop, 0.9);
    CHECK(peaks.peaks == std::vector<PixelCoord>{{5, 6}});
    CHECK(peaks.crop_bbox == BBox{4, 5, 7, 8});
  }
}

TEST_CASE("no two reported peaks are 8-adjacent (random grids)") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    IntensityPlane g(9, 9);
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 9; ++c) {
        // Quantized values encourage plateaus.
        g.set(PixelCoord{r, c}, rng.uniform_int(5) / 4.0);
      }
    }
    const PeakSet peaks = find_peaks(crop_of(g), 0.2);
    for (std::size_t i = 0; i < peaks.peaks.size(); ++i) {
      for (std::size_t j = i + 1; j < peaks.peaks.size(); ++j) {
        const int dr = std::abs(peaks.peaks[i].row - peaks.peaks[j].row);
        const int dc = std::abs(peaks.peaks[i].col - peaks.peaks[j].col);
        CHECK(std::max(dr, dc) > 1);
      }
    }
  }
}

TEST_CASE("pam_count rounds half up with a floor of one") {
  const PamParams params{};
  auto cluster_of = [](unsigned n) {
    std::vector<PixelCoord> px;
    for (unsigned i = 0; i < n; ++i) px.push_back(PixelCoord{0, static_cast<int>(i)});
    return Cluster(0, std::move(px));
  };
  CHECK(pam_count(cluster_of(3), params).count == 1);
  CHECK(pam_count(cluster_of(6), params).count == 2);
  CHECK(pam_count(cluster_of(4), params).count == 1);
  CHECK(pam_count(cluster_of(5), params).count == 2);
  CHECK(pam_count(cluster_of(1), params).count == 1);  // floor rule

  // Nondecreasing in pixel count.
  unsigned prev = 0;
  for (unsigned n = 1; n <= 40; ++n) {
    const unsigned count = pam_count(cluster_of(n), params).count;
    CHECK(count >= prev);
    prev = count;
  }
}

TEST_CASE("pcm_count on synthetic blobs") {
  SUBCASE("one bright blob counts one") {
    SceneSpec spec;
    spec.height = 32;
    spec.width = 32;
    spec.noise_sigma = 0.0;
    spec.aggregates = {AggregateSpec{{16, 16}, 1}};
    const Scene scene = render_scene(spec);
    const ClusterSet set =
        cluster_platelet_aggregates(scene.mask, ClassId::platelet, DbscanParams{});
    REQUIRE(set.clusters.size() == 1);
    const CountRecord rec = pcm_count(set.clusters[0], scene.plane, PcmParams{});
    CHECK(rec.count == 1);
    CHECK(rec.method == CountMethod::pcm);
    CHECK(rec.pixel_count == set.clusters[0].size());
  }
  SUBCASE("three blobs three pixels apart count three") {
    SceneSpec spec;
    spec.height = 40;
    spec.width = 40;
    spec.noise_sigma = 0.005;
    spec.seed = 9;
    spec.aggregates = {AggregateSpec{{20, 20}, 3}};
    const Scene scene = render_scene(spec);
    const ClusterSet set =
        cluster_platelet_aggregates(scene.mask, ClassId::platelet_aggregate, DbscanParams{});
    REQUIRE(set.clusters.size() == 1);
    CHECK(pcm_count(set.clusters[0], scene.plane, PcmParams{}).count == 3);
  }
  SUBCASE("flat intensity floors to one") {
    const IntensityPlane plane(8, 8, 0.4);
    const Cluster c(0, {{3, 3}, {3, 4}, {4, 3}});
    CHECK(pcm_count(c, plane, PcmParams{}).count == 1);
  }
  SUBCASE("cluster outside the plane is rejected") {
    const IntensityPlane plane(4, 4);
    const Cluster c(0, {{3, 3}, {3, 4}});
    CHECK_THROWS_AS(pcm_count(c, plane, PcmParams{}), std::invalid_argument);
  }
  SUBCASE("corner cluster clamps its crop instead of failing") {
    IntensityPlane plane(8, 8, 0.2);
    plane.set(PixelCoord{0, 0}, 1.0);
    const Cluster c(0, {{0, 0}, {0, 1}, {1, 0}});
    const CountRecord rec = pcm_count(c, plane, PcmParams{});
    CHECK(rec.count == 1);
    CHECK(rec.bbox.row_min == 0);
    CHECK(rec.bbox.col_min == 0);
  }
}

TEST_CASE("four-neighborhood peak comparison is selectable") {
  // A saddle pixel can be a 4-neighborhood maximum while an 8-neighbor beats it.
  const IntensityPlane g(3, 3, std::vector<double>{1.0, 0.2, 0.1,   //
                                                   0.2, 0.9, 0.2,   //
                                                   0.1, 0.2, 0.1});
  const NormalizedCrop crop = crop_of(g);
  CHECK(find_peaks(crop, 0.5, nullptr, PeakConnectivity::eight).peaks ==
        std::vector<PixelCoord>{{0, 0}});
  CHECK(find_peaks(crop, 0.5, nullptr, PeakConnectivity::four).peaks ==
        std::vector<PixelCoord>{{0, 0}, {1, 1}});
}

TEST_CASE("cca is exact when ground-truth platelets never touch") {
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    SceneSpec spec;
    spec.height = 80;
    spec.width = 80;
    spec.seed = rng.next_u64();
    const int m = 2 + rng.uniform_int(5);
    for (int k = 0; k < m; ++k) {
      // Coarse 16-px grid keeps the 5-px footprints pairwise non-adjacent.
      spec.aggregates.push_back(
          AggregateSpec{{8 + 16 * (k / 5), 8 + 16 * (k % 5)}, 1});
    }
    const Scene scene = render_scene(spec);
    CHECK(cca_count(scene.mask, {ClassId::platelet}).first == static_cast<unsigned>(m));
  }
}

TEST_CASE("restrict_to_cluster guards against bright non-platelet neighbors") {
  // A distractor blob inside the crop margin must not add peaks unless the
  // unrestricted mode is requested.
  SceneSpec spec;
  spec.height = 40;
  spec.width = 40;
  spec.noise_sigma = 0.0;
  spec.aggregates = {AggregateSpec{{20, 20}, 1}};
  Scene scene = render_scene(spec);
  // Paint a bright spot 4 px away, labeled rbc-exterior.
  scene.plane.set(PixelCoord{20, 24}, 1.0);
  scene.mask.set(PixelCoord{20, 24}, ClassId::rbc_exterior);

  const ClusterSet set =
      cluster_platelet_aggregates(scene.mask, ClassId::platelet, DbscanParams{});
  REQUIRE(set.clusters.size() == 1);

  PcmParams restricted;
  CHECK(pcm_count(set.clusters[0], scene.plane, restricted).count == 1);

  PcmParams unrestricted;
  unrestricted.restrict_to_cluster = false;
  CHECK(pcm_count(set.clusters[0], scene.plane, unrestricted).count == 2);
}

TEST_CASE("cca_count counts 4-components") {
  SUBCASE("empty foreground") {
    const LabelMask mask(5, 5);
    CHECK(cca_count(mask, {ClassId::platelet}).first == 0);
  }
  SUBCASE("ten isolated pixels count ten") {
    LabelMask mask(10, 10);
    for (int i = 0; i < 10; ++i) {
      mask.set(PixelCoord{(i / 5) * 4, (i % 5) * 2}, ClassId::platelet);
    }
    CHECK(cca_count(mask, {ClassId::platelet}).first == 10);
  }
  SUBCASE("diagonal contact keeps blobs apart") {
    LabelMask mask(4, 4);
    mask.set(PixelCoord{0, 0}, ClassId::platelet);
    mask.set(PixelCoord{0, 1}, ClassId::platelet);
    mask.set(PixelCoord{1, 2}, ClassId::platelet);
    mask.set(PixelCoord{1, 3}, ClassId::platelet);
    CHECK(cca_count(mask, {ClassId::platelet}).first == 2);
  }
}

TEST_CASE("count_image emits deterministic records") {
  SUBCASE("two aggregates, pam") {
    LabelMask mask(12, 12);
    for (PixelCoord p : {PixelCoord{1, 1}, {1, 2}, {2, 1}}) {
      mask.set(p, ClassId::platelet_aggregate);
    }
    for (PixelCoord p : {PixelCoord{8, 8}, {8, 9}, {9, 8}, {9, 9}, {8, 7}, {7, 8}}) {
      mask.set(p, ClassId::platelet_aggregate);
    }
    const auto records = count_image(mask, nullptr, CountMethod::pam, CountOptions{});
    REQUIRE(records.size() == 2);
    CHECK(records[0].cluster_id == 0);
    CHECK(records[1].cluster_id == 1);
    CHECK(records[0].count == 1);
    CHECK(records[1].count == 2);
    CHECK_FALSE(records[0].actual.has_value());
  }
  SUBCASE("cca records mirror the component count") {
    LabelMask mask(6, 6);
    mask.set(PixelCoord{0, 0}, ClassId::platelet);
    mask.set(PixelCoord{3, 3}, ClassId::platelet_aggregate);
    mask.set(PixelCoord{3, 4}, ClassId::platelet_aggregate);
    const auto records = count_image(mask, nullptr, CountMethod::cca, CountOptions{});
    const auto [count, labeling] =
        cca_count(mask, {ClassId::platelet, ClassId::platelet_aggregate});
    CHECK(records.size() == count);
    for (const CountRecord& rec : records) CHECK(rec.count == 1);
    CHECK(records[1].pixel_count == 2);
  }
  SUBCASE("empty mask yields no records") {
    const LabelMask mask(4, 4);
    CHECK(count_image(mask, nullptr, CountMethod::pam, CountOptions{}).empty());
  }
  SUBCASE("pcm requires a plane") {
    const LabelMask mask(4, 4);
    CHECK_THROWS_AS(count_image(mask, nullptr, CountMethod::pcm, CountOptions{}),
                    std::invalid_argument);
  }
  SUBCASE("mismatched plane rejected") {
    const LabelMask mask(4, 4);
    const IntensityPlane plane(4, 5);
    CHECK_THROWS_AS(count_image(mask, &plane, CountMethod::pam, CountOptions{}),
                    std::invalid_argument);
  }
  SUBCASE("classes cluster separately for pam/pcm") {
    LabelMask mask(6, 6);
    mask.set(PixelCoord{2, 2}, ClassId::platelet);
    mask.set(PixelCoord{2, 3}, ClassId::platelet_aggregate);
    const auto records = count_image(mask, nullptr, CountMethod::pam, CountOptions{});
    REQUIRE(records.size() == 2);  // adjacent pixels, but different classes
    CHECK(records[0].pixel_count == 1);
    CHECK(records[1].pixel_count == 1);
  }
  SUBCASE("truth centers fill in actual counts") {
    LabelMask mask(10, 10);
    for (PixelCoord p : {PixelCoord{1, 1}, {1, 2}, {1, 3}}) {
      mask.set(p, ClassId::platelet_aggregate);
    }
    const std::vector<PixelCoord> centers{{1, 1}, {1, 3}, {9, 9}};
    const auto records =
        count_image(mask, nullptr, CountMethod::pam, CountOptions{}, centers);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].actual.has_value());
    CHECK(*records[0].actual == 2);  // the (9,9) center lies outside every region
  }
}

TEST_CASE("pcm is invariant to translation and affine intensity maps") {
  SceneSpec spec;
  spec.height = 48;
  spec.width = 48;
  spec.seed = 77;
  spec.aggregates = {AggregateSpec{{24, 24}, 2}};
  const Scene scene = render_scene(spec);

  auto counts_of = [](const LabelMask& mask, const IntensityPlane& plane) {
    std::vector<unsigned> out;
    for (const CountRecord& rec :
         count_image(mask, &plane, CountMethod::pcm, CountOptions{})) {
      out.push_back(rec.count);
    }
    return out;
  };

  SUBCASE("translation away from borders") {
    const int shift_r = 7, shift_c = 11;
    LabelMask mask2(64, 64);
    IntensityPlane plane2(64, 64, spec.background_level);
    for (int r = 0; r < 48; ++r) {
      for (int c = 0; c < 48; ++c) {
        mask2.set(PixelCoord{r + shift_r, c + shift_c}, scene.mask.at(r, c));
        plane2.set(PixelCoord{r + shift_r, c + shift_c}, scene.plane.at(r, c));
      }
    }
    LabelMask mask1(64, 64);
    IntensityPlane plane1(64, 64, spec.background_level);
    for (int r = 0; r < 48; ++r) {
      for (int c = 0; c < 48; ++c) {
        mask1.set(PixelCoord{r + 2, c + 2}, scene.mask.at(r, c));
        plane1.set(PixelCoord{r + 2, c + 2}, scene.plane.at(r, c));
      }
    }
    CHECK(counts_of(mask1, plane1) == counts_of(mask2, plane2));
  }

  SUBCASE("affine map a*v+b without saturation") {
    std::vector<double> mapped = scene.plane.values();
    for (double& v : mapped) v = 0.5 * v + 0.25;
    const IntensityPlane affine(48, 48, std::move(mapped));
    CHECK(counts_of(scene.mask, scene.plane) == counts_of(scene.mask, affine));
  }
}
