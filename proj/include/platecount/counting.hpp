#pragma once

#include <set>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "platecount/clustering.hpp"
#include "platecount/core.hpp"

namespace platecount {

enum class Normalization { minmax, degenerate_flat };

const char* normalization_name(Normalization n);

/// Min-max-normalized crop of an intensity plane. `bbox` locates the crop in
/// the full image; a constant crop normalizes to all zeros and is tagged
/// degenerate_flat.
struct NormalizedCrop {
  IntensityPlane grid;
  BBox bbox;
  Normalization tag = Normalization::minmax;
};

/// Local maxima surviving the peak threshold, as full-image coordinates.
/// Each peak is the row-major-first pixel of its plateau; with the default
/// 8-neighbor comparison no two peaks are 8-adjacent.
struct PeakSet {
  std::vector<PixelCoord> peaks;
  BBox crop_bbox;
  Normalization normalization = Normalization::minmax;
};

/// Neighborhood used when comparing a pixel against its surroundings.
/// Plateaus of equal-valued maxima are always merged with 8-connectivity.
enum class PeakConnectivity { four, eight };

using PixelSet = std::unordered_set<PixelCoord, PixelCoordHash>;

/// Square box around a cluster: side = max of the tight box's extents, the
/// smaller dimension expanded as evenly as possible around the tight box
/// (odd leftover goes to the high side). May overhang the grid; clamping is
/// the caller's next step.
BBox cluster_bbox(const Cluster& c);

/// Every side extended by margin, then clamped to [0,height-1] x [0,width-1].
BBox pad_and_clamp(BBox b, int margin, int height, int width);

NormalizedCrop crop_and_normalize(const IntensityPlane& plane, BBox b);

/// A pixel is a local maximum iff its value is >= all its in-bounds
/// neighbors. 8-connected plateaus of equal-valued maxima merge into one
/// peak. A peak is reported iff its (normalized) value is >= threshold and,
/// when restrict_to is given, its plateau intersects that set (full-image
/// coordinates).
PeakSet find_peaks(const NormalizedCrop& crop, double threshold,
                   const PixelSet* restrict_to = nullptr,
                   PeakConnectivity connectivity = PeakConnectivity::eight);

/// Peak cluster method: square bbox -> margin pad -> crop normalization ->
/// peak detection, count = max(1, number of peaks). Throws
/// std::invalid_argument if the cluster does not fit inside the plane.
CountRecord pcm_count(const Cluster& c, const IntensityPlane& plane, const PcmParams& params);

/// Pixel area method: count = max(1, round-half-up(pixels / platelet_area)).
CountRecord pam_count(const Cluster& c, const PamParams& params);

/// Connected component analysis: one platelet per 4-component of the
/// foreground classes.
std::pair<unsigned, ComponentLabeling> cca_count(const LabelMask& mask,
                                                 const std::set<ClassId>& foreground);

struct CountOptions {
  std::vector<ClassId> classes = {ClassId::platelet, ClassId::platelet_aggregate};
  DbscanParams dbscan;
  PamParams pam;
  PcmParams pcm;
};

/// Full-image counting. PAM/PCM cluster each requested class separately (in
/// ascending class order) and emit one record per cluster; CCA emits one
/// record per 4-component of the joint foreground. Record ids are
/// renumbered 0..n-1 in that deterministic order. When truth_centers is
/// nonempty, each record's `actual` is the number of centers falling inside
/// its pixel region. `plane` is required for PCM and ignored otherwise.
std::vector<CountRecord> count_image(const LabelMask& mask, const IntensityPlane* plane,
                                     CountMethod method, const CountOptions& options,
                                     std::span<const PixelCoord> truth_centers = {});

}  // namespace platecount
