#include "platecount/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace platecount {

const char* normalization_name(Normalization n) {
  return n == Normalization::minmax ? "minmax" : "degenerate-flat";
}

namespace {

BBox tight_box(const std::vector<PixelCoord>& pixels) {
  BBox b{pixels.front().row, pixels.front().col, pixels.front().row, pixels.front().col};
  for (const PixelCoord& p : pixels) {
    b.row_min = std::min(b.row_min, p.row);
    b.row_max = std::max(b.row_max, p.row);
    b.col_min = std::min(b.col_min, p.col);
    b.col_max = std::max(b.col_max, p.col);
  }
  return b;
}

}  // namespace

BBox cluster_bbox(const Cluster& c) {
  const BBox tight = tight_box(c.pixels());
  const int side = std::max(tight.height(), tight.width());
  const int grow_rows = side - tight.height();
  const int grow_cols = side - tight.width();
  return BBox{tight.row_min - grow_rows / 2, tight.col_min - grow_cols / 2,
              tight.row_max + grow_rows - grow_rows / 2,
              tight.col_max + grow_cols - grow_cols / 2};
}

BBox pad_and_clamp(BBox b, int margin, int height, int width) {
  if (margin < 0) throw std::invalid_argument("margin must be >= 0");
  BBox out{std::max(b.row_min - margin, 0), std::max(b.col_min - margin, 0),
           std::min(b.row_max + margin, height - 1), std::min(b.col_max + margin, width - 1)};
  if (out.row_min > out.row_max || out.col_min > out.col_max) {
    throw std::invalid_argument("box lies entirely outside the grid");
  }
  return out;
}

NormalizedCrop crop_and_normalize(const IntensityPlane& plane, BBox b) {
  if (b.row_min < 0 || b.col_min < 0 || b.row_max >= plane.height() ||
      b.col_max >= plane.width() || b.row_min > b.row_max || b.col_min > b.col_max) {
    throw std::out_of_range("crop box not inside the plane");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = b.row_min; r <= b.row_max; ++r) {
    for (int c = b.col_min; c <= b.col_max; ++c) {
      const double v = plane.at(r, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(b.height()) * static_cast<std::size_t>(b.width()));
  const bool flat = !(hi > lo);
  for (int r = b.row_min; r <= b.row_max; ++r) {
    for (int c = b.col_min; c <= b.col_max; ++c) {
      values.push_back(flat ? 0.0 : (plane.at(r, c) - lo) / (hi - lo));
    }
  }
  return NormalizedCrop{IntensityPlane(b.height(), b.width(), std::move(values)), b,
                        flat ? Normalization::degenerate_flat : Normalization::minmax};
}

PeakSet find_peaks(const NormalizedCrop& crop, double threshold,
                   const PixelSet* restrict_to, PeakConnectivity connectivity) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("peak threshold must be in (0,1]");
  }
  const IntensityPlane& g = crop.grid;
  const int h = g.height();
  const int w = g.width();

  static constexpr int dr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int dc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dr4[] = {-1, 0, 0, 1};
  static constexpr int dc4[] = {0, -1, 1, 0};
  const int* ndr = connectivity == PeakConnectivity::eight ? dr8 : dr4;
  const int* ndc = connectivity == PeakConnectivity::eight ? dc8 : dc4;
  const int ncount = connectivity == PeakConnectivity::eight ? 8 : 4;

  std::vector<char> is_max(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = g.at(r, c);
      bool max_here = true;
      for (int k = 0; k < ncount && max_here; ++k) {
        const int nr = r + ndr[k];
        const int nc = c + ndc[k];
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        if (g.at(nr, nc) > v) max_here = false;
      }
      if (max_here) is_max[static_cast<std::size_t>(r) * w + c] = 1;
    }
  }

  // Merge 8-connected equal-valued plateaus of maxima; the row-major-first
  // pixel represents the plateau.
  PeakSet out;
  out.crop_bbox = crop.bbox;
  out.normalization = crop.tag;
  std::vector<char> seen(is_max.size(), 0);
  std::vector<PixelCoord> stack;
  std::vector<PixelCoord> plateau;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!is_max[i] || seen[i]) continue;
      const double v = g.at(r, c);
      plateau.clear();
      stack.assign(1, PixelCoord{r, c});
      seen[i] = 1;
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        plateau.push_back(p);
        for (int k = 0; k < 8; ++k) {
          const int nr = p.row + dr8[k];
          const int nc = p.col + dc8[k];
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const std::size_t ni = static_cast<std::size_t>(nr) * w + nc;
          if (!is_max[ni] || seen[ni] || g.at(nr, nc) != v) continue;
          seen[ni] = 1;
          stack.push_back(PixelCoord{nr, nc});
        }
      }
      if (v < threshold) continue;
      if (restrict_to != nullptr) {
        bool touches = false;
        for (const PixelCoord& p : plateau) {
          if (restrict_to->count(PixelCoord{p.row + crop.bbox.row_min,
                                            p.col + crop.bbox.col_min}) > 0) {
            touches = true;
            break;
          }
        }
        if (!touches) continue;
      }
      // The scan hits plateaus at their row-major-first pixel already.
      out.peaks.push_back(PixelCoord{r + crop.bbox.row_min, c + crop.bbox.col_min});
    }
  }
  return out;
}

CountRecord pcm_count(const Cluster& c, const IntensityPlane& plane, const PcmParams& params) {
  params.validate();
  for (const PixelCoord& p : c.pixels()) {
    if (!plane.in_bounds(p)) {
      throw std::invalid_argument("cluster pixel outside the intensity plane");
    }
  }
  const BBox square = cluster_bbox(c);
  const BBox region = pad_and_clamp(square, params.margin, plane.height(), plane.width());
  const NormalizedCrop crop = crop_and_normalize(plane, region);

  PixelSet members;
  if (params.restrict_to_cluster) {
    members.insert(c.pixels().begin(), c.pixels().end());
  }
  const PeakSet peaks = find_peaks(crop, params.peak_threshold,
                                   params.restrict_to_cluster ? &members : nullptr);

  CountRecord rec;
  rec.cluster_id = c.id();
  rec.pixel_count = static_cast<unsigned>(c.size());
  rec.bbox = pad_and_clamp(square, 0, plane.height(), plane.width());
  rec.method = CountMethod::pcm;
  rec.count = std::max<unsigned>(1, static_cast<unsigned>(peaks.peaks.size()));
  return rec;
}

CountRecord pam_count(const Cluster& c, const PamParams& params) {
  params.validate();
  const double ratio = static_cast<double>(c.size()) / params.platelet_area;
  const auto rounded = static_cast<unsigned>(std::floor(ratio + 0.5));

  CountRecord rec;
  rec.cluster_id = c.id();
  rec.pixel_count = static_cast<unsigned>(c.size());
  rec.bbox = tight_box(c.pixels());
  rec.method = CountMethod::pam;
  rec.count = std::max<unsigned>(1, rounded);
  return rec;
}

std::pair<unsigned, ComponentLabeling> cca_count(const LabelMask& mask,
                                                 const std::set<ClassId>& foreground) {
  ComponentLabeling labeling = label_components4(mask, foreground);
  return {static_cast<unsigned>(labeling.count), std::move(labeling)};
}

namespace {

std::vector<ClassId> sorted_unique_classes(const std::vector<ClassId>& classes) {
  if (classes.empty()) {
    throw std::invalid_argument("count_image requires at least one class");
  }
  std::set<ClassId> s(classes.begin(), classes.end());
  return {s.begin(), s.end()};
}

void assign_actuals(std::vector<CountRecord>& records,
                    const std::vector<std::vector<PixelCoord>>& regions,
                    std::span<const PixelCoord> truth_centers) {
  if (truth_centers.empty()) return;
  std::unordered_map<PixelCoord, std::size_t, PixelCoordHash> owner;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (const PixelCoord& p : regions[i]) owner.emplace(p, i);
  }
  for (CountRecord& rec : records) rec.actual = 0;
  for (const PixelCoord& center : truth_centers) {
    auto it = owner.find(center);
    if (it != owner.end()) ++(*records[it->second].actual);
  }
}

}  // namespace

std::vector<CountRecord> count_image(const LabelMask& mask, const IntensityPlane* plane,
                                     CountMethod method, const CountOptions& options,
                                     std::span<const PixelCoord> truth_centers) {
  if (plane != nullptr) validate_pair(mask, *plane);
  if (method == CountMethod::pcm && plane == nullptr) {
    throw std::invalid_argument("pcm counting requires an intensity plane");
  }
  const std::vector<ClassId> classes = sorted_unique_classes(options.classes);

  std::vector<CountRecord> records;
  std::vector<std::vector<PixelCoord>> regions;

  if (method == CountMethod::cca) {
    std::set<ClassId> foreground(classes.begin(), classes.end());
    const ComponentLabeling labeling = label_components4(mask, foreground);
    regions.resize(static_cast<std::size_t>(labeling.count));
    for (int r = 0; r < labeling.height; ++r) {
      for (int c = 0; c < labeling.width; ++c) {
        const int label = labeling.label_at(r, c);
        if (label > 0) regions[static_cast<std::size_t>(label - 1)].push_back({r, c});
      }
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
      CountRecord rec;
      rec.cluster_id = static_cast<unsigned>(i);
      rec.pixel_count = static_cast<unsigned>(regions[i].size());
      rec.bbox = tight_box(regions[i]);
      rec.method = CountMethod::cca;
      rec.count = 1;  // one platelet per 4-component
      records.push_back(rec);
    }
  } else {
    unsigned next_id = 0;
    for (ClassId cls : classes) {
      const ClusterSet set = cluster_platelet_aggregates(mask, cls, options.dbscan);
      for (const Cluster& cluster : set.clusters) {
        CountRecord rec = method == CountMethod::pam
                              ? pam_count(cluster, options.pam)
                              : pcm_count(cluster, *plane, options.pcm);
        rec.cluster_id = next_id++;
        records.push_back(rec);
        regions.push_back(cluster.pixels());
      }
    }
  }

  assign_actuals(records, regions, truth_centers);
  return records;
}

}  // namespace platecount
