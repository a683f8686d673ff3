#pragma once

#include <set>
#include <vector>

#include "platecount/core.hpp"

namespace platecount {

/// All clusters of one class in one mask. Clusters are pairwise disjoint,
/// their union is the set of pixels carrying source_class (when produced
/// with min_samples = 1), and ids run 0..n-1 in row-major first-encounter
/// order.
struct ClusterSet {
  std::vector<Cluster> clusters;
  ClassId source_class = ClassId::platelet;
};

/// Row-major component labeling: 0 = background, k >= 1 = component k.
/// Labels are assigned in first-encounter order, so count == max label.
struct ComponentLabeling {
  int height = 0;
  int width = 0;
  std::vector<int> labels;
  int count = 0;

  int label_at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

/// Coordinates of every pixel carrying cls, in row-major order.
std::vector<PixelCoord> extract_class_pixels(const LabelMask& mask, ClassId cls);

/// DBSCAN over pixel coordinates. Returns one label per input point in input
/// order; -1 marks noise (impossible when min_samples == 1, where every point
/// is a core point and clusters are the connected components of the
/// within-eps graph). Cluster labels are assigned in order of cluster
/// creation. Throws std::invalid_argument on duplicate points.
///
/// Neighbor lookup uses a uniform grid of cell size eps, so the usual
/// configuration (eps = 1 on pixel data) runs in linear time.
std::vector<int> dbscan(const std::vector<PixelCoord>& points, const DbscanParams& params);

/// extract_class_pixels + dbscan, with cluster ids renumbered by row-major
/// first encounter. Noise points (only possible for min_samples > 1) are not
/// part of any cluster. An absent class yields an empty ClusterSet.
ClusterSet cluster_platelet_aggregates(const LabelMask& mask, ClassId cls,
                                       const DbscanParams& params);

/// Two-pass 4-connectivity labeling of every pixel whose class is in
/// foreground. Diagonal contact does not join components.
ComponentLabeling label_components4(const LabelMask& mask,
                                    const std::set<ClassId>& foreground);

}  // namespace platecount
