#include "platecount/clustering.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <utility>

namespace platecount {

std::vector<PixelCoord> extract_class_pixels(const LabelMask& mask, ClassId cls) {
  std::vector<PixelCoord> out;
  const auto& labels = mask.labels();
  const int width = mask.width();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == static_cast<std::uint8_t>(cls)) {
      out.push_back(PixelCoord{static_cast<int>(i / static_cast<std::size_t>(width)),
                               static_cast<int>(i % static_cast<std::size_t>(width))});
    }
  }
  return out;
}

namespace {

// Uniform-grid spatial index with cell size eps: any two points within
// distance eps live in the same or an adjacent cell.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<PixelCoord>& points, double eps)
      : points_(points), eps_(eps), eps_sq_(eps * eps) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[cell_key(points[i])].push_back(i);
    }
  }

  void neighbors_of(std::size_t idx, std::vector<std::size_t>& out) const {
    out.clear();
    const PixelCoord p = points_[idx];
    const std::int64_t cr = cell_index(p.row);
    const std::int64_t cc = cell_index(p.col);
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      for (std::int64_t dc = -1; dc <= 1; ++dc) {
        auto it = cells_.find(key(cr + dr, cc + dc));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          const double drow = points_[j].row - p.row;
          const double dcol = points_[j].col - p.col;
          if (drow * drow + dcol * dcol <= eps_sq_) out.push_back(j);
        }
      }
    }
  }

 private:
  std::int64_t cell_index(int coord) const {
    return static_cast<std::int64_t>(std::floor(coord / eps_));
  }
  static std::int64_t key(std::int64_t r, std::int64_t c) {
    return (r << 32) ^ (c & 0xffffffff);
  }
  std::int64_t cell_key(PixelCoord p) const {
    return key(cell_index(p.row), cell_index(p.col));
  }

  const std::vector<PixelCoord>& points_;
  double eps_;
  double eps_sq_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

}  // namespace

std::vector<int> dbscan(const std::vector<PixelCoord>& points, const DbscanParams& params) {
  params.validate();
  if (points.empty()) return {};

  {
    std::vector<PixelCoord> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("dbscan input contains duplicate points");
    }
  }

  const NeighborGrid grid(points, params.eps);
  std::vector<int> labels(points.size(), kUnvisited);
  std::vector<std::size_t> seeds;
  std::vector<std::size_t> neighborhood;
  int next_cluster = 0;

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] != kUnvisited) continue;
    grid.neighbors_of(i, neighborhood);
    if (static_cast<int>(neighborhood.size()) < params.min_samples) {
      labels[i] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    labels[i] = cluster;
    seeds.assign(neighborhood.begin(), neighborhood.end());
    // Expand: border points join the cluster, core points also extend it.
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t j = seeds[s];
      if (labels[j] == kNoise) labels[j] = cluster;
      if (labels[j] != kUnvisited) continue;
      labels[j] = cluster;
      grid.neighbors_of(j, neighborhood);
      if (static_cast<int>(neighborhood.size()) >= params.min_samples) {
        seeds.insert(seeds.end(), neighborhood.begin(), neighborhood.end());
      }
    }
  }
  return labels;
}

ClusterSet cluster_platelet_aggregates(const LabelMask& mask, ClassId cls,
                                       const DbscanParams& params) {
  const std::vector<PixelCoord> points = extract_class_pixels(mask, cls);
  const std::vector<int> labels = dbscan(points, params);

  // Renumber by first encounter; points are already in row-major order.
  std::unordered_map<int, unsigned> renumber;
  std::vector<std::vector<PixelCoord>> members;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] < 0) continue;
    auto [it, inserted] = renumber.emplace(labels[i], static_cast<unsigned>(members.size()));
    if (inserted) members.emplace_back();
    members[it->second].push_back(points[i]);
  }

  ClusterSet set;
  set.source_class = cls;
  set.clusters.reserve(members.size());
  for (unsigned id = 0; id < members.size(); ++id) {
    set.clusters.emplace_back(id, std::move(members[id]));
  }
  return set;
}

namespace {

// Union-find with path halving.
struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ComponentLabeling label_components4(const LabelMask& mask,
                                    const std::set<ClassId>& foreground) {
  const int height = mask.height();
  const int width = mask.width();
  const auto& labels = mask.labels();

  bool fg_table[kClassCount] = {};
  for (ClassId cls : foreground) fg_table[static_cast<std::uint8_t>(cls)] = true;

  ComponentLabeling out;
  out.height = height;
  out.width = width;
  out.labels.assign(labels.size(), 0);

  // First pass: provisional labels, merging across left/up neighbors.
  std::vector<int> provisional(labels.size(), 0);
  UnionFind uf(1);
  int next = 1;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i =
          static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
          static_cast<std::size_t>(c);
      if (!fg_table[labels[i]]) continue;
      const int up = (r > 0 && provisional[i - static_cast<std::size_t>(width)] != 0)
                         ? provisional[i - static_cast<std::size_t>(width)]
                         : 0;
      const int left = (c > 0 && provisional[i - 1] != 0) ? provisional[i - 1] : 0;
      if (up != 0 && left != 0) {
        provisional[i] = std::min(up, left);
        uf.merge(up, left);
      } else if (up != 0) {
        provisional[i] = up;
      } else if (left != 0) {
        provisional[i] = left;
      } else {
        provisional[i] = next++;
        uf.parent.push_back(next - 1);
      }
    }
  }

  // Second pass: flatten and renumber in row-major first-encounter order.
  std::vector<int> compact(static_cast<std::size_t>(next), 0);
  int count = 0;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == 0) continue;
    const int root = uf.find(provisional[i]);
    if (compact[static_cast<std::size_t>(root)] == 0) {
      compact[static_cast<std::size_t>(root)] = ++count;
    }
    out.labels[i] = compact[static_cast<std::size_t>(root)];
  }
  out.count = count;
  return out;
}

}  // namespace platecount
