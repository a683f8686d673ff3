#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platecount {

/// Fixed class taxonomy for blood-image segmentation masks.
/// Masks store these as one byte per pixel; any value >= 10 is invalid.
enum class ClassId : std::uint8_t {
  background = 0,
  wbc = 1,
  platelet = 2,
  rbc_exterior = 3,
  rbc_interior = 4,
  bead = 5,
  artifact = 6,
  debris = 7,
  bubble = 8,
  platelet_aggregate = 9,
};

inline constexpr int kClassCount = 10;

/// Validating conversion from a raw label value. Throws std::invalid_argument
/// for values >= 10 (never wraps).
ClassId class_from_value(unsigned value);

const char* class_name(ClassId cls);

struct PixelCoord {
  int row = 0;
  int col = 0;

  // Lexicographic (row, col) order == row-major scan order.
  auto operator<=>(const PixelCoord&) const = default;
};

struct PixelCoordHash {
  std::size_t operator()(const PixelCoord& p) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(p.row) << 32) ^
                                     static_cast<std::uint32_t>(p.col));
  }
};

/// Inclusive bounding box. Coordinates may be negative before clamping
/// (a squared box around a cluster near the grid edge overhangs it).
struct BBox {
  int row_min = 0;
  int col_min = 0;
  int row_max = 0;
  int col_max = 0;

  int height() const { return row_max - row_min + 1; }
  int width() const { return col_max - col_min + 1; }
  bool contains(PixelCoord p) const {
    return p.row >= row_min && p.row <= row_max && p.col >= col_min && p.col <= col_max;
  }
  bool operator==(const BBox&) const = default;
};

/// Per-pixel class-label grid, row-major. Height and width are at least 1
/// and every stored label is a valid ClassId.
class LabelMask {
 public:
  LabelMask(int height, int width, ClassId fill = ClassId::background);
  /// Takes ownership of raw labels; throws std::invalid_argument on size
  /// mismatch or any label value >= 10.
  LabelMask(int height, int width, std::vector<std::uint8_t> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return labels_.size(); }

  bool in_bounds(PixelCoord p) const {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }

  /// Label at p. Throws std::out_of_range for out-of-bounds coordinates.
  ClassId at(PixelCoord p) const;
  ClassId at(int row, int col) const { return at(PixelCoord{row, col}); }
  void set(PixelCoord p, ClassId cls);

  const std::vector<std::uint8_t>& labels() const { return labels_; }

  bool operator==(const LabelMask&) const = default;

 private:
  int height_;
  int width_;
  std::vector<std::uint8_t> labels_;
};

/// Per-pixel brightness grid in [0,1], row-major. Same shape rules as
/// LabelMask; peak detection reads from the plane paired with a mask.
class IntensityPlane {
 public:
  IntensityPlane(int height, int width, double fill = 0.0);
  IntensityPlane(int height, int width, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return values_.size(); }

  bool in_bounds(PixelCoord p) const {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }

  double at(PixelCoord p) const;
  double at(int row, int col) const { return at(PixelCoord{row, col}); }
  void set(PixelCoord p, double value);

  const std::vector<double>& values() const { return values_; }

  bool operator==(const IntensityPlane&) const = default;

 private:
  int height_;
  int width_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument naming both shapes unless mask and plane
/// have identical dimensions.
void validate_pair(const LabelMask& mask, const IntensityPlane& plane);

/// One platelet aggregate: a nonempty, duplicate-free set of pixels.
/// Pixels are kept sorted in row-major order.
class Cluster {
 public:
  Cluster(unsigned id, std::vector<PixelCoord> pixels);

  unsigned id() const { return id_; }
  const std::vector<PixelCoord>& pixels() const { return pixels_; }
  std::size_t size() const { return pixels_.size(); }

  bool operator==(const Cluster&) const = default;

 private:
  unsigned id_;
  std::vector<PixelCoord> pixels_;
};

enum class DistanceMetric { euclidean };

struct DbscanParams {
  double eps = 1.0;
  int min_samples = 1;
  DistanceMetric metric = DistanceMetric::euclidean;

  void validate() const;  // eps > 0, min_samples >= 1
};

struct PcmParams {
  int margin = 5;
  double peak_threshold = 0.9;
  bool restrict_to_cluster = true;

  void validate() const;  // margin >= 0, 0 < peak_threshold <= 1
};

struct PamParams {
  double platelet_area = 3.0;  // nominal single-platelet area in px^2

  void validate() const;  // platelet_area > 0
};

enum class CountMethod { pam, pcm, cca };

const char* method_name(CountMethod m);
std::optional<CountMethod> method_from_name(const std::string& name);

/// One aggregate's count under one method, with provenance. `bbox` is the
/// squared cluster box (clamped) for PAM/PCM and the tight component box for
/// CCA. `actual` is the ground-truth platelet count when known.
struct CountRecord {
  unsigned cluster_id = 0;
  unsigned pixel_count = 0;
  BBox bbox;
  CountMethod method = CountMethod::pam;
  unsigned count = 0;
  std::optional<unsigned> actual;

  bool operator==(const CountRecord&) const = default;
};

}  // namespace platecount
