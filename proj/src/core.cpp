#include "platecount/core.hpp"

#include <algorithm>

namespace platecount {

namespace {

void check_shape(int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("grid dimensions must be at least 1x1, got " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
}

std::string coord_str(PixelCoord p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

}  // namespace

ClassId class_from_value(unsigned value) {
  if (value >= static_cast<unsigned>(kClassCount)) {
    throw std::invalid_argument("invalid class value " + std::to_string(value) +
                                " (valid range 0..9)");
  }
  return static_cast<ClassId>(value);
}

const char* class_name(ClassId cls) {
  switch (cls) {
    case ClassId::background: return "background";
    case ClassId::wbc: return "wbc";
    case ClassId::platelet: return "platelet";
    case ClassId::rbc_exterior: return "rbc-exterior";
    case ClassId::rbc_interior: return "rbc-interior";
    case ClassId::bead: return "bead";
    case ClassId::artifact: return "artifact";
    case ClassId::debris: return "debris";
    case ClassId::bubble: return "bubble";
    case ClassId::platelet_aggregate: return "platelet-aggregate";
  }
  return "unknown";
}

LabelMask::LabelMask(int height, int width, ClassId fill)
    : height_(height), width_(width) {
  check_shape(height, width);
  labels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
                 static_cast<std::uint8_t>(fill));
}

LabelMask::LabelMask(int height, int width, std::vector<std::uint8_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  check_shape(height, width);
  const std::size_t expected =
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (labels_.size() != expected) {
    throw std::invalid_argument("label buffer size " + std::to_string(labels_.size()) +
                                " does not match " + std::to_string(height) + "x" +
                                std::to_string(width));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= kClassCount) {
      throw std::invalid_argument("invalid class value " + std::to_string(labels_[i]) +
                                  " at index " + std::to_string(i));
    }
  }
}

ClassId LabelMask::at(PixelCoord p) const {
  if (!in_bounds(p)) {
    throw std::out_of_range("mask coordinate " + coord_str(p) + " outside " +
                            std::to_string(height_) + "x" + std::to_string(width_));
  }
  return static_cast<ClassId>(
      labels_[static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
              static_cast<std::size_t>(p.col)]);
}

void LabelMask::set(PixelCoord p, ClassId cls) {
  if (!in_bounds(p)) {
    throw std::out_of_range("mask coordinate " + coord_str(p) + " outside " +
                            std::to_string(height_) + "x" + std::to_string(width_));
  }
  labels_[static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(p.col)] = static_cast<std::uint8_t>(cls);
}

IntensityPlane::IntensityPlane(int height, int width, double fill)
    : height_(height), width_(width) {
  check_shape(height, width);
  if (fill < 0.0 || fill > 1.0) {
    throw std::invalid_argument("intensity fill value must be in [0,1]");
  }
  values_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

IntensityPlane::IntensityPlane(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_shape(height, width);
  const std::size_t expected =
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (values_.size() != expected) {
    throw std::invalid_argument("value buffer size " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(height) + "x" +
                                std::to_string(width));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw std::invalid_argument("intensity value " + std::to_string(values_[i]) +
                                  " at index " + std::to_string(i) + " outside [0,1]");
    }
  }
}

double IntensityPlane::at(PixelCoord p) const {
  if (!in_bounds(p)) {
    throw std::out_of_range("plane coordinate " + coord_str(p) + " outside " +
                            std::to_string(height_) + "x" + std::to_string(width_));
  }
  return values_[static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(p.col)];
}

void IntensityPlane::set(PixelCoord p, double value) {
  if (!in_bounds(p)) {
    throw std::out_of_range("plane coordinate " + coord_str(p) + " outside " +
                            std::to_string(height_) + "x" + std::to_string(width_));
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("intensity value " + std::to_string(value) +
                                " outside [0,1]");
  }
  values_[static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(p.col)] = value;
}

void validate_pair(const LabelMask& mask, const IntensityPlane& plane) {
  if (mask.height() != plane.height() || mask.width() != plane.width()) {
    throw std::invalid_argument(
        "dimension mismatch: mask " + std::to_string(mask.height()) + "x" +
        std::to_string(mask.width()) + " vs plane " + std::to_string(plane.height()) +
        "x" + std::to_string(plane.width()));
  }
}

Cluster::Cluster(unsigned id, std::vector<PixelCoord> pixels)
    : id_(id), pixels_(std::move(pixels)) {
  if (pixels_.empty()) {
    throw std::invalid_argument("cluster " + std::to_string(id) + " has no pixels");
  }
  std::sort(pixels_.begin(), pixels_.end());
  if (std::adjacent_find(pixels_.begin(), pixels_.end()) != pixels_.end()) {
    throw std::invalid_argument("cluster " + std::to_string(id) +
                                " contains duplicate pixels");
  }
}

void DbscanParams::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be > 0");
  if (min_samples < 1) throw std::invalid_argument("dbscan min_samples must be >= 1");
}

void PcmParams::validate() const {
  if (margin < 0) throw std::invalid_argument("pcm margin must be >= 0");
  if (!(peak_threshold > 0.0 && peak_threshold <= 1.0)) {
    throw std::invalid_argument("pcm peak_threshold must be in (0,1]");
  }
}

void PamParams::validate() const {
  if (!(platelet_area > 0.0)) throw std::invalid_argument("pam platelet_area must be > 0");
}

const char* method_name(CountMethod m) {
  switch (m) {
    case CountMethod::pam: return "pam";
    case CountMethod::pcm: return "pcm";
    case CountMethod::cca: return "cca";
  }
  return "unknown";
}

std::optional<CountMethod> method_from_name(const std::string& name) {
  if (name == "pam") return CountMethod::pam;
  if (name == "pcm") return CountMethod::pcm;
  if (name == "cca") return CountMethod::cca;
  return std::nullopt;
}

}  // namespace platecount
