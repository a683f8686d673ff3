#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platecount/core.hpp"
#include "platecount/counting.hpp"
#include "platecount/metrics.hpp"
#include "platecount/synth.hpp"

namespace platecount {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Writes content to a temporary sibling then renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Malformed file content. `offset` is the byte offset of the failure for
/// binary formats and the line number for CSV.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : std::runtime_error(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Masks are binary PGM "P5", maxval 255, one byte per pixel holding the
/// class value. Pixel bytes >= 10 are rejected on read. The writer emits the
/// canonical header "P5\n<w> <h>\n255\n", so write(read(f)) is
/// byte-identical for canonical files.
LabelMask read_mask(const std::filesystem::path& path);
void write_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Planes are binary PGM "P5", maxval 65535, two bytes per pixel, most
/// significant byte first; stored value v maps to v/65535.
IntensityPlane read_plane(const std::filesystem::path& path);
void write_plane(const IntensityPlane& plane, const std::filesystem::path& path);

/// CSV with header "aggregate_id,row,col", one line per platelet center.
SceneTruth read_truth(const std::filesystem::path& path);
void write_truth(const SceneTruth& truth, const std::filesystem::path& path);

/// Full counting result for one image, reproducible from its own parameter
/// echo. `groups` and `fit` are present when ground truth was available.
struct CountReport {
  std::string version = kToolkitVersion;
  CountMethod method = CountMethod::pam;
  CountOptions options;
  std::vector<CountRecord> records;
  std::vector<GroupStats> groups;
  std::optional<RegressionFit> fit;
};

/// Writes a deterministic key-ordered JSON document (doubles rounded to six
/// significant digits, NaN statistics emitted as null) plus a CSV sidecar of
/// the records at the same path with a .csv extension.
void write_report(const CountReport& report, const std::filesystem::path& path);

/// Reads back what pooling needs: version, method, parameters, and records.
/// Group statistics and fits are derived data and are recomputed by eval.
CountReport read_report(const std::filesystem::path& path);

/// Pooled statistics over every record of one method, across reports.
struct MethodSummary {
  CountMethod method = CountMethod::pam;
  std::size_t record_count = 0;
  std::vector<GroupStats> groups;
  std::optional<RegressionFit> fit;
};

struct EvalSummary {
  std::string version = kToolkitVersion;
  std::vector<MethodSummary> methods;
};

/// Serializations of the eval and maskstats results, same formatting rules
/// as write_report.
void write_summary(const EvalSummary& summary, const std::filesystem::path& path);
void write_mask_metrics(const MaskMetrics& metrics, const std::filesystem::path& path);

}  // namespace platecount
