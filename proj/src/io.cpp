#include "platecount/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace platecount {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return data;
}

}  // namespace

// Write-temp-then-rename so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct PgmHeader {
  int width = 0;
  int height = 0;
  long maxval = 0;
  std::size_t data_offset = 0;
};

// Scans the P5 header, skipping whitespace and # comments; the canonical
// writer below only ever emits single '\n' separators.
PgmHeader parse_pgm_header(const std::vector<unsigned char>& data,
                           const std::string& what) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg, std::size_t at) -> void {
    throw FormatError(what + ": " + msg + " (byte offset " + std::to_string(at) + ")", at);
  };
  auto skip_space = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(data[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_number = [&](const char* name) -> long {
    skip_space();
    const std::size_t start = pos;
    long value = 0;
    while (pos < data.size() && std::isdigit(data[pos])) {
      value = value * 10 + (data[pos] - '0');
      if (value > 1000000000L) fail(std::string(name) + " out of range", start);
      ++pos;
    }
    if (pos == start) fail(std::string("expected ") + name, pos);
    return value;
  };

  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    fail("not a binary PGM (missing P5 magic)", 0);
  }
  pos = 2;
  PgmHeader hdr;
  hdr.width = static_cast<int>(read_number("width"));
  hdr.height = static_cast<int>(read_number("height"));
  hdr.maxval = read_number("maxval");
  if (hdr.width < 1 || hdr.height < 1) fail("dimensions must be positive", 2);
  if (pos >= data.size() || !std::isspace(data[pos])) {
    fail("expected single whitespace after maxval", pos);
  }
  ++pos;
  hdr.data_offset = pos;
  return hdr;
}

std::string pgm_header_text(int width, int height, long maxval) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
         std::to_string(maxval) + "\n";
}

}  // namespace

LabelMask read_mask(const std::filesystem::path& path) {
  const std::vector<unsigned char> data = read_file(path);
  const PgmHeader hdr = parse_pgm_header(data, path.string());
  if (hdr.maxval != 255) {
    throw FormatError(path.string() + ": mask PGM must have maxval 255, got " +
                          std::to_string(hdr.maxval) + " (byte offset 2)",
                      2);
  }
  const std::size_t expected =
      static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height);
  if (data.size() - hdr.data_offset < expected) {
    throw FormatError(path.string() + ": truncated payload, expected " +
                          std::to_string(expected) + " pixel bytes, got " +
                          std::to_string(data.size() - hdr.data_offset) +
                          " (byte offset " + std::to_string(data.size()) + ")",
                      data.size());
  }
  std::vector<std::uint8_t> labels(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const unsigned char v = data[hdr.data_offset + i];
    if (v >= kClassCount) {
      const std::size_t at = hdr.data_offset + i;
      throw FormatError(path.string() + ": invalid class value " + std::to_string(v) +
                            " (byte offset " + std::to_string(at) + ")",
                        at);
    }
    labels[i] = v;
  }
  return LabelMask(hdr.height, hdr.width, std::move(labels));
}

void write_mask(const LabelMask& mask, const std::filesystem::path& path) {
  std::string content = pgm_header_text(mask.width(), mask.height(), 255);
  content.append(mask.labels().begin(), mask.labels().end());
  write_text_atomic(path, content);
}

IntensityPlane read_plane(const std::filesystem::path& path) {
  const std::vector<unsigned char> data = read_file(path);
  const PgmHeader hdr = parse_pgm_header(data, path.string());
  if (hdr.maxval != 65535) {
    throw FormatError(path.string() + ": plane PGM must have maxval 65535, got " +
                          std::to_string(hdr.maxval) + " (byte offset 2)",
                      2);
  }
  const std::size_t pixels =
      static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height);
  if (data.size() - hdr.data_offset < pixels * 2) {
    throw FormatError(path.string() + ": truncated payload, expected " +
                          std::to_string(pixels * 2) + " sample bytes, got " +
                          std::to_string(data.size() - hdr.data_offset) +
                          " (byte offset " + std::to_string(data.size()) + ")",
                      data.size());
  }
  std::vector<double> values(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    const unsigned hi = data[hdr.data_offset + 2 * i];
    const unsigned lo = data[hdr.data_offset + 2 * i + 1];
    values[i] = static_cast<double>((hi << 8) | lo) / 65535.0;
  }
  return IntensityPlane(hdr.height, hdr.width, std::move(values));
}

void write_plane(const IntensityPlane& plane, const std::filesystem::path& path) {
  std::string content = pgm_header_text(plane.width(), plane.height(), 65535);
  content.reserve(content.size() + plane.pixel_count() * 2);
  for (double v : plane.values()) {
    const long q = std::lround(v * 65535.0);
    const unsigned value = static_cast<unsigned>(std::clamp(q, 0L, 65535L));
    content.push_back(static_cast<char>((value >> 8) & 0xff));
    content.push_back(static_cast<char>(value & 0xff));
  }
  write_text_atomic(path, content);
}

SceneTruth read_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": " + msg,
                      line_no);
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing header");
  }
  ++line_no;
  if (line == "aggregate_id,row,col\r") line.pop_back();
  if (line != "aggregate_id,row,col") fail("expected header 'aggregate_id,row,col'");

  SceneTruth truth;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string a, r, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, r, ',') ||
        !std::getline(fields, c)) {
      fail("expected 3 comma-separated fields");
    }
    auto parse_uint = [&](const std::string& text, const char* name) -> long {
      if (text.empty()) fail(std::string(name) + " is empty");
      for (char ch : text) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
          fail(std::string(name) + " is not a non-negative integer: '" + text + "'");
        }
      }
      return std::strtol(text.c_str(), nullptr, 10);
    };
    const long agg = parse_uint(a, "aggregate_id");
    const long row = parse_uint(r, "row");
    const long col = parse_uint(c, "col");
    truth.platelet_centers.push_back(
        {PixelCoord{static_cast<int>(row), static_cast<int>(col)},
         static_cast<unsigned>(agg)});
  }

  unsigned max_id = 0;
  for (const PlateletCenter& pc : truth.platelet_centers) {
    max_id = std::max(max_id, pc.aggregate_id);
  }
  if (!truth.platelet_centers.empty()) {
    truth.aggregate_counts.assign(max_id + 1, 0);
    for (const PlateletCenter& pc : truth.platelet_centers) {
      truth.aggregate_counts[pc.aggregate_id]++;
    }
  }
  return truth;
}

void write_truth(const SceneTruth& truth, const std::filesystem::path& path) {
  std::string content = "aggregate_id,row,col\n";
  for (const PlateletCenter& pc : truth.platelet_centers) {
    content += std::to_string(pc.aggregate_id) + "," + std::to_string(pc.pos.row) + "," +
               std::to_string(pc.pos.col) + "\n";
  }
  write_text_atomic(path, content);
}

namespace {

// Six significant digits, then back to double: the JSON layer then prints
// the shortest representation of the rounded value, which is stable.
ordered_json num6(double v) {
  if (std::isnan(v)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::strtod(buf, nullptr);
}

ordered_json options_json(const CountOptions& options) {
  ordered_json classes = ordered_json::array();
  for (ClassId cls : options.classes) classes.push_back(static_cast<int>(cls));
  return ordered_json{{"classes", classes},
                      {"eps", num6(options.dbscan.eps)},
                      {"min_samples", options.dbscan.min_samples},
                      {"metric", "euclidean"},
                      {"margin", options.pcm.margin},
                      {"peak_threshold", num6(options.pcm.peak_threshold)},
                      {"restrict_to_cluster", options.pcm.restrict_to_cluster},
                      {"platelet_area", num6(options.pam.platelet_area)}};
}

CountOptions options_from_json(const ordered_json& j) {
  CountOptions options;
  options.classes.clear();
  for (const auto& v : j.at("classes")) {
    options.classes.push_back(class_from_value(v.get<unsigned>()));
  }
  options.dbscan.eps = j.at("eps").get<double>();
  options.dbscan.min_samples = j.at("min_samples").get<int>();
  options.pcm.margin = j.at("margin").get<int>();
  options.pcm.peak_threshold = j.at("peak_threshold").get<double>();
  options.pcm.restrict_to_cluster = j.at("restrict_to_cluster").get<bool>();
  options.pam.platelet_area = j.at("platelet_area").get<double>();
  return options;
}

ordered_json record_json(const CountRecord& rec) {
  ordered_json j{{"cluster_id", rec.cluster_id},
                 {"pixel_count", rec.pixel_count},
                 {"row_min", rec.bbox.row_min},
                 {"col_min", rec.bbox.col_min},
                 {"row_max", rec.bbox.row_max},
                 {"col_max", rec.bbox.col_max},
                 {"method", method_name(rec.method)},
                 {"count", rec.count}};
  if (rec.actual.has_value()) {
    j["actual"] = *rec.actual;
  } else {
    j["actual"] = nullptr;
  }
  return j;
}

CountRecord record_from_json(const ordered_json& j) {
  CountRecord rec;
  rec.cluster_id = j.at("cluster_id").get<unsigned>();
  rec.pixel_count = j.at("pixel_count").get<unsigned>();
  rec.bbox = BBox{j.at("row_min").get<int>(), j.at("col_min").get<int>(),
                  j.at("row_max").get<int>(), j.at("col_max").get<int>()};
  const auto method = method_from_name(j.at("method").get<std::string>());
  if (!method) throw std::runtime_error("unknown method in record");
  rec.method = *method;
  rec.count = j.at("count").get<unsigned>();
  if (!j.at("actual").is_null()) rec.actual = j.at("actual").get<unsigned>();
  return rec;
}

ordered_json group_json(const GroupStats& g) {
  return ordered_json{{"actual_size", g.overall ? ordered_json(nullptr) : ordered_json(g.actual_size)},
                      {"n", g.n},
                      {"mean", num6(g.mean)},
                      {"std", num6(g.stddev)},
                      {"cv", num6(g.cv)},
                      {"se", num6(g.se)},
                      {"single_sample", g.single_sample},
                      {"overall", g.overall}};
}

ordered_json fit_json(const std::optional<RegressionFit>& fit) {
  if (!fit.has_value()) return nullptr;
  return ordered_json{{"slope", num6(fit->slope)},
                      {"intercept", num6(fit->intercept)},
                      {"r2", num6(fit->r2)},
                      {"n", fit->n}};
}

ordered_json groups_json(const std::vector<GroupStats>& groups) {
  ordered_json arr = ordered_json::array();
  for (const GroupStats& g : groups) arr.push_back(group_json(g));
  return arr;
}

std::string records_csv(const std::vector<CountRecord>& records) {
  std::string csv = "cluster_id,pixel_count,row_min,col_min,row_max,col_max,method,count,actual\n";
  for (const CountRecord& rec : records) {
    csv += std::to_string(rec.cluster_id) + "," + std::to_string(rec.pixel_count) + "," +
           std::to_string(rec.bbox.row_min) + "," + std::to_string(rec.bbox.col_min) + "," +
           std::to_string(rec.bbox.row_max) + "," + std::to_string(rec.bbox.col_max) + "," +
           method_name(rec.method) + "," + std::to_string(rec.count) + ",";
    if (rec.actual.has_value()) csv += std::to_string(*rec.actual);
    csv += "\n";
  }
  return csv;
}

}  // namespace

void write_report(const CountReport& report, const std::filesystem::path& path) {
  ordered_json j{{"version", report.version},
                 {"method", method_name(report.method)},
                 {"parameters", options_json(report.options)},
                 {"records", ordered_json::array()},
                 {"groups", groups_json(report.groups)},
                 {"fit", fit_json(report.fit)}};
  for (const CountRecord& rec : report.records) j["records"].push_back(record_json(rec));
  write_text_atomic(path, j.dump(2) + "\n");

  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".csv");
  write_text_atomic(sidecar, records_csv(report.records));
}

CountReport read_report(const std::filesystem::path& path) {
  const std::vector<unsigned char> data = read_file(path);
  ordered_json j;
  try {
    j = ordered_json::parse(data.begin(), data.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what(), e.byte);
  }
  try {
    CountReport report;
    report.version = j.at("version").get<std::string>();
    const auto method = method_from_name(j.at("method").get<std::string>());
    if (!method) throw std::runtime_error("unknown method");
    report.method = *method;
    report.options = options_from_json(j.at("parameters"));
    for (const auto& rec : j.at("records")) report.records.push_back(record_from_json(rec));
    return report;
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": malformed report: " + e.what(), 0);
  }
}

void write_summary(const EvalSummary& summary, const std::filesystem::path& path) {
  ordered_json methods = ordered_json::array();
  for (const MethodSummary& m : summary.methods) {
    methods.push_back(ordered_json{{"method", method_name(m.method)},
                                   {"record_count", m.record_count},
                                   {"groups", groups_json(m.groups)},
                                   {"fit", fit_json(m.fit)}});
  }
  ordered_json j{{"version", summary.version}, {"methods", methods}};
  write_text_atomic(path, j.dump(2) + "\n");
}

void write_mask_metrics(const MaskMetrics& metrics, const std::filesystem::path& path) {
  ordered_json per_class = ordered_json::object();
  for (const auto& [cls, f1] : metrics.per_class_f1) {
    per_class[std::to_string(static_cast<int>(cls))] = num6(f1);
  }
  ordered_json absent = ordered_json::array();
  for (ClassId cls : metrics.absent_classes) absent.push_back(static_cast<int>(cls));
  ordered_json j{{"version", kToolkitVersion},
                 {"accuracy", num6(metrics.accuracy)},
                 {"macro_f1", num6(metrics.macro_f1)},
                 {"per_class_f1", per_class},
                 {"absent_classes", absent}};
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace platecount
