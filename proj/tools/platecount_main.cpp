// platecount: localize platelet aggregates in segmentation masks and count
// platelets by pixel area (pam), peak clusters (pcm), or 4-connected
// components (cca). See README.md for formats and examples.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platecount/counting.hpp"
#include "platecount/io.hpp"
#include "platecount/metrics.hpp"
#include "platecount/synth.hpp"

namespace fs = std::filesystem;
using namespace platecount;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string scene_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04zu", index);
  return buf;
}

struct SynthArgs {
  std::uint64_t seed = 0;
  int height = 64;
  int width = 64;
  std::vector<unsigned> sizes = {1, 2, 3, 4};
  int per_size = 10;
  std::string difficulty = "clean";
  std::string out_dir;
};

int run_synth(const SynthArgs& args) {
  const Difficulty difficulty =
      args.difficulty == "clean" ? Difficulty::clean : Difficulty::overlapping;
  const std::vector<BenchmarkScene> suite =
      benchmark_suite(args.seed, args.sizes, args.per_size, difficulty, args.height,
                      args.width);

  fs::create_directories(args.out_dir);
  std::string manifest = "scene,size,plane,mask,truth\n";
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const std::string stem = scene_stem(i);
    const std::string plane_name = stem + "_plane.pgm";
    const std::string mask_name = stem + "_mask.pgm";
    const std::string truth_name = stem + "_truth.csv";
    write_plane(suite[i].scene.plane, fs::path(args.out_dir) / plane_name);
    write_mask(suite[i].scene.mask, fs::path(args.out_dir) / mask_name);
    write_truth(suite[i].scene.truth, fs::path(args.out_dir) / truth_name);
    manifest += std::to_string(i) + "," +
                std::to_string(suite[i].spec.aggregates.front().n_platelets) + "," +
                plane_name + "," + mask_name + "," + truth_name + "\n";
  }
  write_text_atomic(fs::path(args.out_dir) / "manifest.csv", manifest);
  std::cout << "wrote " << suite.size() << " scenes to " << args.out_dir << "\n";
  return kExitOk;
}

struct CountArgs {
  std::string mask_path;
  std::string plane_path;
  std::string method = "pam";
  std::vector<unsigned> classes = {2, 9};
  double eps = 1.0;
  int min_samples = 1;
  int margin = 5;
  double threshold = 0.9;
  double platelet_area = 3.0;
  bool no_restrict = false;
  std::string truth_path;
  std::string out_path;
};

int run_count(const CountArgs& args) {
  const CountMethod method = *method_from_name(args.method);
  if (method == CountMethod::pcm && args.plane_path.empty()) {
    std::cerr << "error: --method pcm requires --plane\n";
    return kExitUsage;
  }

  CountOptions options;
  options.classes.clear();
  for (unsigned c : args.classes) options.classes.push_back(class_from_value(c));
  options.dbscan.eps = args.eps;
  options.dbscan.min_samples = args.min_samples;
  options.pcm.margin = args.margin;
  options.pcm.peak_threshold = args.threshold;
  options.pcm.restrict_to_cluster = !args.no_restrict;
  options.pam.platelet_area = args.platelet_area;

  const LabelMask mask = read_mask(args.mask_path);
  std::optional<IntensityPlane> plane;
  if (!args.plane_path.empty()) plane = read_plane(args.plane_path);

  std::vector<PixelCoord> centers;
  if (!args.truth_path.empty()) centers = read_truth(args.truth_path).centers();

  CountReport report;
  report.method = method;
  report.options = options;
  report.records = count_image(mask, plane ? &*plane : nullptr, method, options, centers);

  // An empty truth file still is ground truth: every record is a false
  // positive with an actual count of 0.
  if (!args.truth_path.empty() && centers.empty()) {
    for (CountRecord& rec : report.records) rec.actual = 0;
  }

  if (!args.truth_path.empty() && !report.records.empty()) {
    report.groups = group_stats(report.records);
    std::vector<std::pair<double, double>> pairs;
    for (const CountRecord& rec : report.records) {
      pairs.emplace_back(static_cast<double>(*rec.actual), static_cast<double>(rec.count));
    }
    try {
      report.fit = linear_fit(pairs);
    } catch (const std::invalid_argument&) {
      report.fit = std::nullopt;  // fewer than two distinct actual sizes
    }
  }

  write_report(report, args.out_path);
  std::cout << "wrote " << report.records.size() << " records to " << args.out_path << "\n";
  return kExitOk;
}

int run_eval(const std::vector<std::string>& report_paths, const std::string& out_path) {
  std::map<CountMethod, std::vector<CountRecord>> pooled;
  for (const std::string& path : report_paths) {
    const CountReport report = read_report(path);
    auto& bucket = pooled[report.method];
    bucket.insert(bucket.end(), report.records.begin(), report.records.end());
  }

  EvalSummary summary;
  for (auto& [method, records] : pooled) {
    MethodSummary ms;
    ms.method = method;
    ms.record_count = records.size();
    ms.groups = group_stats(records);
    std::vector<std::pair<double, double>> pairs;
    for (const CountRecord& rec : records) {
      pairs.emplace_back(static_cast<double>(*rec.actual), static_cast<double>(rec.count));
    }
    try {
      ms.fit = linear_fit(pairs);
    } catch (const std::invalid_argument&) {
      ms.fit = std::nullopt;
    }
    summary.methods.push_back(std::move(ms));
  }

  write_summary(summary, out_path);
  std::cout << "wrote summary for " << summary.methods.size() << " method(s) to "
            << out_path << "\n";
  return kExitOk;
}

int run_maskstats(const std::string& pred_path, const std::string& truth_path,
                  const std::string& out_path) {
  const LabelMask pred = read_mask(pred_path);
  const LabelMask truth = read_mask(truth_path);
  write_mask_metrics(mask_metrics(pred, truth), out_path);
  std::cout << "wrote metrics to " << out_path << "\n";
  return kExitOk;
}

int run_weights(const std::vector<double>& freqs) {
  const std::vector<double> weights = class_weights(freqs);
  std::string line;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", weights[i]);
    if (i > 0) line += ",";
    line += buf;
  }
  std::cout << line << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"platelet aggregate localization and counting toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark suite");
  synth->add_option("--seed", synth_args.seed, "suite seed");
  synth->add_option("--height", synth_args.height, "scene height in px")
      ->check(CLI::PositiveNumber);
  synth->add_option("--width", synth_args.width, "scene width in px")
      ->check(CLI::PositiveNumber);
  synth->add_option("--sizes", synth_args.sizes, "aggregate sizes, comma separated")
      ->delimiter(',');
  synth->add_option("--per-size", synth_args.per_size, "scenes per size")
      ->check(CLI::PositiveNumber);
  synth->add_option("--difficulty", synth_args.difficulty, "clean or overlapping")
      ->check(CLI::IsMember({"clean", "overlapping"}));
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();

  CountArgs count_args;
  CLI::App* count = app.add_subcommand("count", "count platelets in one mask");
  count->add_option("--mask", count_args.mask_path, "label mask PGM")->required();
  count->add_option("--plane", count_args.plane_path, "intensity plane PGM (16-bit)");
  count->add_option("--method", count_args.method, "pam, pcm, or cca")
      ->required()
      ->check(CLI::IsMember({"pam", "pcm", "cca"}));
  count->add_option("--classes", count_args.classes, "platelet classes, comma separated")
      ->delimiter(',')
      ->check(CLI::Range(0u, 9u));
  count->add_option("--eps", count_args.eps, "dbscan epsilon in px")
      ->check(CLI::PositiveNumber);
  count->add_option("--min-samples", count_args.min_samples, "dbscan minimum samples")
      ->check(CLI::PositiveNumber);
  count->add_option("--margin", count_args.margin, "crop margin in px")
      ->check(CLI::NonNegativeNumber);
  count->add_option("--threshold", count_args.threshold, "peak threshold in (0,1]")
      ->check(CLI::Range(1e-12, 1.0));
  count->add_option("--platelet-area", count_args.platelet_area,
                    "average platelet area in px")
      ->check(CLI::PositiveNumber);
  count->add_flag("--no-restrict", count_args.no_restrict,
                  "count peaks outside the cluster pixels too");
  count->add_option("--truth", count_args.truth_path, "ground-truth centers CSV");
  count->add_option("--out", count_args.out_path, "output report JSON")->required();

  std::vector<std::string> report_paths;
  std::string eval_out;
  CLI::App* eval = app.add_subcommand("eval", "pool reports into per-method statistics");
  eval->add_option("--reports", report_paths, "report JSON paths, comma separated")
      ->delimiter(',')
      ->required();
  eval->add_option("--out", eval_out, "output summary JSON")->required();

  std::string pred_path, truthmask_path, maskstats_out;
  CLI::App* maskstats = app.add_subcommand("maskstats", "per-class F1 and accuracy");
  maskstats->add_option("--pred", pred_path, "predicted mask PGM")->required();
  maskstats->add_option("--truth", truthmask_path, "ground-truth mask PGM")->required();
  maskstats->add_option("--out", maskstats_out, "output metrics JSON")->required();

  std::vector<double> freqs;
  CLI::App* weights = app.add_subcommand("weights", "normalized sqrt-inverse class weights");
  weights->add_option("--freqs", freqs, "class frequencies, comma separated")
      ->delimiter(',')
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (count->parsed()) return run_count(count_args);
    if (eval->parsed()) return run_eval(report_paths, eval_out);
    if (maskstats->parsed()) return run_maskstats(pred_path, truthmask_path, maskstats_out);
    if (weights->parsed()) {
      for (double f : freqs) {
        if (!(f > 0.0)) {
          std::cerr << "error: frequencies must be positive\n";
          return kExitUsage;
        }
      }
      return run_weights(freqs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
