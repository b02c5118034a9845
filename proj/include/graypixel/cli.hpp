#pragma once

#include <graypixel/estimator.hpp>
#include <graypixel/image_io.hpp>
#include <graypixel/metrics.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace graypixel::cli {

enum class ReportFormat { csv, json };

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2 };

/// One grid point of a parameter sweep.
struct SweepPoint {
  std::string label;
  MsgpParams params;
};

struct RunConfig {
  std::string command;
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> manifest;
  MethodConfig method;
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::csv;
  int jobs = 1;
  bool timing = false;

  // correct
  std::optional<Rgbd> illuminant;
  bool use_ground_truth = false;

  // sweep; empty grids fall back to the bandwidth / distance / K-means layout
  std::vector<double> grid_bandwidth;
  std::vector<double> grid_n_percent;
  std::vector<DistanceKind> grid_distance;
  std::vector<int> grid_k;

  // synth
  int synth_count = 0;  // 0 writes the bundled scenes
  std::uint64_t synth_seed = 1;

  /// Throws Error on inconsistent settings; called before any image is touched.
  void validate() const;
};

/// A unit of work: an image and, when it came from a manifest, its entry.
struct WorkItem {
  std::string label;  // path as written in the manifest / command line
  std::filesystem::path path;
  std::optional<ManifestEntry> entry;
};

struct ImageRecord {
  std::string path;
  bool ok = false;
  std::string error;
  IlluminantEstimate estimate;
  std::optional<Rgbd> ground_truth;
  std::optional<double> angular_error_deg;
};

struct Evaluation {
  std::vector<ImageRecord> records;
  std::optional<EvalStats> stats;  // over successful images
};

struct SweepRow {
  SweepPoint point;
  std::optional<EvalStats> stats;
  std::size_t failures = 0;
};

/// Resolves the work list from the manifest (relative paths rooted at
/// $GRAYPIXEL_DATA, else at the manifest's directory) or the positional inputs.
std::vector<WorkItem> work_items(const RunConfig& cfg);

/// Loads an item's image with its decode options and masks applied.
LinearImage load_work_item(const WorkItem& item);

std::vector<ImageRecord> cmd_estimate(const RunConfig& cfg);
Evaluation cmd_evaluate(const RunConfig& cfg);
std::vector<SweepPoint> sweep_grid(const RunConfig& cfg);
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg);
/// Writes <out>/<stem>_corrected.png plus a JSON sidecar per image.
std::vector<ImageRecord> cmd_correct(const RunConfig& cfg);
/// Writes <out>/<name>.pfm, <out>/<name>_canonical.pfm and <out>/manifest.csv.
std::vector<std::string> cmd_synth(const RunConfig& cfg);

std::string format_estimate_report(const std::vector<ImageRecord>& records, ReportFormat fmt, bool timing);
std::string format_per_image_report(const std::vector<ImageRecord>& records, ReportFormat fmt, bool timing);
std::string format_stats_rows(const std::vector<std::pair<std::string, std::optional<EvalStats>>>& rows,
                              ReportFormat fmt);

/// Creates `dir` if its parent exists; throws Error otherwise.
void ensure_output_dir(const std::filesystem::path& dir);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace graypixel::cli
