#include <graypixel/cli.hpp>
#include <graypixel/synth.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace graypixel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
  method.msgp.validate();
  if (jobs < 1) throw Error("--jobs must be positive");
  if (!(method.minkowski_p >= 1.0)) throw Error("--minkowski must be >= 1");
  if (!(method.edge_p >= 1.0)) throw Error("--edge-p must be >= 1");
  if (!(method.edge_sigma > 0.0)) throw Error("--edge-sigma must be positive");
  for (double h : grid_bandwidth)
    if (!(h > 0.0)) throw Error("sweep bandwidths must be positive");
  for (double n : grid_n_percent)
    if (!(n > 0.0 && n <= 100.0)) throw Error("sweep n_percent values must lie in (0, 100]");
  for (int k : grid_k)
    if (k < 1) throw Error("sweep k values must be positive");
  if (illuminant && !(illuminant->minCoeff() > 0.0)) throw Error("--illuminant components must be positive");
  if (command == "evaluate" || command == "sweep") {
    if (!manifest) throw Error(command + " needs --manifest with ground-truth illuminants");
  }
  if (command == "correct" || command == "synth") {
    if (!out) throw Error(command + " needs --out");
  }
  if (command == "correct" && use_ground_truth && !manifest) throw Error("--use-gt needs --manifest");
  if (command != "synth" && manifest && !inputs.empty()) throw Error("give either --manifest or image paths, not both");
  if (synth_count < 0) throw Error("--count must be nonnegative");
}

std::vector<WorkItem> work_items(const RunConfig& cfg) {
  std::vector<WorkItem> items;
  if (cfg.manifest) {
    const DatasetManifest m = load_manifest(*cfg.manifest);
    const char* env = std::getenv("GRAYPIXEL_DATA");
    const fs::path root = env && *env ? fs::path(env) : cfg.manifest->parent_path();
    for (const auto& e : m.entries) {
      const fs::path p(e.image_path);
      items.push_back({e.image_path, p.is_absolute() ? p : root / p, e});
    }
  } else {
    for (const auto& p : cfg.inputs) items.push_back({p.string(), p, std::nullopt});
  }
  return items;
}

LinearImage load_work_item(const WorkItem& item) {
  const DecodeOptions opts = item.entry ? item.entry->decode_options() : DecodeOptions{};
  LinearImage img = load_linear_image(item.path, opts);
  if (item.entry && !item.entry->mask_rects.empty()) img = apply_mask(img, item.entry->mask_rects);
  return img;
}

namespace {

/// Runs fn(i) for i in [0, n) on a bounded pool; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t n, int jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> results(n);
  const auto workers = std::size_t(std::max(1, std::min<int>(jobs, int(std::max<std::size_t>(n, 1)))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) results[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

ImageRecord estimate_item(const WorkItem& item, const MethodConfig& method) {
  ImageRecord r;
  r.path = item.label;
  if (item.entry) r.ground_truth = item.entry->ground_truth;
  try {
    const LinearImage img = load_work_item(item);
    r.estimate = estimate(img, method);
    r.ok = true;
    if (r.ground_truth) r.angular_error_deg = angular_error(r.estimate.L, *r.ground_truth);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.estimate.method = std::string(method_name(method.method));
  }
  return r;
}

std::optional<EvalStats> stats_of(const std::vector<ImageRecord>& records) {
  std::vector<double> errs;
  for (const auto& r : records)
    if (r.ok && r.angular_error_deg) errs.push_back(*r.angular_error_deg);
  if (errs.empty()) return std::nullopt;
  return summarize(errs);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

json rgb_json(const Rgbd& v) { return json::array({v[0], v[1], v[2]}); }

json record_json(const ImageRecord& r, bool timing) {
  json j;
  j["path"] = r.path;
  j["status"] = r.ok ? "ok" : "failed";
  j["method"] = r.estimate.method;
  if (r.ok) {
    j["illuminant"] = rgb_json(r.estimate.L);
    j["selected_pixels"] = r.estimate.diagnostics.selected_pixels;
    j["modes"] = r.estimate.diagnostics.modes;
    j["densest_density"] = r.estimate.diagnostics.densest_density;
    if (timing) j["runtime_ms"] = r.estimate.diagnostics.runtime_ms;
  } else {
    j["error"] = r.error;
  }
  if (r.ground_truth) j["ground_truth"] = rgb_json(*r.ground_truth);
  if (r.angular_error_deg) j["angular_error_deg"] = *r.angular_error_deg;
  return j;
}

json stats_json(const EvalStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"trimean", s.trimean},
          {"best25", s.best25}, {"worst25", s.worst25}, {"count", s.count}};
}

std::string records_csv(const std::vector<ImageRecord>& records, bool timing, bool with_error) {
  std::ostringstream os;
  os << "path,status,method,L_r,L_g,L_b,selected_pixels,modes,densest_density";
  if (with_error) os << ",gt_r,gt_g,gt_b,angular_error_deg";
  if (timing) os << ",runtime_ms";
  os << ",error\n";
  for (const auto& r : records) {
    os << csv_field(r.path) << ',' << (r.ok ? "ok" : "failed") << ',' << r.estimate.method;
    if (r.ok) {
      const auto& d = r.estimate.diagnostics;
      os << ',' << num(r.estimate.L[0]) << ',' << num(r.estimate.L[1]) << ',' << num(r.estimate.L[2]) << ','
         << d.selected_pixels << ',' << d.modes << ',' << num(d.densest_density);
    } else {
      os << ",,,,,,";
    }
    if (with_error) {
      if (r.ground_truth) os << ',' << num((*r.ground_truth)[0]) << ',' << num((*r.ground_truth)[1]) << ',' << num((*r.ground_truth)[2]);
      else os << ",,,";
      os << ',' << (r.angular_error_deg ? num(*r.angular_error_deg) : "");
    }
    if (timing) os << ',' << (r.ok ? num(r.estimate.diagnostics.runtime_ms) : "");
    os << ',' << csv_field(r.error) << '\n';
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(path.string() + ": cannot write file");
  f << text;
  if (!f) throw Error(path.string() + ": write failed");
}

const char* ext(ReportFormat f) { return f == ReportFormat::csv ? ".csv" : ".json"; }

}  // namespace

std::string format_estimate_report(const std::vector<ImageRecord>& records, ReportFormat fmt, bool timing) {
  if (fmt == ReportFormat::csv) return records_csv(records, timing, false);
  json j = {{"schema", 1}, {"command", "estimate"}, {"records", json::array()}};
  for (const auto& r : records) j["records"].push_back(record_json(r, timing));
  return j.dump(2) + "\n";
}

std::string format_per_image_report(const std::vector<ImageRecord>& records, ReportFormat fmt, bool timing) {
  if (fmt == ReportFormat::csv) return records_csv(records, timing, true);
  json j = {{"schema", 1}, {"command", "evaluate"}, {"records", json::array()}};
  for (const auto& r : records) j["records"].push_back(record_json(r, timing));
  return j.dump(2) + "\n";
}

std::string format_stats_rows(const std::vector<std::pair<std::string, std::optional<EvalStats>>>& rows,
                              ReportFormat fmt) {
  if (fmt == ReportFormat::csv) {
    std::ostringstream os;
    os << "method,mean,median,trimean,best25,worst25,count\n";
    for (const auto& [label, st] : rows) {
      os << csv_field(label);
      if (st) {
        os << ',' << num(st->mean) << ',' << num(st->median) << ',' << num(st->trimean) << ',' << num(st->best25)
           << ',' << num(st->worst25) << ',' << st->count << '\n';
      } else {
        os << ",,,,,,0\n";
      }
    }
    return os.str();
  }
  json j = {{"schema", 1}, {"rows", json::array()}};
  for (const auto& [label, st] : rows) {
    json row = {{"method", label}};
    if (st) row.update(stats_json(*st));
    else row["count"] = 0;
    j["rows"].push_back(row);
  }
  return j.dump(2) + "\n";
}

void ensure_output_dir(const fs::path& dir) {
  if (fs::is_directory(dir)) return;
  if (fs::exists(dir)) throw Error(dir.string() + ": exists and is not a directory");
  const fs::path parent = fs::absolute(dir).parent_path();
  if (!fs::is_directory(parent)) throw Error(dir.string() + ": parent directory does not exist");
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec) throw Error(dir.string() + ": cannot create directory: " + ec.message());
}

std::vector<ImageRecord> cmd_estimate(const RunConfig& cfg) {
  const auto items = work_items(cfg);
  return parallel_map(items.size(), cfg.jobs, [&](std::size_t i) { return estimate_item(items[i], cfg.method); });
}

Evaluation cmd_evaluate(const RunConfig& cfg) {
  Evaluation ev;
  ev.records = cmd_estimate(cfg);
  ev.stats = stats_of(ev.records);
  return ev;
}

namespace {

std::string bandwidth_label(double h, DistanceKind d) {
  return "meanshift h=" + num(h) + (d == DistanceKind::angle_only ? " (angle)" : "");
}

}  // namespace

std::vector<SweepPoint> sweep_grid(const RunConfig& cfg) {
  const MsgpParams base = cfg.method.msgp;
  const bool custom = !cfg.grid_bandwidth.empty() || !cfg.grid_distance.empty() || !cfg.grid_k.empty();
  std::vector<double> ns = cfg.grid_n_percent.empty() ? std::vector<double>{base.n_percent} : cfg.grid_n_percent;
  std::vector<std::pair<double, DistanceKind>> shifts;
  std::vector<int> ks;
  if (!custom) {
    shifts = {{1e-3, DistanceKind::angle_only}, {1e-4, DistanceKind::hybrid}, {1e-3, DistanceKind::hybrid},
              {1e-2, DistanceKind::hybrid}};
    ks = {2, 5, 9};
  } else {
    if (!cfg.grid_bandwidth.empty() || !cfg.grid_distance.empty()) {
      const auto hs = cfg.grid_bandwidth.empty() ? std::vector<double>{base.bandwidth} : cfg.grid_bandwidth;
      const auto ds = cfg.grid_distance.empty() ? std::vector<DistanceKind>{base.distance} : cfg.grid_distance;
      for (DistanceKind d : ds)
        for (double h : hs) shifts.push_back({h, d});
    }
    ks = cfg.grid_k;
  }
  std::vector<SweepPoint> grid;
  for (double n : ns) {
    const std::string suffix = ns.size() > 1 ? " N=" + num(n) + "%" : "";
    for (const auto& [h, d] : shifts) {
      MsgpParams p = base;
      p.cluster = ClusterKind::meanshift;
      p.bandwidth = h;
      p.distance = d;
      p.n_percent = n;
      grid.push_back({bandwidth_label(h, d) + suffix, p});
    }
    for (int k : ks) {
      MsgpParams p = base;
      p.cluster = ClusterKind::kmeans;
      p.k = k;
      p.n_percent = n;
      grid.push_back({"kmeans K=" + std::to_string(k) + suffix, p});
    }
  }
  return grid;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg) {
  const auto items = work_items(cfg);
  const auto grid = sweep_grid(cfg);
  std::set<double> ns;
  for (const auto& g : grid) ns.insert(g.params.n_percent);

  // Candidate selection depends only on n_percent; clustering varies per grid point.
  struct PerImage {
    std::vector<std::optional<double>> errors;
  };
  const auto per_image = parallel_map(items.size(), cfg.jobs, [&](std::size_t i) {
    PerImage out;
    out.errors.resize(grid.size());
    try {
      const LinearImage img = load_work_item(items[i]);
      std::map<double, PixelSet> candidates;
      for (double n : ns) {
        MsgpParams p = cfg.method.msgp;
        p.n_percent = n;
        candidates[n] = gray_pixel_candidates(img, p, GraynessMeasure::theta);
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const MsgpParams& p = grid[g].params;
        try {
          const PixelSet& s = candidates.at(p.n_percent);
          const ModeResult modes = p.cluster == ClusterKind::meanshift
                                       ? mean_shift(s, {p.bandwidth, p.distance, p.shift_tol, p.max_iter})
                                       : kmeans(s, {p.k, p.seed, p.restarts, p.max_iter});
          out.errors[g] = angular_error(pick_illuminant(modes), items[i].entry->ground_truth);
        } catch (const std::exception&) {
        }
      }
    } catch (const std::exception&) {
    }
    return out;
  });

  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRow row;
    row.point = grid[g];
    std::vector<double> errs;
    for (const auto& pi : per_image) {
      if (pi.errors[g]) errs.push_back(*pi.errors[g]);
      else ++row.failures;
    }
    if (!errs.empty()) row.stats = summarize(errs);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ImageRecord> cmd_correct(const RunConfig& cfg) {
  ensure_output_dir(*cfg.out);
  const auto items = work_items(cfg);
  std::vector<std::string> names(items.size());
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string stem = items[i].path.stem().string();
    const int n = seen[stem]++;
    names[i] = (n ? stem + "_" + std::to_string(n) : stem) + "_corrected";
  }
  return parallel_map(items.size(), cfg.jobs, [&](std::size_t i) {
    ImageRecord r;
    r.path = items[i].label;
    try {
      const LinearImage img = load_work_item(items[i]);
      if (cfg.illuminant) {
        r.estimate.L = cfg.illuminant->normalized();
        r.estimate.method = "explicit";
      } else if (cfg.use_ground_truth) {
        r.estimate.L = items[i].entry->ground_truth;
        r.estimate.method = "ground-truth";
      } else {
        r.estimate = estimate(img, cfg.method);
      }
      const LinearImage corrected = correct_image(img, r.estimate.L);
      write_png16(*cfg.out / (names[i] + ".png"), corrected);
      json side = {{"schema", 1},
                   {"source", r.path},
                   {"output", names[i] + ".png"},
                   {"method", r.estimate.method},
                   {"illuminant", rgb_json(r.estimate.L)}};
      write_text(*cfg.out / (names[i] + ".json"), side.dump(2) + "\n");
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });
}

std::vector<std::string> cmd_synth(const RunConfig& cfg) {
  ensure_output_dir(*cfg.out);
  std::vector<SceneSpec> specs;
  if (cfg.synth_count == 0) {
    specs = bundled_scenes();
  } else {
    std::mt19937_64 rng(cfg.synth_seed);
    std::uniform_real_distribution<double> frac(0.3, 0.8);
    for (int i = 0; i < cfg.synth_count; ++i) {
      SceneSpec s;
      char name[32];
      std::snprintf(name, sizeof name, "synth_%03d", i);
      s.name = name;
      s.seed = cfg.synth_seed * 1000003ULL + std::uint64_t(i);
      s.gray_fraction = frac(rng);
      s.illuminant = random_illuminant_near_neutral(rng, 30.0);
      specs.push_back(s);
    }
  }
  std::ostringstream manifest;
  manifest << "image_path,gt_r,gt_g,gt_b\n";
  std::vector<std::string> written;
  for (const auto& s : specs) {
    const SyntheticScene scene = generate_scene(s);
    write_pfm(*cfg.out / (s.name + ".pfm"), scene.I);
    write_pfm(*cfg.out / (s.name + "_canonical.pfm"), scene.W);
    manifest << s.name << ".pfm," << num(scene.L[0]) << ',' << num(scene.L[1]) << ',' << num(scene.L[2]) << '\n';
    written.push_back(s.name + ".pfm");
  }
  write_text(*cfg.out / "manifest.csv", manifest.str());
  return written;
}

namespace {

void add_common_flags(CLI::App& sub, RunConfig& cfg, std::string& method, std::string& distance, std::string& cluster,
                      std::string& format) {
  MsgpParams& p = cfg.method.msgp;
  sub.add_option("images", cfg.inputs, "Image files (PNG, TIFF, PFM)");
  sub.add_option("--manifest", cfg.manifest, "Dataset manifest (CSV or JSON)");
  sub.add_option("--method", method, "msgp|gp-theta|gp-sigma|gray-world|white-patch|shades-of-gray|gray-edge-1|gray-edge-2")
      ->capture_default_str();
  sub.add_option("--n-percent", p.n_percent, "Percentage of valid pixels kept as gray candidates")->capture_default_str();
  sub.add_option("--bandwidth", p.bandwidth, "Mean-shift bandwidth h")->capture_default_str();
  sub.add_option("--distance", distance, "hybrid|angle")->capture_default_str();
  sub.add_option("--cluster", cluster, "meanshift|kmeans")->capture_default_str();
  sub.add_option("--k", p.k, "K-means cluster count")->capture_default_str();
  sub.add_option("--seed", p.seed, "K-means seed")->capture_default_str();
  sub.add_option("--log-size", p.log_size, "LoG window (odd)")->capture_default_str();
  sub.add_option("--log-sigma", p.log_sigma, "LoG sigma in pixels")->capture_default_str();
  sub.add_option("--epsilon", p.epsilon, "Log guard")->capture_default_str();
  sub.add_option("--contrast-floor", p.contrast_floor, "Minimum ||contrast||_2")->capture_default_str();
  sub.add_option("--smooth-window", p.smooth_window, "Grayness averaging window (odd)")->capture_default_str();
  sub.add_option("--minkowski", cfg.method.minkowski_p, "Shades-of-gray order")->capture_default_str();
  sub.add_option("--edge-p", cfg.method.edge_p, "Gray-edge Minkowski order")->capture_default_str();
  sub.add_option("--edge-sigma", cfg.method.edge_sigma, "Gray-edge Gaussian sigma")->capture_default_str();
  sub.add_option("--out", cfg.out, "Output directory");
  sub.add_option("--format", format, "csv|json")->capture_default_str();
  sub.add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str();
  sub.add_flag("--timing", cfg.timing, "Include per-image runtime_ms in reports");
}

template <typename T>
std::vector<T> parse_list(const std::string& text, T (*conv)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(conv(tok));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("not a number: '" + s + "'");
  return v;
}
int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw Error("not an integer: '" + s + "'");
  return v;
}
DistanceKind to_distance(const std::string& s) {
  if (s == "hybrid") return DistanceKind::hybrid;
  if (s == "angle") return DistanceKind::angle_only;
  throw Error("unknown distance '" + s + "' (hybrid|angle)");
}

void emit(const RunConfig& cfg, const std::string& file, const std::string& text, std::ostream& out) {
  if (cfg.out) {
    ensure_output_dir(*cfg.out);
    write_text(*cfg.out / file, text);
  } else {
    out << text;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gray-pixel illuminant estimation toolkit", "graypixel"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string method = "msgp", distance = "hybrid", cluster = "meanshift", format = "csv";
  std::string grid_h, grid_n, grid_d, grid_k;
  std::vector<double> illum;

  auto* est = app.add_subcommand("estimate", "Estimate the illuminant of each image");
  auto* eval = app.add_subcommand("evaluate", "Estimate and score against manifest ground truth");
  auto* sweep = app.add_subcommand("sweep", "Evaluate a grid of clustering settings");
  auto* corr = app.add_subcommand("correct", "Write white-balanced 16-bit PNGs");
  auto* syn = app.add_subcommand("synth", "Write synthetic scenes with exact ground truth");
  for (auto* sub : {est, eval, sweep, corr, syn}) add_common_flags(*sub, cfg, method, distance, cluster, format);
  sweep->add_option("--grid-bandwidth", grid_h, "Comma-separated bandwidths");
  sweep->add_option("--grid-n-percent", grid_n, "Comma-separated N% values");
  sweep->add_option("--grid-distance", grid_d, "Comma-separated distances (hybrid,angle)");
  sweep->add_option("--grid-k", grid_k, "Comma-separated K-means cluster counts");
  corr->add_option("--illuminant", illum, "Explicit illuminant r g b")->expected(3);
  corr->add_flag("--use-gt", cfg.use_ground_truth, "Correct with the manifest ground truth");
  syn->add_option("--count", cfg.synth_count, "Random scenes to write (0 = bundled set)")->capture_default_str();
  syn->add_option("--scene-seed", cfg.synth_seed, "Seed for random scenes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    cfg.method.method = parse_method(method);
    cfg.method.msgp.distance = to_distance(distance);
    if (cluster == "meanshift") cfg.method.msgp.cluster = ClusterKind::meanshift;
    else if (cluster == "kmeans") cfg.method.msgp.cluster = ClusterKind::kmeans;
    else throw Error("unknown cluster '" + cluster + "' (meanshift|kmeans)");
    if (format == "csv") cfg.format = ReportFormat::csv;
    else if (format == "json") cfg.format = ReportFormat::json;
    else throw Error("unknown format '" + format + "' (csv|json)");
    if (!illum.empty()) cfg.illuminant = Rgbd(illum[0], illum[1], illum[2]);
    cfg.grid_bandwidth = parse_list<double>(grid_h, to_double);
    cfg.grid_n_percent = parse_list<double>(grid_n, to_double);
    cfg.grid_distance = parse_list<DistanceKind>(grid_d, to_distance);
    cfg.grid_k = parse_list<int>(grid_k, to_int);
    cfg.validate();
    if (cfg.command != "synth" && !cfg.manifest && cfg.inputs.empty() && cfg.command != "estimate")
      throw Error(cfg.command + " needs --manifest or image paths");
    if (cfg.command == "evaluate" || cfg.command == "sweep" || cfg.command == "correct" || cfg.command == "estimate")
      (void)work_items(cfg);  // surfaces manifest schema errors as configuration errors
  } catch (const std::exception& e) {
    err << "graypixel: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const std::string ext_str = ext(cfg.format);
    if (cfg.command == "estimate") {
      const auto records = cmd_estimate(cfg);
      emit(cfg, "estimates" + ext_str, format_estimate_report(records, cfg.format, cfg.timing), out);
      bool failed = false;
      for (const auto& r : records)
        if (!r.ok) {
          failed = true;
          err << "graypixel: " << r.path << ": " << r.error << '\n';
        }
      return failed ? kPartialFailure : kOk;
    }
    if (cfg.command == "evaluate") {
      const Evaluation ev = cmd_evaluate(cfg);
      const std::string per = format_per_image_report(ev.records, cfg.format, cfg.timing);
      const std::string summary = format_stats_rows({{std::string(method_name(cfg.method.method)), ev.stats}}, cfg.format);
      if (cfg.out) {
        emit(cfg, "per_image" + ext_str, per, out);
        emit(cfg, "summary" + ext_str, summary, out);
      } else {
        out << summary;
      }
      bool failed = false;
      for (const auto& r : ev.records)
        if (!r.ok) {
          failed = true;
          err << "graypixel: " << r.path << ": " << r.error << '\n';
        }
      return failed ? kPartialFailure : kOk;
    }
    if (cfg.command == "sweep") {
      const auto rows = cmd_sweep(cfg);
      std::vector<std::pair<std::string, std::optional<EvalStats>>> table;
      bool failed = false;
      for (const auto& r : rows) {
        table.push_back({r.point.label, r.stats});
        failed = failed || r.failures > 0;
      }
      emit(cfg, "sweep" + ext_str, format_stats_rows(table, cfg.format), out);
      return failed ? kPartialFailure : kOk;
    }
    if (cfg.command == "correct") {
      const auto records = cmd_correct(cfg);
      bool failed = false;
      for (const auto& r : records)
        if (!r.ok) {
          failed = true;
          err << "graypixel: " << r.path << ": " << r.error << '\n';
        }
      return failed ? kPartialFailure : kOk;
    }
    if (cfg.command == "synth") {
      for (const auto& name : cmd_synth(cfg)) out << name << '\n';
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "graypixel: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace graypixel::cli
