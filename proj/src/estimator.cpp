#include <graypixel/contrast.hpp>
#include <graypixel/estimator.hpp>

#include <chrono>
#include <cmath>
#include <numeric>
#include <vector>

namespace graypixel {

void MsgpParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(name) + " must be positive");
  };
  positive(n_percent, "n_percent");
  if (n_percent > 100.0) throw Error("n_percent must not exceed 100");
  positive(bandwidth, "bandwidth");
  positive(log_sigma, "log_sigma");
  positive(epsilon, "epsilon");
  positive(shift_tol, "shift_tol");
  if (log_size < 3 || log_size % 2 == 0) throw Error("log_size must be odd and >= 3");
  if (smooth_window < 1 || smooth_window % 2 == 0) throw Error("smooth_window must be odd and >= 1");
  if (!(contrast_floor >= 0.0)) throw Error("contrast_floor must be nonnegative");
  if (!(grayness_quantum >= 0.0)) throw Error("grayness_quantum must be nonnegative");
  if (k < 1) throw Error("k must be positive");
  if (restarts < 1) throw Error("restarts must be positive");
  if (max_iter < 1) throw Error("max_iter must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Rgbd unit_estimate(const Rgbd& v, const char* method) {
  if (!v.allFinite() || !(v.norm() > 0.0))
    throw Error(std::string(method) + ": estimate undefined (zero channel energy)");
  return v.cwiseMax(0.0).normalized();
}

void require_valid_pixels(const LinearImage& img, const char* method) {
  if (img.valid_count() == 0) throw Error(std::string(method) + ": image has no valid pixels");
}

}  // namespace

PixelSet gray_pixel_candidates(const LinearImage& img, const MsgpParams& p, GraynessMeasure measure) {
  p.validate();
  const LogKernel kernel = make_log_kernel(p.log_size, p.log_sigma);
  const ContrastMap cmap = local_contrast(log_transform(img, p.epsilon), kernel);
  GraynessConfig gcfg;
  gcfg.measure = measure;
  gcfg.contrast_floor = p.contrast_floor;
  gcfg.smooth_window = p.smooth_window;
  gcfg.quantum = p.grayness_quantum;
  GraynessMap gmap = grayness_map(cmap, gcfg);
  if (measure == GraynessMeasure::sigma) {
    weaken_dark_pixels(gmap, img, p.epsilon);
    quantize_grayness(gmap, p.grayness_quantum);
  }
  return select_top_n(gmap, img, p.n_percent);
}

IlluminantEstimate estimate_msgp(const LinearImage& img, const MsgpParams& p) {
  const auto start = Clock::now();
  const PixelSet s = gray_pixel_candidates(img, p, GraynessMeasure::theta);
  ModeResult modes;
  if (p.cluster == ClusterKind::meanshift) {
    modes = mean_shift(s, {p.bandwidth, p.distance, p.shift_tol, p.max_iter});
  } else {
    modes = kmeans(s, {p.k, p.seed, p.restarts, p.max_iter});
  }
  IlluminantEstimate e;
  e.method = "msgp";
  e.L = pick_illuminant(modes).cwiseMax(0.0).normalized();
  e.diagnostics.selected_pixels = s.size();
  e.diagnostics.modes = modes.modes.size();
  e.diagnostics.densest_density = modes.modes.front().density;
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

IlluminantEstimate estimate_gray_pixel(const LinearImage& img, const MsgpParams& p, GraynessMeasure measure) {
  const auto start = Clock::now();
  const PixelSet s = gray_pixel_candidates(img, p, measure);
  Rgbd sum = Rgbd::Zero();
  for (const auto& px : s.points) sum += px.rgb;
  IlluminantEstimate e;
  e.method = measure == GraynessMeasure::theta ? "gp-theta" : "gp-sigma";
  e.L = unit_estimate(sum, e.method.c_str());
  e.diagnostics.selected_pixels = s.size();
  e.diagnostics.modes = 1;
  e.diagnostics.densest_density = 1.0;
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

LinearImage correct_image(const LinearImage& img, const Rgbd& L) {
  if (!L.allFinite() || !(L.minCoeff() > 0.0)) throw Error("correct_image: illuminant components must be positive");
  const Rgbd gain = Rgbd::Constant(1.0 / std::sqrt(3.0)).cwiseQuotient(L.normalized());
  LinearImage out = img;
  double peak = 0.0;
  for (int c = 0; c < 3; ++c) {
    out.channel[c] = img.channel[c] * gain[c];
    if (out.valid.any()) peak = std::max(peak, out.valid.select(out.channel[c], 0.0).maxCoeff());
  }
  const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  for (int c = 0; c < 3; ++c) out.channel[c] = (out.channel[c] * scale).cwiseMin(1.0);
  return out;
}

IlluminantEstimate estimate_shades_of_gray(const LinearImage& img, double p) {
  require_valid_pixels(img, "shades-of-gray");
  if (!(p >= 1.0)) throw Error("shades-of-gray: Minkowski order must be >= 1");
  const auto start = Clock::now();
  Rgbd v;
  const double n = double(img.valid_count());
  for (int c = 0; c < 3; ++c) {
    if (std::isinf(p)) {
      v[c] = img.valid.select(img.channel[c], 0.0).maxCoeff();
    } else {
      v[c] = std::pow(img.valid.select(img.channel[c].pow(p), 0.0).sum() / n, 1.0 / p);
    }
  }
  IlluminantEstimate e;
  e.method = std::isinf(p) ? "white-patch" : (p == 1.0 ? "gray-world" : "shades-of-gray");
  e.L = unit_estimate(v, e.method.c_str());
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

IlluminantEstimate estimate_gray_world(const LinearImage& img) {
  require_valid_pixels(img, "gray-world");
  const auto start = Clock::now();
  Rgbd v;
  for (int c = 0; c < 3; ++c) v[c] = img.valid.select(img.channel[c], 0.0).sum() / double(img.valid_count());
  IlluminantEstimate e;
  e.method = "gray-world";
  e.L = unit_estimate(v, "gray-world");
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

IlluminantEstimate estimate_white_patch(const LinearImage& img) {
  require_valid_pixels(img, "white-patch");
  const auto start = Clock::now();
  Rgbd v;
  for (int c = 0; c < 3; ++c) v[c] = img.valid.select(img.channel[c], 0.0).maxCoeff();
  IlluminantEstimate e;
  e.method = "white-patch";
  e.L = unit_estimate(v, "white-patch");
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

namespace {

/// Sampled Gaussian (order 0) or its first/second derivative on [-r, r].
std::vector<double> gaussian_kernel(double sigma, int order, int r) {
  std::vector<double> g(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    g[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += g[i + r];
  }
  for (int i = -r; i <= r; ++i) {
    const double base = g[i + r] / sum;
    const double x = i;
    if (order == 0) g[i + r] = base;
    else if (order == 1) g[i + r] = -x / (sigma * sigma) * base;
    else g[i + r] = (x * x / std::pow(sigma, 4) - 1.0 / (sigma * sigma)) * base;
  }
  if (order == 2) {
    // Truncation leaves a DC term; remove it so constant channels give no response.
    const double dc = std::accumulate(g.begin(), g.end(), 0.0) / double(g.size());
    for (double& v : g) v -= dc;
  }
  return g;
}

/// Separable correlation with replicated borders.
Plane<double> separable(const Plane<double>& src, const std::vector<double>& kx, const std::vector<double>& ky) {
  const Eigen::Index h = src.rows(), w = src.cols();
  const int r = int(kx.size() / 2);
  Plane<double> tmp(h, w), out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += kx[i + r] * src(y, std::clamp<Eigen::Index>(x + i, 0, w - 1));
      tmp(y, x) = acc;
    }
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += ky[i + r] * tmp(std::clamp<Eigen::Index>(y + i, 0, h - 1), x);
      out(y, x) = acc;
    }
  return out;
}

}  // namespace

IlluminantEstimate estimate_gray_edge(const LinearImage& img, int order, double p, double sigma) {
  require_valid_pixels(img, "gray-edge");
  if (order != 1 && order != 2) throw Error("gray-edge: order must be 1 or 2");
  if (!(p >= 1.0)) throw Error("gray-edge: Minkowski order must be >= 1");
  if (!(sigma > 0.0)) throw Error("gray-edge: sigma must be positive");
  const auto start = Clock::now();
  const int r = std::max(1, int(std::ceil(3.0 * sigma)));
  const auto g0 = gaussian_kernel(sigma, 0, r), g1 = gaussian_kernel(sigma, 1, r), g2 = gaussian_kernel(sigma, 2, r);
  // Only pixels whose derivative footprint avoids invalid (e.g. clipped) pixels contribute.
  const Mask use = img.valid && (invalid_in_window(img.valid, r, true) == 0);
  if (!use.any()) throw Error("gray-edge: no pixel has a fully valid derivative footprint");
  const double n = double(use.count());
  Rgbd v;
  for (int c = 0; c < 3; ++c) {
    const Plane<double>& ch = img.channel[c];
    Plane<double> mag;
    if (order == 1) {
      mag = (separable(ch, g1, g0).square() + separable(ch, g0, g1).square()).sqrt();
    } else {
      mag = (separable(ch, g2, g0).square() + 4.0 * separable(ch, g1, g1).square() + separable(ch, g0, g2).square())
                .sqrt();
    }
    if (std::isinf(p)) v[c] = use.select(mag, 0.0).maxCoeff();
    else v[c] = std::pow(use.select(mag.pow(p), 0.0).sum() / n, 1.0 / p);
  }
  IlluminantEstimate e;
  e.method = order == 1 ? "gray-edge-1" : "gray-edge-2";
  // Numerical residue of a flat channel sits around 1e-17; anything that small is no edge energy.
  if (!(v.maxCoeff() > 1e-12)) throw Error(e.method + ": zero edge energy, estimate undefined");
  e.L = unit_estimate(v, e.method.c_str());
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

Method parse_method(std::string_view name) {
  if (name == "msgp") return Method::msgp;
  if (name == "gp-theta") return Method::gp_theta;
  if (name == "gp-sigma") return Method::gp_sigma;
  if (name == "gray-world") return Method::gray_world;
  if (name == "white-patch") return Method::white_patch;
  if (name == "shades-of-gray") return Method::shades_of_gray;
  if (name == "gray-edge-1") return Method::gray_edge_1;
  if (name == "gray-edge-2") return Method::gray_edge_2;
  throw Error("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::msgp: return "msgp";
    case Method::gp_theta: return "gp-theta";
    case Method::gp_sigma: return "gp-sigma";
    case Method::gray_world: return "gray-world";
    case Method::white_patch: return "white-patch";
    case Method::shades_of_gray: return "shades-of-gray";
    case Method::gray_edge_1: return "gray-edge-1";
    case Method::gray_edge_2: return "gray-edge-2";
  }
  return "unknown";
}

IlluminantEstimate estimate(const LinearImage& img, const MethodConfig& cfg) {
  const auto start = Clock::now();
  IlluminantEstimate e;
  switch (cfg.method) {
    case Method::msgp: e = estimate_msgp(img, cfg.msgp); break;
    case Method::gp_theta: e = estimate_gray_pixel(img, cfg.msgp, GraynessMeasure::theta); break;
    case Method::gp_sigma: e = estimate_gray_pixel(img, cfg.msgp, GraynessMeasure::sigma); break;
    case Method::gray_world: e = estimate_gray_world(img); break;
    case Method::white_patch: e = estimate_white_patch(img); break;
    case Method::shades_of_gray: e = estimate_shades_of_gray(img, cfg.minkowski_p); break;
    case Method::gray_edge_1: e = estimate_gray_edge(img, 1, cfg.edge_p, cfg.edge_sigma); break;
    case Method::gray_edge_2: e = estimate_gray_edge(img, 2, cfg.edge_p, cfg.edge_sigma); break;
  }
  e.method = std::string(method_name(cfg.method));
  e.diagnostics.runtime_ms = elapsed_ms(start);
  return e;
}

}  // namespace graypixel
