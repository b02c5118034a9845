#pragma once

#include <graypixel/grayness.hpp>
#include <graypixel/modeseek.hpp>
#include <graypixel/selection.hpp>
#include <graypixel/types.hpp>

#include <limits>
#include <string>
#include <string_view>

namespace graypixel {

enum class ClusterKind { meanshift, kmeans };

/// Tunables of the gray-pixel pipeline. Defaults reproduce the published setting
/// (5x5 LoG, N = 0.1 %, h = 1e-3).
struct MsgpParams {
  double n_percent = 0.1;
  double bandwidth = 1e-3;
  int log_size = 5;
  double log_sigma = 0.5;
  double epsilon = 1e-6;
  double contrast_floor = 1e-4;
  int smooth_window = 7;
  double grayness_quantum = 1e-6;
  DistanceKind distance = DistanceKind::hybrid;
  ClusterKind cluster = ClusterKind::meanshift;
  int k = 2;
  std::uint64_t seed = 0;
  int restarts = 5;
  double shift_tol = 1e-6;
  int max_iter = 200;

  /// Throws Error naming the first offending field.
  void validate() const;
};

struct EstimateDiagnostics {
  std::size_t selected_pixels = 0;
  std::size_t modes = 0;
  double densest_density = 0.0;
  double runtime_ms = 0.0;
};

struct IlluminantEstimate {
  Rgbd L = Rgbd::Ones().normalized();  // unit L2 norm, nonnegative
  std::string method;
  EstimateDiagnostics diagnostics;
};

/// Steps 1-3 of the gray-pixel pipeline: log contrast, grayness, top-N% selection.
/// The legacy measure additionally divides scores by pixel brightness.
PixelSet gray_pixel_candidates(const LinearImage& img, const MsgpParams& p,
                               GraynessMeasure measure = GraynessMeasure::theta);

/// Gray-pixel candidates purified by clustering; the densest mode is the illuminant.
IlluminantEstimate estimate_msgp(const LinearImage& img, const MsgpParams& p = {});

/// Plain gray-pixel estimate: arithmetic RGB mean of the candidates, no clustering.
IlluminantEstimate estimate_gray_pixel(const LinearImage& img, const MsgpParams& p, GraynessMeasure measure);

/// Von Kries correction W_i = I_i * g_i / L_i with g = (1,1,1)/sqrt(3), then scaled
/// so the brightest valid channel value is 1.
LinearImage correct_image(const LinearImage& img, const Rgbd& L);

/// Minkowski-norm family: p = 1 is Gray World, p = infinity is White Patch.
IlluminantEstimate estimate_shades_of_gray(const LinearImage& img, double p);
IlluminantEstimate estimate_gray_world(const LinearImage& img);
IlluminantEstimate estimate_white_patch(const LinearImage& img);

/// Minkowski mean of Gaussian-derivative magnitudes (order 1 or 2) per channel.
IlluminantEstimate estimate_gray_edge(const LinearImage& img, int order, double p = 1.0, double sigma = 6.0);

enum class Method { msgp, gp_theta, gp_sigma, gray_world, white_patch, shades_of_gray, gray_edge_1, gray_edge_2 };

Method parse_method(std::string_view name);
std::string_view method_name(Method m);

struct MethodConfig {
  Method method = Method::msgp;
  MsgpParams msgp;
  double minkowski_p = 6.0;  // shades-of-gray
  double edge_p = 1.0;
  double edge_sigma = 6.0;
};

/// Dispatches to the estimator selected by cfg.method and records its runtime.
IlluminantEstimate estimate(const LinearImage& img, const MethodConfig& cfg);

}  // namespace graypixel
