#pragma once

#include <graypixel/types.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace graypixel {

/// arccos(1/sqrt(3)): angle between a single-channel vector and the gray axis.
inline constexpr double kMaxGraynessTheta = 0.95531661812450927816;

// All measures act on component magnitudes; the sign of the LoG response is ignored.

/// Sum of squared pairwise differences of |d|, equal to 3 ||d||_2^2 - ||d||_1^2.
/// Exactly zero for equal magnitudes, which the closed forms below rely on.
template <typename Scalar>
Scalar pairwise_spread(const Rgb<Scalar>& a) {
  const Scalar d01 = a[0] - a[1], d12 = a[1] - a[2], d20 = a[2] - a[0];
  return d01 * d01 + d12 * d12 + d20 * d20;
}

/// Angular grayness: arccos((1/sqrt 3) ||d||_1 / ||d||_2), in radians.
/// Zero exactly when |d_R| = |d_G| = |d_B|. Throws on a zero vector.
template <typename Scalar>
Scalar grayness_theta(const Rgb<Scalar>& delta) {
  const Scalar l2 = delta.norm();
  if (!(l2 > Scalar(0))) throw Error("grayness_theta: zero contrast vector");
  // atan2 of the off-axis and on-axis components; equal to the arccos form but exact at zero.
  const Rgb<Scalar> a = delta.cwiseAbs();
  const Scalar off = std::sqrt(pairwise_spread(a) / Scalar(3));
  const Scalar on = a.sum() / std::sqrt(Scalar(3));
  return std::min(std::atan2(off, on), Scalar(kMaxGraynessTheta));
}

/// Legacy variance-over-mean grayness sqrt((1/3) sum (|d_i| - m)^2 / m), m = mean |d_i|.
template <typename Scalar>
Scalar grayness_sigma(const Rgb<Scalar>& delta) {
  const Rgb<Scalar> a = delta.cwiseAbs();
  const Scalar mean = a.sum() / Scalar(3);
  if (!(mean > Scalar(0))) throw Error("grayness_sigma: mean contrast must be positive");
  const Scalar var = pairwise_spread(a) / Scalar(3);
  return std::sqrt(var / (Scalar(3) * mean));
}

/// Small-angle surrogate sqrt(1 - (1/sqrt 3) ||d||_1 / ||d||_2) of grayness_theta.
template <typename Scalar>
Scalar grayness_theta_approx(const Rgb<Scalar>& delta) {
  const Scalar l2 = delta.norm();
  if (!(l2 > Scalar(0))) throw Error("grayness_theta_approx: zero contrast vector");
  // 1 - l1/(sqrt3 l2) rewritten as spread / (sqrt3 l2 (sqrt3 l2 + l1)) to avoid cancellation.
  const Scalar l1 = delta.cwiseAbs().sum();
  const Scalar s3l2 = std::sqrt(Scalar(3)) * l2;
  return std::sqrt(pairwise_spread(Rgb<Scalar>(delta.cwiseAbs())) / (s3l2 * (s3l2 + l1)));
}

/// Luminance-dependent factor linking the measures: grayness_sigma = gamma * grayness_theta_approx,
/// with gamma = sqrt(a (a + sqrt(3) b) / (3 b)), a = ||d||_2, b = ||d||_1 / 3.
template <typename Scalar>
Scalar gamma_factor(const Rgb<Scalar>& delta) {
  const Scalar alpha = delta.norm();
  const Scalar beta = delta.cwiseAbs().sum() / Scalar(3);
  if (!(beta > Scalar(0))) throw Error("gamma_factor: mean contrast must be positive");
  return std::sqrt(alpha * (alpha + std::sqrt(Scalar(3)) * beta) / (Scalar(3) * beta));
}

enum class GraynessMeasure { theta, sigma };

struct GraynessConfig {
  GraynessMeasure measure = GraynessMeasure::theta;
  double contrast_floor = 1e-4;  // on ||delta||_2
  int smooth_window = 7;         // odd; 1 disables averaging
  /// Scores are snapped down to multiples of this step so floating-point noise
  /// on exactly-gray pixels cannot reorder them. 0 disables.
  double quantum = 1e-6;
};

/// Per-pixel grayness; lower is grayer.
struct GraynessMap {
  Plane<double> g;
  Mask valid;

  Eigen::Index width() const { return valid.cols(); }
  Eigen::Index height() const { return valid.rows(); }
  Eigen::Index valid_count() const { return valid.count(); }
};

GraynessMap grayness_map(const ContrastMap& cmap, const GraynessConfig& cfg = {});

/// Mean over the valid pixels of a window x window neighbourhood (clipped at
/// the image border). Invalid pixels stay invalid.
Plane<double> masked_box_mean(const Plane<double>& values, const Mask& valid, int window);

/// Divides each score by the pixel's mean RGB (floored at epsilon), the dark-pixel
/// weakening used with the legacy measure.
void weaken_dark_pixels(GraynessMap& gmap, const LinearImage& img, double epsilon = 1e-6);

void quantize_grayness(GraynessMap& gmap, double quantum);

}  // namespace graypixel
