#pragma once

#include <graypixel/selection.hpp>
#include <graypixel/types.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace graypixel {

/// Angle between two vectors in radians (arccos of the clamped cosine).
template <typename Scalar>
Scalar vector_angle(const Rgb<Scalar>& a, const Rgb<Scalar>& b) {
  const Scalar na = a.norm(), nb = b.norm();
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) throw Error("vector_angle: zero-norm input");
  return std::acos(std::clamp(a.dot(b) / (na * nb), Scalar(-1), Scalar(1)));
}

/// ||a - b||_2 * angle(a, b). Zero for collinear colours regardless of brightness.
template <typename Scalar>
Scalar hybrid_distance(const Rgb<Scalar>& a, const Rgb<Scalar>& b) {
  return (a - b).norm() * vector_angle(a, b);
}

enum class DistanceKind { hybrid, angle_only };

double mode_distance(const Rgbd& a, const Rgbd& b, DistanceKind kind);

struct Mode {
  Rgbd centroid = Rgbd::Zero();
  std::size_t members = 0;
  /// Number of input points within the bandwidth of the centroid (flat kernel).
  std::size_t support = 0;
  /// support / n, the kernel density estimate at the centroid.
  double density = 0.0;
};

struct ModeResult {
  std::vector<Mode> modes;  // descending density
  std::vector<std::size_t> assignments;
};

struct MeanShiftOptions {
  double bandwidth = 1e-3;
  DistanceKind distance = DistanceKind::hybrid;
  double tol = 1e-6;
  int max_iter = 200;
};

/// Flat-kernel mean shift. Every point climbs to the mean of the input points
/// within the bandwidth of its current position; converged positions within the
/// bandwidth of a mode's first member join that mode. The result is independent
/// of input order.
ModeResult mean_shift(std::span<const Rgbd> points, const MeanShiftOptions& opts = {});
ModeResult mean_shift(const PixelSet& points, const MeanShiftOptions& opts = {});

/// Unit-norm centroid of the densest mode (ties: more members, then lower index).
Rgbd pick_illuminant(const ModeResult& result);

struct KMeansOptions {
  int k = 2;
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_iter = 100;
};

/// Lloyd iterations from k-means++ seeds; best of `restarts` runs by within-cluster
/// sum of squares. Mode density is the member fraction.
ModeResult kmeans(std::span<const Rgbd> points, const KMeansOptions& opts);
ModeResult kmeans(const PixelSet& points, const KMeansOptions& opts);

std::vector<Rgbd> rgb_of(const PixelSet& points);

}  // namespace graypixel
