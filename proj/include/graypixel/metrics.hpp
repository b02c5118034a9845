#pragma once

#include <graypixel/types.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

namespace graypixel {

/// Angle between estimate and ground truth in degrees; scale-free in both arguments.
template <typename Scalar>
Scalar angular_error(const Rgb<Scalar>& est, const Rgb<Scalar>& gt) {
  const Scalar ne = est.norm(), ng = gt.norm();
  if (!(ne > Scalar(0)) || !(ng > Scalar(0))) throw Error("angular_error: zero vector");
  // atan2 form: same angle as arccos of the cosine, but exactly zero for parallel inputs.
  return std::atan2(est.cross(gt).norm(), est.dot(gt)) * Scalar(180) / std::numbers::pi_v<Scalar>;
}

struct EvalStats {
  double mean = 0.0;
  double median = 0.0;
  double trimean = 0.0;
  double best25 = 0.0;
  double worst25 = 0.0;
  std::size_t count = 0;
};

/// Linearly interpolated percentile of an ascending sample, q in [0,1],
/// at position q*(n-1).
double sorted_quantile(std::span<const double> sorted, double q);

/// Mean, median, trimean (Q1 + 2 median + Q3)/4, and the means of the
/// floor(n/4) smallest / largest errors (at least one element each).
EvalStats summarize(std::span<const double> errors);

}  // namespace graypixel
