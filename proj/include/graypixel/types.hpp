#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace graypixel {

template <typename Scalar>
using Rgb = Eigen::Matrix<Scalar, 3, 1>;
using Rgbd = Rgb<double>;

/// Row-major height x width scalar field; index as (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an image offers no usable gray-pixel evidence.
class NoGrayPixelsError : public Error {
 public:
  using Error::Error;
};

/// Three co-registered channel planes plus a per-pixel validity mask.
template <typename Scalar>
struct RgbField {
  std::array<Plane<Scalar>, 3> channel;
  Mask valid;

  RgbField() = default;
  RgbField(Eigen::Index width, Eigen::Index height)
      : channel{Plane<Scalar>::Zero(height, width), Plane<Scalar>::Zero(height, width),
                Plane<Scalar>::Zero(height, width)},
        valid(Mask::Constant(height, width, true)) {}

  Eigen::Index width() const { return valid.cols(); }
  Eigen::Index height() const { return valid.rows(); }
  Eigen::Index size() const { return valid.size(); }
  Eigen::Index valid_count() const { return valid.count(); }

  Rgb<Scalar> rgb(Eigen::Index x, Eigen::Index y) const {
    return {channel[0](y, x), channel[1](y, x), channel[2](y, x)};
  }
  void set_rgb(Eigen::Index x, Eigen::Index y, const Rgb<Scalar>& v) {
    for (int c = 0; c < 3; ++c) channel[c](y, x) = v[c];
  }
};

/// Linear radiometric RGB in [0,1]; see check_linear_image() for the invariants.
struct LinearImage : RgbField<double> {
  using RgbField<double>::RgbField;
};

/// Natural log of a LinearImage, channel-wise.
struct LogImage : RgbField<double> {
  using RgbField<double>::RgbField;
};

/// Channel-wise local contrast of a log image.
struct ContrastMap : RgbField<double> {
  using RgbField<double>::RgbField;
};

/// Throws Error if any stored value is non-finite or outside [0,1], or the image is empty.
void check_linear_image(const LinearImage& img);

inline Rgbd normalized_or_throw(const Rgbd& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(std::string(what) + ": vector has zero norm");
  return v / n;
}

}  // namespace graypixel
