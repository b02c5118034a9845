#pragma once

#include <graypixel/types.hpp>

namespace graypixel {

/// Square Laplacian-of-Gaussian stencil with exactly zero DC response.
struct LogKernel {
  int size = 0;
  double sigma = 0.0;
  Plane<double> coefficients;

  int radius() const { return size / 2; }
};

/// Samples -(1/(pi s^4)) (1 - r^2/(2 s^2)) exp(-r^2/(2 s^2)) on a size x size
/// grid centred on the middle tap, then subtracts the mean.
LogKernel make_log_kernel(int size, double sigma);

/// ln(max(v, epsilon)) on valid pixels; invalid pixels are stored as 0 and stay invalid.
LogImage log_transform(const LinearImage& img, double epsilon = 1e-6);

/// Channel-wise correlation with the kernel. Pixels whose footprint leaves the
/// image or covers an invalid input pixel are invalid and hold zero contrast.
ContrastMap local_contrast(const RgbField<double>& logimg, const LogKernel& kernel);

/// Per-pixel count of invalid pixels inside a (2r+1)^2 window. Out-of-image
/// samples count as invalid unless `outside_valid` is set.
Plane<int> invalid_in_window(const Mask& valid, int radius, bool outside_valid = false);

}  // namespace graypixel
