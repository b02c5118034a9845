#pragma once

#include <graypixel/grayness.hpp>
#include <graypixel/types.hpp>

#include <cstdint>
#include <vector>

namespace graypixel {

struct GrayPixel {
  int x = 0;
  int y = 0;
  Rgbd rgb = Rgbd::Zero();
  double grayness = 0.0;
};

/// Candidate gray pixels, ascending by grayness with raster-order tie-break.
struct PixelSet {
  std::vector<GrayPixel> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// max(1, ceil(valid_count * n_percent / 100)), computed without floating drift.
std::size_t top_n_count(std::size_t valid_count, double n_percent);

/// Picks the grayest n_percent of eligible pixels. A pixel is eligible when its
/// grayness is valid, the image pixel is valid and its RGB has positive norm.
/// Throws NoGrayPixelsError when nothing is eligible.
PixelSet select_top_n(const GraynessMap& gmap, const LinearImage& img, double n_percent);

}  // namespace graypixel
