#include <graypixel/selection.hpp>

#include <algorithm>
#include <cmath>

namespace graypixel {

std::size_t top_n_count(std::size_t valid_count, double n_percent) {
  if (!(n_percent > 0.0) || n_percent > 100.0) throw Error("n_percent must lie in (0, 100]");
  const long double q = static_cast<long double>(valid_count) * n_percent / 100.0L;
  // Decimal percentages such as 0.1 are not exact in binary; treat results within
  // a relative 1e-9 of an integer as that integer.
  const long double snapped = std::ceil(q - q * 1e-9L);
  const auto n = static_cast<std::size_t>(std::max<long double>(snapped, 1.0L));
  return std::min(n, std::max<std::size_t>(valid_count, 1));
}

PixelSet select_top_n(const GraynessMap& gmap, const LinearImage& img, double n_percent) {
  if (gmap.width() != img.width() || gmap.height() != img.height())
    throw Error("grayness map and image dimensions differ");
  if (!(n_percent > 0.0) || n_percent > 100.0) throw Error("n_percent must lie in (0, 100]");

  struct Key {
    double g;
    std::int64_t raster;
    bool operator<(const Key& o) const { return g < o.g || (g == o.g && raster < o.raster); }
  };
  std::vector<Key> keys;
  keys.reserve(std::size_t(gmap.valid_count()));
  const Eigen::Index w = img.width();
  for (Eigen::Index y = 0; y < img.height(); ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!gmap.valid(y, x) || !img.valid(y, x)) continue;
      if (!(img.rgb(x, y).norm() > 0.0)) continue;
      keys.push_back({gmap.g(y, x), y * w + x});
    }
  }
  if (keys.empty()) throw NoGrayPixelsError("no detectable gray pixels: no pixel has usable local contrast");

  const std::size_t n = top_n_count(keys.size(), n_percent);
  std::nth_element(keys.begin(), keys.begin() + std::ptrdiff_t(n - 1), keys.end());
  std::sort(keys.begin(), keys.begin() + std::ptrdiff_t(n));

  PixelSet s;
  s.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int x = int(keys[i].raster % w), y = int(keys[i].raster / w);
    s.points.push_back({x, y, img.rgb(x, y), keys[i].g});
  }
  return s;
}

}  // namespace graypixel
