#pragma once

#include <graypixel/types.hpp>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace graypixel::test {

inline LinearImage uniform_image(int w, int h, const Rgbd& v) {
  LinearImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set_rgb(x, y, v);
  return img;
}

/// Random image with channels drawn from [lo, hi].
inline LinearImage random_image(int w, int h, std::uint64_t seed, double lo = 0.05, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  LinearImage img(w, h);
  for (auto& ch : img.channel)
    for (Eigen::Index i = 0; i < ch.size(); ++i) ch.data()[i] = u(rng);
  return img;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("graypixel_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace graypixel::test
