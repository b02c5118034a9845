#pragma once

#include <graypixel/types.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace graypixel {

/// Patch-grid test scene. Gray patches carry achromatic multiplicative texture
/// (R = G = B per pixel); colour patches carry independent per-channel texture.
struct SceneSpec {
  std::string name = "scene";
  std::uint64_t seed = 1;
  int cols = 6;
  int rows = 4;
  int patch_size = 32;
  double gray_fraction = 0.5;
  double lum_min = 0.1;
  double lum_max = 0.8;
  /// Brightness range of colour patches; defaults to [lum_min, lum_max].
  std::optional<double> color_lum_min;
  std::optional<double> color_lum_max;
  double shading_amplitude = 0.3;
  double texture_amplitude = 0.05;
  /// Relative amplitude of the per-channel texture on colour patches.
  double color_texture_amplitude = 0.05;
  /// Achromatic texture shared by the channels of colour patches.
  double color_shading_texture = 0.0;
  /// 1 gives strongly saturated colour patches, values near 0 nearly gray ones.
  double color_saturation = 1.0;
  /// Standard deviation of additive sensor noise on I (0 keeps ground truth exact).
  double noise_sigma = 0.0;
  Rgbd illuminant = Rgbd::Ones();

  void validate() const;
};

struct SyntheticScene {
  LinearImage W;  // canonical (white-light) image, max value 1
  LinearImage I;  // W o L rescaled to max 1, plus optional noise
  Rgbd L;         // unit-norm illuminant
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gray_patch;  // per patch (rows x cols)
};

SyntheticScene generate_scene(const SceneSpec& spec);

/// Unit illuminant at a uniformly drawn angle in [0, max_deg] from neutral.
Rgbd random_illuminant_near_neutral(std::mt19937_64& rng, double max_deg);

/// The scenes written by `graypixel synth`: ten exact scenes under varied illuminants.
std::vector<SceneSpec> bundled_scenes();

/// Noisy scene with dark gray patches and bright near-gray colour patches; used to contrast
/// the legacy and angular grayness measures.
SceneSpec mixed_luminance_scene();

}  // namespace graypixel
