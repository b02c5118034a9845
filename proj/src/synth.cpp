#include <graypixel/synth.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace graypixel {

void SceneSpec::validate() const {
  if (cols < 1 || rows < 1 || patch_size < 1) throw Error("scene grid must be nonempty");
  if (!(gray_fraction >= 0.0 && gray_fraction <= 1.0)) throw Error("gray_fraction must lie in [0,1]");
  if (!(lum_min > 0.0 && lum_min <= lum_max && lum_max < 1.0)) throw Error("luminance range must lie within (0,1)");
  const double cmin = color_lum_min.value_or(lum_min), cmax = color_lum_max.value_or(lum_max);
  if (!(cmin > 0.0 && cmin <= cmax && cmax < 1.0)) throw Error("colour luminance range must lie within (0,1)");
  if (!(shading_amplitude >= 0.0 && shading_amplitude < 1.0)) throw Error("shading_amplitude must lie in [0,1)");
  if (!(texture_amplitude >= 0.0 && texture_amplitude < 1.0)) throw Error("texture_amplitude must lie in [0,1)");
  if (!(color_texture_amplitude >= 0.0 && color_texture_amplitude < 1.0))
    throw Error("color_texture_amplitude must lie in [0,1)");
  if (!(color_shading_texture >= 0.0 && color_shading_texture < 1.0))
    throw Error("color_shading_texture must lie in [0,1)");
  if (!(color_saturation > 0.0 && color_saturation <= 1.0)) throw Error("color_saturation must lie in (0,1]");
  if (!(noise_sigma >= 0.0)) throw Error("noise_sigma must be nonnegative");
  if (!illuminant.allFinite() || !(illuminant.minCoeff() > 0.0)) throw Error("illuminant must be positive");
}

namespace {

Rgbd saturated_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> low(0.05, 0.4);
  Rgbd c(1.0, low(rng), low(rng));
  std::array<int, 3> perm{0, 1, 2};
  std::shuffle(perm.begin(), perm.end(), rng);
  return {c[perm[0]], c[perm[1]], c[perm[2]]};
}

}  // namespace

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);

  const int n_patches = spec.cols * spec.rows;
  const int n_gray = int(std::lround(spec.gray_fraction * n_patches));
  std::vector<int> order(n_patches);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  SyntheticScene scene;
  scene.gray_patch.setConstant(spec.rows, spec.cols, false);
  std::vector<Rgbd> reflectance(n_patches);
  for (int i = 0; i < n_patches; ++i) {
    const int patch = order[i];
    const bool gray = i < n_gray;
    const double lo = gray ? spec.lum_min : spec.color_lum_min.value_or(spec.lum_min);
    const double hi = gray ? spec.lum_max : spec.color_lum_max.value_or(spec.lum_max);
    const double lum = lo + (hi - lo) * unit(rng);
    if (gray) {
      scene.gray_patch(patch / spec.cols, patch % spec.cols) = true;
      reflectance[patch] = Rgbd::Constant(lum);
    } else {
      const Rgbd hue = saturated_color(rng);
      reflectance[patch] = lum * (Rgbd::Ones() - spec.color_saturation * (Rgbd::Ones() - hue));
    }
  }

  const int w = spec.cols * spec.patch_size;
  const int h = spec.rows * spec.patch_size;
  const double fx = 0.5 + 1.5 * unit(rng), fy = 0.5 + 1.5 * unit(rng);
  const double px = 2.0 * std::numbers::pi * unit(rng), py = 2.0 * std::numbers::pi * unit(rng);

  LinearImage W(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double wave = std::sin(2.0 * std::numbers::pi * fx * x / w + px) *
                          std::cos(2.0 * std::numbers::pi * fy * y / h + py);
      const double shading = 1.0 - spec.shading_amplitude * 0.5 * (1.0 + wave);
      const int patch = (y / spec.patch_size) * spec.cols + x / spec.patch_size;
      const bool gray = scene.gray_patch(y / spec.patch_size, x / spec.patch_size);
      const double common = 1.0 + spec.texture_amplitude * sym(rng);
      Rgbd texture = Rgbd::Constant(common);
      if (!gray) {
        const double shared = 1.0 + spec.color_shading_texture * sym(rng);
        for (int c = 0; c < 3; ++c) texture[c] = shared * (1.0 + spec.color_texture_amplitude * sym(rng));
      }
      W.set_rgb(x, y, shading * reflectance[patch].cwiseProduct(texture));
    }
  }
  double peak = std::max({W.channel[0].maxCoeff(), W.channel[1].maxCoeff(), W.channel[2].maxCoeff()});
  for (auto& ch : W.channel) ch /= peak;

  scene.L = spec.illuminant.normalized();
  LinearImage I(w, h);
  for (int c = 0; c < 3; ++c) I.channel[c] = W.channel[c] * scene.L[c];
  peak = std::max({I.channel[0].maxCoeff(), I.channel[1].maxCoeff(), I.channel[2].maxCoeff()});
  for (auto& ch : I.channel) ch /= peak;
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& ch : I.channel)
      for (Eigen::Index i = 0; i < ch.size(); ++i) ch.data()[i] = std::clamp(ch.data()[i] + noise(rng), 0.0, 1.0);
  }
  scene.W = std::move(W);
  scene.I = std::move(I);
  return scene;
}

Rgbd random_illuminant_near_neutral(std::mt19937_64& rng, double max_deg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Rgbd n = Rgbd::Ones().normalized();
  // Orthonormal basis of the plane perpendicular to the gray axis.
  const Rgbd e1 = Rgbd(1.0, -1.0, 0.0).normalized();
  const Rgbd e2 = n.cross(e1);
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  const double theta = max_deg * unit(rng) * std::numbers::pi / 180.0;
  const Rgbd dir = std::cos(phi) * e1 + std::sin(phi) * e2;
  return (std::cos(theta) * n + std::sin(theta) * dir).normalized();
}

std::vector<SceneSpec> bundled_scenes() {
  std::vector<SceneSpec> out;
  std::mt19937_64 rng(20190101);
  for (int i = 0; i < 10; ++i) {
    SceneSpec s;
    s.name = "scene_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    s.seed = 1000 + std::uint64_t(i);
    s.gray_fraction = 0.3 + 0.05 * i;
    s.illuminant = random_illuminant_near_neutral(rng, 30.0);
    out.push_back(s);
  }
  out.push_back(mixed_luminance_scene());
  return out;
}

SceneSpec mixed_luminance_scene() {
  // Dark, strongly textured gray patches next to bright, faintly tinted and
  // nearly flat colour patches. Sensor noise is large in log terms on the dark
  // patches, so only a contrast-independent grayness ranks them first.
  SceneSpec s;
  s.name = "mixed_luminance";
  s.seed = 4242;
  s.cols = 8;
  s.rows = 6;
  s.gray_fraction = 0.5;
  s.lum_min = 0.03;
  s.lum_max = 0.12;
  s.color_lum_min = 0.5;
  s.color_lum_max = 0.9;
  s.texture_amplitude = 0.3;
  s.color_texture_amplitude = 0.0;
  s.color_shading_texture = 0.01;
  s.color_saturation = 0.3;
  s.noise_sigma = 0.001;
  s.illuminant = Rgbd(0.8, 1.0, 0.6);
  return s;
}

}  // namespace graypixel
