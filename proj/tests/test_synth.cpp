#include <graypixel/estimator.hpp>
#include <graypixel/metrics.hpp>
#include <graypixel/synth.hpp>

#include <gtest/gtest.h>

using namespace graypixel;

TEST(GenerateScene, NeutralIlluminantGivesScaledCanonical) {
  SceneSpec s;
  s.illuminant = Rgbd::Ones();
  const SyntheticScene sc = generate_scene(s);
  const double k = sc.I.channel[0](0, 0) / sc.W.channel[0](0, 0);
  for (int c = 0; c < 3; ++c) EXPECT_LE((sc.I.channel[c] - k * sc.W.channel[c]).abs().maxCoeff(), 1e-12);
}

TEST(GenerateScene, ExactHadamardGroundTruth) {
  SceneSpec s;
  s.illuminant = Rgbd(0.2, 0.9, 0.5);
  const SyntheticScene sc = generate_scene(s);
  EXPECT_NEAR(sc.L.norm(), 1.0, 1e-15);
  // I = W o L up to one global scale.
  const double k = sc.I.channel[1](5, 5) / (sc.W.channel[1](5, 5) * sc.L[1]);
  for (int c = 0; c < 3; ++c)
    EXPECT_LE((sc.I.channel[c] - k * sc.L[c] * sc.W.channel[c]).abs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::max({sc.I.channel[0].maxCoeff(), sc.I.channel[1].maxCoeff(), sc.I.channel[2].maxCoeff()}), 1.0,
              1e-15);
}

TEST(GenerateScene, GrayPatchesAreExactlyGray) {
  SceneSpec s;
  s.seed = 5;
  const SyntheticScene sc = generate_scene(s);
  int gray = 0;
  for (int py = 0; py < s.rows; ++py)
    for (int px = 0; px < s.cols; ++px) {
      if (!sc.gray_patch(py, px)) continue;
      ++gray;
      for (int y = py * s.patch_size; y < (py + 1) * s.patch_size; ++y)
        for (int x = px * s.patch_size; x < (px + 1) * s.patch_size; ++x) {
          const Rgbd w = sc.W.rgb(x, y);
          ASSERT_EQ(w[0], w[1]);
          ASSERT_EQ(w[1], w[2]);
        }
    }
  EXPECT_EQ(gray, 12);
}

TEST(GenerateScene, SeedDeterminism) {
  SceneSpec s;
  s.seed = 31;
  s.noise_sigma = 0.01;
  const SyntheticScene a = generate_scene(s), b = generate_scene(s);
  for (int c = 0; c < 3; ++c) {
    EXPECT_TRUE((a.W.channel[c] == b.W.channel[c]).all());
    EXPECT_TRUE((a.I.channel[c] == b.I.channel[c]).all());
  }
  s.seed = 32;
  const SyntheticScene d = generate_scene(s);
  EXPECT_FALSE((a.W.channel[0] == d.W.channel[0]).all());
}

TEST(GenerateScene, AllGrayIsRecovered) {
  SceneSpec s;
  s.gray_fraction = 1.0;
  s.illuminant = Rgbd(1.0, 0.7, 0.4);
  const SyntheticScene sc = generate_scene(s);
  EXPECT_LT(angular_error(estimate_msgp(sc.I).L, sc.L), 0.5);
}

TEST(GenerateScene, NoGrayPatchesFails) {
  SceneSpec s;
  s.gray_fraction = 0.0;
  s.illuminant = Rgbd(1.0, 0.7, 0.4);
  const SyntheticScene sc = generate_scene(s);
  try {
    const double err = angular_error(estimate_msgp(sc.I).L, sc.L);
    EXPECT_GT(err, 5.0);
  } catch (const NoGrayPixelsError&) {
    SUCCEED();
  }
}

TEST(SceneSpec, Validation) {
  auto bad = [](auto mutate) {
    SceneSpec s;
    mutate(s);
    EXPECT_THROW(s.validate(), Error);
  };
  bad([](SceneSpec& s) { s.gray_fraction = 1.5; });
  bad([](SceneSpec& s) { s.lum_min = 0.0; });
  bad([](SceneSpec& s) { s.lum_max = 1.0; });
  bad([](SceneSpec& s) { s.lum_min = 0.6; s.lum_max = 0.5; });
  bad([](SceneSpec& s) { s.illuminant = Rgbd::Zero(); });
  bad([](SceneSpec& s) { s.cols = 0; });
  bad([](SceneSpec& s) { s.color_lum_max = 1.2; });
}

TEST(BundledScenes, AllRecoveredByMsgp) {
  for (const SceneSpec& s : bundled_scenes()) {
    const SyntheticScene sc = generate_scene(s);
    EXPECT_LT(angular_error(estimate_msgp(sc.I).L, sc.L), 1.0) << s.name;
  }
}

TEST(RandomIlluminant, StaysWithinCone) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rgbd L = random_illuminant_near_neutral(rng, 30.0);
    EXPECT_NEAR(L.norm(), 1.0, 1e-12);
    EXPECT_LE(angular_error(L, Rgbd(1, 1, 1)), 30.0 + 1e-9);
    EXPECT_GT(L.minCoeff(), 0.0);
  }
}
