#include "support.hpp"

#include <graypixel/image_io.hpp>

#include <gtest/gtest.h>
#include <png.h>
#include <tiffio.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

using namespace graypixel;
namespace fs = std::filesystem;

namespace {

// Row-major RGB samples, 3 per pixel.
void write_png_raw(const fs::path& path, int w, int h, int depth, const std::vector<std::uint16_t>& rgb) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int bytes = depth / 8;
  std::vector<unsigned char> row(std::size_t(w) * 3 * bytes);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w * 3; ++i) {
      const std::uint16_t v = rgb[std::size_t(y) * w * 3 + i];
      if (bytes == 2) {
        row[2 * i] = static_cast<unsigned char>(v >> 8);  // PNG is big-endian
        row[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
      } else {
        row[i] = static_cast<unsigned char>(v);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_tiff_raw(const fs::path& path, int w, int h, int depth, int samples, const std::vector<std::uint16_t>& v,
                    std::uint16_t compression = COMPRESSION_NONE) {
  TIFF* tif = TIFFOpen(path.c_str(), "w");
  ASSERT_NE(tif, nullptr);
  TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, w);
  TIFFSetField(tif, TIFFTAG_IMAGELENGTH, h);
  TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, samples);
  TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, depth);
  TIFFSetField(tif, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
  TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, samples == 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
  TIFFSetField(tif, TIFFTAG_COMPRESSION, compression);
  TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, h);
  const int bytes = depth / 8;
  std::vector<unsigned char> row(std::size_t(w) * samples * bytes);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w * samples; ++i) {
      const std::uint16_t s = v[std::size_t(y) * w * samples + i];
      if (bytes == 2) std::memcpy(&row[2 * i], &s, 2);
      else row[i] = static_cast<unsigned char>(s);
    }
    ASSERT_EQ(TIFFWriteScanline(tif, row.data(), y, 0), 1);
  }
  TIFFClose(tif);
}

// PFM with the given scale sign (negative = little-endian); rows bottom-to-top.
void write_pfm_raw(const fs::path& path, int w, int h, const std::vector<float>& rgb_top_down, bool little) {
  std::ofstream out(path, std::ios::binary);
  out << "PF\n" << w << ' ' << h << '\n' << (little ? "-1.0" : "1.0") << '\n';
  for (int y = h - 1; y >= 0; --y) {
    for (int i = 0; i < w * 3; ++i) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(rgb_top_down[std::size_t(y) * w * 3 + i]);
      const bool host_little = std::endian::native == std::endian::little;
      if (little != host_little) bits = __builtin_bswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
  }
}

}  // namespace

TEST(LoadLinearImage, BlackLevelAtOffsetIsZero) {
  const auto dir = test::scratch_dir("io_black");
  write_png_raw(dir / "a.png", 1, 1, 16, {129, 129, 129});
  DecodeOptions o;
  o.black_level = Rgbd::Constant(129);
  const LinearImage img = load_linear_image(dir / "a.png", o);
  EXPECT_EQ(img.rgb(0, 0), Rgbd::Zero());
  EXPECT_TRUE(img.valid(0, 0));
}

TEST(LoadLinearImage, SaturatedChannelInvalidatesPixel) {
  const auto dir = test::scratch_dir("io_sat");
  write_png_raw(dir / "a.png", 2, 1, 16, {65535, 100, 100, 100, 100, 100});
  DecodeOptions o;
  o.saturation_level = 65535;
  const LinearImage img = load_linear_image(dir / "a.png", o);
  EXPECT_FALSE(img.valid(0, 0));
  EXPECT_TRUE(img.valid(0, 1));
}

TEST(LoadLinearImage, ArithmeticOracle16Bit) {
  const auto dir = test::scratch_dir("io_arith");
  write_png_raw(dir / "a.png", 1, 1, 16, {32832, 32832, 32832});
  DecodeOptions o;
  o.black_level = Rgbd::Constant(129);
  o.saturation_level = 65535;
  const LinearImage img = load_linear_image(dir / "a.png", o);
  const double want = (32832.0 - 129.0) / (65535.0 - 129.0);
  EXPECT_DOUBLE_EQ(want, 0.5);  // 32703 / 65406
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(img.channel[c](0, 0), want);
  EXPECT_TRUE(img.valid(0, 0));
}

TEST(LoadLinearImage, SaturationMarginAfterBlackSubtraction) {
  const auto dir = test::scratch_dir("io_margin");
  // Range 1000 above black 0: 0.98 * 1000 = 980 is the clip threshold.
  write_png_raw(dir / "a.png", 2, 1, 16, {979, 10, 10, 980, 10, 10});
  DecodeOptions o;
  o.saturation_level = 1000;
  const LinearImage img = load_linear_image(dir / "a.png", o);
  EXPECT_TRUE(img.valid(0, 0));
  EXPECT_FALSE(img.valid(0, 1));
}

TEST(LoadLinearImage, BelowBlackClipsToZero) {
  const auto dir = test::scratch_dir("io_below");
  write_png_raw(dir / "a.png", 1, 1, 16, {50, 200, 129});
  DecodeOptions o;
  o.black_level = Rgbd::Constant(129);
  const LinearImage img = load_linear_image(dir / "a.png", o);
  EXPECT_EQ(img.channel[0](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(img.channel[1](0, 0), 71.0 / (65535.0 - 129.0));
}

TEST(LoadLinearImage, EightBitPngDefaults) {
  const auto dir = test::scratch_dir("io_png8");
  write_png_raw(dir / "a.png", 2, 2, 8, {0, 51, 102, 255, 10, 10, 20, 40, 60, 1, 2, 3});
  const LinearImage img = load_linear_image(dir / "a.png");
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_DOUBLE_EQ(img.channel[1](0, 0), 51.0 / 255.0);
  EXPECT_FALSE(img.valid(0, 1));  // 255 is the default saturation level
  EXPECT_DOUBLE_EQ(img.channel[2](1, 0), 60.0 / 255.0);
  EXPECT_TRUE(img.valid(1, 1));
}

TEST(LoadLinearImage, TiffSixteenBitAndDeflate) {
  const auto dir = test::scratch_dir("io_tiff");
  std::vector<std::uint16_t> v = {1000, 2000, 3000, 4000, 5000, 6000};
  write_tiff_raw(dir / "a.tif", 2, 1, 16, 3, v);
  write_tiff_raw(dir / "b.tif", 2, 1, 16, 3, v, COMPRESSION_ADOBE_DEFLATE);
  for (const char* name : {"a.tif", "b.tif"}) {
    const LinearImage img = load_linear_image(dir / name);
    EXPECT_DOUBLE_EQ(img.channel[0](0, 1), 4000.0 / 65535.0) << name;
    EXPECT_DOUBLE_EQ(img.channel[2](0, 0), 3000.0 / 65535.0) << name;
  }
}

TEST(LoadLinearImage, TiffEightBit) {
  const auto dir = test::scratch_dir("io_tiff8");
  write_tiff_raw(dir / "a.tif", 1, 1, 8, 3, {10, 20, 30});
  const LinearImage img = load_linear_image(dir / "a.tif");
  EXPECT_DOUBLE_EQ(img.channel[1](0, 0), 20.0 / 255.0);
}

TEST(LoadLinearImage, RejectsWrongChannelCount) {
  const auto dir = test::scratch_dir("io_gray");
  write_tiff_raw(dir / "g.tif", 2, 2, 16, 1, {1, 2, 3, 4});
  EXPECT_THROW(load_linear_image(dir / "g.tif"), Error);
}

TEST(LoadLinearImage, PfmBothEndiannessAndRowOrder) {
  const auto dir = test::scratch_dir("io_pfm");
  const std::vector<float> top_down = {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f};  // 1 wide, 2 tall
  write_pfm_raw(dir / "le.pfm", 1, 2, top_down, true);
  write_pfm_raw(dir / "be.pfm", 1, 2, top_down, false);
  for (const char* name : {"le.pfm", "be.pfm"}) {
    const LinearImage img = load_linear_image(dir / name);
    EXPECT_FLOAT_EQ(float(img.channel[0](0, 0)), 0.1f) << name;
    EXPECT_FLOAT_EQ(float(img.channel[2](1, 0)), 0.6f) << name;
  }
}

TEST(LoadLinearImage, PfmOutOfRangeValuesInvalid) {
  const auto dir = test::scratch_dir("io_pfm_range");
  write_pfm_raw(dir / "a.pfm", 2, 1, {0.5f, 0.5f, 0.5f, 1.5f, 0.2f, 0.2f}, true);
  const LinearImage img = load_linear_image(dir / "a.pfm");
  EXPECT_TRUE(img.valid(0, 0));
  EXPECT_FALSE(img.valid(0, 1));
  EXPECT_NO_THROW(check_linear_image(img));
}

TEST(LoadLinearImage, Errors) {
  const auto dir = test::scratch_dir("io_err");
  EXPECT_THROW(load_linear_image(dir / "missing.png"), Error);
  std::ofstream(dir / "junk.png") << "not an image";
  EXPECT_THROW(load_linear_image(dir / "junk.png"), Error);
  write_png_raw(dir / "a.png", 1, 1, 16, {1, 1, 1});
  DecodeOptions o;
  o.black_level = Rgbd::Constant(500);
  o.saturation_level = 400;
  EXPECT_THROW(load_linear_image(dir / "a.png", o), Error);
}

TEST(LoadLinearImage, DecodeIsDeterministic) {
  const auto dir = test::scratch_dir("io_det");
  std::vector<std::uint16_t> v;
  for (int i = 0; i < 4 * 3 * 3; ++i) v.push_back(std::uint16_t(i * 1777 % 65536));
  write_png_raw(dir / "a.png", 4, 3, 16, v);
  const LinearImage a = load_linear_image(dir / "a.png"), b = load_linear_image(dir / "a.png");
  for (int c = 0; c < 3; ++c) EXPECT_TRUE((a.channel[c] == b.channel[c]).all());
  EXPECT_TRUE((a.valid == b.valid).all());
  for (int c = 0; c < 3; ++c) {
    EXPECT_GE(a.channel[c].minCoeff(), 0.0);
    EXPECT_LE(a.channel[c].maxCoeff(), 1.0);
  }
}

TEST(WritePng16, RoundTripWithinQuantization) {
  const auto dir = test::scratch_dir("io_png16");
  LinearImage img = test::random_image(7, 5, 3, 0.0, 0.9);
  write_png16(dir / "a.png", img);
  const LinearImage back = load_linear_image(dir / "a.png");
  for (int c = 0; c < 3; ++c) EXPECT_LE((back.channel[c] - img.channel[c]).abs().maxCoeff(), 0.5 / 65535.0 + 1e-12);
}

TEST(WritePfm, RoundTripFloatPrecision) {
  const auto dir = test::scratch_dir("io_pfmw");
  LinearImage img = test::random_image(6, 4, 9, 0.0, 1.0);
  write_pfm(dir / "a.pfm", img);
  const LinearImage back = load_linear_image(dir / "a.pfm");
  for (int c = 0; c < 3; ++c) EXPECT_LE((back.channel[c] - img.channel[c]).abs().maxCoeff(), 1e-7);
}

TEST(ApplyMask, Examples) {
  LinearImage img = test::uniform_image(10, 10, Rgbd::Constant(0.5));
  EXPECT_TRUE((apply_mask(img, {}).valid == img.valid).all());
  EXPECT_EQ(apply_mask(img, {{0, 0, 10, 10}}).valid_count(), 0);
  EXPECT_EQ(img.valid_count() - apply_mask(img, {{4, 5, 2, 3}}).valid_count(), 6);
  EXPECT_THROW(apply_mask(img, {{8, 8, 3, 1}}), Error);
}

TEST(ApplyMask, NeverRevalidates) {
  LinearImage img = test::uniform_image(6, 6, Rgbd::Constant(0.5));
  img.valid(2, 2) = false;
  const LinearImage out = apply_mask(img, {{0, 0, 1, 1}});
  EXPECT_FALSE(out.valid(2, 2));
  EXPECT_EQ(out.valid_count(), 34);
}

TEST(MaskRects, ParseAndFormat) {
  const auto rects = parse_mask_rects("1,2,3,4;5,6,7,8");
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[1], (PixelRect{5, 6, 7, 8}));
  EXPECT_EQ(format_mask_rects(rects), "1,2,3,4;5,6,7,8");
  EXPECT_TRUE(parse_mask_rects("").empty());
  EXPECT_THROW(parse_mask_rects("1,2,3"), Error);
}

TEST(Manifest, CsvFields) {
  const auto m = parse_manifest_csv(
      "image_path,gt_r,gt_g,gt_b,mask,black_level,saturation_level\n"
      "a.png,0.8,1.0,0.6,\"0,0,2,2;3,3,1,1\",129,15000\n"
      "b.png,1,1,1,,,\n");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_NEAR(m.entries[0].ground_truth.norm(), 1.0, 1e-15);
  EXPECT_NEAR(m.entries[0].ground_truth[1] / m.entries[0].ground_truth[0], 1.25, 1e-12);
  EXPECT_EQ(m.entries[0].mask_rects.size(), 2u);
  EXPECT_EQ(*m.entries[0].black_level, Rgbd::Constant(129));
  EXPECT_EQ(*m.entries[0].saturation_level, 15000);
  EXPECT_FALSE(m.entries[1].black_level.has_value());
  EXPECT_TRUE(m.entries[1].mask_rects.empty());
}

TEST(Manifest, EmptyAndRejections) {
  EXPECT_TRUE(parse_manifest_csv("image_path,gt_r,gt_g,gt_b\n").entries.empty());
  EXPECT_TRUE(parse_manifest_json("[]").entries.empty());
  EXPECT_THROW(parse_manifest_csv("image_path,gt_r,gt_g,gt_b\na.png,0,0,0\n"), Error);
  EXPECT_THROW(parse_manifest_json(R"([{"image_path":"a.png","gt_r":0,"gt_g":0,"gt_b":0}])"), Error);
  EXPECT_THROW(parse_manifest_csv("image_path,gt_r,gt_g\na.png,1,1\n"), Error);
  try {
    parse_manifest_csv("image_path,gt_r,gt_g,gt_b\na.png,1,1,1\nb.png,1,x,1\n");
    FAIL() << "expected a schema error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("gt_g"), std::string::npos) << e.what();
  }
}

TEST(Manifest, JsonMirrorsCsv) {
  const auto m = parse_manifest_json(R"({"entries":[
    {"image_path":"a.png","gt_r":0.8,"gt_g":1.0,"gt_b":0.6,"mask":[[0,0,2,2]],"black_level":[1,2,3]},
    {"image_path":"b.png","gt_r":1,"gt_g":2,"gt_b":3,"mask":"1,1,1,1","saturation_level":4000}]})");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].image_path, "a.png");
  EXPECT_EQ(*m.entries[0].black_level, Rgbd(1, 2, 3));
  EXPECT_EQ(m.entries[1].mask_rects[0], (PixelRect{1, 1, 1, 1}));
  EXPECT_EQ(*m.entries[1].saturation_level, 4000);
}

TEST(Manifest, LoadPreservesOrderAndDispatchesOnExtension) {
  const auto dir = test::scratch_dir("io_manifest");
  {
    std::ofstream csv(dir / "m.csv");
    csv << "image_path,gt_r,gt_g,gt_b\n";
    for (int i = 0; i < 568; ++i) csv << "img_" << i << ".png,1," << 1 + i % 3 << ",1\n";
  }
  const auto m = load_manifest(dir / "m.csv");
  ASSERT_EQ(m.entries.size(), 568u);
  EXPECT_EQ(m.entries[0].image_path, "img_0.png");
  EXPECT_EQ(m.entries[567].image_path, "img_567.png");
  std::ofstream(dir / "m.json") << R"([{"image_path":"x.png","gt_r":1,"gt_g":1,"gt_b":1}])";
  EXPECT_EQ(load_manifest(dir / "m.json").entries.size(), 1u);
  EXPECT_THROW(load_manifest(dir / "absent.csv"), Error);
}
