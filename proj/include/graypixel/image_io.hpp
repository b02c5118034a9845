#pragma once

#include <graypixel/types.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace graypixel {

/// Raw-unit corrections applied while decoding. Unset levels fall back to
/// black = 0 and saturation = 2^bitdepth - 1 for integer containers; float
/// maps (PFM) are taken as already normalized unless a saturation level is set.
struct DecodeOptions {
  std::optional<Rgbd> black_level;
  std::optional<double> saturation_level;
  /// Fraction of (saturation - black) at or above which a channel counts as clipped.
  double saturation_margin = 0.98;
};

struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const PixelRect&) const = default;
};

struct ManifestEntry {
  std::string image_path;
  Rgbd ground_truth = Rgbd::Ones();  // unit norm after load
  Rgbd ground_truth_raw = Rgbd::Ones();
  std::vector<PixelRect> mask_rects;
  std::optional<Rgbd> black_level;
  std::optional<double> saturation_level;

  DecodeOptions decode_options() const;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Normalizes raw integer samples: (v - black) / (sat - black) clamped to [0,1].
/// Pixels whose channel reaches margin*(sat - black) above black are marked invalid.
LinearImage normalize_raw(const std::array<Plane<double>, 3>& raw, const Rgbd& black, double saturation,
                          double margin);

/// Decodes PNG (8/16-bit), TIFF (8/16-bit, uncompressed or deflate) or PFM.
LinearImage load_linear_image(const std::filesystem::path& path, const DecodeOptions& opts = {});

/// Marks every pixel inside any rectangle invalid. Throws on out-of-bounds rectangles.
LinearImage apply_mask(const LinearImage& img, const std::vector<PixelRect>& rects);

/// Parses "x,y,w,h;x,y,w,h;..." (empty string gives no rectangles).
std::vector<PixelRect> parse_mask_rects(const std::string& text);
std::string format_mask_rects(const std::vector<PixelRect>& rects);

/// Reads the CSV or JSON manifest schema (chosen by extension, .json vs anything else).
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest_csv(const std::string& text);
DatasetManifest parse_manifest_json(const std::string& text);

/// 32-bit little-endian color PFM, rows stored bottom-to-top as the format requires.
void write_pfm(const std::filesystem::path& path, const RgbField<double>& img);
/// 16-bit RGB PNG; values are clamped to [0,1] and scaled to 65535.
void write_png16(const std::filesystem::path& path, const RgbField<double>& img);

}  // namespace graypixel
