#include <graypixel/image_io.hpp>

#include <json.hpp>
#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace graypixel {

namespace fs = std::filesystem;

void check_linear_image(const LinearImage& img) {
  if (img.size() == 0) throw Error("linear image is empty");
  for (const auto& ch : img.channel) {
    if (ch.rows() != img.height() || ch.cols() != img.width())
      throw Error("linear image channel dimensions disagree with mask");
    if (!ch.isFinite().all()) throw Error("linear image holds non-finite values");
    if ((ch < 0.0).any() || (ch > 1.0).any()) throw Error("linear image values outside [0,1]");
  }
}

DecodeOptions ManifestEntry::decode_options() const {
  DecodeOptions o;
  o.black_level = black_level;
  o.saturation_level = saturation_level;
  return o;
}

LinearImage normalize_raw(const std::array<Plane<double>, 3>& raw, const Rgbd& black, double saturation,
                          double margin) {
  if (!(saturation > black.maxCoeff())) throw Error("saturation_level must exceed black_level");
  const Eigen::Index h = raw[0].rows();
  const Eigen::Index w = raw[0].cols();
  LinearImage img(w, h);
  for (int c = 0; c < 3; ++c) {
    const double range = saturation - black[c];
    const double clip_at = margin * range;
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        const double v = raw[c](y, x);
        if (!std::isfinite(v)) {
          img.valid(y, x) = false;
          continue;
        }
        const double shifted = v - black[c];
        if (v >= saturation || shifted >= clip_at) img.valid(y, x) = false;
        img.channel[c](y, x) = std::clamp(std::max(shifted, 0.0) / range, 0.0, 1.0);
      }
    }
  }
  return img;
}

namespace {

struct RawImage {
  std::array<Plane<double>, 3> planes;
  int bit_depth = 0;  // 0 = floating point
};

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
  throw Error(path.string() + ": " + what);
}

RawImage read_png(const fs::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) fail(path, "cannot open file");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) fail(path, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(path, "libpng initialization failed");
  }
  RawImage out;
  std::vector<png_byte> buffer;
  std::string error;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG data");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_RGB) error = "unsupported channel layout (need 3-channel RGB)";
  else if (depth != 8 && depth != 16) error = "unsupported bit depth " + std::to_string(depth);
  if (error.empty()) {
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * stride;
    png_read_image(png, rows.data());
    for (auto& p : out.planes) p.resize(h, w);
    for (png_uint_32 y = 0; y < h; ++y) {
      for (png_uint_32 x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          double v;
          if (depth == 16) {
            std::uint16_t s;
            std::memcpy(&s, rows[y] + (x * 3 + c) * 2, 2);
            v = s;
          } else {
            v = rows[y][x * 3 + c];
          }
          out.planes[c](y, x) = v;
        }
      }
    }
    out.bit_depth = depth;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!error.empty()) fail(path, error);
  return out;
}

RawImage read_tiff(const fs::path& path) {
  TIFFSetWarningHandler(nullptr);
  TIFFSetErrorHandler(nullptr);
  std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"), &TIFFClose);
  if (!tif) fail(path, "cannot open TIFF");
  std::uint32_t w = 0, h = 0;
  std::uint16_t spp = 1, bps = 1, planar = PLANARCONFIG_CONTIG, fmt = SAMPLEFORMAT_UINT;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
  if (spp != 3) fail(path, "unsupported channel count " + std::to_string(spp));
  if (bps != 8 && bps != 16) fail(path, "unsupported bit depth " + std::to_string(bps));
  if (fmt != SAMPLEFORMAT_UINT) fail(path, "unsupported sample format");
  if (w == 0 || h == 0) fail(path, "empty image");

  RawImage out;
  out.bit_depth = bps;
  for (auto& p : out.planes) p.resize(h, w);
  std::vector<unsigned char> line(TIFFScanlineSize(tif.get()));
  auto sample = [&](std::size_t i) -> double {
    if (bps == 16) {
      std::uint16_t s;
      std::memcpy(&s, line.data() + 2 * i, 2);
      return s;
    }
    return line[i];
  };
  if (planar == PLANARCONFIG_CONTIG) {
    for (std::uint32_t y = 0; y < h; ++y) {
      if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0) fail(path, "corrupt TIFF scanline");
      for (std::uint32_t x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) out.planes[c](y, x) = sample(std::size_t(x) * 3 + c);
    }
  } else {
    for (std::uint16_t c = 0; c < 3; ++c) {
      for (std::uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y, c) < 0) fail(path, "corrupt TIFF scanline");
        for (std::uint32_t x = 0; x < w; ++x) out.planes[c](y, x) = sample(x);
      }
    }
  }
  return out;
}

RawImage read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::string magic;
  long long w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || in.get() == EOF) fail(path, "malformed PFM header");
  if (magic == "Pf") fail(path, "unsupported channel count 1");
  if (magic != "PF") fail(path, "not a PFM file");
  if (w <= 0 || h <= 0 || scale == 0.0) fail(path, "malformed PFM header");
  const bool little = scale < 0.0;
  std::vector<std::uint32_t> words(std::size_t(w) * std::size_t(h) * 3);
  in.read(reinterpret_cast<char*>(words.data()), std::streamsize(words.size() * 4));
  if (in.gcount() != std::streamsize(words.size() * 4)) fail(path, "truncated PFM data");
  const bool swap = little != (std::endian::native == std::endian::little);
  RawImage out;
  for (auto& p : out.planes) p.resize(h, w);
  std::size_t i = 0;
  for (long long row = 0; row < h; ++row) {
    const long long y = h - 1 - row;
    for (long long x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        std::uint32_t bits = words[i++];
        if (swap) bits = __builtin_bswap32(bits);
        out.planes[c](y, x) = double(std::bit_cast<float>(bits));
      }
    }
  }
  return out;
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return e;
}

}  // namespace

LinearImage load_linear_image(const fs::path& path, const DecodeOptions& opts) {
  if (!fs::exists(path)) fail(path, "file does not exist");
  const std::string ext = lower_ext(path);
  RawImage raw;
  if (ext == ".png") raw = read_png(path);
  else if (ext == ".tif" || ext == ".tiff") raw = read_tiff(path);
  else if (ext == ".pfm") raw = read_pfm(path);
  else fail(path, "unsupported container '" + ext + "'");

  const Rgbd black = opts.black_level.value_or(Rgbd::Zero());
  LinearImage img;
  if (raw.bit_depth == 0 && !opts.saturation_level) {
    // Float maps are already normalized; anything above 1 counts as clipped.
    img = LinearImage(raw.planes[0].cols(), raw.planes[0].rows());
    for (int c = 0; c < 3; ++c) {
      const Plane<double> shifted = raw.planes[c] - black[c];
      img.valid = img.valid && shifted.isFinite() && (shifted <= 1.0);
      img.channel[c] = shifted.isFinite().select(shifted.cwiseMax(0.0).cwiseMin(1.0), 0.0);
    }
  } else {
    const double sat = opts.saturation_level.value_or(std::ldexp(1.0, raw.bit_depth) - 1.0);
    if (!(sat > black.maxCoeff())) fail(path, "saturation_level must exceed black_level");
    img = normalize_raw(raw.planes, black, sat, opts.saturation_margin);
  }
  check_linear_image(img);
  return img;
}

LinearImage apply_mask(const LinearImage& img, const std::vector<PixelRect>& rects) {
  LinearImage out = img;
  for (const PixelRect& r : rects) {
    if (r.x < 0 || r.y < 0 || r.w < 0 || r.h < 0 || r.x + r.w > img.width() || r.y + r.h > img.height()) {
      throw Error("mask rectangle (" + format_mask_rects({r}) + ") exceeds image bounds " +
                  std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    out.valid.block(r.y, r.x, r.h, r.w).setConstant(false);
  }
  return out;
}

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error(where + ": expected a number, got '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw Error(where + ": expected a number, got '" + text + "'");
  return v;
}

Rgbd parse_black_level(const std::string& text, const std::string& where) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ';', ' ');
  std::istringstream ss(t);
  std::vector<std::string> parts;
  for (std::string tok; ss >> tok;) parts.push_back(tok);
  if (parts.size() == 1) return Rgbd::Constant(parse_number(parts[0], where));
  if (parts.size() == 3)
    return {parse_number(parts[0], where), parse_number(parts[1], where), parse_number(parts[2], where)};
  throw Error(where + ": black_level needs 1 or 3 values");
}

void finalize_entry(ManifestEntry& e, const std::string& where) {
  if (e.image_path.empty()) throw Error(where + ": image_path is empty");
  if (!e.ground_truth_raw.allFinite() || !(e.ground_truth_raw.norm() > 0.0))
    throw Error(where + ": ground truth must have positive norm");
  e.ground_truth = e.ground_truth_raw.normalized();
  if (e.saturation_level) {
    const double black = e.black_level ? e.black_level->maxCoeff() : 0.0;
    if (!(*e.saturation_level > black)) throw Error(where + ": saturation_level must exceed black_level");
  }
}

std::vector<std::vector<std::string>> split_csv(const std::string& text, std::vector<int>& line_numbers) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  int line = 1;
  int row_line = 1;
  auto end_row = [&] {
    row.push_back(trim(field));
    field.clear();
    if (row_has_content || row.size() > 1 || !row[0].empty()) {
      rows.push_back(std::move(row));
      line_numbers.push_back(row_line);
    }
    row.clear();
    row_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
      row_has_content = true;
    } else if (ch == ',') {
      row.push_back(trim(field));
      field.clear();
    } else if (ch == '\n') {
      end_row();
      row_line = ++line;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw Error("manifest line " + std::to_string(row_line) + ": unterminated quote");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

std::vector<PixelRect> parse_mask_rects(const std::string& text) {
  std::vector<PixelRect> rects;
  std::stringstream all(text);
  for (std::string item; std::getline(all, item, ';');) {
    if (trim(item).empty()) continue;
    std::stringstream one(item);
    std::vector<int> v;
    for (std::string tok; std::getline(one, tok, ',');) {
      const double d = parse_number(tok, "mask");
      if (d != std::floor(d)) throw Error("mask: non-integer coordinate '" + tok + "'");
      v.push_back(int(d));
    }
    if (v.size() != 4) throw Error("mask: rectangle '" + item + "' needs x,y,w,h");
    if (v[2] < 0 || v[3] < 0 || v[0] < 0 || v[1] < 0) throw Error("mask: negative rectangle field in '" + item + "'");
    rects.push_back({v[0], v[1], v[2], v[3]});
  }
  return rects;
}

std::string format_mask_rects(const std::vector<PixelRect>& rects) {
  std::string s;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(rects[i].x) + ',' + std::to_string(rects[i].y) + ',' + std::to_string(rects[i].w) + ',' +
         std::to_string(rects[i].h);
  }
  return s;
}

DatasetManifest parse_manifest_csv(const std::string& text) {
  std::vector<int> lines;
  const auto rows = split_csv(text, lines);
  DatasetManifest m;
  if (rows.empty()) return m;
  const auto& header = rows[0];
  auto column = [&](const char* name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : int(it - header.begin());
  };
  const int c_path = column("image_path"), c_r = column("gt_r"), c_g = column("gt_g"), c_b = column("gt_b");
  const int c_mask = column("mask"), c_black = column("black_level"), c_sat = column("saturation_level");
  for (const auto* req : {"image_path", "gt_r", "gt_g", "gt_b"})
    if (column(req) < 0) throw Error("manifest line 1: missing required column '" + std::string(req) + "'");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "manifest line " + std::to_string(lines[r]);
    if (row.size() > header.size()) throw Error(where + ": more fields than header columns");
    auto field = [&](int c) -> std::string { return c >= 0 && std::size_t(c) < row.size() ? row[c] : ""; };
    ManifestEntry e;
    e.image_path = field(c_path);
    e.ground_truth_raw = {parse_number(field(c_r), where + " field gt_r"),
                          parse_number(field(c_g), where + " field gt_g"),
                          parse_number(field(c_b), where + " field gt_b")};
    if (!field(c_mask).empty()) {
      try {
        e.mask_rects = parse_mask_rects(field(c_mask));
      } catch (const Error& err) {
        throw Error(where + " field mask: " + err.what());
      }
    }
    if (!field(c_black).empty()) e.black_level = parse_black_level(field(c_black), where + " field black_level");
    if (!field(c_sat).empty()) e.saturation_level = parse_number(field(c_sat), where + " field saturation_level");
    finalize_entry(e, where);
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest parse_manifest_json(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("manifest JSON: ") + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw Error("manifest JSON: missing 'entries'");
    list = &doc["entries"];
  }
  if (!list->is_array()) throw Error("manifest JSON: entries must be an array");
  DatasetManifest m;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& j = (*list)[i];
    const std::string where = "manifest entry " + std::to_string(i);
    if (!j.is_object()) throw Error(where + ": expected an object");
    auto num = [&](const char* key) -> double {
      if (!j.contains(key) || !j[key].is_number()) throw Error(where + " field " + key + ": expected a number");
      return j[key].get<double>();
    };
    ManifestEntry e;
    if (!j.contains("image_path") || !j["image_path"].is_string())
      throw Error(where + " field image_path: expected a string");
    e.image_path = j["image_path"].get<std::string>();
    e.ground_truth_raw = {num("gt_r"), num("gt_g"), num("gt_b")};
    if (j.contains("mask") && !j["mask"].is_null()) {
      const json& mk = j["mask"];
      if (mk.is_string()) {
        e.mask_rects = parse_mask_rects(mk.get<std::string>());
      } else if (mk.is_array()) {
        for (const json& r : mk) {
          if (!r.is_array() || r.size() != 4) throw Error(where + " field mask: rectangles need [x,y,w,h]");
          e.mask_rects.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
        }
      } else {
        throw Error(where + " field mask: expected string or array");
      }
    }
    if (j.contains("black_level") && !j["black_level"].is_null()) {
      const json& b = j["black_level"];
      if (b.is_number()) e.black_level = Rgbd::Constant(b.get<double>());
      else if (b.is_array() && b.size() == 3) e.black_level = Rgbd(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
      else throw Error(where + " field black_level: expected number or 3-array");
    }
    if (j.contains("saturation_level") && !j["saturation_level"].is_null()) e.saturation_level = num("saturation_level");
    finalize_entry(e, where);
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open manifest");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return lower_ext(path) == ".json" ? parse_manifest_json(ss.str()) : parse_manifest_csv(ss.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_pfm(const fs::path& path, const RgbField<double>& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << "PF\n" << img.width() << ' ' << img.height() << "\n-1.0\n";
  std::vector<float> row(std::size_t(img.width()) * 3);
  for (Eigen::Index y = img.height() - 1; y >= 0; --y) {
    for (Eigen::Index x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) row[std::size_t(x) * 3 + c] = float(img.channel[c](y, x));
    if constexpr (std::endian::native != std::endian::little) {
      for (float& f : row) f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw Error(path.string() + ": write failed");
}

void write_png16(const fs::path& path, const RgbField<double>& img) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(path.string() + ": cannot write file");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }
  const std::size_t w = std::size_t(img.width());
  std::vector<png_byte> row(w * 6);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(path.string() + ": PNG encoding failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, png_uint_32(w), png_uint_32(img.height()), 16, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Eigen::Index y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(img.channel[c](y, Eigen::Index(x)), 0.0, 1.0);
        const auto s = std::uint16_t(std::lround(v * 65535.0));
        row[(x * 3 + c) * 2] = png_byte(s >> 8);
        row[(x * 3 + c) * 2 + 1] = png_byte(s & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace graypixel
