#include <graypixel/contrast.hpp>

#include <cmath>
#include <numbers>

namespace graypixel {

LogKernel make_log_kernel(int size, double sigma) {
  if (size < 3 || size % 2 == 0) throw Error("LoG kernel size must be odd and >= 3, got " + std::to_string(size));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("LoG sigma must be positive");
  LogKernel k;
  k.size = size;
  k.sigma = sigma;
  k.coefficients.resize(size, size);
  const int r = size / 2;
  const double s2 = sigma * sigma;
  const double scale = -1.0 / (std::numbers::pi * s2 * s2);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double q = double(dx * dx + dy * dy) / (2.0 * s2);
      k.coefficients(dy + r, dx + r) = scale * (1.0 - q) * std::exp(-q);
    }
  }
  k.coefficients -= k.coefficients.mean();
  return k;
}

LogImage log_transform(const LinearImage& img, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("log epsilon must be positive");
  LogImage out(img.width(), img.height());
  out.valid = img.valid;
  for (int c = 0; c < 3; ++c)
    out.channel[c] = img.valid.select(img.channel[c].cwiseMax(epsilon).log(), 0.0);
  return out;
}

Plane<int> invalid_in_window(const Mask& valid, int radius, bool outside_valid) {
  const Eigen::Index h = valid.rows();
  const Eigen::Index w = valid.cols();
  const int outside = outside_valid ? 0 : 1;
  Plane<int> bad = (!valid).cast<int>();
  Plane<int> horiz(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      int n = 0;
      for (Eigen::Index dx = -radius; dx <= radius; ++dx) {
        const Eigen::Index xx = x + dx;
        n += (xx < 0 || xx >= w) ? outside : bad(y, xx);
      }
      horiz(y, x) = n;
    }
  }
  const int width = 2 * radius + 1;
  Plane<int> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      int n = 0;
      for (Eigen::Index dy = -radius; dy <= radius; ++dy) {
        const Eigen::Index yy = y + dy;
        n += (yy < 0 || yy >= h) ? outside * width : horiz(yy, x);
      }
      out(y, x) = n;
    }
  }
  return out;
}

ContrastMap local_contrast(const RgbField<double>& logimg, const LogKernel& kernel) {
  const Eigen::Index h = logimg.height();
  const Eigen::Index w = logimg.width();
  if (h < kernel.size || w < kernel.size)
    throw Error("image " + std::to_string(w) + "x" + std::to_string(h) + " is smaller than the " +
                std::to_string(kernel.size) + "x" + std::to_string(kernel.size) + " contrast kernel");
  const int r = kernel.radius();
  ContrastMap out(w, h);
  out.valid = invalid_in_window(logimg.valid, r) == 0;
  for (int c = 0; c < 3; ++c) {
    const Plane<double>& src = logimg.channel[c];
    Plane<double>& dst = out.channel[c];
    for (Eigen::Index y = r; y < h - r; ++y) {
      for (Eigen::Index x = r; x < w - r; ++x) {
        if (!out.valid(y, x)) continue;
        double acc = 0.0;
        for (int ky = 0; ky < kernel.size; ++ky) {
          const double* row = &src(y - r + ky, x - r);
          for (int kx = 0; kx < kernel.size; ++kx) acc += kernel.coefficients(ky, kx) * row[kx];
        }
        dst(y, x) = acc;
      }
    }
  }
  return out;
}

}  // namespace graypixel
