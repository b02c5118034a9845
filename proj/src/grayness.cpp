#include <graypixel/grayness.hpp>

namespace graypixel {

Plane<double> masked_box_mean(const Plane<double>& values, const Mask& valid, int window) {
  if (window < 1 || window % 2 == 0) throw Error("smooth window must be odd and >= 1");
  const Eigen::Index h = values.rows();
  const Eigen::Index w = values.cols();
  const Eigen::Index r = window / 2;
  const Plane<double> v = valid.select(values, 0.0);
  const Plane<double> n = valid.cast<double>();
  Plane<double> hv(h, w), hn(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double sv = 0.0, sn = 0.0;
      const Eigen::Index x0 = std::max<Eigen::Index>(0, x - r), x1 = std::min(w - 1, x + r);
      for (Eigen::Index xx = x0; xx <= x1; ++xx) {
        sv += v(y, xx);
        sn += n(y, xx);
      }
      hv(y, x) = sv;
      hn(y, x) = sn;
    }
  }
  Plane<double> out = Plane<double>::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index y0 = std::max<Eigen::Index>(0, y - r), y1 = std::min(h - 1, y + r);
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!valid(y, x)) continue;
      double sv = 0.0, sn = 0.0;
      for (Eigen::Index yy = y0; yy <= y1; ++yy) {
        sv += hv(yy, x);
        sn += hn(yy, x);
      }
      out(y, x) = sv / sn;
    }
  }
  return out;
}

void quantize_grayness(GraynessMap& gmap, double quantum) {
  if (quantum <= 0.0) return;
  gmap.g = gmap.valid.select((gmap.g / quantum).floor() * quantum, gmap.g);
}

GraynessMap grayness_map(const ContrastMap& cmap, const GraynessConfig& cfg) {
  if (!(cfg.contrast_floor >= 0.0)) throw Error("contrast floor must be nonnegative");
  GraynessMap out;
  out.g = Plane<double>::Zero(cmap.height(), cmap.width());
  out.valid = cmap.valid;
  for (Eigen::Index y = 0; y < cmap.height(); ++y) {
    for (Eigen::Index x = 0; x < cmap.width(); ++x) {
      if (!out.valid(y, x)) continue;
      const Rgbd d = cmap.rgb(x, y);
      const double l2 = d.norm();
      if (!(l2 >= cfg.contrast_floor) || l2 == 0.0) {
        out.valid(y, x) = false;
        continue;
      }
      out.g(y, x) = cfg.measure == GraynessMeasure::theta ? grayness_theta(d) : grayness_sigma(d);
    }
  }
  if (cfg.smooth_window > 1) out.g = masked_box_mean(out.g, out.valid, cfg.smooth_window);
  quantize_grayness(out, cfg.quantum);
  return out;
}

void weaken_dark_pixels(GraynessMap& gmap, const LinearImage& img, double epsilon) {
  const Plane<double> lum = (img.channel[0] + img.channel[1] + img.channel[2]) / 3.0;
  gmap.g = gmap.valid.select(gmap.g / lum.cwiseMax(epsilon), gmap.g);
}

}  // namespace graypixel
