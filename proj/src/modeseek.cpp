#include <graypixel/modeseek.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace graypixel {

double mode_distance(const Rgbd& a, const Rgbd& b, DistanceKind kind) {
  return kind == DistanceKind::hybrid ? hybrid_distance(a, b) : vector_angle(a, b);
}

std::vector<Rgbd> rgb_of(const PixelSet& points) {
  std::vector<Rgbd> out;
  out.reserve(points.size());
  for (const auto& p : points.points) out.push_back(p.rgb);
  return out;
}

namespace {

bool lex_less(const Rgbd& a, const Rgbd& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

/// Neighbourhood queries against a fixed point cloud. The chord between unit
/// vectors never exceeds their angle, which gives a trig-free rejection test.
class NeighbourQuery {
 public:
  NeighbourQuery(std::span<const Rgbd> pts, double h, DistanceKind kind) : pts_(pts), h_(h), kind_(kind) {
    unit_.reserve(pts.size());
    for (const Rgbd& p : pts) unit_.push_back(p.normalized());
  }

  bool within(const Rgbd& pos, const Rgbd& pos_unit, std::size_t i) const {
    const double slack = h_ * (1.0 + 1e-9);
    const double chord = (pos_unit - unit_[i]).norm();
    if (kind_ == DistanceKind::hybrid) {
      const double euclid = (pos - pts_[i]).norm();
      if (euclid * chord > slack) return false;
    } else if (chord > slack) {
      return false;
    }
    return mode_distance(pos, pts_[i], kind_) <= h_;
  }

  /// Mean of the points within the bandwidth; false when the window is empty.
  bool window_mean(const Rgbd& pos, Rgbd& mean) const {
    const Rgbd u = pos.normalized();
    Rgbd acc = Rgbd::Zero();
    std::size_t n = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (within(pos, u, i)) {
        acc += pts_[i];
        ++n;
      }
    }
    if (n == 0) return false;
    mean = acc / double(n);
    return true;
  }

 private:
  std::span<const Rgbd> pts_;
  std::vector<Rgbd> unit_;
  double h_;
  DistanceKind kind_;
};

void sort_modes(ModeResult& r, std::vector<std::size_t>& order_keys) {
  std::vector<std::size_t> idx(r.modes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Mode& ma = r.modes[a];
    const Mode& mb = r.modes[b];
    if (ma.support != mb.support) return ma.support > mb.support;
    if (ma.members != mb.members) return ma.members > mb.members;
    return order_keys[a] < order_keys[b];
  });
  std::vector<std::size_t> remap(idx.size());
  std::vector<Mode> sorted;
  sorted.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    remap[idx[i]] = i;
    sorted.push_back(r.modes[idx[i]]);
  }
  r.modes = std::move(sorted);
  for (auto& a : r.assignments) a = remap[a];
}

}  // namespace

ModeResult mean_shift(std::span<const Rgbd> input, const MeanShiftOptions& opts) {
  if (!(opts.bandwidth > 0.0)) throw Error("mean_shift: bandwidth must be positive");
  if (input.empty()) throw Error("mean_shift: empty point set");
  for (const Rgbd& p : input)
    if (!(p.norm() > 0.0) || !p.allFinite()) throw Error("mean_shift: points need positive finite norm");

  // Work in a canonical order so the floating-point sums do not depend on input order.
  const std::size_t n = input.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lex_less(input[a], input[b]); });
  std::vector<Rgbd> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = input[order[i]];

  const NeighbourQuery query(pts, opts.bandwidth, opts.distance);
  std::vector<Rgbd> converged(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rgbd pos = pts[i];
    for (int it = 0; it < opts.max_iter; ++it) {
      Rgbd next;
      if (!query.window_mean(pos, next)) break;
      const double shift = (next - pos).norm();
      pos = next;
      if (shift < opts.tol) break;
    }
    converged[i] = pos;
  }

  ModeResult r;
  std::vector<Rgbd> representative;
  std::vector<Rgbd> sums;
  std::vector<std::size_t> canonical_assign(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (; m < representative.size(); ++m)
      if (mode_distance(converged[i], representative[m], opts.distance) <= opts.bandwidth) break;
    if (m == representative.size()) {
      representative.push_back(converged[i]);
      sums.push_back(Rgbd::Zero());
      r.modes.emplace_back();
    }
    sums[m] += converged[i];
    ++r.modes[m].members;
    canonical_assign[i] = m;
  }
  for (std::size_t m = 0; m < r.modes.size(); ++m) {
    Mode& mode = r.modes[m];
    mode.centroid = sums[m] / double(mode.members);
    for (const Rgbd& p : pts)
      if (mode_distance(mode.centroid, p, opts.distance) <= opts.bandwidth) ++mode.support;
    mode.density = double(mode.support) / double(n);
  }
  r.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.assignments[order[i]] = canonical_assign[i];

  std::vector<std::size_t> creation(r.modes.size());
  std::iota(creation.begin(), creation.end(), 0);
  sort_modes(r, creation);
  return r;
}

ModeResult mean_shift(const PixelSet& points, const MeanShiftOptions& opts) {
  const auto rgb = rgb_of(points);
  return mean_shift(std::span<const Rgbd>(rgb), opts);
}

Rgbd pick_illuminant(const ModeResult& result) {
  if (result.modes.empty()) throw Error("pick_illuminant: no modes");
  std::size_t best = 0;
  for (std::size_t m = 1; m < result.modes.size(); ++m) {
    const Mode& a = result.modes[m];
    const Mode& b = result.modes[best];
    if (a.density > b.density || (a.density == b.density && a.members > b.members)) best = m;
  }
  return normalized_or_throw(result.modes[best].centroid, "pick_illuminant");
}

namespace {

struct KMeansRun {
  std::vector<Rgbd> centers;
  std::vector<std::size_t> assign;
  double wcss = std::numeric_limits<double>::infinity();
};

std::vector<Rgbd> seed_plus_plus(std::span<const Rgbd> pts, int k, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  std::vector<Rgbd> centers;
  std::vector<bool> taken(n, false);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  centers.push_back(pts[pick]);
  taken[pick] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (pts[i] - centers[0]).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (int(centers.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    } else {
      // Every remaining point coincides with a center: take the first unused one.
      pick = std::size_t(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    taken[pick] = true;
    centers.push_back(pts[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pts[i] - centers.back()).squaredNorm());
  }
  return centers;
}

KMeansRun lloyd(std::span<const Rgbd> pts, std::vector<Rgbd> centers, int max_iter) {
  const std::size_t n = pts.size();
  const std::size_t k = centers.size();
  KMeansRun run;
  run.assign.assign(n, k);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = (pts[i] - centers[0]).squaredNorm();
      for (std::size_t c = 1; c < k; ++c) {
        const double d = (pts[i] - centers[c]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (run.assign[i] != best) {
        run.assign[i] = best;
        changed = true;
      }
    }
    std::vector<Rgbd> sums(k, Rgbd::Zero());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[run.assign[i]] += pts[i];
      ++counts[run.assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0) centers[c] = sums[c] / double(counts[c]);
    if (!changed) break;
  }
  run.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) run.wcss += (pts[i] - centers[run.assign[i]]).squaredNorm();
  run.centers = std::move(centers);
  return run;
}

}  // namespace

ModeResult kmeans(std::span<const Rgbd> pts, const KMeansOptions& opts) {
  if (pts.empty()) throw Error("kmeans: empty point set");
  if (opts.k < 1 || std::size_t(opts.k) > pts.size())
    throw Error("kmeans: k must lie in [1, " + std::to_string(pts.size()) + "], got " + std::to_string(opts.k));
  if (opts.restarts < 1) throw Error("kmeans: restarts must be positive");
  std::mt19937_64 rng(opts.seed);
  KMeansRun best;
  for (int r = 0; r < opts.restarts; ++r) {
    KMeansRun run = lloyd(pts, seed_plus_plus(pts, opts.k, rng), opts.max_iter);
    if (run.wcss < best.wcss) best = std::move(run);
  }

  ModeResult out;
  std::vector<std::size_t> remap(best.centers.size(), 0);
  std::vector<std::size_t> counts(best.centers.size(), 0);
  for (std::size_t a : best.assign) ++counts[a];
  std::vector<std::size_t> keys;
  for (std::size_t c = 0; c < best.centers.size(); ++c) {
    if (counts[c] == 0) continue;
    remap[c] = out.modes.size();
    Mode m;
    m.centroid = best.centers[c];
    m.members = m.support = counts[c];
    m.density = double(counts[c]) / double(pts.size());
    out.modes.push_back(m);
    keys.push_back(c);
  }
  out.assignments.reserve(pts.size());
  for (std::size_t a : best.assign) out.assignments.push_back(remap[a]);
  sort_modes(out, keys);
  return out;
}

ModeResult kmeans(const PixelSet& points, const KMeansOptions& opts) {
  const auto rgb = rgb_of(points);
  return kmeans(std::span<const Rgbd>(rgb), opts);
}

}  // namespace graypixel
