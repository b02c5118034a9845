#include <graypixel/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace graypixel {

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  const double pos = q * double(sorted.size() - 1);
  const auto lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EvalStats summarize(std::span<const double> errors) {
  if (errors.empty()) throw Error("summarize: no errors to summarize");
  std::vector<double> s(errors.begin(), errors.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  EvalStats st;
  st.count = n;
  st.mean = std::accumulate(s.begin(), s.end(), 0.0) / double(n);
  st.median = sorted_quantile(s, 0.5);
  st.trimean = (sorted_quantile(s, 0.25) + 2.0 * st.median + sorted_quantile(s, 0.75)) / 4.0;
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  st.best25 = std::accumulate(s.begin(), s.begin() + std::ptrdiff_t(q), 0.0) / double(q);
  st.worst25 = std::accumulate(s.end() - std::ptrdiff_t(q), s.end(), 0.0) / double(q);
  return st;
}

}  // namespace graypixel
