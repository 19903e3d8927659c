#include "polarnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polarnet::kernels::scalar {

MinMax minmax(std::span<const double> values) {
  if (values.empty()) return {};
  MinMax out{values[0], values[0]};
  for (double v : values) {
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  }
  return out;
}

void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score) {
  const std::size_t n = raw_pos.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pos_max > 0.0 ? (raw_pos[i] * 5.0) / pos_max : 0.0;
    const double q = neg_abs_max > 0.0 ? (raw_neg[i] * 5.0) / neg_abs_max : 0.0;
    scaled_pos[i] = p;
    scaled_neg[i] = q;
    score[i] = p + q;
  }
}

Moments moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  m.n = x.size();
  if (m.n == 0) return m;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  m.mean_x = sx / static_cast<double>(m.n);
  m.mean_y = sy / static_cast<double>(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

void pair_histogram(std::span<const std::uint32_t> src, std::span<const std::uint32_t> dst,
                    std::span<const std::int32_t> labels, int classes,
                    std::span<std::uint64_t> counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t e = 0; e < src.size(); ++e) {
    const std::int32_t a = labels[src[e]];
    const std::int32_t b = labels[dst[e]];
    if (a < 0 || b < 0 || a >= classes || b >= classes) continue;
    ++counts[static_cast<std::size_t>(a) * classes + b];
  }
}

}  // namespace polarnet::kernels::scalar
