#include "polarnet/kernels.hpp"

#if defined(POLARNET_HAVE_NEON_KERNELS)

#include <arm_neon.h>

#include <algorithm>

namespace polarnet::kernels::neon {

MinMax minmax(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  const double* p = values.data();
  MinMax out{p[0], p[0]};
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t vmin = vld1q_f64(p);
    float64x2_t vmax = vmin;
    for (i = 2; i + 2 <= n; i += 2) {
      const float64x2_t v = vld1q_f64(p + i);
      vmin = vminq_f64(vmin, v);
      vmax = vmaxq_f64(vmax, v);
    }
    out.min = vminvq_f64(vmin);
    out.max = vmaxvq_f64(vmax);
  }
  for (; i < n; ++i) {
    out.min = std::min(out.min, p[i]);
    out.max = std::max(out.max, p[i]);
  }
  return out;
}

void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score) {
  const std::size_t n = raw_pos.size();
  const bool use_pos = pos_max > 0.0;
  const bool use_neg = neg_abs_max > 0.0;
  const float64x2_t five = vdupq_n_f64(5.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t pdiv = vdupq_n_f64(use_pos ? pos_max : 1.0);
  const float64x2_t ndiv = vdupq_n_f64(use_neg ? neg_abs_max : 1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = use_pos ? vdivq_f64(vmulq_f64(vld1q_f64(&raw_pos[i]), five), pdiv) : zero;
    const float64x2_t q = use_neg ? vdivq_f64(vmulq_f64(vld1q_f64(&raw_neg[i]), five), ndiv) : zero;
    vst1q_f64(&scaled_pos[i], p);
    vst1q_f64(&scaled_neg[i], q);
    vst1q_f64(&score[i], vaddq_f64(p, q));
  }
  for (; i < n; ++i) {
    const double p = use_pos ? (raw_pos[i] * 5.0) / pos_max : 0.0;
    const double q = use_neg ? (raw_neg[i] * 5.0) / neg_abs_max : 0.0;
    scaled_pos[i] = p;
    scaled_neg[i] = q;
    score[i] = p + q;
  }
}

Moments moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  m.n = x.size();
  if (m.n == 0) return m;
  const std::size_t n = m.n;
  std::size_t i = 0;
  float64x2_t ax = vdupq_n_f64(0.0), ay = vdupq_n_f64(0.0);
  for (; i + 2 <= n; i += 2) {
    ax = vaddq_f64(ax, vld1q_f64(&x[i]));
    ay = vaddq_f64(ay, vld1q_f64(&y[i]));
  }
  double sx = vaddvq_f64(ax), sy = vaddvq_f64(ay);
  for (; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  m.mean_x = sx / static_cast<double>(n);
  m.mean_y = sy / static_cast<double>(n);
  const float64x2_t mx = vdupq_n_f64(m.mean_x), my = vdupq_n_f64(m.mean_y);
  float64x2_t axx = vdupq_n_f64(0.0), ayy = vdupq_n_f64(0.0), axy = vdupq_n_f64(0.0);
  for (i = 0; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(&x[i]), mx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(&y[i]), my);
    axx = vaddq_f64(axx, vmulq_f64(dx, dx));
    ayy = vaddq_f64(ayy, vmulq_f64(dy, dy));
    axy = vaddq_f64(axy, vmulq_f64(dx, dy));
  }
  m.sxx = vaddvq_f64(axx);
  m.syy = vaddvq_f64(ayy);
  m.sxy = vaddvq_f64(axy);
  for (; i < n; ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace polarnet::kernels::neon

#endif
