// AVX2 variants. Compiled with per-function target attributes so the rest of
// the library keeps the baseline ISA and the dispatcher can fall back to the
// scalar path on older CPUs.

#include "polarnet/kernels.hpp"

#if defined(POLARNET_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <algorithm>

#define POLARNET_AVX2 __attribute__((target("avx2")))

namespace polarnet::kernels::avx2 {

namespace {

POLARNET_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

POLARNET_AVX2 MinMax minmax(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  const double* p = values.data();
  std::size_t i = 0;
  MinMax out{p[0], p[0]};
  if (n >= 4) {
    __m256d vmin = _mm256_loadu_pd(p);
    __m256d vmax = vmin;
    for (i = 4; i + 4 <= n; i += 4) {
      const __m256d v = _mm256_loadu_pd(p + i);
      vmin = _mm256_min_pd(vmin, v);
      vmax = _mm256_max_pd(vmax, v);
    }
    alignas(32) double lo[4], hi[4];
    _mm256_store_pd(lo, vmin);
    _mm256_store_pd(hi, vmax);
    out.min = std::min(std::min(lo[0], lo[1]), std::min(lo[2], lo[3]));
    out.max = std::max(std::max(hi[0], hi[1]), std::max(hi[2], hi[3]));
  }
  for (; i < n; ++i) {
    out.min = std::min(out.min, p[i]);
    out.max = std::max(out.max, p[i]);
  }
  return out;
}

POLARNET_AVX2 void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg,
                           double pos_max, double neg_abs_max, std::span<double> scaled_pos,
                           std::span<double> scaled_neg, std::span<double> score) {
  const std::size_t n = raw_pos.size();
  const bool use_pos = pos_max > 0.0;
  const bool use_neg = neg_abs_max > 0.0;
  const __m256d five = _mm256_set1_pd(5.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d pdiv = _mm256_set1_pd(use_pos ? pos_max : 1.0);
  const __m256d ndiv = _mm256_set1_pd(use_neg ? neg_abs_max : 1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = use_pos ? _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(&raw_pos[i]), five), pdiv)
                        : zero;
    __m256d q = use_neg ? _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(&raw_neg[i]), five), ndiv)
                        : zero;
    _mm256_storeu_pd(&scaled_pos[i], p);
    _mm256_storeu_pd(&scaled_neg[i], q);
    _mm256_storeu_pd(&score[i], _mm256_add_pd(p, q));
  }
  for (; i < n; ++i) {
    const double p = use_pos ? (raw_pos[i] * 5.0) / pos_max : 0.0;
    const double q = use_neg ? (raw_neg[i] * 5.0) / neg_abs_max : 0.0;
    scaled_pos[i] = p;
    scaled_neg[i] = q;
    score[i] = p + q;
  }
}

POLARNET_AVX2 Moments moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  m.n = x.size();
  if (m.n == 0) return m;
  const std::size_t n = m.n;
  std::size_t i = 0;
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    ax = _mm256_add_pd(ax, _mm256_loadu_pd(&x[i]));
    ay = _mm256_add_pd(ay, _mm256_loadu_pd(&y[i]));
  }
  double sx = hsum(ax), sy = hsum(ay);
  for (; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  m.mean_x = sx / static_cast<double>(n);
  m.mean_y = sy / static_cast<double>(n);

  const __m256d mx = _mm256_set1_pd(m.mean_x);
  const __m256d my = _mm256_set1_pd(m.mean_y);
  __m256d axx = _mm256_setzero_pd();
  __m256d ayy = _mm256_setzero_pd();
  __m256d axy = _mm256_setzero_pd();
  for (i = 0; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), mx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), my);
    axx = _mm256_add_pd(axx, _mm256_mul_pd(dx, dx));
    ayy = _mm256_add_pd(ayy, _mm256_mul_pd(dy, dy));
    axy = _mm256_add_pd(axy, _mm256_mul_pd(dx, dy));
  }
  m.sxx = hsum(axx);
  m.syy = hsum(ayy);
  m.sxy = hsum(axy);
  for (; i < n; ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

POLARNET_AVX2 void pair_histogram(std::span<const std::uint32_t> src,
                                  std::span<const std::uint32_t> dst,
                                  std::span<const std::int32_t> labels, int classes,
                                  std::span<std::uint64_t> counts) {
  std::fill(counts.begin(), counts.end(), 0);
  const std::size_t n = src.size();
  const int* base = labels.data();
  const __m256i k = _mm256_set1_epi32(classes);
  const __m256i neg_one = _mm256_set1_epi32(-1);
  alignas(32) std::int32_t codes[8];
  std::size_t e = 0;
  for (; e + 8 <= n; e += 8) {
    const __m256i si = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&src[e]));
    const __m256i di = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&dst[e]));
    const __m256i a = _mm256_i32gather_epi32(base, si, 4);
    const __m256i b = _mm256_i32gather_epi32(base, di, 4);
    // valid lanes: 0 <= a < k and 0 <= b < k
    const __m256i valid = _mm256_and_si256(
        _mm256_and_si256(_mm256_cmpgt_epi32(a, neg_one), _mm256_cmpgt_epi32(k, a)),
        _mm256_and_si256(_mm256_cmpgt_epi32(b, neg_one), _mm256_cmpgt_epi32(k, b)));
    const __m256i code = _mm256_add_epi32(_mm256_mullo_epi32(a, k), b);
    _mm256_store_si256(reinterpret_cast<__m256i*>(codes), _mm256_blendv_epi8(neg_one, code, valid));
    for (int lane = 0; lane < 8; ++lane)
      if (codes[lane] >= 0) ++counts[static_cast<std::size_t>(codes[lane])];
  }
  for (; e < n; ++e) {
    const std::int32_t a = labels[src[e]];
    const std::int32_t b = labels[dst[e]];
    if (a < 0 || b < 0 || a >= classes || b >= classes) continue;
    ++counts[static_cast<std::size_t>(a) * classes + b];
  }
}

}  // namespace polarnet::kernels::avx2

#endif
