#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polarnet/kernels.hpp"

namespace polarnet::kernels {

namespace {

Isa probe() {
#if defined(POLARNET_HAVE_AVX2_KERNELS)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
#if defined(POLARNET_HAVE_NEON_KERNELS)
  return Isa::neon;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{probe()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
  return isa == detected_isa();
}

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("kernel variant not supported on this CPU: " +
                                std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void reset_isa() { current().store(detected_isa(), std::memory_order_relaxed); }

MinMax minmax(std::span<const double> values) {
  switch (active_isa()) {
#if defined(POLARNET_HAVE_AVX2_KERNELS)
    case Isa::avx2: return avx2::minmax(values);
#endif
#if defined(POLARNET_HAVE_NEON_KERNELS)
    case Isa::neon: return neon::minmax(values);
#endif
    default: return scalar::minmax(values);
  }
}

void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score) {
  if (raw_neg.size() != raw_pos.size() || scaled_pos.size() != raw_pos.size() ||
      scaled_neg.size() != raw_pos.size() || score.size() != raw_pos.size())
    throw std::invalid_argument("rescale: span sizes differ");
  switch (active_isa()) {
#if defined(POLARNET_HAVE_AVX2_KERNELS)
    case Isa::avx2:
      return avx2::rescale(raw_pos, raw_neg, pos_max, neg_abs_max, scaled_pos, scaled_neg, score);
#endif
#if defined(POLARNET_HAVE_NEON_KERNELS)
    case Isa::neon:
      return neon::rescale(raw_pos, raw_neg, pos_max, neg_abs_max, scaled_pos, scaled_neg, score);
#endif
    default:
      return scalar::rescale(raw_pos, raw_neg, pos_max, neg_abs_max, scaled_pos, scaled_neg,
                             score);
  }
}

Moments moments(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("moments: span sizes differ");
  switch (active_isa()) {
#if defined(POLARNET_HAVE_AVX2_KERNELS)
    case Isa::avx2: return avx2::moments(x, y);
#endif
#if defined(POLARNET_HAVE_NEON_KERNELS)
    case Isa::neon: return neon::moments(x, y);
#endif
    default: return scalar::moments(x, y);
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const Moments m = moments(x, y);
  if (m.n < 2 || !(m.sxx > 0.0) || !(m.syy > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return m.sxy / std::sqrt(m.sxx * m.syy);
}

void pair_histogram(std::span<const std::uint32_t> src, std::span<const std::uint32_t> dst,
                    std::span<const std::int32_t> labels, int classes,
                    std::span<std::uint64_t> counts) {
  if (src.size() != dst.size()) throw std::invalid_argument("pair_histogram: src/dst differ");
  if (classes <= 0 || counts.size() != static_cast<std::size_t>(classes) * classes)
    throw std::invalid_argument("pair_histogram: counts must hold classes^2 entries");
  switch (active_isa()) {
#if defined(POLARNET_HAVE_AVX2_KERNELS)
    case Isa::avx2: return avx2::pair_histogram(src, dst, labels, classes, counts);
#endif
    default: return scalar::pair_histogram(src, dst, labels, classes, counts);
  }
}

}  // namespace polarnet::kernels
