#pragma once

// Data-parallel inner loops shared by the sentiment and null-model code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at runtime from the CPU feature bits; force_isa() overrides it
// so tests can compare each variant against the scalar reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace polarnet::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Best variant supported by this CPU.
Isa detected_isa();

/// Variant currently used by the dispatching entry points.
Isa active_isa();

/// Pins the dispatch to `isa`. Throws std::invalid_argument if the CPU
/// cannot run it.
void force_isa(Isa isa);

/// Restores the detected variant.
void reset_isa();

bool isa_supported(Isa isa);

struct MinMax {
  double min = 0.0;
  double max = 0.0;
};

/// Min and max of `values`; {0, 0} when empty.
MinMax minmax(std::span<const double> values);

/// Maps raw positive/negative sums onto [0, 5] and [-5, 0]:
///   scaled_pos[i] = raw_pos[i] * 5 / pos_max        (0 when pos_max == 0)
///   scaled_neg[i] = raw_neg[i] * 5 / neg_abs_max    (0 when neg_abs_max == 0)
///   score[i]      = scaled_pos[i] + scaled_neg[i]
/// Each element is computed with the same three IEEE operations in every
/// variant, so all variants agree bit for bit.
void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score);

struct Moments {
  std::size_t n = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;  // centred sums
  double syy = 0.0;
  double sxy = 0.0;
};

/// Two-pass centred second moments of paired samples. Variants differ only
/// in summation order (agreement to ~1e-12 relative).
Moments moments(std::span<const double> x, std::span<const double> y);

/// Pearson correlation from moments; NaN when either variance is zero or
/// fewer than two samples.
double pearson(std::span<const double> x, std::span<const double> y);

/// counts[labels[src[e]] * classes + labels[dst[e]]] += 1 for every edge e
/// whose endpoint labels are both in [0, classes). `counts` must hold
/// classes * classes entries and is overwritten. Integer output, so all
/// variants agree exactly.
void pair_histogram(std::span<const std::uint32_t> src, std::span<const std::uint32_t> dst,
                    std::span<const std::int32_t> labels, int classes,
                    std::span<std::uint64_t> counts);

// Individual variants, exposed for equivalence tests.
namespace scalar {
MinMax minmax(std::span<const double> values);
void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score);
Moments moments(std::span<const double> x, std::span<const double> y);
void pair_histogram(std::span<const std::uint32_t> src, std::span<const std::uint32_t> dst,
                    std::span<const std::int32_t> labels, int classes,
                    std::span<std::uint64_t> counts);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define POLARNET_HAVE_AVX2_KERNELS 1
namespace avx2 {
MinMax minmax(std::span<const double> values);
void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score);
Moments moments(std::span<const double> x, std::span<const double> y);
void pair_histogram(std::span<const std::uint32_t> src, std::span<const std::uint32_t> dst,
                    std::span<const std::int32_t> labels, int classes,
                    std::span<std::uint64_t> counts);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define POLARNET_HAVE_NEON_KERNELS 1
namespace neon {
MinMax minmax(std::span<const double> values);
void rescale(std::span<const double> raw_pos, std::span<const double> raw_neg, double pos_max,
             double neg_abs_max, std::span<double> scaled_pos, std::span<double> scaled_neg,
             std::span<double> score);
Moments moments(std::span<const double> x, std::span<const double> y);
}  // namespace neon
#endif

}  // namespace polarnet::kernels
