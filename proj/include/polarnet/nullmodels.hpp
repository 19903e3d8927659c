#pragma once

// Monte Carlo randomization tests that keep the network topology fixed and
// resample node or tweet attributes.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polarnet/graph.hpp"

namespace polarnet::nullmodels {

using graph::NodeId;

enum class Verdict { inside, outside };
std::string_view to_string(Verdict v);

struct NullTestResult {
  std::string name;
  double observed = 0.0;
  std::vector<double> replicates;  // length R; NaN marks an undefined replicate
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  Verdict verdict = Verdict::inside;
  std::uint64_t seed = 0;
  std::size_t undefined = 0;  // replicates left out of the quantiles
};

struct NullOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Type-7 quantiles over the defined replicates. The verdict is "inside" when
/// q2.5 <= observed <= q97.5, so a degenerate null equal to the observed
/// value counts as inside. Throws DataError if no replicate is defined.
NullTestResult summarize(std::string name, double observed, std::vector<double> replicates,
                         std::uint64_t seed);

/// Network tweets in index form: tweet t was sent by sender[t] and reached
/// receivers[offsets[t] .. offsets[t+1]).
struct Connections {
  std::size_t users = 0;
  std::vector<NodeId> sender;
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> receivers;
  std::vector<double> scores;

  std::size_t size() const { return sender.size(); }
};

/// Collects every scored tweet carried by an edge of `g`. `tweet_scores` is
/// indexed like the edges' tweet lists; NaN entries are skipped.
Connections collect_connections(const graph::MentionGraph& g, std::span<const double> tweet_scores);

/// Pearson correlation between per-user mean sentiment-in and mean
/// sentiment-out, over users with both defined. NaN when undefined.
double in_out_correlation(const Connections& c, std::span<const double> scores, std::size_t* users_used = nullptr);

/// Resamples each tweet's score with replacement from the pool of all
/// observed tweet scores and recomputes the correlation. Throws DataError
/// when fewer than three users have both means or the observed correlation
/// is undefined.
NullTestResult sentiment_correlation_test(const Connections& c, const NullOptions& options);

/// Fraction of directed edges per ordered label pair, row-major
/// (classes x classes). Edges touching a negative label are ignored.
std::vector<double> pair_fractions(const graph::MentionGraph& g, std::span<const std::int32_t> labels,
                                   int classes);

/// Class codes used by the link-class test.
inline constexpr std::array<char, 3> kPolarityCodes{'p', 'n', 'u'};

/// One result per ordered pair of polarity classes (fpp, fpn, fpu, fnp, ...),
/// with labels 0 = positive, 1 = negative, 2 = unknown. Replicates draw every
/// user's class with replacement from the observed label vector.
std::vector<NullTestResult> link_class_fraction_test(const graph::MentionGraph& g,
                                                     std::span<const std::int32_t> labels,
                                                     const NullOptions& options);

/// Assortativity coefficient r = (sum e_ii - sum a_i b_i) / (1 - sum a_i b_i)
/// of a mixing matrix given as row-major counts or fractions. NaN when
/// sum a_i b_i == 1.
double assortativity(std::span<const double> mixing, int classes);

/// r over directed edges whose endpoints both carry a label >= 0.
double assortativity(const graph::MentionGraph& g, std::span<const std::int32_t> labels);

/// Resamples every labeled node's community from the observed labels.
/// Throws DataError when fewer than two communities are present or the
/// observed r is undefined.
NullTestResult assortativity_test(const graph::MentionGraph& g, std::span<const std::int32_t> labels,
                                  const NullOptions& options);

}  // namespace polarnet::nullmodels
