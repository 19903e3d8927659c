#pragma once

// Unigram lexicon scoring, network-wide rescaling and per-user aggregation.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarnet/ingest.hpp"

namespace polarnet::sentiment {

/// Lowercase unigrams. Whitespace-separated chunks that are URLs or
/// @mentions are dropped, as is an "RT" marker directly before a mention;
/// '#' prefixes are stripped; the rest is split on runs of characters that
/// are not ASCII alphanumerics (bytes >= 0x80 count as word characters so
/// UTF-8 letters stay inside tokens).
std::vector<std::string> tokenize(std::string_view text);

struct RawScore {
  std::int64_t pos = 0;  // sum of positive word scores, >= 0
  std::int64_t neg = 0;  // sum of negative word scores, <= 0

  bool operator==(const RawScore&) const = default;
};

RawScore score_tokens(std::span<const std::string> tokens, const ingest::Lexicon& lexicon);

inline RawScore score_text(std::string_view text, const ingest::Lexicon& lexicon) {
  const auto tokens = tokenize(text);
  return score_tokens(tokens, lexicon);
}

struct TweetSentiment {
  std::int64_t raw_pos = 0;
  std::int64_t raw_neg = 0;
  double scaled_pos = 0.0;  // [0, 5]
  double scaled_neg = 0.0;  // [-5, 0]
  double score = 0.0;       // scaled_pos + scaled_neg
};

/// Largest positive sum and most negative sum over the corpus, with the
/// divisors that map them to +5 and -5 (max / 5 and |min| / 5).
struct Rescaling {
  std::int64_t max_pos = 0;
  std::int64_t min_neg = 0;
  double pos_divisor() const { return static_cast<double>(max_pos) / 5.0; }
  double neg_divisor() const { return static_cast<double>(-min_neg) / 5.0; }
};

struct RescaledCorpus {
  Rescaling scaling;
  std::vector<TweetSentiment> tweets;
};

/// Rescales every tweet against the corpus extremes:
///   scaled_pos = raw_pos * 5 / max_pos   (0 if max_pos == 0)
///   scaled_neg = raw_neg * 5 / |min_neg| (0 if min_neg == 0)
/// The tweet holding the extreme maps to exactly +5 / -5.
RescaledCorpus rescale_corpus(std::span<const RawScore> raw);

/// Applies an existing scaling (e.g. one computed on a different tweet set).
std::vector<TweetSentiment> apply_rescaling(std::span<const RawScore> raw, const Rescaling& scaling);

enum class Polarity { positive, negative, unknown };
std::string_view to_string(Polarity p);

struct UserSentiment {
  std::optional<double> sent_out;  // mean score of tweets sent; unset when n_out == 0
  std::optional<double> sent_in;   // mean score of tweets received
  std::size_t n_out = 0;
  std::size_t n_in = 0;
  Polarity polarity = Polarity::unknown;  // sign of sent_out
};

/// One scored tweet: its sender and the in-network users it mentions.
struct ScoredMention {
  std::string sender;
  std::vector<std::string> receivers;  // distinct, sender excluded
  double score = 0.0;
};

/// Per-user means. A tweet counts toward its sender's sent_out when it has at
/// least one receiver, and once toward each receiver's sent_in. Means are
/// summed in sorted order so the result does not depend on tweet order.
std::map<std::string, UserSentiment> aggregate_users(std::span<const ScoredMention> tweets);

Polarity polarity_of(std::optional<double> sent_out);

}  // namespace polarnet::sentiment
