#pragma once

// Retweet cascades: grouping tweets by shared text, attributing each retweet
// to the most recent prior sharer the retweeter is linked to, tree scores
// and side-mixing statistics.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarnet/graph.hpp"
#include "polarnet/ingest.hpp"
#include "polarnet/stats.hpp"

namespace polarnet::cascades {

/// Text key for bucketing: leading "RT @user:" chains and trailing URLs are
/// removed, whitespace is trimmed and collapsed, ASCII letters lowercased.
std::string normalize_text(std::string_view text);

struct BucketMember {
  std::string tweet_id;
  std::string user_id;
  ingest::Timestamp created_at{};
  ingest::TweetKind kind = ingest::TweetKind::original;
};

/// Members come ordered by (created_at, tweet_id); that order decides which
/// sharer is "most recent".
bool precedes(const BucketMember& a, const BucketMember& b);

struct RetweetBucket {
  std::size_t bucket_id = 0;
  std::string normalized_text;
  std::vector<BucketMember> members;
};

struct BucketingReport {
  std::size_t tweets = 0;              // originals and retweets considered
  std::size_t replies_excluded = 0;
  std::size_t empty_text_dropped = 0;  // normalized to the empty string
  std::size_t buckets = 0;
  std::size_t multi_member_buckets = 0;
  std::size_t never_retweeted = 0;     // singleton buckets holding an original
};

struct Bucketing {
  std::vector<RetweetBucket> buckets;  // ids 0.. in order of earliest member
  BucketingReport report;
};

Bucketing bucket_retweets(std::span<const ingest::TweetRecord> tweets);

/// Answers "could `parent` have put the content into `child`'s timeline".
class EdgeOracle {
 public:
  virtual ~EdgeOracle() = default;
  virtual bool links(const std::string& child, const std::string& parent) const = 0;
};

/// child -> parent when the child mentions the parent anywhere in the graph.
class MentionOracle final : public EdgeOracle {
 public:
  explicit MentionOracle(const graph::MentionGraph& g) : g_(g) {}
  bool links(const std::string& child, const std::string& parent) const override {
    return g_.has_edge(child, parent);
  }

 private:
  const graph::MentionGraph& g_;
};

/// child -> parent when the child follows the parent.
class FollowerOracle final : public EdgeOracle {
 public:
  explicit FollowerOracle(const ingest::FollowerGraph& g) : g_(g) {}
  bool links(const std::string& child, const std::string& parent) const override {
    return g_.contains(child, parent);
  }

 private:
  const ingest::FollowerGraph& g_;
};

/// Explicit (child, parent) pairs; handy for fixtures.
class PairOracle final : public EdgeOracle {
 public:
  PairOracle() = default;
  explicit PairOracle(std::set<std::pair<std::string, std::string>> pairs) : pairs_(std::move(pairs)) {}
  void add(std::string child, std::string parent) { pairs_.emplace(std::move(child), std::move(parent)); }
  bool links(const std::string& child, const std::string& parent) const override {
    return pairs_.count({child, parent}) > 0;
  }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

enum class Strategy { mention, follower };
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

enum class Side { yes, no, unknown };
std::string_view to_string(Side s);

struct CascadeNode {
  std::string user_id;
  std::string tweet_id;
  ingest::Timestamp created_at{};
  std::int32_t parent = -1;  // index into nodes; -1 for the seed
  Side side = Side::unknown;
};

/// Nodes are in time order, so nodes[0] is the seed and every parent index
/// is smaller than its child's.
struct CascadeTree {
  std::size_t cascade_id = 0;
  std::size_t bucket_id = 0;
  std::vector<CascadeNode> nodes;

  std::size_t size() const { return nodes.size(); }
  const CascadeNode& seed() const { return nodes.front(); }
};

struct Attribution {
  std::vector<CascadeTree> trees;  // in order of their seeds
  std::size_t duplicates_dropped = 0;
};

/// Walks the bucket in time order. Each tweeter's parent is the latest
/// earlier tweeter they link to per the oracle; with no such tweeter they
/// seed a new cascade. Repeat tweets by the same user are dropped after the
/// first. cascade_id is numbered from 0 within the bucket.
Attribution attribute_parents(const RetweetBucket& bucket, const EdgeOracle& oracle);

struct Reconstruction {
  std::vector<CascadeTree> cascades;  // globally numbered, by bucket then seed
  std::size_t duplicates_dropped = 0;
};

/// Runs attribute_parents over every bucket (singletons included) in
/// parallel; output order and ids do not depend on the thread count.
Reconstruction reconstruct(const Bucketing& bucketing, const EdgeOracle& oracle, unsigned threads = 1);

struct CascadeScores {
  std::uint32_t max_depth = 0;
  double avg_depth = 0.0;
  std::optional<double> virality;  // absent for single-node cascades
};

/// Scores from a parent array where parent[i] < i and parent[0] == -1:
/// M = max depth, A = depth sum / n, V = sum of ordered-pair distances /
/// (n (n - 1)). Sums are accumulated in integers.
CascadeScores score_parents(std::span<const std::int32_t> parent);
CascadeScores score_cascade(const CascadeTree& tree);

/// Tags each node with its user's side; absent users become unknown.
void tag_sides(std::vector<CascadeTree>& trees, const std::map<std::string, Side>& sides);

struct CascadeSides {
  std::size_t yes = 0;
  std::size_t no = 0;
  std::size_t classified = 0;
  std::optional<double> prop_yes;            // yes / classified
  std::optional<double> seed_side_fraction;  // share of classified nodes on the seed's side
};
CascadeSides cascade_sides(const CascadeTree& tree);

/// How far a cascade strays from its seed's side.
enum class ChangeBin { changed, half_to_sixty, sixty_to_full, unchanged };
std::string_view to_string(ChangeBin b);
ChangeBin change_bin(double seed_side_fraction);

struct ChangeTable {
  std::array<std::size_t, 4> counts{};  // by ChangeBin
  std::size_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  double fraction(ChangeBin b) const;
};

struct DiffusionReport {
  std::size_t cascades = 0;  // n >= 2
  std::size_t yes_seeded = 0;
  std::size_t no_seeded = 0;
  std::size_t unknown_seeded = 0;
  std::size_t largest_yes = 0;
  std::size_t largest_no = 0;
  ChangeTable yes_table;  // cascades seeded on the yes side
  ChangeTable no_table;
  ChangeTable all;
  std::size_t min_classified = 10;
  std::vector<double> prop_yes;         // cascades with >= min_classified classified users
  std::array<std::size_t, 10> prop_yes_histogram{};  // tenths; 1.0 falls in the last bin
  std::size_t mixed = 0;                // prop_yes strictly inside (0.25, 0.75)

  /// Share of binned cascades whose seed side holds at least 60%.
  double seed_side_majority() const;
};

DiffusionReport diffusion_analysis(const std::vector<CascadeTree>& trees, std::size_t min_classified = 10);

struct MetricSummary {
  std::string name;
  double mode = 0.0;
  double median = 0.0;
  double mean = 0.0;
  std::vector<stats::CcdfPoint> ccdf;
};

struct ScoreDistributions {
  std::size_t cascades = 0;  // n >= 2
  std::array<MetricSummary, 3> metrics;  // max_depth, avg_depth, virality
  // Pearson correlations, NaN when undefined.
  double depth_vs_avg_depth = 0.0;
  double depth_vs_virality = 0.0;
  double avg_depth_vs_virality = 0.0;
};

/// Summaries over cascades with at least two nodes; all NaN when there are
/// none.
ScoreDistributions score_distributions(std::span<const CascadeScores> scores);

}  // namespace polarnet::cascades
