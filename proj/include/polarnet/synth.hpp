#pragma once

// Synthetic two-sided corpora with planted ground truth: sides, a two-block
// mention network, lexicon-encoded sentiment and retweet cascades that the
// reconstruction rule recovers exactly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polarnet/ingest.hpp"

namespace polarnet::synth {

struct SynthConfig {
  std::size_t users_yes = 100;
  std::size_t users_no = 100;
  double p_in = 0.2;        // reciprocal mention probability, same side
  double p_out = 0.01;      // reciprocal mention probability, across sides
  double p_one_way = 0.0;   // extra one-directional mentions, any pair
  std::size_t max_tweets_per_link = 2;  // tweets per mention direction: uniform 1..max
  double mean_yes = 0.3;    // per-tweet sentiment, clamped to [-1, 1]
  double mean_no = -0.3;
  double spread = 0.3;
  std::size_t cascades = 50;
  double branching = 0.9;   // mean offspring per node (geometric law)
  std::size_t max_cascade_size = 200;
  double cross_side_retweet_prob = 0.02;  // child on the other side of its parent
  double annotated_fraction = 0.2;        // users written to annotations.csv
  std::uint64_t seed = 1;

  /// Throws ConfigError for out-of-range values or an expected mention degree
  /// below one.
  void validate() const;
};

struct PlantedNode {
  std::string user_id;
  std::string parent;  // empty for the seed
  std::string tweet_id;
};

struct PlantedCascade {
  std::size_t id = 0;
  std::vector<PlantedNode> nodes;  // in tweet order
};

struct SynthCorpus {
  std::vector<ingest::TweetRecord> tweets;  // time ordered
  std::string lexicon_tsv;
  std::map<std::string, ingest::Side> sides;
  std::map<std::string, ingest::Side> annotations;
  std::vector<std::pair<std::string, std::string>> follows;  // (follower, followed), sorted
  std::vector<PlantedCascade> cascades;
};

std::string user_name(std::size_t index);

SynthCorpus generate(const SynthConfig& config);

/// Writes tweets.jsonl, lexicon.tsv, annotations.csv, followers.csv,
/// truth_sides.csv and truth_cascades.csv into `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace polarnet::synth
