#pragma once

// Typed records for tweet archives, lexicons, annotations and follower lists.
//
// File formats:
//   tweets       JSON lines, one object per line with the TweetRecord fields;
//                created_at is ISO-8601 (e.g. 2018-05-01T12:30:00Z).
//   lexicon      TSV  word<TAB>score, score an integer in [-5, 5].
//   annotations  CSV  user_id,label  with label yes|no.
//   followers    CSV  follower,followed.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace polarnet::ingest {

using Timestamp = std::chrono::sys_seconds;

enum class TweetKind { original, retweet, reply };

std::string_view to_string(TweetKind kind);
std::optional<TweetKind> parse_kind(std::string_view text);

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  Timestamp created_at{};
  std::string text;
  TweetKind kind = TweetKind::original;
  std::vector<std::string> hashtags;  // lowercase, no '#'
  std::vector<std::string> mentions;  // user ids
  std::optional<std::string> retweet_of;
  std::optional<std::string> reply_to;
  std::optional<std::string> conversation_id;

  bool operator==(const TweetRecord&) const = default;
};

/// Parses "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and an
/// optional "Z" or "+HH:MM"/"-HH:MM" offset; the result is UTC. A space is
/// accepted in place of 'T'.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Tracked hashtags plus an inclusive [start, end] window. An empty hashtag
/// set accepts every tag; unset bounds are open.
struct HashtagTimeFilter {
  std::unordered_set<std::string> hashtags;
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;

  /// Lowercases and strips a leading '#'.
  static std::string normalize_tag(std::string_view tag);
  void add_hashtag(std::string_view tag) { hashtags.insert(normalize_tag(tag)); }
  bool matches(const TweetRecord& record) const;
};

struct IngestOptions {
  bool strict = false;
};

struct IngestReport {
  std::size_t total_lines = 0;
  std::size_t kept = 0;
  std::size_t filtered = 0;  // valid records outside the hashtag/time filter
  std::size_t skipped = 0;   // rejected lines
  std::size_t originals = 0;
  std::size_t retweets = 0;
  std::size_t replies = 0;
  std::size_t users = 0;  // distinct authors among kept records
  std::map<std::string, std::size_t> rejected;  // reason -> count

  bool operator==(const IngestReport&) const = default;
};

struct TweetCorpus {
  std::vector<TweetRecord> records;
  IngestReport report;
};

/// Parses one JSON line. Throws DataError describing the first problem.
TweetRecord parse_tweet_line(std::string_view line);
std::string serialize_tweet(const TweetRecord& record);

/// Reads and filters a tweet archive. Unreadable files throw ConfigError;
/// damaged lines are skipped and counted, or throw DataError in strict mode.
TweetCorpus load_tweets(const std::filesystem::path& path, const HashtagTimeFilter& filter,
                        IngestOptions options = {});
TweetCorpus parse_tweets(std::string_view content, const HashtagTimeFilter& filter,
                         IngestOptions options = {});

void write_tweets(const std::filesystem::path& path, const std::vector<TweetRecord>& records);

struct Lexicon {
  std::unordered_map<std::string, int> scores;
  std::size_t duplicates = 0;  // last one wins
  std::size_t clamped = 0;
  std::size_t malformed = 0;

  std::optional<int> find(std::string_view word) const;
};

Lexicon parse_lexicon(std::string_view content, IngestOptions options = {});
Lexicon load_lexicon(const std::filesystem::path& path, IngestOptions options = {});

enum class Side { yes, no };
std::string_view to_string(Side side);

struct Annotations {
  std::map<std::string, Side> labels;
  std::size_t duplicates = 0;
};

/// Header row required. An unknown label is always fatal (DataError).
Annotations parse_annotations(std::string_view content);
Annotations load_annotations(const std::filesystem::path& path);

struct FollowerGraph {
  std::unordered_map<std::string, std::unordered_set<std::string>> follows;
  std::size_t edges = 0;
  std::size_t self_edges_dropped = 0;
  std::size_t duplicates_dropped = 0;

  bool contains(const std::string& follower, const std::string& followed) const;
};

FollowerGraph parse_followers(std::string_view content);
FollowerGraph load_followers(const std::filesystem::path& path);

/// Whole file as a string; ConfigError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace polarnet::ingest
