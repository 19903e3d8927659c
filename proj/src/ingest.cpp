#include "polarnet/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "polarnet/csv.hpp"
#include "polarnet/error.hpp"

namespace polarnet::ingest {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(fmt::format("field '{}' must be a string", key));
  return it->get<std::string>();
}

std::string required_string(const json& obj, const char* key) {
  auto value = optional_string(obj, key);
  if (!value || value->empty()) throw DataError(fmt::format("missing field '{}'", key));
  return *value;
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw DataError(fmt::format("field '{}' must be an array", key));
  for (const auto& item : *it) {
    if (!item.is_string()) throw DataError(fmt::format("field '{}' must hold strings", key));
    out.push_back(item.get<std::string>());
  }
  return out;
}

// Rejection reason used in the report; the message carries details.
struct Rejection {
  std::string reason;
  std::string message;
};

}  // namespace

std::string_view to_string(TweetKind kind) {
  switch (kind) {
    case TweetKind::original: return "original";
    case TweetKind::retweet: return "retweet";
    case TweetKind::reply: return "reply";
  }
  return "original";
}

std::optional<TweetKind> parse_kind(std::string_view text) {
  const std::string k = lower(text);
  if (k == "original") return TweetKind::original;
  if (k == "retweet") return TweetKind::retweet;
  if (k == "reply") return TweetKind::reply;
  return std::nullopt;
}

std::string_view to_string(Side side) { return side == Side::yes ? "yes" : "no"; }

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  // YYYY-MM-DDTHH:MM:SS
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':')
    return std::nullopt;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
      !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), s))
    return std::nullopt;
  if (h > 23 || mi > 59 || s > 60) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;

  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    std::size_t digits = 0;
    while (digits < rest.size() && std::isdigit(static_cast<unsigned char>(rest[digits]))) ++digits;
    if (digits == 0) return std::nullopt;
    rest.remove_prefix(digits);  // second precision: fraction truncated
  }
  long offset = 0;
  if (rest == "Z" || rest == "z" || rest.empty()) {
    offset = 0;
  } else if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
    unsigned oh = 0, om = 0;
    if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om) || oh > 23 || om > 59)
      return std::nullopt;
    offset = static_cast<long>(oh) * 3600 + static_cast<long>(om) * 60;
    if (rest.front() == '-') offset = -offset;
  } else {
    return std::nullopt;
  }
  const auto day = std::chrono::sys_days{ymd};
  return Timestamp{day} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s} - std::chrono::seconds{offset};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::string HashtagTimeFilter::normalize_tag(std::string_view tag) {
  tag = trim(tag);
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return lower(tag);
}

bool HashtagTimeFilter::matches(const TweetRecord& record) const {
  if (start && record.created_at < *start) return false;
  if (end && record.created_at > *end) return false;
  if (hashtags.empty()) return true;
  return std::any_of(record.hashtags.begin(), record.hashtags.end(),
                     [&](const std::string& tag) { return hashtags.count(normalize_tag(tag)) > 0; });
}

TweetRecord parse_tweet_line(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("record is not a JSON object");

  TweetRecord r;
  r.tweet_id = required_string(obj, "tweet_id");
  r.user_id = required_string(obj, "user_id");
  const std::string created = required_string(obj, "created_at");
  auto ts = parse_timestamp(created);
  if (!ts) throw DataError("unparseable timestamp '" + created + "'");
  r.created_at = *ts;
  r.text = optional_string(obj, "text").value_or("");
  const std::string kind = optional_string(obj, "kind").value_or("original");
  auto parsed_kind = parse_kind(kind);
  if (!parsed_kind) throw DataError("unknown kind '" + kind + "'");
  r.kind = *parsed_kind;
  for (auto& tag : string_list(obj, "hashtags")) {
    auto normalized = HashtagTimeFilter::normalize_tag(tag);
    if (!normalized.empty()) r.hashtags.push_back(std::move(normalized));
  }
  r.mentions = string_list(obj, "mentions");
  r.retweet_of = optional_string(obj, "retweet_of");
  r.reply_to = optional_string(obj, "reply_to");
  r.conversation_id = optional_string(obj, "conversation_id");
  if (r.kind == TweetKind::retweet && r.mentions.empty() && !r.retweet_of)
    throw DataError("retweet names no source (needs mentions or retweet_of)");
  return r;
}

std::string serialize_tweet(const TweetRecord& r) {
  nlohmann::ordered_json obj;
  obj["tweet_id"] = r.tweet_id;
  obj["user_id"] = r.user_id;
  obj["created_at"] = format_timestamp(r.created_at);
  obj["text"] = r.text;
  obj["kind"] = std::string(to_string(r.kind));
  obj["hashtags"] = r.hashtags;
  obj["mentions"] = r.mentions;
  obj["retweet_of"] = r.retweet_of ? json(*r.retweet_of) : json(nullptr);
  obj["reply_to"] = r.reply_to ? json(*r.reply_to) : json(nullptr);
  obj["conversation_id"] = r.conversation_id ? json(*r.conversation_id) : json(nullptr);
  return obj.dump();
}

TweetCorpus parse_tweets(std::string_view content, const HashtagTimeFilter& filter,
                         IngestOptions options) {
  TweetCorpus corpus;
  auto& report = corpus.report;
  std::unordered_set<std::string> seen_ids;
  std::unordered_set<std::string> users;
  std::size_t line_no = 0;

  auto reject = [&](const std::string& reason, const std::string& message) {
    if (options.strict) throw DataError(fmt::format("line {}: {}", line_no, message));
    ++report.skipped;
    ++report.rejected[reason];
  };

  for (std::string_view line : csv::lines(content)) {
    ++line_no;
    ++report.total_lines;
    if (trim(line).empty()) {
      reject("empty line", "empty line");
      continue;
    }
    TweetRecord record;
    try {
      record = parse_tweet_line(line);
    } catch (const DataError& e) {
      const std::string what = e.what();
      std::string reason = "invalid record";
      if (what.rfind("malformed JSON", 0) == 0 || what.rfind("record is not", 0) == 0)
        reason = "malformed JSON";
      else if (what.rfind("unparseable timestamp", 0) == 0)
        reason = "bad timestamp";
      else if (what.rfind("missing field", 0) == 0)
        reason = "missing field";
      reject(reason, what);
      continue;
    }
    if (!seen_ids.insert(record.tweet_id).second) {
      reject("duplicate tweet_id", "duplicate tweet_id '" + record.tweet_id + "'");
      continue;
    }
    if (!filter.matches(record)) {
      ++report.filtered;
      continue;
    }
    ++report.kept;
    switch (record.kind) {
      case TweetKind::original: ++report.originals; break;
      case TweetKind::retweet: ++report.retweets; break;
      case TweetKind::reply: ++report.replies; break;
    }
    users.insert(record.user_id);
    corpus.records.push_back(std::move(record));
  }
  report.users = users.size();
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TweetCorpus load_tweets(const std::filesystem::path& path, const HashtagTimeFilter& filter,
                        IngestOptions options) {
  return parse_tweets(read_file(path), filter, options);
}

void write_tweets(const std::filesystem::path& path, const std::vector<TweetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& r : records) out << serialize_tweet(r) << '\n';
}

std::optional<int> Lexicon::find(std::string_view word) const {
  auto it = scores.find(std::string(word));
  if (it == scores.end()) return std::nullopt;
  return it->second;
}

Lexicon parse_lexicon(std::string_view content, IngestOptions options) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (std::string_view line : csv::lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    int score = 0;
    std::string word = tab == std::string_view::npos ? std::string() : lower(trim(line.substr(0, tab)));
    if (tab == std::string_view::npos || word.empty() ||
        !parse_int(trim(line.substr(tab + 1)), score)) {
      if (options.strict) throw DataError(fmt::format("lexicon line {}: malformed", line_no));
      ++lex.malformed;
      continue;
    }
    if (score < -5 || score > 5) {
      if (options.strict)
        throw DataError(fmt::format("lexicon line {}: score {} outside [-5, 5]", line_no, score));
      score = std::clamp(score, -5, 5);
      ++lex.clamped;
    }
    auto [it, inserted] = lex.scores.insert_or_assign(std::move(word), score);
    if (!inserted) ++lex.duplicates;
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, IngestOptions options) {
  return parse_lexicon(read_file(path), options);
}

namespace {

// Data rows of a two-column CSV with a header.
std::vector<std::pair<std::string, std::string>> two_column_rows(std::string_view content,
                                                                 std::string_view what) {
  std::vector<std::pair<std::string, std::string>> rows;
  bool header = true;
  std::size_t line_no = 0;
  for (std::string_view line : csv::lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = csv::split(line);
    if (fields.size() != 2)
      throw DataError(fmt::format("{} line {}: expected 2 columns", what, line_no));
    rows.emplace_back(std::string(trim(fields[0])), std::string(trim(fields[1])));
  }
  return rows;
}

}  // namespace

Annotations parse_annotations(std::string_view content) {
  Annotations out;
  for (auto& [user, label] : two_column_rows(content, "annotations")) {
    const std::string l = lower(label);
    Side side;
    if (l == "yes")
      side = Side::yes;
    else if (l == "no")
      side = Side::no;
    else
      throw DataError("annotations: unknown label '" + label + "' for user " + user);
    auto [it, inserted] = out.labels.insert_or_assign(user, side);
    if (!inserted) ++out.duplicates;
  }
  return out;
}

Annotations load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

bool FollowerGraph::contains(const std::string& follower, const std::string& followed) const {
  auto it = follows.find(follower);
  return it != follows.end() && it->second.count(followed) > 0;
}

FollowerGraph parse_followers(std::string_view content) {
  FollowerGraph g;
  for (auto& [follower, followed] : two_column_rows(content, "followers")) {
    if (follower == followed) {
      ++g.self_edges_dropped;
      continue;
    }
    if (g.follows[follower].insert(followed).second)
      ++g.edges;
    else
      ++g.duplicates_dropped;
  }
  return g;
}

FollowerGraph load_followers(const std::filesystem::path& path) {
  return parse_followers(read_file(path));
}

}  // namespace polarnet::ingest
