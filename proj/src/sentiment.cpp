#include "polarnet/sentiment.hpp"

#include <algorithm>
#include <numeric>

#include "polarnet/kernels.hpp"

namespace polarnet::sentiment {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_url(std::string_view chunk) {
  auto starts = [&](std::string_view prefix) {
    if (chunk.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(chunk[i])) != prefix[i]) return false;
    return true;
  };
  return starts("http://") || starts("https://") || starts("www.");
}

bool is_rt_marker(std::string_view chunk) {
  return chunk.size() == 2 && (chunk[0] == 'R' || chunk[0] == 'r') &&
         (chunk[1] == 'T' || chunk[1] == 't');
}

double sorted_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string_view> chunks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end > pos) chunks.push_back(text.substr(pos, end - pos));
    pos = end;
  }

  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    std::string_view chunk = chunks[i];
    if (chunk.front() == '@' || is_url(chunk)) continue;
    if (is_rt_marker(chunk) && i + 1 < chunks.size() && chunks[i + 1].front() == '@') continue;
    std::string current;
    for (char ch : chunk) {
      const auto c = static_cast<unsigned char>(ch);
      if (is_word_byte(c)) {
        current += c < 0x80 ? static_cast<char>(std::tolower(c)) : ch;
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  }
  return tokens;
}

RawScore score_tokens(std::span<const std::string> tokens, const ingest::Lexicon& lexicon) {
  RawScore out;
  for (const auto& token : tokens) {
    auto it = lexicon.scores.find(token);
    if (it == lexicon.scores.end()) continue;
    if (it->second > 0)
      out.pos += it->second;
    else
      out.neg += it->second;
  }
  return out;
}

std::vector<TweetSentiment> apply_rescaling(std::span<const RawScore> raw, const Rescaling& scaling) {
  const std::size_t n = raw.size();
  std::vector<double> pos(n), neg(n), sp(n), sn(n), score(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = static_cast<double>(raw[i].pos);
    neg[i] = static_cast<double>(raw[i].neg);
  }
  kernels::rescale(pos, neg, static_cast<double>(scaling.max_pos),
                   static_cast<double>(-scaling.min_neg), sp, sn, score);
  std::vector<TweetSentiment> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {raw[i].pos, raw[i].neg, sp[i], sn[i], score[i]};
  return out;
}

RescaledCorpus rescale_corpus(std::span<const RawScore> raw) {
  RescaledCorpus out;
  std::vector<double> pos(raw.size()), neg(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pos[i] = static_cast<double>(raw[i].pos);
    neg[i] = static_cast<double>(raw[i].neg);
  }
  // Extremes via the reduction kernel; sums are integers so the doubles are exact
  // up to 2^53.
  const auto pos_range = kernels::minmax(pos);
  const auto neg_range = kernels::minmax(neg);
  out.scaling.max_pos = std::max<std::int64_t>(0, static_cast<std::int64_t>(pos_range.max));
  out.scaling.min_neg = std::min<std::int64_t>(0, static_cast<std::int64_t>(neg_range.min));
  out.tweets = apply_rescaling(raw, out.scaling);
  return out;
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::unknown: return "unknown";
  }
  return "unknown";
}

Polarity polarity_of(std::optional<double> sent_out) {
  if (!sent_out) return Polarity::unknown;
  if (*sent_out > 0.0) return Polarity::positive;
  if (*sent_out < 0.0) return Polarity::negative;
  return Polarity::unknown;
}

std::map<std::string, UserSentiment> aggregate_users(std::span<const ScoredMention> tweets) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> scores;  // out, in
  for (const auto& t : tweets) {
    if (t.receivers.empty()) continue;
    scores[t.sender].first.push_back(t.score);
    for (const auto& r : t.receivers) scores[r].second.push_back(t.score);
  }
  std::map<std::string, UserSentiment> out;
  for (auto& [user, pair] : scores) {
    auto& [sent, received] = pair;
    UserSentiment u;
    u.n_out = sent.size();
    u.n_in = received.size();
    if (!sent.empty()) u.sent_out = sorted_mean(sent);
    if (!received.empty()) u.sent_in = sorted_mean(received);
    u.polarity = polarity_of(u.sent_out);
    out.emplace(user, u);
  }
  return out;
}

}  // namespace polarnet::sentiment
