#include "polarnet/cascades.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "polarnet/kernels.hpp"
#include "polarnet/parallel.hpp"

namespace polarnet::cascades {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) return false;
  return true;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_handle_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Consumes one "RT @user:" marker; false if the text does not start with one.
bool strip_rt_marker(std::string_view& s) {
  std::string_view t = s;
  if (!iequals_prefix(t, "rt")) return false;
  t.remove_prefix(2);
  if (t.empty() || !is_space(t.front())) return false;
  t = trim(t);
  if (t.empty() || t.front() != '@') return false;
  t.remove_prefix(1);
  std::size_t n = 0;
  while (n < t.size() && is_handle_char(t[n])) ++n;
  if (n == 0) return false;
  t.remove_prefix(n);
  if (!t.empty() && t.front() == ':') t.remove_prefix(1);
  s = trim(t);
  return true;
}

bool is_url(std::string_view token) {
  return iequals_prefix(token, "http://") || iequals_prefix(token, "https://") || iequals_prefix(token, "www.");
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string_view s = trim(text);
  while (strip_rt_marker(s)) {
  }
  // trailing URLs
  while (!s.empty()) {
    std::size_t start = s.size();
    while (start > 0 && !is_space(s[start - 1])) --start;
    if (!is_url(s.substr(start))) break;
    s = trim(s.substr(0, start));
  }
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool precedes(const BucketMember& a, const BucketMember& b) {
  if (a.created_at != b.created_at) return a.created_at < b.created_at;
  return a.tweet_id < b.tweet_id;
}

Bucketing bucket_retweets(std::span<const ingest::TweetRecord> tweets) {
  Bucketing out;
  auto& report = out.report;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<RetweetBucket> buckets;
  for (const auto& t : tweets) {
    if (t.kind == ingest::TweetKind::reply) {
      ++report.replies_excluded;
      continue;
    }
    ++report.tweets;
    auto key = normalize_text(t.text);
    if (key.empty()) {
      ++report.empty_text_dropped;
      continue;
    }
    auto [it, inserted] = index.try_emplace(key, buckets.size());
    if (inserted) {
      buckets.emplace_back();
      buckets.back().normalized_text = std::move(key);
    }
    buckets[it->second].members.push_back({t.tweet_id, t.user_id, t.created_at, t.kind});
  }
  for (auto& b : buckets) std::sort(b.members.begin(), b.members.end(), precedes);
  std::sort(buckets.begin(), buckets.end(), [](const RetweetBucket& a, const RetweetBucket& b) {
    if (precedes(a.members.front(), b.members.front())) return true;
    if (precedes(b.members.front(), a.members.front())) return false;
    return a.normalized_text < b.normalized_text;
  });
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    buckets[i].bucket_id = i;
    if (buckets[i].members.size() > 1)
      ++report.multi_member_buckets;
    else if (buckets[i].members.front().kind == ingest::TweetKind::original)
      ++report.never_retweeted;
  }
  report.buckets = buckets.size();
  out.buckets = std::move(buckets);
  return out;
}

std::string_view to_string(Strategy s) { return s == Strategy::mention ? "mention" : "follower"; }

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "mention") return Strategy::mention;
  if (text == "follower") return Strategy::follower;
  return std::nullopt;
}

std::string_view to_string(Side s) {
  switch (s) {
    case Side::yes: return "yes";
    case Side::no: return "no";
    case Side::unknown: return "unknown";
  }
  return "unknown";
}

Attribution attribute_parents(const RetweetBucket& bucket, const EdgeOracle& oracle) {
  Attribution out;
  std::vector<const BucketMember*> members;
  {
    std::unordered_map<std::string_view, bool> seen;
    for (const auto& m : bucket.members) {
      if (!seen.try_emplace(m.user_id, true).second) {
        ++out.duplicates_dropped;
        continue;
      }
      members.push_back(&m);
    }
  }
  // (tree, node index) of every kept member, for parent lookup
  std::vector<std::pair<std::size_t, std::int32_t>> where(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = *members[i];
    std::optional<std::size_t> parent;
    for (std::size_t j = i; j-- > 0;) {
      if (oracle.links(m.user_id, members[j]->user_id)) {
        parent = j;
        break;
      }
    }
    CascadeNode node{m.user_id, m.tweet_id, m.created_at, -1, Side::unknown};
    if (parent) {
      const auto [tree, pos] = where[*parent];
      node.parent = pos;
      auto& nodes = out.trees[tree].nodes;
      where[i] = {tree, static_cast<std::int32_t>(nodes.size())};
      nodes.push_back(std::move(node));
    } else {
      CascadeTree t;
      t.cascade_id = out.trees.size();
      t.bucket_id = bucket.bucket_id;
      t.nodes.push_back(std::move(node));
      where[i] = {out.trees.size(), 0};
      out.trees.push_back(std::move(t));
    }
  }
  return out;
}

Reconstruction reconstruct(const Bucketing& bucketing, const EdgeOracle& oracle, unsigned threads) {
  std::vector<Attribution> per_bucket(bucketing.buckets.size());
  parallel_for(bucketing.buckets.size(), threads,
               [&](std::size_t i) { per_bucket[i] = attribute_parents(bucketing.buckets[i], oracle); });
  Reconstruction out;
  for (auto& a : per_bucket) {
    out.duplicates_dropped += a.duplicates_dropped;
    for (auto& t : a.trees) {
      t.cascade_id = out.cascades.size();
      out.cascades.push_back(std::move(t));
    }
  }
  return out;
}

CascadeScores score_parents(std::span<const std::int32_t> parent) {
  CascadeScores s;
  const std::size_t n = parent.size();
  if (n == 0) return s;
  std::vector<std::uint32_t> depth(n, 0);
  std::uint64_t depth_sum = 0;
  for (std::size_t i = 1; i < n; ++i) {
    depth[i] = depth[parent[i]] + 1;
    depth_sum += depth[i];
    s.max_depth = std::max(s.max_depth, depth[i]);
  }
  s.avg_depth = static_cast<double>(depth_sum) / static_cast<double>(n);
  if (n < 2) return s;
  // Each tree edge above a subtree of size k lies on the path of k (n - k)
  // unordered pairs.
  std::vector<std::uint64_t> subtree(n, 1);
  std::uint64_t pair_sum = 0;
  for (std::size_t i = n; i-- > 1;) {
    subtree[parent[i]] += subtree[i];
    pair_sum += subtree[i] * (n - subtree[i]);
  }
  s.virality = static_cast<double>(2 * pair_sum) / (static_cast<double>(n) * static_cast<double>(n - 1));
  return s;
}

CascadeScores score_cascade(const CascadeTree& tree) {
  std::vector<std::int32_t> parent(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) parent[i] = tree.nodes[i].parent;
  return score_parents(parent);
}

void tag_sides(std::vector<CascadeTree>& trees, const std::map<std::string, Side>& sides) {
  for (auto& t : trees) {
    for (auto& node : t.nodes) {
      auto it = sides.find(node.user_id);
      node.side = it == sides.end() ? Side::unknown : it->second;
    }
  }
}

CascadeSides cascade_sides(const CascadeTree& tree) {
  CascadeSides s;
  for (const auto& node : tree.nodes) {
    if (node.side == Side::yes) ++s.yes;
    if (node.side == Side::no) ++s.no;
  }
  s.classified = s.yes + s.no;
  if (s.classified == 0) return s;
  s.prop_yes = static_cast<double>(s.yes) / static_cast<double>(s.classified);
  const Side seed = tree.seed().side;
  if (seed == Side::yes) s.seed_side_fraction = *s.prop_yes;
  if (seed == Side::no) s.seed_side_fraction = static_cast<double>(s.no) / static_cast<double>(s.classified);
  return s;
}

std::string_view to_string(ChangeBin b) {
  switch (b) {
    case ChangeBin::changed: return "changed";
    case ChangeBin::half_to_sixty: return "50-60%";
    case ChangeBin::sixty_to_full: return "60-100%";
    case ChangeBin::unchanged: return "unchanged";
  }
  return "changed";
}

ChangeBin change_bin(double f) {
  if (f < 0.5) return ChangeBin::changed;
  if (f < 0.6) return ChangeBin::half_to_sixty;
  if (f < 1.0) return ChangeBin::sixty_to_full;
  return ChangeBin::unchanged;
}

double ChangeTable::fraction(ChangeBin b) const {
  const auto n = total();
  return n == 0 ? kNaN : static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(n);
}

double DiffusionReport::seed_side_majority() const {
  return all.fraction(ChangeBin::sixty_to_full) + all.fraction(ChangeBin::unchanged);
}

DiffusionReport diffusion_analysis(const std::vector<CascadeTree>& trees, std::size_t min_classified) {
  DiffusionReport r;
  r.min_classified = min_classified;
  for (const auto& t : trees) {
    if (t.size() < 2) continue;
    ++r.cascades;
    const auto sides = cascade_sides(t);
    const Side seed = t.seed().side;
    if (seed == Side::yes) {
      ++r.yes_seeded;
      r.largest_yes = std::max(r.largest_yes, t.size());
    } else if (seed == Side::no) {
      ++r.no_seeded;
      r.largest_no = std::max(r.largest_no, t.size());
    } else {
      ++r.unknown_seeded;
    }
    if (sides.seed_side_fraction) {
      const auto bin = static_cast<std::size_t>(change_bin(*sides.seed_side_fraction));
      ++r.all.counts[bin];
      ++(seed == Side::yes ? r.yes_table : r.no_table).counts[bin];
    }
    if (sides.prop_yes && sides.classified >= min_classified && sides.classified > 0) {
      const double p = *sides.prop_yes;
      r.prop_yes.push_back(p);
      ++r.prop_yes_histogram[std::min<std::size_t>(9, static_cast<std::size_t>(p * 10.0))];
      if (p > 0.25 && p < 0.75) ++r.mixed;
    }
  }
  return r;
}

ScoreDistributions score_distributions(std::span<const CascadeScores> scores) {
  ScoreDistributions d;
  std::vector<double> m, a, v;
  for (const auto& s : scores) {
    if (!s.virality) continue;
    m.push_back(s.max_depth);
    a.push_back(s.avg_depth);
    v.push_back(*s.virality);
  }
  d.cascades = m.size();
  const std::array<std::pair<const char*, const std::vector<double>*>, 3> series{
      {{"max_depth", &m}, {"avg_depth", &a}, {"virality", &v}}};
  for (std::size_t i = 0; i < 3; ++i) {
    auto& out = d.metrics[i];
    out.name = series[i].first;
    const auto& values = *series[i].second;
    if (values.empty()) {
      out.mode = out.median = out.mean = kNaN;
      continue;
    }
    out.mode = stats::mode(values);
    out.median = stats::median(values);
    out.mean = stats::mean(values);
    out.ccdf = stats::ccdf(values);
  }
  d.depth_vs_avg_depth = kernels::pearson(m, a);
  d.depth_vs_virality = kernels::pearson(m, v);
  d.avg_depth_vs_virality = kernels::pearson(a, v);
  return d;
}

}  // namespace polarnet::cascades
