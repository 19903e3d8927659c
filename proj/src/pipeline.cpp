#include "polarnet/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "polarnet/community.hpp"
#include "polarnet/csv.hpp"
#include "polarnet/error.hpp"
#include "polarnet/graph.hpp"
#include "polarnet/nullmodels.hpp"
#include "polarnet/sentiment.hpp"

namespace polarnet::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- artifact locations -----------------------------------------------------

fs::path ingest_dir(const RunConfig& c) { return c.out / "ingest"; }
fs::path score_dir(const RunConfig& c) { return c.out / "score"; }
fs::path graph_dir(const RunConfig& c) { return c.out / "graph"; }
fs::path community_dir(const RunConfig& c) { return c.out / "communities"; }
fs::path null_dir(const RunConfig& c) { return c.out / "nulltests"; }
fs::path cascade_dir(const RunConfig& c) { return c.out / "cascades"; }

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("--out: cannot create {}: {}", dir.string(), ec.message()));
}

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  try {
    return json::parse(ingest::read_file(path));
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

// Missing upstream artifacts are configuration errors: the user ran a stage
// before the stage it depends on.
fs::path require_artifact(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path))
    throw ConfigError(fmt::format("missing {} (run the {} stage first)", path.string(), producer));
  return path;
}

fs::path require_input(const fs::path& path, std::string_view flag, std::string_view stage) {
  if (path.empty()) throw ConfigError(fmt::format("{} is required for the {} stage", flag, stage));
  if (!fs::exists(path)) throw ConfigError(fmt::format("{}: no such file: {}", flag, path.string()));
  return path;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Data rows of a CSV artifact keyed by column name.
class Table {
 public:
  explicit Table(const fs::path& path) : path_(path) {
    const auto content = ingest::read_file(path);
    bool first = true;
    for (auto line : csv::lines(content)) {
      auto fields = csv::split(line);
      if (first) {
        for (std::size_t i = 0; i < fields.size(); ++i) columns_[fields[i]] = i;
        first = false;
        continue;
      }
      if (fields.size() != columns_.size())
        throw DataError(fmt::format("{}: row with {} fields, expected {}", path.string(), fields.size(),
                                    columns_.size()));
      rows_.push_back(std::move(fields));
    }
  }
  std::size_t size() const { return rows_.size(); }
  const std::string& at(std::size_t row, std::string_view column) const {
    auto it = columns_.find(std::string(column));
    if (it == columns_.end()) throw DataError(fmt::format("{}: no column {}", path_.string(), column));
    return rows_[row][it->second];
  }
  double number(std::size_t row, std::string_view column) const {
    const auto& s = at(row, column);
    if (s.empty()) return kNaN;
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw DataError(fmt::format("{}: bad number '{}'", path_.string(), s));
    }
  }

 private:
  fs::path path_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// ---- shared loaders ---------------------------------------------------------

std::vector<ingest::TweetRecord> load_ingested(const RunConfig& c) {
  const auto path = require_artifact(ingest_dir(c) / "tweets.jsonl", "ingest");
  ingest::IngestOptions strict{true};
  return ingest::load_tweets(path, ingest::HashtagTimeFilter{}, strict).records;
}

// The analysed network with each edge's tweets and the per-tweet scores
// (NaN for tweets outside the network), both indexed like the corpus.
struct Network {
  std::vector<ingest::TweetRecord> tweets;
  graph::MentionGraph graph;
  std::vector<double> scores;
};

Network load_network(const RunConfig& c) {
  Network net;
  net.tweets = load_ingested(c);
  const Table edges(require_artifact(graph_dir(c) / "edges.csv", "graph"));
  const Table scored(require_artifact(graph_dir(c) / "tweet_scores.csv", "graph"));

  std::unordered_map<std::string, double> score_of;
  for (std::size_t i = 0; i < scored.size(); ++i) score_of[scored.at(i, "tweet_id")] = scored.number(i, "score");

  std::map<std::pair<std::string, std::string>, graph::NamedEdge> by_pair;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    graph::NamedEdge e{edges.at(i, "src"), edges.at(i, "dst"),
                       static_cast<std::uint32_t>(edges.number(i, "mention_count")),
                       edges.number(i, "sentiment_weight"),
                       {}};
    by_pair[{e.src, e.dst}] = std::move(e);
  }
  net.scores.assign(net.tweets.size(), kNaN);
  for (std::uint32_t t = 0; t < net.tweets.size(); ++t) {
    const auto& tw = net.tweets[t];
    auto it = score_of.find(tw.tweet_id);
    if (it == score_of.end()) continue;
    net.scores[t] = it->second;
    std::set<std::string> targets(tw.mentions.begin(), tw.mentions.end());
    for (const auto& m : targets) {
      auto e = by_pair.find({tw.user_id, m});
      if (e != by_pair.end()) e->second.tweets.push_back(t);
    }
  }
  std::vector<graph::NamedEdge> list;
  for (auto& [key, e] : by_pair) list.push_back(std::move(e));
  net.graph = graph::MentionGraph::from_edges(std::move(list));
  return net;
}

struct UserRow {
  std::optional<double> sent_out;
  std::optional<double> sent_in;
  sentiment::Polarity polarity = sentiment::Polarity::unknown;
};

std::map<std::string, sentiment::UserSentiment> load_users(const RunConfig& c) {
  const Table t(require_artifact(graph_dir(c) / "users.csv", "graph"));
  std::map<std::string, sentiment::UserSentiment> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sentiment::UserSentiment u;
    const double so = t.number(i, "sent_out");
    const double si = t.number(i, "sent_in");
    if (!std::isnan(so)) u.sent_out = so;
    if (!std::isnan(si)) u.sent_in = si;
    u.n_out = static_cast<std::size_t>(t.number(i, "n_out"));
    u.n_in = static_cast<std::size_t>(t.number(i, "n_in"));
    u.polarity = sentiment::polarity_of(u.sent_out);
    out[t.at(i, "user_id")] = u;
  }
  return out;
}

struct PartitionRow {
  std::int32_t community = -1;  // 0-based; -1 outside the kept communities
  community::SideLabel side = community::SideLabel::unlabeled;
};

std::map<std::string, PartitionRow> load_partition(const RunConfig& c) {
  const Table t(require_artifact(community_dir(c) / "partition.csv", "communities"));
  std::map<std::string, PartitionRow> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    PartitionRow row;
    const auto& comm = t.at(i, "community");
    if (!comm.empty()) row.community = std::stoi(comm) - 1;
    const auto& side = t.at(i, "side");
    if (side == "yes") row.side = community::SideLabel::yes;
    if (side == "no") row.side = community::SideLabel::no;
    out[t.at(i, "user_id")] = row;
  }
  return out;
}

// Recoverable statistical failures become warnings unless --strict.
template <class Fn>
bool attempt(const RunConfig& c, std::vector<std::string>& warnings, Fn&& fn) {
  try {
    fn();
    return true;
  } catch (const DataError& e) {
    if (c.strict) throw;
    warnings.push_back(e.what());
    return false;
  }
}

std::string day_of(ingest::Timestamp t) {
  return ingest::format_timestamp(t).substr(0, 10);
}

json stats_json(const graph::GraphStats& s) {
  return json{{"nodes", s.nodes},
              {"edges", s.edges},
              {"mentions", s.mentions},
              {"reciprocal_pairs", s.reciprocal_pairs},
              {"avg_out_degree", s.avg_out_degree},
              {"avg_out_mentions", s.avg_out_mentions},
              {"average_clustering", s.average_clustering},
              {"transitivity", s.transitivity},
              {"average_geodesic", number_or_null(s.average_geodesic)}};
}

json null_json(const nullmodels::NullTestResult& r, std::size_t replicates) {
  return json{{"name", r.name},
              {"observed", r.observed},
              {"q025", r.q025},
              {"q50", r.q50},
              {"q975", r.q975},
              {"verdict", nullmodels::to_string(r.verdict)},
              {"R", replicates},
              {"undefined_replicates", r.undefined},
              {"seed", r.seed}};
}

void write_replicates(const fs::path& path, const std::vector<nullmodels::NullTestResult>& results) {
  csv::Writer w(path);
  w.header({"test", "replicate", "value"});
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.replicates.size(); ++i) w.row(r.name, i, r.replicates[i]);
}

}  // namespace

// ---- names ------------------------------------------------------------------

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::score: return "score";
    case Stage::graph: return "graph";
    case Stage::communities: return "communities";
    case Stage::nulltest: return "nulltest";
    case Stage::cascades: return "cascades";
    case Stage::report: return "report";
  }
  return "ingest";
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages{Stage::ingest,   Stage::score,    Stage::graph, Stage::communities,
                                         Stage::nulltest, Stage::cascades, Stage::report};
  return stages;
}

std::optional<Stage> parse_stage(std::string_view text) {
  for (auto s : all_stages())
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::string_view to_string(NullTest t) {
  switch (t) {
    case NullTest::correlation: return "correlation";
    case NullTest::linkclass: return "linkclass";
    case NullTest::assortativity: return "assortativity";
  }
  return "correlation";
}

std::optional<NullTest> parse_null_test(std::string_view text) {
  for (auto t : {NullTest::correlation, NullTest::linkclass, NullTest::assortativity})
    if (to_string(t) == text) return t;
  return std::nullopt;
}

// ---- stages -----------------------------------------------------------------

void run_ingest(const RunConfig& c) {
  const auto path = require_input(c.tweets, "--tweets", "ingest");
  ingest::HashtagTimeFilter filter;
  for (const auto& h : c.hashtags) filter.add_hashtag(h);
  filter.start = c.start;
  filter.end = c.end;
  if (c.start && c.end && *c.end < *c.start) throw ConfigError("--end is before --start");
  auto corpus = ingest::load_tweets(path, filter, ingest::IngestOptions{c.strict});

  make_dir(ingest_dir(c));
  ingest::write_tweets(ingest_dir(c) / "tweets.jsonl", corpus.records);
  const auto& r = corpus.report;
  json rejected = json::object();
  for (const auto& [reason, n] : r.rejected) rejected[reason] = n;
  write_json(ingest_dir(c) / "report.json", json{{"total_lines", r.total_lines},
                                                  {"kept", r.kept},
                                                  {"filtered", r.filtered},
                                                  {"skipped", r.skipped},
                                                  {"originals", r.originals},
                                                  {"retweets", r.retweets},
                                                  {"replies", r.replies},
                                                  {"users", r.users},
                                                  {"rejected", rejected}});
}

void run_score(const RunConfig& c) {
  const auto lexicon_path = require_input(c.lexicon, "--lexicon", "score");
  const auto tweets = load_ingested(c);
  const auto lexicon = ingest::load_lexicon(lexicon_path, ingest::IngestOptions{c.strict});
  make_dir(score_dir(c));
  csv::Writer w(score_dir(c) / "raw_scores.csv");
  w.header({"tweet_id", "raw_pos", "raw_neg"});
  for (const auto& t : tweets) {
    const auto raw = sentiment::score_text(t.text, lexicon);
    w.row(t.tweet_id, raw.pos, raw.neg);
  }
  write_json(score_dir(c) / "lexicon_report.json", json{{"words", lexicon.scores.size()},
                                                         {"duplicates", lexicon.duplicates},
                                                         {"clamped", lexicon.clamped},
                                                         {"malformed", lexicon.malformed}});
}

void run_graph(const RunConfig& c) {
  const auto tweets = load_ingested(c);
  const Table raw_table(require_artifact(score_dir(c) / "raw_scores.csv", "score"));
  std::unordered_map<std::string, sentiment::RawScore> raw_of;
  for (std::size_t i = 0; i < raw_table.size(); ++i)
    raw_of[raw_table.at(i, "tweet_id")] = {static_cast<std::int64_t>(raw_table.number(i, "raw_pos")),
                                           static_cast<std::int64_t>(raw_table.number(i, "raw_neg"))};

  const auto full = graph::build_mention_graph(tweets);
  const auto mutual = graph::mutual_reduce(full);
  const auto scc = graph::largest_scc(mutual);
  if (scc.edge_count() == 0) throw DataError("the mutual mention network is empty");

  // Network tweets: those carried by an edge of the final graph.
  std::set<std::uint32_t> network;
  for (const auto& e : scc.edges()) network.insert(e.tweets.begin(), e.tweets.end());
  std::vector<std::uint32_t> order(network.begin(), network.end());
  std::vector<sentiment::RawScore> raw;
  raw.reserve(order.size());
  for (auto t : order) {
    auto it = raw_of.find(tweets[t].tweet_id);
    if (it == raw_of.end()) throw DataError(fmt::format("tweet {} has no raw score", tweets[t].tweet_id));
    raw.push_back(it->second);
  }
  const auto rescaled = sentiment::rescale_corpus(raw);
  std::vector<double> scores(tweets.size(), kNaN);
  for (std::size_t i = 0; i < order.size(); ++i) scores[order[i]] = rescaled.tweets[i].score;
  const auto weighted = scc.with_sentiment_weights(scores);

  std::vector<sentiment::ScoredMention> mentions;
  for (auto t : order) {
    sentiment::ScoredMention m;
    m.sender = tweets[t].user_id;
    m.score = scores[t];
    const auto src = weighted.find(m.sender);
    std::set<std::string> targets(tweets[t].mentions.begin(), tweets[t].mentions.end());
    for (const auto& r : targets) {
      const auto dst = weighted.find(r);
      if (src && dst && weighted.has_edge(*src, *dst)) m.receivers.push_back(r);
    }
    mentions.push_back(std::move(m));
  }
  const auto users = sentiment::aggregate_users(mentions);
  const auto stats = graph::compute_stats(weighted, c.threads);

  make_dir(graph_dir(c));
  {
    csv::Writer w(graph_dir(c) / "edges.csv");
    w.header({"src", "dst", "mention_count", "sentiment_weight"});
    for (const auto& e : weighted.edges())
      w.row(weighted.name(e.src), weighted.name(e.dst), e.mention_count, e.sentiment_weight);
  }
  {
    csv::Writer w(graph_dir(c) / "mentions.csv");
    w.header({"src", "dst", "mention_count"});
    for (const auto& e : full.edges()) w.row(full.name(e.src), full.name(e.dst), e.mention_count);
  }
  {
    csv::Writer w(graph_dir(c) / "tweet_scores.csv");
    w.header({"tweet_id", "raw_pos", "raw_neg", "score"});
    for (std::size_t i = 0; i < order.size(); ++i)
      w.row(tweets[order[i]].tweet_id, raw[i].pos, raw[i].neg, rescaled.tweets[i].score);
  }
  {
    csv::Writer w(graph_dir(c) / "users.csv");
    w.header({"user_id", "sent_out", "sent_in", "n_out", "n_in", "polarity"});
    for (const auto& name : weighted.nodes()) {
      sentiment::UserSentiment u;
      if (auto it = users.find(name); it != users.end()) u = it->second;
      w.row(name, u.sent_out.value_or(kNaN), u.sent_in.value_or(kNaN), u.n_out, u.n_in,
            sentiment::to_string(u.polarity));
    }
  }
  {
    csv::Writer w(graph_dir(c) / "degree_ccdf.csv");
    w.header({"direction", "degree", "fraction"});
    for (const auto& p : stats.in_degree_ccdf) w.row("in", p.value, p.fraction);
    for (const auto& p : stats.out_degree_ccdf) w.row("out", p.value, p.fraction);
  }
  {
    csv::Writer w(graph_dir(c) / "node_stats.csv");
    w.header({"user_id", "clustering", "mean_geodesic"});
    for (graph::NodeId u = 0; u < weighted.node_count(); ++u)
      w.row(weighted.name(u), stats.clustering[u], stats.mean_geodesic[u]);
  }
  std::size_t users_with_both = 0;
  for (const auto& [name, u] : users)
    if (u.sent_in && u.sent_out) ++users_with_both;
  write_json(graph_dir(c) / "summary.json",
             json{{"full", {{"nodes", full.node_count()}, {"edges", full.edge_count()}}},
                  {"mutual", {{"nodes", mutual.node_count()}, {"edges", mutual.edge_count()}}},
                  {"network", stats_json(stats)},
                  {"network_tweets", order.size()},
                  {"users_with_in_and_out", users_with_both},
                  {"rescaling",
                   {{"max_raw_pos", rescaled.scaling.max_pos},
                    {"min_raw_neg", rescaled.scaling.min_neg},
                    {"pos_divisor", rescaled.scaling.pos_divisor()},
                    {"neg_divisor", rescaled.scaling.neg_divisor()}}}});
}

void run_communities(const RunConfig& c) {
  const auto net = load_network(c);
  const auto users = load_users(c);
  const auto& g = net.graph;
  std::vector<std::string> warnings;

  const auto raw = community::louvain(g, c.seed);
  for (const auto& w : raw.warnings) warnings.push_back(w);
  const auto kept = community::filter_significant(raw, c.min_community_size, c.top_k);
  for (const auto& w : kept.warnings)
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  const auto summaries = community::summarize(kept, g, users);

  community::SideLabeling sides;
  sides.community_side.assign(kept.community_count(), community::SideLabel::unlabeled);
  sides.node_side.assign(g.node_count(), community::SideLabel::unlabeled);
  attempt(c, warnings, [&] { sides = community::classify_sides(kept, g, users); });
  for (const auto& w : sides.warnings) warnings.push_back(w);

  json validation = nullptr;
  if (!c.annotations.empty()) {
    const auto truth = ingest::load_annotations(require_input(c.annotations, "--annotations", "communities"));
    std::map<std::string, community::SideLabel> labels;
    for (graph::NodeId u = 0; u < g.node_count(); ++u) labels[g.name(u)] = sides.node_side[u];
    attempt(c, warnings, [&] {
      const auto v = community::validate(labels, truth);
      validation = json{{"tp", v.confusion.tp},
                        {"fn", v.confusion.fn},
                        {"tn", v.confusion.tn},
                        {"fp", v.confusion.fp},
                        {"unmatched", v.confusion.unmatched},
                        {"recall_yes", optional_json(v.recall_yes)},
                        {"recall_no", optional_json(v.recall_no)},
                        {"balanced_accuracy", v.balanced_accuracy}};
    });
  }

  // k-means over every community large enough to count, on (sent_in, sent_out)
  json merge = nullptr;
  {
    const auto large = community::filter_significant(raw, c.min_community_size, std::nullopt);
    const auto large_summaries = community::summarize(large, g, users);
    std::size_t usable = 0;
    for (const auto& s : large_summaries)
      if (s.mean_sent_in && s.mean_sent_out) ++usable;
    if (usable >= 2) {
      community::KMeansOptions options;
      options.k = 2;
      options.seed = c.seed;
      const auto m = community::kmeans_merge(large, large_summaries, options);
      json clusters = json::array();
      for (std::size_t k = 0; k < m.partition.community_count(); ++k)
        clusters.push_back(json{{"cluster", k + 1}, {"size", m.partition.sizes[k]}});
      merge = json{{"communities", large.community_count()},
                   {"k", m.kmeans.k},
                   {"sse", m.kmeans.sse},
                   {"silhouette", m.kmeans.silhouette},
                   {"clusters", clusters},
                   {"warnings", m.kmeans.warnings}};
    }
  }

  const auto fractions = community::link_fractions_by_community(g, sides.node_side);
  const auto blocks = community::block_summaries(g, kept);

  make_dir(community_dir(c));
  {
    csv::Writer w(community_dir(c) / "partition.csv");
    w.header({"user_id", "community", "side"});
    for (graph::NodeId u = 0; u < g.node_count(); ++u) {
      const auto comm = kept.assignment[u];
      w.row(g.name(u), comm >= 0 ? std::to_string(comm + 1) : std::string(),
            community::to_string(sides.node_side[u]));
    }
  }
  {
    csv::Writer w(community_dir(c) / "link_fractions.csv");
    w.header({"user_id", "side", "labeled_out_links", "to_yes", "to_no"});
    for (const auto& f : fractions.users)
      w.row(f.user, community::to_string(f.side), f.labeled_out_links, f.to_yes, f.to_no);
  }
  {
    // daily network activity per community
    std::map<std::pair<std::string, std::int32_t>, std::vector<double>> daily;
    for (std::size_t t = 0; t < net.tweets.size(); ++t) {
      if (std::isnan(net.scores[t])) continue;
      const auto u = g.find(net.tweets[t].user_id);
      if (!u || kept.assignment[*u] < 0) continue;
      daily[{day_of(net.tweets[t].created_at), kept.assignment[*u]}].push_back(net.scores[t]);
    }
    csv::Writer w(community_dir(c) / "activity.csv");
    w.header({"date", "community", "tweets", "tweets_per_user", "mean_sent_out"});
    for (const auto& [key, s] : daily)
      w.row(key.first, key.second + 1, s.size(),
            static_cast<double>(s.size()) / static_cast<double>(kept.sizes[key.second]), stats::mean(s));
  }

  json communities = json::array();
  for (const auto& s : summaries)
    communities.push_back(json{{"community", s.id + 1},
                               {"size", s.size},
                               {"side", community::to_string(sides.community_side[s.id])},
                               {"mean_sent_out", optional_json(s.mean_sent_out)},
                               {"mean_sent_in", optional_json(s.mean_sent_in)}});
  json block_json = json::array();
  for (const auto& b : blocks)
    block_json.push_back(json{{"block", b.name},
                              {"nodes", b.nodes},
                              {"links", b.links},
                              {"avg_out_degree", b.avg_out_degree},
                              {"avg_clustering", b.avg_clustering},
                              {"density", b.density}});
  write_json(community_dir(c) / "summary.json",
             json{{"algorithm", "louvain"},
                  {"seed", c.seed},
                  {"modularity", raw.modularity},
                  {"detected_communities", raw.community_count()},
                  {"min_size", c.min_community_size},
                  {"top_k", c.top_k},
                  {"communities", communities},
                  {"validation", validation},
                  {"kmeans_merge", merge},
                  {"link_fractions",
                   {{"users", fractions.users.size()},
                    {"yes_to_yes", fractions.yes_yes},
                    {"yes_to_no", fractions.yes_no},
                    {"no_to_yes", fractions.no_yes},
                    {"no_to_no", fractions.no_no},
                    {"mean_same_side", fractions.mean_same_side}}},
                  {"blocks", block_json},
                  {"warnings", warnings}});
}

void run_nulltest(const RunConfig& c, NullTest test) {
  if (c.replicates == 0) throw ConfigError("--replicates must be positive");
  nullmodels::NullOptions options{c.replicates, c.seed, c.threads};
  const auto net = load_network(c);
  const auto& g = net.graph;
  std::vector<nullmodels::NullTestResult> results;

  switch (test) {
    case NullTest::correlation: {
      const auto conn = nullmodels::collect_connections(g, net.scores);
      results.push_back(nullmodels::sentiment_correlation_test(conn, options));
      break;
    }
    case NullTest::linkclass: {
      const auto users = load_users(c);
      std::vector<std::int32_t> labels(g.node_count(), 2);
      for (graph::NodeId u = 0; u < g.node_count(); ++u) {
        auto it = users.find(g.name(u));
        if (it == users.end()) continue;
        if (it->second.polarity == sentiment::Polarity::positive) labels[u] = 0;
        if (it->second.polarity == sentiment::Polarity::negative) labels[u] = 1;
      }
      results = nullmodels::link_class_fraction_test(g, labels, options);
      break;
    }
    case NullTest::assortativity: {
      const auto partition = load_partition(c);
      std::vector<std::int32_t> labels(g.node_count(), -1);
      for (graph::NodeId u = 0; u < g.node_count(); ++u)
        if (auto it = partition.find(g.name(u)); it != partition.end()) labels[u] = it->second.community;
      results.push_back(nullmodels::assortativity_test(g, labels, options));
      break;
    }
  }

  make_dir(null_dir(c));
  const auto name = std::string(to_string(test));
  json tests = json::array();
  for (const auto& r : results) tests.push_back(null_json(r, c.replicates));
  write_json(null_dir(c) / (name + ".json"), json{{"test", name}, {"results", tests}});
  write_replicates(null_dir(c) / (name + "_replicates.csv"), results);
}

void run_cascades(const RunConfig& c) {
  const auto partition = load_partition(c);
  const auto tweets = load_ingested(c);

  std::unique_ptr<cascades::EdgeOracle> oracle;
  graph::MentionGraph full;
  ingest::FollowerGraph followers;
  if (c.strategy == cascades::Strategy::mention) {
    const Table t(require_artifact(graph_dir(c) / "mentions.csv", "graph"));
    std::vector<graph::NamedEdge> edges;
    for (std::size_t i = 0; i < t.size(); ++i)
      edges.push_back({t.at(i, "src"), t.at(i, "dst"), static_cast<std::uint32_t>(t.number(i, "mention_count")),
                       0.0, {}});
    full = graph::MentionGraph::from_edges(std::move(edges));
    oracle = std::make_unique<cascades::MentionOracle>(full);
  } else {
    followers = ingest::load_followers(require_input(c.followers, "--followers", "cascades"));
    oracle = std::make_unique<cascades::FollowerOracle>(followers);
  }

  const auto buckets = cascades::bucket_retweets(tweets);
  auto rec = cascades::reconstruct(buckets, *oracle, c.threads);
  std::map<std::string, cascades::Side> sides;
  for (const auto& [user, row] : partition) {
    if (row.side == community::SideLabel::yes) sides[user] = cascades::Side::yes;
    if (row.side == community::SideLabel::no) sides[user] = cascades::Side::no;
  }
  cascades::tag_sides(rec.cascades, sides);
  const auto report = cascades::diffusion_analysis(rec.cascades, c.min_classified);

  std::vector<cascades::CascadeScores> scores;
  scores.reserve(rec.cascades.size());
  for (const auto& t : rec.cascades) scores.push_back(cascades::score_cascade(t));
  const auto dist = cascades::score_distributions(scores);

  make_dir(cascade_dir(c));
  {
    csv::Writer w(cascade_dir(c) / "cascades.csv");
    w.header({"cascade_id", "bucket_id", "root_user", "n", "max_depth", "avg_depth", "virality", "seed_side",
              "prop_yes", "n_classified"});
    for (std::size_t i = 0; i < rec.cascades.size(); ++i) {
      const auto& t = rec.cascades[i];
      const auto s = cascades::cascade_sides(t);
      w.row(t.cascade_id, t.bucket_id, t.seed().user_id, t.size(), scores[i].max_depth, scores[i].avg_depth,
            scores[i].virality.value_or(kNaN), cascades::to_string(t.seed().side), s.prop_yes.value_or(kNaN),
            s.classified);
    }
  }
  {
    csv::Writer w(cascade_dir(c) / "edges.csv");
    w.header({"cascade_id", "child_user", "parent_user", "child_time"});
    for (const auto& t : rec.cascades)
      for (const auto& n : t.nodes)
        if (n.parent >= 0)
          w.row(t.cascade_id, n.user_id, t.nodes[n.parent].user_id, ingest::format_timestamp(n.created_at));
  }
  {
    csv::Writer w(cascade_dir(c) / "score_ccdf.csv");
    w.header({"metric", "value", "fraction"});
    for (const auto& m : dist.metrics)
      for (const auto& p : m.ccdf) w.row(m.name, p.value, p.fraction);
  }

  auto table_json = [](const cascades::ChangeTable& t) {
    json j = json::object();
    for (auto b : {cascades::ChangeBin::changed, cascades::ChangeBin::half_to_sixty,
                   cascades::ChangeBin::sixty_to_full, cascades::ChangeBin::unchanged})
      j[std::string(cascades::to_string(b))] = t.counts[static_cast<std::size_t>(b)];
    j["total"] = t.total();
    return j;
  };
  std::size_t total_members = 0;
  for (const auto& b : buckets.buckets) total_members += b.members.size();
  const auto& br = buckets.report;
  json metrics = json::array();
  for (const auto& m : dist.metrics)
    metrics.push_back(json{{"metric", m.name},
                           {"mode", number_or_null(m.mode)},
                           {"median", number_or_null(m.median)},
                           {"mean", number_or_null(m.mean)}});
  write_json(cascade_dir(c) / "diffusion.json",
             json{{"strategy", cascades::to_string(c.strategy)},
                  {"buckets",
                   {{"tweets", br.tweets},
                    {"replies_excluded", br.replies_excluded},
                    {"empty_text_dropped", br.empty_text_dropped},
                    {"buckets", br.buckets},
                    {"multi_member_buckets", br.multi_member_buckets},
                    {"never_retweeted", br.never_retweeted},
                    {"members", total_members}}},
                  {"cascades", rec.cascades.size()},
                  {"duplicates_dropped", rec.duplicates_dropped},
                  {"multi_node_cascades", report.cascades},
                  {"yes_seeded", report.yes_seeded},
                  {"no_seeded", report.no_seeded},
                  {"unknown_seeded", report.unknown_seeded},
                  {"largest_yes", report.largest_yes},
                  {"largest_no", report.largest_no},
                  {"change", {{"all", table_json(report.all)},
                              {"yes_seeded", table_json(report.yes_table)},
                              {"no_seeded", table_json(report.no_table)}}},
                  {"seed_side_majority", number_or_null(report.seed_side_majority())},
                  {"min_classified", report.min_classified},
                  {"prop_yes_cascades", report.prop_yes.size()},
                  {"prop_yes_histogram", report.prop_yes_histogram},
                  {"mixed_0.25_0.75", report.mixed},
                  {"scores",
                   {{"cascades", dist.cascades},
                    {"metrics", metrics},
                    {"pearson",
                     {{"max_depth_avg_depth", number_or_null(dist.depth_vs_avg_depth)},
                      {"max_depth_virality", number_or_null(dist.depth_vs_virality)},
                      {"avg_depth_virality", number_or_null(dist.avg_depth_vs_virality)}}}}}});
}

void run_report(const RunConfig& c) {
  auto section = [&](const fs::path& path) { return fs::exists(path) ? read_json(path) : json(nullptr); };
  json nulls = json::object();
  for (auto t : {NullTest::correlation, NullTest::linkclass, NullTest::assortativity}) {
    const auto path = null_dir(c) / (std::string(to_string(t)) + ".json");
    json entry = nullptr;
    if (fs::exists(path)) {
      entry = json::array();
      const auto stored = read_json(path);
      for (const auto& r : stored["results"])
        entry.push_back(json{{"name", r["name"]}, {"observed", r["observed"]}, {"q025", r["q025"]},
                             {"q975", r["q975"]}, {"verdict", r["verdict"]}});
    }
    nulls[std::string(to_string(t))] = entry;
  }
  json hashtags = json::array();
  for (const auto& h : c.hashtags) hashtags.push_back(ingest::HashtagTimeFilter::normalize_tag(h));
  json summary{{"schema_version", kSchemaVersion},
               {"config",
                {{"seed", c.seed},
                 {"replicates", c.replicates},
                 {"strict", c.strict},
                 {"hashtags", hashtags},
                 {"start", c.start ? json(ingest::format_timestamp(*c.start)) : json(nullptr)},
                 {"end", c.end ? json(ingest::format_timestamp(*c.end)) : json(nullptr)},
                 {"min_community_size", c.min_community_size},
                 {"top_k", c.top_k},
                 {"strategy", cascades::to_string(c.strategy)},
                 {"min_classified", c.min_classified}}},
               {"tweets", section(ingest_dir(c) / "report.json")},
               {"graph", section(graph_dir(c) / "summary.json")},
               {"communities", section(community_dir(c) / "summary.json")},
               {"nulltests", nulls},
               {"cascades", section(cascade_dir(c) / "diffusion.json")}};
  make_dir(c.out);
  write_json(c.out / "summary.json", summary);
}

void run_stage(const RunConfig& config, Stage stage) {
  switch (stage) {
    case Stage::ingest: return run_ingest(config);
    case Stage::score: return run_score(config);
    case Stage::graph: return run_graph(config);
    case Stage::communities: return run_communities(config);
    case Stage::nulltest: {
      std::vector<std::string> warnings;
      for (auto t : {NullTest::correlation, NullTest::linkclass, NullTest::assortativity}) {
        if (!attempt(config, warnings, [&] { run_nulltest(config, t); })) {
          make_dir(null_dir(config));
          write_json(null_dir(config) / (std::string(to_string(t)) + ".json"),
                     json{{"test", to_string(t)}, {"results", json::array()}, {"error", warnings.back()}});
        }
      }
      return;
    }
    case Stage::cascades: return run_cascades(config);
    case Stage::report: return run_report(config);
  }
}

void run_pipeline(const RunConfig& config) {
  make_dir(config.out);
  const auto marker = config.out / "FAILED";
  std::filesystem::remove(marker);
  for (auto stage : all_stages()) {
    try {
      run_stage(config, stage);
    } catch (const std::exception& e) {
      std::ofstream out(marker, std::ios::binary);
      out << "stage: " << to_string(stage) << '\n' << "error: " << e.what() << '\n';
      throw;
    }
  }
}

}  // namespace polarnet::pipeline
