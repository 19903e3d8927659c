#include "polarnet/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <set>

#include "polarnet/csv.hpp"
#include "polarnet/error.hpp"

namespace polarnet::synth {

namespace {

constexpr int kSentimentSlots = 10;

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

class Builder {
 public:
  Builder(const SynthConfig& config) : config_(config), engine_(config.seed) {
    const std::size_t n = config.users_yes + config.users_no;
    out_adj_.resize(n);
    in_cascades_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      names_.push_back(user_name(i));
      yes_.push_back(i < config.users_yes);
    }
    time_ = ingest::Timestamp{std::chrono::sys_days{std::chrono::year{2015} / 5 / 1}};
  }

  SynthCorpus run() {
    draw_links();
    for (std::size_t c = 0; c < config_.cascades; ++c) plant_cascade(c);

    corpus_.lexicon_tsv = "good\t1\nbad\t-1\n";
    for (std::size_t u = 0; u < names_.size(); ++u)
      corpus_.sides[names_[u]] = yes_[u] ? ingest::Side::yes : ingest::Side::no;
    pick_annotations();
    for (std::size_t u = 0; u < out_adj_.size(); ++u)
      for (auto v : out_adj_[u]) corpus_.follows.emplace_back(names_[u], names_[v]);
    std::sort(corpus_.follows.begin(), corpus_.follows.end());
    return std::move(corpus_);
  }

 private:
  std::size_t user_count() const { return names_.size(); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  // Lexicon words carrying a sentiment drawn for one side.
  std::string sentiment_words(bool yes) {
    const double mean = yes ? config_.mean_yes : config_.mean_no;
    double s = mean;
    if (config_.spread > 0.0) s = std::normal_distribution<double>(mean, config_.spread)(engine_);
    s = std::clamp(s, -1.0, 1.0);
    const int count = static_cast<int>(std::lround(std::abs(s) * kSentimentSlots));
    std::string words;
    for (int i = 0; i < count; ++i) {
      if (!words.empty()) words += ' ';
      words += s > 0 ? "good" : "bad";
    }
    return words;
  }

  ingest::TweetRecord& new_tweet(std::size_t author) {
    time_ += std::chrono::seconds(1 + std::uniform_int_distribution<int>(0, 29)(engine_));
    ingest::TweetRecord t;
    t.tweet_id = fmt::format("t{:08}", corpus_.tweets.size() + 1);
    t.user_id = names_[author];
    t.created_at = time_;
    t.hashtags = {"synth"};
    corpus_.tweets.push_back(std::move(t));
    return corpus_.tweets.back();
  }

  void mention_tweet(std::size_t from, std::size_t to) {
    const auto words = sentiment_words(yes_[from]);
    auto& t = new_tweet(from);
    t.text = fmt::format("@{} {} #synth n{}", names_[to], words, corpus_.tweets.size());
    t.mentions = {names_[to]};
  }

  void add_link(std::size_t from, std::size_t to) {
    out_adj_[from].insert(static_cast<std::uint32_t>(to));
    const auto tweets =
        std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, config_.max_tweets_per_link))(engine_);
    for (std::size_t i = 0; i < tweets; ++i) mention_tweet(from, to);
  }

  void draw_links() {
    const std::size_t n = user_count();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = yes_[i] == yes_[j] ? config_.p_in : config_.p_out;
        if (uniform() < p) {
          add_link(i, j);
          add_link(j, i);
        }
      }
    }
    if (config_.p_one_way > 0.0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && !out_adj_[i].count(static_cast<std::uint32_t>(j)) && uniform() < config_.p_one_way)
            add_link(i, j);
    }
  }

  bool shared_cascade(std::size_t a, std::size_t b) const {
    for (auto c : in_cascades_[a])
      if (in_cascades_[b].count(c)) return true;
    return false;
  }

  // A user can retweet from `parent_pos` only if they link to no member that
  // tweeted after the parent; otherwise that member would be the parent.
  bool clear_after(std::size_t u, const std::vector<std::size_t>& members, std::size_t parent_pos) const {
    for (std::size_t k = parent_pos + 1; k < members.size(); ++k)
      if (out_adj_[u].count(static_cast<std::uint32_t>(members[k]))) return false;
    return true;
  }

  void plant_cascade(std::size_t id) {
    const bool seed_yes = uniform() < 0.5;
    std::vector<std::size_t> side_users;
    for (std::size_t u = 0; u < user_count(); ++u)
      if (yes_[u] == seed_yes) side_users.push_back(u);
    const std::size_t seed = side_users[std::uniform_int_distribution<std::size_t>(0, side_users.size() - 1)(engine_)];

    PlantedCascade planted;
    planted.id = id;
    std::vector<std::size_t> members{seed};
    std::set<std::size_t> in_tree{seed};

    auto& root = new_tweet(seed);
    const std::string message = fmt::format("story{} {} #synth", id, sentiment_words(yes_[seed]));
    root.text = message;
    const std::string root_id = root.tweet_id;
    planted.nodes.push_back({names_[seed], "", root_id});

    std::geometric_distribution<std::size_t> offspring(1.0 / (1.0 + config_.branching));
    std::deque<std::size_t> queue{0};
    while (!queue.empty() && members.size() < config_.max_cascade_size) {
      const std::size_t pos = queue.front();
      queue.pop_front();
      const std::size_t parent = members[pos];
      const std::size_t children = config_.branching > 0.0 ? offspring(engine_) : 0;
      for (std::size_t k = 0; k < children && members.size() < config_.max_cascade_size; ++k) {
        const bool flip = uniform() < config_.cross_side_retweet_prob;
        const bool side = flip ? !yes_[parent] : yes_[parent];
        std::vector<std::size_t> linked, linkable;
        for (std::size_t u = 0; u < user_count(); ++u) {
          if (yes_[u] != side || in_tree.count(u) || !clear_after(u, members, pos)) continue;
          if (out_adj_[u].count(static_cast<std::uint32_t>(parent)))
            linked.push_back(u);
          else if (!shared_cascade(u, parent))
            linkable.push_back(u);
        }
        const auto& pool = linked.empty() ? linkable : linked;
        if (pool.empty()) continue;
        const std::size_t child = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(engine_)];
        if (linked.empty()) {
          out_adj_[child].insert(static_cast<std::uint32_t>(parent));
          mention_tweet(child, parent);
        }
        auto& rt = new_tweet(child);
        rt.kind = ingest::TweetKind::retweet;
        rt.text = fmt::format("RT @{}: {}", names_[seed], message);
        rt.retweet_of = root_id;
        planted.nodes.push_back({names_[child], names_[parent], rt.tweet_id});
        members.push_back(child);
        in_tree.insert(child);
        queue.push_back(members.size() - 1);
      }
    }
    for (auto u : members) in_cascades_[u].insert(id);
    corpus_.cascades.push_back(std::move(planted));
  }

  void pick_annotations() {
    for (bool side : {true, false}) {
      std::vector<std::size_t> users;
      for (std::size_t u = 0; u < user_count(); ++u)
        if (yes_[u] == side) users.push_back(u);
      std::shuffle(users.begin(), users.end(), engine_);
      const auto take = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(config_.annotated_fraction * static_cast<double>(users.size()))));
      for (std::size_t i = 0; i < std::min(take, users.size()); ++i)
        corpus_.annotations[names_[users[i]]] = side ? ingest::Side::yes : ingest::Side::no;
    }
  }

  const SynthConfig& config_;
  std::mt19937_64 engine_;
  std::vector<std::string> names_;
  std::vector<bool> yes_;
  std::vector<std::set<std::uint32_t>> out_adj_;
  std::vector<std::set<std::size_t>> in_cascades_;
  ingest::Timestamp time_;
  SynthCorpus corpus_;
};

}  // namespace

void SynthConfig::validate() const {
  if (users_yes == 0 || users_no == 0) throw ConfigError("synth: both sides need at least one user");
  for (auto [name, p] : {std::pair{"p_in", p_in}, {"p_out", p_out}, {"p_one_way", p_one_way},
                         {"cross_side_retweet_prob", cross_side_retweet_prob},
                         {"annotated_fraction", annotated_fraction}})
    if (!in_unit(p)) throw ConfigError(fmt::format("synth: {} must lie in [0, 1]", name));
  if (!(spread >= 0.0)) throw ConfigError("synth: spread must be non-negative");
  if (!(branching >= 0.0)) throw ConfigError("synth: branching must be non-negative");
  if (max_cascade_size == 0) throw ConfigError("synth: max_cascade_size must be positive");
  const double ny = static_cast<double>(users_yes);
  const double nn = static_cast<double>(users_no);
  const double deg_yes = p_in * (ny - 1) + p_out * nn + p_one_way * (ny + nn - 1);
  const double deg_no = p_in * (nn - 1) + p_out * ny + p_one_way * (ny + nn - 1);
  if (deg_yes < 1.0 || deg_no < 1.0)
    throw ConfigError(fmt::format("synth: infeasible config, expected mention partners per user {:.3g} / {:.3g} < 1",
                                  deg_yes, deg_no));
}

std::string user_name(std::size_t index) { return fmt::format("u{:04}", index); }

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  return Builder(config).run();
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  ingest::write_tweets(dir / "tweets.jsonl", corpus.tweets);
  {
    std::ofstream lex(dir / "lexicon.tsv", std::ios::binary);
    if (!lex) throw ConfigError("cannot write " + (dir / "lexicon.tsv").string());
    lex << corpus.lexicon_tsv;
  }
  {
    csv::Writer w(dir / "annotations.csv");
    w.header({"user_id", "label"});
    for (const auto& [user, side] : corpus.annotations) w.row(user, ingest::to_string(side));
  }
  {
    csv::Writer w(dir / "followers.csv");
    w.header({"follower", "followed"});
    for (const auto& [a, b] : corpus.follows) w.row(a, b);
  }
  {
    csv::Writer w(dir / "truth_sides.csv");
    w.header({"user_id", "side"});
    for (const auto& [user, side] : corpus.sides) w.row(user, ingest::to_string(side));
  }
  {
    csv::Writer w(dir / "truth_cascades.csv");
    w.header({"cascade_id", "user_id", "parent_user", "tweet_id"});
    for (const auto& c : corpus.cascades)
      for (const auto& n : c.nodes) w.row(c.id, n.user_id, n.parent, n.tweet_id);
  }
}

}  // namespace polarnet::synth
