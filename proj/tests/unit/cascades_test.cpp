#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "polarnet/cascades.hpp"

using namespace polarnet;
using namespace polarnet::cascades;
using fixtures::tweet;
using ingest::TweetKind;

namespace {

RetweetBucket bucket_of(const std::vector<std::string>& users) {
  RetweetBucket b;
  for (std::size_t i = 0; i < users.size(); ++i) {
    BucketMember m;
    m.tweet_id = "t" + std::to_string(i);
    m.user_id = users[i];
    m.created_at = ingest::Timestamp{std::chrono::seconds{1000 + static_cast<long>(i)}};
    m.kind = i == 0 ? TweetKind::original : TweetKind::retweet;
    b.members.push_back(m);
  }
  return b;
}

// child user -> parent user ("" for roots)
std::map<std::string, std::string> parents_of(const Attribution& a) {
  std::map<std::string, std::string> out;
  for (const auto& t : a.trees)
    for (const auto& n : t.nodes) out[n.user_id] = n.parent < 0 ? "" : t.nodes[n.parent].user_id;
  return out;
}

// the attribution rule written out directly over the member list
std::map<std::string, std::string> brute_parents(const std::vector<std::string>& users, const PairOracle& oracle) {
  std::map<std::string, std::string> out;
  std::vector<std::string> seen;
  for (const auto& u : users) {
    if (std::find(seen.begin(), seen.end(), u) != seen.end()) continue;
    std::string parent;
    for (auto it = seen.rbegin(); it != seen.rend(); ++it)
      if (oracle.links(u, *it)) {
        parent = *it;
        break;
      }
    out[u] = parent;
    seen.push_back(u);
  }
  return out;
}

struct BruteScores {
  double max_depth, avg_depth, virality;
};

BruteScores brute_scores(const std::vector<std::int32_t>& parent) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 1; i < n; ++i) {
    adj[i].push_back(static_cast<std::size_t>(parent[i]));
    adj[static_cast<std::size_t>(parent[i])].push_back(i);
  }
  double total = 0, depth_sum = 0, depth_max = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::queue<std::size_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
      total += dist[t];
      if (s == 0) {
        depth_sum += dist[t];
        depth_max = std::max(depth_max, static_cast<double>(dist[t]));
      }
    }
  }
  return {depth_max, depth_sum / static_cast<double>(n),
          n > 1 ? total / static_cast<double>(n * (n - 1)) : NAN};
}

CascadeTree tree_with_sides(const std::vector<std::int32_t>& parent, const std::vector<Side>& sides) {
  CascadeTree t;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    CascadeNode n;
    n.user_id = "u" + std::to_string(i);
    n.parent = parent[i];
    n.side = sides[i];
    t.nodes.push_back(n);
  }
  return t;
}

}  // namespace

TEST_SUITE("cascades") {
  TEST_CASE("text normalization") {
    CHECK(normalize_text("Vote yes!") == "vote yes!");
    CHECK(normalize_text("RT @ann: Vote yes!") == "vote yes!");
    CHECK(normalize_text("rt @ann: RT @bob:  Vote   yes! https://t.co/x") == "vote yes!");
    CHECK(normalize_text("Vote yes! www.example.org http://a.b") == "vote yes!");
    CHECK(normalize_text("   ") == "");
    CHECK(normalize_text("https://t.co/x").empty());
    CHECK(normalize_text("see https://t.co/x now") == "see https://t.co/x now");
  }

  TEST_CASE("bucketing") {
    const std::vector<ingest::TweetRecord> tweets{
        tweet("1", "ann", 0, "Vote yes!"),
        tweet("2", "bob", 5, "RT @ann: Vote yes!", TweetKind::retweet),
        tweet("3", "cat", 3, "Something else"),
        tweet("4", "dan", 9, "@ann vote yes!", TweetKind::reply, {"ann"}),
        tweet("5", "eve", 11, "RT @ann: https://t.co/z", TweetKind::retweet),
    };
    const auto b = bucket_retweets(tweets);
    CHECK(b.report.tweets == 4);
    CHECK(b.report.replies_excluded == 1);
    CHECK(b.report.empty_text_dropped == 1);
    REQUIRE(b.buckets.size() == 2);
    CHECK(b.buckets[0].members.size() == 2);
    CHECK(b.buckets[0].members[1].user_id == "bob");
    CHECK(b.buckets[1].normalized_text == "something else");
    CHECK(b.report.multi_member_buckets == 1);
    CHECK(b.report.never_retweeted == 1);

    const auto empty = bucket_retweets({});
    CHECK(empty.buckets.empty());
    CHECK(empty.report.tweets == 0);
  }

  TEST_CASE("bucket members sorted by time then tweet id") {
    const std::vector<ingest::TweetRecord> tweets{
        tweet("b", "u2", 10, "x", TweetKind::retweet),
        tweet("c", "u3", 5, "x"),
        tweet("a", "u1", 10, "x", TweetKind::retweet),
    };
    const auto b = bucket_retweets(tweets);
    REQUIRE(b.buckets.size() == 1);
    const auto& m = b.buckets[0].members;
    CHECK(m[0].tweet_id == "c");
    CHECK(m[1].tweet_id == "a");
    CHECK(m[2].tweet_id == "b");
  }

  TEST_CASE("parent attribution examples") {
    PairOracle chain(std::set<std::pair<std::string, std::string>>{{"B", "A"}, {"C", "B"}});
    auto a = attribute_parents(bucket_of({"A", "B", "C"}), chain);
    REQUIRE(a.trees.size() == 1);
    CHECK(parents_of(a) == std::map<std::string, std::string>{{"A", ""}, {"B", "A"}, {"C", "B"}});

    PairOracle only(std::set<std::pair<std::string, std::string>>{{"B", "A"}});
    a = attribute_parents(bucket_of({"A", "B", "C"}), only);
    REQUIRE(a.trees.size() == 2);
    CHECK(a.trees[0].size() == 2);
    CHECK(a.trees[1].seed().user_id == "C");

    PairOracle four(std::set<std::pair<std::string, std::string>>{{"C", "A"}, {"C", "B"}, {"D", "C"}});
    a = attribute_parents(bucket_of({"A", "B", "C", "D"}), four);
    REQUIRE(a.trees.size() == 2);
    CHECK(a.trees[0].size() == 1);
    CHECK(a.trees[1].seed().user_id == "B");
    CHECK(parents_of(a)["C"] == "B");
    CHECK(parents_of(a)["D"] == "C");
  }

  TEST_CASE("repeat sharers keep their first tweet") {
    PairOracle oracle(std::set<std::pair<std::string, std::string>>{{"B", "A"}, {"A", "B"}});
    const auto a = attribute_parents(bucket_of({"A", "B", "A"}), oracle);
    CHECK(a.duplicates_dropped == 1);
    REQUIRE(a.trees.size() == 1);
    CHECK(a.trees[0].size() == 2);
    CHECK(a.trees[0].nodes[0].tweet_id == "t0");
  }

  TEST_CASE("attribution agrees with the rule over all orderings") {
    std::mt19937_64 rng(4);
    std::bernoulli_distribution coin(0.4);
    const std::vector<std::string> names{"A", "B", "C", "D", "E"};
    for (int trial = 0; trial < 30; ++trial) {
      PairOracle oracle;
      for (const auto& c : names)
        for (const auto& p : names)
          if (c != p && coin(rng)) oracle.add(c, p);
      auto order = names;
      std::sort(order.begin(), order.end());
      do {
        const auto a = attribute_parents(bucket_of(order), oracle);
        CHECK(parents_of(a) == brute_parents(order, oracle));
        std::size_t total = 0;
        for (const auto& t : a.trees) {
          total += t.size();
          for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.nodes[i].parent < static_cast<std::int32_t>(i));
        }
        CHECK(total == order.size());
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

  TEST_CASE("reconstruction is thread independent and conserves members") {
    std::vector<ingest::TweetRecord> tweets;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> user(0, 30), story(0, 20);
    for (int i = 0; i < 400; ++i)
      tweets.push_back(tweet("t" + std::to_string(1000 + i), "u" + std::to_string(user(rng)), i,
                             "story " + std::to_string(story(rng)), i % 3 ? TweetKind::retweet : TweetKind::original));
    PairOracle oracle;
    std::bernoulli_distribution coin(0.2);
    for (int c = 0; c <= 30; ++c)
      for (int p = 0; p <= 30; ++p)
        if (c != p && coin(rng)) oracle.add("u" + std::to_string(c), "u" + std::to_string(p));
    const auto b = bucket_retweets(tweets);
    const auto r1 = reconstruct(b, oracle, 1);
    const auto r8 = reconstruct(b, oracle, 8);
    REQUIRE(r1.cascades.size() == r8.cascades.size());
    std::size_t members = 0, nodes = 0;
    for (const auto& bucket : b.buckets) members += bucket.members.size();
    for (std::size_t i = 0; i < r1.cascades.size(); ++i) {
      CHECK(r1.cascades[i].cascade_id == i);
      CHECK(r1.cascades[i].bucket_id == r8.cascades[i].bucket_id);
      CHECK(r1.cascades[i].size() == r8.cascades[i].size());
      nodes += r1.cascades[i].size();
    }
    CHECK(nodes + r1.duplicates_dropped == members);
  }

  TEST_CASE("score examples") {
    auto s = score_parents(std::vector<std::int32_t>{-1, 0});
    CHECK(s.max_depth == 1);
    CHECK(s.avg_depth == doctest::Approx(0.5));
    CHECK(*s.virality == doctest::Approx(1.0));

    s = score_parents(std::vector<std::int32_t>{-1, 0, 0, 0});
    CHECK(s.max_depth == 1);
    CHECK(s.avg_depth == doctest::Approx(0.75));
    CHECK(*s.virality == doctest::Approx(1.5));

    s = score_parents(std::vector<std::int32_t>{-1, 0, 1});
    CHECK(s.max_depth == 2);
    CHECK(s.avg_depth == doctest::Approx(1.0));
    CHECK(*s.virality == doctest::Approx(4.0 / 3.0));

    s = score_parents(std::vector<std::int32_t>{-1});
    CHECK(s.max_depth == 0);
    CHECK(s.avg_depth == 0.0);
    CHECK_FALSE(s.virality.has_value());
  }

  TEST_CASE("stars and paths follow closed forms") {
    for (int n = 2; n <= 10; ++n) {
      std::vector<std::int32_t> star(n, 0), path(n);
      star[0] = -1;
      for (int i = 0; i < n; ++i) path[i] = i - 1;
      const auto st = score_parents(star);
      CHECK(st.max_depth == 1);
      CHECK(st.avg_depth == doctest::Approx(static_cast<double>(n - 1) / n));
      CHECK(*st.virality == doctest::Approx(2.0 * (n - 1) / n));
      const auto pa = score_parents(path);
      CHECK(pa.max_depth == static_cast<std::uint32_t>(n - 1));
      CHECK(pa.avg_depth == doctest::Approx((n - 1) / 2.0));
      CHECK(*pa.virality == doctest::Approx((n + 1) / 3.0));
    }
  }

  TEST_CASE("scores match all-pairs distances on random trees") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 2 + trial % 40;
      std::vector<std::int32_t> parent(n, -1);
      for (int i = 1; i < n; ++i) parent[i] = std::uniform_int_distribution<int>(0, i - 1)(rng);
      const auto got = score_parents(parent);
      const auto want = brute_scores(parent);
      CHECK(got.max_depth == want.max_depth);
      CHECK(got.avg_depth == doctest::Approx(want.avg_depth).epsilon(1e-12));
      CHECK(*got.virality == doctest::Approx(want.virality).epsilon(1e-12));

      // relabel children by a random order that keeps parents first
      std::vector<std::int32_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::vector<std::int32_t> pos(n, 0), placed{0};
      std::vector<std::int32_t> frontier;
      for (int i = 1; i < n; ++i)
        if (parent[i] == 0) frontier.push_back(i);
      while (!frontier.empty()) {
        const auto k = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
        const auto v = frontier[k];
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(k));
        pos[v] = static_cast<std::int32_t>(placed.size());
        placed.push_back(v);
        for (int i = 1; i < n; ++i)
          if (parent[i] == v) frontier.push_back(i);
      }
      std::vector<std::int32_t> relabeled(n, -1);
      for (int i = 1; i < n; ++i) relabeled[pos[i]] = pos[parent[i]];
      const auto again = score_parents(relabeled);
      CHECK(again.max_depth == got.max_depth);
      CHECK(again.avg_depth == got.avg_depth);
      CHECK(*again.virality == *got.virality);
    }
  }

  TEST_CASE("change bins") {
    CHECK(change_bin(0.2) == ChangeBin::changed);
    CHECK(change_bin(0.5) == ChangeBin::half_to_sixty);
    CHECK(change_bin(0.6) == ChangeBin::sixty_to_full);
    CHECK(change_bin(0.99) == ChangeBin::sixty_to_full);
    CHECK(change_bin(1.0) == ChangeBin::unchanged);
  }

  TEST_CASE("diffusion analysis") {
    std::vector<Side> sides(10, Side::yes);
    sides[9] = Side::no;
    std::vector<std::int32_t> star(10, 0);
    star[0] = -1;
    const auto tree = tree_with_sides(star, sides);
    const auto cs = cascade_sides(tree);
    CHECK(cs.classified == 10);
    CHECK(*cs.prop_yes == doctest::Approx(0.9));
    CHECK(change_bin(*cs.seed_side_fraction) == ChangeBin::sixty_to_full);

    const auto unknown = tree_with_sides({-1, 0, 0}, {Side::unknown, Side::unknown, Side::unknown});
    const auto single = tree_with_sides({-1}, {Side::no});
    const auto report = diffusion_analysis({tree, unknown, single});
    CHECK(report.cascades == 2);
    CHECK(report.yes_seeded == 1);
    CHECK(report.unknown_seeded == 1);
    CHECK(report.largest_yes == 10);
    CHECK(report.yes_table.counts[static_cast<int>(ChangeBin::sixty_to_full)] == 1);
    CHECK(report.all.total() == 1);
    REQUIRE(report.prop_yes.size() == 1);
    CHECK(report.prop_yes_histogram[9] == 1);
    CHECK(report.mixed == 0);
    CHECK(report.seed_side_majority() == doctest::Approx(1.0));
  }

  TEST_CASE("score distributions") {
    std::vector<CascadeScores> pairs(5, score_parents(std::vector<std::int32_t>{-1, 0}));
    auto d = score_distributions(pairs);
    CHECK(d.cascades == 5);
    CHECK(d.metrics[0].median == 1.0);
    CHECK(d.metrics[1].median == 0.5);
    CHECK(d.metrics[2].median == 1.0);
    CHECK(std::isnan(d.depth_vs_virality));

    const std::vector<CascadeScores> mixed{score_parents(std::vector<std::int32_t>{-1, 0}),
                                           score_parents(std::vector<std::int32_t>{-1, 0, 0, 0}),
                                           score_parents(std::vector<std::int32_t>{-1, 0, 1}),
                                           score_parents(std::vector<std::int32_t>{-1})};
    d = score_distributions(mixed);
    CHECK(d.cascades == 3);
    CHECK(d.metrics[0].median == 1.0);
    CHECK(d.metrics[1].median == doctest::Approx(0.75));
    CHECK(d.metrics[2].median == doctest::Approx(4.0 / 3.0));

    const auto none = score_distributions({});
    CHECK(none.cascades == 0);
    CHECK(std::isnan(none.metrics[0].median));
  }
}
