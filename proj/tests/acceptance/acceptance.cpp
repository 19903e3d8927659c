// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "polarnet/cascades.hpp"
#include "polarnet/graph.hpp"
#include "polarnet/ingest.hpp"
#include "polarnet/nullmodels.hpp"
#include "polarnet/pipeline.hpp"
#include "polarnet/sentiment.hpp"
#include "polarnet/synth.hpp"

using namespace polarnet;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path scratch_root() {
  static const fs::path root = fs::temp_directory_path() / fmt::format("polarnet_acceptance_{}", ::getpid());
  return root;
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(ingest::read_file(path)); }

// ---- cascade metrics ----

struct Exact {
  std::uint64_t max_depth = 0;
  std::uint64_t depth_sum = 0;
  std::uint64_t distance_sum = 0;  // over ordered pairs
};

Exact all_pairs(const std::vector<std::int32_t>& parent) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 1; i < n; ++i) {
    adj[i].push_back(static_cast<std::size_t>(parent[i]));
    adj[static_cast<std::size_t>(parent[i])].push_back(i);
  }
  Exact e;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::int64_t> dist(n, -1);
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
      e.distance_sum += static_cast<std::uint64_t>(dist[t]);
      if (s == 0) {
        e.depth_sum += static_cast<std::uint64_t>(dist[t]);
        e.max_depth = std::max<std::uint64_t>(e.max_depth, static_cast<std::uint64_t>(dist[t]));
      }
    }
  }
  return e;
}

Verdict cascade_metric_oracle() {
  std::mt19937_64 rng(2024);
  std::size_t trees = 0, bad = 0;
  for (int i = 0; i < 2000; ++i) {
    const int n = 1 + i % 10;
    std::vector<std::int32_t> parent(n, -1);
    for (int k = 1; k < n; ++k) parent[k] = std::uniform_int_distribution<int>(0, k - 1)(rng);
    const auto got = cascades::score_parents(parent);
    const auto want = all_pairs(parent);
    ++trees;
    bool ok = got.max_depth == want.max_depth &&
              got.avg_depth == static_cast<double>(want.depth_sum) / static_cast<double>(n);
    if (n == 1) {
      ok = ok && !got.virality;
    } else {
      const double v = static_cast<double>(want.distance_sum) / static_cast<double>(n * (n - 1));
      ok = ok && got.virality && std::abs(*got.virality - v) <= 1e-12;
    }
    if (!ok) ++bad;
  }
  std::size_t closed_bad = 0;
  for (int n = 2; n <= 60; ++n) {
    std::vector<std::int32_t> star(n, 0), path(n);
    star[0] = -1;
    for (int k = 0; k < n; ++k) path[k] = k - 1;
    if (std::abs(*cascades::score_parents(path).virality - (n + 1) / 3.0) > 1e-12) ++closed_bad;
    if (std::abs(*cascades::score_parents(star).virality - 2.0 * (n - 1) / n) > 1e-12) ++closed_bad;
  }
  const auto pair = cascades::score_parents(std::vector<std::int32_t>{-1, 0});
  const bool modal = pair.max_depth == 1 && pair.avg_depth == 0.5 && pair.virality && *pair.virality == 1.0;
  return {bad == 0 && closed_bad == 0 && modal,
          fmt::format("{} trees n<=10, {} mismatches; closed-form mismatches {}; 2-node (M,A,V)=({},{},{})", trees,
                      bad, closed_bad, pair.max_depth, pair.avg_depth, pair.virality.value_or(NAN))};
}

// ---- reconstruction ----

using Pairs = std::set<std::pair<std::string, std::string>>;

cascades::RetweetBucket make_bucket(const std::vector<std::string>& users) {
  cascades::RetweetBucket b;
  for (std::size_t i = 0; i < users.size(); ++i)
    b.members.push_back({fmt::format("t{:02}", i), users[i],
                         ingest::Timestamp{std::chrono::seconds{static_cast<long>(i)}},
                         i == 0 ? ingest::TweetKind::original : ingest::TweetKind::retweet});
  return b;
}

std::map<std::string, std::string> rule_parents(const std::vector<std::string>& users, const Pairs& links) {
  std::map<std::string, std::string> out;
  std::vector<std::string> earlier;
  for (const auto& u : users) {
    if (out.count(u)) continue;
    std::string parent = "-";
    for (std::size_t k = earlier.size(); k-- > 0;)
      if (links.count({u, earlier[k]})) {
        parent = earlier[k];
        break;
      }
    out[u] = parent;
    earlier.push_back(u);
  }
  return out;
}

std::map<std::string, std::string> tree_parents(const cascades::Attribution& a) {
  std::map<std::string, std::string> out;
  for (const auto& t : a.trees)
    for (const auto& n : t.nodes) out[n.user_id] = n.parent < 0 ? "-" : t.nodes[n.parent].user_id;
  return out;
}

Verdict reconstruction_oracle() {
  std::size_t cases = 0, bad = 0;
  auto check = [&](const std::vector<std::string>& order, const Pairs& links) {
    std::vector<graph::NamedEdge> edges;
    ingest::FollowerGraph followers;
    for (const auto& [c, p] : links) {
      edges.push_back({c, p, 1, 0.0, {}});
      followers.follows[c].insert(p);
      ++followers.edges;
    }
    const auto g = graph::MentionGraph::from_edges(std::move(edges));
    const auto bucket = make_bucket(order);
    const auto want = rule_parents(order, links);
    const auto by_mention = cascades::attribute_parents(bucket, cascades::MentionOracle(g));
    const auto by_follow = cascades::attribute_parents(bucket, cascades::FollowerOracle(followers));
    cases += 2;
    if (tree_parents(by_mention) != want) ++bad;
    if (tree_parents(by_follow) != want) ++bad;
  };

  // every oracle edge set over 3 and 4 users, every arrival order
  for (int users = 3; users <= 4; ++users) {
    std::vector<std::string> names;
    for (int i = 0; i < users; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
    std::vector<std::pair<std::string, std::string>> all;
    for (const auto& c : names)
      for (const auto& p : names)
        if (c != p) all.emplace_back(c, p);
    const std::size_t sets = std::size_t{1} << all.size();
    for (std::size_t mask = 0; mask < sets; ++mask) {
      Pairs links;
      for (std::size_t k = 0; k < all.size(); ++k)
        if (mask >> k & 1) links.insert(all[k]);
      auto order = names;
      // orderings only matter up to relabeling when every edge set is tried
      check(order, links);
      std::next_permutation(order.begin(), order.end());
      check(order, links);
    }
  }

  // random buckets of up to 8 tweets, repeat sharers included
  std::mt19937_64 rng(77);
  for (int i = 0; i < 3000; ++i) {
    const int len = 2 + i % 7;
    std::uniform_int_distribution<int> pick(0, 5);
    std::vector<std::string> order;
    for (int k = 0; k < len; ++k) order.push_back(std::string(1, static_cast<char>('A' + pick(rng))));
    Pairs links;
    std::bernoulli_distribution coin(0.1 + 0.1 * (i % 6));
    for (char c = 'A'; c <= 'F'; ++c)
      for (char p = 'A'; p <= 'F'; ++p)
        if (c != p && coin(rng)) links.emplace(std::string(1, c), std::string(1, p));
    check(order, links);
  }
  return {bad == 0 && cases >= 1000, fmt::format("{} cases (mention + follower), {} mismatches", cases, bad)};
}

// ---- planted partition ----

pipeline::RunConfig corpus_config(const fs::path& dir, const synth::SynthConfig& config) {
  synth::write_corpus(synth::generate(config), dir / "in");
  pipeline::RunConfig run;
  run.tweets = dir / "in" / "tweets.jsonl";
  run.lexicon = dir / "in" / "lexicon.tsv";
  run.annotations = dir / "in" / "annotations.csv";
  run.followers = dir / "in" / "followers.csv";
  run.out = dir / "out";
  run.seed = config.seed;
  return run;
}

Verdict planted_partition() {
  double total = 0.0;
  std::vector<std::string> each;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    synth::SynthConfig config;
    config.users_yes = config.users_no = 100;
    config.p_in = 0.2;
    config.p_out = 0.01;
    config.mean_yes = 0.3;
    config.mean_no = -0.3;
    config.cascades = 0;
    config.annotated_fraction = 1.0;
    config.seed = seed;
    const auto run = corpus_config(scratch_root() / fmt::format("planted_{}", seed), config);
    for (auto stage : {pipeline::Stage::ingest, pipeline::Stage::score, pipeline::Stage::graph,
                       pipeline::Stage::communities})
      pipeline::run_stage(run, stage);
    const auto summary = read_json(run.out / "communities" / "summary.json");
    const double ba = summary["validation"].is_null() ? 0.0 : summary["validation"]["balanced_accuracy"].get<double>();
    total += ba;
    each.push_back(fmt::format("{:.3f}", ba));
  }
  const double mean = total / 10.0;
  return {mean >= 0.95, fmt::format("mean balanced accuracy {:.4f} over 10 seeds [{}]", mean, fmt::join(each, " "))};
}

// ---- assortativity ----

graph::MentionGraph mixing_fixture(int yy, int yn, int ny, int nn, std::vector<std::int32_t>& labels) {
  // one edge per count between fresh node pairs: y* nodes are class 0, n* class 1
  std::vector<graph::NamedEdge> edges;
  int k = 0;
  auto add = [&](int count, char a, char b) {
    for (int i = 0; i < count; ++i, ++k)
      edges.push_back({fmt::format("{}s{:04}", a, k), fmt::format("{}d{:04}", b, k), 1, 0.0, {}});
  };
  add(yy, 'y', 'y');
  add(yn, 'y', 'n');
  add(ny, 'n', 'y');
  add(nn, 'n', 'n');
  auto g = graph::MentionGraph::from_edges(std::move(edges));
  labels.assign(g.node_count(), 0);
  for (graph::NodeId u = 0; u < g.node_count(); ++u) labels[u] = g.name(u)[0] == 'y' ? 0 : 1;
  return g;
}

graph::MentionGraph random_graph(std::size_t nodes, std::size_t edges, std::mt19937_64& rng) {
  std::vector<graph::NamedEdge> list;
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (list.size() < edges) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b || !seen.emplace(a, b).second) continue;
    list.push_back({fmt::format("v{:04}", a), fmt::format("v{:04}", b), 1, 0.0, {}});
  }
  return graph::MentionGraph::from_edges(std::move(list));
}

Verdict assortativity_criterion() {
  auto r_of = [](int yy, int yn, int ny, int nn) {
    std::vector<std::int32_t> labels;
    const auto g = mixing_fixture(yy, yn, ny, nn, labels);
    return nullmodels::assortativity(g, labels);
  };
  const double r1 = r_of(50, 0, 0, 50);
  const double r2 = r_of(0, 50, 50, 0);
  const double r3 = r_of(40, 10, 10, 40);
  const bool exact = r1 == 1.0 && r2 == -1.0 && r3 == 0.6;

  std::mt19937_64 rng(31);
  const auto g = random_graph(400, 2000, rng);
  std::vector<std::int32_t> balanced(g.node_count());
  for (std::size_t i = 0; i < balanced.size(); ++i) balanced[i] = static_cast<std::int32_t>(i % 2);
  std::shuffle(balanced.begin(), balanced.end(), rng);
  nullmodels::NullOptions opt;
  opt.replicates = 1000;
  opt.seed = 5;
  const auto result = nullmodels::assortativity_test(g, balanced, opt);
  double sum = 0.0;
  for (double r : result.replicates) sum += r;
  const double mean = sum / static_cast<double>(result.replicates.size());
  return {exact && std::abs(mean) <= 0.05,
          fmt::format("fixtures r = {}, {}, {}; null mean r over R=1000 = {:.5f}", r1, r2, r3, mean)};
}

// ---- null calibration ----

nullmodels::Connections random_connections(std::size_t users, std::size_t tweets, std::mt19937_64& rng) {
  nullmodels::Connections c;
  c.users = users;
  std::uniform_int_distribution<graph::NodeId> pick(0, static_cast<graph::NodeId>(users - 1));
  std::normal_distribution<double> score(0.0, 1.0);
  for (std::size_t t = 0; t < tweets; ++t) {
    const auto s = static_cast<graph::NodeId>(t % users);
    graph::NodeId r = pick(rng);
    while (r == s) r = pick(rng);
    c.sender.push_back(s);
    c.receivers.push_back(r);
    c.offsets.push_back(c.receivers.size());
    c.scores.push_back(std::clamp(score(rng), -5.0, 5.0));
  }
  return c;
}

Verdict null_calibration() {
  constexpr int kTrials = 100;
  int corr_inside = 0, assort_inside = 0, fpp_outside = 0, fnn_outside = 0, homophilous = 0;
  std::array<int, 9> link_inside{};
  for (int trial = 0; trial < kTrials; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    nullmodels::NullOptions opt;
    opt.replicates = 1000;
    opt.seed = static_cast<std::uint64_t>(trial + 1);
    opt.threads = 4;

    const auto conn = random_connections(60, 360, rng);
    if (nullmodels::sentiment_correlation_test(conn, opt).verdict == nullmodels::Verdict::inside) ++corr_inside;

    const auto g = random_graph(120, 600, rng);
    std::vector<std::int32_t> polarity(g.node_count());
    std::discrete_distribution<int> cls({0.4, 0.4, 0.2});
    for (auto& p : polarity) p = cls(rng);
    const auto links = nullmodels::link_class_fraction_test(g, polarity, opt);
    for (std::size_t k = 0; k < links.size(); ++k)
      if (links[k].verdict == nullmodels::Verdict::inside) ++link_inside[k];

    std::vector<std::int32_t> community(g.node_count());
    std::bernoulli_distribution half(0.5);
    for (auto& c : community) c = half(rng) ? 1 : 0;
    if (nullmodels::assortativity_test(g, community, opt).verdict == nullmodels::Verdict::inside) ++assort_inside;

    synth::SynthConfig config;
    config.users_yes = config.users_no = 50;
    config.p_in = 0.2;
    config.p_out = 0.005;
    config.cascades = 0;
    config.seed = static_cast<std::uint64_t>(trial + 1);
    const auto corpus = synth::generate(config);
    const auto h = graph::largest_scc(graph::mutual_reduce(graph::build_mention_graph(corpus.tweets)));
    std::vector<std::int32_t> sides(h.node_count());
    for (graph::NodeId u = 0; u < h.node_count(); ++u)
      sides[u] = corpus.sides.at(h.name(u)) == ingest::Side::yes ? 0 : 1;
    std::size_t same = 0;
    for (const auto& e : h.edges())
      if (sides[e.src] == sides[e.dst]) ++same;
    if (static_cast<double>(same) >= 0.9 * static_cast<double>(h.edge_count())) ++homophilous;
    const auto planted = nullmodels::link_class_fraction_test(h, sides, opt);
    if (planted[0].verdict == nullmodels::Verdict::outside) ++fpp_outside;
    if (planted[4].verdict == nullmodels::Verdict::outside) ++fnn_outside;
  }
  const int worst_link = *std::min_element(link_inside.begin(), link_inside.end());
  std::vector<std::string> per;
  for (std::size_t k = 0; k < 9; ++k)
    per.push_back(fmt::format("f{}{}={}", nullmodels::kPolarityCodes[k / 3], nullmodels::kPolarityCodes[k % 3],
                              link_inside[k]));
  const bool pass = corr_inside >= 90 && worst_link >= 90 && assort_inside >= 90 && homophilous == kTrials &&
                    fpp_outside >= 95 && fnn_outside >= 95;
  return {pass, fmt::format("inside: correlation {}/100, assortativity {}/100, link classes [{}]; "
                            "homophilous trials {}/100, outside: fpp {}/100, fnn {}/100",
                            corr_inside, assort_inside, fmt::join(per, " "), homophilous, fpp_outside, fnn_outside)};
}

// ---- rescaling ----

Verdict rescaling_criterion() {
  std::mt19937_64 rng(9);
  std::size_t corpora = 0, bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 200);
    std::uniform_int_distribution<std::int64_t> pos(0, 1 + i % 97), neg(-(1 + i % 89), 0);
    std::vector<sentiment::RawScore> raw(n);
    for (auto& r : raw) r = {pos(rng), neg(rng)};
    raw[0].pos = std::max<std::int64_t>(raw[0].pos, 1);
    raw[1].neg = std::min<std::int64_t>(raw[1].neg, -1);
    const auto out = sentiment::rescale_corpus(raw);
    double hi = 0.0, lo = 0.0;
    for (const auto& t : out.tweets) {
      hi = std::max(hi, t.scaled_pos);
      lo = std::min(lo, t.scaled_neg);
    }
    ++corpora;
    if (hi != 5.0 || lo != -5.0) ++bad;
  }
  const std::vector<sentiment::RawScore> example{{50, 0}, {0, -40}, {20, -8}};
  const auto ex = sentiment::rescale_corpus(example);
  const bool divisors = ex.scaling.pos_divisor() == 10.0 && ex.scaling.neg_divisor() == 8.0 &&
                        ex.tweets[2].scaled_pos == 2.0 && ex.tweets[2].scaled_neg == -1.0;
  return {bad == 0 && divisors, fmt::format("{} random corpora, {} without exact +5/-5 extremes; divisors {} / {}",
                                            corpora, bad, ex.scaling.pos_divisor(), ex.scaling.neg_divisor())};
}

// ---- echo chambers end to end ----

nlohmann::json diffusion_for(double cross, const std::string& tag) {
  synth::SynthConfig config;
  config.cascades = 400;
  config.cross_side_retweet_prob = cross;
  config.seed = 42;
  const auto run = corpus_config(scratch_root() / tag, config);
  for (auto stage : {pipeline::Stage::ingest, pipeline::Stage::score, pipeline::Stage::graph,
                     pipeline::Stage::communities, pipeline::Stage::cascades})
    pipeline::run_stage(run, stage);
  return read_json(run.out / "cascades" / "diffusion.json");
}

Verdict echo_chambers() {
  const auto low = diffusion_for(0.02, "echo_low");
  const auto high = diffusion_for(0.5, "echo_high");
  const double majority = low["seed_side_majority"].get<double>();
  const auto& table = high["change"]["all"];
  const double unchanged =
      table["unchanged"].get<double>() / std::max(1.0, table["total"].get<double>());
  return {majority >= 0.85 && unchanged < 0.6,
          fmt::format("cross 0.02: {:.4f} of {} cascades stay >=60% on the seed side; cross 0.5: unchanged {:.4f}",
                      majority, low["change"]["all"]["total"].get<std::size_t>(), unchanged)};
}

// ---- determinism ----

Verdict determinism() {
  synth::SynthConfig config;
  config.cascades = 200;
  config.seed = 7;
  auto run = corpus_config(scratch_root() / "det", config);
  run.replicates = 300;
  std::vector<std::string> outputs;
  for (auto [name, threads] : std::vector<std::pair<std::string, unsigned>>{{"a", 1}, {"b", 1}, {"c", 8}}) {
    run.out = scratch_root() / "det" / name;
    run.threads = threads;
    pipeline::run_pipeline(run);
    outputs.push_back(ingest::read_file(run.out / "summary.json"));
  }
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {same, fmt::format("summary.json {} bytes; run1==run2: {}, threads1==threads8: {}", outputs[0].size(),
                            outputs[0] == outputs[1], outputs[0] == outputs[2])};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "cascade-metric oracle", 10, cascade_metric_oracle},
      {2, "reconstruction oracle", 30, reconstruction_oracle},
      {3, "planted-partition recovery", 60, planted_partition},
      {4, "assortativity formula and null", 30, assortativity_criterion},
      {5, "null-test calibration", 300, null_calibration},
      {6, "sentiment rescaling", 60, rescaling_criterion},
      {7, "echo-chamber property", 120, echo_chambers},
      {8, "determinism", 300, determinism},
  };
  fs::create_directories(scratch_root());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("error: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      v.pass = false;
      v.detail += fmt::format("; over the {:.0f} s budget", c.budget_seconds);
    }
    if (!v.pass) ++failed;
    fmt::print("{} criterion {}: {} ({}) [{:.2f} s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail, seconds);
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_root(), ec);
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
