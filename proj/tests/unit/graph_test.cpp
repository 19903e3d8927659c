#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "polarnet/graph.hpp"

using namespace polarnet;
using namespace polarnet::graph;
using fixtures::graph_of;

namespace {

std::set<std::string> node_set(const MentionGraph& g) { return {g.nodes().begin(), g.nodes().end()}; }

// Largest SCC by transitive closure: members of the biggest mutual-reachability
// class, ties to the class holding the lexicographically smallest id.
std::set<std::string> scc_oracle(const MentionGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& e : g.edges()) reach[e.src][e.dst] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::set<std::string> best;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> cls;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) cls.insert(g.name(j));
    if (cls.size() > best.size() || (cls.size() == best.size() && !cls.empty() && *cls.begin() < *best.begin()))
      best = cls;
  }
  return best;
}

MentionGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<NamedEdge> edges;
  std::bernoulli_distribution coin(p);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) edges.push_back({names[i], names[j], 1, 0.0, {}});
  return MentionGraph::from_edges(std::move(edges), names);
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("mention graph construction") {
    using fixtures::tweet;
    std::vector<ingest::TweetRecord> tweets{
        tweet("1", "A", 0, "", ingest::TweetKind::original, {"B"}),
        tweet("2", "B", 1, "", ingest::TweetKind::original, {"A"}),
        tweet("3", "A", 2, "", ingest::TweetKind::original, {"C", "C"}),
        tweet("4", "A", 3, "", ingest::TweetKind::original, {"A"}),
        tweet("5", "A", 4, "", ingest::TweetKind::original, {"B"}),
    };
    const auto g = build_mention_graph(tweets);
    CHECK(g.edge_count() == 3);
    CHECK(g.has_edge("A", "B"));
    CHECK(g.has_edge("B", "A"));
    CHECK(g.has_edge("A", "C"));
    CHECK_FALSE(g.has_edge("A", "A"));
    const auto* ab = g.find_edge(*g.find("A"), *g.find("B"));
    REQUIRE(ab);
    CHECK(ab->mention_count == 2);
    CHECK(ab->tweets == std::vector<std::uint32_t>{0, 4});
    CHECK(g.find_edge(*g.find("A"), *g.find("C"))->mention_count == 1);  // repeated mention in one tweet
    CHECK(build_mention_graph({}).empty());
  }

  TEST_CASE("mutual reduction") {
    const auto g = mutual_reduce(graph_of({"A>B", "B>A", "A>C"}));
    CHECK(node_set(g) == std::set<std::string>{"A", "B"});
    CHECK(g.edge_count() == 2);
    CHECK(mutual_reduce(graph_of({"A>B", "B>C"})).empty());
    CHECK(mutual_reduce(g).edges().size() == g.edges().size());
  }

  TEST_CASE("largest strongly connected component") {
    CHECK(node_set(largest_scc(graph_of({"a>b", "b>c", "c>a", "c>d"}))) == std::set<std::string>{"a", "b", "c"});
    CHECK(node_set(largest_scc(graph_of({"a>b", "b>a", "x>y", "y>z", "z>x"}))) ==
          std::set<std::string>{"x", "y", "z"});
    CHECK(node_set(largest_scc(graph_of({"b>c", "c>d", "a>b", "d>e", "a>e"}))) == std::set<std::string>{"a"});
  }

  TEST_CASE("largest SCC agrees with a reachability oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 400; ++trial) {
      std::uniform_int_distribution<std::size_t> size(1, 12);
      std::uniform_real_distribution<double> dens(0.05, 0.4);
      const auto g = random_graph(rng, size(rng), dens(rng));
      const auto scc = largest_scc(g);
      CHECK(node_set(scc) == scc_oracle(g));
      CHECK(node_set(largest_scc(scc)) == node_set(scc));
      if (scc.node_count() > 1) {
        for (NodeId u = 0; u < scc.node_count(); ++u) {
          CHECK(!scc.out_neighbors(u).empty());
          CHECK(!scc.in_neighbors(u).empty());
        }
      }
    }
  }

  TEST_CASE("triangle statistics") {
    const auto s = compute_stats(graph_of({"a>b", "b>c", "c>a"}));
    for (double c : s.clustering) CHECK(c == 1.0);
    CHECK(s.transitivity == 1.0);
    CHECK(s.average_geodesic == 1.0);
    CHECK(s.average_clustering == 1.0);
  }

  TEST_CASE("star and path statistics") {
    const auto star = compute_stats(graph_of({"c>x", "c>y", "c>z"}));
    for (double c : star.clustering) CHECK(c == 0.0);
    CHECK(star.transitivity == 0.0);
    const auto path = compute_stats(graph_of({"a>b", "b>c"}));
    CHECK(path.transitivity == 0.0);
  }

  TEST_CASE("clustering and transitivity agree with brute-force triple counting") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const auto g = random_graph(rng, 9, 0.25);
      const auto s = compute_stats(g, 3);
      const std::size_t n = g.node_count();
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      for (const auto& e : g.edges()) adj[e.src][e.dst] = adj[e.dst][e.src] = true;
      std::size_t closed = 0, triples = 0;
      for (std::size_t v = 0; v < n; ++v) {
        std::size_t deg = 0, links = 0;
        for (std::size_t a = 0; a < n; ++a) {
          if (!adj[v][a]) continue;
          ++deg;
          for (std::size_t b = a + 1; b < n; ++b)
            if (adj[v][b] && adj[a][b]) ++links;
        }
        const std::size_t pairs = deg * (deg - (deg > 0 ? 1 : 0)) / 2;
        triples += pairs;
        closed += links;
        const double expected = deg < 2 ? 0.0 : static_cast<double>(links) / static_cast<double>(pairs);
        CHECK(s.clustering[v] == doctest::Approx(expected));
      }
      const double t = triples == 0 ? 0.0 : static_cast<double>(closed) / static_cast<double>(triples);
      CHECK(s.transitivity == doctest::Approx(t));
    }
  }

  TEST_CASE("statistics do not depend on the thread count") {
    std::mt19937_64 rng(3);
    const auto g = random_graph(rng, 60, 0.08);
    const auto a = compute_stats(g, 1);
    const auto b = compute_stats(g, 8);
    CHECK(a.clustering == b.clustering);
    CHECK(a.transitivity == b.transitivity);
    CHECK(a.average_geodesic == b.average_geodesic);
    double drop = 0.0;
    for (std::size_t i = 0; i < a.out_degree_ccdf.size(); ++i) {
      const double next = i + 1 < a.out_degree_ccdf.size() ? a.out_degree_ccdf[i + 1].fraction : 0.0;
      drop += a.out_degree_ccdf[i].fraction - next;
    }
    CHECK(drop == doctest::Approx(1.0));
  }

  TEST_CASE("sentiment weights are the magnitude of the mean tweet score") {
    std::vector<NamedEdge> edges{{"a", "b", 2, 0.0, {0, 1}}, {"b", "a", 1, 0.0, {2}}};
    const auto g = MentionGraph::from_edges(edges).with_sentiment_weights(std::vector<double>{-1.0, -2.0, NAN});
    CHECK(g.find_edge(*g.find("a"), *g.find("b"))->sentiment_weight == 1.5);
    CHECK(g.find_edge(*g.find("b"), *g.find("a"))->sentiment_weight == 0.0);
  }
}
