#include "polarnet/community.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "polarnet/error.hpp"
#include "polarnet/random.hpp"
#include "polarnet/stats.hpp"

namespace polarnet::community {

double WeightedGraph::strength(NodeId u) const {
  double s = 2.0 * self_loops[u];
  for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) s += weights[i];
  return s;
}

double WeightedGraph::total_weight() const {
  double twice = 0.0;
  for (NodeId u = 0; u < node_count(); ++u) twice += strength(u);
  return twice / 2.0;
}

namespace {

WeightedGraph from_undirected(std::size_t n, const std::map<std::pair<NodeId, NodeId>, double>& edges,
                              std::vector<double> self_loops) {
  WeightedGraph g;
  g.offsets.assign(n + 1, 0);
  g.self_loops = std::move(self_loops);
  g.self_loops.resize(n, 0.0);
  for (const auto& [key, w] : edges) {
    ++g.offsets[key.first + 1];
    ++g.offsets[key.second + 1];
  }
  std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
  g.targets.resize(g.offsets[n]);
  g.weights.resize(g.offsets[n]);
  std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  // map iteration is ordered, so every adjacency list comes out sorted
  for (const auto& [key, w] : edges) {
    g.targets[fill[key.first]] = key.second;
    g.weights[fill[key.first]++] = w;
  }
  for (const auto& [key, w] : edges) {
    g.targets[fill[key.second]] = key.first;
    g.weights[fill[key.second]++] = w;
  }
  for (NodeId u = 0; u < n; ++u) {
    std::vector<std::pair<NodeId, double>> row;
    for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) row.emplace_back(g.targets[i], g.weights[i]);
    std::sort(row.begin(), row.end());
    for (std::size_t i = 0; i < row.size(); ++i) {
      g.targets[g.offsets[u] + i] = row[i].first;
      g.weights[g.offsets[u] + i] = row[i].second;
    }
  }
  return g;
}

// Renumbers labels 0..C-1 by community size (desc), ties by smallest member.
std::vector<std::int32_t> canonical_labels(const std::vector<std::int32_t>& raw,
                                           std::vector<std::size_t>& sizes) {
  std::map<std::int32_t, std::pair<std::size_t, std::size_t>> info;  // label -> (size, first)
  for (std::size_t u = 0; u < raw.size(); ++u) {
    if (raw[u] < 0) continue;
    auto [it, inserted] = info.try_emplace(raw[u], 0, u);
    ++it->second.first;
  }
  std::vector<std::pair<std::int32_t, std::pair<std::size_t, std::size_t>>> order(info.begin(), info.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::map<std::int32_t, std::int32_t> relabel;
  sizes.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    relabel[order[i].first] = static_cast<std::int32_t>(i);
    sizes.push_back(order[i].second.first);
  }
  std::vector<std::int32_t> out(raw.size(), -1);
  for (std::size_t u = 0; u < raw.size(); ++u)
    if (raw[u] >= 0) out[u] = relabel[raw[u]];
  return out;
}

// One level of local moves. Returns true if any node moved.
bool local_moves(const WeightedGraph& g, std::vector<std::int32_t>& community,
                 std::mt19937_64& engine, const LouvainOptions& options) {
  const std::size_t n = g.node_count();
  std::vector<double> strength(n), tot(n, 0.0);
  double m2 = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    strength[u] = g.strength(u);
    m2 += strength[u];
    community[u] = static_cast<std::int32_t>(u);
    tot[u] = strength[u];
  }
  if (m2 <= 0.0) return false;

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), engine);

  std::vector<double> link(n, 0.0);
  std::vector<std::int32_t> touched;
  bool any_move = false;
  for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
    bool moved = false;
    for (NodeId u : order) {
      const std::int32_t current = community[u];
      touched.clear();
      for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
        const NodeId v = g.targets[i];
        if (v == u) continue;
        const std::int32_t c = community[v];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += g.weights[i];
      }
      tot[current] -= strength[u];
      const double ku = strength[u];
      auto gain = [&](std::int32_t c) { return link[c] - tot[c] * ku / m2; };
      std::int32_t best = current;
      double best_gain = gain(current);
      std::sort(touched.begin(), touched.end());
      for (std::int32_t c : touched) {
        if (c == current) continue;
        const double gc = gain(c);
        if ((gc - best_gain) / m2 > options.min_gain) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += ku;
      for (std::int32_t c : touched) link[c] = 0.0;
      if (best != current) {
        community[u] = best;
        moved = true;
        any_move = true;
      }
    }
    if (!moved) break;
  }
  return any_move;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::int32_t>& community,
                        std::size_t communities) {
  std::map<std::pair<NodeId, NodeId>, double> edges;
  std::vector<double> loops(communities, 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto cu = static_cast<NodeId>(community[u]);
    loops[cu] += g.self_loops[u];
    for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      const NodeId v = g.targets[i];
      if (v < u) continue;  // each undirected edge once
      const auto cv = static_cast<NodeId>(community[v]);
      if (cu == cv)
        loops[cu] += g.weights[i];
      else
        edges[{std::min(cu, cv), std::max(cu, cv)}] += g.weights[i];
    }
  }
  return from_undirected(communities, edges, std::move(loops));
}

}  // namespace

SymmetrizeResult symmetrize(const graph::MentionGraph& g, EdgeWeight weight) {
  auto value = [&](const graph::MentionEdge& e) {
    switch (weight) {
      case EdgeWeight::sentiment: return e.sentiment_weight;
      case EdgeWeight::mention_count: return static_cast<double>(e.mention_count);
      case EdgeWeight::unit: return 1.0;
    }
    return 1.0;
  };
  SymmetrizeResult out;
  bool all_zero = true;
  for (const auto& e : g.edges())
    if (value(e) != 0.0) all_zero = false;
  if (all_zero && !g.edges().empty() && weight != EdgeWeight::unit) {
    out.fell_back_to_unit = true;
    weight = EdgeWeight::unit;
  }
  std::map<std::pair<NodeId, NodeId>, double> edges;
  for (const auto& e : g.edges()) {
    const double w = value(e);
    if (w < 0.0 || !std::isfinite(w)) throw DataError("edge weights must be finite and non-negative");
    edges[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += w;
  }
  // zero-weight pairs carry no modularity signal
  std::erase_if(edges, [](const auto& kv) { return kv.second == 0.0; });
  out.graph = from_undirected(g.node_count(), edges, {});
  return out;
}

double modularity(const WeightedGraph& g, const std::vector<std::int32_t>& assignment) {
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;
  std::map<std::int32_t, std::pair<double, double>> acc;  // internal, total strength
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const std::int32_t cu = assignment[u];
    if (cu < 0) continue;
    auto& [internal, tot] = acc[cu];
    tot += g.strength(u);
    internal += 2.0 * g.self_loops[u];
    for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      if (assignment[g.targets[i]] == cu) internal += g.weights[i];
  }
  double q = 0.0;
  for (const auto& [c, v] : acc) q += v.first / (2.0 * m) - (v.second / (2.0 * m)) * (v.second / (2.0 * m));
  return q;
}

CommunityPartition Louvain::detect(const WeightedGraph& g, std::uint64_t seed) const {
  CommunityPartition out;
  const std::size_t n = g.node_count();
  if (n == 0) throw DataError("community detection needs a nonempty graph");
  std::mt19937_64 engine(seed);
  std::vector<std::int32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0);

  WeightedGraph level = g;
  while (true) {
    std::vector<std::int32_t> community(level.node_count());
    if (!local_moves(level, community, engine, options_)) break;
    // compact ids in node order
    std::vector<std::int32_t> compact(level.node_count(), -1);
    std::int32_t next = 0;
    for (auto& c : community) {
      if (compact[c] < 0) compact[c] = next++;
      c = compact[c];
    }
    for (auto& m : membership) m = community[m];
    if (static_cast<std::size_t>(next) == level.node_count()) break;
    level = aggregate(level, community, static_cast<std::size_t>(next));
  }
  out.assignment = canonical_labels(membership, out.sizes);
  out.modularity = modularity(g, out.assignment);
  return out;
}

std::unique_ptr<CommunityDetector> make_detector(std::string_view name) {
  if (name == "louvain") return std::make_unique<Louvain>();
  throw ConfigError(fmt::format("unknown community detection algorithm '{}' (available: louvain)", name));
}

std::vector<std::string> available_detectors() { return {"louvain"}; }

CommunityPartition louvain(const graph::MentionGraph& g, std::uint64_t seed, EdgeWeight weight) {
  auto sym = symmetrize(g, weight);
  auto partition = Louvain().detect(sym.graph, seed);
  if (sym.fell_back_to_unit)
    partition.warnings.insert(partition.warnings.begin(), "all edge weights are zero; using unit weights");
  return partition;
}

CommunityPartition filter_significant(const CommunityPartition& partition, std::size_t min_size,
                                      std::optional<std::size_t> top_k) {
  std::vector<std::int32_t> order(partition.sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int32_t a, std::int32_t b) { return partition.sizes[a] > partition.sizes[b]; });
  std::vector<std::int32_t> keep;
  for (auto c : order)
    if (partition.sizes[c] >= min_size) keep.push_back(c);

  CommunityPartition out;
  out.modularity = partition.modularity;
  out.warnings = partition.warnings;
  if (keep.empty()) out.warnings.push_back(fmt::format("no community has {} or more members", min_size));
  if (top_k) {
    if (keep.size() < *top_k && !keep.empty())
      out.warnings.push_back(fmt::format("only {} significant communities (wanted {})", keep.size(), *top_k));
    if (keep.size() > *top_k) keep.resize(*top_k);
  }
  std::vector<std::int32_t> relabel(partition.sizes.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    relabel[keep[i]] = static_cast<std::int32_t>(i);
    out.sizes.push_back(partition.sizes[keep[i]]);
  }
  out.assignment.resize(partition.assignment.size());
  for (std::size_t u = 0; u < partition.assignment.size(); ++u) {
    const auto c = partition.assignment[u];
    out.assignment[u] = c >= 0 ? relabel[c] : -1;
  }
  return out;
}

std::vector<CommunitySummary> summarize(const CommunityPartition& partition, const graph::MentionGraph& g,
                                        const std::map<std::string, sentiment::UserSentiment>& users) {
  const std::size_t k = partition.community_count();
  std::vector<std::vector<double>> outs(k), ins(k);
  std::vector<CommunitySummary> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c].id = static_cast<std::int32_t>(c);
    out[c].size = partition.sizes[c];
  }
  for (NodeId u = 0; u < partition.assignment.size(); ++u) {
    const auto c = partition.assignment[u];
    if (c < 0) continue;
    auto it = users.find(g.name(u));
    if (it == users.end()) continue;
    if (it->second.sent_out) outs[c].push_back(*it->second.sent_out);
    if (it->second.sent_in) ins[c].push_back(*it->second.sent_in);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (!outs[c].empty()) out[c].mean_sent_out = stats::mean(outs[c]);
    if (!ins[c].empty()) out[c].mean_sent_in = stats::mean(ins[c]);
  }
  return out;
}

std::string_view to_string(SideLabel s) {
  switch (s) {
    case SideLabel::yes: return "yes";
    case SideLabel::no: return "no";
    case SideLabel::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

SideLabeling classify_sides(const CommunityPartition& partition, const graph::MentionGraph& g,
                            const std::map<std::string, sentiment::UserSentiment>& users) {
  if (partition.community_count() != 2)
    throw DataError(fmt::format("side classification needs exactly two communities, got {}",
                                partition.community_count()));
  const auto summaries = summarize(partition, g, users);
  SideLabeling out;
  out.community_side.assign(2, SideLabel::unlabeled);
  const auto& a = summaries[0];
  const auto& b = summaries[1];
  if (!a.mean_sent_out || !b.mean_sent_out) {
    out.warnings.push_back("a community has no members with sentiment; sides left unlabeled");
  } else {
    std::size_t yes = 0;
    if (*a.mean_sent_out > *b.mean_sent_out) {
      yes = 0;
    } else if (*b.mean_sent_out > *a.mean_sent_out) {
      yes = 1;
    } else {
      yes = b.size > a.size ? 1 : 0;
      out.warnings.push_back("communities have equal mean sentiment-out; larger one labeled yes");
    }
    out.community_side[yes] = SideLabel::yes;
    out.community_side[1 - yes] = SideLabel::no;
  }
  out.node_side.assign(partition.assignment.size(), SideLabel::unlabeled);
  for (std::size_t u = 0; u < partition.assignment.size(); ++u)
    if (partition.assignment[u] >= 0) out.node_side[u] = out.community_side[partition.assignment[u]];
  return out;
}

namespace {

double dist2(const Point2& a, const Point2& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

struct LloydRun {
  std::vector<std::int32_t> assignment;
  std::vector<Point2> centroids;
  double sse = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

double total_sse(const std::vector<Point2>& points, const std::vector<std::int32_t>& assignment,
                 const std::vector<Point2>& centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sse += dist2(points[i], centroids[assignment[i]]);
  return sse;
}

LloydRun lloyd(const std::vector<Point2>& points, std::size_t k, std::mt19937_64& engine,
               std::size_t max_iter) {
  const std::size_t n = points.size();
  LloydRun run;
  // k-means++ seeding
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  run.centroids.push_back(points[pick(engine)]);
  std::vector<double> d2(n);
  while (run.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : run.centroids) best = std::min(best, dist2(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(engine);
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      target -= d2[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    while (d2[chosen] <= 0.0 && chosen > 0) --chosen;
    run.centroids.push_back(points[chosen]);
  }

  run.assignment.assign(n, -1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t best = 0;
      double best_d = dist2(points[i], run.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = dist2(points[i], run.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::int32_t>(c);
        }
      }
      if (run.assignment[i] != best) {
        run.assignment[i] = best;
        changed = true;
      }
    }
    // refill empty clusters with the point farthest from its centroid
    for (std::size_t c = 0; c < k; ++c) {
      if (std::find(run.assignment.begin(), run.assignment.end(), static_cast<std::int32_t>(c)) !=
          run.assignment.end())
        continue;
      std::vector<std::size_t> counts(k, 0);
      for (auto a : run.assignment) ++counts[a];
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[run.assignment[i]] < 2) continue;
        const double d = dist2(points[i], run.centroids[run.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < n) {
        run.assignment[far] = static_cast<std::int32_t>(c);
        run.centroids[c] = points[far];
        changed = true;
      }
    }
    std::vector<Point2> sums(k, Point2{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[run.assignment[i]][0] += points[i][0];
      sums[run.assignment[i]][1] += points[i][1];
      ++counts[run.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        run.centroids[c] = {sums[c][0] / static_cast<double>(counts[c]),
                            sums[c][1] / static_cast<double>(counts[c])};
    run.history.push_back(total_sse(points, run.assignment, run.centroids));
    run.iterations = iter + 1;
    if (!changed) break;
  }
  run.sse = run.history.empty() ? 0.0 : run.history.back();
  return run;
}

}  // namespace

double mean_silhouette(const std::vector<Point2>& points, const std::vector<std::int32_t>& assignment,
                       std::size_t k) {
  const std::size_t n = points.size();
  if (k < 2 || n < 2) return 0.0;
  std::vector<std::size_t> counts(k, 0);
  for (auto a : assignment) ++counts[a];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      sum[assignment[j]] += std::sqrt(dist2(points[i], points[j]));
    }
    const auto own = static_cast<std::size_t>(assignment[i]);
    if (counts[own] <= 1) continue;  // singleton: s = 0
    const double a = sum[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own && counts[c] > 0) b = std::min(b, sum[c] / static_cast<double>(counts[c]));
    const double denom = std::max(a, b);
    if (denom > 0.0 && std::isfinite(b)) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

KMeansResult kmeans(const std::vector<Point2>& points, KMeansOptions options) {
  KMeansResult out;
  const std::size_t n = points.size();
  for (const auto& p : points)
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw DataError("k-means points must be finite");
  if (n == 0) throw DataError("k-means needs at least one point");
  std::vector<Point2> distinct = points;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  auto run_k = [&](std::size_t k) {
    LloydRun best;
    bool have = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
      auto engine = stream_engine(options.seed, 0x6b6d65616e73ULL + k, r);
      LloydRun run = lloyd(points, k, engine, options.max_iter);
      if (!have || run.sse < best.sse) {
        best = std::move(run);
        have = true;
      }
    }
    return best;
  };

  std::size_t k = 0;
  if (options.k) {
    k = *options.k;
    if (k == 0) throw DataError("k must be positive");
    if (n < k) throw DataError(fmt::format("k-means: {} points for k = {}", n, k));
    if (distinct.size() < k) {
      out.warnings.push_back(fmt::format("only {} distinct points; k reduced from {}", distinct.size(), k));
      k = distinct.size();
    }
  } else {
    const std::size_t hi = std::min<std::size_t>(8, distinct.size());
    if (hi < 2) {
      k = 1;
    } else {
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t cand = 2; cand <= hi; ++cand) {
        const auto run = run_k(cand);
        const double s = mean_silhouette(points, run.assignment, cand);
        if (s > best_score + 1e-12) {
          best_score = s;
          k = cand;
        }
      }
    }
  }
  auto best = run_k(k);
  out.k = k;
  out.assignment = std::move(best.assignment);
  out.centroids = std::move(best.centroids);
  out.sse = best.sse;
  out.iterations = best.iterations;
  out.sse_history = std::move(best.history);
  out.silhouette = mean_silhouette(points, out.assignment, k);
  return out;
}

MergeResult kmeans_merge(const CommunityPartition& partition, const std::vector<CommunitySummary>& summaries,
                         KMeansOptions options) {
  MergeResult out;
  std::vector<Point2> points;
  std::vector<std::int32_t> which;
  for (const auto& s : summaries) {
    if (!s.mean_sent_in || !s.mean_sent_out) continue;
    points.push_back({*s.mean_sent_in, *s.mean_sent_out});
    which.push_back(s.id);
  }
  out.kmeans = kmeans(points, options);
  out.community_to_cluster.assign(partition.community_count(), -1);
  for (std::size_t i = 0; i < which.size(); ++i) out.community_to_cluster[which[i]] = out.kmeans.assignment[i];
  std::vector<std::int32_t> raw(partition.assignment.size(), -1);
  for (std::size_t u = 0; u < raw.size(); ++u)
    if (partition.assignment[u] >= 0) raw[u] = out.community_to_cluster[partition.assignment[u]];
  out.partition.assignment = canonical_labels(raw, out.partition.sizes);
  // keep community_to_cluster consistent with the canonical cluster ids
  std::map<std::int32_t, std::int32_t> relabel;
  for (std::size_t u = 0; u < raw.size(); ++u)
    if (raw[u] >= 0) relabel[raw[u]] = out.partition.assignment[u];
  for (auto& c : out.community_to_cluster)
    if (c >= 0) c = relabel.count(c) ? relabel[c] : c;
  out.partition.modularity = partition.modularity;
  out.partition.warnings = out.kmeans.warnings;
  return out;
}

double balanced_accuracy(const Confusion& c) {
  double sum = 0.0;
  int defined = 0;
  if (c.tp + c.fn > 0) {
    sum += static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    ++defined;
  }
  if (c.tn + c.fp > 0) {
    sum += static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    ++defined;
  }
  return defined == 0 ? 0.0 : sum / defined;
}

Validation validate(const std::map<std::string, SideLabel>& labels, const ingest::Annotations& truth) {
  Validation v;
  auto& c = v.confusion;
  for (const auto& [user, side] : truth.labels) {
    auto it = labels.find(user);
    if (it == labels.end() || it->second == SideLabel::unlabeled) {
      ++c.unmatched;
      continue;
    }
    const bool said_yes = it->second == SideLabel::yes;
    if (side == ingest::Side::yes)
      said_yes ? ++c.tp : ++c.fn;
    else
      said_yes ? ++c.fp : ++c.tn;
  }
  if (c.tp + c.fn + c.tn + c.fp == 0) throw DataError("no annotated user carries a community label");
  if (c.tp + c.fn > 0) v.recall_yes = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tn + c.fp > 0) v.recall_no = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  v.balanced_accuracy = balanced_accuracy(c);
  return v;
}

LinkFractionReport link_fractions_by_community(const graph::MentionGraph& g,
                                               const std::vector<SideLabel>& node_side) {
  LinkFractionReport out;
  std::vector<double> yes_to_yes, yes_to_no, no_to_yes, no_to_no, same;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (node_side[u] == SideLabel::unlabeled) continue;
    std::size_t to_yes = 0, to_no = 0;
    for (auto v : g.out_neighbors(u)) {
      if (node_side[v] == SideLabel::yes) ++to_yes;
      if (node_side[v] == SideLabel::no) ++to_no;
    }
    const std::size_t total = to_yes + to_no;
    if (total == 0) continue;
    UserLinkFractions f;
    f.user = g.name(u);
    f.side = node_side[u];
    f.labeled_out_links = total;
    f.to_yes = static_cast<double>(to_yes) / static_cast<double>(total);
    f.to_no = static_cast<double>(to_no) / static_cast<double>(total);
    if (f.side == SideLabel::yes) {
      yes_to_yes.push_back(f.to_yes);
      yes_to_no.push_back(f.to_no);
      same.push_back(f.to_yes);
    } else {
      no_to_yes.push_back(f.to_yes);
      no_to_no.push_back(f.to_no);
      same.push_back(f.to_no);
    }
    out.users.push_back(std::move(f));
  }
  auto m = [](const std::vector<double>& v) { return v.empty() ? 0.0 : stats::mean(v); };
  out.yes_yes = m(yes_to_yes);
  out.yes_no = m(yes_to_no);
  out.no_yes = m(no_to_yes);
  out.no_no = m(no_to_no);
  out.mean_same_side = m(same);
  return out;
}

std::vector<BlockSummary> block_summaries(const graph::MentionGraph& g, const CommunityPartition& partition) {
  std::vector<BlockSummary> out;
  const auto k = static_cast<std::int32_t>(partition.community_count());
  for (std::int32_t a = 0; a < k; ++a) {
    for (std::int32_t b = 0; b < k; ++b) {
      BlockSummary s;
      s.name = fmt::format("C{}-C{}", a + 1, b + 1);
      std::vector<graph::NamedEdge> block;
      std::vector<std::string> members;
      for (const auto& e : g.edges())
        if (partition.assignment[e.src] == a && partition.assignment[e.dst] == b)
          block.push_back({g.name(e.src), g.name(e.dst), e.mention_count, e.sentiment_weight, {}});
      if (a == b)
        for (NodeId u = 0; u < g.node_count(); ++u)
          if (partition.assignment[u] == a) members.push_back(g.name(u));
      const auto sub = graph::MentionGraph::from_edges(std::move(block), members);
      s.nodes = sub.node_count();
      s.links = sub.edge_count();
      if (s.nodes > 0) {
        s.avg_out_degree = static_cast<double>(s.links) / static_cast<double>(s.nodes);
        s.avg_clustering = graph::compute_stats(sub).average_clustering;
      }
      if (s.nodes > 1)
        s.density = static_cast<double>(s.links) / (static_cast<double>(s.nodes) * static_cast<double>(s.nodes - 1));
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace polarnet::community
