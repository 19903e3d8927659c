#include "polarnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "polarnet/parallel.hpp"

namespace polarnet::graph {

MentionGraph MentionGraph::from_edges(std::vector<NamedEdge> edges,
                                      std::span<const std::string> extra_nodes) {
  MentionGraph g;
  std::vector<std::string> names(extra_nodes.begin(), extra_nodes.end());
  for (const auto& e : edges) {
    if (e.src == e.dst) continue;
    names.push_back(e.src);
    names.push_back(e.dst);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  g.nodes_ = std::move(names);
  g.index_.reserve(g.nodes_.size());
  for (NodeId i = 0; i < g.nodes_.size(); ++i) g.index_.emplace(g.nodes_[i], i);

  std::map<std::pair<NodeId, NodeId>, MentionEdge> merged;
  for (auto& e : edges) {
    if (e.src == e.dst) continue;
    const NodeId s = g.index_.at(e.src);
    const NodeId d = g.index_.at(e.dst);
    auto [it, inserted] = merged.try_emplace({s, d});
    MentionEdge& m = it->second;
    if (inserted) {
      m.src = s;
      m.dst = d;
      m.sentiment_weight = e.sentiment_weight;
    }
    m.mention_count += e.mention_count;
    m.tweets.insert(m.tweets.end(), e.tweets.begin(), e.tweets.end());
  }
  g.edges_.reserve(merged.size());
  for (auto& [key, edge] : merged) {
    std::sort(edge.tweets.begin(), edge.tweets.end());
    g.edges_.push_back(std::move(edge));
  }

  const std::size_t n = g.nodes_.size();
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.out_offsets_[e.src + 1];
    ++g.in_offsets_[e.dst + 1];
  }
  std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  g.out_targets_.resize(g.edges_.size());
  g.in_sources_.resize(g.edges_.size());
  g.in_edge_index_.resize(g.edges_.size());
  std::vector<std::size_t> fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t i = 0; i < g.edges_.size(); ++i) {
    const auto& e = g.edges_[i];
    g.out_targets_[i] = e.dst;  // edges_ already sorted by src, dst
    const std::size_t slot = fill[e.dst]++;
    g.in_sources_[slot] = e.src;
    g.in_edge_index_[slot] = i;
  }
  return g;
}

std::optional<NodeId> MentionGraph::find(std::string_view user) const {
  auto it = index_.find(std::string(user));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const NodeId> MentionGraph::out_neighbors(NodeId u) const {
  return {out_targets_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
}

std::span<const NodeId> MentionGraph::in_neighbors(NodeId u) const {
  return {in_sources_.data() + in_offsets_[u], in_offsets_[u + 1] - in_offsets_[u]};
}

const MentionEdge* MentionGraph::find_edge(NodeId src, NodeId dst) const {
  if (src >= nodes_.size()) return nullptr;
  const auto begin = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[src]);
  const auto end = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[src + 1]);
  auto it = std::lower_bound(begin, end, dst);
  if (it == end || *it != dst) return nullptr;
  return &edges_[static_cast<std::size_t>(it - out_targets_.begin())];
}

bool MentionGraph::has_edge(std::string_view src, std::string_view dst) const {
  auto s = find(src);
  auto d = find(dst);
  return s && d && has_edge(*s, *d);
}

std::uint64_t MentionGraph::total_mentions() const {
  std::uint64_t total = 0;
  for (const auto& e : edges_) total += e.mention_count;
  return total;
}

MentionGraph MentionGraph::induced(const std::vector<bool>& keep) const {
  std::vector<NamedEdge> kept;
  std::vector<std::string> isolated;
  for (NodeId u = 0; u < nodes_.size(); ++u)
    if (keep[u]) isolated.push_back(nodes_[u]);
  for (const auto& e : edges_) {
    if (!keep[e.src] || !keep[e.dst]) continue;
    kept.push_back({nodes_[e.src], nodes_[e.dst], e.mention_count, e.sentiment_weight, e.tweets});
  }
  return from_edges(std::move(kept), isolated);
}

MentionGraph MentionGraph::with_sentiment_weights(std::span<const double> tweet_scores) const {
  MentionGraph g = *this;
  for (auto& e : g.edges_) {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto t : e.tweets) {
      if (t >= tweet_scores.size() || std::isnan(tweet_scores[t])) continue;
      sum += tweet_scores[t];
      ++n;
    }
    e.sentiment_weight = n == 0 ? 0.0 : std::abs(sum / static_cast<double>(n));
  }
  return g;
}

MentionGraph build_mention_graph(std::span<const ingest::TweetRecord> tweets) {
  std::vector<NamedEdge> edges;
  for (std::uint32_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    std::vector<std::string> targets = t.mentions;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (auto& m : targets) {
      if (m == t.user_id || m.empty()) continue;
      edges.push_back({t.user_id, m, 1, 0.0, {i}});
    }
  }
  return MentionGraph::from_edges(std::move(edges));
}

MentionGraph mutual_reduce(const MentionGraph& g) {
  std::vector<NamedEdge> kept;
  for (const auto& e : g.edges()) {
    if (!g.has_edge(e.dst, e.src)) continue;
    kept.push_back({g.name(e.src), g.name(e.dst), e.mention_count, e.sentiment_weight, e.tweets});
  }
  return MentionGraph::from_edges(std::move(kept));
}

std::vector<std::uint32_t> strongly_connected_components(const MentionGraph& g) {
  constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0), component(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::uint32_t next_index = 0, next_component = 0;

  struct Frame {
    NodeId node;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto out = g.out_neighbors(f.node);
      if (f.child < out.size()) {
        const NodeId w = out[f.child++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const NodeId v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = next_component;
        } while (w != v);
        ++next_component;
      }
    }
  }
  return component;
}

MentionGraph largest_scc(const MentionGraph& g) {
  if (g.empty()) return g;
  const auto component = strongly_connected_components(g);
  const std::uint32_t count = *std::max_element(component.begin(), component.end()) + 1;
  std::vector<std::size_t> size(count, 0);
  std::vector<NodeId> smallest(count, std::numeric_limits<NodeId>::max());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    ++size[component[u]];
    smallest[component[u]] = std::min(smallest[component[u]], u);
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < count; ++c) {
    if (size[c] > size[best] || (size[c] == size[best] && smallest[c] < smallest[best])) best = c;
  }
  std::vector<bool> keep(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) keep[u] = component[u] == best;
  return g.induced(keep);
}

std::vector<std::vector<NodeId>> undirected_adjacency(const MentionGraph& g) {
  std::vector<std::vector<NodeId>> adj(g.node_count());
  for (const auto& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

GraphStats compute_stats(const MentionGraph& g, unsigned threads) {
  GraphStats s;
  const std::size_t n = g.node_count();
  s.nodes = n;
  s.edges = g.edge_count();
  s.mentions = g.total_mentions();
  for (const auto& e : g.edges())
    if (e.src < e.dst && g.has_edge(e.dst, e.src)) ++s.reciprocal_pairs;
  if (n == 0) return s;
  s.avg_out_degree = static_cast<double>(s.edges) / static_cast<double>(n);
  s.avg_out_mentions = static_cast<double>(s.mentions) / static_cast<double>(n);

  std::vector<double> in_deg(n), out_deg(n);
  for (NodeId u = 0; u < n; ++u) {
    in_deg[u] = static_cast<double>(g.in_neighbors(u).size());
    out_deg[u] = static_cast<double>(g.out_neighbors(u).size());
  }
  s.in_degree_ccdf = stats::ccdf(in_deg);
  s.out_degree_ccdf = stats::ccdf(out_deg);

  const auto adj = undirected_adjacency(g);
  s.clustering.assign(n, 0.0);
  s.mean_geodesic.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint64_t> triangles(n, 0);       // closed pairs around each node
  std::vector<std::uint64_t> geodesic_sum(n, 0), reached(n, 0);

  const std::size_t blocks = std::min<std::size_t>(n, std::max(1u, threads) * 4u);
  const std::size_t per_block = (n + blocks - 1) / blocks;
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::vector<std::uint8_t> mark(n, 0);
    std::vector<std::uint32_t> dist(n);
    std::vector<NodeId> queue;
    queue.reserve(n);
    const std::size_t begin = b * per_block;
    const std::size_t end = std::min(n, begin + per_block);
    for (std::size_t u = begin; u < end; ++u) {
      const auto& nb = adj[u];
      for (auto v : nb) mark[v] = 1;
      std::uint64_t closed = 0;
      for (auto v : nb)
        for (auto w : adj[v])
          if (w > v && mark[w]) ++closed;
      for (auto v : nb) mark[v] = 0;
      triangles[u] = closed;
      const double k = static_cast<double>(nb.size());
      if (nb.size() >= 2) s.clustering[u] = static_cast<double>(closed) / (k * (k - 1.0) / 2.0);

      constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();
      std::fill(dist.begin(), dist.end(), inf);
      queue.clear();
      dist[u] = 0;
      queue.push_back(static_cast<NodeId>(u));
      std::uint64_t sum = 0, count = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId x = queue[head];
        for (auto y : adj[x]) {
          if (dist[y] != inf) continue;
          dist[y] = dist[x] + 1;
          sum += dist[y];
          ++count;
          queue.push_back(y);
        }
      }
      geodesic_sum[u] = sum;
      reached[u] = count;
      if (count > 0) s.mean_geodesic[u] = static_cast<double>(sum) / static_cast<double>(count);
    }
  });

  std::uint64_t closed_total = 0, triples_total = 0, path_sum = 0, path_count = 0;
  double clustering_sum = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const std::uint64_t k = adj[u].size();
    closed_total += triangles[u];
    triples_total += k * (k > 0 ? k - 1 : 0) / 2;
    clustering_sum += s.clustering[u];
    path_sum += geodesic_sum[u];
    path_count += reached[u];
  }
  s.average_clustering = clustering_sum / static_cast<double>(n);
  s.transitivity =
      triples_total == 0 ? 0.0 : static_cast<double>(closed_total) / static_cast<double>(triples_total);
  s.average_geodesic =
      path_count == 0 ? 0.0 : static_cast<double>(path_sum) / static_cast<double>(path_count);
  return s;
}

}  // namespace polarnet::graph
