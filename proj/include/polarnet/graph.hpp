#pragma once

// Directed who-mentions-whom graph, its mutual / strongly connected
// reductions, and descriptive statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polarnet/ingest.hpp"
#include "polarnet/stats.hpp"

namespace polarnet::graph {

using NodeId = std::uint32_t;

struct MentionEdge {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t mention_count = 0;  // tweets by src mentioning dst
  double sentiment_weight = 0.0;    // |mean score| of those tweets
  std::vector<std::uint32_t> tweets;  // indices into the source corpus
};

struct NamedEdge {
  std::string src;
  std::string dst;
  std::uint32_t mention_count = 1;
  double sentiment_weight = 0.0;
  std::vector<std::uint32_t> tweets;
};

/// Immutable directed graph. Node ids index a lexicographically sorted user
/// list; edges are unique (src, dst) pairs sorted by src then dst, no
/// self-loops.
class MentionGraph {
 public:
  MentionGraph() = default;

  /// Nodes are the endpoints of `edges` plus `extra_nodes`. Parallel edges
  /// are merged (counts and tweet lists summed, weight of the first kept);
  /// self-loops are dropped.
  static MentionGraph from_edges(std::vector<NamedEdge> edges,
                                 std::span<const std::string> extra_nodes = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& name(NodeId id) const { return nodes_[id]; }
  std::optional<NodeId> find(std::string_view user) const;

  const std::vector<MentionEdge>& edges() const { return edges_; }
  std::span<const NodeId> out_neighbors(NodeId u) const;
  std::span<const NodeId> in_neighbors(NodeId u) const;
  const MentionEdge* find_edge(NodeId src, NodeId dst) const;
  bool has_edge(NodeId src, NodeId dst) const { return find_edge(src, dst) != nullptr; }
  bool has_edge(std::string_view src, std::string_view dst) const;

  std::uint64_t total_mentions() const;

  /// Subgraph induced by the nodes with keep[id] set; edge attributes kept.
  MentionGraph induced(const std::vector<bool>& keep) const;

  /// Copy with sentiment_weight recomputed from per-tweet scores (indexed like
  /// the edge tweet lists; NaN marks unscored tweets). Edges with no scored
  /// tweet get weight 0.
  MentionGraph with_sentiment_weights(std::span<const double> tweet_scores) const;

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<MentionEdge> edges_;
  std::vector<std::size_t> out_offsets_;  // CSR over edges_
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  std::vector<std::size_t> in_edge_index_;
};

/// Edge a->b for every tweet by a mentioning b (each mention counted once per
/// tweet); self-mentions dropped.
MentionGraph build_mention_graph(std::span<const ingest::TweetRecord> tweets);

/// Keeps both directions of each reciprocal pair; drops one-way edges and
/// nodes left isolated.
MentionGraph mutual_reduce(const MentionGraph& g);

/// Component id per node (Tarjan, iterative). Components are numbered in the
/// order Tarjan completes them.
std::vector<std::uint32_t> strongly_connected_components(const MentionGraph& g);

/// Induced subgraph on the largest strongly connected component; among
/// equal sizes the one holding the lexicographically smallest user wins.
MentionGraph largest_scc(const MentionGraph& g);

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::uint64_t mentions = 0;
  std::size_t reciprocal_pairs = 0;
  double avg_out_degree = 0.0;           // merged edges per node
  double avg_out_mentions = 0.0;         // mention count per node
  std::vector<stats::CcdfPoint> in_degree_ccdf;
  std::vector<stats::CcdfPoint> out_degree_ccdf;
  std::vector<double> clustering;        // per node, undirected projection
  double average_clustering = 0.0;
  double transitivity = 0.0;
  std::vector<double> mean_geodesic;     // per node; NaN if nothing reachable
  double average_geodesic = 0.0;         // over all reachable ordered pairs
};

/// Degree CCDFs on the directed graph; clustering, transitivity and BFS
/// geodesics on the undirected projection. Nodes of degree < 2 have
/// clustering 0. Per-node work is spread over `threads` workers.
GraphStats compute_stats(const MentionGraph& g, unsigned threads = 1);

/// Sorted, deduplicated undirected neighbour lists.
std::vector<std::vector<NodeId>> undirected_adjacency(const MentionGraph& g);

}  // namespace polarnet::graph
