#pragma once

// Community detection on the sentiment-weighted mutual mention graph,
// yes/no side classification, k-means merging of communities and validation
// against hand annotations.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polarnet/graph.hpp"
#include "polarnet/ingest.hpp"
#include "polarnet/sentiment.hpp"

namespace polarnet::community {

using graph::NodeId;

/// Undirected weighted graph in CSR form. Each undirected edge is stored in
/// both endpoint lists; no self-loops at level 0 (aggregated levels may carry
/// them).
struct WeightedGraph {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  std::vector<double> weights;
  std::vector<double> self_loops;  // weight of u-u loops, counted once

  std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  double strength(NodeId u) const;  // weighted degree, self loop counted twice
  double total_weight() const;      // m: sum of undirected edge weights
};

enum class EdgeWeight { sentiment, mention_count, unit };

struct SymmetrizeResult {
  WeightedGraph graph;
  bool fell_back_to_unit = false;
};

/// Symmetrizes a directed mention graph: w(u,v) = w(u->v) + w(v->u). When the
/// chosen weights are all zero, unit weights are used and the flag is set.
SymmetrizeResult symmetrize(const graph::MentionGraph& g, EdgeWeight weight);

/// Newman modularity Q = sum_c [ in_c / 2m - (tot_c / 2m)^2 ].
double modularity(const WeightedGraph& g, const std::vector<std::int32_t>& assignment);

struct CommunitySummary {
  std::int32_t id = 0;
  std::size_t size = 0;
  std::optional<double> mean_sent_out;  // over members with a defined value
  std::optional<double> mean_sent_in;
};

struct CommunityPartition {
  /// Community per node; -1 for nodes outside the retained communities.
  std::vector<std::int32_t> assignment;
  double modularity = 0.0;
  std::vector<std::size_t> sizes;  // by community id
  std::vector<std::string> warnings;

  std::size_t community_count() const { return sizes.size(); }
};

/// Detection interface; only Louvain ships. Others plug in by name.
class CommunityDetector {
 public:
  virtual ~CommunityDetector() = default;
  virtual std::string_view name() const = 0;
  virtual CommunityPartition detect(const WeightedGraph& g, std::uint64_t seed) const = 0;
};

struct LouvainOptions {
  double min_gain = 1e-12;    // moves must improve Q by more than this
  std::size_t max_passes = 100;  // local-move sweeps per level
};

/// Multi-level Louvain. The node visit order of every sweep is a seeded
/// shuffle; a node moves only to a strictly better community (ties go to the
/// lowest community id). Communities are renumbered by size, descending, ties
/// by smallest member.
class Louvain final : public CommunityDetector {
 public:
  explicit Louvain(LouvainOptions options = {}) : options_(options) {}
  std::string_view name() const override { return "louvain"; }
  CommunityPartition detect(const WeightedGraph& g, std::uint64_t seed) const override;

 private:
  LouvainOptions options_;
};

std::unique_ptr<CommunityDetector> make_detector(std::string_view name);
std::vector<std::string> available_detectors();

/// Louvain on the |sentiment|-weighted symmetrized graph. All-zero weights
/// fall back to unit weights with a warning.
CommunityPartition louvain(const graph::MentionGraph& g, std::uint64_t seed,
                           EdgeWeight weight = EdgeWeight::sentiment);

/// Keeps communities with at least `min_size` members and, when `top_k` is
/// set, only the `top_k` largest (ties by id). Retained communities are
/// renumbered 0..k-1 by size; other nodes get -1. Sizes are kept on the
/// returned partition, modularity is carried over unchanged.
CommunityPartition filter_significant(const CommunityPartition& partition, std::size_t min_size = 20,
                                      std::optional<std::size_t> top_k = 2);

std::vector<CommunitySummary> summarize(const CommunityPartition& partition,
                                        const graph::MentionGraph& g,
                                        const std::map<std::string, sentiment::UserSentiment>& users);

enum class SideLabel { yes, no, unlabeled };
std::string_view to_string(SideLabel s);

struct SideLabeling {
  std::vector<SideLabel> community_side;  // by community id
  std::vector<SideLabel> node_side;       // by node id
  std::vector<std::string> warnings;
};

/// Labels the community with the higher mean sent_out "yes" and the other
/// "no". Requires exactly two communities (throws DataError otherwise). Equal
/// means favour the larger community (then the lower id) with a warning. A
/// community with no defined sent_out leaves both unlabeled.
SideLabeling classify_sides(const CommunityPartition& partition, const graph::MentionGraph& g,
                            const std::map<std::string, sentiment::UserSentiment>& users);

using Point2 = std::array<double, 2>;

struct KMeansOptions {
  std::optional<std::size_t> k;  // unset: pick k in [2, min(8, n)] by silhouette
  std::uint64_t seed = 1;
  std::size_t restarts = 100;
  std::size_t max_iter = 300;
};

struct KMeansResult {
  std::size_t k = 0;
  std::vector<std::int32_t> assignment;  // cluster per point
  std::vector<Point2> centroids;
  double sse = 0.0;
  double silhouette = 0.0;  // mean silhouette (0 when k < 2)
  std::size_t iterations = 0;
  std::vector<double> sse_history;  // of the winning restart
  std::vector<std::string> warnings;
};

/// Lloyd's k-means with k-means++ seeding; the restart with the lowest SSE
/// wins (earliest on ties). Throws DataError when there are fewer points than
/// k or a point is not finite; fewer distinct points than k reduces k with a
/// warning.
KMeansResult kmeans(const std::vector<Point2>& points, KMeansOptions options);

double mean_silhouette(const std::vector<Point2>& points, const std::vector<std::int32_t>& assignment,
                       std::size_t k);

/// Clusters communities on (mean sent_in, mean sent_out) and relabels the
/// partition by cluster. Communities lacking either mean are dropped (-1).
struct MergeResult {
  CommunityPartition partition;             // clusters as communities
  std::vector<std::int32_t> community_to_cluster;
  KMeansResult kmeans;
};
MergeResult kmeans_merge(const CommunityPartition& partition,
                         const std::vector<CommunitySummary>& summaries, KMeansOptions options);

struct Confusion {
  std::size_t tp = 0;  // annotated yes, labeled yes
  std::size_t fn = 0;  // annotated yes, labeled no
  std::size_t tn = 0;  // annotated no, labeled no
  std::size_t fp = 0;  // annotated no, labeled yes
  std::size_t unmatched = 0;  // annotated users without a yes/no label
};

struct Validation {
  Confusion confusion;
  std::optional<double> recall_yes;
  std::optional<double> recall_no;
  double balanced_accuracy = 0.0;  // mean of the defined recalls
};

/// Scores per-user sides against annotations (annotated users only).
/// Throws DataError when no annotated user carries a label.
Validation validate(const std::map<std::string, SideLabel>& labels, const ingest::Annotations& truth);

double balanced_accuracy(const Confusion& c);

struct UserLinkFractions {
  std::string user;
  SideLabel side = SideLabel::unlabeled;
  std::size_t labeled_out_links = 0;
  double to_yes = 0.0;
  double to_no = 0.0;
};

struct LinkFractionReport {
  std::vector<UserLinkFractions> users;  // labeled users with labeled out-links
  double yes_yes = 0.0;  // mean over yes users of the fraction of links to yes
  double yes_no = 0.0;
  double no_yes = 0.0;
  double no_no = 0.0;
  double mean_same_side = 0.0;  // over all included users
};

/// Per-user split of out-links by destination side, counting only links to
/// labeled users. Users without such links are left out.
LinkFractionReport link_fractions_by_community(const graph::MentionGraph& g,
                                               const std::vector<SideLabel>& node_side);

struct BlockSummary {
  std::string name;  // e.g. "C1-C2", 1-based community ids
  std::size_t nodes = 0;  // within: all members; across: nodes incident to the block's edges
  std::size_t links = 0;
  double avg_out_degree = 0.0;   // links / nodes
  double avg_clustering = 0.0;   // undirected projection of the block's edges
  double density = 0.0;          // links / (nodes (nodes - 1))
};

/// Within- and cross-community edge blocks for every ordered community pair.
std::vector<BlockSummary> block_summaries(const graph::MentionGraph& g,
                                          const CommunityPartition& partition);

}  // namespace polarnet::community
