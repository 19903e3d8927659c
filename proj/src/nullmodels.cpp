#include "polarnet/nullmodels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "polarnet/error.hpp"
#include "polarnet/kernels.hpp"
#include "polarnet/parallel.hpp"
#include "polarnet/random.hpp"
#include "polarnet/stats.hpp"

namespace polarnet::nullmodels {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags keep the tests' random sequences apart under one seed.
constexpr std::uint64_t kCorrelationStream = 0x636f7272;
constexpr std::uint64_t kLinkClassStream = 0x6c696e6b;
constexpr std::uint64_t kAssortStream = 0x6173736f;

struct EdgeArrays {
  std::vector<std::uint32_t> src;
  std::vector<std::uint32_t> dst;
};

EdgeArrays edge_arrays(const graph::MentionGraph& g) {
  EdgeArrays out;
  out.src.reserve(g.edge_count());
  out.dst.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    out.src.push_back(e.src);
    out.dst.push_back(e.dst);
  }
  return out;
}

std::vector<std::int32_t> resample_labels(std::span<const std::int32_t> observed,
                                          std::span<const std::int32_t> pool, std::mt19937_64& engine) {
  std::vector<std::int32_t> out(observed.begin(), observed.end());
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (auto& l : out)
    if (l >= 0) l = pool[pick(engine)];
  return out;
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::inside ? "inside" : "outside"; }

NullTestResult summarize(std::string name, double observed, std::vector<double> replicates,
                         std::uint64_t seed) {
  NullTestResult out;
  out.name = std::move(name);
  out.observed = observed;
  out.seed = seed;
  std::vector<double> defined;
  defined.reserve(replicates.size());
  for (double r : replicates) {
    if (std::isnan(r))
      ++out.undefined;
    else
      defined.push_back(r);
  }
  if (defined.empty()) throw DataError(fmt::format("{}: every null replicate is undefined", out.name));
  std::sort(defined.begin(), defined.end());
  out.q025 = stats::quantile_sorted(defined, 0.025);
  out.q50 = stats::quantile_sorted(defined, 0.5);
  out.q975 = stats::quantile_sorted(defined, 0.975);
  out.verdict = (observed >= out.q025 && observed <= out.q975) ? Verdict::inside : Verdict::outside;
  out.replicates = std::move(replicates);
  return out;
}

Connections collect_connections(const graph::MentionGraph& g, std::span<const double> tweet_scores) {
  // tweet index -> (sender, receivers); ordered so the layout is reproducible
  std::map<std::uint32_t, std::pair<NodeId, std::vector<NodeId>>> tweets;
  for (const auto& e : g.edges()) {
    for (auto t : e.tweets) {
      if (t >= tweet_scores.size()) throw DataError(fmt::format("tweet index {} has no score", t));
      if (std::isnan(tweet_scores[t])) continue;
      auto& entry = tweets[t];
      entry.first = e.src;
      entry.second.push_back(e.dst);
    }
  }
  Connections c;
  c.users = g.node_count();
  for (auto& [t, entry] : tweets) {
    std::sort(entry.second.begin(), entry.second.end());
    entry.second.erase(std::unique(entry.second.begin(), entry.second.end()), entry.second.end());
    c.sender.push_back(entry.first);
    c.receivers.insert(c.receivers.end(), entry.second.begin(), entry.second.end());
    c.offsets.push_back(c.receivers.size());
    c.scores.push_back(tweet_scores[t]);
  }
  return c;
}

double in_out_correlation(const Connections& c, std::span<const double> scores, std::size_t* users_used) {
  std::vector<double> out_sum(c.users, 0.0), in_sum(c.users, 0.0);
  std::vector<std::uint32_t> out_n(c.users, 0), in_n(c.users, 0);
  for (std::size_t t = 0; t < c.size(); ++t) {
    out_sum[c.sender[t]] += scores[t];
    ++out_n[c.sender[t]];
    for (std::size_t i = c.offsets[t]; i < c.offsets[t + 1]; ++i) {
      in_sum[c.receivers[i]] += scores[t];
      ++in_n[c.receivers[i]];
    }
  }
  std::vector<double> x, y;
  for (std::size_t u = 0; u < c.users; ++u) {
    if (out_n[u] == 0 || in_n[u] == 0) continue;
    x.push_back(in_sum[u] / in_n[u]);
    y.push_back(out_sum[u] / out_n[u]);
  }
  if (users_used) *users_used = x.size();
  if (x.size() < 3) return kNaN;
  return kernels::pearson(x, y);
}

NullTestResult sentiment_correlation_test(const Connections& c, const NullOptions& options) {
  std::size_t users = 0;
  const double observed = in_out_correlation(c, c.scores, &users);
  if (users < 3)
    throw DataError(fmt::format("correlation needs at least 3 users with both in and out sentiment, got {}", users));
  if (std::isnan(observed)) throw DataError("sentiment in/out correlation is undefined (zero variance)");

  std::vector<double> replicates(options.replicates);
  parallel_for(options.replicates, options.threads, [&](std::size_t i) {
    auto engine = stream_engine(options.seed, kCorrelationStream, i);
    std::uniform_int_distribution<std::size_t> pick(0, c.scores.size() - 1);
    std::vector<double> scores(c.scores.size());
    for (auto& s : scores) s = c.scores[pick(engine)];
    replicates[i] = in_out_correlation(c, scores);
  });
  return summarize("correlation", observed, std::move(replicates), options.seed);
}

std::vector<double> pair_fractions(const graph::MentionGraph& g, std::span<const std::int32_t> labels,
                                   int classes) {
  const auto edges = edge_arrays(g);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(classes * classes));
  kernels::pair_histogram(edges.src, edges.dst, labels, classes, counts);
  std::uint64_t total = 0;
  for (auto n : counts) total += n;
  std::vector<double> out(counts.size(), kNaN);
  if (total == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

std::vector<NullTestResult> link_class_fraction_test(const graph::MentionGraph& g,
                                                     std::span<const std::int32_t> labels,
                                                     const NullOptions& options) {
  constexpr int kClasses = static_cast<int>(kPolarityCodes.size());
  if (labels.size() != g.node_count()) throw DataError("one polarity label per node is required");
  if (g.edge_count() == 0) throw DataError("link-class fractions need at least one edge");
  for (auto l : labels)
    if (l < 0 || l >= kClasses) throw DataError("polarity labels must be 0, 1 or 2");
  const auto edges = edge_arrays(g);
  const auto observed = pair_fractions(g, labels, kClasses);
  const double total = static_cast<double>(g.edge_count());

  const std::size_t pairs = kClasses * kClasses;
  std::vector<std::vector<double>> replicates(pairs, std::vector<double>(options.replicates));
  parallel_for(options.replicates, options.threads, [&](std::size_t i) {
    auto engine = stream_engine(options.seed, kLinkClassStream, i);
    const auto shuffled = resample_labels(labels, labels, engine);
    std::vector<std::uint64_t> counts(pairs);
    kernels::pair_histogram(edges.src, edges.dst, shuffled, kClasses, counts);
    for (std::size_t p = 0; p < pairs; ++p) replicates[p][i] = static_cast<double>(counts[p]) / total;
  });

  std::vector<NullTestResult> out;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto name = fmt::format("f{}{}", kPolarityCodes[p / kClasses], kPolarityCodes[p % kClasses]);
    out.push_back(summarize(name, observed[p], std::move(replicates[p]), options.seed));
  }
  return out;
}

double assortativity(std::span<const double> mixing, int classes) {
  // Scaled by the total T: r = (T trace - sum a_i b_i) / (T^2 - sum a_i b_i)
  // with unnormalized marginals, so integer counts stay exact until the
  // final division.
  double total = 0.0;
  for (double v : mixing) total += v;
  if (total <= 0.0) return kNaN;
  double trace = 0.0, ab = 0.0;
  for (int i = 0; i < classes; ++i) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < classes; ++j) {
      a += mixing[i * classes + j];
      b += mixing[j * classes + i];
    }
    trace += mixing[i * classes + i];
    ab += a * b;
  }
  const double den = total * total - ab;
  if (!(den > 0.0)) return kNaN;
  return (total * trace - ab) / den;
}

namespace {

int label_classes(std::span<const std::int32_t> labels) {
  std::int32_t hi = -1;
  for (auto l : labels) hi = std::max(hi, l);
  return hi + 1;
}

double assortativity_from_counts(const std::vector<std::uint64_t>& counts, int classes) {
  std::vector<double> mixing(counts.begin(), counts.end());
  return assortativity(mixing, classes);
}

}  // namespace

double assortativity(const graph::MentionGraph& g, std::span<const std::int32_t> labels) {
  const int classes = label_classes(labels);
  if (classes <= 0) return kNaN;
  const auto edges = edge_arrays(g);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(classes * classes));
  kernels::pair_histogram(edges.src, edges.dst, labels, classes, counts);
  return assortativity_from_counts(counts, classes);
}

NullTestResult assortativity_test(const graph::MentionGraph& g, std::span<const std::int32_t> labels,
                                  const NullOptions& options) {
  if (labels.size() != g.node_count()) throw DataError("one community label per node is required");
  const int classes = label_classes(labels);
  std::vector<std::int32_t> pool;
  std::vector<bool> present(static_cast<std::size_t>(std::max(classes, 0)), false);
  for (auto l : labels) {
    if (l < 0) continue;
    pool.push_back(l);
    present[l] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2)
    throw DataError("assortativity needs at least two communities");
  const double observed = assortativity(g, labels);
  if (std::isnan(observed)) throw DataError("assortativity is undefined (all edges see a single community)");

  const auto edges = edge_arrays(g);
  std::vector<double> replicates(options.replicates);
  parallel_for(options.replicates, options.threads, [&](std::size_t i) {
    auto engine = stream_engine(options.seed, kAssortStream, i);
    const auto shuffled = resample_labels(labels, pool, engine);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(classes * classes));
    kernels::pair_histogram(edges.src, edges.dst, shuffled, classes, counts);
    replicates[i] = assortativity_from_counts(counts, classes);
  });
  return summarize("assortativity", observed, std::move(replicates), options.seed);
}

}  // namespace polarnet::nullmodels
