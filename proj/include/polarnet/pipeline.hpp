#pragma once

// Stage orchestration. Every stage reads the flat-file artifacts of the
// stages before it from the output directory and writes its own, so stages
// can run one at a time or back to back with the same result.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polarnet/cascades.hpp"
#include "polarnet/ingest.hpp"

namespace polarnet::pipeline {

inline constexpr int kSchemaVersion = 1;

enum class Stage { ingest, score, graph, communities, nulltest, cascades, report };
std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view text);
const std::vector<Stage>& all_stages();

enum class NullTest { correlation, linkclass, assortativity };
std::string_view to_string(NullTest t);
std::optional<NullTest> parse_null_test(std::string_view text);

struct RunConfig {
  std::filesystem::path tweets;
  std::filesystem::path lexicon;
  std::filesystem::path annotations;  // optional
  std::filesystem::path followers;    // needed by the follower strategy
  std::vector<std::string> hashtags;  // empty: keep every tweet
  std::optional<ingest::Timestamp> start;
  std::optional<ingest::Timestamp> end;
  std::uint64_t seed = 1;
  std::size_t replicates = 1000;
  bool strict = false;
  unsigned threads = 1;  // caps workers; never changes results
  std::size_t min_community_size = 20;
  std::size_t top_k = 2;
  cascades::Strategy strategy = cascades::Strategy::mention;
  std::size_t min_classified = 10;
  std::filesystem::path out = "out";
};

void run_ingest(const RunConfig& config);
void run_score(const RunConfig& config);
void run_graph(const RunConfig& config);
void run_communities(const RunConfig& config);
void run_nulltest(const RunConfig& config, NullTest test);
void run_cascades(const RunConfig& config);
/// Collects the stage summaries into <out>/summary.json.
void run_report(const RunConfig& config);

/// One stage; the nulltest stage runs all three tests.
void run_stage(const RunConfig& config, Stage stage);

/// Every stage in order. On failure a FAILED marker naming the stage is left
/// in the output directory and the error is rethrown.
void run_pipeline(const RunConfig& config);

}  // namespace polarnet::pipeline
