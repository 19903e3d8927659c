// polarnet command line: one subcommand per pipeline stage plus `run` for the
// whole pipeline and `synth` for synthetic corpora.

#include <fmt/format.h>

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polarnet/error.hpp"
#include "polarnet/pipeline.hpp"
#include "polarnet/synth.hpp"

namespace {

using polarnet::pipeline::RunConfig;

struct RawOptions {
  std::string start;
  std::string end;
  std::string strategy = "mention";
  std::string stage;
};

void add_inputs(CLI::App* app, RunConfig& config, RawOptions& raw) {
  app->add_option("--tweets", config.tweets, "tweet archive (JSON lines)");
  app->add_option("--lexicon", config.lexicon, "sentiment lexicon (word<TAB>score)");
  app->add_option("--annotations", config.annotations, "hand-labelled users (user_id,label)");
  app->add_option("--followers", config.followers, "follower edges (follower,followed)");
  app->add_option("--hashtag", config.hashtags, "keep tweets carrying this hashtag (repeatable)");
  app->add_option("--start", raw.start, "window start, ISO-8601 (inclusive)");
  app->add_option("--end", raw.end, "window end, ISO-8601 (inclusive)");
  app->add_option("--min-community-size", config.min_community_size, "smallest community kept")
      ->capture_default_str();
  app->add_option("--top-k", config.top_k, "largest communities kept")->capture_default_str();
  app->add_option("--strategy", raw.strategy, "cascade parent oracle: mention or follower")
      ->capture_default_str();
  app->add_option("--min-classified", config.min_classified,
                  "classified users a cascade needs for the proportion histogram")
      ->capture_default_str();
}

void finish_config(RunConfig& config, const RawOptions& raw) {
  if (!raw.start.empty()) {
    config.start = polarnet::ingest::parse_timestamp(raw.start);
    if (!config.start) throw polarnet::ConfigError("--start: not an ISO-8601 timestamp: " + raw.start);
  }
  if (!raw.end.empty()) {
    config.end = polarnet::ingest::parse_timestamp(raw.end);
    if (!config.end) throw polarnet::ConfigError("--end: not an ISO-8601 timestamp: " + raw.end);
  }
  auto strategy = polarnet::cascades::parse_strategy(raw.strategy);
  if (!strategy) throw polarnet::ConfigError("--strategy: expected mention or follower, got " + raw.strategy);
  config.strategy = *strategy;
  if (config.threads == 0) throw polarnet::ConfigError("--threads must be at least 1");
  if (config.top_k == 0) throw polarnet::ConfigError("--top-k must be at least 1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-scored mention networks: communities, null models and retweet cascades"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  RawOptions raw;
  app.add_option("--seed", config.seed, "random seed")->capture_default_str();
  app.add_option("--replicates", config.replicates, "Monte Carlo replicates per null test")
      ->capture_default_str();
  app.add_flag("--strict", config.strict, "treat malformed input and undefined statistics as fatal");
  app.add_option("--out", config.out, "artifact directory")->capture_default_str();
  app.add_option("--threads", config.threads, "worker threads (results do not depend on it)")
      ->capture_default_str();

  std::vector<std::pair<CLI::App*, polarnet::pipeline::Stage>> stage_commands;
  auto stage_command = [&](polarnet::pipeline::Stage stage, const char* help) {
    auto* sub = app.add_subcommand(std::string(polarnet::pipeline::to_string(stage)), help);
    add_inputs(sub, config, raw);
    stage_commands.emplace_back(sub, stage);
    return sub;
  };
  stage_command(polarnet::pipeline::Stage::ingest, "filter and validate the tweet archive");
  stage_command(polarnet::pipeline::Stage::score, "lexicon scores for every tweet");
  stage_command(polarnet::pipeline::Stage::graph, "mutual mention network, rescaled sentiment, statistics");
  stage_command(polarnet::pipeline::Stage::communities, "Louvain communities, sides and validation");
  stage_command(polarnet::pipeline::Stage::cascades, "retweet cascades and diffusion tables");
  stage_command(polarnet::pipeline::Stage::report, "collect stage summaries into summary.json");

  std::string null_name;
  auto* nulltest = app.add_subcommand("nulltest", "randomization tests");
  add_inputs(nulltest, config, raw);
  nulltest->add_option("test", null_name, "correlation, linkclass or assortativity")
      ->required()
      ->check(CLI::IsMember({"correlation", "linkclass", "assortativity"}));

  auto* run = app.add_subcommand("run", "the whole pipeline, or one stage with --stage");
  add_inputs(run, config, raw);
  run->add_option("--stage", raw.stage, "run only this stage");

  polarnet::synth::SynthConfig synth_config;
  std::size_t per_side = 0;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus with planted truth into --out");
  synth->add_option("--users-per-side", per_side, "users on each side (overrides the two below)");
  synth->add_option("--users-yes", synth_config.users_yes)->capture_default_str();
  synth->add_option("--users-no", synth_config.users_no)->capture_default_str();
  synth->add_option("--p-in", synth_config.p_in, "same-side reciprocal mention probability")->capture_default_str();
  synth->add_option("--p-out", synth_config.p_out, "cross-side reciprocal mention probability")
      ->capture_default_str();
  synth->add_option("--p-one-way", synth_config.p_one_way, "one-directional mention probability")
      ->capture_default_str();
  synth->add_option("--mean-yes", synth_config.mean_yes)->capture_default_str();
  synth->add_option("--mean-no", synth_config.mean_no)->capture_default_str();
  synth->add_option("--spread", synth_config.spread)->capture_default_str();
  synth->add_option("--cascades", synth_config.cascades)->capture_default_str();
  synth->add_option("--branching", synth_config.branching, "mean offspring per cascade node")
      ->capture_default_str();
  synth->add_option("--max-cascade-size", synth_config.max_cascade_size)->capture_default_str();
  synth->add_option("--cross-side-retweet-prob", synth_config.cross_side_retweet_prob)->capture_default_str();
  synth->add_option("--annotated-fraction", synth_config.annotated_fraction)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    finish_config(config, raw);
    if (synth->parsed()) {
      if (per_side > 0) synth_config.users_yes = synth_config.users_no = per_side;
      synth_config.seed = config.seed;
      polarnet::synth::write_corpus(polarnet::synth::generate(synth_config), config.out);
      return 0;
    }
    if (nulltest->parsed()) {
      polarnet::pipeline::run_nulltest(config, *polarnet::pipeline::parse_null_test(null_name));
      return 0;
    }
    if (run->parsed()) {
      if (raw.stage.empty()) {
        polarnet::pipeline::run_pipeline(config);
      } else {
        auto stage = polarnet::pipeline::parse_stage(raw.stage);
        if (!stage) throw polarnet::ConfigError("--stage: unknown stage " + raw.stage);
        polarnet::pipeline::run_stage(config, *stage);
      }
      return 0;
    }
    for (auto [sub, stage] : stage_commands) {
      if (sub->parsed()) {
        polarnet::pipeline::run_stage(config, stage);
        return 0;
      }
    }
  } catch (const polarnet::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const polarnet::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
