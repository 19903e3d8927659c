#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "polarnet/graph.hpp"
#include "polarnet/ingest.hpp"

namespace fixtures {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& content);

/// Graph from "a>b" style edge specs.
polarnet::graph::MentionGraph graph_of(const std::vector<std::string>& edges);

polarnet::ingest::TweetRecord tweet(std::string id, std::string user, long seconds, std::string text,
                                    polarnet::ingest::TweetKind kind = polarnet::ingest::TweetKind::original,
                                    std::vector<std::string> mentions = {});

}  // namespace fixtures
