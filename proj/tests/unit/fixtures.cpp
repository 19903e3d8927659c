#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace fixtures {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("polarnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

polarnet::graph::MentionGraph graph_of(const std::vector<std::string>& edges) {
  std::vector<polarnet::graph::NamedEdge> list;
  for (const auto& e : edges) {
    const auto gt = e.find('>');
    list.push_back({e.substr(0, gt), e.substr(gt + 1), 1, 0.0, {}});
  }
  return polarnet::graph::MentionGraph::from_edges(std::move(list));
}

polarnet::ingest::TweetRecord tweet(std::string id, std::string user, long seconds, std::string text,
                                    polarnet::ingest::TweetKind kind, std::vector<std::string> mentions) {
  polarnet::ingest::TweetRecord t;
  t.tweet_id = std::move(id);
  t.user_id = std::move(user);
  t.created_at = polarnet::ingest::Timestamp{std::chrono::seconds{1430438400 + seconds}};
  t.text = std::move(text);
  t.kind = kind;
  t.mentions = std::move(mentions);
  if (kind == polarnet::ingest::TweetKind::retweet && t.mentions.empty()) t.retweet_of = "src";
  return t;
}

}  // namespace fixtures
