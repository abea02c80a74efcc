#include <cmath>
#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "senselab/embeddings.hpp"
#include "senselab/error.hpp"
#include "senselab/text.hpp"

using namespace senselab;
using namespace senselab::embeddings;
using senselab::text::Vocabulary;

TEST_SUITE_BEGIN("embeddings");

namespace {

// Small topical corpus: two word families that co-occur within themselves.
std::vector<std::vector<std::string>> topical_corpus(int reps) {
  std::vector<std::vector<std::string>> corpus;
  for (int r = 0; r < reps; ++r) {
    corpus.push_back({"sun", "warm", "light", "day", "sun"});
    corpus.push_back({"moon", "cold", "dark", "night", "moon"});
    corpus.push_back({"warm", "day", "light", "sun", "day"});
    corpus.push_back({"cold", "night", "dark", "moon", "night"});
  }
  return corpus;
}

}  // namespace

TEST_CASE("training loss decreases from first to last epoch (seed majority)") {
  auto corpus = topical_corpus(20);
  auto vocab = Vocabulary::build(corpus);
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SkipgramConfig cfg;
    cfg.dim = 16;
    cfg.window = 2;
    cfg.epochs = 5;
    cfg.seed = seed;
    auto table = train_skipgram(corpus, vocab, cfg);
    REQUIRE(table.loss_log.size() == 5);
    if (table.loss_log.back() < table.loss_log.front()) ++improved;
  }
  CHECK(improved >= 3);
}

TEST_CASE("distributionally identical tokens end up nearby") {
  // "alpha" and "beta" only ever occur inside identical context frames.
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::pair<std::string, std::string>> frames = {
      {"left1", "right1"}, {"left2", "right2"}, {"left3", "right3"}};
  for (int rep = 0; rep < 60; ++rep) {
    for (const auto& [l, r] : frames) {
      corpus.push_back({l, "alpha", r});
      corpus.push_back({l, "beta", r});
    }
    corpus.push_back({"noise1", "noise2", "noise3"});
    corpus.push_back({"noise4", "noise5", "noise6"});
  }
  auto vocab = Vocabulary::build(corpus);
  SkipgramConfig cfg;
  cfg.dim = 12;
  cfg.window = 1;
  cfg.negatives = 5;
  cfg.epochs = 25;
  cfg.lr = 0.05;
  cfg.seed = 3;
  auto table = train_skipgram(corpus, vocab, cfg);
  CHECK(cosine(table.lookup("alpha"), table.lookup("beta")) > 0.8);
}

TEST_CASE("lookup is total and pure") {
  auto corpus = topical_corpus(2);
  auto vocab = Vocabulary::build(corpus);
  SkipgramConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 1;
  auto table = train_skipgram(corpus, vocab, cfg);

  auto unk1 = table.lookup("never-seen-token");
  auto unk2 = table.lookup("another-unseen");
  CHECK(unk1 == unk2);  // both resolve to the UNK row
  CHECK(unk1 == table.lookup(text::kUnk));

  auto known1 = table.lookup("sun");
  auto known2 = table.lookup("sun");
  CHECK(known1 == known2);
  CHECK(static_cast<int>(known1.size()) == 8);
}

TEST_CASE("determinism and row-norm bound") {
  auto corpus = topical_corpus(10);
  auto vocab = Vocabulary::build(corpus);
  SkipgramConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 5;
  cfg.lr = 0.05;
  cfg.seed = 11;
  auto t1 = train_skipgram(corpus, vocab, cfg);
  auto t2 = train_skipgram(corpus, vocab, cfg);
  CHECK(t1.matrix() == t2.matrix());

  for (int i = 0; i < t1.n_rows(); ++i) {
    double norm = 0.0;
    const double* r = t1.row(i);
    for (int k = 0; k < t1.dim(); ++k) norm += r[k] * r[k];
    CHECK(std::sqrt(norm) < 100.0);
  }
}

TEST_CASE("binary round trip is bitwise exact; text dump exists") {
  namespace fs = std::filesystem;
  auto corpus = topical_corpus(3);
  auto vocab = Vocabulary::build(corpus);
  SkipgramConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  auto table = train_skipgram(corpus, vocab, cfg);

  const std::string dir =
      (fs::temp_directory_path() / "senselab_emb_test").string();
  fs::create_directories(dir);
  table.save_binary(dir + "/emb.bin");
  auto loaded = EmbeddingTable::load_binary(dir + "/emb.bin", vocab);
  REQUIRE(loaded.matrix().size() == table.matrix().size());
  CHECK(std::memcmp(loaded.matrix().data(), table.matrix().data(),
                    table.matrix().size() * sizeof(double)) == 0);

  // loading with a different vocabulary must fail the hash check
  auto other_vocab = Vocabulary::build({{"completely", "different"}});
  CHECK_THROWS_AS(EmbeddingTable::load_binary(dir + "/emb.bin", other_vocab),
                  DataError);

  table.save_text(dir + "/emb.txt");
  CHECK(fs::file_size(dir + "/emb.txt") > 0);
  fs::remove_all(dir);
}

TEST_CASE("config validation") {
  auto corpus = topical_corpus(1);
  auto vocab = Vocabulary::build(corpus);
  SkipgramConfig bad;
  bad.window = 0;
  CHECK_THROWS_AS(train_skipgram(corpus, vocab, bad), ConfigError);
  bad.window = 5;
  bad.negatives = 0;
  CHECK_THROWS_AS(train_skipgram(corpus, vocab, bad), ConfigError);
  CHECK_THROWS_AS(train_skipgram({}, vocab, SkipgramConfig{}), DataError);
}

TEST_SUITE_END();
