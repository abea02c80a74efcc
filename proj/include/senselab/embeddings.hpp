#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "senselab/rng.hpp"
#include "senselab/tensor.hpp"
#include "senselab/text.hpp"

namespace senselab::embeddings {

struct SkipgramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;  // linearly decayed over processed tokens
  std::uint64_t seed = 1;
};

// Static word vectors over a fixed vocabulary. Rows are row-major doubles;
// out-of-vocabulary lookups resolve to the UNK row.
class EmbeddingTable {
 public:
  EmbeddingTable(text::Vocabulary vocab, int dim);

  const text::Vocabulary& vocab() const { return vocab_; }
  int dim() const { return dim_; }
  int n_rows() const { return vocab_.size(); }

  const double* row(int id) const;
  std::vector<double> lookup(const std::string& token) const;

  std::vector<double>& matrix() { return matrix_; }
  const std::vector<double>& matrix() const { return matrix_; }

  // V x dim tensor copy, optionally as a trainable parameter.
  nn::Tensor to_tensor(bool requires_grad) const;

  // Binary layout: magic "SLEB", u32 version, u64 V, u64 dim, u64 vocab hash,
  // then V*dim little-endian doubles. The vocabulary travels separately and
  // must hash-match at load time.
  void save_binary(const std::string& path) const;
  static EmbeddingTable load_binary(const std::string& path,
                                    text::Vocabulary vocab);

  // word2vec-style text dump for inspection.
  void save_text(const std::string& path) const;

  std::vector<double> loss_log;  // mean pair loss per epoch
  SkipgramConfig trained_config;

 private:
  text::Vocabulary vocab_;
  int dim_;
  std::vector<double> matrix_;
};

// Skip-gram with negative sampling over the given corpus; deterministic for
// a fixed seed. Negative draws follow the unigram^0.75 distribution.
EmbeddingTable train_skipgram(
    const std::vector<std::vector<std::string>>& corpus,
    const text::Vocabulary& vocab, const SkipgramConfig& cfg);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace senselab::embeddings
