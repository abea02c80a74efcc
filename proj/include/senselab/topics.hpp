#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "senselab/embeddings.hpp"
#include "senselab/ops.hpp"
#include "senselab/rng.hpp"
#include "senselab/tensor.hpp"
#include "senselab/text.hpp"

namespace senselab::topics {

struct LdaConfig {
  int n_topics = 50;
  double alpha = -1.0;  // negative -> 50/K heuristic
  double beta = 0.01;
  int iterations = 30;
  std::uint64_t seed = 1;
};

// Collapsed Gibbs LDA. Counts are exposed read-only; resample_token and
// conditional exist so the sampler's conditional distribution can be
// verified empirically.
class LdaModel {
 public:
  static LdaModel train(const std::vector<std::vector<std::string>>& corpus,
                        const text::Vocabulary& vocab, const LdaConfig& cfg);

  int n_topics() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int n_docs() const { return static_cast<int>(docs_.size()); }
  std::int64_t total_tokens() const { return total_tokens_; }
  const text::Vocabulary& vocab() const { return vocab_; }

  std::int64_t topic_count(int k) const {
    return topic_counts_[static_cast<std::size_t>(k)];
  }
  std::int64_t topic_word_count(int k, int w) const {
    return topic_word_[static_cast<std::size_t>(k) * vocab_.size() +
                       static_cast<std::size_t>(w)];
  }
  std::int64_t doc_topic_count(int d, int k) const {
    return doc_topic_[static_cast<std::size_t>(d) * k_ +
                      static_cast<std::size_t>(k)];
  }
  int assignment(int d, int i) const {
    return assignments_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  }

  // Full-conditional p(z = k | rest) for token i of doc d, computed with
  // that token's current assignment removed.
  std::vector<double> conditional(int d, int i) const;
  int resample_token(int d, int i, Rng& rng);
  void sweep(Rng& rng);

  // Point-estimate predictive log-likelihood of the training corpus.
  double log_likelihood() const;
  const std::vector<double>& loglik_log() const { return loglik_log_; }

  // Top words by smoothed probability, ties broken by vocabulary id.
  // k larger than the vocabulary truncates with a warning.
  std::vector<std::pair<std::string, double>> top_k(int topic, int k) const;
  std::vector<std::string> top_k_words(int topic, int k) const;

  void save(const std::string& path) const;
  static LdaModel load(const std::string& path, const text::Vocabulary& vocab);

  std::string top_words_tsv(int k) const;

 private:
  LdaModel(const text::Vocabulary& vocab, const LdaConfig& cfg);

  void add_token(int d, int i, int topic);
  void remove_token(int d, int i);

  text::Vocabulary vocab_;
  int k_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<std::vector<int>> docs_;         // token ids
  std::vector<std::vector<int>> assignments_;  // per-token topics
  std::vector<std::int64_t> topic_word_;       // K x V
  std::vector<std::int64_t> doc_topic_;        // D x K
  std::vector<std::int64_t> topic_counts_;     // K
  std::int64_t total_tokens_ = 0;
  std::vector<double> loglik_log_;
  int iterations_run_ = 0;
};

struct ConvConfig {
  int filters = 100;
  int width = 3;
  bool tanh_activation = true;
  std::uint64_t seed = 1;  // filter initialization stream
};

// d x k matrix of the topic's top-word embeddings, one word per column.
nn::Tensor topic_embedding_matrix(const std::vector<std::string>& top_words,
                                  const embeddings::EmbeddingTable& emb);

// conv -> (optional tanh) -> max over positions, flattened to length f.
// Differentiable in everything that requires grad when a tape is given.
nn::Tensor topic_vector(nn::Tape* tape, const nn::Tensor& word_matrix,
                        const nn::Tensor& filters, const nn::Tensor& bias,
                        bool tanh_activation);

nn::Tensor init_conv_filters(int filters, int emb_dim, int width,
                             std::uint64_t seed, bool requires_grad);

// Frozen topic bank: the per-topic word lists plus the vectors produced by
// one shared filter set.
struct TopicMatrix {
  int k_top = 0;
  int emb_dim = 0;
  ConvConfig conv;
  std::vector<std::vector<std::string>> top_words;  // per topic
  std::vector<std::vector<double>> vectors;         // per topic, length f
  std::vector<double> filter_values;                // f x d x w
  std::vector<double> bias_values;                  // f

  int n_topics() const { return static_cast<int>(top_words.size()); }

  void save(const std::string& path) const;
  static TopicMatrix load(const std::string& path);
};

TopicMatrix build_topic_matrix(const LdaModel& lda,
                               const embeddings::EmbeddingTable& emb,
                               int k_top, const ConvConfig& conv);

}  // namespace senselab::topics
