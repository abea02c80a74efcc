#include "senselab/topics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "senselab/checkpoint.hpp"
#include "senselab/error.hpp"

namespace senselab::topics {

LdaModel::LdaModel(const text::Vocabulary& vocab, const LdaConfig& cfg)
    : vocab_(vocab),
      k_(cfg.n_topics),
      alpha_(cfg.alpha < 0.0 ? 50.0 / cfg.n_topics : cfg.alpha),
      beta_(cfg.beta) {}

void LdaModel::add_token(int d, int i, int topic) {
  const int w = docs_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  assignments_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] = topic;
  topic_word_[static_cast<std::size_t>(topic) * vocab_.size() +
              static_cast<std::size_t>(w)] += 1;
  doc_topic_[static_cast<std::size_t>(d) * k_ + static_cast<std::size_t>(topic)] += 1;
  topic_counts_[static_cast<std::size_t>(topic)] += 1;
}

void LdaModel::remove_token(int d, int i) {
  const int w = docs_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  const int topic =
      assignments_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  topic_word_[static_cast<std::size_t>(topic) * vocab_.size() +
              static_cast<std::size_t>(w)] -= 1;
  doc_topic_[static_cast<std::size_t>(d) * k_ + static_cast<std::size_t>(topic)] -= 1;
  topic_counts_[static_cast<std::size_t>(topic)] -= 1;
}

LdaModel LdaModel::train(const std::vector<std::vector<std::string>>& corpus,
                         const text::Vocabulary& vocab, const LdaConfig& cfg) {
  if (corpus.empty()) throw DataError("lda: empty corpus");
  if (cfg.n_topics < 2) throw ConfigError("lda: need K >= 2");
  if (cfg.iterations < 0) throw ConfigError("lda: negative iterations");

  LdaModel m(vocab, cfg);
  m.docs_.reserve(corpus.size());
  for (const auto& sent : corpus) {
    std::vector<int> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) ids.push_back(vocab.id_or_unk(tok));
    m.total_tokens_ += static_cast<std::int64_t>(ids.size());
    m.docs_.push_back(std::move(ids));
  }
  m.topic_word_.assign(static_cast<std::size_t>(m.k_) * vocab.size(), 0);
  m.doc_topic_.assign(m.docs_.size() * static_cast<std::size_t>(m.k_), 0);
  m.topic_counts_.assign(static_cast<std::size_t>(m.k_), 0);
  m.assignments_.resize(m.docs_.size());

  Rng rng = Rng(cfg.seed).substream("lda");
  for (std::size_t d = 0; d < m.docs_.size(); ++d) {
    m.assignments_[d].assign(m.docs_[d].size(), 0);
    for (std::size_t i = 0; i < m.docs_[d].size(); ++i) {
      m.add_token(static_cast<int>(d), static_cast<int>(i),
                  rng.uniform_int(m.k_));
    }
  }

  for (int it = 0; it < cfg.iterations; ++it) {
    m.sweep(rng);
    m.loglik_log_.push_back(m.log_likelihood());
  }
  m.iterations_run_ = cfg.iterations;
  return m;
}

std::vector<double> LdaModel::conditional(int d, int i) const {
  const int w = docs_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  const int current =
      assignments_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  const double v_beta = beta_ * static_cast<double>(vocab_.size());
  std::vector<double> p(static_cast<std::size_t>(k_));
  double total = 0.0;
  for (int k = 0; k < k_; ++k) {
    double nd = static_cast<double>(
        doc_topic_[static_cast<std::size_t>(d) * k_ + static_cast<std::size_t>(k)]);
    double nw = static_cast<double>(
        topic_word_[static_cast<std::size_t>(k) * vocab_.size() +
                    static_cast<std::size_t>(w)]);
    double nk = static_cast<double>(topic_counts_[static_cast<std::size_t>(k)]);
    if (k == current) {
      nd -= 1.0;
      nw -= 1.0;
      nk -= 1.0;
    }
    const double val = (nd + alpha_) * (nw + beta_) / (nk + v_beta);
    p[static_cast<std::size_t>(k)] = val;
    total += val;
  }
  for (double& x : p) x /= total;
  return p;
}

int LdaModel::resample_token(int d, int i, Rng& rng) {
  remove_token(d, i);
  const int w = docs_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  const double v_beta = beta_ * static_cast<double>(vocab_.size());
  double total = 0.0;
  std::vector<double> cdf(static_cast<std::size_t>(k_));
  for (int k = 0; k < k_; ++k) {
    const double nd = static_cast<double>(
        doc_topic_[static_cast<std::size_t>(d) * k_ + static_cast<std::size_t>(k)]);
    const double nw = static_cast<double>(
        topic_word_[static_cast<std::size_t>(k) * vocab_.size() +
                    static_cast<std::size_t>(w)]);
    const double nk = static_cast<double>(topic_counts_[static_cast<std::size_t>(k)]);
    total += (nd + alpha_) * (nw + beta_) / (nk + v_beta);
    cdf[static_cast<std::size_t>(k)] = total;
  }
  const double u = rng.uniform() * total;
  const int topic = static_cast<int>(
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  add_token(d, i, std::min(topic, k_ - 1));
  return assignments_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
}

void LdaModel::sweep(Rng& rng) {
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      resample_token(static_cast<int>(d), static_cast<int>(i), rng);
    }
  }
}

double LdaModel::log_likelihood() const {
  const double v_beta = beta_ * static_cast<double>(vocab_.size());
  const double k_alpha = alpha_ * static_cast<double>(k_);
  double ll = 0.0;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const double len = static_cast<double>(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int w = docs_[d][i];
      double p = 0.0;
      for (int k = 0; k < k_; ++k) {
        const double theta =
            (static_cast<double>(doc_topic_[d * static_cast<std::size_t>(k_) +
                                            static_cast<std::size_t>(k)]) +
             alpha_) /
            (len + k_alpha);
        const double phi =
            (static_cast<double>(topic_word_[static_cast<std::size_t>(k) * vocab_.size() +
                                             static_cast<std::size_t>(w)]) +
             beta_) /
            (static_cast<double>(topic_counts_[static_cast<std::size_t>(k)]) + v_beta);
        p += theta * phi;
      }
      ll += std::log(p);
    }
  }
  return ll;
}

std::vector<std::pair<std::string, double>> LdaModel::top_k(int topic,
                                                            int k) const {
  if (topic < 0 || topic >= k_) {
    throw ContractError("lda: topic " + std::to_string(topic) + " out of range");
  }
  const int v = vocab_.size();
  if (k > v) {
    std::cerr << "warning: top_k " << k << " exceeds vocabulary size " << v
              << ", truncating\n";
    k = v;
  }
  std::vector<int> ids(static_cast<std::size_t>(v));
  std::iota(ids.begin(), ids.end(), 0);
  const std::int64_t* counts =
      topic_word_.data() + static_cast<std::size_t>(topic) * v;
  // count descending, vocabulary id ascending on ties; smoothing is uniform
  // so the order matches smoothed probability.
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(),
                    [&](int a, int b) {
                      if (counts[a] != counts[b]) return counts[a] > counts[b];
                      return a < b;
                    });
  const double denom =
      static_cast<double>(topic_counts_[static_cast<std::size_t>(topic)]) +
      beta_ * static_cast<double>(v);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int id = ids[static_cast<std::size_t>(i)];
    out.emplace_back(vocab_.token(id),
                     (static_cast<double>(counts[id]) + beta_) / denom);
  }
  return out;
}

std::vector<std::string> LdaModel::top_k_words(int topic, int k) const {
  std::vector<std::string> words;
  for (auto& [w, p] : top_k(topic, k)) words.push_back(w);
  return words;
}

void LdaModel::save(const std::string& path) const {
  Checkpoint ck;
  ck.meta["kind"] = "lda";
  ck.meta["n_topics"] = k_;
  ck.meta["alpha"] = alpha_;
  ck.meta["beta"] = beta_;
  ck.meta["vocab_hash"] = vocab_.content_hash();
  ck.meta["iterations"] = iterations_run_;
  ck.meta["n_docs"] = n_docs();
  ck.add_blob("topic_word",
              std::vector<double>(topic_word_.begin(), topic_word_.end()));
  ck.add_blob("doc_topic",
              std::vector<double>(doc_topic_.begin(), doc_topic_.end()));
  ck.add_blob("topic_counts",
              std::vector<double>(topic_counts_.begin(), topic_counts_.end()));
  ck.add_blob("loglik", loglik_log_);
  ck.save(path);
}

LdaModel LdaModel::load(const std::string& path,
                        const text::Vocabulary& vocab) {
  Checkpoint ck = Checkpoint::load(path);
  if (ck.meta.at("kind").get<std::string>() != "lda") {
    throw DataError("lda: " + path + " is not an lda checkpoint");
  }
  if (ck.meta.at("vocab_hash").get<std::uint64_t>() != vocab.content_hash()) {
    throw DataError("lda: vocabulary hash mismatch for " + path);
  }
  LdaConfig cfg;
  cfg.n_topics = ck.meta.at("n_topics").get<int>();
  cfg.alpha = ck.meta.at("alpha").get<double>();
  cfg.beta = ck.meta.at("beta").get<double>();
  LdaModel m(vocab, cfg);
  const auto& tw = ck.blob("topic_word");
  m.topic_word_.assign(tw.begin(), tw.end());
  const auto& dt = ck.blob("doc_topic");
  m.doc_topic_.assign(dt.begin(), dt.end());
  const auto& tc = ck.blob("topic_counts");
  m.topic_counts_.assign(tc.begin(), tc.end());
  m.loglik_log_ = ck.blob("loglik");
  m.iterations_run_ = ck.meta.at("iterations").get<int>();
  m.total_tokens_ =
      std::accumulate(m.topic_counts_.begin(), m.topic_counts_.end(),
                      static_cast<std::int64_t>(0));
  return m;
}

std::string LdaModel::top_words_tsv(int k) const {
  std::ostringstream out;
  out << "topic\trank\tword\tprobability\n";
  out.precision(8);
  for (int t = 0; t < k_; ++t) {
    const auto words = top_k(t, k);
    for (std::size_t r = 0; r < words.size(); ++r) {
      out << t << "\t" << r << "\t" << words[r].first << "\t"
          << words[r].second << "\n";
    }
  }
  return out.str();
}

nn::Tensor topic_embedding_matrix(const std::vector<std::string>& top_words,
                                  const embeddings::EmbeddingTable& emb) {
  if (top_words.empty()) {
    throw DimensionError("topic_embedding_matrix: no words");
  }
  const int d = emb.dim();
  const int k = static_cast<int>(top_words.size());
  nn::Tensor e = nn::Tensor::zeros({d, k});
  for (int j = 0; j < k; ++j) {
    const auto vec = emb.lookup(top_words[static_cast<std::size_t>(j)]);
    for (int i = 0; i < d; ++i) e(i, j) = vec[static_cast<std::size_t>(i)];
  }
  return e;
}

nn::Tensor topic_vector(nn::Tape* tape, const nn::Tensor& word_matrix,
                        const nn::Tensor& filters, const nn::Tensor& bias,
                        bool tanh_activation) {
  nn::Tensor feature_map = nn::conv1d(tape, word_matrix, filters, bias);
  if (tanh_activation) feature_map = nn::tanh_op(tape, feature_map);
  return nn::maxpool_over_time(tape, feature_map);
}

nn::Tensor init_conv_filters(int filters, int emb_dim, int width,
                             std::uint64_t seed, bool requires_grad) {
  Rng rng = Rng(seed).substream("conv-filters");
  nn::Tensor f = nn::Tensor::zeros({filters, emb_dim, width}, requires_grad);
  for (int i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform(-0.08, 0.08);
  return f;
}

TopicMatrix build_topic_matrix(const LdaModel& lda,
                               const embeddings::EmbeddingTable& emb,
                               int k_top, const ConvConfig& conv) {
  if (k_top < conv.width) {
    throw DimensionError("build_topic_matrix: top-word count " +
                         std::to_string(k_top) + " < filter width " +
                         std::to_string(conv.width));
  }
  TopicMatrix tm;
  tm.k_top = k_top;
  tm.emb_dim = emb.dim();
  tm.conv = conv;
  nn::Tensor filters =
      init_conv_filters(conv.filters, emb.dim(), conv.width, conv.seed, false);
  nn::Tensor bias = nn::Tensor::zeros({conv.filters});
  tm.filter_values = filters.vec();
  tm.bias_values = bias.vec();
  for (int t = 0; t < lda.n_topics(); ++t) {
    auto words = lda.top_k_words(t, k_top);
    nn::Tensor e = topic_embedding_matrix(words, emb);
    nn::Tensor v = topic_vector(nullptr, e, filters, bias, conv.tanh_activation);
    tm.top_words.push_back(std::move(words));
    tm.vectors.push_back(v.vec());
  }
  return tm;
}

void TopicMatrix::save(const std::string& path) const {
  Checkpoint ck;
  ck.meta["kind"] = "topic-matrix";
  ck.meta["k_top"] = k_top;
  ck.meta["emb_dim"] = emb_dim;
  ck.meta["filters"] = conv.filters;
  ck.meta["width"] = conv.width;
  ck.meta["tanh_activation"] = conv.tanh_activation;
  ck.meta["seed"] = conv.seed;
  ck.meta["top_words"] = top_words;
  std::vector<double> flat;
  for (const auto& v : vectors) flat.insert(flat.end(), v.begin(), v.end());
  ck.add_blob("vectors", std::move(flat));
  ck.add_blob("filters", filter_values);
  ck.add_blob("bias", bias_values);
  ck.save(path);
}

TopicMatrix TopicMatrix::load(const std::string& path) {
  Checkpoint ck = Checkpoint::load(path);
  if (ck.meta.at("kind").get<std::string>() != "topic-matrix") {
    throw DataError("topic matrix: " + path + " has wrong kind");
  }
  TopicMatrix tm;
  tm.k_top = ck.meta.at("k_top").get<int>();
  tm.emb_dim = ck.meta.at("emb_dim").get<int>();
  tm.conv.filters = ck.meta.at("filters").get<int>();
  tm.conv.width = ck.meta.at("width").get<int>();
  tm.conv.tanh_activation = ck.meta.at("tanh_activation").get<bool>();
  tm.conv.seed = ck.meta.at("seed").get<std::uint64_t>();
  tm.top_words =
      ck.meta.at("top_words").get<std::vector<std::vector<std::string>>>();
  tm.filter_values = ck.blob("filters");
  tm.bias_values = ck.blob("bias");
  const auto& flat = ck.blob("vectors");
  const std::size_t j = tm.top_words.size();
  if (j > 0) {
    const std::size_t f = flat.size() / j;
    for (std::size_t t = 0; t < j; ++t) {
      tm.vectors.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(t * f),
                              flat.begin() + static_cast<std::ptrdiff_t>((t + 1) * f));
    }
  }
  return tm;
}

}  // namespace senselab::topics
