#include "senselab/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "senselab/error.hpp"

namespace senselab::embeddings {

EmbeddingTable::EmbeddingTable(text::Vocabulary vocab, int dim)
    : vocab_(std::move(vocab)), dim_(dim) {
  if (dim < 1) throw ConfigError("embeddings: dim must be positive");
  matrix_.assign(static_cast<std::size_t>(vocab_.size()) * dim_, 0.0);
}

const double* EmbeddingTable::row(int id) const {
  if (id < 0 || id >= vocab_.size()) {
    throw ContractError("embeddings: row " + std::to_string(id) +
                        " out of range");
  }
  return matrix_.data() + static_cast<std::size_t>(id) * dim_;
}

std::vector<double> EmbeddingTable::lookup(const std::string& token) const {
  const double* r = row(vocab_.id_or_unk(token));
  return std::vector<double>(r, r + dim_);
}

nn::Tensor EmbeddingTable::to_tensor(bool requires_grad) const {
  return nn::Tensor::from_data({vocab_.size(), dim_}, matrix_, requires_grad);
}

namespace {
constexpr char kMagic[4] = {'S', 'L', 'E', 'B'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void EmbeddingTable::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("embeddings: cannot write " + path);
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t v = static_cast<std::uint64_t>(vocab_.size());
  const std::uint64_t d = static_cast<std::uint64_t>(dim_);
  const std::uint64_t hash = vocab_.content_hash();
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  out.write(reinterpret_cast<const char*>(&hash), sizeof(hash));
  out.write(reinterpret_cast<const char*>(matrix_.data()),
            static_cast<std::streamsize>(matrix_.size() * sizeof(double)));
  if (!out) throw DataError("embeddings: write failed for " + path);
}

EmbeddingTable EmbeddingTable::load_binary(const std::string& path,
                                           text::Vocabulary vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("embeddings: cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("embeddings: bad magic in " + path);
  }
  std::uint32_t version;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) {
    throw DataError("embeddings: unsupported version in " + path);
  }
  std::uint64_t v, d, hash;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (!in) throw DataError("embeddings: truncated header in " + path);
  if (hash != vocab.content_hash() ||
      v != static_cast<std::uint64_t>(vocab.size())) {
    throw DataError("embeddings: vocabulary hash mismatch for " + path);
  }
  EmbeddingTable table(std::move(vocab), static_cast<int>(d));
  in.read(reinterpret_cast<char*>(table.matrix_.data()),
          static_cast<std::streamsize>(table.matrix_.size() * sizeof(double)));
  if (!in) throw DataError("embeddings: truncated matrix in " + path);
  return table;
}

void EmbeddingTable::save_text(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("embeddings: cannot write " + path);
  out << vocab_.size() << " " << dim_ << "\n";
  out.precision(17);
  for (int i = 0; i < vocab_.size(); ++i) {
    out << vocab_.token(i);
    const double* r = row(i);
    for (int j = 0; j < dim_; ++j) out << " " << r[j];
    out << "\n";
  }
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ContractError("cosine: dimension mismatch");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  // -log(1 + exp(-x)) without overflow
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

EmbeddingTable train_skipgram(
    const std::vector<std::vector<std::string>>& corpus,
    const text::Vocabulary& vocab, const SkipgramConfig& cfg) {
  if (corpus.empty()) throw DataError("skipgram: empty corpus");
  if (cfg.window < 1) throw ConfigError("skipgram: window must be >= 1");
  if (cfg.negatives < 1) throw ConfigError("skipgram: negatives must be >= 1");
  if (cfg.epochs < 1) throw ConfigError("skipgram: epochs must be >= 1");

  const int dim = cfg.dim;
  EmbeddingTable table(vocab, dim);
  Rng rng = Rng(cfg.seed).substream("skipgram");

  std::vector<double>& in_vecs = table.matrix();
  for (double& x : in_vecs) x = rng.uniform(-0.5 / dim, 0.5 / dim);
  std::vector<double> out_vecs(in_vecs.size(), 0.0);

  // Negative-sampling CDF over unigram^0.75.
  std::vector<double> cdf(static_cast<std::size_t>(vocab.size()), 0.0);
  double mass = 0.0;
  for (int i = 0; i < vocab.size(); ++i) {
    const double c = static_cast<double>(vocab.count(vocab.token(i)));
    mass += c > 0.0 ? std::pow(c, 0.75) : 0.0;
    cdf[static_cast<std::size_t>(i)] = mass;
  }
  if (mass <= 0.0) throw DataError("skipgram: corpus has no counted tokens");
  auto sample_negative = [&](Rng& r) {
    const double u = r.uniform() * mass;
    return static_cast<int>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };

  std::vector<std::vector<int>> ids;
  std::int64_t total_tokens = 0;
  ids.reserve(corpus.size());
  for (const auto& sent : corpus) {
    std::vector<int> s;
    s.reserve(sent.size());
    for (const auto& tok : sent) s.push_back(vocab.id_or_unk(tok));
    total_tokens += static_cast<std::int64_t>(s.size());
    ids.push_back(std::move(s));
  }

  const std::int64_t budget =
      std::max<std::int64_t>(1, total_tokens * cfg.epochs);
  std::int64_t processed = 0;
  std::vector<double> center_err(static_cast<std::size_t>(dim));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::int64_t epoch_pairs = 0;
    for (const auto& sent : ids) {
      for (std::size_t i = 0; i < sent.size(); ++i) {
        ++processed;
        const double lr =
            cfg.lr * std::max(1e-4, 1.0 - static_cast<double>(processed) /
                                              static_cast<double>(budget));
        const int center = sent[i];
        const int b = 1 + rng.uniform_int(cfg.window);
        const std::size_t lo = i >= static_cast<std::size_t>(b) ? i - static_cast<std::size_t>(b) : 0;
        const std::size_t hi = std::min(sent.size() - 1, i + static_cast<std::size_t>(b));
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const int context = sent[j];
          double* v = in_vecs.data() + static_cast<std::size_t>(center) * dim;
          std::fill(center_err.begin(), center_err.end(), 0.0);
          double pair_loss = 0.0;
          for (int neg = 0; neg <= cfg.negatives; ++neg) {
            int target;
            double label;
            if (neg == 0) {
              target = context;
              label = 1.0;
            } else {
              target = sample_negative(rng);
              if (target == context) continue;
              label = 0.0;
            }
            double* u = out_vecs.data() + static_cast<std::size_t>(target) * dim;
            double dot = 0.0;
            for (int k = 0; k < dim; ++k) dot += u[k] * v[k];
            const double f = stable_sigmoid(dot);
            pair_loss += label > 0.5 ? -log_sigmoid(dot) : -log_sigmoid(-dot);
            const double g = (label - f) * lr;
            for (int k = 0; k < dim; ++k) {
              center_err[static_cast<std::size_t>(k)] += g * u[k];
              u[k] += g * v[k];
            }
          }
          for (int k = 0; k < dim; ++k) {
            v[k] += center_err[static_cast<std::size_t>(k)];
          }
          epoch_loss += pair_loss;
          epoch_pairs += 1;
        }
      }
    }
    table.loss_log.push_back(epoch_pairs > 0
                                 ? epoch_loss / static_cast<double>(epoch_pairs)
                                 : 0.0);
  }
  table.trained_config = cfg;
  return table;
}

}  // namespace senselab::embeddings
