#include "senselab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "senselab/error.hpp"

namespace senselab::baselines {

void TfidfVectorizer::fit(const std::vector<std::vector<std::string>>& docs) {
  if (docs.empty()) throw DataError("tfidf: empty corpus");
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : docs) {
    std::map<std::string, bool> seen;
    for (const auto& tok : doc) {
      if (!seen[tok]) {
        seen[tok] = true;
        df[tok] += 1;
      }
    }
  }
  ids_.clear();
  tokens_.clear();
  dfs_.clear();
  for (const auto& [tok, count] : df) {  // alphabetical feature order
    ids_[tok] = static_cast<int>(tokens_.size());
    tokens_.push_back(tok);
    dfs_.push_back(count);
  }
  n_docs_ = static_cast<std::int64_t>(docs.size());
  fitted_ = true;
}

SparseVec TfidfVectorizer::transform(const std::vector<std::string>& doc) const {
  if (!fitted_) throw StateError("tfidf: transform called before fit");
  std::map<int, double> counts;
  for (const auto& tok : doc) {
    auto it = ids_.find(tok);
    if (it != ids_.end()) counts[it->second] += 1.0;
  }
  SparseVec out;
  out.reserve(counts.size());
  for (const auto& [id, tf] : counts) {
    const double idf_v = std::log(static_cast<double>(n_docs_) /
                                  static_cast<double>(dfs_[static_cast<std::size_t>(id)]));
    out.emplace_back(id, tf * idf_v);
  }
  return out;
}

std::optional<int> TfidfVectorizer::feature_id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

double TfidfVectorizer::idf(int feature) const {
  return std::log(static_cast<double>(n_docs_) /
                  static_cast<double>(dfs_[static_cast<std::size_t>(feature)]));
}

void TfidfVectorizer::to_checkpoint(Checkpoint& ck,
                                    const std::string& prefix) const {
  ck.meta[prefix + "tokens"] = tokens_;
  ck.meta[prefix + "n_docs"] = n_docs_;
  std::vector<double> dfs(dfs_.begin(), dfs_.end());
  ck.add_blob(prefix + "dfs", std::move(dfs));
}

TfidfVectorizer TfidfVectorizer::from_checkpoint(const Checkpoint& ck,
                                                 const std::string& prefix) {
  TfidfVectorizer v;
  v.tokens_ = ck.meta.at(prefix + "tokens").get<std::vector<std::string>>();
  v.n_docs_ = ck.meta.at(prefix + "n_docs").get<std::int64_t>();
  for (double d : ck.blob(prefix + "dfs")) {
    v.dfs_.push_back(static_cast<std::int64_t>(d));
  }
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.ids_[v.tokens_[i]] = static_cast<int>(i);
  }
  v.fitted_ = true;
  return v;
}

namespace {
// Finite stand-in for log(0); keeps scores orderable without NaN risks.
constexpr double kLogZero = -1e100;
}  // namespace

NaiveBayesModel NaiveBayesModel::train(
    const std::vector<std::vector<std::string>>& docs,
    const std::vector<int>& labels, int n_classes, double alpha) {
  if (docs.empty() || docs.size() != labels.size()) {
    throw DataError("naive bayes: empty or mismatched training set");
  }
  if (n_classes < 1) throw DataError("naive bayes: need at least one class");
  NaiveBayesModel m;
  m.alpha_ = alpha;

  std::map<std::string, int> vocab;
  for (const auto& doc : docs) {
    for (const auto& tok : doc) vocab.emplace(tok, 0);
  }
  for (auto& [tok, id] : vocab) {
    id = static_cast<int>(m.tokens_.size());
    m.tokens_.push_back(tok);
    m.ids_[tok] = id;
  }
  const int v = static_cast<int>(m.tokens_.size());

  std::vector<std::int64_t> class_docs(static_cast<std::size_t>(n_classes), 0);
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(n_classes),
      std::vector<std::int64_t>(static_cast<std::size_t>(v), 0));
  std::vector<std::int64_t> totals(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= n_classes) {
      throw LabelError("naive bayes: label " + std::to_string(c) +
                       " out of range");
    }
    class_docs[static_cast<std::size_t>(c)] += 1;
    for (const auto& tok : docs[i]) {
      counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(m.ids_[tok])] += 1;
      totals[static_cast<std::size_t>(c)] += 1;
    }
  }

  m.log_prior_.resize(static_cast<std::size_t>(n_classes));
  m.log_lik_.resize(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    const double prior = static_cast<double>(class_docs[static_cast<std::size_t>(c)]) /
                         static_cast<double>(docs.size());
    m.log_prior_[static_cast<std::size_t>(c)] =
        prior > 0.0 ? std::log(prior) : kLogZero;
    auto& ll = m.log_lik_[static_cast<std::size_t>(c)];
    ll.resize(static_cast<std::size_t>(v));
    const double denom = static_cast<double>(totals[static_cast<std::size_t>(c)]) +
                         alpha * static_cast<double>(v);
    for (int w = 0; w < v; ++w) {
      ll[static_cast<std::size_t>(w)] = std::log(
          (static_cast<double>(counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(w)]) +
           alpha) /
          denom);
    }
  }
  return m;
}

std::vector<double> NaiveBayesModel::predict_scores(
    const std::vector<std::string>& doc) const {
  std::vector<double> scores = log_prior_;
  for (const auto& tok : doc) {
    auto it = ids_.find(tok);
    if (it == ids_.end()) continue;  // unseen tokens carry no evidence
    for (std::size_t c = 0; c < scores.size(); ++c) {
      scores[c] += log_lik_[c][static_cast<std::size_t>(it->second)];
    }
  }
  return scores;
}

int NaiveBayesModel::predict(const std::vector<std::string>& doc) const {
  const auto scores = predict_scores(doc);
  int best = 0;
  for (int c = 1; c < static_cast<int>(scores.size()); ++c) {
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) {
      best = c;  // strict: ties keep the lowest class id
    }
  }
  return best;
}

void NaiveBayesModel::to_checkpoint(Checkpoint& ck,
                                    const std::string& prefix) const {
  ck.meta[prefix + "alpha"] = alpha_;
  ck.meta[prefix + "tokens"] = tokens_;
  ck.add_blob(prefix + "log_prior", log_prior_);
  std::vector<double> flat;
  for (const auto& row : log_lik_) {
    flat.insert(flat.end(), row.begin(), row.end());
  }
  ck.add_blob(prefix + "log_lik", std::move(flat));
}

NaiveBayesModel NaiveBayesModel::from_checkpoint(const Checkpoint& ck,
                                                 const std::string& prefix) {
  NaiveBayesModel m;
  m.alpha_ = ck.meta.at(prefix + "alpha").get<double>();
  m.tokens_ = ck.meta.at(prefix + "tokens").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.tokens_.size(); ++i) {
    m.ids_[m.tokens_[i]] = static_cast<int>(i);
  }
  m.log_prior_ = ck.blob(prefix + "log_prior");
  const auto& flat = ck.blob(prefix + "log_lik");
  const std::size_t v = m.tokens_.size();
  const std::size_t c = m.log_prior_.size();
  if (flat.size() != v * c) throw SchemaError("naive bayes: blob size mismatch");
  m.log_lik_.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    m.log_lik_[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * v),
                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * v));
  }
  return m;
}

double LinearModel::logistic_loss_grad(
    const std::vector<SparseVec>& x, const std::vector<int>& y, int n_classes,
    int n_features, const std::vector<double>& w, const std::vector<double>& b,
    double reg, std::vector<double>* grad_w, std::vector<double>* grad_b) {
  const double inv_n = 1.0 / static_cast<double>(x.size());
  if (grad_w) grad_w->assign(w.size(), 0.0);
  if (grad_b) grad_b->assign(b.size(), 0.0);
  double loss = 0.0;
  std::vector<double> scores(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int c = 0; c < n_classes; ++c) {
      double s = b[static_cast<std::size_t>(c)];
      const double* wrow = w.data() + static_cast<std::size_t>(c) * n_features;
      for (const auto& [f, val] : x[i]) s += wrow[f] * val;
      scores[static_cast<std::size_t>(c)] = s;
    }
    double mx = scores[0];
    for (double s : scores) mx = std::max(mx, s);
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s - mx);
    loss += inv_n * (mx + std::log(denom) - scores[static_cast<std::size_t>(y[i])]);
    if (grad_w || grad_b) {
      for (int c = 0; c < n_classes; ++c) {
        const double p = std::exp(scores[static_cast<std::size_t>(c)] - mx) / denom;
        const double delta = inv_n * (p - (c == y[i] ? 1.0 : 0.0));
        if (grad_b) (*grad_b)[static_cast<std::size_t>(c)] += delta;
        if (grad_w) {
          double* grow =
              grad_w->data() + static_cast<std::size_t>(c) * n_features;
          for (const auto& [f, val] : x[i]) grow[f] += delta * val;
        }
      }
    }
  }
  double sq = 0.0;
  for (double v : w) sq += v * v;
  loss += 0.5 * reg * sq;
  if (grad_w) {
    for (std::size_t j = 0; j < w.size(); ++j) (*grad_w)[j] += reg * w[j];
  }
  return loss;
}

LinearModel LinearModel::train(const std::vector<SparseVec>& x,
                               const std::vector<int>& y, int n_classes,
                               int n_features, const LinearConfig& cfg) {
  if (x.empty() || x.size() != y.size()) {
    throw DataError("linear model: empty or mismatched training set");
  }
  if (n_classes < 2) {
    throw DataError("linear model: need at least two classes, got " +
                    std::to_string(n_classes));
  }
  LinearModel m;
  m.kind_ = cfg.kind;
  m.n_classes_ = n_classes;
  m.n_features_ = n_features;
  m.w_.assign(static_cast<std::size_t>(n_classes) * n_features, 0.0);
  m.b_.assign(static_cast<std::size_t>(n_classes), 0.0);

  if (cfg.kind == LinearKind::logistic) {
    std::vector<double> gw, gb;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      logistic_loss_grad(x, y, n_classes, n_features, m.w_, m.b_, cfg.reg, &gw,
                         &gb);
      for (std::size_t j = 0; j < m.w_.size(); ++j) m.w_[j] -= cfg.lr * gw[j];
      for (std::size_t j = 0; j < m.b_.size(); ++j) m.b_[j] -= cfg.lr * gb[j];
    }
    return m;
  }

  // One-vs-rest hinge loss with eta_t = 1 / (lambda * t).
  const double lambda = cfg.reg;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  for (int c = 0; c < n_classes; ++c) {
    double* wrow = m.w_.data() + static_cast<std::size_t>(c) * n_features;
    double& bias = m.b_[static_cast<std::size_t>(c)];
    std::int64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double label = y[i] == c ? 1.0 : -1.0;
        double margin = bias;
        for (const auto& [f, val] : x[i]) margin += wrow[f] * val;
        margin *= label;
        const double shrink = 1.0 - eta * lambda;
        for (int f = 0; f < n_features; ++f) wrow[f] *= shrink;
        if (margin < 1.0) {
          for (const auto& [f, val] : x[i]) wrow[f] += eta * label * val;
          bias += eta * label;
        }
      }
    }
  }
  return m;
}

std::vector<double> LinearModel::predict_scores(const SparseVec& x) const {
  std::vector<double> scores(b_);
  for (int c = 0; c < n_classes_; ++c) {
    const double* wrow = w_.data() + static_cast<std::size_t>(c) * n_features_;
    double acc = 0.0;
    for (const auto& [f, val] : x) acc += wrow[f] * val;
    scores[static_cast<std::size_t>(c)] += acc;
  }
  return scores;
}

int LinearModel::predict(const SparseVec& x) const {
  const auto scores = predict_scores(x);
  int best = 0;
  for (int c = 1; c < n_classes_; ++c) {
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return best;
}

void LinearModel::to_checkpoint(Checkpoint& ck,
                                const std::string& prefix) const {
  ck.meta[prefix + "kind"] = kind_ == LinearKind::logistic ? "logistic" : "svm";
  ck.meta[prefix + "n_classes"] = n_classes_;
  ck.meta[prefix + "n_features"] = n_features_;
  ck.add_blob(prefix + "w", w_);
  ck.add_blob(prefix + "b", b_);
}

LinearModel LinearModel::from_checkpoint(const Checkpoint& ck,
                                         const std::string& prefix) {
  LinearModel m;
  m.kind_ = ck.meta.at(prefix + "kind").get<std::string>() == "svm"
                ? LinearKind::svm
                : LinearKind::logistic;
  m.n_classes_ = ck.meta.at(prefix + "n_classes").get<int>();
  m.n_features_ = ck.meta.at(prefix + "n_features").get<int>();
  m.w_ = ck.blob(prefix + "w");
  m.b_ = ck.blob(prefix + "b");
  return m;
}

}  // namespace senselab::baselines
