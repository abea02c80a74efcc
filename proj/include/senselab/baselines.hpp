#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "senselab/checkpoint.hpp"
#include "senselab/rng.hpp"

namespace senselab::baselines {

// Sparse feature vector, index-sorted.
using SparseVec = std::vector<std::pair<int, double>>;

// tf = raw count in the document, idf = ln(n_docs / df), weight = tf * idf.
// Tokens unseen at fit time are dropped at transform time.
class TfidfVectorizer {
 public:
  void fit(const std::vector<std::vector<std::string>>& docs);
  SparseVec transform(const std::vector<std::string>& doc) const;
  bool fitted() const { return fitted_; }
  int n_features() const { return static_cast<int>(tokens_.size()); }
  std::optional<int> feature_id(const std::string& token) const;
  double idf(int feature) const;

  void to_checkpoint(Checkpoint& ck, const std::string& prefix) const;
  static TfidfVectorizer from_checkpoint(const Checkpoint& ck,
                                         const std::string& prefix);

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> dfs_;
  std::int64_t n_docs_ = 0;
  bool fitted_ = false;
};

// Multinomial Naive Bayes over raw token counts with Laplace smoothing.
class NaiveBayesModel {
 public:
  static NaiveBayesModel train(const std::vector<std::vector<std::string>>& docs,
                               const std::vector<int>& labels, int n_classes,
                               double alpha = 1.0);

  // Unnormalized log posteriors, one per class.
  std::vector<double> predict_scores(const std::vector<std::string>& doc) const;
  int predict(const std::vector<std::string>& doc) const;

  int n_classes() const { return static_cast<int>(log_prior_.size()); }
  const std::vector<double>& log_priors() const { return log_prior_; }
  const std::vector<double>& log_likelihoods(int cls) const {
    return log_lik_[static_cast<std::size_t>(cls)];
  }

  void to_checkpoint(Checkpoint& ck, const std::string& prefix) const;
  static NaiveBayesModel from_checkpoint(const Checkpoint& ck,
                                         const std::string& prefix);

 private:
  double alpha_ = 1.0;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_lik_;  // class -> per-token log p(w|c)
};

enum class LinearKind { logistic, svm };

struct LinearConfig {
  LinearKind kind = LinearKind::logistic;
  int epochs = 200;
  double lr = 0.5;        // logistic full-batch step size
  double reg = 1e-4;      // L2 strength (lambda for the svm schedule)
  std::uint64_t seed = 1;
};

// Multinomial logistic regression (full-batch gradient descent) or
// one-vs-rest linear SVM with the 1/(lambda t) step schedule.
class LinearModel {
 public:
  static LinearModel train(const std::vector<SparseVec>& x,
                           const std::vector<int>& y, int n_classes,
                           int n_features, const LinearConfig& cfg);

  std::vector<double> predict_scores(const SparseVec& x) const;
  int predict(const SparseVec& x) const;

  // Mean cross-entropy + 0.5*reg*|w|^2 of a candidate parameter setting,
  // with gradients; used by training and exposed for gradient checks.
  static double logistic_loss_grad(const std::vector<SparseVec>& x,
                                   const std::vector<int>& y, int n_classes,
                                   int n_features, const std::vector<double>& w,
                                   const std::vector<double>& b, double reg,
                                   std::vector<double>* grad_w,
                                   std::vector<double>* grad_b);

  void to_checkpoint(Checkpoint& ck, const std::string& prefix) const;
  static LinearModel from_checkpoint(const Checkpoint& ck,
                                     const std::string& prefix);

 private:
  std::vector<double> w_;  // n_classes x n_features, row-major
  std::vector<double> b_;
  int n_classes_ = 0;
  int n_features_ = 0;
  LinearKind kind_ = LinearKind::logistic;
};

}  // namespace senselab::baselines
