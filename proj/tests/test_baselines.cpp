#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "senselab/baselines.hpp"
#include "senselab/error.hpp"
#include "senselab/rng.hpp"
#include "senselab/text.hpp"

using namespace senselab;
using namespace senselab::baselines;

TEST_SUITE_BEGIN("baselines");

TEST_CASE("tfidf formula on the two-document corpus") {
  TfidfVectorizer v;
  v.fit({{"a", "b", "a"}, {"a", "c"}});

  auto d1 = v.transform({"a", "b", "a"});
  const int id_a = v.feature_id("a").value();
  const int id_b = v.feature_id("b").value();
  double w_a = 0, w_b = 0;
  for (auto& [f, val] : d1) {
    if (f == id_a) w_a = val;
    if (f == id_b) w_b = val;
  }
  CHECK(w_a == 0.0);  // 2 * ln(2/2)
  CHECK(w_b == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // only unseen tokens -> zero vector
  CHECK(v.transform({"zz", "qq"}).empty());

  TfidfVectorizer unfit;
  CHECK_THROWS_AS(unfit.transform({"a"}), StateError);
}

TEST_CASE("tfidf transform is linear in term counts") {
  TfidfVectorizer v;
  v.fit({{"a", "b"}, {"b", "c"}, {"c", "d"}});
  auto once = v.transform({"b", "c"});
  auto twice = v.transform({"b", "c", "b", "c"});
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i].first == once[i].first);
    CHECK(twice[i].second == doctest::Approx(2.0 * once[i].second).epsilon(1e-12));
  }
}

TEST_CASE("naive bayes single class always wins") {
  auto m = NaiveBayesModel::train({{"x"}, {"x", "y"}}, {0, 0}, 1);
  CHECK(m.predict({"y"}) == 0);
  CHECK(m.predict({"unknown"}) == 0);
}

TEST_CASE("naive bayes two-class hand computation") {
  // class 0: "x x"; class 1: "y"; alpha = 1, V = {x, y}
  auto m = NaiveBayesModel::train({{"x", "x"}, {"y"}}, {0, 1}, 2);
  auto scores = m.predict_scores({"x"});
  CHECK(m.predict({"x"}) == 0);
  // gap = ln((3/4)/(1/3)) = ln(9/4); priors are equal and cancel
  CHECK(scores[0] - scores[1] ==
        doctest::Approx(std::log(9.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("naive bayes parameter invariants") {
  Rng rng(3);
  std::vector<std::vector<std::string>> docs;
  std::vector<int> labels;
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 30; ++i) {
    std::vector<std::string> doc;
    for (int j = 0; j < 4 + rng.uniform_int(4); ++j) {
      doc.push_back(words[static_cast<std::size_t>(rng.uniform_int(5))]);
    }
    docs.push_back(doc);
    labels.push_back(rng.uniform_int(3));
  }
  auto m = NaiveBayesModel::train(docs, labels, 3);
  double prior_sum = 0.0;
  for (double lp : m.log_priors()) prior_sum += std::exp(lp);
  CHECK(std::fabs(prior_sum - 1.0) < 1e-9);
  for (int c = 0; c < 3; ++c) {
    double lik_sum = 0.0;
    for (double ll : m.log_likelihoods(c)) lik_sum += std::exp(ll);
    CHECK(std::fabs(lik_sum - 1.0) < 1e-9);
  }
}

namespace {

// Independent posterior enumeration straight from the counts.
std::vector<double> nb_oracle(const std::vector<std::vector<std::string>>& docs,
                              const std::vector<int>& labels, int n_classes,
                              double alpha,
                              const std::vector<std::string>& query) {
  std::map<std::string, int> vocab;
  for (const auto& d : docs) {
    for (const auto& t : d) vocab.emplace(t, 0);
  }
  const double v = static_cast<double>(vocab.size());
  std::vector<double> scores;
  for (int c = 0; c < n_classes; ++c) {
    double class_docs = 0, class_total = 0;
    std::map<std::string, double> counts;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (labels[i] != c) continue;
      class_docs += 1;
      for (const auto& t : docs[i]) {
        counts[t] += 1;
        class_total += 1;
      }
    }
    double s = class_docs > 0
                   ? std::log(class_docs / static_cast<double>(docs.size()))
                   : -1e100;
    for (const auto& t : query) {
      if (!vocab.count(t)) continue;
      s += std::log((counts[t] + alpha) / (class_total + alpha * v));
    }
    scores.push_back(s);
  }
  return scores;
}

}  // namespace

TEST_CASE("naive bayes matches brute-force posterior enumeration") {
  Rng rng(31);
  const std::vector<std::string> words = {"t0", "t1", "t2", "t3", "t4",
                                          "t5", "t6", "t7", "t8", "t9"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::string>> docs;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
      std::vector<std::string> doc;
      for (int j = 0; j < 3 + rng.uniform_int(5); ++j) {
        doc.push_back(words[static_cast<std::size_t>(rng.uniform_int(10))]);
      }
      docs.push_back(doc);
      labels.push_back(i % 3);  // every class present
    }
    auto m = NaiveBayesModel::train(docs, labels, 3);
    std::vector<std::string> query;
    for (int j = 0; j < 5; ++j) {
      query.push_back(words[static_cast<std::size_t>(rng.uniform_int(10))]);
    }
    auto ours = m.predict_scores(query);
    auto expect = nb_oracle(docs, labels, 3, 1.0, query);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::fabs(ours[static_cast<std::size_t>(c)] -
                      expect[static_cast<std::size_t>(c)]) < 1e-12);
    }
  }
}

TEST_CASE("naive bayes: uniform prior rescale shifts scores, argmax fixed") {
  auto m = NaiveBayesModel::train({{"x", "x"}, {"x", "y"}, {"y"}}, {0, 0, 1}, 2);
  Checkpoint ck;
  m.to_checkpoint(ck, "nb/");
  auto scores = m.predict_scores({"x", "y"});

  auto& priors = ck.blobs[0].second;  // "nb/log_prior"
  REQUIRE(ck.blobs[0].first == "nb/log_prior");
  for (double& lp : priors) lp += std::log(3.0);  // rescale all priors by 3
  auto shifted = NaiveBayesModel::from_checkpoint(ck, "nb/");
  auto scores2 = shifted.predict_scores({"x", "y"});
  const double delta = scores2[0] - scores[0];
  CHECK(delta == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(scores2[1] - scores[1] == doctest::Approx(delta).epsilon(1e-12));
  CHECK(m.predict({"x", "y"}) == shifted.predict({"x", "y"}));
}

TEST_CASE("logistic regression solves a separable toy and sums to one") {
  // two features, two classes, linearly separable
  std::vector<SparseVec> x = {
      {{0, 1.0}}, {{0, 0.8}}, {{0, 1.2}}, {{1, 1.0}}, {{1, 0.9}}, {{1, 1.1}}};
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  LinearConfig cfg;
  cfg.epochs = 200;
  auto m = LinearModel::train(x, y, 2, 2, cfg);
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (m.predict(x[i]) == y[i]) ++correct;
  }
  CHECK(correct == 6);

  // softmax over scores sums to 1
  auto scores = m.predict_scores(x[0]);
  double mx = std::max(scores[0], scores[1]);
  double p = 0.0;
  for (double s : scores) p += std::exp(s - mx);
  double total = 0.0;
  for (double s : scores) total += std::exp(s - mx) / p;
  CHECK(std::fabs(total - 1.0) < 1e-9);
}

TEST_CASE("logistic loss gradient matches finite differences") {
  Rng rng(17);
  std::vector<SparseVec> x;
  std::vector<int> y;
  const int n_features = 6, n_classes = 3;
  for (int i = 0; i < 10; ++i) {
    SparseVec row;
    for (int f = 0; f < n_features; ++f) {
      if (rng.uniform() < 0.6) row.emplace_back(f, rng.uniform(-1, 1));
    }
    x.push_back(row);
    y.push_back(rng.uniform_int(n_classes));
  }
  std::vector<double> w(static_cast<std::size_t>(n_classes) * n_features);
  std::vector<double> b(static_cast<std::size_t>(n_classes));
  for (double& v : w) v = rng.uniform(-0.5, 0.5);
  for (double& v : b) v = rng.uniform(-0.5, 0.5);

  std::vector<double> gw, gb;
  LinearModel::logistic_loss_grad(x, y, n_classes, n_features, w, b, 0.01, &gw,
                                  &gb);
  const double h = 1e-6;
  for (std::size_t j = 0; j < w.size(); j += 3) {
    const double orig = w[j];
    w[j] = orig + h;
    const double lp = LinearModel::logistic_loss_grad(x, y, n_classes,
                                                      n_features, w, b, 0.01,
                                                      nullptr, nullptr);
    w[j] = orig - h;
    const double lm = LinearModel::logistic_loss_grad(x, y, n_classes,
                                                      n_features, w, b, 0.01,
                                                      nullptr, nullptr);
    w[j] = orig;
    const double fd = (lp - lm) / (2 * h);
    CHECK(std::fabs(gw[j] - fd) < 1e-6 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("zero features predict the majority class via bias") {
  std::vector<SparseVec> x(9);  // all-empty feature vectors
  std::vector<int> y = {0, 0, 0, 0, 0, 0, 1, 1, 2};
  LinearConfig cfg;
  cfg.epochs = 100;
  auto m = LinearModel::train(x, y, 3, 4, cfg);
  CHECK(m.predict({}) == 0);
}

TEST_CASE("svm separates a toy problem deterministically") {
  std::vector<SparseVec> x = {
      {{0, 1.0}}, {{0, 1.5}}, {{0, 0.5}}, {{1, 1.0}}, {{1, 1.4}}, {{1, 0.7}}};
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  LinearConfig cfg;
  cfg.kind = LinearKind::svm;
  cfg.epochs = 50;
  cfg.reg = 0.01;
  cfg.seed = 9;
  auto m1 = LinearModel::train(x, y, 2, 2, cfg);
  auto m2 = LinearModel::train(x, y, 2, 2, cfg);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(m1.predict(x[i]) == y[i]);
    CHECK(m1.predict_scores(x[i]) == m2.predict_scores(x[i]));
  }
  CHECK_THROWS_AS(LinearModel::train(x, {0, 0, 0, 0, 0, 0}, 1, 2, cfg),
                  DataError);
}

TEST_CASE("models survive a checkpoint round trip") {
  namespace fs = std::filesystem;
  auto nb = NaiveBayesModel::train({{"x", "x"}, {"y"}}, {0, 1}, 2);
  TfidfVectorizer v;
  v.fit({{"a", "b"}, {"b", "c"}});
  LinearConfig cfg;
  cfg.epochs = 20;
  auto lin = LinearModel::train({{{0, 1.0}}, {{1, 1.0}}}, {0, 1}, 2, 3, cfg);

  Checkpoint ck;
  nb.to_checkpoint(ck, "nb/");
  v.to_checkpoint(ck, "tfidf/");
  lin.to_checkpoint(ck, "lin/");
  const std::string path =
      (fs::temp_directory_path() / "senselab_baseline_ck.bin").string();
  ck.save(path);
  auto loaded = Checkpoint::load(path);

  auto nb2 = NaiveBayesModel::from_checkpoint(loaded, "nb/");
  CHECK(nb2.predict_scores({"x"}) == nb.predict_scores({"x"}));
  auto v2 = TfidfVectorizer::from_checkpoint(loaded, "tfidf/");
  CHECK(v2.transform({"b"}) == v.transform({"b"}));
  auto lin2 = LinearModel::from_checkpoint(loaded, "lin/");
  CHECK(lin2.predict_scores({{0, 2.0}}) == lin.predict_scores({{0, 2.0}}));
  fs::remove(path);
}

TEST_SUITE_END();
