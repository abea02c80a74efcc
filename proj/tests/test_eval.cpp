#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "senselab/error.hpp"
#include "senselab/eval.hpp"
#include "senselab/rng.hpp"

using namespace senselab;
using namespace senselab::eval;

TEST_SUITE_BEGIN("eval");

TEST_CASE("accuracy basics") {
  CHECK(accuracy({1, 0, 1}, {1, 1, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy({2, 2}, {2, 2}) == 1.0);
  CHECK(accuracy({0, 0}, {1, 1}) == 0.0);
  CHECK_THROWS_AS(accuracy({1}, {1, 2}), ContractError);
}

TEST_CASE("macro f1 hand case and properties") {
  // class 1: P=2/3, R=1 -> F1=0.8; class 0: no predictions -> 0
  CHECK(macro_f1({1, 1, 1}, {1, 1, 0}, 2) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(macro_f1({0, 1, 2}, {0, 1, 2}, 3) == 1.0);
  CHECK_THROWS_AS(macro_f1({5}, {0}, 3), ContractError);
}

namespace {

// Confusion-matrix reference implementation.
double macro_f1_oracle(const std::vector<int>& pred,
                       const std::vector<int>& gold, int n_classes) {
  double total = 0;
  for (int c = 0; c < n_classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && gold[i] == c) tp++;
      if (pred[i] == c && gold[i] != c) fp++;
      if (pred[i] != c && gold[i] == c) fn++;
    }
    double p = tp + fp > 0 ? tp / (tp + fp) : 0;
    double r = tp + fn > 0 ? tp / (tp + fn) : 0;
    total += (p + r) > 0 ? 2 * p * r / (p + r) : 0;
  }
  return total / n_classes;
}

// O(n^2) pairwise comparisons with half credit for ties.
double auc_oracle(const std::vector<double>& scores,
                  const std::vector<int>& gold) {
  double wins = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (gold[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (gold[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("macro f1 matches confusion-matrix oracle on random cases") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_classes = 2 + rng.uniform_int(4);
    const int n = 5 + rng.uniform_int(30);
    std::vector<int> pred(static_cast<std::size_t>(n)), gold(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      pred[static_cast<std::size_t>(i)] = rng.uniform_int(n_classes);
      gold[static_cast<std::size_t>(i)] = rng.uniform_int(n_classes);
    }
    CHECK(macro_f1(pred, gold, n_classes) ==
          doctest::Approx(macro_f1_oracle(pred, gold, n_classes)).epsilon(1e-12));
  }
}

TEST_CASE("macro f1 invariant under class relabeling") {
  Rng rng(13);
  const int n_classes = 4;
  std::vector<int> pred, gold;
  for (int i = 0; i < 40; ++i) {
    pred.push_back(rng.uniform_int(n_classes));
    gold.push_back(rng.uniform_int(n_classes));
  }
  const double base = macro_f1(pred, gold, n_classes);
  std::vector<int> perm{2, 0, 3, 1};
  std::vector<int> pred2, gold2;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred2.push_back(perm[static_cast<std::size_t>(pred[i])]);
    gold2.push_back(perm[static_cast<std::size_t>(gold[i])]);
  }
  CHECK(macro_f1(pred2, gold2, n_classes) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("roc basics") {
  auto perfect = roc_curve({0.9, 0.1}, {1, 0});
  CHECK(perfect.auc == 1.0);
  CHECK(perfect.points.front().fpr == 0.0);
  CHECK(perfect.points.front().tpr == 0.0);
  CHECK(perfect.points.back().fpr == 1.0);
  CHECK(perfect.points.back().tpr == 1.0);

  auto ties = roc_curve({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0});
  CHECK(ties.auc == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(roc_curve({0.5, 0.4}, {1, 1}), DataError);
}

TEST_CASE("roc points are monotone and auc matches pairwise oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 20;
    std::vector<double> scores;
    std::vector<int> gold;
    int n_pos = 0;
    for (int i = 0; i < n; ++i) {
      // Quantized scores force tie groups.
      scores.push_back(std::round(rng.uniform() * 8.0) / 8.0);
      gold.push_back(rng.uniform_int(2));
      n_pos += gold.back();
    }
    if (n_pos == 0 || n_pos == n) continue;
    auto roc = roc_curve(scores, gold);
    CHECK(std::fabs(roc.auc - auc_oracle(scores, gold)) < 1e-12);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
      CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
    }
  }
}

TEST_CASE("auc invariant under strictly monotone transforms") {
  Rng rng(19);
  std::vector<double> scores;
  std::vector<int> gold;
  for (int i = 0; i < 25; ++i) {
    scores.push_back(rng.uniform(-2, 2));
    gold.push_back(rng.uniform_int(2));
  }
  gold[0] = 1;
  gold[1] = 0;
  const double base = roc_curve(scores, gold).auc;
  std::vector<double> warped;
  for (double s : scores) warped.push_back(std::exp(2.0 * s) + 7.0);
  CHECK(roc_curve(warped, gold).auc == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("evaluate_term perfect model and aggregation") {
  // 2-sense term, scores exactly right
  std::vector<std::vector<double>> scores = {
      {0.9, 0.1}, {0.8, 0.2}, {0.2, 0.8}, {0.3, 0.7}};
  std::vector<int> gold = {0, 0, 1, 1};
  auto report = evaluate_term("XY", scores, gold, 2);
  CHECK(report.accuracy == 1.0);
  CHECK(report.macro_f1 == 1.0);
  CHECK(report.macro_auc.value() == 1.0);

  auto agg = aggregate({report, report, report});
  CHECK(agg.mean_accuracy == 1.0);
  CHECK(agg.mean_macro_f1 == 1.0);
  CHECK(agg.mean_auc.value() == 1.0);
}

TEST_CASE("uniform random scorer lands near 0.5 AUC") {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const int n = 90;  // 3 senses x 30
    std::vector<std::vector<double>> scores;
    std::vector<int> gold;
    for (int i = 0; i < n; ++i) {
      scores.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
      gold.push_back(i % 3);
    }
    auto report = evaluate_term("RND", scores, gold, 3);
    total += report.macro_auc.value();
  }
  CHECK(std::fabs(total / 5.0 - 0.5) < 0.1);
}

TEST_CASE("report emission formats") {
  std::vector<std::vector<double>> scores = {{0.9, 0.1}, {0.2, 0.8}};
  std::vector<int> gold = {0, 1};
  auto report = aggregate({evaluate_term("AB", scores, gold, 2)});

  auto jsonText = report_to_json(report);
  CHECK(jsonText.find("\"mean_accuracy\"") != std::string::npos);
  CHECK(jsonText.find("\"AB\"") != std::string::npos);

  auto csv = report_to_csv(report);
  CHECK(csv.find("term,accuracy,macro_f1,macro_auc") == 0);
  CHECK(csv.find("MEAN,") != std::string::npos);

  auto roc = roc_points_csv(report.terms[0]);
  CHECK(roc.find("term,class,fpr,tpr") == 0);

  auto svg = roc_svg(report.terms[0]);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_SUITE_END();
