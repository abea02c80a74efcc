#pragma once

#include <optional>
#include <string>
#include <vector>

namespace senselab::eval {

double accuracy(const std::vector<int>& pred, const std::vector<int>& gold);

// Unweighted mean of per-class F1 over all n_classes. A class with neither
// gold nor predicted positives contributes F1 = 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                int n_classes);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // from (0,0) to (1,1), tied scores grouped
  double auc = 0.0;              // trapezoidal; equals Mann-Whitney w/ ties
};

// Threshold sweep over distinct scores, descending. Requires at least one
// positive and one negative label; otherwise throws DataError.
RocResult roc_curve(const std::vector<double>& scores,
                    const std::vector<int>& binary_gold);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;  // missing when the class has no pos or no neg
  std::vector<RocPoint> roc;
};

struct TermReport {
  std::string term;
  int n_samples = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> macro_auc;  // macro over classes with defined AUC
  std::vector<ClassMetrics> classes;
};

struct EvalReport {
  std::vector<TermReport> terms;
  double mean_accuracy = 0.0;
  double mean_macro_f1 = 0.0;
  std::optional<double> mean_auc;
};

// One-vs-rest evaluation of a multiclass scorer on one term's test set.
// scores[i] is the per-class score vector for sample i.
TermReport evaluate_term(const std::string& term,
                         const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& gold, int n_classes);

EvalReport aggregate(std::vector<TermReport> term_reports);

// Report emission. JSON carries the full structure; the CSV summary has one
// line per term; ROC CSV one line per (class, point); SVG one polyline per
// class on a unit square.
std::string report_to_json(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);
std::string roc_points_csv(const TermReport& report);
std::string roc_svg(const TermReport& report);

}  // namespace senselab::eval
