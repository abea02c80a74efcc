#include "senselab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "senselab/error.hpp"

namespace senselab::eval {

using nlohmann::json;

double accuracy(const std::vector<int>& pred, const std::vector<int>& gold) {
  if (pred.size() != gold.size() || pred.empty()) {
    throw ContractError("accuracy: length mismatch (" +
                        std::to_string(pred.size()) + " vs " +
                        std::to_string(gold.size()) + ")");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& gold,
                int n_classes) {
  if (pred.size() != gold.size() || pred.empty()) {
    throw ContractError("macro_f1: length mismatch");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= n_classes || gold[i] < 0 ||
        gold[i] >= n_classes) {
      throw ContractError("macro_f1: label out of range at index " +
                          std::to_string(i));
    }
  }
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == c;
      const bool g = gold[i] == c;
      if (p && g) ++tp;
      if (p && !g) ++fp;
      if (!p && g) ++fn;
    }
    const double precision =
        (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall =
        (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f1 = (precision + recall) == 0.0
                          ? 0.0
                          : 2.0 * precision * recall / (precision + recall);
    total += f1;
  }
  return total / static_cast<double>(n_classes);
}

RocResult roc_curve(const std::vector<double>& scores,
                    const std::vector<int>& binary_gold) {
  if (scores.size() != binary_gold.size() || scores.empty()) {
    throw ContractError("roc_curve: length mismatch");
  }
  std::int64_t n_pos = 0, n_neg = 0;
  for (int g : binary_gold) {
    if (g != 0 && g != 1) throw ContractError("roc_curve: gold must be 0/1");
    if (g == 1) ++n_pos;
    else ++n_neg;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("roc_curve: need at least one positive and one negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocResult result;
  result.points.push_back({0.0, 0.0});
  double auc = 0.0;
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // All samples sharing this score move across the threshold together.
    const double s = scores[order[i]];
    std::int64_t d_tp = 0, d_fp = 0;
    while (i < order.size() && scores[order[i]] == s) {
      if (binary_gold[order[i]] == 1) ++d_tp;
      else ++d_fp;
      ++i;
    }
    const double x1 = static_cast<double>(fp) / static_cast<double>(n_neg);
    const double y1 = static_cast<double>(tp) / static_cast<double>(n_pos);
    tp += d_tp;
    fp += d_fp;
    const double x2 = static_cast<double>(fp) / static_cast<double>(n_neg);
    const double y2 = static_cast<double>(tp) / static_cast<double>(n_pos);
    auc += (x2 - x1) * (y1 + y2) / 2.0;
    result.points.push_back({x2, y2});
  }
  result.auc = auc;
  return result;
}

TermReport evaluate_term(const std::string& term,
                         const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& gold, int n_classes) {
  if (scores.size() != gold.size() || scores.empty()) {
    throw ContractError("evaluate_term: scores/gold length mismatch");
  }
  if (n_classes < 2) throw ContractError("evaluate_term: need >= 2 classes");

  std::vector<int> pred(gold.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (static_cast<int>(scores[i].size()) != n_classes) {
      throw ContractError("evaluate_term: score vector length mismatch");
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (scores[i][static_cast<std::size_t>(c)] >
          scores[i][static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    pred[i] = best;
  }

  TermReport report;
  report.term = term;
  report.n_samples = static_cast<int>(gold.size());
  report.accuracy = accuracy(pred, gold);
  report.macro_f1 = macro_f1(pred, gold, n_classes);

  double auc_sum = 0.0;
  int auc_count = 0;
  for (int c = 0; c < n_classes; ++c) {
    ClassMetrics m;
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == c;
      const bool g = gold[i] == c;
      if (p && g) ++tp;
      if (p && !g) ++fp;
      if (!p && g) ++fn;
    }
    m.precision = (tp + fp) == 0
                      ? 0.0
                      : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn) == 0
                   ? 0.0
                   : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);

    std::vector<double> class_scores(gold.size());
    std::vector<int> binary(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
      class_scores[i] = scores[i][static_cast<std::size_t>(c)];
      binary[i] = gold[i] == c ? 1 : 0;
    }
    try {
      RocResult roc = roc_curve(class_scores, binary);
      m.auc = roc.auc;
      m.roc = std::move(roc.points);
      auc_sum += *m.auc;
      ++auc_count;
    } catch (const DataError&) {
      std::cerr << "warning: term " << term << " class " << c
                << " has a single-class gold column; AUC undefined, excluded "
                   "from the macro\n";
    }
    report.classes.push_back(std::move(m));
  }
  if (auc_count > 0) report.macro_auc = auc_sum / auc_count;
  return report;
}

EvalReport aggregate(std::vector<TermReport> term_reports) {
  if (term_reports.empty()) throw ContractError("aggregate: no term reports");
  EvalReport report;
  double acc = 0.0, f1 = 0.0, auc = 0.0;
  int auc_count = 0;
  for (const TermReport& t : term_reports) {
    acc += t.accuracy;
    f1 += t.macro_f1;
    if (t.macro_auc) {
      auc += *t.macro_auc;
      ++auc_count;
    }
  }
  const double n = static_cast<double>(term_reports.size());
  report.mean_accuracy = acc / n;
  report.mean_macro_f1 = f1 / n;
  if (auc_count > 0) report.mean_auc = auc / auc_count;
  report.terms = std::move(term_reports);
  return report;
}

namespace {

json term_to_json(const TermReport& t) {
  json jt;
  jt["term"] = t.term;
  jt["n_samples"] = t.n_samples;
  jt["accuracy"] = t.accuracy;
  jt["macro_f1"] = t.macro_f1;
  if (t.macro_auc) jt["macro_auc"] = *t.macro_auc;
  jt["classes"] = json::array();
  for (const ClassMetrics& c : t.classes) {
    json jc;
    jc["precision"] = c.precision;
    jc["recall"] = c.recall;
    jc["f1"] = c.f1;
    if (c.auc) jc["auc"] = *c.auc;
    json pts = json::array();
    for (const RocPoint& p : c.roc) pts.push_back({p.fpr, p.tpr});
    jc["roc"] = pts;
    jt["classes"].push_back(jc);
  }
  return jt;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed << v;
  return ss.str();
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json j;
  j["mean_accuracy"] = report.mean_accuracy;
  j["mean_macro_f1"] = report.mean_macro_f1;
  if (report.mean_auc) j["mean_auc"] = *report.mean_auc;
  j["terms"] = json::array();
  for (const TermReport& t : report.terms) j["terms"].push_back(term_to_json(t));
  return j.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "term,accuracy,macro_f1,macro_auc\n";
  for (const TermReport& t : report.terms) {
    out << t.term << "," << fmt(t.accuracy) << "," << fmt(t.macro_f1) << ","
        << (t.macro_auc ? fmt(*t.macro_auc) : "") << "\n";
  }
  out << "MEAN," << fmt(report.mean_accuracy) << ","
      << fmt(report.mean_macro_f1) << ","
      << (report.mean_auc ? fmt(*report.mean_auc) : "") << "\n";
  return out.str();
}

std::string roc_points_csv(const TermReport& report) {
  std::ostringstream out;
  out << "term,class,fpr,tpr\n";
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    for (const RocPoint& p : report.classes[c].roc) {
      out << report.term << "," << c << "," << fmt(p.fpr) << "," << fmt(p.tpr)
          << "\n";
    }
  }
  return out.str();
}

std::string roc_svg(const TermReport& report) {
  const int size = 420;
  const int margin = 30;
  const double span = static_cast<double>(size - 2 * margin);
  auto px = [&](double x) { return margin + x * span; };
  auto py = [&](double y) { return size - margin - y * span; };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n";
  out << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << span << "\" height=\"" << span
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1)
      << "\" y2=\"" << py(1)
      << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  out << "  <text x=\"" << size / 2 << "\" y=\"" << size - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">false positive rate"
      << "</text>\n";
  out << "  <text x=\"12\" y=\"" << size / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 "
      << size / 2 << ")\">true positive rate</text>\n";
  out << "  <text x=\"" << size / 2 << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-size=\"13\">" << report.term << "</text>\n";
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const ClassMetrics& m = report.classes[c];
    if (m.roc.empty()) continue;
    out << "  <polyline fill=\"none\" stroke=\"" << palette[c % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const RocPoint& p : m.roc) {
      out << px(p.fpr) << "," << py(p.tpr) << " ";
    }
    out << "\"/>\n";
    out << "  <text x=\"" << size - margin - 4 << "\" y=\""
        << margin + 14 * (static_cast<int>(c) + 1)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << palette[c % 8]
        << "\">class " << c << (m.auc ? " auc=" + fmt(*m.auc) : "")
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace senselab::eval
