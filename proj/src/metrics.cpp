#include "songprint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace songprint {

namespace {
constexpr double kClamp = 1e-12;
}

Accuracy accuracy_at(const std::vector<ScoredLabel>& records, double cut) {
  if (records.empty()) throw std::invalid_argument("no records");
  int correct[2] = {0, 0}, total[2] = {0, 0};
  for (const auto& r : records) {
    int predicted = r.score >= cut ? 1 : 0;
    ++total[r.label];
    if (predicted == r.label) ++correct[r.label];
  }
  Accuracy acc;
  acc.overall = double(correct[0] + correct[1]) / records.size();
  acc.class0_rate = total[0] ? double(correct[0]) / total[0] : 0.0;
  acc.class1_rate = total[1] ? double(correct[1]) / total[1] : 0.0;
  return acc;
}

double negative_log_likelihood(const std::vector<ScoredLabel>& records) {
  double s = 0.0;
  for (const auto& r : records) {
    double p = std::min(1.0 - kClamp, std::max(kClamp, r.score));
    s -= r.label ? std::log(p) : std::log1p(-p);
  }
  return s;
}

RocCurve roc(const std::vector<ScoredLabel>& records) {
  std::size_t n1 = 0, n0 = 0;
  for (const auto& r : records) (r.label ? n1 : n0)++;
  if (n0 == 0 || n1 == 0) {
    throw std::invalid_argument("ROC needs both classes");
  }

  std::vector<ScoredLabel> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredLabel& a, const ScoredLabel& b) {
                     return a.score > b.score;
                   });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < sorted.size()) {
    double s = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == s) {
      (sorted[i].label ? tp : fp)++;
      ++i;
    }
    curve.points.emplace_back(double(fp) / n0, double(tp) / n1);
  }

  // AUC through midranks; equals all-pairs concordance with ties at 0.5.
  std::vector<const ScoredLabel*> asc(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) asc[j] = &records[j];
  std::stable_sort(asc.begin(), asc.end(),
                   [](const ScoredLabel* a, const ScoredLabel* b) {
                     return a->score < b->score;
                   });
  double rank_sum_pos = 0.0;
  std::size_t j = 0;
  while (j < asc.size()) {
    std::size_t k = j;
    while (k < asc.size() && asc[k]->score == asc[j]->score) ++k;
    double midrank = 0.5 * double(j + 1 + k);  // average of ranks j+1..k
    for (std::size_t t = j; t < k; ++t) {
      if (asc[t]->label) rank_sum_pos += midrank;
    }
    j = k;
  }
  curve.auc = (rank_sum_pos - 0.5 * n1 * (n1 + 1)) / (double(n0) * double(n1));
  return curve;
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  double h = q * (values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = h - lo;
  return values[lo] + frac * (values[hi] - values[lo]);
}

double silverman_bandwidth(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 1e-3;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / (n - 1));
  double iqr = quantile_linear(values, 0.75) - quantile_linear(values, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  double h = 0.9 * spread * std::pow(double(n), -0.2);
  return h > 1e-6 ? h : 1e-3;
}

std::vector<double> gaussian_kde(const std::vector<double>& values,
                                 const std::vector<double>& grid) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  double h = silverman_bandwidth(values);
  const double norm =
      1.0 / (values.size() * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (double v : values) {
      double u = (grid[g] - v) / h;
      s += std::exp(-0.5 * u * u);
    }
    out[g] = norm * s;
  }
  return out;
}

}  // namespace songprint
