#pragma once

#include <vector>

namespace songprint {

struct ScoredLabel {
  int label = 0;    // 0 or 1
  double score = 0.0;
};

struct Accuracy {
  double overall = 0.0;
  double class0_rate = 0.0;  // correct rate among label-0 records
  double class1_rate = 0.0;
};

// Classifies score >= cut as class 1 (ties classify up).
Accuracy accuracy_at(const std::vector<ScoredLabel>& records, double cut);

// -sum[y log p + (1-y) log(1-p)] with probabilities clamped to
// [1e-12, 1-1e-12].
double negative_log_likelihood(const std::vector<ScoredLabel>& records);

struct RocCurve {
  // (false positive rate, true positive rate) from (0,0) to (1,1), one point
  // per distinct score threshold.
  std::vector<std::pair<double, double>> points;
  // All-pairs concordance probability, ties counted 0.5.
  double auc = 0.0;
};

// Threshold sweep over distinct scores; requires both classes present.
RocCurve roc(const std::vector<ScoredLabel>& records);

// Linear-interpolation percentile of a sample (R type 7), q in [0,1].
double quantile_linear(std::vector<double> values, double q);

// Silverman rule-of-thumb bandwidth: 0.9 min(sd, IQR/1.34) n^(-1/5),
// floored to stay positive for degenerate samples.
double silverman_bandwidth(const std::vector<double>& values);

// Gaussian kernel density estimate evaluated on a grid.
std::vector<double> gaussian_kde(const std::vector<double>& values,
                                 const std::vector<double>& grid);

}  // namespace songprint
