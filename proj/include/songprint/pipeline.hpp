#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "songprint/corpus.hpp"
#include "songprint/elastic_net.hpp"
#include "songprint/features.hpp"
#include "songprint/screening.hpp"

namespace songprint {

struct PipelineConfig {
  std::vector<double> threshold_grid = {1.0, 0.75, 0.50, 0.25, 0.10};
  std::vector<double> alpha_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  int n_lambda = 100;
  double min_ratio = 0.01;
  int k_folds = 5;
  int mc_iterations = 10000;
  int min_count = 5;
  int max_count = 66;
  std::uint64_t seed = 0;
  int threads = 1;

  // Sorted descending, deduplicated, all in (0, 1]. Throws on bad grids.
  std::vector<double> normalized_thresholds() const;
};

// A model trained by the full two-stage recipe: screen at a threshold, then
// cross-validated elastic net on the retained columns. Falls back to an
// intercept-only model when screening retains nothing or the training rows
// cannot support stratified CV.
struct StageFit {
  double threshold = 0.0;
  std::vector<ScreeningResult> screening;  // over the matrix's columns
  std::vector<int> retained;               // catalog feature ids, matrix order
  std::vector<std::size_t> retained_cols;  // matrix column indices
  bool intercept_only = false;
  double intercept = 0.0;                  // used when intercept_only
  ElasticNetFit fit;                       // over the retained columns
  TuningPair selected;
  std::vector<CvPoint> cv_curve;
  int retained_count = 0;
  int nonzero_count = 0;

  // Probability for a row of the same matrix layout the model was built on.
  double predict(const FeatureMatrix& m, std::size_t row) const;
  double predict_row(const std::vector<std::uint8_t>& row) const;
  // Probability for an arbitrary feature set (catalog ids); absent = 0.
  double predict_features(const FeatureVector& fv) const;
};

struct ThresholdTable {
  std::vector<double> thresholds;
  std::vector<double> neg_log_likelihood;  // one per threshold
  int fallback_count = 0;                  // intercept-only inner predictions
};

struct ThresholdSelection {
  double threshold = 0.0;
  ThresholdTable table;
};

struct LooRecord {
  std::string song_id;
  int true_label = 0;
  double p_hat = 0.0;
  double threshold_used = 0.0;
  int retained_feature_count = 0;
  bool intercept_only = false;
  std::vector<std::string> training_ids;   // no-leakage audit trail
  ThresholdTable inner_table;              // inner LL per threshold
};

struct LooResult {
  std::vector<LooRecord> records;
  std::vector<std::string> failures;  // per-song error messages, run continues
};

struct PredictionReport {
  std::string song_id;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> loo_prediction_set;  // one per leave-one-out refit
};

struct ImportanceEntry {
  int feature = -1;
  double c_statistic = 0.0;
};

// Leave-one-out selection of the screening threshold by total out-of-sample
// negative log-likelihood; ties resolve to the larger threshold.
ThresholdSelection select_threshold(const FeatureMatrix& m,
                                    const PipelineConfig& cfg);

// Threshold selection, full-data screening at the winner, then CV-tuned
// elastic net; the paper's final-fit recipe.
struct FinalFit {
  ThresholdSelection selection;
  StageFit stage;
};
FinalFit fit_final(const FeatureMatrix& m, const PipelineConfig& cfg);

// Nested out-of-sample calibration: every labeled song predicted by a model
// whose screening-threshold selection, screening, and tuning never saw it.
LooResult loo_calibration(const FeatureMatrix& m, const PipelineConfig& cfg);

// Point predictions from the full-data final fit plus percentile intervals
// over the n leave-one-out refits.
std::vector<PredictionReport> predict_with_ci(const FeatureMatrix& m,
                                              const std::vector<Song>& targets,
                                              const PipelineConfig& cfg);

// Removal-based importance: drop the column, rerun the whole calibration,
// report the resulting c-statistic (lower = more important).
std::vector<ImportanceEntry> variable_importance(const FeatureMatrix& m,
                                                 const std::vector<int>& features,
                                                 const PipelineConfig& cfg);

// The prevalence filter applied once over the labeled rows, as every
// pipeline entry point does internally.
PrevalenceResult apply_prevalence(const FeatureMatrix& m,
                                  const PipelineConfig& cfg);

}  // namespace songprint
