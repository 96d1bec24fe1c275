#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "songprint/metrics.hpp"
#include "songprint/pipeline.hpp"

namespace songprint {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Everything a run's outputs need to be re-derivable: seed, corpus content
// hash, tool version, and a timestamp (SOURCE_DATE_EPOCH wins over the wall
// clock so reruns can be byte-identical).
struct RunInfo {
  std::string corpus_digest;
  std::uint64_t seed = 0;
  std::string timestamp;
};

std::string corpus_digest(std::string_view corpus_bytes);
std::string run_timestamp();

std::string manifest_json(const PipelineConfig& cfg, const RunInfo& run);
std::string diagnostics_json(const std::vector<Diagnostic>& diags);
std::string features_csv(const FeatureMatrix& m);
std::string dropped_features_json(const std::vector<DroppedFeature>& dropped);
std::string screening_csv(const std::vector<ScreeningResult>& results);
std::string fit_json(const FinalFit& fit, const RunInfo& run);
std::string loo_csv(const std::vector<LooRecord>& records);
std::string loo_failures_json(const LooResult& loo);
std::string predictions_json(const std::vector<PredictionReport>& reports,
                             const RunInfo& run);
std::string importance_csv(const std::vector<ImportanceEntry>& entries);

// Figure-style report data.
std::string histogram_csv(const std::vector<LooRecord>& records,
                          double bin_width);
std::string roc_csv(const RocCurve& curve);
std::string threshold_ll_csv(const std::vector<LooRecord>& records);
std::string density_csv(const std::vector<PredictionReport>& reports,
                        int grid_points);

}  // namespace songprint
