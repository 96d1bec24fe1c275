#include "songprint/artifacts.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "json.hpp"
#include "songprint/rng.hpp"

namespace songprint {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json config_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["threshold_grid"] = cfg.threshold_grid;
  j["alpha_grid"] = cfg.alpha_grid;
  j["n_lambda"] = cfg.n_lambda;
  j["min_ratio"] = cfg.min_ratio;
  j["k_folds"] = cfg.k_folds;
  j["mc_iterations"] = cfg.mc_iterations;
  j["min_count"] = cfg.min_count;
  j["max_count"] = cfg.max_count;
  j["seed"] = cfg.seed;
  // threads is an execution knob with no effect on any artifact, so it is
  // not part of the reproducibility snapshot.
  return j;
}

ordered_json run_json(const RunInfo& run) {
  ordered_json j;
  j["tool"] = "songprint";
  j["version"] = std::string(kToolVersion);
  j["corpus_digest"] = run.corpus_digest;
  j["seed"] = run.seed;
  j["timestamp"] = run.timestamp;
  return j;
}

}  // namespace

std::string corpus_digest(std::string_view corpus_bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(corpus_bytes));
  return buf;
}

std::string run_timestamp() {
  std::time_t t;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const PipelineConfig& cfg, const RunInfo& run) {
  ordered_json j = run_json(run);
  j["config"] = config_json(cfg);
  return j.dump(2) + "\n";
}

std::string diagnostics_json(const std::vector<Diagnostic>& diags) {
  ordered_json arr = ordered_json::array();
  for (const Diagnostic& d : diags) {
    arr.push_back({{"severity", d.severity == Diagnostic::Severity::kError
                                    ? "error"
                                    : "warning"},
                   {"song_id", d.song_id},
                   {"message", d.message}});
  }
  return arr.dump(2) + "\n";
}

std::string features_csv(const FeatureMatrix& m) {
  std::string out = "song_id";
  for (int f : m.features) {
    out += ',';
    out += feature_at(f).code;
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.song_ids[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out += m.at(r, c) ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

std::string dropped_features_json(const std::vector<DroppedFeature>& dropped) {
  ordered_json arr = ordered_json::array();
  for (const DroppedFeature& d : dropped) {
    arr.push_back({{"code", feature_at(d.feature).code}, {"count", d.count}});
  }
  ordered_json j;
  j["dropped"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string screening_csv(const std::vector<ScreeningResult>& results) {
  std::string out = "feature,chi2,p_value,retained\n";
  for (const ScreeningResult& r : results) {
    out += feature_at(r.feature).code;
    out += ',';
    out += fmt(r.statistic);
    out += ',';
    out += fmt(r.p_value);
    out += ',';
    out += r.retained ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string fit_json(const FinalFit& fit, const RunInfo& run) {
  ordered_json j;
  j["run"] = run_json(run);
  j["threshold"] = fit.selection.threshold;
  ordered_json table = ordered_json::array();
  for (std::size_t i = 0; i < fit.selection.table.thresholds.size(); ++i) {
    table.push_back({{"threshold", fit.selection.table.thresholds[i]},
                     {"neg_log_likelihood",
                      fit.selection.table.neg_log_likelihood[i]}});
  }
  j["threshold_table"] = std::move(table);
  j["intercept_only"] = fit.stage.intercept_only;
  j["retained"] = fit.stage.retained_count;
  j["nonzero"] = fit.stage.nonzero_count;
  if (fit.stage.intercept_only) {
    j["intercept"] = fit.stage.intercept;
  } else {
    j["alpha"] = fit.stage.selected.alpha;
    j["lambda"] = fit.stage.selected.lambda;
    j["intercept"] = fit.stage.fit.intercept;
    ordered_json coefs;
    for (std::size_t k = 0; k < fit.stage.retained.size(); ++k) {
      coefs[feature_at(fit.stage.retained[k]).code] =
          fit.stage.fit.coefficients[k];
    }
    j["coefficients"] = std::move(coefs);
    ordered_json curve = ordered_json::array();
    for (const CvPoint& p : fit.stage.cv_curve) {
      curve.push_back({{"alpha", p.alpha},
                       {"lambda", p.lambda},
                       {"mean_nll", p.mean_nll},
                       {"folds", p.folds}});
    }
    j["cv_curve"] = std::move(curve);
    j["convergence"] = {
        {"iterations", fit.stage.fit.convergence.iterations},
        {"final_change", fit.stage.fit.convergence.final_change},
        {"kkt_residual", fit.stage.fit.convergence.kkt_residual},
        {"converged", fit.stage.fit.convergence.converged}};
  }
  return j.dump(2) + "\n";
}

std::string loo_csv(const std::vector<LooRecord>& records) {
  std::string out =
      "song_id,label,p_hat,threshold,retained_count,intercept_only\n";
  for (const LooRecord& r : records) {
    out += r.song_id;
    out += ',';
    out += std::to_string(r.true_label);
    out += ',';
    out += fmt(r.p_hat);
    out += ',';
    out += fmt(r.threshold_used);
    out += ',';
    out += std::to_string(r.retained_feature_count);
    out += ',';
    out += r.intercept_only ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string loo_failures_json(const LooResult& loo) {
  ordered_json j;
  j["failures"] = loo.failures;
  return j.dump(2) + "\n";
}

std::string predictions_json(const std::vector<PredictionReport>& reports,
                             const RunInfo& run) {
  ordered_json j;
  j["run"] = run_json(run);
  ordered_json arr = ordered_json::array();
  for (const PredictionReport& r : reports) {
    arr.push_back({{"song_id", r.song_id},
                   {"p_hat", r.p_hat},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high},
                   {"loo_prediction_set", r.loo_prediction_set}});
  }
  j["predictions"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string importance_csv(const std::vector<ImportanceEntry>& entries) {
  std::string out = "feature,c_statistic\n";
  for (const ImportanceEntry& e : entries) {
    out += feature_at(e.feature).code;
    out += ',';
    out += fmt(e.c_statistic);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const std::vector<LooRecord>& records,
                          double bin_width) {
  int bins = static_cast<int>(1.0 / bin_width + 0.5);
  std::vector<int> count0(bins, 0), count1(bins, 0);
  for (const LooRecord& r : records) {
    int b = std::min(bins - 1, static_cast<int>(r.p_hat / bin_width));
    (r.true_label ? count1 : count0)[b]++;
  }
  std::string out = "bin_low,bin_high,lennon,mccartney\n";
  for (int b = 0; b < bins; ++b) {
    out += fmt(b * bin_width);
    out += ',';
    out += fmt((b + 1) * bin_width);
    out += ',';
    out += std::to_string(count0[b]);
    out += ',';
    out += std::to_string(count1[b]);
    out += '\n';
  }
  return out;
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "false_positive_rate,true_positive_rate\n";
  for (const auto& [fpr, tpr] : curve.points) {
    out += fmt(fpr);
    out += ',';
    out += fmt(tpr);
    out += '\n';
  }
  return out;
}

std::string threshold_ll_csv(const std::vector<LooRecord>& records) {
  std::string out = "song_id,threshold,neg_log_likelihood\n";
  for (const LooRecord& r : records) {
    for (std::size_t ti = 0; ti < r.inner_table.thresholds.size(); ++ti) {
      out += r.song_id;
      out += ',';
      out += fmt(r.inner_table.thresholds[ti]);
      out += ',';
      out += fmt(r.inner_table.neg_log_likelihood[ti]);
      out += '\n';
    }
  }
  return out;
}

std::string density_csv(const std::vector<PredictionReport>& reports,
                        int grid_points) {
  std::string out = "song_id,x,density\n";
  std::vector<double> grid(grid_points);
  for (int g = 0; g < grid_points; ++g) {
    grid[g] = static_cast<double>(g) / (grid_points - 1);
  }
  for (const PredictionReport& r : reports) {
    std::vector<double> dens = gaussian_kde(r.loo_prediction_set, grid);
    for (int g = 0; g < grid_points; ++g) {
      out += r.song_id;
      out += ',';
      out += fmt(grid[g]);
      out += ',';
      out += fmt(dens[g]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace songprint
