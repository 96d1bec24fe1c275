#include "songprint/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "songprint/metrics.hpp"
#include "songprint/parallel.hpp"
#include "songprint/rng.hpp"

namespace songprint {

namespace {

constexpr double kClamp = 1e-12;

double clamp01(double p) {
  return std::min(1.0 - kClamp, std::max(kClamp, p));
}

double nll_term(int y, double p) {
  p = clamp01(p);
  return -(y ? std::log(p) : std::log1p(-p));
}

double logit(double p) {
  p = clamp01(p);
  return std::log(p / (1.0 - p));
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

FeatureMatrix labeled_only(const FeatureMatrix& m) {
  std::vector<std::size_t> cols(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) cols[c] = c;
  return m.select(m.labeled_rows(), cols);
}

void require_both_classes(const FeatureMatrix& mL) {
  int count[2] = {0, 0};
  for (const auto& lab : mL.labels) {
    if (lab) ++count[*lab];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw std::invalid_argument(
        "pipeline needs labeled songs from both authors");
  }
}

// Screen -> elastic net on the retained columns, with the intercept-only
// fallback for configurations that cannot support the full recipe.
StageFit build_stage(const FeatureMatrix& train,
                     const std::vector<ScreeningResult>& pvalues,
                     double threshold, const PipelineConfig& cfg,
                     std::uint64_t cv_seed) {
  StageFit stage;
  stage.threshold = threshold;
  stage.screening = pvalues;

  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < pvalues.size(); ++j) {
    auto& res = stage.screening[j];
    res.retained = !res.degenerate && res.p_value <= threshold;
    if (res.retained) {
      cols.push_back(j);
      stage.retained.push_back(train.features[j]);
    }
  }
  stage.retained_cols = cols;
  stage.retained_count = static_cast<int>(cols.size());

  std::vector<int> y;
  int count[2] = {0, 0};
  for (const auto& lab : train.labels) {
    y.push_back(*lab);
    ++count[*lab];
  }
  double ybar = double(count[1]) / y.size();

  bool feasible = !cols.empty() && count[0] >= cfg.k_folds &&
                  count[1] >= cfg.k_folds;
  if (feasible) {
    Design x;
    x.n = train.rows();
    x.columns.resize(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      auto& col = x.columns[k];
      col.resize(x.n);
      for (std::size_t i = 0; i < x.n; ++i) col[i] = train.at(i, cols[k]);
    }
    CvConfig cv_cfg;
    cv_cfg.alpha_grid = cfg.alpha_grid;
    cv_cfg.n_lambda = cfg.n_lambda;
    cv_cfg.min_ratio = cfg.min_ratio;
    cv_cfg.k_folds = cfg.k_folds;
    cv_cfg.seed = cv_seed;
    try {
      CvResult cv = cv_select(x, y, cv_cfg);
      stage.fit = std::move(cv.fit);
      stage.cv_curve = std::move(cv.curve);
      stage.selected = cv.selected;
      for (double b : stage.fit.coefficients) {
        if (b != 0.0) ++stage.nonzero_count;
      }
      return stage;
    } catch (const std::invalid_argument&) {
      // e.g. every retained column orthogonal to the labels at threshold 1.0
    }
  }
  stage.intercept_only = true;
  stage.intercept = logit(ybar);
  return stage;
}

ThresholdSelection select_threshold_ctx(const FeatureMatrix& mL,
                                        const PipelineConfig& cfg,
                                        std::uint64_t ctx) {
  std::vector<double> grid = cfg.normalized_thresholds();
  const std::size_t n = mL.rows();

  struct SongCell {
    std::vector<double> nll;  // per threshold
    int fallbacks = 0;
  };
  std::vector<SongCell> cells(n);

  parallel_for(n, cfg.threads, [&](std::size_t i) {
    FeatureMatrix train = mL.without_row(i);
    SongCell& cell = cells[i];
    cell.nll.assign(grid.size(), 0.0);
    if (train.rows() == 0) return;  // nothing to train on; no contribution
    auto pvalues = screen(train, 1.0, cfg.mc_iterations,
                          derive_seed(ctx, {"select-screen", mL.song_ids[i]}));
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
      StageFit stage = build_stage(
          train, pvalues, grid[ti], cfg,
          derive_seed(ctx, {"select-cv", mL.song_ids[i], std::to_string(ti)}));
      if (stage.intercept_only) ++cell.fallbacks;
      double p = stage.predict(mL, i);
      cell.nll[ti] = nll_term(*mL.labels[i], p);
    }
  });

  ThresholdSelection sel;
  sel.table.thresholds = grid;
  sel.table.neg_log_likelihood.assign(grid.size(), 0.0);
  for (const SongCell& cell : cells) {
    sel.table.fallback_count += cell.fallbacks;
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
      sel.table.neg_log_likelihood[ti] += cell.nll[ti];
    }
  }
  std::size_t best = 0;
  for (std::size_t ti = 1; ti < grid.size(); ++ti) {
    if (sel.table.neg_log_likelihood[ti] < sel.table.neg_log_likelihood[best]) {
      best = ti;  // grid is descending, so ties keep the larger threshold
    }
  }
  sel.threshold = grid[best];
  return sel;
}

FinalFit fit_final_ctx(const FeatureMatrix& mAll, const PipelineConfig& cfg,
                       std::uint64_t ctx) {
  FeatureMatrix mL = labeled_only(mAll);
  FinalFit out;
  out.selection = select_threshold_ctx(mL, cfg, derive_seed(ctx, {"select"}));
  auto pvalues = screen(mL, 1.0, cfg.mc_iterations,
                        derive_seed(ctx, {"screen-final"}));
  out.stage = build_stage(mL, pvalues, out.selection.threshold, cfg,
                          derive_seed(ctx, {"cv-final"}));
  return out;
}

std::vector<std::uint8_t> target_row(const FeatureMatrix& m, const Song& song) {
  FeatureVector fv = extract_features(song);
  std::vector<std::uint8_t> row(m.cols(), 0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    row[c] = fv.contains(m.features[c]) ? 1 : 0;
  }
  return row;
}

}  // namespace

std::vector<double> PipelineConfig::normalized_thresholds() const {
  if (threshold_grid.empty()) {
    throw std::invalid_argument("threshold grid must be non-empty");
  }
  std::vector<double> grid = threshold_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double t : grid) {
    if (!(t > 0.0) || t > 1.0) {
      throw std::invalid_argument("screening thresholds must lie in (0, 1]");
    }
  }
  return grid;
}

double StageFit::predict(const FeatureMatrix& m, std::size_t row) const {
  if (intercept_only) return sigmoid(intercept);
  double eta = fit.intercept;
  for (std::size_t k = 0; k < retained_cols.size(); ++k) {
    if (m.at(row, retained_cols[k])) eta += fit.coefficients[k];
  }
  return sigmoid(eta);
}

double StageFit::predict_row(const std::vector<std::uint8_t>& row) const {
  if (intercept_only) return sigmoid(intercept);
  double eta = fit.intercept;
  for (std::size_t k = 0; k < retained_cols.size(); ++k) {
    if (row[retained_cols[k]]) eta += fit.coefficients[k];
  }
  return sigmoid(eta);
}

double StageFit::predict_features(const FeatureVector& fv) const {
  if (intercept_only) return sigmoid(intercept);
  double eta = fit.intercept;
  for (std::size_t k = 0; k < retained.size(); ++k) {
    if (fv.contains(retained[k])) eta += fit.coefficients[k];
  }
  return sigmoid(eta);
}

PrevalenceResult apply_prevalence(const FeatureMatrix& m,
                                  const PipelineConfig& cfg) {
  return prevalence_filter(m, cfg.min_count, cfg.max_count);
}

ThresholdSelection select_threshold(const FeatureMatrix& m,
                                    const PipelineConfig& cfg) {
  FeatureMatrix mL = labeled_only(apply_prevalence(m, cfg).matrix);
  require_both_classes(mL);
  return select_threshold_ctx(mL, cfg, derive_seed(cfg.seed, {"select"}));
}

FinalFit fit_final(const FeatureMatrix& m, const PipelineConfig& cfg) {
  FeatureMatrix filtered = apply_prevalence(m, cfg).matrix;
  require_both_classes(labeled_only(filtered));
  return fit_final_ctx(filtered, cfg, cfg.seed);
}

LooResult loo_calibration(const FeatureMatrix& m, const PipelineConfig& cfg) {
  cfg.normalized_thresholds();  // reject bad grids before the per-song loop
  FeatureMatrix mL = labeled_only(apply_prevalence(m, cfg).matrix);
  require_both_classes(mL);
  const std::size_t n = mL.rows();

  std::vector<std::optional<LooRecord>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const std::string& id = mL.song_ids[i];
    try {
      FeatureMatrix sub = mL.without_row(i);
      FinalFit ff = fit_final_ctx(sub, cfg, derive_seed(cfg.seed, {"loo", id}));
      LooRecord rec;
      rec.song_id = id;
      rec.true_label = *mL.labels[i];
      rec.p_hat = ff.stage.predict(mL, i);
      rec.threshold_used = ff.selection.threshold;
      rec.retained_feature_count = ff.stage.retained_count;
      rec.intercept_only = ff.stage.intercept_only;
      rec.training_ids = sub.song_ids;
      rec.inner_table = ff.selection.table;
      slots[i] = std::move(rec);
    } catch (const std::exception& e) {
      errors[i] = id + ": " + e.what();
    }
  });

  LooResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      out.records.push_back(std::move(*slots[i]));
    } else {
      out.failures.push_back(errors[i]);
    }
  }
  return out;
}

std::vector<PredictionReport> predict_with_ci(const FeatureMatrix& m,
                                              const std::vector<Song>& targets,
                                              const PipelineConfig& cfg) {
  cfg.normalized_thresholds();  // reject bad grids before the refit loop
  FeatureMatrix filtered = apply_prevalence(m, cfg).matrix;
  FeatureMatrix mL = labeled_only(filtered);
  require_both_classes(mL);

  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(targets.size());
  for (const Song& s : targets) rows.push_back(target_row(filtered, s));

  FinalFit final_fit = fit_final_ctx(mL, cfg, cfg.seed);

  const std::size_t n = mL.rows();
  // loo_sets[t][i]: prediction for target t from the refit without song i.
  std::vector<std::vector<double>> loo_sets(targets.size(),
                                            std::vector<double>(n, 0.0));
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    FinalFit ff = fit_final_ctx(mL.without_row(i), cfg,
                                derive_seed(cfg.seed, {"loo", mL.song_ids[i]}));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      loo_sets[t][i] = ff.stage.predict_row(rows[t]);
    }
  });

  std::vector<PredictionReport> reports;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    PredictionReport rep;
    rep.song_id = targets[t].id;
    rep.p_hat = final_fit.stage.predict_row(rows[t]);
    rep.loo_prediction_set = loo_sets[t];
    rep.ci_low = quantile_linear(loo_sets[t], 0.025);
    rep.ci_high = quantile_linear(loo_sets[t], 0.975);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<ImportanceEntry> variable_importance(const FeatureMatrix& m,
                                                 const std::vector<int>& features,
                                                 const PipelineConfig& cfg) {
  std::vector<ImportanceEntry> out;
  for (int f : features) {
    FeatureMatrix reduced = m.without_feature(f);
    LooResult loo = loo_calibration(reduced, cfg);
    std::vector<ScoredLabel> scored;
    scored.reserve(loo.records.size());
    for (const LooRecord& r : loo.records) {
      scored.push_back({r.true_label, r.p_hat});
    }
    out.push_back({f, roc(scored).auc});
  }
  return out;
}

}  // namespace songprint
