#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "songprint/artifacts.hpp"
#include "songprint/corpus.hpp"
#include "songprint/features.hpp"
#include "songprint/metrics.hpp"
#include "songprint/pipeline.hpp"
#include "songprint/rng.hpp"
#include "songprint/screening.hpp"

namespace fs = std::filesystem;
using namespace songprint;

namespace {

struct Options {
  std::string corpus_path;
  std::string out_dir = "out";
  PipelineConfig cfg;
  double cut = 0.5;
  std::vector<std::string> targets;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--corpus", opt.corpus_path, "corpus JSON file")
      ->required();
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.cfg.seed, "master random seed");
  cmd->add_option("--threshold-grid", opt.cfg.threshold_grid,
                  "screening p-value thresholds, comma separated")
      ->delimiter(',');
  cmd->add_option("--alpha-grid", opt.cfg.alpha_grid,
                  "elastic-net alpha grid, comma separated")
      ->delimiter(',');
  cmd->add_option("--n-lambda", opt.cfg.n_lambda, "lambda grid size");
  cmd->add_option("--min-ratio", opt.cfg.min_ratio,
                  "lambda_min / lambda_max ratio");
  cmd->add_option("--folds", opt.cfg.k_folds, "cross-validation folds");
  cmd->add_option("--mc-iters", opt.cfg.mc_iterations,
                  "Monte-Carlo iterations per screening test");
  cmd->add_option("--min-count", opt.cfg.min_count,
                  "prevalence filter: drop features in <= this many songs");
  cmd->add_option("--max-count", opt.cfg.max_count,
                  "prevalence filter: drop features in >= this many songs");
  cmd->add_option("--cut", opt.cut, "classification cut for reports");
  cmd->add_option("--targets", opt.targets,
                  "song ids to predict, comma separated")
      ->delimiter(',');
  cmd->add_option("--threads", opt.cfg.threads, "worker thread cap");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct LoadedCorpus {
  Corpus corpus;
  FeatureMatrix matrix;
  RunInfo run;
};

// Parse + structural validation; returns nullopt after printing diagnostics
// when the corpus cannot be modeled.
std::optional<LoadedCorpus> load_for_modeling(const Options& opt) {
  std::string bytes = read_file(opt.corpus_path);
  LoadedCorpus lc;
  lc.corpus = parse_corpus(bytes);
  lc.run = {corpus_digest(bytes), opt.cfg.seed, run_timestamp()};
  bool bad = false;
  for (const Diagnostic& d : validate_corpus(lc.corpus)) {
    if (d.severity == Diagnostic::Severity::kError) {
      std::cerr << "error: " << d.song_id << (d.song_id.empty() ? "" : ": ")
                << d.message << "\n";
      bad = true;
    }
  }
  if (bad) return std::nullopt;
  lc.matrix = build_matrix(lc.corpus);
  return lc;
}

void write_manifest(const Options& opt, const RunInfo& run) {
  write_file(fs::path(opt.out_dir) / "manifest.json",
             manifest_json(opt.cfg, run));
}

std::vector<Song> pick_targets(const Corpus& corpus,
                               const std::vector<std::string>& ids) {
  std::vector<Song> targets;
  if (ids.empty()) {
    for (const Song& s : corpus.songs) {
      if (!class_of(s.author)) targets.push_back(s);
    }
  } else {
    for (const std::string& id : ids) {
      const Song* s = corpus.find(id);
      if (!s) throw std::invalid_argument("unknown target song id: " + id);
      targets.push_back(*s);
    }
  }
  return targets;
}

int cmd_validate(const Options& opt) {
  std::string bytes = read_file(opt.corpus_path);
  Corpus corpus = parse_corpus(bytes);
  auto diags = validate_corpus(corpus);
  RunInfo run{corpus_digest(bytes), opt.cfg.seed, run_timestamp()};
  write_manifest(opt, run);
  write_file(fs::path(opt.out_dir) / "diagnostics.json",
             diagnostics_json(diags));
  bool bad = false;
  for (const Diagnostic& d : diags) {
    bool err = d.severity == Diagnostic::Severity::kError;
    bad = bad || err;
    std::cout << (err ? "error" : "warning") << ": "
              << (d.song_id.empty() ? "" : d.song_id + ": ") << d.message
              << "\n";
  }
  std::cout << corpus.songs.size() << " songs, " << diags.size()
            << " diagnostics\n";
  return bad ? 1 : 0;
}

int cmd_features(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  PrevalenceResult filtered = apply_prevalence(lc->matrix, opt.cfg);
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "features.csv",
             features_csv(filtered.matrix));
  write_file(fs::path(opt.out_dir) / "dropped_features.json",
             dropped_features_json(filtered.dropped));
  std::cout << filtered.matrix.rows() << " songs x " << filtered.matrix.cols()
            << " features (" << filtered.dropped.size() << " dropped)\n";
  return 0;
}

int cmd_screen(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  PrevalenceResult filtered = apply_prevalence(lc->matrix, opt.cfg);
  double threshold = opt.cfg.normalized_thresholds().front();
  auto results = screen(filtered.matrix, threshold, opt.cfg.mc_iterations,
                        derive_seed(opt.cfg.seed, {"screen-final"}));
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "screening.csv", screening_csv(results));
  int kept = 0;
  for (const auto& r : results) kept += r.retained;
  std::cout << kept << " of " << results.size()
            << " features retained at threshold " << threshold << "\n";
  return 0;
}

int cmd_fit(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  FinalFit fit = fit_final(lc->matrix, opt.cfg);
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "fit.json", fit_json(fit, lc->run));
  write_file(fs::path(opt.out_dir) / "screening.csv",
             screening_csv(fit.stage.screening));
  std::cout << "threshold " << fit.selection.threshold << ", retained "
            << fit.stage.retained_count << ", nonzero "
            << fit.stage.nonzero_count << "\n";
  return 0;
}

int cmd_loo(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  LooResult loo = loo_calibration(lc->matrix, opt.cfg);
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "loo.csv", loo_csv(loo.records));
  write_file(fs::path(opt.out_dir) / "loo_failures.json",
             loo_failures_json(loo));
  std::vector<ScoredLabel> scored;
  for (const LooRecord& r : loo.records) {
    scored.push_back({r.true_label, r.p_hat});
  }
  Accuracy acc = accuracy_at(scored, opt.cut);
  std::cout << loo.records.size() << " out-of-sample predictions, accuracy "
            << acc.overall << " at cut " << opt.cut << ", AUC "
            << roc(scored).auc << "\n";
  return 0;
}

int cmd_predict(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  std::vector<Song> targets = pick_targets(lc->corpus, opt.targets);
  if (targets.empty()) {
    std::cerr << "error: no prediction targets (no unlabeled songs and no "
                 "--targets)\n";
    return 1;
  }
  auto reports = predict_with_ci(lc->matrix, targets, opt.cfg);
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "predictions.json",
             predictions_json(reports, lc->run));
  for (const PredictionReport& r : reports) {
    std::cout << r.song_id << ": p=" << r.p_hat << " [" << r.ci_low << ", "
              << r.ci_high << "]\n";
  }
  return 0;
}

int cmd_importance(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  FinalFit fit = fit_final(lc->matrix, opt.cfg);
  std::vector<int> features;
  for (std::size_t k = 0; k < fit.stage.retained.size(); ++k) {
    if (!fit.stage.intercept_only && fit.stage.fit.coefficients[k] != 0.0) {
      features.push_back(fit.stage.retained[k]);
    }
  }
  auto entries = variable_importance(lc->matrix, features, opt.cfg);
  write_manifest(opt, lc->run);
  write_file(fs::path(opt.out_dir) / "importance.csv",
             importance_csv(entries));
  std::cout << entries.size() << " features scored\n";
  return 0;
}

int cmd_report(const Options& opt) {
  auto lc = load_for_modeling(opt);
  if (!lc) return 1;
  LooResult loo = loo_calibration(lc->matrix, opt.cfg);
  std::vector<ScoredLabel> scored;
  for (const LooRecord& r : loo.records) {
    scored.push_back({r.true_label, r.p_hat});
  }
  write_manifest(opt, lc->run);
  fs::path report = fs::path(opt.out_dir) / "report";
  write_file(report / "histogram.csv", histogram_csv(loo.records, 0.05));
  write_file(report / "roc.csv", roc_csv(roc(scored)));
  write_file(report / "threshold_ll.csv", threshold_ll_csv(loo.records));
  std::vector<Song> targets = pick_targets(lc->corpus, opt.targets);
  std::vector<PredictionReport> reports;
  if (!targets.empty()) {
    reports = predict_with_ci(lc->matrix, targets, opt.cfg);
  }
  write_file(report / "density.csv", density_csv(reports, 201));
  std::cout << "report written to " << report.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"songprint: songwriter attribution from symbolic music"};
  app.require_subcommand(1);

  Options opt;
  int (*handlers[])(const Options&) = {cmd_validate,  cmd_features, cmd_screen,
                                       cmd_fit,       cmd_loo,      cmd_predict,
                                       cmd_importance, cmd_report};
  const char* names[] = {"validate", "features", "screen",     "fit",
                         "loo",      "predict",  "importance", "report"};
  const char* descs[] = {
      "parse the corpus and emit diagnostics",
      "emit the binary feature matrix as CSV",
      "emit per-feature screening statistics",
      "select the screening threshold and fit the final model",
      "leave-one-out out-of-sample calibration",
      "predict held-out songs with percentile confidence intervals",
      "removal-based variable importance",
      "emit calibration figure data as CSV"};
  CLI::App* subs[8];
  for (int i = 0; i < 8; ++i) {
    subs[i] = app.add_subcommand(names[i], descs[i]);
    add_common(subs[i], opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    for (int i = 0; i < 8; ++i) {
      if (subs[i]->parsed()) return handlers[i](opt);
    }
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
