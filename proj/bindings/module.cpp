#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "songprint/artifacts.hpp"
#include "songprint/corpus.hpp"
#include "songprint/features.hpp"
#include "songprint/metrics.hpp"
#include "songprint/pipeline.hpp"
#include "songprint/rng.hpp"
#include "songprint/screening.hpp"

namespace py = pybind11;
using namespace songprint;

namespace {

PipelineConfig make_config(std::vector<double> threshold_grid,
                           std::vector<double> alpha_grid, int n_lambda,
                           double min_ratio, int k_folds, int mc_iterations,
                           int min_count, int max_count, std::uint64_t seed,
                           int threads) {
  PipelineConfig cfg;
  if (!threshold_grid.empty()) cfg.threshold_grid = std::move(threshold_grid);
  if (!alpha_grid.empty()) cfg.alpha_grid = std::move(alpha_grid);
  cfg.n_lambda = n_lambda;
  cfg.min_ratio = min_ratio;
  cfg.k_folds = k_folds;
  cfg.mc_iterations = mc_iterations;
  cfg.min_count = min_count;
  cfg.max_count = max_count;
  cfg.seed = seed;
  cfg.threads = threads;
  return cfg;
}

py::dict stage_dict(const FinalFit& fit) {
  py::dict d;
  d["threshold"] = fit.selection.threshold;
  py::list table;
  for (std::size_t i = 0; i < fit.selection.table.thresholds.size(); ++i) {
    py::dict row;
    row["threshold"] = fit.selection.table.thresholds[i];
    row["neg_log_likelihood"] = fit.selection.table.neg_log_likelihood[i];
    table.append(row);
  }
  d["threshold_table"] = table;
  d["intercept_only"] = fit.stage.intercept_only;
  d["retained"] = fit.stage.retained_count;
  d["nonzero"] = fit.stage.nonzero_count;
  if (fit.stage.intercept_only) {
    d["intercept"] = fit.stage.intercept;
  } else {
    d["alpha"] = fit.stage.selected.alpha;
    d["lambda"] = fit.stage.selected.lambda;
    d["intercept"] = fit.stage.fit.intercept;
    py::dict coefs;
    for (std::size_t k = 0; k < fit.stage.retained.size(); ++k) {
      coefs[py::str(feature_at(fit.stage.retained[k]).code)] =
          fit.stage.fit.coefficients[k];
    }
    d["coefficients"] = coefs;
  }
  return d;
}

}  // namespace

#define CONFIG_ARGS                                                          \
  py::arg("threshold_grid") = std::vector<double>{},                         \
  py::arg("alpha_grid") = std::vector<double>{}, py::arg("n_lambda") = 100,  \
  py::arg("min_ratio") = 0.01, py::arg("k_folds") = 5,                       \
  py::arg("mc_iterations") = 10000, py::arg("min_count") = 5,                \
  py::arg("max_count") = 66, py::arg("seed") = 0, py::arg("threads") = 1

PYBIND11_MODULE(_core, m) {
  m.doc() = "songwriter attribution from symbolic music encodings";

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("song_ids",
                             [](const Corpus& c) {
                               std::vector<std::string> ids;
                               for (const Song& s : c.songs) ids.push_back(s.id);
                               return ids;
                             })
      .def("__len__", [](const Corpus& c) { return c.songs.size(); })
      .def("__repr__", [](const Corpus& c) {
        return "<songprint.Corpus with " + std::to_string(c.songs.size()) +
               " songs>";
      });

  m.def("parse_corpus",
        [](const std::string& text) { return parse_corpus(text); },
        py::arg("text"), "Parse a corpus document from JSON text.");

  m.def("serialize_corpus", &serialize_corpus, py::arg("corpus"));

  m.def("validate",
        [](const Corpus& c) {
          py::list out;
          for (const Diagnostic& d : validate_corpus(c)) {
            py::dict row;
            row["severity"] = d.severity == Diagnostic::Severity::kError
                                  ? "error"
                                  : "warning";
            row["song_id"] = d.song_id;
            row["message"] = d.message;
            out.append(row);
          }
          return out;
        },
        py::arg("corpus"));

  m.def("catalog", []() {
    py::list out;
    for (const FeatureId& f : catalog()) {
      out.append(py::make_tuple(to_string(f.family), f.code, f.description));
    }
    return out;
  });

  m.def("extract_features",
        [](const Corpus& c, const std::string& song_id) {
          const Song* s = c.find(song_id);
          if (!s) throw std::invalid_argument("unknown song id: " + song_id);
          std::vector<std::string> codes;
          for (int f : extract_features(*s).present) {
            codes.push_back(feature_at(f).code);
          }
          return codes;
        },
        py::arg("corpus"), py::arg("song_id"));

  m.def("feature_matrix",
        [](const Corpus& c, int min_count, int max_count) {
          FeatureMatrix full = build_matrix(c);
          PipelineConfig cfg;
          cfg.min_count = min_count;
          cfg.max_count = max_count;
          PrevalenceResult res = apply_prevalence(full, cfg);
          py::dict d;
          d["song_ids"] = res.matrix.song_ids;
          std::vector<std::string> codes;
          for (int f : res.matrix.features) codes.push_back(feature_at(f).code);
          d["features"] = codes;
          py::list rows;
          for (std::size_t r = 0; r < res.matrix.rows(); ++r) {
            py::list row;
            for (std::size_t cidx = 0; cidx < res.matrix.cols(); ++cidx) {
              row.append(static_cast<int>(res.matrix.at(r, cidx)));
            }
            rows.append(row);
          }
          d["cells"] = rows;
          py::list labels;
          for (const auto& lab : res.matrix.labels) {
            if (lab) {
              labels.append(*lab);
            } else {
              labels.append(py::none());
            }
          }
          d["labels"] = labels;
          py::list dropped;
          for (const DroppedFeature& df : res.dropped) {
            dropped.append(
                py::make_tuple(feature_at(df.feature).code, df.count));
          }
          d["dropped"] = dropped;
          return d;
        },
        py::arg("corpus"), py::arg("min_count") = 5, py::arg("max_count") = 66);

  m.def("screen",
        [](const Corpus& c, double threshold, int mc_iterations,
           std::uint64_t seed, int min_count, int max_count) {
          PipelineConfig cfg;
          cfg.min_count = min_count;
          cfg.max_count = max_count;
          auto filtered = apply_prevalence(build_matrix(c), cfg);
          auto results = screen(filtered.matrix, threshold, mc_iterations,
                                derive_seed(seed, {"screen-final"}));
          py::list out;
          for (const ScreeningResult& r : results) {
            py::dict row;
            row["code"] = feature_at(r.feature).code;
            row["chi2"] = r.statistic;
            row["p_value"] = r.p_value;
            row["retained"] = r.retained;
            row["degenerate"] = r.degenerate;
            out.append(row);
          }
          return out;
        },
        py::arg("corpus"), py::arg("threshold") = 1.0,
        py::arg("mc_iterations") = 10000, py::arg("seed") = 0,
        py::arg("min_count") = 5, py::arg("max_count") = 66);

  m.def("fit",
        [](const Corpus& c, std::vector<double> threshold_grid,
           std::vector<double> alpha_grid, int n_lambda, double min_ratio,
           int k_folds, int mc_iterations, int min_count, int max_count,
           std::uint64_t seed, int threads) {
          PipelineConfig cfg = make_config(
              std::move(threshold_grid), std::move(alpha_grid), n_lambda,
              min_ratio, k_folds, mc_iterations, min_count, max_count, seed,
              threads);
          return stage_dict(fit_final(build_matrix(c), cfg));
        },
        py::arg("corpus"), CONFIG_ARGS);

  m.def("loo",
        [](const Corpus& c, std::vector<double> threshold_grid,
           std::vector<double> alpha_grid, int n_lambda, double min_ratio,
           int k_folds, int mc_iterations, int min_count, int max_count,
           std::uint64_t seed, int threads) {
          PipelineConfig cfg = make_config(
              std::move(threshold_grid), std::move(alpha_grid), n_lambda,
              min_ratio, k_folds, mc_iterations, min_count, max_count, seed,
              threads);
          LooResult loo = loo_calibration(build_matrix(c), cfg);
          py::dict d;
          py::list records;
          for (const LooRecord& r : loo.records) {
            py::dict row;
            row["song_id"] = r.song_id;
            row["label"] = r.true_label;
            row["p_hat"] = r.p_hat;
            row["threshold"] = r.threshold_used;
            row["retained"] = r.retained_feature_count;
            row["intercept_only"] = r.intercept_only;
            records.append(row);
          }
          d["records"] = records;
          d["failures"] = loo.failures;
          return d;
        },
        py::arg("corpus"), CONFIG_ARGS);

  m.def("predict",
        [](const Corpus& c, std::vector<std::string> targets,
           std::vector<double> threshold_grid, std::vector<double> alpha_grid,
           int n_lambda, double min_ratio, int k_folds, int mc_iterations,
           int min_count, int max_count, std::uint64_t seed, int threads) {
          PipelineConfig cfg = make_config(
              std::move(threshold_grid), std::move(alpha_grid), n_lambda,
              min_ratio, k_folds, mc_iterations, min_count, max_count, seed,
              threads);
          std::vector<Song> songs;
          if (targets.empty()) {
            for (const Song& s : c.songs) {
              if (!class_of(s.author)) songs.push_back(s);
            }
          } else {
            for (const std::string& id : targets) {
              const Song* s = c.find(id);
              if (!s) throw std::invalid_argument("unknown song id: " + id);
              songs.push_back(*s);
            }
          }
          auto reports = predict_with_ci(build_matrix(c), songs, cfg);
          py::list out;
          for (const PredictionReport& r : reports) {
            py::dict row;
            row["song_id"] = r.song_id;
            row["p_hat"] = r.p_hat;
            row["ci_low"] = r.ci_low;
            row["ci_high"] = r.ci_high;
            row["loo_prediction_set"] = r.loo_prediction_set;
            out.append(row);
          }
          return out;
        },
        py::arg("corpus"), py::arg("targets") = std::vector<std::string>{},
        CONFIG_ARGS);

  m.def("importance",
        [](const Corpus& c, std::vector<std::string> features,
           std::vector<double> threshold_grid, std::vector<double> alpha_grid,
           int n_lambda, double min_ratio, int k_folds, int mc_iterations,
           int min_count, int max_count, std::uint64_t seed, int threads) {
          PipelineConfig cfg = make_config(
              std::move(threshold_grid), std::move(alpha_grid), n_lambda,
              min_ratio, k_folds, mc_iterations, min_count, max_count, seed,
              threads);
          std::vector<int> ids;
          for (const std::string& code : features) {
            int f = catalog_index(code);
            if (f < 0) throw std::invalid_argument("unknown feature: " + code);
            ids.push_back(f);
          }
          auto entries = variable_importance(build_matrix(c), ids, cfg);
          py::list out;
          for (const ImportanceEntry& e : entries) {
            out.append(
                py::make_tuple(feature_at(e.feature).code, e.c_statistic));
          }
          return out;
        },
        py::arg("corpus"), py::arg("features"), CONFIG_ARGS);

  m.def("auc",
        [](const std::vector<int>& labels, const std::vector<double>& scores) {
          if (labels.size() != scores.size()) {
            throw std::invalid_argument("labels and scores differ in length");
          }
          std::vector<ScoredLabel> rec(labels.size());
          for (std::size_t i = 0; i < labels.size(); ++i) {
            rec[i] = {labels[i], scores[i]};
          }
          return roc(rec).auc;
        },
        py::arg("labels"), py::arg("scores"));

#ifdef SONGPRINT_VERSION
  m.attr("__version__") = SONGPRINT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
