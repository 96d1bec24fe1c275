#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace songprint {

// Column-major binary design matrix.
struct Design {
  std::size_t n = 0;
  std::vector<std::vector<std::uint8_t>> columns;

  std::size_t k() const { return columns.size(); }
};

struct TuningPair {
  double alpha = 1.0;   // 0 = ridge, 1 = lasso
  double lambda = 0.0;
};

struct Convergence {
  int iterations = 0;
  int cd_passes = 0;
  double final_change = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
  // Penalized objective (standardized parameterization) after each outer
  // step; non-increasing by construction.
  std::vector<double> objective_trace;
};

// Logistic elastic-net fit. Coefficients are reported on the original 0/1
// feature scale; the standardization used internally is kept for
// diagnostics (scale 0 marks a constant column, whose coefficient is 0).
struct ElasticNetFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  TuningPair tuning;
  std::vector<double> feature_means;
  std::vector<double> feature_scales;
  Convergence convergence;
};

// Penalized objective of the given raw-scale coefficients:
//   -(1/n) loglik + lambda [ (1-alpha) ||beta||_2^2 / 2 + alpha ||beta||_1 ]
// with probabilities clamped to [1e-12, 1-1e-12] inside the logs.
double objective(double intercept, std::span<const double> beta,
                 const Design& x, std::span<const int> y, double alpha,
                 double lambda);

// Smooth part -(1/n) loglik and its analytic gradient (raw scale).
double smooth_objective(double intercept, std::span<const double> beta,
                        const Design& x, std::span<const int> y);
void smooth_gradient(double intercept, std::span<const double> beta,
                     const Design& x, std::span<const int> y,
                     double* intercept_grad, std::vector<double>& beta_grad);

// Log-spaced penalty grid from lambda_max (smallest value that zeroes every
// coefficient; computed on standardized columns with the usual alpha floor
// of 0.001) down to min_ratio * lambda_max. Throws if every column is
// constant.
std::vector<double> lambda_path(const Design& x, std::span<const int> y,
                                double alpha, int n_lambda, double min_ratio);

// Minimizes the elastic-net objective by IRLS with cyclic coordinate-wise
// soft-threshold updates on internally standardized predictors. The
// intercept is unpenalized. Requires both classes in y.
ElasticNetFit fit(const Design& x, std::span<const int> y, TuningPair tuning);

// Warm-started fits along a descending lambda grid.
std::vector<ElasticNetFit> fit_path(const Design& x, std::span<const int> y,
                                    double alpha,
                                    std::span<const double> lambdas);

double predict_prob(const ElasticNetFit& fit, std::span<const std::uint8_t> x);
double predict_prob_linear(double intercept, std::span<const double> beta,
                           std::span<const std::uint8_t> x);

// Max KKT residual of the fit on the standardized scale (intercept included
// as an unpenalized coordinate).
double kkt_residual(const ElasticNetFit& fit, const Design& x,
                    std::span<const int> y);

struct CvConfig {
  std::vector<double> alpha_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  int n_lambda = 100;
  double min_ratio = 0.01;
  int k_folds = 5;
  std::uint64_t seed = 0;
  // Pick the largest lambda whose CV loss is within one standard error of
  // the minimum instead of the minimizer. Off by default.
  bool one_se_rule = false;
};

struct CvPoint {
  double alpha = 0.0;
  double lambda = 0.0;
  double mean_nll = 0.0;  // per held-out observation
  int folds = 0;
};

struct CvResult {
  TuningPair selected;
  std::vector<CvPoint> curve;
  ElasticNetFit fit;  // refit on all rows at the selected pair
};

// Stratified k-fold selection of (alpha, lambda) by mean held-out negative
// log-likelihood; ties break toward larger lambda, then smaller alpha.
// Throws if either class has fewer members than k_folds.
CvResult cv_select(const Design& x, std::span<const int> y, const CvConfig& cfg);

// Stratified fold assignment (fold id per row), derived from the seed only.
std::vector<int> stratified_folds(std::span<const int> y, int k_folds,
                                  std::uint64_t seed);

}  // namespace songprint
