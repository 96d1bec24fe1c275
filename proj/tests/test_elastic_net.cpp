#include "songprint/elastic_net.hpp"

#include <cmath>

#include "doctest.h"
#include "songprint/rng.hpp"
#include "support/oracles.hpp"

using namespace songprint;

namespace {

Design random_design(std::size_t n, std::size_t k, std::uint64_t seed,
                     std::vector<int>* y) {
  Rng rng(seed);
  Design x;
  x.n = n;
  x.columns.assign(k, std::vector<std::uint8_t>(n));
  for (auto& col : x.columns) {
    for (auto& v : col) v = rng.uniform() < 0.5;
  }
  if (y) {
    y->resize(n);
    bool ok = false;
    while (!ok) {
      int ones = 0;
      for (auto& v : *y) ones += (v = rng.uniform() < 0.5);
      ok = ones >= 3 && ones <= static_cast<int>(n) - 3;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("objective hand values") {
  std::vector<int> y = {0, 0, 1, 1};
  Design x;
  x.n = 4;
  x.columns = {{0, 1, 0, 1}, {1, 1, 0, 0}};

  SUBCASE("all-zero coefficients on a balanced label") {
    std::vector<double> beta = {0.0, 0.0};
    CHECK(objective(0.0, beta, x, y, 0.5, 0.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }

  SUBCASE("lambda zero is the bare likelihood term") {
    std::vector<double> beta = {0.7, -0.3};
    CHECK(objective(0.4, beta, x, y, 0.3, 0.0) ==
          doctest::Approx(smooth_objective(0.4, beta, x, y)).epsilon(1e-14));
  }

  SUBCASE("penalty arithmetic") {
    std::vector<double> beta = {1.0, -1.0};
    double with = objective(0.0, beta, x, y, 0.5, 2.0);
    double without = smooth_objective(0.0, beta, x, y);
    CHECK(with - without == doctest::Approx(3.0).epsilon(1e-12));
  }

  SUBCASE("dimension mismatch throws") {
    std::vector<double> beta = {1.0};
    CHECK_THROWS_AS(objective(0.0, beta, x, y, 0.5, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<int> y;
    Design x = random_design(15, 4, 900 + inst, &y);
    Rng rng(7000 + inst);
    std::vector<double> beta(4);
    for (auto& b : beta) b = 2.0 * rng.uniform() - 1.0;
    double b0 = 2.0 * rng.uniform() - 1.0;

    double g0;
    std::vector<double> grad;
    smooth_gradient(b0, beta, x, y, &g0, grad);

    const double h = 1e-5;
    auto fd0 = (smooth_objective(b0 + h, beta, x, y) -
                smooth_objective(b0 - h, beta, x, y)) /
               (2 * h);
    CHECK(std::fabs(fd0 - g0) < 1e-6);
    for (std::size_t j = 0; j < beta.size(); ++j) {
      auto hi = beta, lo = beta;
      hi[j] += h;
      lo[j] -= h;
      double fd = (smooth_objective(b0, hi, x, y) -
                   smooth_objective(b0, lo, x, y)) /
                  (2 * h);
      CHECK(std::fabs(fd - grad[j]) < 1e-6);
    }
  }
}

TEST_CASE("lambda path") {
  std::vector<int> y;
  Design x = random_design(20, 3, 42, &y);

  SUBCASE("endpoints") {
    auto path = lambda_path(x, y, 1.0, 2, 0.01);
    REQUIRE(path.size() == 2);
    CHECK(path[1] == doctest::Approx(0.01 * path[0]).epsilon(1e-12));
  }

  SUBCASE("alpha 0 uses the 0.001 floor") {
    auto a0 = lambda_path(x, y, 0.0, 5, 0.01);
    auto tiny = lambda_path(x, y, 0.001, 5, 0.01);
    for (std::size_t i = 0; i < a0.size(); ++i) {
      CHECK(a0[i] == doctest::Approx(tiny[i]).epsilon(1e-12));
    }
  }

  SUBCASE("constant design is an error") {
    Design flat;
    flat.n = 8;
    flat.columns = {std::vector<std::uint8_t>(8, 1),
                    std::vector<std::uint8_t>(8, 0)};
    std::vector<int> yy = {0, 1, 0, 1, 0, 1, 0, 1};
    CHECK_THROWS_AS(lambda_path(flat, yy, 1.0, 10, 0.01),
                    std::invalid_argument);
  }

  SUBCASE("KKT boundary: beta vanishes exactly at lambda_max") {
    auto path = lambda_path(x, y, 1.0, 3, 0.01);
    ElasticNetFit at_max = fit(x, y, {1.0, path[0]});
    for (double b : at_max.coefficients) CHECK(b == 0.0);
    ElasticNetFit below = fit(x, y, {1.0, path[0] * (1.0 - 1e-3)});
    double biggest = 0.0;
    for (double b : below.coefficients) biggest = std::max(biggest, std::fabs(b));
    CHECK(biggest > 0.0);
  }
}

TEST_CASE("large lambda gives the empirical logit intercept") {
  Design x;
  x.n = 10;
  x.columns = {{1, 0, 1, 0, 1, 0, 1, 0, 1, 0}};
  std::vector<int> y = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  ElasticNetFit f = fit(x, y, {1.0, 10.0});
  CHECK(f.coefficients[0] == 0.0);
  CHECK(std::fabs(f.intercept - std::log(3.0 / 7.0)) < 1e-8);
}

TEST_CASE("unpenalized fit matches the Newton oracle") {
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<int> y;
    Design x = random_design(20, 3, 500 + inst, &y);
    test::NewtonResult oracle;
    try {
      oracle = test::newton_logistic(x, y);
    } catch (const std::runtime_error&) {
      continue;  // singular/separable draw
    }
    if (!oracle.converged) continue;
    double norm = std::fabs(oracle.intercept);
    for (double b : oracle.beta) norm = std::max(norm, std::fabs(b));
    if (norm > 50) continue;  // effectively separable
    ElasticNetFit f = fit(x, y, {1.0, 0.0});
    CHECK(std::fabs(f.intercept - oracle.intercept) < 1e-4);
    for (std::size_t j = 0; j < oracle.beta.size(); ++j) {
      CHECK(std::fabs(f.coefficients[j] - oracle.beta[j]) < 1e-4);
    }
  }
}

TEST_CASE("zero-variance columns get exactly zero coefficients") {
  Design x;
  x.n = 8;
  x.columns = {{1, 1, 1, 1, 1, 1, 1, 1}, {1, 0, 1, 0, 1, 1, 0, 0}};
  std::vector<int> y = {1, 0, 1, 0, 1, 1, 0, 0};
  ElasticNetFit f = fit(x, y, {0.5, 0.05});
  CHECK(f.coefficients[0] == 0.0);
  CHECK(f.coefficients[1] != 0.0);
}

TEST_CASE("KKT residuals are small at every returned fit") {
  for (int inst = 0; inst < 8; ++inst) {
    std::vector<int> y;
    Design x = random_design(25, 4, 1300 + inst, &y);
    for (double alpha : {0.0, 0.5, 1.0}) {
      auto path = lambda_path(x, y, alpha, 8, 0.01);
      auto fits = fit_path(x, y, alpha, path);
      for (const auto& f : fits) {
        CHECK(kkt_residual(f, x, y) < 1e-6);
        CHECK(f.convergence.converged);
      }
    }
  }
}

TEST_CASE("objective trace is non-increasing") {
  std::vector<int> y;
  Design x = random_design(30, 5, 77, &y);
  ElasticNetFit f = fit(x, y, {0.4, 0.02});
  const auto& trace = f.convergence.objective_trace;
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1] + 1e-10);
  }
}

TEST_CASE("warm and cold fits agree along the path") {
  std::vector<int> y;
  Design x = random_design(25, 4, 303, &y);
  double alpha = 0.5;
  auto path = lambda_path(x, y, alpha, 12, 0.01);
  auto warm = fit_path(x, y, alpha, path);
  for (std::size_t i = 0; i < path.size(); ++i) {
    ElasticNetFit cold = fit(x, y, {alpha, path[i]});
    double warm_obj = objective(warm[i].intercept, warm[i].coefficients, x, y,
                                alpha, path[i]);
    double cold_obj = objective(cold.intercept, cold.coefficients, x, y, alpha,
                                path[i]);
    CHECK(std::fabs(warm_obj - cold_obj) < 1e-8);
  }
}

TEST_CASE("label swap negates the fit") {
  std::vector<int> y;
  Design x = random_design(25, 4, 610, &y);
  std::vector<int> flipped(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = 1 - y[i];
  ElasticNetFit a = fit(x, y, {0.5, 0.03});
  ElasticNetFit b = fit(x, flipped, {0.5, 0.03});
  CHECK(std::fabs(a.intercept + b.intercept) < 1e-6);
  for (std::size_t j = 0; j < a.coefficients.size(); ++j) {
    CHECK(std::fabs(a.coefficients[j] + b.coefficients[j]) < 1e-6);
  }
}

TEST_CASE("predict_prob") {
  ElasticNetFit f;
  f.intercept = -0.796;
  f.coefficients = {1.096};
  f.feature_means = {0.5};
  f.feature_scales = {0.5};
  std::vector<std::uint8_t> on = {1}, off = {0};
  CHECK(predict_prob(f, on) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-0.3))).epsilon(1e-9));
  CHECK(predict_prob(f, off) ==
        doctest::Approx(1.0 / (1.0 + std::exp(0.796))).epsilon(1e-9));
  std::vector<std::uint8_t> wrong = {1, 0};
  CHECK_THROWS_AS(predict_prob(f, wrong), std::invalid_argument);

  ElasticNetFit flat;
  flat.intercept = 0.0;
  flat.coefficients = {0.0, 0.0};
  std::vector<std::uint8_t> any = {1, 0};
  CHECK(predict_prob(flat, any) == doctest::Approx(0.5));
}

TEST_CASE("cross-validated selection") {
  SUBCASE("identical runs are bit-identical; seeds matter") {
    std::vector<int> y;
    Design x = random_design(30, 5, 2024, &y);
    CvConfig cfg;
    cfg.alpha_grid = {0.0, 0.5, 1.0};
    cfg.n_lambda = 20;
    cfg.seed = 9;
    CvResult a = cv_select(x, y, cfg);
    CvResult b = cv_select(x, y, cfg);
    CHECK(a.selected.alpha == b.selected.alpha);
    CHECK(a.selected.lambda == b.selected.lambda);
    REQUIRE(a.curve.size() == b.curve.size());
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
      CHECK(a.curve[i].mean_nll == b.curve[i].mean_nll);
    }
  }

  SUBCASE("a perfectly predictive column dominates the fit") {
    Rng rng(5);
    Design x;
    x.n = 40;
    std::vector<int> y(x.n);
    for (std::size_t i = 0; i < x.n; ++i) y[i] = i % 2;
    x.columns.resize(4);
    for (std::size_t i = 0; i < x.n; ++i) {
      x.columns[0].push_back(y[i]);             // the signal
      x.columns[1].push_back(rng.uniform() < 0.5);
      x.columns[2].push_back(rng.uniform() < 0.5);
      x.columns[3].push_back(rng.uniform() < 0.5);
    }
    CvConfig cfg;
    cfg.alpha_grid = {0.5};
    cfg.n_lambda = 30;
    cfg.seed = 4;
    CvResult res = cv_select(x, y, cfg);
    double signal = std::fabs(res.fit.coefficients[0]);
    for (std::size_t j = 1; j < 4; ++j) {
      CHECK(signal > std::fabs(res.fit.coefficients[j]));
    }
    CHECK(res.fit.coefficients[0] > 0);
  }

  SUBCASE("pure-noise design at alpha 1 stays near the null model") {
    std::vector<int> y;
    Design x = random_design(40, 6, 321, &y);
    CvConfig cfg;
    cfg.alpha_grid = {1.0};
    cfg.n_lambda = 30;
    cfg.seed = 2;
    CvResult res = cv_select(x, y, cfg);
    for (double b : res.fit.coefficients) CHECK(std::fabs(b) < 0.05);
  }

  SUBCASE("one-standard-error rule prefers a sparser model") {
    std::vector<int> y;
    Design x = random_design(30, 5, 2024, &y);
    CvConfig cfg;
    cfg.alpha_grid = {1.0};
    cfg.n_lambda = 20;
    cfg.seed = 9;
    CvResult min_rule = cv_select(x, y, cfg);
    cfg.one_se_rule = true;
    CvResult se_rule = cv_select(x, y, cfg);
    CHECK(se_rule.selected.lambda >= min_rule.selected.lambda);
    int nz_min = 0, nz_se = 0;
    for (double b : min_rule.fit.coefficients) nz_min += b != 0.0;
    for (double b : se_rule.fit.coefficients) nz_se += b != 0.0;
    CHECK(nz_se <= nz_min);
  }

  SUBCASE("class smaller than k_folds is an error") {
    Design x;
    x.n = 6;
    x.columns = {{0, 1, 0, 1, 0, 1}};
    std::vector<int> y = {0, 0, 0, 1, 1, 1};
    CvConfig cfg;  // k_folds = 5 > 3 members
    CHECK_THROWS_AS(cv_select(x, y, cfg), std::invalid_argument);
  }

  SUBCASE("stratified folds balance both classes") {
    std::vector<int> y(30);
    for (int i = 0; i < 30; ++i) y[i] = i < 18 ? 0 : 1;
    auto fold = stratified_folds(y, 5, 77);
    int per_fold[5][2] = {};
    for (int i = 0; i < 30; ++i) per_fold[fold[i]][y[i]]++;
    for (int f = 0; f < 5; ++f) {
      CHECK(per_fold[f][0] >= 3);  // 18 / 5
      CHECK(per_fold[f][1] >= 2);  // 12 / 5
    }
  }
}
