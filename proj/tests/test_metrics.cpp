#include "songprint/metrics.hpp"

#include <cmath>

#include "doctest.h"
#include "songprint/rng.hpp"
#include "support/oracles.hpp"

using namespace songprint;

TEST_CASE("accuracy at a cut") {
  SUBCASE("perfect separation") {
    std::vector<ScoredLabel> rec = {{0, 0.1}, {0, 0.2}, {1, 0.8}, {1, 0.9}};
    Accuracy acc = accuracy_at(rec, 0.5);
    CHECK(acc.overall == doctest::Approx(1.0));
    CHECK(acc.class0_rate == doctest::Approx(1.0));
    CHECK(acc.class1_rate == doctest::Approx(1.0));
  }

  SUBCASE("ties classify as class 1 (>= convention)") {
    std::vector<ScoredLabel> rec = {{0, 0.4}, {1, 0.4}};
    Accuracy acc = accuracy_at(rec, 0.5);
    CHECK(acc.class0_rate == doctest::Approx(1.0));
    CHECK(acc.class1_rate == doctest::Approx(0.0));
    CHECK(acc.overall == doctest::Approx(0.5));

    std::vector<ScoredLabel> tie = {{0, 0.5}, {1, 0.5}};
    Accuracy at_cut = accuracy_at(tie, 0.5);
    CHECK(at_cut.class1_rate == doctest::Approx(1.0));
    CHECK(at_cut.class0_rate == doctest::Approx(0.0));
  }

  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(accuracy_at({}, 0.5), std::invalid_argument);
  }
}

TEST_CASE("negative log-likelihood") {
  std::vector<ScoredLabel> half = {{0, 0.5}, {1, 0.5}};
  CHECK(negative_log_likelihood(half) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));

  std::vector<ScoredLabel> quarters = {{0, 0.25}, {1, 0.75}};
  CHECK(negative_log_likelihood(quarters) ==
        doctest::Approx(-2 * std::log(0.75)).epsilon(1e-12));

  // clamping keeps confident predictions finite
  std::vector<ScoredLabel> confident = {{1, 1.0}, {0, 0.0}};
  double v = negative_log_likelihood(confident);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(-2 * std::log1p(-1e-12)).epsilon(1e-6));
}

TEST_CASE("roc curve and auc") {
  SUBCASE("perfectly ordered") {
    std::vector<ScoredLabel> rec = {{0, 0.1}, {0, 0.3}, {1, 0.7}, {1, 0.9}};
    RocCurve c = roc(rec);
    CHECK(c.auc == doctest::Approx(1.0));
    CHECK(c.points.front() == std::pair{0.0, 0.0});
    CHECK(c.points.back() == std::pair{1.0, 1.0});
  }

  SUBCASE("anti-ordered") {
    std::vector<ScoredLabel> rec = {{1, 0.1}, {1, 0.3}, {0, 0.7}, {0, 0.9}};
    CHECK(roc(rec).auc == doctest::Approx(0.0));
  }

  SUBCASE("ties count half") {
    std::vector<ScoredLabel> rec = {{0, 0.1}, {0, 0.6}, {1, 0.6}, {1, 0.9}};
    CHECK(roc(rec).auc == doctest::Approx(3.5 / 4.0));
  }

  SUBCASE("single class throws") {
    std::vector<ScoredLabel> rec = {{1, 0.1}, {1, 0.3}};
    CHECK_THROWS_AS(roc(rec), std::invalid_argument);
  }

  SUBCASE("monotone points from (0,0) to (1,1)") {
    Rng rng(8);
    std::vector<ScoredLabel> rec;
    for (int i = 0; i < 40; ++i) {
      rec.push_back({int(rng.below(2)), rng.uniform()});
    }
    RocCurve c = roc(rec);
    CHECK(c.points.front() == std::pair{0.0, 0.0});
    CHECK(c.points.back() == std::pair{1.0, 1.0});
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].first >= c.points[i - 1].first);
      CHECK(c.points[i].second >= c.points[i - 1].second);
    }
  }

  SUBCASE("auc equals brute-force concordance on random sets") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ScoredLabel> rec;
      int n = 5 + int(rng.below(45));
      bool both = false;
      while (!both) {
        rec.clear();
        int ones = 0;
        for (int i = 0; i < n; ++i) {
          int label = int(rng.below(2));
          ones += label;
          // quantized scores force plenty of ties
          rec.push_back({label, std::floor(rng.uniform() * 8) / 8.0});
        }
        both = ones > 0 && ones < n;
      }
      CHECK(std::fabs(roc(rec).auc - test::brute_force_auc(rec)) < 1e-12);
    }
  }

  SUBCASE("auc invariant under strictly increasing transforms") {
    Rng rng(123);
    std::vector<ScoredLabel> rec, warped;
    for (int i = 0; i < 30; ++i) {
      int label = int(rng.below(2));
      double s = rng.uniform();
      rec.push_back({label, s});
      warped.push_back({label, std::exp(3 * s) - 0.5});
    }
    CHECK(roc(rec).auc == doctest::Approx(roc(warped).auc).epsilon(1e-12));
  }

  SUBCASE("label swap with score negation preserves auc") {
    Rng rng(321);
    std::vector<ScoredLabel> rec, mirrored;
    for (int i = 0; i < 25; ++i) {
      int label = i % 2;
      double s = rng.uniform();
      rec.push_back({label, s});
      mirrored.push_back({1 - label, -s});
    }
    CHECK(roc(rec).auc == doctest::Approx(roc(mirrored).auc).epsilon(1e-12));
  }

  SUBCASE("trapezoid area under the points equals concordance on tie-free data") {
    Rng rng(55);
    std::vector<ScoredLabel> rec;
    for (int i = 0; i < 50; ++i) {
      rec.push_back({int(rng.below(2)), rng.uniform() + i * 1e-9});
    }
    RocCurve c = roc(rec);
    double area = 0.0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      area += (c.points[i].first - c.points[i - 1].first) * 0.5 *
              (c.points[i].second + c.points[i - 1].second);
    }
    CHECK(std::fabs(area - c.auc) < 1e-12);
  }
}

TEST_CASE("linear-interpolation quantiles") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_linear(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile_linear(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile_linear(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_linear(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_linear({7.0}, 0.975) == doctest::Approx(7.0));
}

TEST_CASE("kde integrates to about one") {
  Rng rng(6);
  std::vector<double> sample;
  for (int i = 0; i < 60; ++i) sample.push_back(0.3 + 0.1 * rng.uniform());
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-1.0 + i * 0.01);
  auto dens = gaussian_kde(sample, grid);
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    mass += 0.01 * 0.5 * (dens[i] + dens[i - 1]);
  }
  CHECK(std::fabs(mass - 1.0) < 0.01);
  // degenerate sample still yields a finite density
  auto flat = gaussian_kde(std::vector<double>(10, 0.5), grid);
  for (double d : flat) CHECK(std::isfinite(d));
}
