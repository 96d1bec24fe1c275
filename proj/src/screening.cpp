#include "songprint/screening.hpp"

#include <cmath>
#include <stdexcept>

#include "songprint/rng.hpp"

namespace songprint {

namespace {

double lchoose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

double chi2_for_cell_a(std::int64_t a, std::int64_t r0, std::int64_t c0,
                       std::int64_t n) {
  ContingencyTable2x2 t;
  t.a = a;
  t.b = r0 - a;
  t.c = c0 - a;
  t.d = n - r0 - c0 + a;
  return pearson_chi2(t);
}

}  // namespace

double pearson_chi2(const ContingencyTable2x2& t) {
  if (t.degenerate()) return 0.0;
  const double n = static_cast<double>(t.n());
  const double r0 = static_cast<double>(t.row0());
  const double r1 = static_cast<double>(t.row1());
  const double c0 = static_cast<double>(t.col0());
  const double c1 = static_cast<double>(t.col1());
  const double obs[4] = {double(t.a), double(t.b), double(t.c), double(t.d)};
  const double exp[4] = {r0 * c0 / n, r0 * c1 / n, r1 * c0 / n, r1 * c1 / n};
  double x2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    double diff = obs[i] - exp[i];
    x2 += diff * diff / exp[i];
  }
  return x2;
}

double simulate_null_pvalue(const ContingencyTable2x2& t, int mc_iterations,
                            std::uint64_t seed) {
  if (mc_iterations < 1) {
    throw std::invalid_argument("mc_iterations must be >= 1");
  }
  if (t.degenerate()) return 1.0;

  const std::int64_t n = t.n(), r0 = t.row0(), c0 = t.col0();
  const std::int64_t lo = std::max<std::int64_t>(0, r0 + c0 - n);
  const std::int64_t hi = std::min(r0, c0);

  const double x2_obs = pearson_chi2(t);
  // Ties at the observed statistic count as exceedances; keep the comparison
  // stable against rounding in algebraically equal X^2 values.
  const double cutoff = x2_obs - 1e-9 * (1.0 + x2_obs);

  double total = 0.0, tail = 0.0;
  for (std::int64_t a = lo; a <= hi; ++a) {
    double pmf = std::exp(lchoose(double(c0), double(a)) +
                          lchoose(double(n - c0), double(r0 - a)) -
                          lchoose(double(n), double(r0)));
    total += pmf;
    if (chi2_for_cell_a(a, r0, c0, n) >= cutoff) tail += pmf;
  }
  double q = tail / total;

  Rng rng(seed);
  std::int64_t count = binomial_draw(rng, mc_iterations, q);
  return (1.0 + static_cast<double>(count)) / (mc_iterations + 1.0);
}

std::vector<ScreeningResult> screen(const FeatureMatrix& m, double threshold,
                                    int mc_iterations, std::uint64_t seed) {
  auto rows = m.labeled_rows();
  if (rows.empty()) {
    throw std::invalid_argument("screening needs labeled rows");
  }
  std::vector<ScreeningResult> results;
  results.reserve(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    ContingencyTable2x2 t;
    for (std::size_t r : rows) {
      int y = *m.labels[r];
      int x = m.at(r, j);
      if (y == 0) {
        (x ? t.b : t.a)++;
      } else {
        (x ? t.d : t.c)++;
      }
    }
    ScreeningResult res;
    res.feature = m.features[j];
    res.degenerate = t.degenerate();
    res.statistic = pearson_chi2(t);
    std::uint64_t feature_seed =
        derive_seed(seed, {"screen", feature_at(m.features[j]).code});
    res.p_value = simulate_null_pvalue(t, mc_iterations, feature_seed);
    res.retained = !res.degenerate && res.p_value <= threshold;
    results.push_back(res);
  }
  return results;
}

}  // namespace songprint
