#pragma once

#include <cstdint>
#include <vector>

#include "songprint/features.hpp"

namespace songprint {

// 2x2 contingency table; rows are the class label (0/1), columns feature
// absence/presence.
struct ContingencyTable2x2 {
  std::int64_t a = 0;  // y=0, x=0
  std::int64_t b = 0;  // y=0, x=1
  std::int64_t c = 0;  // y=1, x=0
  std::int64_t d = 0;  // y=1, x=1

  std::int64_t n() const { return a + b + c + d; }
  std::int64_t row0() const { return a + b; }
  std::int64_t row1() const { return c + d; }
  std::int64_t col0() const { return a + c; }
  std::int64_t col1() const { return b + d; }

  // True when a row or column margin is zero; the statistic is undefined and
  // the feature carries no screening information.
  bool degenerate() const {
    return row0() == 0 || row1() == 0 || col0() == 0 || col1() == 0;
  }
};

// Pearson X^2 without continuity correction; 0 for degenerate tables.
double pearson_chi2(const ContingencyTable2x2& t);

// Monte-Carlo p-value under the fixed-margins (hypergeometric) null with the
// add-one estimator (1 + #{X2_sim >= X2_obs}) / (B + 1). Degenerate tables
// get p = 1. The exceedance count is drawn as Binomial(B, q) with q the exact
// null tail probability, which is distributionally identical to simulating B
// tables and counting.
double simulate_null_pvalue(const ContingencyTable2x2& t, int mc_iterations,
                            std::uint64_t seed);

struct ScreeningResult {
  int feature = -1;       // catalog index
  double statistic = 0.0;
  double p_value = 1.0;
  bool retained = false;
  bool degenerate = false;
};

// One result per matrix column, computed over the labeled rows. Per-feature
// RNG streams are derived from (seed, feature code), so the output does not
// depend on evaluation order. Degenerate columns are never retained.
std::vector<ScreeningResult> screen(const FeatureMatrix& m, double threshold,
                                    int mc_iterations, std::uint64_t seed);

}  // namespace songprint
