#pragma once

// Independent test oracles. These deliberately share no code with the
// production paths they check: the logistic MLE is a dense-Hessian Newton
// solver, the conditional p-value enumerates the hypergeometric support, and
// the AUC is the literal all-pairs concordance sum.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "songprint/elastic_net.hpp"
#include "songprint/metrics.hpp"
#include "songprint/screening.hpp"

namespace songprint::test {

struct NewtonResult {
  double intercept = 0.0;
  std::vector<double> beta;
  bool converged = false;
};

// Unpenalized logistic MLE via Newton-Raphson with step halving.
inline NewtonResult newton_logistic(const Design& x, const std::vector<int>& y) {
  const std::size_t n = x.n, k = x.k();
  const std::size_t d = k + 1;  // intercept first
  std::vector<double> theta(d, 0.0);

  auto eta_of = [&](const std::vector<double>& th, std::size_t i) {
    double e = th[0];
    for (std::size_t j = 0; j < k; ++j) {
      if (x.columns[j][i]) e += th[j + 1];
    }
    return e;
  };
  auto nll = [&](const std::vector<double>& th) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = eta_of(th, i);
      s += std::log1p(std::exp(-std::fabs(e))) + std::max(e, 0.0) - y[i] * e;
    }
    return s;
  };

  NewtonResult out;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> grad(d, 0.0);
    std::vector<double> hess(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-eta_of(theta, i)));
      double r = y[i] - p;
      double w = p * (1.0 - p);
      std::vector<double> xi(d, 0.0);
      xi[0] = 1.0;
      for (std::size_t j = 0; j < k; ++j) xi[j + 1] = x.columns[j][i];
      for (std::size_t a = 0; a < d; ++a) {
        grad[a] += r * xi[a];
        for (std::size_t b = 0; b < d; ++b) hess[a * d + b] += w * xi[a] * xi[b];
      }
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
    if (gnorm < 1e-12 * n) {
      out.converged = true;
      break;
    }
    // Solve H step = grad by Gaussian elimination with partial pivoting.
    std::vector<double> a = hess, b = grad, step(d, 0.0);
    for (std::size_t col = 0; col < d; ++col) {
      std::size_t piv = col;
      for (std::size_t r2 = col + 1; r2 < d; ++r2) {
        if (std::fabs(a[r2 * d + col]) > std::fabs(a[piv * d + col])) piv = r2;
      }
      if (std::fabs(a[piv * d + col]) < 1e-14) {
        throw std::runtime_error("singular Hessian in Newton oracle");
      }
      for (std::size_t c2 = 0; c2 < d; ++c2) std::swap(a[col * d + c2], a[piv * d + c2]);
      std::swap(b[col], b[piv]);
      for (std::size_t r2 = col + 1; r2 < d; ++r2) {
        double f = a[r2 * d + col] / a[col * d + col];
        for (std::size_t c2 = col; c2 < d; ++c2) a[r2 * d + c2] -= f * a[col * d + c2];
        b[r2] -= f * b[col];
      }
    }
    for (std::size_t r2 = d; r2-- > 0;) {
      double s = b[r2];
      for (std::size_t c2 = r2 + 1; c2 < d; ++c2) s -= a[r2 * d + c2] * step[c2];
      step[r2] = s / a[r2 * d + r2];
    }
    double base = nll(theta);
    double scale = 1.0;
    std::vector<double> cand(d);
    for (int h = 0; h < 40; ++h) {
      for (std::size_t j = 0; j < d; ++j) cand[j] = theta[j] + scale * step[j];
      if (nll(cand) <= base + 1e-12) break;
      scale *= 0.5;
    }
    theta = cand;
  }
  out.intercept = theta[0];
  out.beta.assign(theta.begin() + 1, theta.end());
  return out;
}

// Exact conditional p-value of the Pearson statistic under fixed margins,
// with the same tie convention the Monte-Carlo estimator targets.
inline double exact_conditional_pvalue(const ContingencyTable2x2& t) {
  if (t.degenerate()) return 1.0;
  const std::int64_t n = t.n(), r0 = t.row0(), c0 = t.col0();
  const std::int64_t lo = std::max<std::int64_t>(0, r0 + c0 - n);
  const std::int64_t hi = std::min(r0, c0);
  auto lchoose = [](double nn, double kk) {
    return std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1);
  };
  const double x2_obs = pearson_chi2(t);
  const double cutoff = x2_obs - 1e-9 * (1.0 + x2_obs);
  double total = 0.0, tail = 0.0;
  for (std::int64_t a = lo; a <= hi; ++a) {
    ContingencyTable2x2 s{a, r0 - a, c0 - a, n - r0 - c0 + a};
    double pmf = std::exp(lchoose(double(c0), double(a)) +
                          lchoose(double(n - c0), double(r0 - a)) -
                          lchoose(double(n), double(r0)));
    total += pmf;
    if (pearson_chi2(s) >= cutoff) tail += pmf;
  }
  return tail / total;
}

inline double brute_force_auc(const std::vector<ScoredLabel>& records) {
  double num = 0.0;
  std::size_t pairs = 0;
  for (const auto& pos : records) {
    if (pos.label != 1) continue;
    for (const auto& neg : records) {
      if (neg.label != 0) continue;
      ++pairs;
      if (pos.score > neg.score) {
        num += 1.0;
      } else if (pos.score == neg.score) {
        num += 0.5;
      }
    }
  }
  if (pairs == 0) throw std::invalid_argument("need both classes");
  return num / pairs;
}

}  // namespace songprint::test
