#include "songprint/elastic_net.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "songprint/rng.hpp"

namespace songprint {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kOuterTol = 1e-7;
constexpr double kKktTol = 1e-6;
constexpr int kMaxOuter = 10000;
constexpr int kMaxCdPasses = 40;
constexpr double kDivergence = 1e6;

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double clamp_prob(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

// The tiny relative slack keeps coefficients exactly zero at the lambda_max
// boundary, where summation order would otherwise leave 1-ulp survivors.
double soft_threshold(double v, double gamma) {
  double edge = gamma * (1.0 + 1e-10);
  if (v > edge) return v - gamma;
  if (v < -edge) return v + gamma;
  return 0.0;
}

struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;  // population SD; 0 marks a constant column
};

Standardization standardize(const Design& x) {
  Standardization s;
  s.mean.resize(x.k());
  s.scale.resize(x.k());
  for (std::size_t j = 0; j < x.k(); ++j) {
    double sum = 0.0;
    for (std::uint8_t v : x.columns[j]) sum += v;
    double m = sum / x.n;
    s.mean[j] = m;
    double var = m * (1.0 - m);  // binary column
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return s;
}

void check_dims(const Design& x, std::span<const int> y) {
  if (y.size() != x.n) throw std::invalid_argument("y length != design rows");
  for (const auto& col : x.columns) {
    if (col.size() != x.n) throw std::invalid_argument("ragged design matrix");
  }
}

double mean_label(std::span<const int> y) {
  double s = 0.0;
  for (int v : y) s += v;
  return s / y.size();
}

// Standardized-scale state; eta includes the intercept.
struct Working {
  double b0 = 0.0;
  std::vector<double> b;
  std::vector<double> eta;
};

// Per-design scratch exploiting the binary columns: a standardized column
// takes only the two values h0 (x=0) and h1 (x=1), so every dot product
// reduces to a full-vector sum plus a sum over the column's ones.
struct Workspace {
  std::vector<std::vector<std::uint32_t>> ones;
  std::vector<double> h0, h1;

  Workspace(const Design& x, const Standardization& st) {
    ones.resize(x.k());
    h0.assign(x.k(), 0.0);
    h1.assign(x.k(), 0.0);
    for (std::size_t j = 0; j < x.k(); ++j) {
      if (st.scale[j] == 0.0) continue;
      h0[j] = -st.mean[j] / st.scale[j];
      h1[j] = (1.0 - st.mean[j]) / st.scale[j];
      const auto& col = x.columns[j];
      for (std::size_t i = 0; i < x.n; ++i) {
        if (col[i]) ones[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
};

void recompute_eta(const Design& x, const Standardization& st,
                   const Workspace& ws, Working& w) {
  double base = w.b0;
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (st.scale[j] == 0.0 || w.b[j] == 0.0) continue;
    base += w.b[j] * ws.h0[j];
  }
  w.eta.assign(x.n, base);
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (st.scale[j] == 0.0 || w.b[j] == 0.0) continue;
    double step = w.b[j] * (ws.h1[j] - ws.h0[j]);
    for (std::uint32_t i : ws.ones[j]) w.eta[i] += step;
  }
}

double nll_from_eta(std::span<const double> eta, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double p = clamp_prob(sigmoid(eta[i]));
    s -= y[i] ? std::log(p) : std::log1p(-p);
  }
  return s / y.size();
}

double penalty(std::span<const double> b, double alpha, double lambda) {
  double l1 = 0.0, l2 = 0.0;
  for (double v : b) {
    l1 += std::fabs(v);
    l2 += v * v;
  }
  return lambda * ((1.0 - alpha) * 0.5 * l2 + alpha * l1);
}

double std_objective(const Working& w, std::span<const int> y, double alpha,
                     double lambda) {
  return nll_from_eta(w.eta, y) + penalty(w.b, alpha, lambda);
}

double kkt_from_working(const Design& x, const Standardization& st,
                        const Workspace& ws, const Working& w,
                        std::span<const int> y, double alpha, double lambda) {
  const double n = static_cast<double>(x.n);
  std::vector<double> resid(x.n);
  double total = 0.0;
  for (std::size_t i = 0; i < x.n; ++i) {
    resid[i] = y[i] - sigmoid(w.eta[i]);
    total += resid[i];
  }
  double worst = std::fabs(total / n);
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (st.scale[j] == 0.0) continue;
    double ones_sum = 0.0;
    for (std::uint32_t i : ws.ones[j]) ones_sum += resid[i];
    double dot = ws.h0[j] * total + (ws.h1[j] - ws.h0[j]) * ones_sum;
    double g = -dot / n;
    double r;
    if (w.b[j] != 0.0) {
      r = std::fabs(g + lambda * (1.0 - alpha) * w.b[j] +
                    lambda * alpha * (w.b[j] > 0 ? 1.0 : -1.0));
    } else {
      r = std::max(0.0, std::fabs(g) - lambda * alpha);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

// Reusable buffers so warm path fits allocate nothing per step.
struct Scratch {
  std::vector<double> weight, z, wrr, a, sw1;
  std::vector<std::uint8_t> active;
  Working cand;

  Scratch(std::size_t n, std::size_t k)
      : weight(n), z(n), wrr(n), a(k), sw1(k), active(k) {
    cand.b.resize(k);
    cand.eta.resize(n);
  }
};

Convergence fit_standardized(const Design& x, std::span<const int> y,
                             const Standardization& st, const Workspace& ws,
                             double alpha, double lambda, Working& w,
                             Scratch& scr) {
  const double n = static_cast<double>(x.n);
  Convergence conv;
  recompute_eta(x, st, ws, w);
  double obj = std_objective(w, y, alpha, lambda);
  conv.objective_trace.push_back(obj);

  std::vector<double>& weight = scr.weight;
  std::vector<double>& z = scr.z;
  std::vector<double>& wrr = scr.wrr;
  std::vector<double>& a = scr.a;
  std::vector<double>& sw1 = scr.sw1;
  std::vector<std::uint8_t>& active = scr.active;
  // Coordinate sweeps start loose and tighten only when the KKT gate below
  // rejects an otherwise-converged iterate.
  double cd_tol = 1e-6;

  for (int outer = 1; outer <= kMaxOuter; ++outer) {
    conv.iterations = outer;

    // Quadratic approximation at the current iterate. The working residual
    // is represented as wrr[i]/weight[i] - off so that a coordinate update
    // touches only the column's ones; wrr is the weighted residual.
    double sw = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
      double p = sigmoid(w.eta[i]);
      p = std::min(1.0 - 1e-9, std::max(1e-9, p));
      weight[i] = p * (1.0 - p);
      z[i] = w.eta[i] + (y[i] - p) / weight[i];
      wrr[i] = y[i] - p;  // weight * (z - eta)
      sw += weight[i];
    }
    for (std::size_t j = 0; j < x.k(); ++j) {
      if (st.scale[j] == 0.0) {
        a[j] = 0.0;
        continue;
      }
      double s1 = 0.0;
      for (std::uint32_t i : ws.ones[j]) s1 += weight[i];
      sw1[j] = s1;
      a[j] = (s1 * ws.h1[j] * ws.h1[j] + (sw - s1) * ws.h0[j] * ws.h0[j]) / n;
    }

    // Coordinate descent on the penalized weighted least squares problem;
    // full sweeps alternate with sweeps over the active set.
    Working& cand = scr.cand;
    cand.b0 = w.b0;
    cand.b = w.b;
    double off = 0.0;
    for (std::size_t j = 0; j < x.k(); ++j) active[j] = cand.b[j] != 0.0;

    auto sweep = [&](bool full) {
      double swrr = 0.0;
      for (std::size_t i = 0; i < x.n; ++i) swrr += wrr[i];
      double max_delta = 0.0;
      for (std::size_t j = 0; j < x.k(); ++j) {
        if (st.scale[j] == 0.0 || (!full && !active[j])) continue;
        const auto& ones = ws.ones[j];
        double dot_ones = 0.0;
        for (std::uint32_t i : ones) dot_ones += wrr[i];
        double swr = swrr - off * sw;
        double dot = ws.h0[j] * swr +
                     (ws.h1[j] - ws.h0[j]) * (dot_ones - off * sw1[j]);
        double u = dot / n + a[j] * cand.b[j];
        double nb = soft_threshold(u, lambda * alpha) /
                    (a[j] + lambda * (1.0 - alpha));
        double delta = nb - cand.b[j];
        if (delta != 0.0) {
          cand.b[j] = nb;
          active[j] = nb != 0.0;
          off += delta * ws.h0[j];
          double step = delta * (ws.h1[j] - ws.h0[j]);
          for (std::uint32_t i : ones) {
            double shrink = weight[i] * step;
            swrr -= shrink;
            wrr[i] -= shrink;
          }
          max_delta = std::max(max_delta, std::fabs(delta));
        }
      }
      double d0 = (swrr - off * sw) / sw;
      if (d0 != 0.0) {
        cand.b0 += d0;
        off += d0;
        max_delta = std::max(max_delta, std::fabs(d0));
      }
      return max_delta;
    };

    int pass = 0;
    while (pass < kMaxCdPasses) {
      ++pass;
      if (sweep(true) < cd_tol) break;
      while (pass < kMaxCdPasses) {
        ++pass;
        if (sweep(false) < cd_tol) break;
      }
    }
    conv.cd_passes += pass;
    cand.eta.resize(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
      cand.eta[i] = z[i] - wrr[i] / weight[i] + off;
    }

    // Keep the true objective non-increasing; halve the step if the
    // quadratic model overshot.
    double cand_obj = std_objective(cand, y, alpha, lambda);
    int halvings = 0;
    while (cand_obj > obj + 1e-15 * (1.0 + std::fabs(obj)) && halvings < 60) {
      cand.b0 = 0.5 * (cand.b0 + w.b0);
      for (std::size_t j = 0; j < x.k(); ++j) cand.b[j] = 0.5 * (cand.b[j] + w.b[j]);
      for (std::size_t i = 0; i < x.n; ++i) {
        cand.eta[i] = 0.5 * (cand.eta[i] + w.eta[i]);
      }
      cand_obj = std_objective(cand, y, alpha, lambda);
      ++halvings;
    }
    if (halvings == 60) {
      // No usable descent step; stay at the current iterate.
      cand.b0 = w.b0;
      cand.b = w.b;
      cand.eta = w.eta;
      cand_obj = obj;
    }

    double change = std::fabs(cand.b0 - w.b0);
    double max_coef = 0.0;
    for (std::size_t j = 0; j < x.k(); ++j) {
      change = std::max(change, std::fabs(cand.b[j] - w.b[j]));
      max_coef = std::max(max_coef, std::fabs(cand.b[j]));
    }
    std::swap(w.b0, cand.b0);
    w.b.swap(cand.b);
    w.eta.swap(cand.eta);
    obj = cand_obj;
    conv.objective_trace.push_back(obj);
    conv.final_change = change;

    if (max_coef > kDivergence) {
      conv.converged = false;
      conv.kkt_residual = kkt_from_working(x, st, ws, w, y, alpha, lambda);
      return conv;
    }
    if (change < kOuterTol) {
      double kkt = kkt_from_working(x, st, ws, w, y, alpha, lambda);
      conv.kkt_residual = kkt;
      if (kkt < 0.5 * kKktTol || change == 0.0) {
        conv.converged = kkt < kKktTol;
        break;
      }
      cd_tol = std::max(cd_tol * 0.1, 1e-12);
    }
    if (outer == kMaxOuter) {
      conv.kkt_residual = kkt_from_working(x, st, ws, w, y, alpha, lambda);
      conv.converged = false;
      return conv;
    }
  }

  // Newton polish of the unpenalized intercept.
  for (int it = 0; it < 50; ++it) {
    double g = 0.0, hess = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
      double p = sigmoid(w.eta[i]);
      g += y[i] - p;
      hess += std::max(p * (1.0 - p), 1e-10);
    }
    if (std::fabs(g / n) < 1e-13) break;
    double step = g / hess;
    w.b0 += step;
    for (std::size_t i = 0; i < x.n; ++i) w.eta[i] += step;
  }
  double final_obj = std_objective(w, y, alpha, lambda);
  if (final_obj <= conv.objective_trace.back()) {
    conv.objective_trace.back() = final_obj;
  }
  conv.kkt_residual = kkt_from_working(x, st, ws, w, y, alpha, lambda);
  conv.converged = conv.converged && conv.kkt_residual < kKktTol;
  return conv;
}

ElasticNetFit destandardize(const Standardization& st, const Working& w,
                            TuningPair tuning, Convergence conv) {
  ElasticNetFit fit;
  fit.tuning = tuning;
  fit.feature_means = st.mean;
  fit.feature_scales = st.scale;
  fit.coefficients.resize(w.b.size(), 0.0);
  double b0 = w.b0;
  for (std::size_t j = 0; j < w.b.size(); ++j) {
    if (st.scale[j] == 0.0) continue;
    fit.coefficients[j] = w.b[j] / st.scale[j];
    b0 -= w.b[j] * st.mean[j] / st.scale[j];
  }
  fit.intercept = b0;
  fit.convergence = std::move(conv);
  return fit;
}

void check_two_classes(std::span<const int> y) {
  bool has0 = false, has1 = false;
  for (int v : y) (v ? has1 : has0) = true;
  if (!has0 || !has1) {
    throw std::invalid_argument("fitting requires both classes in y");
  }
}

}  // namespace

double objective(double intercept, std::span<const double> beta,
                 const Design& x, std::span<const int> y, double alpha,
                 double lambda) {
  if (beta.size() != x.k()) throw std::invalid_argument("beta length != columns");
  check_dims(x, y);
  return smooth_objective(intercept, beta, x, y) + penalty(beta, alpha, lambda);
}

double smooth_objective(double intercept, std::span<const double> beta,
                        const Design& x, std::span<const int> y) {
  std::vector<double> eta(x.n, intercept);
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (beta[j] == 0.0) continue;
    const auto& col = x.columns[j];
    for (std::size_t i = 0; i < x.n; ++i) {
      if (col[i]) eta[i] += beta[j];
    }
  }
  return nll_from_eta(eta, y);
}

void smooth_gradient(double intercept, std::span<const double> beta,
                     const Design& x, std::span<const int> y,
                     double* intercept_grad, std::vector<double>& beta_grad) {
  const double n = static_cast<double>(x.n);
  std::vector<double> eta(x.n, intercept);
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (beta[j] == 0.0) continue;
    const auto& col = x.columns[j];
    for (std::size_t i = 0; i < x.n; ++i) {
      if (col[i]) eta[i] += beta[j];
    }
  }
  std::vector<double> resid(x.n);
  double g0 = 0.0;
  for (std::size_t i = 0; i < x.n; ++i) {
    resid[i] = y[i] - sigmoid(eta[i]);
    g0 += resid[i];
  }
  *intercept_grad = -g0 / n;
  beta_grad.assign(x.k(), 0.0);
  for (std::size_t j = 0; j < x.k(); ++j) {
    const auto& col = x.columns[j];
    double dot = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
      if (col[i]) dot += resid[i];
    }
    beta_grad[j] = -dot / n;
  }
}

std::vector<double> lambda_path(const Design& x, std::span<const int> y,
                                double alpha, int n_lambda, double min_ratio) {
  if (n_lambda < 2) throw std::invalid_argument("n_lambda must be >= 2");
  check_dims(x, y);
  Standardization st = standardize(x);
  double ybar = mean_label(y);
  double best = 0.0;
  for (std::size_t j = 0; j < x.k(); ++j) {
    if (st.scale[j] == 0.0) continue;
    double sum1 = 0.0;  // sum of (y - ybar) over rows with x = 1
    const auto& col = x.columns[j];
    for (std::size_t i = 0; i < x.n; ++i) {
      if (col[i]) sum1 += y[i] - ybar;
    }
    double dot = (1.0 / st.scale[j]) * sum1;  // <x_std_j, y - ybar>
    best = std::max(best, std::fabs(dot));
  }
  if (best == 0.0) {
    throw std::invalid_argument("lambda path undefined: every column is constant");
  }
  double lambda_max = best / (x.n * std::max(alpha, 0.001));
  std::vector<double> path(n_lambda);
  double log_max = std::log(lambda_max);
  double log_min = std::log(lambda_max * min_ratio);
  for (int i = 0; i < n_lambda; ++i) {
    path[i] = std::exp(log_max + (log_min - log_max) * i / (n_lambda - 1));
  }
  return path;
}

ElasticNetFit fit(const Design& x, std::span<const int> y, TuningPair tuning) {
  check_dims(x, y);
  check_two_classes(y);
  Standardization st = standardize(x);
  Working w;
  w.b0 = std::log(clamp_prob(mean_label(y)) / (1.0 - clamp_prob(mean_label(y))));
  w.b.assign(x.k(), 0.0);
  Workspace ws(x, st);
  Scratch scr(x.n, x.k());
  Convergence conv =
      fit_standardized(x, y, st, ws, tuning.alpha, tuning.lambda, w, scr);
  return destandardize(st, w, tuning, std::move(conv));
}

std::vector<ElasticNetFit> fit_path(const Design& x, std::span<const int> y,
                                    double alpha,
                                    std::span<const double> lambdas) {
  check_dims(x, y);
  check_two_classes(y);
  Standardization st = standardize(x);
  Workspace ws(x, st);
  Working w;
  double yb = clamp_prob(mean_label(y));
  w.b0 = std::log(yb / (1.0 - yb));
  w.b.assign(x.k(), 0.0);
  Scratch scr(x.n, x.k());
  std::vector<ElasticNetFit> fits;
  fits.reserve(lambdas.size());
  for (double lambda : lambdas) {
    Convergence conv = fit_standardized(x, y, st, ws, alpha, lambda, w, scr);
    fits.push_back(destandardize(st, w, {alpha, lambda}, std::move(conv)));
  }
  return fits;
}

double predict_prob_linear(double intercept, std::span<const double> beta,
                           std::span<const std::uint8_t> x) {
  if (beta.size() != x.size()) {
    throw std::invalid_argument("feature vector length != coefficient length");
  }
  double eta = intercept;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (x[j]) eta += beta[j];
  }
  return sigmoid(eta);
}

double predict_prob(const ElasticNetFit& fit, std::span<const std::uint8_t> x) {
  return predict_prob_linear(fit.intercept, fit.coefficients, x);
}

double kkt_residual(const ElasticNetFit& fit, const Design& x,
                    std::span<const int> y) {
  Standardization st{fit.feature_means, fit.feature_scales};
  Working w;
  w.b.resize(fit.coefficients.size());
  double b0 = fit.intercept;
  for (std::size_t j = 0; j < w.b.size(); ++j) {
    w.b[j] = fit.coefficients[j] * st.scale[j];
    b0 += fit.coefficients[j] * st.mean[j];
  }
  w.b0 = b0;
  Workspace ws(x, st);
  recompute_eta(x, st, ws, w);
  return kkt_from_working(x, st, ws, w, y, fit.tuning.alpha, fit.tuning.lambda);
}

std::vector<int> stratified_folds(std::span<const int> y, int k_folds,
                                  std::uint64_t seed) {
  std::vector<int> fold(y.size(), -1);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    Rng rng(derive_seed(seed, {"folds", cls == 0 ? "0" : "1"}));
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold[members[i]] = static_cast<int>(i % k_folds);
    }
  }
  return fold;
}

CvResult cv_select(const Design& x, std::span<const int> y, const CvConfig& cfg) {
  check_dims(x, y);
  check_two_classes(y);
  if (cfg.k_folds < 2) throw std::invalid_argument("k_folds must be >= 2");
  int count[2] = {0, 0};
  for (int v : y) ++count[v];
  if (count[0] < cfg.k_folds || count[1] < cfg.k_folds) {
    throw std::invalid_argument(
        "stratified cross-validation needs every class to have at least "
        "k_folds members");
  }

  std::vector<int> fold = stratified_folds(y, cfg.k_folds, cfg.seed);

  CvResult result;
  std::vector<std::vector<double>> alpha_paths;
  // (alpha, lambda) grid losses; per-fold sums kept for the 1-SE option.
  struct Cell {
    double nll_sum = 0.0;
    std::vector<double> fold_mean;
  };
  std::vector<std::vector<Cell>> grid(cfg.alpha_grid.size());

  // Fold training designs and held-out structure are alpha-independent;
  // build them once.
  struct FoldData {
    Design xtr;
    std::vector<int> ytr;
    std::vector<std::size_t> held;
    std::vector<std::vector<std::uint32_t>> held_ones;
    Standardization st;
    std::unique_ptr<Workspace> ws;
  };
  std::vector<FoldData> folds(cfg.k_folds);
  for (int f = 0; f < cfg.k_folds; ++f) {
    FoldData& fd = folds[f];
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (fold[i] == f) {
        fd.held.push_back(i);
      } else {
        fd.ytr.push_back(y[i]);
      }
    }
    fd.xtr.n = fd.ytr.size();
    fd.xtr.columns.resize(x.k());
    for (std::size_t j = 0; j < x.k(); ++j) {
      auto& col = fd.xtr.columns[j];
      col.reserve(fd.xtr.n);
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (fold[i] != f) col.push_back(x.columns[j][i]);
      }
    }
    fd.held_ones.resize(fd.held.size());
    for (std::size_t h = 0; h < fd.held.size(); ++h) {
      for (std::size_t j = 0; j < x.k(); ++j) {
        if (x.columns[j][fd.held[h]]) {
          fd.held_ones[h].push_back(static_cast<std::uint32_t>(j));
        }
      }
    }
    fd.st = standardize(fd.xtr);
    fd.ws = std::make_unique<Workspace>(fd.xtr, fd.st);
  }

  std::vector<double> coef(x.k());
  for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
    double alpha = cfg.alpha_grid[ai];
    std::vector<double> lams =
        lambda_path(x, y, alpha, cfg.n_lambda, cfg.min_ratio);
    grid[ai].resize(lams.size());
    for (auto& cell : grid[ai]) cell.fold_mean.resize(cfg.k_folds, 0.0);

    for (int f = 0; f < cfg.k_folds; ++f) {
      FoldData& fd = folds[f];
      Working w;
      double yb = clamp_prob(mean_label(fd.ytr));
      w.b0 = std::log(yb / (1.0 - yb));
      w.b.assign(x.k(), 0.0);
      Scratch scr(fd.xtr.n, x.k());
      for (std::size_t li = 0; li < lams.size(); ++li) {
        fit_standardized(fd.xtr, fd.ytr, fd.st, *fd.ws, alpha, lams[li], w,
                         scr);
        // Original-scale view of the iterate for held-out predictions.
        double c0 = w.b0;
        for (std::size_t j = 0; j < x.k(); ++j) {
          if (fd.st.scale[j] > 0.0) {
            coef[j] = w.b[j] / fd.st.scale[j];
            c0 -= w.b[j] * fd.st.mean[j] / fd.st.scale[j];
          } else {
            coef[j] = 0.0;
          }
        }
        double fold_nll = 0.0;
        for (std::size_t h = 0; h < fd.held.size(); ++h) {
          double eta = c0;
          for (std::uint32_t j : fd.held_ones[h]) eta += coef[j];
          double p = clamp_prob(sigmoid(eta));
          fold_nll -= y[fd.held[h]] ? std::log(p) : std::log1p(-p);
        }
        grid[ai][li].nll_sum += fold_nll;
        grid[ai][li].fold_mean[f] = fold_nll / fd.held.size();
      }
    }
    alpha_paths.push_back(std::move(lams));
  }

  // Assemble the curve and pick the minimizer (ties: larger lambda, then
  // smaller alpha).
  int best_ai = -1, best_li = -1;
  double best_nll = 0.0;
  for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
    for (std::size_t li = 0; li < alpha_paths[ai].size(); ++li) {
      double mean_nll = grid[ai][li].nll_sum / y.size();
      result.curve.push_back({cfg.alpha_grid[ai], alpha_paths[ai][li], mean_nll,
                              cfg.k_folds});
      bool better;
      if (best_ai < 0) {
        better = true;
      } else if (mean_nll != best_nll) {
        better = mean_nll < best_nll;
      } else if (alpha_paths[ai][li] != alpha_paths[best_ai][best_li]) {
        better = alpha_paths[ai][li] > alpha_paths[best_ai][best_li];
      } else {
        better = cfg.alpha_grid[ai] < cfg.alpha_grid[best_ai];
      }
      if (better) {
        best_ai = static_cast<int>(ai);
        best_li = static_cast<int>(li);
        best_nll = mean_nll;
      }
    }
  }

  if (cfg.one_se_rule) {
    // Largest lambda on the winning alpha's path within one standard error
    // of the minimum.
    const auto& cells = grid[best_ai];
    const auto& fm = cells[best_li].fold_mean;
    double m = 0.0;
    for (double v : fm) m += v;
    m /= fm.size();
    double var = 0.0;
    for (double v : fm) var += (v - m) * (v - m);
    double se = std::sqrt(var / (fm.size() - 1)) / std::sqrt(double(fm.size()));
    double limit = best_nll + se;
    for (std::size_t li = 0; li < cells.size(); ++li) {
      if (cells[li].nll_sum / y.size() <= limit) {
        best_li = static_cast<int>(li);
        break;
      }
    }
  }

  result.selected = {cfg.alpha_grid[best_ai], alpha_paths[best_ai][best_li]};
  std::span<const double> prefix(alpha_paths[best_ai].data(), best_li + 1);
  std::vector<ElasticNetFit> fits =
      fit_path(x, y, result.selected.alpha, prefix);
  result.fit = std::move(fits.back());
  return result;
}

}  // namespace songprint
