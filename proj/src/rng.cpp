#include "songprint/rng.hpp"

namespace songprint {

std::int64_t binomial_draw(Rng& rng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;

  const double n = static_cast<double>(trials);
  const std::int64_t mode =
      std::min(trials, static_cast<std::int64_t>((n + 1) * p));
  double log_pmf_mode = std::lgamma(n + 1) - std::lgamma(mode + 1.0) -
                        std::lgamma(n - mode + 1.0) + mode * std::log(p) +
                        (n - mode) * std::log1p(-p);
  const double ratio = p / (1.0 - p);

  double u = rng.uniform();
  double up_pmf = std::exp(log_pmf_mode);
  double down_pmf = up_pmf;
  std::int64_t up = mode, down = mode;

  u -= up_pmf;
  if (u <= 0.0) return mode;
  while (up < trials || down > 0) {
    if (up < trials) {
      up_pmf *= (n - up) / (up + 1.0) * ratio;
      ++up;
      u -= up_pmf;
      if (u <= 0.0) return up;
    }
    if (down > 0) {
      down_pmf *= down / (n - down + 1.0) / ratio;
      --down;
      u -= down_pmf;
      if (u <= 0.0) return down;
    }
  }
  return mode;  // rounding exhausted the mass
}

}  // namespace songprint
