#pragma once

#include <span>
#include <string>
#include <vector>

namespace actorcast {

/// AR(p) with intercept on first differences of a level series.
struct ArFit {
  int order = 0;
  double intercept = 0.0;
  std::vector<double> coefficients;  // coefficients[j] multiplies diff[t-1-j]
  double aic = 0.0;
  double sigma2 = 0.0;               // SSE / effective sample size
  std::vector<std::string> warnings;

  friend bool operator==(const ArFit&, const ArFit&) = default;
};

/// OLS fit for every p in 0..p_max on a common sample (the first p_max differences
/// are only used as regressors), picking the lowest AIC = m*ln(SSE/m) + 2(p+1); ties
/// keep the smaller order. Orders whose design is rank deficient are skipped with a
/// warning, so the worst case is the drift-only p = 0 model.
/// Requires levels.size() >= p_max + 10; throws std::invalid_argument otherwise.
ArFit fit_ar_on_differences(std::span<const double> levels, int p_max = 5);

/// One-step forecast of the next difference. `recent_diffs` lists the latest
/// differences with the most recent first and must hold at least `order` values.
double ar_forecast_next_difference(const ArFit& fit, std::span<const double> recent_diffs);

}  // namespace actorcast
