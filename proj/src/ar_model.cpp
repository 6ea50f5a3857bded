#include "actorcast/ar_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace actorcast {

namespace {

// Fits closer than this fraction of the total variation count as exact, so that
// noiseless series do not reward extra lags for rounding noise.
constexpr double kExactFitFraction = 1e-20;
constexpr double kRankThreshold = 1e-9;

}  // namespace

ArFit fit_ar_on_differences(std::span<const double> levels, int p_max) {
  if (p_max < 0) throw std::invalid_argument("fit_ar_on_differences: p_max must be >= 0");
  if (levels.size() < static_cast<size_t>(p_max) + 10) {
    throw std::invalid_argument("fit_ar_on_differences: need at least p_max + 10 observations, got " +
                                std::to_string(levels.size()));
  }
  std::vector<double> diff(levels.size() - 1);
  for (size_t t = 1; t < levels.size(); ++t) diff[t - 1] = levels[t] - levels[t - 1];

  const size_t start = static_cast<size_t>(p_max);
  const size_t m = diff.size() - start;
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (size_t i = 0; i < m; ++i) y(static_cast<Eigen::Index>(i)) = diff[start + i];
  const double y_mean = y.mean();
  const double sst = (y.array() - y_mean).square().sum();
  const double sse_floor = std::max(kExactFitFraction * sst, std::numeric_limits<double>::min());

  ArFit best;
  bool have_best = false;
  std::vector<std::string> warnings;
  for (int p = 0; p <= p_max; ++p) {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(m), p + 1);
    for (size_t i = 0; i < m; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      design(row, 0) = 1.0;
      for (int j = 0; j < p; ++j) design(row, j + 1) = diff[start + i - 1 - static_cast<size_t>(j)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < p + 1) {
      warnings.push_back("AR(" + std::to_string(p) + ") design is singular; order skipped");
      continue;
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const double sse = (y - design * beta).squaredNorm();
    const double md = static_cast<double>(m);
    const double aic = md * std::log(std::max(sse, sse_floor) / md) + 2.0 * (p + 1);
    if (!have_best || aic < best.aic) {
      have_best = true;
      best.order = p;
      best.intercept = beta(0);
      best.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
      best.aic = aic;
      best.sigma2 = sse / md;
    }
  }
  best.warnings = std::move(warnings);
  return best;
}

double ar_forecast_next_difference(const ArFit& fit, std::span<const double> recent_diffs) {
  if (recent_diffs.size() < static_cast<size_t>(fit.order)) {
    throw std::invalid_argument("ar_forecast_next_difference: not enough history");
  }
  double value = fit.intercept;
  for (int j = 0; j < fit.order; ++j) value += fit.coefficients[static_cast<size_t>(j)] * recent_diffs[static_cast<size_t>(j)];
  return value;
}

}  // namespace actorcast
