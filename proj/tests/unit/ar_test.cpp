#include <gtest/gtest.h>

#include <cmath>

#include "actorcast/ar_model.hpp"
#include "actorcast/rng.hpp"

using namespace actorcast;

namespace {

// Normal equations with partial-pivot elimination in long double.
std::vector<long double> ols(const std::vector<std::vector<long double>>& xs, const std::vector<long double>& y) {
  const size_t k = xs[0].size();
  std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t r = 0; r < k; ++r) {
      for (size_t c = 0; c < k; ++c) a[r][c] += xs[i][r] * xs[i][c];
      a[r][k] += xs[i][r] * y[i];
    }
  }
  for (size_t c = 0; c < k; ++c) {
    size_t piv = c;
    for (size_t r = c + 1; r < k; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<long double> beta(k);
  for (size_t r = 0; r < k; ++r) beta[r] = a[r][k] / a[r][r];
  return beta;
}

struct OracleFit {
  std::vector<long double> beta;
  long double aic;
};

OracleFit oracle_fit(const std::vector<double>& levels, int p, int p_max) {
  std::vector<double> d;
  for (size_t t = 1; t < levels.size(); ++t) d.push_back(levels[t] - levels[t - 1]);
  std::vector<std::vector<long double>> xs;
  std::vector<long double> y;
  for (size_t t = static_cast<size_t>(p_max); t < d.size(); ++t) {
    std::vector<long double> row = {1.0L};
    for (int j = 1; j <= p; ++j) row.push_back(d[t - static_cast<size_t>(j)]);
    xs.push_back(row);
    y.push_back(d[t]);
  }
  OracleFit f{ols(xs, y), 0.0L};
  long double sse = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    long double e = y[i];
    for (size_t j = 0; j < f.beta.size(); ++j) e -= f.beta[j] * xs[i][j];
    sse += e * e;
  }
  const long double m = static_cast<long double>(xs.size());
  f.aic = m * std::log(sse / m) + 2.0L * (p + 1);
  return f;
}

std::vector<double> simulate(std::uint64_t seed, size_t n, const std::vector<double>& phi, double c) {
  Rng rng(seed);
  std::vector<double> d(n, 0.0), level(n + 1, 100.0);
  for (size_t t = 0; t < n; ++t) {
    double v = c + rng.normal();
    for (size_t j = 0; j < phi.size() && j < t; ++j) v += phi[j] * d[t - 1 - j];
    d[t] = v;
    level[t + 1] = level[t] + v;
  }
  return level;
}

}  // namespace

TEST(Ar, MatchesOlsOracleAndAicSelection) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto levels = simulate(seed, 150, {0.5, -0.3}, 0.2);
    const ArFit fit = fit_ar_on_differences(levels, 5);
    int best_p = 0;
    OracleFit best = oracle_fit(levels, 0, 5);
    for (int p = 1; p <= 5; ++p) {
      const OracleFit f = oracle_fit(levels, p, 5);
      if (f.aic < best.aic) {
        best = f;
        best_p = p;
      }
    }
    ASSERT_EQ(fit.order, best_p) << "seed " << seed;
    EXPECT_NEAR(fit.intercept, static_cast<double>(best.beta[0]), 1e-8);
    for (int j = 0; j < best_p; ++j) {
      EXPECT_NEAR(fit.coefficients[static_cast<size_t>(j)], static_cast<double>(best.beta[static_cast<size_t>(j) + 1]),
                  1e-8);
    }
    EXPECT_NEAR(fit.aic, static_cast<double>(best.aic), 1e-6);
  }
}

TEST(Ar, RecoversKnownProcess) {
  const auto levels = simulate(11, 4000, {0.6}, 0.0);
  const ArFit fit = fit_ar_on_differences(levels, 3);
  ASSERT_GE(fit.order, 1);
  EXPECT_NEAR(fit.coefficients[0], 0.6, 0.05);
  EXPECT_NEAR(fit.sigma2, 1.0, 0.1);
}

TEST(Ar, LinearTrendIsDriftOnly) {
  std::vector<double> levels;
  for (int t = 0; t < 40; ++t) levels.push_back(3.0 + 2.5 * t);
  const ArFit fit = fit_ar_on_differences(levels, 5);
  EXPECT_EQ(fit.order, 0);
  EXPECT_NEAR(fit.intercept, 2.5, 1e-12);
  EXPECT_NEAR(ar_forecast_next_difference(fit, {}), 2.5, 1e-12);
  // Higher orders are singular on a constant difference series.
  EXPECT_EQ(fit.warnings.size(), 5u);
}

TEST(Ar, Forecast) {
  ArFit fit;
  fit.order = 2;
  fit.intercept = 1.0;
  fit.coefficients = {0.5, -0.25};
  const std::vector<double> recent = {4.0, 8.0, 100.0};
  EXPECT_DOUBLE_EQ(ar_forecast_next_difference(fit, recent), 1.0 + 2.0 - 2.0);
  EXPECT_THROW(ar_forecast_next_difference(fit, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Ar, TooShort) {
  EXPECT_THROW(fit_ar_on_differences(std::vector<double>(14, 1.0), 5), std::invalid_argument);
  EXPECT_NO_THROW(fit_ar_on_differences(simulate(1, 15, {}, 0.0), 5));
}
