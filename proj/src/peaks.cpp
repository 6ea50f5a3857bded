#include "actorcast/peaks.hpp"

#include <algorithm>
#include <stdexcept>

namespace actorcast {

namespace {

double side_minimum(std::span<const double> x, size_t peak, int step) {
  double lowest = x[peak];
  for (long i = static_cast<long>(peak); i >= 0 && i < static_cast<long>(x.size()); i += step) {
    if (x[static_cast<size_t>(i)] > x[peak]) break;
    lowest = std::min(lowest, x[static_cast<size_t>(i)]);
  }
  return lowest;
}

struct Candidate {
  size_t index;
  double prominence;
};

std::vector<size_t> select(std::vector<Candidate> candidates, const PeakOptions& options) {
  if (options.min_distance < 1) throw std::invalid_argument("find_peaks: min_distance must be >= 1");
  if (options.prominence_threshold) {
    std::erase_if(candidates, [&](const Candidate& c) { return c.prominence < *options.prominence_threshold; });
  }
  std::vector<size_t> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return candidates[a].prominence > candidates[b].prominence;
  });
  std::vector<bool> removed(candidates.size(), false);
  std::vector<size_t> kept;
  for (size_t k : order) {
    if (removed[k]) continue;
    kept.push_back(candidates[k].index);
    for (size_t j = 0; j < candidates.size(); ++j) {
      if (j == k || removed[j]) continue;
      const size_t a = candidates[j].index, b = candidates[k].index;
      if ((a > b ? a - b : b - a) < options.min_distance) removed[j] = true;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<Candidate> strict_maxima(std::span<const double> x) {
  std::vector<Candidate> out;
  for (size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i - 1] < x[i] && x[i] > x[i + 1]) out.push_back({i, peak_prominence(x, i)});
  }
  return out;
}

}  // namespace

double peak_prominence(std::span<const double> x, size_t peak) {
  const double left = side_minimum(x, peak, -1);
  const double right = side_minimum(x, peak, +1);
  return x[peak] - std::max(left, right);
}

std::vector<size_t> find_peaks(std::span<const double> x, const PeakOptions& options) {
  return select(strict_maxima(x), options);
}

std::vector<double> peak_indicator(std::span<const double> x, const PeakOptions& options) {
  std::vector<double> out(x.size(), 0.0);
  for (size_t i : find_peaks(x, options)) out[i] = 1.0;
  return out;
}

std::vector<double> causal_peak_indicator(std::span<const double> x, const PeakOptions& options) {
  std::vector<double> out(x.size(), 0.0);
  for (size_t t = 1; t < x.size(); ++t) {
    if (!(x[t - 1] < x[t])) continue;
    const auto prefix = x.first(t + 1);
    std::vector<Candidate> candidates = strict_maxima(prefix);
    candidates.push_back({t, x[t] - side_minimum(prefix, t, -1)});
    const auto kept = select(std::move(candidates), options);
    if (!kept.empty() && kept.back() == t) out[t] = 1.0;
  }
  return out;
}

}  // namespace actorcast
