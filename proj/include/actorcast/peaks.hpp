#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace actorcast {

struct PeakOptions {
  size_t min_distance = 7;
  std::optional<double> prominence_threshold;
};

/// Topographic prominence of x[peak]: walk each side until a strictly higher sample
/// or the boundary, take the lowest point passed on each side, and measure the peak
/// against the higher of the two.
double peak_prominence(std::span<const double> x, size_t peak);

/// Indices of retained peaks, ascending. Candidates are strict local maxima
/// (x[i-1] < x[i] > x[i+1]); peaks below the prominence threshold are removed; then,
/// visiting peaks by descending prominence (ties: earlier index), each kept peak
/// suppresses all others fewer than min_distance positions away.
std::vector<size_t> find_peaks(std::span<const double> x, const PeakOptions& options = {});

/// 0/1 indicator of find_peaks over the whole series. Uses future values.
std::vector<double> peak_indicator(std::span<const double> x, const PeakOptions& options = {});

/// Causal indicator: position t is 1 iff t is retained when peaks are detected on
/// x[0..t] alone, with the open right end accepted as a provisional peak when
/// x[t-1] < x[t] and its prominence measured against the left side only.
std::vector<double> causal_peak_indicator(std::span<const double> x, const PeakOptions& options = {});

}  // namespace actorcast
