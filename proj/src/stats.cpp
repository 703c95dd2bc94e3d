#include "panelshock/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "panelshock/errors.hpp"

namespace panelshock {

double quantile(std::vector<double> sample, double prob) {
  if (sample.empty()) fail(ErrorCategory::EmptySample, "quantile of empty sample");
  if (prob <= 0.0) return *std::min_element(sample.begin(), sample.end());
  if (prob >= 1.0) return *std::max_element(sample.begin(), sample.end());
  std::sort(sample.begin(), sample.end());
  const double pos = prob * static_cast<double>(sample.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + frac * (sample[lo + 1] - sample[lo]);
}

double mean(const std::vector<double>& sample) {
  if (sample.empty()) fail(ErrorCategory::EmptySample, "mean of empty sample");
  double sum = 0.0;
  for (double x : sample) sum += x;
  return sum / static_cast<double>(sample.size());
}

double sample_sd(const std::vector<double>& sample) {
  if (sample.size() < 2) fail(ErrorCategory::EmptySample, "sd needs at least 2 points");
  const double m = mean(sample);
  double ss = 0.0;
  for (double x : sample) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(sample.size() - 1));
}

}  // namespace panelshock
