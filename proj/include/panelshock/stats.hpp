#ifndef PANELSHOCK_STATS_HPP
#define PANELSHOCK_STATS_HPP

#include <vector>

namespace panelshock {

// Linear-interpolation quantile (R type 7) on an unsorted sample.
// Deterministic for a fixed sample order: the copy is fully sorted first.
double quantile(std::vector<double> sample, double prob);

double mean(const std::vector<double>& sample);
double sample_sd(const std::vector<double>& sample);

}  // namespace panelshock

#endif
