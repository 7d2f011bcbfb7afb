#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wigner::stats {

struct EstimateWithCI {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_events = 0;
};

// Regularized incomplete beta function I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Clopper-Pearson exact binomial interval at the given confidence level.
// Exact coverage matters here because tail experiments routinely sit at
// zero or near-zero event counts, where normal approximations collapse.
EstimateWithCI tail_probability(std::size_t events, std::size_t samples,
                                double confidence = 0.95);

// Mean with a normal-approximation interval, for moment estimates.
EstimateWithCI mean_with_ci(const std::vector<double>& values, double confidence = 0.95);

// Weighted least squares of log p against log epsilon. Only bins with at
// least min_events events participate; fewer than 3 usable bins refuses the
// fit instead of extrapolating.
struct ExponentFit {
  bool ok = false;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t bins_used = 0;
  std::string diagnostic;
};

ExponentFit fit_log_log(const std::vector<double>& epsilon,
                        const std::vector<std::size_t>& events, std::size_t n_samples,
                        std::size_t min_events = 20);

}  // namespace wigner::stats
