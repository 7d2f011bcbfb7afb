#include "wigner/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wigner::stats {

namespace {

// Continued-fraction kernel of the incomplete beta function (modified
// Lentz iteration).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kFloor = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFloor) d = kFloor;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFloor) d = kFloor;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFloor) c = kFloor;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFloor) d = kFloor;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFloor) c = kFloor;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction stalled");
}

// Smallest p in [0, 1] with I_p(a, b) >= target, by bisection. Monotone and
// deterministic; 100 halvings pin the result to full double resolution.
double beta_quantile(double a, double b, double target) {
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

EstimateWithCI tail_probability(std::size_t events, std::size_t samples, double confidence) {
  if (samples == 0) throw std::invalid_argument("tail_probability: zero samples");
  if (events > samples) throw std::invalid_argument("tail_probability: events exceed samples");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("tail_probability: confidence must lie in (0, 1)");
  }
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(events);
  const double n = static_cast<double>(samples);

  EstimateWithCI out;
  out.n_samples = samples;
  out.n_events = events;
  out.point = k / n;
  out.lo = events == 0 ? 0.0 : beta_quantile(k, n - k + 1.0, alpha / 2.0);
  out.hi = events == samples ? 1.0 : beta_quantile(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return out;
}

EstimateWithCI mean_with_ci(const std::vector<double>& values, double confidence) {
  if (values.empty()) throw std::invalid_argument("mean_with_ci: need at least 1 value");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("mean_with_ci: confidence must lie in (0, 1)");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ssq = 0.0;
  for (const double v : values) ssq += (v - mean) * (v - mean);
  // A single value carries no spread information; report a degenerate interval.
  const double stderr_mean = values.size() > 1 ? std::sqrt(ssq / (n - 1.0) / n) : 0.0;

  // Two-sided normal quantile via the beta quantile of a symmetric split is
  // overkill; the familiar 95% constant covers the only level used in
  // anger, and other levels fall back to a rational approximation.
  double zq;
  if (std::abs(confidence - 0.95) < 1e-12) {
    zq = 1.959963984540054;
  } else {
    // Acklam-style inverse normal, adequate for reporting intervals.
    const double p = 0.5 + 0.5 * confidence;
    const double t = std::sqrt(-2.0 * std::log1p(-p));
    zq = t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t);
  }

  EstimateWithCI out;
  out.n_samples = values.size();
  out.point = mean;
  out.lo = mean - zq * stderr_mean;
  out.hi = mean + zq * stderr_mean;
  return out;
}

ExponentFit fit_log_log(const std::vector<double>& epsilon,
                        const std::vector<std::size_t>& events, std::size_t n_samples,
                        std::size_t min_events) {
  if (epsilon.size() != events.size()) {
    throw std::invalid_argument("fit_log_log: grid and event vectors differ in length");
  }
  if (n_samples == 0) throw std::invalid_argument("fit_log_log: zero samples");

  ExponentFit fit;
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < epsilon.size(); ++i) {
    if (events[i] < min_events) continue;
    if (!(epsilon[i] > 0.0)) {
      throw std::invalid_argument("fit_log_log: grid values must be positive");
    }
    const double p = static_cast<double>(events[i]) / static_cast<double>(n_samples);
    xs.push_back(std::log(epsilon[i]));
    ys.push_back(std::log(p));
    // Inverse variance of log p-hat under binomial sampling.
    ws.push_back(static_cast<double>(events[i]) / std::max(1.0 - p, 1e-12));
  }
  fit.bins_used = xs.size();
  if (fit.bins_used < 3) {
    fit.diagnostic = "fit refused: " + std::to_string(fit.bins_used) +
                     " usable bins (need >= 3 with >= " + std::to_string(min_events) +
                     " events)";
    return fit;
  }
  // Identical abscissas would survive the sxx > 0 test on rounding noise
  // alone, so degeneracy is detected structurally.
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  if (*xmin == *xmax) {
    fit.diagnostic = "fit refused: degenerate grid (all usable bins share one epsilon)";
    return fit;
  }

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    swx += ws[i] * xs[i];
    swy += ws[i] * ys[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += ws[i] * dx * dx;
    sxy += ws[i] * dx * dy;
    syy += ws[i] * dy * dy;
  }
  if (sxx <= 0.0) {
    fit.diagnostic = "fit refused: degenerate grid (all usable bins share one epsilon)";
    return fit;
  }

  fit.ok = true;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_stderr = std::sqrt(1.0 / sxx);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace wigner::stats
