#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigner/ensemble.hpp"
#include "wigner/spectral.hpp"
#include "wigner/stats.hpp"

namespace wigner::mc {

// Invalid experiment parameters; message names the violated constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a run cannot produce trustworthy output (for example the
// solver failure rate crossed the abort threshold).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::size_t n = 128;
  ensemble::EntryDistributionSpec entry_spec{};
  std::size_t n_samples = 1000;
  std::uint64_t master_seed = 1;
  double energy = 0.0;
  std::vector<double> grid{};      // per-experiment meaning: eta, epsilon, K, M or delta values
  int repulsion_order = 2;         // k; doubles as the index-set size of the xi tail
  double p_norm = 4.0;
  double delta = 0.1;              // exceedance threshold for the concentration tables
  double kappa = 0.5;              // bulk margin: energies must satisfy |E| <= 2 - kappa
  std::size_t workers = 0;         // 0 resolves to hardware concurrency
};

void validate_config(const ExperimentConfig& config);
std::size_t resolve_workers(std::size_t requested);

enum class SampleStatus { kUsed, kCensored, kFailed };

// Fixed-record sample store. Workers write disjoint rows indexed by sample,
// and every aggregation folds rows in sample order, so results are byte
// identical for any worker count.
struct SampleBatch {
  std::size_t record_len = 0;
  std::vector<SampleStatus> status;
  std::vector<double> values;  // n_samples rows of record_len

  const double* row(std::size_t index) const { return values.data() + index * record_len; }
  std::size_t count(SampleStatus s) const;
};

// reducer(index, out) fills out[0..record_len). A SolverError inside the
// reducer marks the sample failed; more than 0.1% failures aborts.
using FixedReducer = std::function<SampleStatus(std::size_t index, double* out)>;
SampleBatch run_samples(const ExperimentConfig& config, std::size_t record_len,
                        const FixedReducer& reducer);

// Variable-record variant for per-eigenvector statistics.
struct VarSampleBatch {
  std::vector<SampleStatus> status;
  std::vector<std::vector<double>> values;
  std::size_t count(SampleStatus s) const;
};
using VarReducer = std::function<SampleStatus(std::size_t index, std::vector<double>& out)>;
VarSampleBatch run_samples_var(const ExperimentConfig& config, const VarReducer& reducer);

// ---- Experiment suites ----

struct SemicircleRow {
  double eta = 0.0;
  std::complex<double> mean_m;
  stats::EstimateWithCI m_exceed;      // P(|m - m_sc| >= delta)
  stats::EstimateWithCI count_exceed;  // P(|N_I/(n eta) - rho_sc(E)| >= delta)
};
struct SemicircleResult {
  std::vector<SemicircleRow> rows;
  double delta = 0.0;
  std::size_t n_samples = 0;
};
// Concentration of the Stieltjes transform and of eigenvalue counts at the
// grid of resolution scales eta.
SemicircleResult semicircle_concentration(const ExperimentConfig& config);

struct WegnerRow {
  double epsilon = 0.0;
  stats::EstimateWithCI mean_ni;
  stats::EstimateWithCI mean_ni_sq;
  stats::EstimateWithCI mean_ni_k;   // k-th moment, k = repulsion_order
  double neta_mean_m_sq = 0.0;       // (n eta) E|m(E + i eps/n)|^2
};
struct WegnerResult {
  std::vector<WegnerRow> rows;
  double ratio_max_over_min = 0.0;   // of E N_I^2 / epsilon across the grid
  double ratio_lo = 0.0, ratio_hi = 0.0;  // bootstrap interval
  std::size_t n_samples = 0;
};
// Micro-interval moments at widths epsilon/n around E.
WegnerResult wegner_moments(const ExperimentConfig& config);

struct RepulsionRow {
  double epsilon = 0.0;
  stats::EstimateWithCI p_ge_k;
};
struct RepulsionResult {
  std::vector<RepulsionRow> rows;
  stats::ExponentFit fit;
  int k = 2;
  std::size_t n_samples = 0;
  SampleBatch counts;  // raw N_I per grid point, reusable for other orders
};
// P(N_I >= k) across interval widths epsilon/n with a log-log slope fit.
RepulsionResult repulsion_fit(const ExperimentConfig& config);
// Re-reduce an existing run at a different order without resampling. The
// per-sample counts pin the result to exactly what a rerun would produce.
RepulsionResult refit_repulsion(const RepulsionResult& base, int k);

struct GapTailRow {
  double big_k = 0.0;
  stats::EstimateWithCI p_exceed;
};
struct GapTailResult {
  std::vector<GapTailRow> rows;
  std::size_t used = 0, censored = 0, failed = 0;
};
// Distribution of n (mu_{a+1} - E) where mu_a is the top eigenvalue at or
// below E. Samples with no eigenvalue on one side of E are censored.
GapTailResult gap_tail(const ExperimentConfig& config);

struct DelocalizationQuantileRow {
  double quantile = 0.0;
  double sup_norm_scaled = 0.0;  // sqrt(n) ||v||_inf
  double p_norm_scaled = 0.0;    // n^(1/2 - 1/p) ||v||_p
};
struct DelocalizationResult {
  std::vector<DelocalizationQuantileRow> quantiles;
  std::vector<GapTailRow> exceedance;  // P(sqrt(n) ||v||_inf >= M) rows keyed by M
  std::size_t n_vectors = 0;
  std::size_t n_samples = 0;
  double interval_width = 0.0;
};
// Sup- and p-norm statistics of eigenvectors with eigenvalue in a window
// around E. interval_width <= 0 selects the default width 8/n.
DelocalizationResult delocalization_stats(const ExperimentConfig& config,
                                          double interval_width = 0.0);

struct XiTailRow {
  double delta = 0.0;
  stats::EstimateWithCI p_le;
};
struct XiTailResult {
  std::vector<XiTailRow> rows;
  stats::ExponentFit fit;
  std::size_t m = 0;
  std::size_t n_samples = 0;
};
// Lower tail of the averaged spectral weight over the m eigenvalues of the
// first minor closest to E. m comes from repulsion_order.
XiTailResult xi_lower_tail(const ExperimentConfig& config);

struct XiMeanResult {
  stats::EstimateWithCI xi_mean;    // over all (sample, alpha) pairs
  stats::EstimateWithCI x_stat_re;  // centred resolvent sum at z = E + i eta
  stats::EstimateWithCI x_stat_im;
  std::size_t n_pairs = 0;
  double eta = 0.0;
};
// Concentration of the spectral weights: E xi = 1 and E X = 0. eta is taken
// from grid[0] (default 0.5).
XiMeanResult xi_concentration(const ExperimentConfig& config);

struct HansonWrightRow {
  double delta = 0.0;
  stats::EstimateWithCI p_exceed;
  double envelope = 0.0;  // 4 exp(-c_hat min(delta/A, delta^2/A^2))
};
struct HansonWrightResult {
  std::vector<HansonWrightRow> rows;
  double fitted_c = 0.0;
  double hs_norm = 0.0;  // A = Hilbert-Schmidt norm of the kernel
  bool tails_monotone = false;
  std::size_t n_samples = 0;
};
// Quadratic-form concentration: X = sum_jk a_jk (b_j conj(b_k) - delta_jk)
// with b drawn entrywise from the off-diagonal law. a_matrix is row-major
// m x m.
HansonWrightResult hanson_wright_trial(const std::vector<std::complex<double>>& a_matrix,
                                       std::size_t m,
                                       const ensemble::EntryDistributionSpec& spec,
                                       std::size_t n_samples,
                                       const std::vector<double>& delta_grid,
                                       std::uint64_t seed, std::size_t workers);

struct IdentityCheckRow {
  std::string check;
  std::size_t n_evaluated = 0;
  std::size_t n_violations = 0;
  double worst = 0.0;  // largest excess over the allowed slack
};
struct ValidationResult {
  std::vector<IdentityCheckRow> rows;
  std::size_t n_samples = 0;
  bool all_ok() const;
};
// Deterministic identity suite over sampled matrices: interlacing for every
// minor, the dual-route resolvent identity, the minor Stieltjes gap bound,
// the counting bound, and the overlap completeness relation. z = E + i eta
// with eta from grid[0] (default 0.5).
ValidationResult validate_identities(const ExperimentConfig& config);

struct PerturbationStepRow {
  double step = 0.0;
  double analytic = 0.0;  // |v_alpha(i)|^2 / sqrt(n), the standard first-order term
  double finite_difference = 0.0;
  double observed_constant = 0.0;  // finite_difference * sqrt(n) / |v_alpha(i)|^2
};
struct PerturbationCheck {
  std::vector<PerturbationStepRow> rows;
  double weight = 0.0;             // |v_alpha(i)|^2
  double observed_constant = 0.0;  // from the smallest step
  double neighbor_gap = 0.0;       // min distance from mu_alpha to its neighbors
  bool skipped = false;            // true when mu_alpha is too close to degenerate
  std::string diagnostic;
};
// Measured derivative of mu_alpha with respect to the unscaled diagonal
// entry x_ii, reported as a multiple of |v_alpha(i)|^2 / sqrt(n). The
// constant is reported, not asserted, so competing conventions can be
// settled by measurement.
PerturbationCheck perturbation_gradient_check(const HermitianMatrix& h, std::size_t alpha,
                                              std::size_t i,
                                              const std::vector<double>& steps);

}  // namespace wigner::mc
