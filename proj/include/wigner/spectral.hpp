#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wigner/eigensolver.hpp"
#include "wigner/hermitian_matrix.hpp"

namespace wigner::spectral {

// Point in the upper half plane where resolvent quantities are evaluated.
struct SpectralPoint {
  double energy = 0.0;
  double eta = 0.0;  // must be positive
  std::complex<double> z() const { return {energy, eta}; }
};

// Closed interval [center - width/2, center + width/2].
struct SpectralInterval {
  double center = 0.0;
  double width = 0.0;
  double lower() const { return center - 0.5 * width; }
  double upper() const { return center + 0.5 * width; }
  bool contains(double x) const { return x >= lower() && x <= upper(); }
};

// Fraction of eigenvalues at or below E (right continuous).
double empirical_cdf(const std::vector<double>& sorted_eigenvalues, double energy);

// m(z) = (1/N) sum 1/(mu - z). Requires eta > 0.
std::complex<double> stieltjes(const std::vector<double>& eigenvalues,
                               const SpectralPoint& point);

// Smoothed spectral density Im m / pi at scale eta.
double rho_eta(const std::vector<double>& eigenvalues, const SpectralPoint& point);

// Semicircle density (1/2pi) sqrt(4 - E^2) on [-2, 2], zero outside.
double semicircle_density(double energy);

// Semicircle Stieltjes transform, the root of m^2 + z m + 1 = 0 with
// positive imaginary part. Requires Im z > 0.
std::complex<double> m_sc(std::complex<double> z);

// |m + 1/(m + z)|, zero exactly at the self-consistent solution.
double self_consistency_residual(std::complex<double> m, std::complex<double> z);

// Number of eigenvalues in the closed interval.
std::size_t count_in_interval(const std::vector<double>& sorted_eigenvalues,
                              const SpectralInterval& interval);

// Spectral weights xi_alpha = |sqrt(n) <u_alpha, a>|^2 of a vector a against
// the eigenbasis of an (n-1)-dimensional minor. Sums to n ||a||^2 exactly.
struct OverlapVector {
  std::vector<double> xi;
  double sum() const;
};
OverlapVector overlaps_xi(const eig::SpectralDecomposition& minor_eigs,
                          const std::vector<std::complex<double>>& a, std::size_t n);

// Dual-route diagonal resolvent entry: a direct LU solve of (H - z) x = e_k
// against the minor eigenvalue expansion
// G(k,k) = 1 / (h_kk - z - (1/n) sum_a xi_a / (lambda_a - z)).
struct ResolventCheck {
  std::complex<double> direct;
  std::complex<double> via_minor;
};
ResolventCheck resolvent_diag_minor(const HermitianMatrix& h, std::size_t k,
                                    std::complex<double> z);

// Counting bound N_I <= (5/4) n eta Im m(E + i eta) for I of width eta
// centred at E. Deterministic consequence of interval geometry.
struct CountBoundCheck {
  std::size_t count = 0;
  double bound = 0.0;
  bool ok = false;
};
CountBoundCheck basic_count_bound(const std::vector<double>& sorted_eigenvalues,
                                  double energy, double eta);

// |m - (1 - 1/n) m^(k)| with its interlacing bound pi / (n eta).
struct MinorGapCheck {
  double gap = 0.0;
  double bound = 0.0;
  bool ok = false;
};
MinorGapCheck minor_stieltjes_gap(const std::vector<double>& full_eigenvalues,
                                  const std::vector<double>& minor_eigenvalues,
                                  const SpectralPoint& point);

// Fluctuation statistics of the spectral weights: the centred resolvent sum
// X = (1/n) sum (xi_a - 1)/(lambda_a - z) and the windowed mass
// Z = sum_{lambda_a in I} xi_a.
struct XZStatistics {
  std::complex<double> x_stat;
  double z_stat = 0.0;
};
XZStatistics x_and_z_statistics(const OverlapVector& xi,
                                const std::vector<double>& minor_eigenvalues,
                                const SpectralPoint& point,
                                const SpectralInterval& interval);

}  // namespace wigner::spectral
