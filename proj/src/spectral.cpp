#include "wigner/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigner::spectral {

namespace {

void require_upper_half_plane(double eta, const char* where) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": requires eta > 0");
  }
}

// Partial-pivoted LU solve of (H - z) x = e_k, returning x_k. Cubic and
// deliberately independent of the eigensolver; only validation suites call
// it, so clarity wins over speed here.
std::complex<double> resolvent_entry_direct(const HermitianMatrix& h, std::size_t k,
                                            std::complex<double> z) {
  const std::size_t n = h.dim();
  std::vector<std::complex<double>> m(h.data());
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= z;
  std::vector<std::complex<double>> x(n, {0.0, 0.0});
  x[k] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(m[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::abs(m[r * n + col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best == 0.0) {
      throw std::runtime_error("resolvent_diag_minor: singular shifted matrix");
    }
    if (pivot != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      std::swap(x[pivot], x[col]);
    }
    const std::complex<double> inv_diag = 1.0 / m[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const std::complex<double> factor = m[r * n + col] * inv_diag;
      if (factor == std::complex<double>{0.0, 0.0}) continue;
      for (std::size_t c = col + 1; c < n; ++c) m[r * n + c] -= factor * m[col * n + c];
      x[r] -= factor * x[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    std::complex<double> acc = x[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= m[r * n + c] * x[c];
    x[r] = acc / m[r * n + r];
  }
  return x[k];
}

}  // namespace

double empirical_cdf(const std::vector<double>& sorted_eigenvalues, double energy) {
  const auto it =
      std::upper_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(), energy);
  return static_cast<double>(it - sorted_eigenvalues.begin()) /
         static_cast<double>(sorted_eigenvalues.size());
}

std::complex<double> stieltjes(const std::vector<double>& eigenvalues,
                               const SpectralPoint& point) {
  require_upper_half_plane(point.eta, "stieltjes");
  if (eigenvalues.empty()) throw std::invalid_argument("stieltjes: empty spectrum");
  const std::complex<double> z = point.z();
  std::complex<double> acc{0.0, 0.0};
  for (const double mu : eigenvalues) acc += 1.0 / (mu - z);
  return acc / static_cast<double>(eigenvalues.size());
}

double rho_eta(const std::vector<double>& eigenvalues, const SpectralPoint& point) {
  return stieltjes(eigenvalues, point).imag() / M_PI;
}

double semicircle_density(double energy) {
  if (std::abs(energy) >= 2.0) return 0.0;
  return std::sqrt(4.0 - energy * energy) / (2.0 * M_PI);
}

std::complex<double> m_sc(std::complex<double> z) {
  require_upper_half_plane(z.imag(), "m_sc");
  const std::complex<double> root = std::sqrt(z * z - 4.0);
  const std::complex<double> candidate = 0.5 * (-z + root);
  if (candidate.imag() > 0.0) return candidate;
  return 0.5 * (-z - root);
}

double self_consistency_residual(std::complex<double> m, std::complex<double> z) {
  return std::abs(m + 1.0 / (m + z));
}

std::size_t count_in_interval(const std::vector<double>& sorted_eigenvalues,
                              const SpectralInterval& interval) {
  const auto lo = std::lower_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(),
                                   interval.lower());
  const auto hi = std::upper_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(),
                                   interval.upper());
  return static_cast<std::size_t>(hi - lo);
}

double OverlapVector::sum() const {
  double s = 0.0;
  for (const double v : xi) s += v;
  return s;
}

OverlapVector overlaps_xi(const eig::SpectralDecomposition& minor_eigs,
                          const std::vector<std::complex<double>>& a, std::size_t n) {
  const std::size_t dim = minor_eigs.n;
  if (a.size() != dim) {
    throw std::invalid_argument("overlaps_xi: vector length must match minor dimension");
  }
  if (minor_eigs.vectors.size() != dim * dim) {
    throw std::invalid_argument("overlaps_xi: minor decomposition carries no eigenvectors");
  }
  OverlapVector out;
  out.xi.resize(dim);
  const double scale = static_cast<double>(n);
  double a_norm_sq = 0.0;
  for (std::size_t i = 0; i < dim; ++i) a_norm_sq += std::norm(a[i]);
  for (std::size_t alpha = 0; alpha < dim; ++alpha) {
    const std::complex<double>* u = minor_eigs.vector(alpha);
    std::complex<double> dot{0.0, 0.0};
    for (std::size_t i = 0; i < dim; ++i) dot += std::conj(u[i]) * a[i];
    out.xi[alpha] = scale * std::norm(dot);
  }
  // Completeness: the xi sum must reproduce n ||a||^2, or the eigenbasis the
  // caller handed in was not orthonormal.
  const double target = scale * a_norm_sq;
  const double tol = 1e-9 * scale * std::max(1.0, a_norm_sq);
  if (std::abs(out.sum() - target) > tol) {
    throw std::runtime_error("overlaps_xi: completeness violated, sum xi != n ||a||^2");
  }
  return out;
}

ResolventCheck resolvent_diag_minor(const HermitianMatrix& h, std::size_t k,
                                    std::complex<double> z) {
  require_upper_half_plane(z.imag(), "resolvent_diag_minor");
  const std::size_t n = h.dim();
  if (k >= n) throw std::invalid_argument("resolvent_diag_minor: index k out of range");

  ResolventCheck out;
  out.direct = resolvent_entry_direct(h, k, z);

  if (n == 1) {
    out.via_minor = 1.0 / (h(0, 0) - z);
    return out;
  }
  const MinorDecomposition md = minor(h, k);
  const eig::SpectralDecomposition minor_eigs = eig::eigh(md.b, true);
  const OverlapVector xi = overlaps_xi(minor_eigs, md.a, n);
  std::complex<double> weighted{0.0, 0.0};
  for (std::size_t alpha = 0; alpha + 1 < n; ++alpha) {
    weighted += xi.xi[alpha] / (minor_eigs.eigenvalues[alpha] - z);
  }
  out.via_minor = 1.0 / (md.h_kk - z - weighted / static_cast<double>(n));
  return out;
}

CountBoundCheck basic_count_bound(const std::vector<double>& sorted_eigenvalues,
                                  double energy, double eta) {
  require_upper_half_plane(eta, "basic_count_bound");
  CountBoundCheck out;
  const SpectralInterval interval{energy, eta};
  out.count = count_in_interval(sorted_eigenvalues, interval);
  const SpectralPoint point{energy, eta};
  const double n = static_cast<double>(sorted_eigenvalues.size());
  out.bound = 1.25 * n * eta * stieltjes(sorted_eigenvalues, point).imag();
  // The inequality is exact; the epsilon absorbs the rounding of the bound
  // itself.
  out.ok = static_cast<double>(out.count) <= out.bound * (1.0 + 1e-12) + 1e-12;
  return out;
}

MinorGapCheck minor_stieltjes_gap(const std::vector<double>& full_eigenvalues,
                                  const std::vector<double>& minor_eigenvalues,
                                  const SpectralPoint& point) {
  if (minor_eigenvalues.size() + 1 != full_eigenvalues.size()) {
    throw std::invalid_argument("minor_stieltjes_gap: minor must have dimension n - 1");
  }
  const double n = static_cast<double>(full_eigenvalues.size());
  const std::complex<double> m_full = stieltjes(full_eigenvalues, point);
  const SpectralPoint same = point;
  const std::complex<double> m_minor = stieltjes(minor_eigenvalues, same);
  MinorGapCheck out;
  out.gap = std::abs(m_full - (1.0 - 1.0 / n) * m_minor);
  out.bound = M_PI / (n * point.eta);
  out.ok = out.gap <= out.bound * (1.0 + 1e-12) + 1e-12;
  return out;
}

XZStatistics x_and_z_statistics(const OverlapVector& xi,
                                const std::vector<double>& minor_eigenvalues,
                                const SpectralPoint& point,
                                const SpectralInterval& interval) {
  require_upper_half_plane(point.eta, "x_and_z_statistics");
  if (xi.xi.size() != minor_eigenvalues.size()) {
    throw std::invalid_argument("x_and_z_statistics: xi and spectrum sizes differ");
  }
  XZStatistics out;
  const std::complex<double> z = point.z();
  const double n = static_cast<double>(minor_eigenvalues.size() + 1);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t alpha = 0; alpha < xi.xi.size(); ++alpha) {
    acc += (xi.xi[alpha] - 1.0) / (minor_eigenvalues[alpha] - z);
    if (interval.contains(minor_eigenvalues[alpha])) out.z_stat += xi.xi[alpha];
  }
  out.x_stat = acc / n;
  return out;
}

}  // namespace wigner::spectral
