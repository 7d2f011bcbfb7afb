#include "wigner/eigensolver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

namespace wigner::eig {

namespace {

constexpr double kUlp = DBL_EPSILON;

// Scratch layout for the Householder reduction. The matrix lives in two
// real planes (row-major, lower triangle authoritative): streaming over row
// prefixes with separate re/im arrays keeps every hot loop a plain FMA
// stream that the compiler can vectorise, which is what the Monte Carlo
// throughput targets hinge on.
struct ReductionWorkspace {
  std::vector<double> ar, ai;      // n x n planes
  std::vector<double> vr, vi;      // current reflector, absolute row indexing
  std::vector<double> wr, wi;      // rank-2 companion vector
};

// w = B v on the trailing block rows/cols [lo, n): Hermitian B stored in the
// lower triangle of the planes. Split into a dot pass and an axpy pass so
// both vectorise cleanly.
void hermitian_matvec_lower(const ReductionWorkspace& ws, std::size_t n, std::size_t lo,
                            double* __restrict__ wr, double* __restrict__ wi) {
  const double* __restrict__ vr = ws.vr.data();
  const double* __restrict__ vi = ws.vi.data();
  for (std::size_t i = lo; i < n; ++i) {
    wr[i] = 0.0;
    wi[i] = 0.0;
  }
  for (std::size_t i = lo; i < n; ++i) {
    const double* __restrict__ rowr = ws.ar.data() + i * n;
    const double* __restrict__ rowi = ws.ai.data() + i * n;
    const double vri = vr[i];
    const double vii = vi[i];
    double accr = 0.0, acci = 0.0;
    for (std::size_t j = lo; j < i; ++j) {
      accr += rowr[j] * vr[j] - rowi[j] * vi[j];
      acci += rowr[j] * vi[j] + rowi[j] * vr[j];
    }
    for (std::size_t j = lo; j < i; ++j) {
      wr[j] += rowr[j] * vri + rowi[j] * vii;
      wi[j] += rowr[j] * vii - rowi[j] * vri;
    }
    wr[i] += accr + rowr[i] * vri;
    wi[i] += acci + rowr[i] * vii;
  }
}

// B -= v w^H + w v^H on the lower triangle of the trailing block. The
// imaginary part on the diagonal cancels exactly, keeping it at zero.
void rank2_update_lower(ReductionWorkspace& ws, std::size_t n, std::size_t lo) {
  const double* __restrict__ vr = ws.vr.data();
  const double* __restrict__ vi = ws.vi.data();
  const double* __restrict__ wr = ws.wr.data();
  const double* __restrict__ wi = ws.wi.data();
  for (std::size_t i = lo; i < n; ++i) {
    double* __restrict__ rowr = ws.ar.data() + i * n;
    double* __restrict__ rowi = ws.ai.data() + i * n;
    const double vri = vr[i], vii = vi[i];
    const double wri = wr[i], wii = wi[i];
    for (std::size_t j = lo; j <= i; ++j) {
      rowr[j] -= vri * wr[j] + vii * wi[j] + wri * vr[j] + wii * vi[j];
      rowi[j] -= (vii * wr[j] - vri * wi[j]) + (wii * vr[j] - wri * vi[j]);
    }
  }
}

}  // namespace

TridiagonalForm tridiagonalize(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  if (n == 0) throw std::invalid_argument("tridiagonalize: empty matrix");
  if (!h.is_hermitian()) throw std::invalid_argument("tridiagonalize: input is not Hermitian");

  TridiagonalForm t;
  t.n = n;
  t.d.resize(n);
  t.e.assign(n > 0 ? n - 1 : 0, 0.0);
  t.column_phase.assign(n, 1.0);
  if (n == 1) {
    t.d[0] = h(0, 0).real();
    return t;
  }
  t.tau.assign(n - 1, {0.0, 0.0});
  t.reflectors.assign((n - 1) * (n - 2) / 2, {0.0, 0.0});

  ReductionWorkspace ws;
  ws.ar.resize(n * n);
  ws.ai.resize(n * n);
  ws.vr.assign(n, 0.0);
  ws.vi.assign(n, 0.0);
  ws.wr.assign(n, 0.0);
  ws.wi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      ws.ar[i * n + j] = h(i, j).real();
      ws.ai[i * n + j] = h(i, j).imag();
    }
  }

  std::size_t packed = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t lo = k + 1;
    const double alpha_r = ws.ar[lo * n + k];
    const double alpha_i = ws.ai[lo * n + k];
    double xnorm_sq = 0.0;
    for (std::size_t i = lo + 1; i < n; ++i) {
      xnorm_sq += ws.ar[i * n + k] * ws.ar[i * n + k] + ws.ai[i * n + k] * ws.ai[i * n + k];
    }

    if (xnorm_sq == 0.0 && alpha_i == 0.0) {
      // Column already in tridiagonal position; nothing to reflect.
      t.e[k] = alpha_r;
      packed += n - lo - 1;
      continue;
    }

    const double norm = std::sqrt(alpha_r * alpha_r + alpha_i * alpha_i + xnorm_sq);
    const double beta = alpha_r >= 0.0 ? -norm : norm;
    const std::complex<double> tau{(beta - alpha_r) / beta, -alpha_i / beta};
    t.tau[k] = tau;
    t.e[k] = beta;

    // v = x / (alpha - beta) with v[lo] = 1.
    const std::complex<double> denom{alpha_r - beta, alpha_i};
    const std::complex<double> inv_denom = std::conj(denom) / std::norm(denom);
    ws.vr[lo] = 1.0;
    ws.vi[lo] = 0.0;
    for (std::size_t i = lo + 1; i < n; ++i) {
      const std::complex<double> v =
          std::complex<double>{ws.ar[i * n + k], ws.ai[i * n + k]} * inv_denom;
      ws.vr[i] = v.real();
      ws.vi[i] = v.imag();
      t.reflectors[packed++] = v;
    }

    hermitian_matvec_lower(ws, n, lo, ws.wr.data(), ws.wi.data());

    // w = tau B v - (tau/2) (v^H (tau B v)) v
    std::complex<double> dot{0.0, 0.0};
    for (std::size_t i = lo; i < n; ++i) {
      const std::complex<double> p =
          tau * std::complex<double>{ws.wr[i], ws.wi[i]};
      ws.wr[i] = p.real();
      ws.wi[i] = p.imag();
      dot += std::conj(p) * std::complex<double>{ws.vr[i], ws.vi[i]};
    }
    const std::complex<double> corr = -0.5 * tau * dot;
    for (std::size_t i = lo; i < n; ++i) {
      const std::complex<double> w =
          std::complex<double>{ws.wr[i], ws.wi[i]} +
          corr * std::complex<double>{ws.vr[i], ws.vi[i]};
      ws.wr[i] = w.real();
      ws.wi[i] = w.imag();
    }

    rank2_update_lower(ws, n, lo);
  }

  for (std::size_t i = 0; i < n; ++i) t.d[i] = ws.ar[i * n + i];

  // Fold subdiagonal signs into per-column phases so e is nonnegative.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double s = t.e[k] < 0.0 ? -1.0 : 1.0;
    t.e[k] = std::abs(t.e[k]);
    t.column_phase[k + 1] = t.column_phase[k] * s;
  }
  return t;
}

std::vector<std::complex<double>> TridiagonalForm::form_q() const {
  std::vector<double> qr(n * n, 0.0), qi(n * n, 0.0);
  for (std::size_t c = 0; c < n; ++c) qr[c * n + c] = 1.0;

  // A form built directly from (d, e), with no reflectors, represents a
  // matrix that is already tridiagonal; its accumulation matrix is the
  // identity up to column phases.
  if (n >= 2 && tau.size() == n - 1) {
    // Backward accumulation: the product of reflectors applied to the
    // identity, touching only the trailing block at each step.
    std::vector<double> vr(n), vi(n);
    std::size_t packed_end = reflectors.size();
    for (std::size_t k = n - 1; k-- > 0;) {
      const std::size_t lo = k + 1;
      const std::size_t len = n - lo - 1;  // stored components beyond the implicit 1
      packed_end -= len;
      if (tau[k] == std::complex<double>{0.0, 0.0}) continue;
      vr[lo] = 1.0;
      vi[lo] = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        vr[lo + 1 + i] = reflectors[packed_end + i].real();
        vi[lo + 1 + i] = reflectors[packed_end + i].imag();
      }
      for (std::size_t c = lo; c < n; ++c) {
        double* __restrict__ colr = qr.data() + c * n;
        double* __restrict__ coli = qi.data() + c * n;
        double sr = 0.0, si = 0.0;
        for (std::size_t r = lo; r < n; ++r) {
          sr += vr[r] * colr[r] + vi[r] * coli[r];
          si += vr[r] * coli[r] - vi[r] * colr[r];
        }
        const std::complex<double> f = tau[k] * std::complex<double>{sr, si};
        const double fr = f.real(), fi = f.imag();
        for (std::size_t r = lo; r < n; ++r) {
          colr[r] -= fr * vr[r] - fi * vi[r];
          coli[r] -= fr * vi[r] + fi * vr[r];
        }
      }
    }
  }

  std::vector<std::complex<double>> q(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    const double phase = c < column_phase.size() ? column_phase[c] : 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      q[c * n + r] = {phase * qr[c * n + r], phase * qi[c * n + r]};
    }
  }
  return q;
}

TridiagonalEigenResult tridiagonal_eigen(const TridiagonalForm& t, bool want_vectors) {
  const std::size_t n = t.n;
  TridiagonalEigenResult res;
  res.eigenvalues = t.d;
  if (n == 0) return res;
  if (want_vectors) res.vectors = t.form_q();

  std::vector<double>& d = res.eigenvalues;
  // One slot past the off-diagonal band is rotation scratch (e[m] writes
  // reach index n - 1).
  std::vector<double> e(t.e);
  e.resize(n, 0.0);
  std::complex<double>* q = res.vectors.data();

  const std::size_t sweep_budget = 50 * n;
  std::size_t sweeps = 0;

  for (std::size_t l = 0; l < n; ++l) {
    while (true) {
      // Locate the end of the unreduced block starting at l.
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kUlp * dd) break;
        ++m;
      }
      if (m == l) break;

      if (++sweeps > sweep_budget) {
        throw SolverError("tridiagonal_eigen: QL iteration exceeded sweep budget", l);
      }

      // Wilkinson shift from the leading 2x2 of the block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;

      bool underflow_restart = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          // Rotation annihilated prematurely; drop the shift remnant and
          // restart on the shrunk block.
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow_restart = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;

        if (want_vectors) {
          std::complex<double>* __restrict__ qa = q + i * n;
          std::complex<double>* __restrict__ qb = q + (i + 1) * n;
          for (std::size_t row = 0; row < n; ++row) {
            const std::complex<double> f2 = qb[row];
            qb[row] = s * qa[row] + c * f2;
            qa[row] = c * qa[row] - s * f2;
          }
        }
      }
      if (underflow_restart) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  // Ascending order, stable so that exact ties keep accumulation order.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> sorted_d(n);
  for (std::size_t i = 0; i < n; ++i) sorted_d[i] = d[perm[i]];
  if (want_vectors) {
    std::vector<std::complex<double>> sorted_q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(res.vectors.begin() + static_cast<std::ptrdiff_t>(perm[i] * n), n,
                  sorted_q.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    res.vectors = std::move(sorted_q);
  }
  res.eigenvalues = std::move(sorted_d);
  return res;
}

namespace {

void apply_phase_convention(std::vector<std::complex<double>>& vectors, std::size_t n) {
  for (std::size_t c = 0; c < vectors.size() / n; ++c) {
    std::complex<double>* col = vectors.data() + c * n;
    for (std::size_t r = 0; r < n; ++r) {
      const double mag = std::abs(col[r]);
      if (mag != 0.0) {
        const std::complex<double> phase = std::conj(col[r]) / mag;
        for (std::size_t rr = 0; rr < n; ++rr) col[rr] *= phase;
        break;
      }
    }
  }
}

struct CertificationTolerances {
  double trace;
  double frobenius;
  double residual;
  double orthonormality;
};

}  // namespace

SpectralDecomposition eigh(const HermitianMatrix& h, bool want_vectors) {
  const std::size_t n = h.dim();
  TridiagonalForm t = tridiagonalize(h);
  TridiagonalEigenResult qr = tridiagonal_eigen(t, want_vectors);

  SpectralDecomposition out;
  out.n = n;
  out.eigenvalues = std::move(qr.eigenvalues);
  out.vectors = std::move(qr.vectors);
  if (want_vectors) apply_phase_convention(out.vectors, n);

  const double frob = h.frobenius_norm();
  const double norm2_est =
      std::max({std::abs(out.eigenvalues.front()), std::abs(out.eigenvalues.back()), DBL_MIN});
  const double nd = static_cast<double>(n);
  const CertificationTolerances tol{
      1e-9 * nd * std::max(frob, DBL_MIN),
      1e-9 * nd * std::max(frob * frob, DBL_MIN),
      1e-10 * nd * norm2_est,
      1e-10 * nd,
  };

  double eval_sum = 0.0, eval_sq_sum = 0.0;
  for (const double mu : out.eigenvalues) {
    eval_sum += mu;
    eval_sq_sum += mu * mu;
  }
  if (std::abs(eval_sum - h.trace_real()) > tol.trace) {
    throw SolverError("eigh: trace conservation failed certification", n);
  }
  if (std::abs(eval_sq_sum - frob * frob) > tol.frobenius) {
    throw SolverError("eigh: Frobenius conservation failed certification", n);
  }

  if (!want_vectors) {
    // No vectors to measure against; carry the backward-error bound of the
    // reduction plus iteration instead.
    out.residual_bound = 64.0 * nd * kUlp * norm2_est;
    return out;
  }

  // Certified residual: max over eigenpairs of ||H v - mu v||_2.
  double worst_resid_sq = 0.0;
  std::vector<std::complex<double>> hv(n);
  for (std::size_t alpha = 0; alpha < n; ++alpha) {
    const std::complex<double>* v = out.vector(alpha);
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> acc{0.0, 0.0};
      const std::complex<double>* row = h.data().data() + i * n;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
      hv[i] = acc - out.eigenvalues[alpha] * v[i];
    }
    double rsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rsq += std::norm(hv[i]);
    worst_resid_sq = std::max(worst_resid_sq, rsq);
  }
  out.residual_bound = std::sqrt(worst_resid_sq);
  if (out.residual_bound > tol.residual) {
    throw SolverError("eigh: residual bound failed certification", n);
  }

  double worst_ortho = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::complex<double>* va = out.vector(a);
    for (std::size_t b = a; b < n; ++b) {
      const std::complex<double>* vb = out.vector(b);
      std::complex<double> dot{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(va[i]) * vb[i];
      if (a == b) dot -= 1.0;
      worst_ortho = std::max(worst_ortho, std::abs(dot));
    }
  }
  if (worst_ortho > tol.orthonormality) {
    throw SolverError("eigh: orthonormality failed certification", n);
  }
  return out;
}

InterlacingReport interlacing_check(const SpectralDecomposition& full,
                                    const SpectralDecomposition& minor_dec) {
  if (minor_dec.eigenvalues.size() + 1 != full.eigenvalues.size()) {
    throw std::invalid_argument("interlacing_check: minor must have dimension n - 1");
  }
  const double slack = 2.0 * (full.residual_bound + minor_dec.residual_bound);
  InterlacingReport report;
  for (std::size_t a = 0; a + 1 < full.eigenvalues.size(); ++a) {
    const double lower_gap = full.eigenvalues[a] - minor_dec.eigenvalues[a];
    const double upper_gap = minor_dec.eigenvalues[a] - full.eigenvalues[a + 1];
    const double excess = std::max(lower_gap, upper_gap) - slack;
    if (excess > 0.0) {
      report.ok = false;
      report.worst_violation = std::max(report.worst_violation, excess);
    }
  }
  return report;
}

}  // namespace wigner::eig
