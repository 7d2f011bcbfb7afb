#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigner/hermitian_matrix.hpp"

namespace wigner::eig {

// Raised when the implicit-shift iteration fails to deflate. stuck_index is
// the diagonal position that refused to converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t stuck_index)
      : std::runtime_error(what), stuck_index(stuck_index) {}
  std::size_t stuck_index;
};

// Householder reduction output: real tridiagonal (d, e) with nonnegative e,
// unitarily similar to the input. The reflectors are kept in packed form so
// the eigenvalue-only path never pays for accumulating the unitary factor;
// form_q materialises it on demand (column-major).
struct TridiagonalForm {
  std::size_t n = 0;
  std::vector<double> d;  // n diagonal entries
  std::vector<double> e;  // n-1 subdiagonal entries, e[i] >= 0

  std::vector<std::complex<double>> reflectors;  // packed v-vectors, v[0] = 1 implicit
  std::vector<std::complex<double>> tau;
  std::vector<double> column_phase;  // +-1 factors absorbing subdiagonal signs

  std::vector<std::complex<double>> form_q() const;
};

// Reduce H to real tridiagonal form. Rejects non-Hermitian input (exact
// entry-level check, since samplers mirror bit for bit).
TridiagonalForm tridiagonalize(const HermitianMatrix& h);

struct TridiagonalEigenResult {
  std::vector<double> eigenvalues;               // ascending
  std::vector<std::complex<double>> vectors;     // column-major, empty unless requested
};

// Implicit-shift QL with Wilkinson shifts on (d, e). An off-diagonal entry
// deflates once |e_i| <= ulp * (|d_i| + |d_i+1|); more than 50 * n sweeps in
// total raises SolverError. With want_vectors the rotations are accumulated
// onto form_q(), giving eigenvectors of the original matrix.
TridiagonalEigenResult tridiagonal_eigen(const TridiagonalForm& t, bool want_vectors);

struct SpectralDecomposition {
  std::size_t n = 0;
  std::vector<double> eigenvalues;             // ascending, ties adjacent
  std::vector<std::complex<double>> vectors;   // column-major; empty on the fast path
  double residual_bound = 0.0;                 // certified max ||H v - mu v||_2

  const std::complex<double>* vector(std::size_t alpha) const {
    return vectors.data() + alpha * n;
  }
};

// Full pipeline: tridiagonalize, iterate, sort, fix phases and certify.
// With want_vectors the residual, orthonormality, trace and Frobenius
// invariants are all verified before returning; the eigenvalue-only path
// certifies the trace and Frobenius identities against (d, e) and carries a
// backward-error residual bound instead. Certification failure raises
// SolverError.
SpectralDecomposition eigh(const HermitianMatrix& h, bool want_vectors = true);

struct InterlacingReport {
  bool ok = true;
  double worst_violation = 0.0;  // largest slack excess observed
};

// Cauchy interlacing between the spectrum of H and of one of its principal
// minors, with slack 2 * (sum of the residual bounds).
InterlacingReport interlacing_check(const SpectralDecomposition& full,
                                    const SpectralDecomposition& minor_dec);

}  // namespace wigner::eig
