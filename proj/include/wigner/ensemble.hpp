#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "wigner/hermitian_matrix.hpp"
#include "wigner/rng.hpp"

namespace wigner::ensemble {

// Off-diagonal entry laws, all centred with unit second moment E|z|^2 = 1.
// Product families draw independent real and imaginary parts; radial
// families draw a rotationally invariant law. The gaussian law lives in both
// classes, so it appears twice with different generators and metadata.
enum class OffDiagonalFamily {
  kComplexGaussian,  // radial; |z|^2 ~ Exp(1)
  kProductUniform,   // re, im ~ U[-sqrt(3/2), sqrt(3/2)]
  kRadialUniform,    // uniform on the disk of radius sqrt(2)
  kProductGaussian,  // re, im ~ N(0, 1/2)
};

// Diagonal entry laws, real with unit variance.
enum class DiagonalFamily {
  kRealGaussian,  // N(0, 1)
  kRealUniform,   // U[-sqrt(3), sqrt(3)]
};

struct EntryDistributionSpec {
  OffDiagonalFamily family = OffDiagonalFamily::kComplexGaussian;
  DiagonalFamily diagonal = DiagonalFamily::kRealGaussian;
};

const char* family_name(OffDiagonalFamily f);
const char* diagonal_name(DiagonalFamily f);
OffDiagonalFamily parse_family(const std::string& name);
DiagonalFamily parse_diagonal(const std::string& name);
bool is_radial(OffDiagonalFamily f);

std::string spec_to_json(const EntryDistributionSpec& spec);
EntryDistributionSpec spec_from_json(const std::string& text);

std::complex<double> sample_offdiagonal(OffDiagonalFamily f, rng::Stream& stream);
double sample_diagonal(DiagonalFamily f, rng::Stream& stream);

// H with h_ij = z_ij / sqrt(n) above the diagonal, h_ji mirrored by
// conjugation, and h_ii = x_ii / sqrt(n). Entries are drawn row-major over
// the upper triangle (diagonal first in each row), so (n, spec, seed) pins
// the matrix exactly regardless of caller context.
HermitianMatrix sample_wigner(std::size_t n, const EntryDistributionSpec& spec,
                              std::uint64_t seed);

struct MomentReport {
  std::complex<double> mean;
  double second_moment = 0.0;
  double exp_moment = 0.0;        // empirical E exp(delta0 |z|^2)
  double exp_moment_stderr = 0.0;
  bool diverged = false;          // running average failed to stabilise
  double delta0 = 0.0;
  std::size_t n_samples = 0;
};

// Monte Carlo check of the exponential moment condition for the off-diagonal
// law. delta0 must lie strictly below the family's critical exponent
// (1 for the gaussian families, unbounded for the compactly supported ones).
MomentReport verify_moment_conditions(const EntryDistributionSpec& spec, double delta0,
                                      std::size_t n_samples, std::uint64_t seed);

// Closed form of E exp(delta0 |z|^2) where one exists: 1/(1 - delta0) for
// the gaussian families, (exp(2 delta0) - 1)/(2 delta0) for the uniform
// disk. Used as a test oracle and reported next to the empirical value.
std::optional<double> exp_moment_closed_form(OffDiagonalFamily f, double delta0);

}  // namespace wigner::ensemble
