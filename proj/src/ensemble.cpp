#include "wigner/ensemble.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace wigner::ensemble {

namespace {

constexpr double kProductUniformHalfWidth = 1.2247448713915890;  // sqrt(3/2)
constexpr double kDiskRadius = 1.4142135623730951;               // sqrt(2)
constexpr double kRealUniformHalfWidth = 1.7320508075688772;     // sqrt(3)
constexpr double kInvSqrt2 = 0.7071067811865476;

bool is_gaussian(OffDiagonalFamily f) {
  return f == OffDiagonalFamily::kComplexGaussian ||
         f == OffDiagonalFamily::kProductGaussian;
}

}  // namespace

const char* family_name(OffDiagonalFamily f) {
  switch (f) {
    case OffDiagonalFamily::kComplexGaussian: return "complex-gaussian";
    case OffDiagonalFamily::kProductUniform: return "product-uniform";
    case OffDiagonalFamily::kRadialUniform: return "radial-uniform";
    case OffDiagonalFamily::kProductGaussian: return "product-gaussian";
  }
  throw std::logic_error("family_name: unreachable");
}

const char* diagonal_name(DiagonalFamily f) {
  switch (f) {
    case DiagonalFamily::kRealGaussian: return "real-gaussian";
    case DiagonalFamily::kRealUniform: return "real-uniform";
  }
  throw std::logic_error("diagonal_name: unreachable");
}

OffDiagonalFamily parse_family(const std::string& name) {
  if (name == "complex-gaussian") return OffDiagonalFamily::kComplexGaussian;
  if (name == "product-uniform") return OffDiagonalFamily::kProductUniform;
  if (name == "radial-uniform") return OffDiagonalFamily::kRadialUniform;
  if (name == "product-gaussian") return OffDiagonalFamily::kProductGaussian;
  throw std::invalid_argument(
      "unknown off-diagonal family '" + name +
      "' (expected complex-gaussian, product-uniform, radial-uniform or product-gaussian)");
}

DiagonalFamily parse_diagonal(const std::string& name) {
  if (name == "real-gaussian") return DiagonalFamily::kRealGaussian;
  if (name == "real-uniform") return DiagonalFamily::kRealUniform;
  throw std::invalid_argument("unknown diagonal family '" + name +
                              "' (expected real-gaussian or real-uniform)");
}

bool is_radial(OffDiagonalFamily f) {
  return f == OffDiagonalFamily::kComplexGaussian ||
         f == OffDiagonalFamily::kRadialUniform;
}

std::string spec_to_json(const EntryDistributionSpec& spec) {
  nlohmann::json j{{"family", family_name(spec.family)},
                   {"diagonal", diagonal_name(spec.diagonal)}};
  return j.dump();
}

EntryDistributionSpec spec_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  EntryDistributionSpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.diagonal = parse_diagonal(j.at("diagonal").get<std::string>());
  return spec;
}

std::complex<double> sample_offdiagonal(OffDiagonalFamily f, rng::Stream& stream) {
  switch (f) {
    case OffDiagonalFamily::kComplexGaussian: {
      // Polar generator: |z|^2 is exactly Exp(1) and the phase is uniform,
      // which realises the rotational invariance of this family directly.
      const double r = std::sqrt(-std::log1p(-stream.uniform01()));
      const double angle = 2.0 * M_PI * stream.uniform01();
      return {r * std::cos(angle), r * std::sin(angle)};
    }
    case OffDiagonalFamily::kProductUniform: {
      const double re = stream.uniform_symmetric(kProductUniformHalfWidth);
      const double im = stream.uniform_symmetric(kProductUniformHalfWidth);
      return {re, im};
    }
    case OffDiagonalFamily::kRadialUniform: {
      const double r = kDiskRadius * std::sqrt(stream.uniform01());
      const double angle = 2.0 * M_PI * stream.uniform01();
      return {r * std::cos(angle), r * std::sin(angle)};
    }
    case OffDiagonalFamily::kProductGaussian: {
      const double re = kInvSqrt2 * stream.normal();
      const double im = kInvSqrt2 * stream.normal();
      return {re, im};
    }
  }
  throw std::logic_error("sample_offdiagonal: unreachable");
}

double sample_diagonal(DiagonalFamily f, rng::Stream& stream) {
  switch (f) {
    case DiagonalFamily::kRealGaussian: return stream.normal();
    case DiagonalFamily::kRealUniform: return stream.uniform_symmetric(kRealUniformHalfWidth);
  }
  throw std::logic_error("sample_diagonal: unreachable");
}

HermitianMatrix sample_wigner(std::size_t n, const EntryDistributionSpec& spec,
                              std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_wigner: n must be positive");
  HermitianMatrix h(n);
  rng::Stream stream(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = scale * sample_diagonal(spec.diagonal, stream);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::complex<double> z = scale * sample_offdiagonal(spec.family, stream);
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

MomentReport verify_moment_conditions(const EntryDistributionSpec& spec, double delta0,
                                      std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("verify_moment_conditions: need n_samples >= 2");
  if (delta0 < 0.0) throw std::invalid_argument("verify_moment_conditions: delta0 must be nonnegative");
  if (is_gaussian(spec.family) && delta0 >= 1.0) {
    throw std::invalid_argument(
        "verify_moment_conditions: delta0 must lie below the gaussian critical exponent 1");
  }

  rng::Stream stream(seed);
  std::complex<double> mean_acc{0.0, 0.0};
  double second_acc = 0.0;
  double exp_acc = 0.0;
  double exp_sq_acc = 0.0;
  double exp_acc_half = 0.0;  // running average over the first half

  for (std::size_t s = 0; s < n_samples; ++s) {
    const std::complex<double> z = sample_offdiagonal(spec.family, stream);
    const double zsq = std::norm(z);
    const double w = std::exp(delta0 * zsq);
    mean_acc += z;
    second_acc += zsq;
    exp_acc += w;
    exp_sq_acc += w * w;
    if (s < n_samples / 2) exp_acc_half += w;
  }

  MomentReport report;
  report.delta0 = delta0;
  report.n_samples = n_samples;
  const double count = static_cast<double>(n_samples);
  report.mean = mean_acc / count;
  report.second_moment = second_acc / count;
  report.exp_moment = exp_acc / count;
  const double var = std::max(0.0, exp_sq_acc / count - report.exp_moment * report.exp_moment);
  report.exp_moment_stderr = std::sqrt(var / count);

  // Divergence heuristic: near the critical exponent the average is driven
  // by rare huge summands, so doubling the sample count keeps moving it.
  const double half_avg = exp_acc_half / static_cast<double>(n_samples / 2);
  report.diverged = std::abs(report.exp_moment - half_avg) > 0.05 * std::abs(report.exp_moment);
  return report;
}

std::optional<double> exp_moment_closed_form(OffDiagonalFamily f, double delta0) {
  if (is_gaussian(f)) {
    if (delta0 >= 1.0) return std::nullopt;
    return 1.0 / (1.0 - delta0);
  }
  if (f == OffDiagonalFamily::kRadialUniform) {
    // |z|^2 is uniform on [0, 2].
    if (delta0 == 0.0) return 1.0;
    return (std::exp(2.0 * delta0) - 1.0) / (2.0 * delta0);
  }
  return std::nullopt;
}

}  // namespace wigner::ensemble
