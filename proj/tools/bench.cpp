// Timing probe for the eigensolver hot path. Prints milliseconds per solve
// so throughput planning for the large Monte Carlo runs has real numbers.

#include <chrono>
#include <cstdio>
#include <vector>

#include "wigner/eigensolver.hpp"
#include "wigner/ensemble.hpp"

namespace {

double time_solves(std::size_t n, bool want_vectors, std::size_t reps) {
  using clock = std::chrono::steady_clock;
  wigner::ensemble::EntryDistributionSpec spec;
  double total_ms = 0.0;
  double checksum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const wigner::HermitianMatrix h = wigner::ensemble::sample_wigner(n, spec, 1000 + r);
    const auto start = clock::now();
    const auto dec = wigner::eig::eigh(h, want_vectors);
    const auto stop = clock::now();
    total_ms += std::chrono::duration<double, std::milli>(stop - start).count();
    checksum += dec.eigenvalues[0];
  }
  if (checksum == 0.12345) std::printf("unlikely\n");  // keep the solves live
  return total_ms / static_cast<double>(reps);
}

}  // namespace

int main() {
  const std::size_t dims[] = {128, 256, 512};
  std::printf("%8s %12s %12s\n", "n", "values_ms", "vectors_ms");
  for (const std::size_t n : dims) {
    const std::size_t reps = n >= 512 ? 3 : 10;
    const double values_ms = time_solves(n, false, reps);
    const double vectors_ms = time_solves(n, true, reps);
    std::printf("%8zu %12.3f %12.3f\n", n, values_ms, vectors_ms);
  }
  return 0;
}
