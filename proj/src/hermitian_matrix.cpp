#include "wigner/hermitian_matrix.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace wigner {

static_assert(std::endian::native == std::endian::little,
              "matrix dumps are defined as little-endian");

bool HermitianMatrix::is_hermitian() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i).imag() != 0.0) return false;
    for (std::size_t j = i + 1; j < n_; ++j) {
      if ((*this)(i, j) != std::conj((*this)(j, i))) return false;
    }
  }
  return true;
}

double HermitianMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double HermitianMatrix::trace_real() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i).real();
  return t;
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

MinorDecomposition minor(const HermitianMatrix& h, std::size_t k) {
  const std::size_t n = h.dim();
  if (n == 0) throw std::invalid_argument("minor: empty matrix");
  if (k >= n) throw std::invalid_argument("minor: index k out of range");

  MinorDecomposition out;
  out.k = k;
  out.h_kk = h(k, k);
  out.b = HermitianMatrix(n - 1);
  out.a.resize(n - 1);

  for (std::size_t i = 0, bi = 0; i < n; ++i) {
    if (i == k) continue;
    out.a[bi] = h(i, k);
    for (std::size_t j = 0, bj = 0; j < n; ++j) {
      if (j == k) continue;
      out.b(bi, bj) = h(i, j);
      ++bj;
    }
    ++bi;
  }
  return out;
}

void write_matrix(const std::string& path, const HermitianMatrix& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_matrix: cannot open " + path);
  const std::uint64_t n = h.dim();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(h.data().data()),
            static_cast<std::streamsize>(n * n * sizeof(std::complex<double>)));
  if (!out) throw std::runtime_error("write_matrix: short write to " + path);
}

HermitianMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_matrix: cannot open " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in) throw std::runtime_error("read_matrix: truncated header in " + path);
  HermitianMatrix h(static_cast<std::size_t>(n));
  in.read(reinterpret_cast<char*>(h.data().data()),
          static_cast<std::streamsize>(n * n * sizeof(std::complex<double>)));
  if (!in) throw std::runtime_error("read_matrix: truncated payload in " + path);
  return h;
}

}  // namespace wigner
