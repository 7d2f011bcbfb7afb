#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace wigner {

// Dense Hermitian matrix, row-major. Constructors and samplers are expected
// to fill both triangles consistently; is_hermitian checks exact equality
// because every producer in this codebase mirrors entries bit for bit.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t dim() const { return n_; }

  std::complex<double>& operator()(std::size_t i, std::size_t j) {
    return data_[i * n_ + j];
  }
  const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  const std::vector<std::complex<double>>& data() const { return data_; }
  std::vector<std::complex<double>>& data() { return data_; }

  bool is_hermitian() const;
  double max_abs() const;
  double trace_real() const;
  double frobenius_norm() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> data_;
};

// Row/column split of H at index k (0-based): the (n-1) x (n-1) minor b with
// row and column k removed, the k-th column without its diagonal entry, and
// the diagonal entry itself.
struct MinorDecomposition {
  std::size_t k = 0;
  HermitianMatrix b;
  std::vector<std::complex<double>> a;
  std::complex<double> h_kk;
};

MinorDecomposition minor(const HermitianMatrix& h, std::size_t k);

// Binary dump: 8-byte little-endian dimension header followed by row-major
// complex128 entries. Intended for debugging and cross-checking samplers.
void write_matrix(const std::string& path, const HermitianMatrix& h);
HermitianMatrix read_matrix(const std::string& path);

}  // namespace wigner
