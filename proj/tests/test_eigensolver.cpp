#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "test_helpers.hpp"
#include "wigner/eigensolver.hpp"
#include "wigner/ensemble.hpp"
#include "wigner/hermitian_matrix.hpp"

using namespace wigner;
using std::complex;

namespace {

HermitianMatrix from_rows(std::initializer_list<std::initializer_list<complex<double>>> rows) {
  HermitianMatrix h(rows.size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const auto& v : row) h(i, j++) = v;
    ++i;
  }
  return h;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("tridiagonalize turns the antisymmetric 2x2 into d = 0, e = 1") {
  const HermitianMatrix h = from_rows({{0.0, complex<double>(0.0, 1.0)},
                                       {complex<double>(0.0, -1.0), 0.0}});
  const auto t = eig::tridiagonalize(h);
  REQUIRE(t.d.size() == 2);
  REQUIRE(t.e.size() == 1);
  CHECK(std::abs(t.d[0]) <= 1e-15);
  CHECK(std::abs(t.d[1]) <= 1e-15);
  CHECK(t.e[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.e[0] >= 0.0);
}

TEST_CASE("an already tridiagonal real matrix passes through with q = identity") {
  HermitianMatrix h(4);
  const double d[] = {1.0, -0.5, 2.0, 0.25};
  const double e[] = {0.75, 0.5, 1.25};
  for (std::size_t i = 0; i < 4; ++i) h(i, i) = d[i];
  for (std::size_t i = 0; i < 3; ++i) {
    h(i, i + 1) = e[i];
    h(i + 1, i) = e[i];
  }
  const auto t = eig::tridiagonalize(h);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(t.d[i] - d[i]) <= 1e-15);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(t.e[i] - e[i]) <= 1e-15);
  const auto q = t.form_q();
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const complex<double> want = r == c ? 1.0 : 0.0;
      CHECK(std::abs(q[c * 4 + r] - want) <= 1e-15);
    }
  }
}

TEST_CASE("tridiagonal eigenvalues: frozen small cases") {
  eig::TridiagonalForm t;

  SUBCASE("decoupled double eigenvalue") {
    t.n = 2;
    t.d = {2.0, 2.0};
    t.e = {0.0};
    const auto res = eig::tridiagonal_eigen(t, false);
    CHECK(res.eigenvalues[0] == 2.0);
    CHECK(res.eigenvalues[1] == 2.0);
  }

  SUBCASE("symmetric coupling gives plus and minus one") {
    t.n = 2;
    t.d = {0.0, 0.0};
    t.e = {1.0};
    const auto res = eig::tridiagonal_eigen(t, false);
    CHECK(std::abs(res.eigenvalues[0] + 1.0) <= 1e-15);
    CHECK(std::abs(res.eigenvalues[1] - 1.0) <= 1e-15);
  }

  SUBCASE("three-site chain") {
    t.n = 3;
    t.d = {0.0, 0.0, 0.0};
    t.e = {1.0, 1.0};
    const auto res = eig::tridiagonal_eigen(t, false);
    CHECK(std::abs(res.eigenvalues[0] + std::sqrt(2.0)) <= 1e-14);
    CHECK(std::abs(res.eigenvalues[1]) <= 1e-14);
    CHECK(std::abs(res.eigenvalues[2] - std::sqrt(2.0)) <= 1e-14);
  }
}

TEST_CASE("eigh of a diagonal matrix sorts and returns coordinate vectors") {
  const HermitianMatrix h = from_rows({{3.0, 0.0, 0.0},
                                       {0.0, 1.0, 0.0},
                                       {0.0, 0.0, 2.0}});
  const auto res = eig::eigh(h, true);
  CHECK(std::abs(res.eigenvalues[0] - 1.0) <= 1e-14);
  CHECK(std::abs(res.eigenvalues[1] - 2.0) <= 1e-14);
  CHECK(std::abs(res.eigenvalues[2] - 3.0) <= 1e-14);

  // Eigenvalue mu = 1 lives on coordinate 1, mu = 2 on coordinate 2, mu = 3
  // on coordinate 0.
  const std::size_t coord[] = {1, 2, 0};
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    const complex<double>* v = res.vector(alpha);
    for (std::size_t r = 0; r < 3; ++r) {
      const double want = r == coord[alpha] ? 1.0 : 0.0;
      CHECK(std::abs(v[r] - want) <= 1e-14);
    }
  }
}

TEST_CASE("eigh of the 2x2 exchange matrix with the sign convention") {
  const HermitianMatrix h = from_rows({{0.0, 1.0}, {1.0, 0.0}});
  const auto res = eig::eigh(h, true);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(res.eigenvalues[0] + 1.0) <= 1e-14);
  CHECK(std::abs(res.eigenvalues[1] - 1.0) <= 1e-14);
  // First nonzero component is made real nonnegative.
  CHECK(std::abs(res.vector(0)[0] - s) <= 1e-14);
  CHECK(std::abs(res.vector(0)[1] + s) <= 1e-14);
  CHECK(std::abs(res.vector(1)[0] - s) <= 1e-14);
  CHECK(std::abs(res.vector(1)[1] - s) <= 1e-14);
}

TEST_CASE("spectra of small random matrices match determinant bisection") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const HermitianMatrix h = testutil::random_hermitian(n, 100 * n + rep);
      const auto res = eig::eigh(h, false);
      const auto oracle = testutil::bisection_spectrum(h, 1e-13);
      INFO("n ", n, " rep ", rep);
      CHECK(max_abs_diff(res.eigenvalues, oracle) <= 1e-12);
    }
  }
}

TEST_CASE("unitary similarity reproduces the tridiagonal form") {
  for (const std::size_t n : {2ul, 3ul, 5ul, 16ul, 33ul}) {
    const HermitianMatrix h = testutil::random_hermitian(n, 7 * n + 1);
    const auto t = eig::tridiagonalize(h);
    const auto q = t.form_q();

    // worst entry of q^H h q against the tridiagonal (d, e)
    std::vector<complex<double>> hq(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) acc += h(r, k) * q[c * n + k];
        hq[c * n + r] = acc;
      }
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) acc += std::conj(q[r * n + k]) * hq[c * n + k];
        complex<double> want{0.0, 0.0};
        if (r == c) want = t.d[r];
        if (r + 1 == c) want = t.e[r];
        if (c + 1 == r) want = t.e[c];
        worst = std::max(worst, std::abs(acc - want));
      }
    }
    const double tol =
        64.0 * static_cast<double>(n) * testutil::ulp_of(h.frobenius_norm());
    INFO("n ", n, " worst ", worst, " tol ", tol);
    CHECK(worst <= tol);
  }
}

TEST_CASE("decompositions are certified: residual, orthonormality, conservation") {
  wigner::ensemble::EntryDistributionSpec spec;
  for (const std::size_t n : {1ul, 2ul, 3ul, 4ul, 8ul, 24ul, 64ul}) {
    const HermitianMatrix h = wigner::ensemble::sample_wigner(n, spec, 900 + n);
    const auto res = eig::eigh(h, true);
    const double nd = static_cast<double>(n);
    const double scale = std::max(1.0, h.frobenius_norm());

    double worst_residual = 0.0;
    double worst_ortho = 0.0;
    for (std::size_t alpha = 0; alpha < n; ++alpha) {
      const complex<double>* v = res.vector(alpha);
      double res_sq = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        complex<double> acc = -res.eigenvalues[alpha] * v[r];
        for (std::size_t k = 0; k < n; ++k) acc += h(r, k) * v[k];
        res_sq += std::norm(acc);
      }
      worst_residual = std::max(worst_residual, std::sqrt(res_sq));
      for (std::size_t beta = 0; beta <= alpha; ++beta) {
        const complex<double>* w = res.vector(beta);
        complex<double> dot{0.0, 0.0};
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(w[r]) * v[r];
        const double want = alpha == beta ? 1.0 : 0.0;
        worst_ortho = std::max(worst_ortho, std::abs(dot - want));
      }
    }
    CHECK(worst_residual <= 1e-10 * nd * scale);
    // This measurement sums in a different order than the certificate, so
    // allow the rounding noise of one matrix-vector product on each side.
    const double measurement_slack =
        4.0 * nd * std::numeric_limits<double>::epsilon() * scale;
    CHECK(worst_residual <= res.residual_bound + measurement_slack);
    CHECK(worst_ortho <= 1e-10 * nd);

    double trace_sum = 0.0;
    double sq_sum = 0.0;
    for (const double mu : res.eigenvalues) {
      trace_sum += mu;
      sq_sum += mu * mu;
    }
    CHECK(std::abs(trace_sum - h.trace_real()) <= 1e-9 * nd * scale);
    const double frob_sq = h.frobenius_norm() * h.frobenius_norm();
    CHECK(std::abs(sq_sum - frob_sq) <= 1e-9 * nd * std::max(1.0, frob_sq));
  }
}

TEST_CASE("eigenvalue-only path agrees with the vector path") {
  const HermitianMatrix h = testutil::random_hermitian(32, 4242);
  const auto fast = eig::eigh(h, false);
  const auto full = eig::eigh(h, true);
  CHECK(fast.vectors.empty());
  REQUIRE(full.vectors.size() == 32 * 32);
  CHECK(max_abs_diff(fast.eigenvalues, full.eigenvalues) == 0.0);
}

TEST_CASE("phase convention makes the first significant component real nonnegative") {
  const HermitianMatrix h = testutil::random_hermitian(12, 555);
  const auto res = eig::eigh(h, true);
  for (std::size_t alpha = 0; alpha < 12; ++alpha) {
    const complex<double>* v = res.vector(alpha);
    for (std::size_t r = 0; r < 12; ++r) {
      if (std::abs(v[r]) > 1e-8) {
        CHECK(std::abs(v[r].imag()) <= 1e-12);
        CHECK(v[r].real() > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("interlacing holds between a matrix and its minor") {
  wigner::ensemble::EntryDistributionSpec spec;
  const HermitianMatrix h = wigner::ensemble::sample_wigner(10, spec, 64);
  const auto full = eig::eigh(h, false);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto md = minor(h, k);
    const auto small = eig::eigh(md.b, false);
    const auto report = eig::interlacing_check(full, small);
    INFO("k ", k);
    CHECK(report.ok);
    CHECK(report.worst_violation == 0.0);
  }
}

TEST_CASE("interlacing tolerates full degeneracy") {
  HermitianMatrix h(5);
  for (std::size_t i = 0; i < 5; ++i) h(i, i) = 0.7;
  const auto full = eig::eigh(h, false);
  const auto small = eig::eigh(minor(h, 2).b, false);
  CHECK(eig::interlacing_check(full, small).ok);
}

TEST_CASE("non-Hermitian input is rejected with zero tolerance") {
  HermitianMatrix h(2);
  h(0, 1) = 1.0;
  h(1, 0) = 2.0;
  CHECK_THROWS_AS(eig::tridiagonalize(h), std::invalid_argument);
  CHECK_THROWS_AS(eig::eigh(h, false), std::invalid_argument);

  HermitianMatrix g(2);
  g(0, 0) = complex<double>(0.0, 1e-300);
  CHECK_THROWS_AS(eig::eigh(g, false), std::invalid_argument);
}

TEST_CASE("a QL iteration that cannot deflate raises a solver error") {
  eig::TridiagonalForm t;
  t.n = 3;
  t.d = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  t.e = {1.0, 1.0};
  CHECK_THROWS_AS(eig::tridiagonal_eigen(t, false), eig::SolverError);
  try {
    eig::tridiagonal_eigen(t, false);
  } catch (const eig::SolverError& err) {
    CHECK(err.stuck_index < 3);
  }
}

TEST_CASE("one-dimensional input is a fixed point") {
  HermitianMatrix h(1);
  h(0, 0) = -0.75;
  const auto res = eig::eigh(h, true);
  CHECK(res.eigenvalues[0] == -0.75);
  CHECK(res.vector(0)[0] == complex<double>(1.0, 0.0));
}
