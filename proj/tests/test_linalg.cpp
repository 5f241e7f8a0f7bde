#include <array>
#include <random>

#include "chiral/errors.hpp"
#include "chiral/linalg.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace chiral;

TEST_CASE("make_matrix checks shape and finiteness") {
  const std::array<Complex, 4> entries{1.0, 2.0, 3.0, 4.0};
  const ComplexMatrix m = make_matrix(2, 2, entries);
  CHECK(m(0, 1) == Complex(2.0));
  CHECK(m(1, 0) == Complex(3.0));
  CHECK_THROWS_AS(make_matrix(2, 3, entries), ValidationError);
  const std::array<Complex, 1> bad{Complex(std::nan(""), 0.0)};
  CHECK_THROWS_AS(make_matrix(1, 1, bad), ValidationError);
}

TEST_CASE("eig_general on diagonal and Jordan inputs") {
  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d.diagonal() << 0.0, 1.01, 0.99, 2.0;
  const SpectrumResult s = eig_general(d);
  REQUIRE(s.eigenvalues.size() == 4);
  CHECK(std::abs(s.eigenvalues[0] - 0.0) < 1e-14);
  CHECK(std::abs(s.eigenvalues[1] - 0.99) < 1e-14);
  CHECK(std::abs(s.eigenvalues[2] - 1.01) < 1e-14);
  CHECK(std::abs(s.eigenvalues[3] - 2.0) < 1e-14);
  CHECK_FALSE(s.near_defective);
  CHECK(max_residual(d, s) < 1e-14);

  ComplexMatrix j(2, 2);
  j << 1.0, 1.0, 0.0, 1.0;
  const SpectrumResult sj = eig_general(j);
  CHECK(std::abs(sj.eigenvalues[0] - 1.0) < 1e-7);
  CHECK(std::abs(sj.eigenvalues[1] - 1.0) < 1e-7);
  CHECK(sj.near_defective);

  CHECK_THROWS_AS(eig_general(ComplexMatrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("eig_general properties on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    ComplexMatrix m = oracle::random_matrix(rng, n);
    m /= m.norm();
    const SpectrumResult s = eig_general(m);
    Complex sum = 0.0;
    for (const Complex& z : s.eigenvalues) sum += z;
    CHECK(std::abs(sum - m.trace()) < 1e-9);
    CHECK(max_residual(m, s) < 1e-12);
    for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
      const Complex a = s.eigenvalues[k - 1], b = s.eigenvalues[k];
      CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
    }
    for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
      CHECK(std::abs(s.eigenvectors.col(c).norm() - 1.0) < 1e-12);
    }

    const ComplexMatrix h = m + m.adjoint();
    for (const Complex& z : eigenvalues(h)) CHECK(std::abs(z.imag()) < 1e-10);
  }
}

TEST_CASE("expm closed forms") {
  CHECK((expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() == 0.0);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = Complex(0.0, 2.0);
  const ComplexMatrix e = expm(d);
  CHECK(std::abs(e(0, 0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(e(1, 1) - std::exp(Complex(0.0, 2.0))) < 1e-15);
  CHECK(std::abs(e(0, 1)) == 0.0);

  ComplexMatrix j = ComplexMatrix::Zero(2, 2);
  j(0, 1) = 1.0;
  ComplexMatrix expected(2, 2);
  expected << 1.0, 1.0, 0.0, 1.0;
  CHECK((expm(j) - expected).norm() < 1e-15);
}

TEST_CASE("expm properties on random matrices") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    ComplexMatrix m = oracle::random_matrix(rng, n);
    m *= scale(rng) / m.norm();
    const ComplexMatrix e = expm(m);
    const Complex det = e.determinant(), expected = std::exp(m.trace());
    CHECK(std::abs(det - expected) < 1e-9 * std::abs(expected));
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    CHECK((e * expm(-m) - id).norm() < 1e-9);
    const ComplexMatrix ref = oracle::taylor_expm(m);
    CHECK((e - ref).norm() < 1e-11 * ref.norm());
  }
}

TEST_CASE("kron basis bookkeeping and mixed product") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK((kron(i2, i2) - ComplexMatrix::Identity(4, 4)).norm() == 0.0);

  // sigma+ on qubit 1 maps |01> to |11>; basis {|11>, |10>, |01>, |00>}.
  ComplexMatrix sp = ComplexMatrix::Zero(2, 2);
  sp(0, 1) = 1.0;
  ComplexVector ket01 = ComplexVector::Zero(4);
  ket01(oracle::index_of(0, 1)) = 1.0;
  const ComplexVector out = kron(sp, i2) * ket01;
  CHECK(std::abs(out(oracle::index_of(1, 1)) - 1.0) < 1e-15);
  CHECK(std::abs(out.norm() - 1.0) < 1e-15);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = oracle::random_matrix(rng, 2), b = oracle::random_matrix(rng, 2);
    const ComplexMatrix c = oracle::random_matrix(rng, 2), d = oracle::random_matrix(rng, 2);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
  }
}

TEST_CASE("vec is column stacking and vec(AXB) = (B^T kron A) vec(X)") {
  std::mt19937_64 rng(14);
  const ComplexMatrix a = oracle::random_matrix(rng, 4), x = oracle::random_matrix(rng, 4),
                      b = oracle::random_matrix(rng, 4);
  const ComplexVector v = vec(x);
  CHECK(v(1) == x(1, 0));
  CHECK(v(4) == x(0, 1));
  CHECK((unvec(v, 4) - x).norm() == 0.0);
  CHECK((vec(a * x * b) - kron(b.transpose(), a) * v).norm() < 1e-12);
}

TEST_CASE("match_distance pairs sets regardless of order") {
  std::vector<Complex> a{1.0, Complex(0, 1), -2.0};
  std::vector<Complex> b{-2.0 + 1e-3, 1.0, Complex(0, 1)};
  CHECK(match_distance(a, b) == doctest::Approx(1e-3));
}
