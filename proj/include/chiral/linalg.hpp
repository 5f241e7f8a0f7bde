#pragma once

// Dense complex kernels for 2..16 dimensional operators.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace chiral {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Builds a matrix from row-major entries; throws ValidationError on a size
/// mismatch or any non-finite entry.
ComplexMatrix make_matrix(std::size_t rows, std::size_t cols,
                          std::span<const Complex> row_major);

bool all_finite(const ComplexMatrix& m);

/// Eigen-decomposition of a general (non-Hermitian) square matrix.
struct SpectrumResult {
  std::vector<Complex> eigenvalues;  // sorted by (real, imag)
  ComplexMatrix eigenvectors;        // unit columns, same order
  double eigvec_condition = 0.0;     // 2-norm condition of eigenvectors
  bool near_defective = false;       // eigvec_condition > kDefectiveCondition
};

inline constexpr double kDefectiveCondition = 1e8;

/// Complex Schur route (Hessenberg reduction + shifted QR) followed by
/// back-substitution. Residuals are ~1e-15 |m| for diagonalizable input and
/// degrade towards sqrt(eps) |m| at exceptional points, which is what
/// near_defective flags.
SpectrumResult eig_general(const ComplexMatrix& m);

/// Eigenvalues only, same ordering as eig_general.
std::vector<Complex> eigenvalues(const ComplexMatrix& m);

/// Largest |m v - lambda v| over the returned pairs.
double max_residual(const ComplexMatrix& m, const SpectrumResult& s);

/// e^m by Pade scaling-and-squaring. Never diagonalizes, so defective m is
/// fine.
ComplexMatrix expm(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vectorization and its inverse.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows);

/// Sorts in place by (real part, imaginary part).
void sort_complex(std::vector<Complex>& values);

/// Minimal-distance matching of two equally sized sets; returns the largest
/// matched distance. Greedy on the global smallest remaining pair.
double match_distance(std::vector<Complex> a, std::vector<Complex> b);

}  // namespace chiral
