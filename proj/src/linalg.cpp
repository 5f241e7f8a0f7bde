#include "chiral/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(who) + ": matrix is " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected square");
  }
}

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

ComplexMatrix make_matrix(std::size_t rows, std::size_t cols,
                          std::span<const Complex> row_major) {
  if (rows * cols != row_major.size()) {
    throw ValidationError("make_matrix: " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " needs " +
                          std::to_string(rows * cols) + " entries, got " +
                          std::to_string(row_major.size()));
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row_major[r * cols + c];
  if (!all_finite(m)) throw ValidationError("make_matrix: non-finite entry");
  return m;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

SpectrumResult eig_general(const ComplexMatrix& m) {
  require_square(m, "eig_general");
  if (!all_finite(m)) throw ValidationError("eig_general: non-finite entry");
  const Eigen::Index n = m.rows();

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_general: QR iteration did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return complex_less(vals(a), vals(b));
  });

  SpectrumResult out;
  out.eigenvalues.reserve(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues.push_back(vals(src));
    ComplexVector v = solver.eigenvectors().col(src);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    out.eigenvectors.col(k) = v;
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(out.eigenvectors);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  out.eigvec_condition =
      smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.near_defective = out.eigvec_condition > kDefectiveCondition;
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: QR iteration did not converge");
  }
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + m.rows());
  sort_complex(out);
  return out;
}

double max_residual(const ComplexMatrix& m, const SpectrumResult& s) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const auto col = s.eigenvectors.col(static_cast<Eigen::Index>(k));
    worst = std::max(worst, (m * col - s.eigenvalues[k] * col).norm());
  }
  return worst;
}

ComplexMatrix expm(const ComplexMatrix& m) {
  require_square(m, "expm");
  return m.exp();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0) {
    throw ValidationError("unvec: length " + std::to_string(v.size()) +
                          " not divisible by " + std::to_string(rows));
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, v.size() / rows);
}

void sort_complex(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), complex_less);
}

double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) {
    throw ValidationError("match_distance: sets differ in size");
  }
  double worst = 0.0;
  while (!a.empty()) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = std::abs(a[i] - b[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    worst = std::max(worst, best);
    a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return worst;
}

}  // namespace chiral
