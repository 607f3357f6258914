#include "sqlab/complex_matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqlab {

namespace {
void require_dim(int dim) {
  if (dim != 2 && dim != 4) throw std::invalid_argument("matrix dimension must be 2 or 4");
}
}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  int dim = static_cast<int>(rows.size());
  require_dim(dim);
  ComplexMatrix m(dim);
  int r = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim)
      throw std::invalid_argument("matrix rows must be square");
    int c = 0;
    for (cplx v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
  ComplexMatrix m(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) m.a_[static_cast<size_t>(i)] = a_[static_cast<size_t>(i)] + o.a_[static_cast<size_t>(i)];
  return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
  ComplexMatrix m(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) m.a_[static_cast<size_t>(i)] = a_[static_cast<size_t>(i)] - o.a_[static_cast<size_t>(i)];
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
  ComplexMatrix m(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int k = 0; k < dim_; ++k) {
      cplx v = at(r, k);
      if (v == cplx{}) continue;
      for (int c = 0; c < dim_; ++c) m.at(r, c) += v * o.at(k, c);
    }
  return m;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
  ComplexMatrix m(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) m.a_[static_cast<size_t>(i)] = a_[static_cast<size_t>(i)] * s;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m.at(c, r) = std::conj(at(r, c));
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(a_[static_cast<size_t>(i)]));
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
  return true;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2)
    throw std::invalid_argument("kron expects two single-qubit operators");
  ComplexMatrix m(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m.at(2 * i + k, 2 * j + l) = a.at(i, j) * b.at(k, l);
  return m;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.is_hermitian(1e-9)) throw std::invalid_argument("matrix is not Hermitian");
  int n = m.dim();
  Eigen::MatrixXcd e(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) e(r, c) = m.at(r, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solve failed");
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

}  // namespace sqlab
