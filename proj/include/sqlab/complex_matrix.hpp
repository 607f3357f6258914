#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

namespace sqlab {

using cplx = std::complex<double>;

// Dense row-major complex matrix of dimension 2 or 4: one- and two-qubit
// operators. Small enough that everything is by value.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(int dim);  // zero-filled
  static ComplexMatrix identity(int dim);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

  int dim() const { return dim_; }
  cplx& at(int r, int c) { return a_[static_cast<size_t>(r * dim_ + c)]; }
  const cplx& at(int r, int c) const { return a_[static_cast<size_t>(r * dim_ + c)]; }

  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexMatrix operator*(cplx s) const;
  ComplexMatrix adjoint() const;
  cplx trace() const;
  double max_abs() const;
  bool is_hermitian(double tol) const;

 private:
  int dim_;
  std::array<cplx, 16> a_{};
};

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }

// Tensor product of two single-qubit operators, first factor = leading index.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

}  // namespace sqlab
