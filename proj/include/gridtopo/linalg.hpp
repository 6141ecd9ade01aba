#pragma once

#include "gridtopo/lap.hpp"

namespace gridtopo {

// Column-major stacking, vec(X)(i + j*m) = X(i, j).
inline Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvec(const Vector& v, int m) {
  return Eigen::Map<const Matrix>(v.data(), m, m);
}

// Dense Kronecker product, block (i,j) of the result is a(i,j)*b.
Matrix kron(const Matrix& a, const Matrix& b);

// dst += s * Re{p (x) d} for complex p, d; dst must be preallocated.
void add_kron_real(Matrix& dst, double s, const CMatrix& p, const CMatrix& d);

// Commutation matrix K with K vec(X) = vec(X'); symmetric permutation.
Matrix commutation_matrix(int m);

}  // namespace gridtopo
