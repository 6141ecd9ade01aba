#include "gridtopo/linalg.hpp"

namespace gridtopo {

Matrix kron(const Matrix& a, const Matrix& b) {
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Matrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

void add_kron_real(Matrix& dst, double s, const CMatrix& p, const CMatrix& d) {
  const auto pr = p.rows(), pc = p.cols(), dr = d.rows(), dc = d.cols();
  const Matrix dre = s * d.real();
  const Matrix dim = s * d.imag();
  for (Eigen::Index i = 0; i < pr; ++i) {
    for (Eigen::Index j = 0; j < pc; ++j) {
      // Re{p_ij * d} = Re(p_ij) Re(d) - Im(p_ij) Im(d)
      dst.block(i * dr, j * dc, dr, dc).noalias() += p(i, j).real() * dre;
      dst.block(i * dr, j * dc, dr, dc).noalias() -= p(i, j).imag() * dim;
    }
  }
}

Matrix commutation_matrix(int m) {
  Matrix k = Matrix::Zero(m * m, m * m);
  // vec index of X(i,j) is i + j*m; K maps it to the vec index of X'(j,i)
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      k(j + i * m, i + j * m) = 1.0;
  return k;
}

}  // namespace gridtopo
