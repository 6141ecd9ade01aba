#include "gridtopo/oracle.hpp"

#include <cmath>

#include "gridtopo/errors.hpp"
#include "gridtopo/linalg.hpp"

namespace gridtopo {

namespace {

// orthogonal projection onto {X : X = X', X1 = 0}
Matrix project_affine(const Matrix& x) {
  const double m = static_cast<double>(x.rows());
  const Matrix s = 0.5 * (x + x.transpose());
  const Vector ones = Vector::Ones(x.rows());
  const Vector u = s * ones / m - ones * (ones.dot(s * ones) / (2.0 * m * m));
  return s - u * ones.transpose() - ones * u.transpose();
}

// projection onto {X : off-diagonals <= 0}
Matrix project_cone(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (i != j && out(i, j) > 0.0) out(i, j) = 0.0;
  return out;
}

}  // namespace

Matrix project_feasible(const Matrix& a, int iters) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  const double scale = std::max(1.0, a.norm());
  Matrix x = a;
  Matrix p = Matrix::Zero(a.rows(), a.cols());
  Matrix q = p;
  for (int it = 0; it < iters; ++it) {
    const Matrix y = project_affine(x + p);
    p += x - y;
    const Matrix x_next = project_cone(y + q);
    q += y - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    if (it > 0 && change <= 1e-15 * scale) break;
  }
  return x;
}

std::tuple<Matrix, Matrix, double> oracle_solve(const QuadraticForm& q, double lambda_g,
                                                double lambda_b, const OracleConfig& cfg) {
  const int m = q.m;
  if (m > 8) throw schema_error("oracle is limited to M <= 8");
  const int mm = m * m;
  const bool with_g = q.estimates_g;
  const int dim = with_g ? 2 * mm : mm;

  // stacked operator and linear term; for DC only the B block remains
  Matrix hh(dim, dim);
  Vector hv(dim);
  // entries of I - 11': zero diagonal, -1 off the diagonal
  Matrix reg = -Matrix::Ones(m, m);
  reg.diagonal().setZero();

  if (with_g) {
    hh.topLeftCorner(mm, mm) = q.h1_mat;
    hh.topRightCorner(mm, mm) = q.h2_mat;
    hh.bottomLeftCorner(mm, mm) = q.h3_mat;
    hh.bottomRightCorner(mm, mm) = q.h4_mat;
    hv.head(mm) = q.h1_vec + lambda_g * vec(reg);
    hv.tail(mm) = q.h2_vec + lambda_b * vec(reg);
  } else {
    hh = q.h4_mat;
    hv = q.h2_vec + lambda_b * vec(reg);
  }

  // curvature bound by power iteration; deterministic start
  double curv = 0.0;
  {
    Vector z = Vector::Ones(dim);
    for (int i = 0; i < dim; ++i) z(i) += 1e-3 * (i + 1);
    z.normalize();
    for (int it = 0; it < 100; ++it) {
      Vector w = hh * z;
      const double n = w.norm();
      if (n <= 0.0) break;
      curv = n;
      z = w / n;
    }
  }
  double step = curv > 0.0 ? cfg.step_safety / curv : 1.0;

  auto split = [&](const Vector& z, Matrix& g, Matrix& b) {
    if (with_g) {
      g = unvec(z.head(mm), m);
      b = unvec(z.tail(mm), m);
    } else {
      g = Matrix::Zero(m, m);
      b = unvec(z, m);
    }
  };
  auto join = [&](const Matrix& g, const Matrix& b) {
    Vector z(dim);
    if (with_g) {
      z.head(mm) = vec(g);
      z.tail(mm) = vec(b);
    } else {
      z = vec(b);
    }
    return z;
  };
  auto project_z = [&](const Vector& z) {
    Matrix g, b;
    split(z, g, b);
    if (with_g) g = project_feasible(g, cfg.dykstra_iters);
    b = project_feasible(b, cfg.dykstra_iters);
    return join(g, b);
  };
  auto value = [&](const Vector& z, const Vector& hz) {
    return 0.5 * z.dot(hz) + hv.dot(z) + q.const_term;
  };

  Vector z = Vector::Zero(dim);  // the zero matrices are feasible
  Vector hz = hh * z;
  double f_cur = value(z, hz);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector grad = hz + hv;
    const Vector z_try = project_z(z - step * grad);
    const Vector hz_try = hh * z_try;
    const double f_try = value(z_try, hz_try);
    if (!std::isfinite(f_try)) throw numerical_error("oracle objective diverged");
    if (f_try > f_cur) {
      step *= 0.5;  // backtrack and retry from the same point
      if (step < 1e-18 / std::max(curv, 1.0)) break;
      continue;
    }
    const double drop = f_cur - f_try;
    z = z_try;
    hz = hz_try;
    f_cur = f_try;
    if (drop <= cfg.tol * (1.0 + std::abs(f_cur))) break;
  }

  Matrix g, b;
  split(z, g, b);
  return {g, b, f_cur};
}

}  // namespace gridtopo
