#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "gridtopo/errors.hpp"
#include "gridtopo/lap.hpp"
#include "gridtopo/rng.hpp"
#include "helpers.hpp"

using namespace gridtopo;

TEST_CASE("is_laplacian accepts textbook cases and rejects each violation") {
  Matrix ok(2, 2);
  ok << 1.0, -1.0, -1.0, 1.0;
  CHECK(is_laplacian(ok, kLapTol));

  CHECK(is_laplacian(Matrix::Zero(3, 3), kLapTol));
  CHECK(is_laplacian(Matrix::Zero(1, 1), kLapTol));

  std::string why;
  Matrix asym = ok;
  asym(0, 1) = -0.5;
  CHECK_FALSE(is_laplacian(asym, kLapTol, &why));

  Matrix pos(2, 2);
  pos << -1.0, 1.0, 1.0, -1.0;
  CHECK_FALSE(is_laplacian(pos, kLapTol, &why));
  CHECK(why == "positive off-diagonal");

  Matrix rowsum(2, 2);
  rowsum << 2.0, -1.0, -1.0, 1.0;
  CHECK_FALSE(is_laplacian(rowsum, kLapTol, &why));

  CHECK_FALSE(is_laplacian(Matrix::Zero(2, 3), kLapTol));
}

TEST_CASE("build_admittance places line values symmetrically with negated row sums") {
  LineList lines;
  lines.m = 3;
  lines.lines = {{1, 2, 0.5, 2.0}, {2, 3, 0.25, 1.0}};
  ComplexAdmittance adm = build_admittance(lines);

  CHECK(adm.g.entries(0, 1) == -0.5);
  CHECK(adm.g.entries(1, 0) == -0.5);
  CHECK(adm.g.entries(0, 0) == 0.5);
  CHECK(adm.g.entries(1, 1) == 0.75);
  CHECK(adm.g.entries(0, 2) == 0.0);
  CHECK(adm.b_tilde.entries(1, 2) == -1.0);
  CHECK(adm.b_tilde.entries(1, 1) == 3.0);
  CHECK(is_laplacian(adm.g.entries, kLapTol));
  CHECK(is_laplacian(adm.b_tilde.entries, kLapTol));
}

TEST_CASE("build_admittance rejects bad input") {
  LineList dup;
  dup.m = 2;
  dup.lines = {{1, 2, 0.1, 0.2}, {2, 1, 0.3, 0.4}};
  CHECK_THROWS_AS(build_admittance(dup), schema_error);

  LineList range;
  range.m = 2;
  range.lines = {{1, 3, 0.1, 0.2}};
  CHECK_THROWS_AS(build_admittance(range), schema_error);

  LineList self;
  self.m = 2;
  self.lines = {{1, 1, 0.1, 0.2}};
  CHECK_THROWS_AS(build_admittance(self), schema_error);

  LineList neg;
  neg.m = 2;
  neg.lines = {{1, 2, -0.1, 0.2}};
  CHECK_THROWS_AS(build_admittance(neg), schema_error);
}

TEST_CASE("project_to_laplacian output always satisfies the set membership") {
  Rng rng(4711);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 5));
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = rng.normal(0.0, 2.0);
    RealLaplacian p = project_to_laplacian(a);
    std::string why;
    CHECK_MESSAGE(is_laplacian(p.entries, kLapTol, &why), why);
    // bitwise symmetry, not just within tolerance
    CHECK(p.entries == Matrix(p.entries.transpose()));
    // PSD up to roundoff: Gershgorin gives nonnegative spectrum
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p.entries);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, p.entries.trace()));
  }
}

TEST_CASE("project_to_laplacian is identity on members") {
  ComplexAdmittance adm = testutil::random_admittance(5, 99);
  RealLaplacian p = project_to_laplacian(adm.g.entries);
  CHECK((p.entries - adm.g.entries).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("threshold_offdiag prunes below tau = min diag / m and repairs the diagonal") {
  // diagonals (1.0, 1.7, 0.9) -> tau = 0.9/3 = 0.3: the 0.1 edge goes, the rest stay
  Matrix x(3, 3);
  x << 1.0, -0.9, -0.1, -0.9, 1.7, -0.8, -0.1, -0.8, 0.9;
  RealLaplacian lap = project_to_laplacian(x);
  CHECK((lap.entries - x).cwiseAbs().maxCoeff() <= 1e-15);  // already a member
  RealLaplacian t = threshold_offdiag(lap);
  CHECK(t.entries(0, 2) == 0.0);
  CHECK(t.entries(2, 0) == 0.0);
  CHECK(t.entries(0, 1) == doctest::Approx(-0.9));
  CHECK(t.entries(1, 2) == doctest::Approx(-0.8));
  CHECK(t.entries(0, 0) == doctest::Approx(0.9));
  CHECK(t.entries(2, 2) == doctest::Approx(0.8));
  CHECK(is_laplacian(t.entries, kLapTol));
}

TEST_CASE("threshold_offdiag leaves matrices with a non-positive tau alone") {
  RealLaplacian zero(3, Matrix::Zero(3, 3));
  RealLaplacian t = threshold_offdiag(zero);
  CHECK(t.entries == Matrix::Zero(3, 3));
}

TEST_CASE("fscore on hand-built supports") {
  SupportSet truth, est;
  truth.m = est.m = 4;
  truth.edges = {{1, 2}, {2, 3}, {3, 4}};
  est.edges = {{1, 2}, {2, 3}, {1, 4}};
  // tp=2, fp=1, fn=1 -> 4/6
  CHECK(fscore(truth, est) == doctest::Approx(4.0 / 6.0));

  SupportSet empty;
  empty.m = 4;
  CHECK(fscore(empty, empty) == 1.0);
  CHECK(fscore(truth, empty) == 0.0);
  CHECK(fscore(empty, est) == 0.0);

  SupportSet other;
  other.m = 5;
  CHECK_THROWS_AS(fscore(truth, other), std::invalid_argument);
}

TEST_CASE("fscore of disjoint same-size supports is 0, identical supports 1") {
  SupportSet a, b;
  a.m = b.m = 5;
  a.edges = {{1, 2}, {3, 4}};
  b.edges = {{1, 3}, {2, 4}};
  CHECK(fscore(a, b) == 0.0);
  CHECK(fscore(a, a) == 1.0);
}

TEST_CASE("mse on a fixed pair") {
  Matrix a(2, 2), b(2, 2);
  a << 1.0, -1.0, -1.0, 1.0;
  b << 0.5, -0.25, -0.75, 1.5;
  CHECK(mse(a, b) == doctest::Approx(0.28125).epsilon(1e-14));
  CHECK(mse(a, a) == 0.0);
  CHECK_THROWS_AS(mse(a, Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("support_of reports strictly-above-tol upper edges as 1-based pairs") {
  Matrix x(3, 3);
  x << 1.0, -1.0, 0.0, -1.0, 1.5, -0.5, 0.0, -0.5, 0.5;
  SupportSet s = support_of(RealLaplacian(3, x));
  CHECK(s.edges == std::set<std::pair<int, int>>{{1, 2}, {2, 3}});

  SupportSet loose = support_of(RealLaplacian(3, x), 0.7);
  CHECK(loose.edges == std::set<std::pair<int, int>>{{1, 2}});
}

TEST_CASE("magnitude_ratio averages |b|/|g| over jointly nonzero entries") {
  Matrix g(3, 3), b(3, 3);
  g << 2.0, -2.0, 0.0, -2.0, 3.0, -1.0, 0.0, -1.0, 1.0;
  b << 4.0, -4.0, 0.0, -4.0, 5.0, -1.0, 0.0, -1.0, 1.0;
  // (2 + 2 + 2 + 5/3 + 1 + 1 + 1) / 7 = 32/21
  CHECK(magnitude_ratio(RealLaplacian(3, g), RealLaplacian(3, b)) ==
        doctest::Approx(32.0 / 21.0).epsilon(1e-14));

  CHECK_THROWS_AS(magnitude_ratio(RealLaplacian(3, Matrix::Zero(3, 3)),
                                  RealLaplacian(3, b)),
                  numerical_error);
}
