#pragma once

#include <tuple>

#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"

namespace gridtopo {

struct OracleConfig {
  int max_iters = 50000;
  double tol = 1e-12;       // relative objective-change stop
  int dykstra_iters = 200;
  double step_safety = 0.9; // step = safety / L with L a curvature bound
};

// Dykstra alternation between the affine set {symmetric, zero row sums}
// (closed-form orthogonal projection) and the cone {off-diagonals <= 0}
// (clip). Converges to the exact projection onto the intersection.
Matrix project_feasible(const Matrix& a, int iters = 200);

// Reference solver for the convex constrained problem: projected gradient
// with backtracking on the quadratic objective plus the trace regularizers.
// Deliberately slow and simple; limited to M <= 8.
std::tuple<Matrix, Matrix, double> oracle_solve(const QuadraticForm& q, double lambda_g,
                                                double lambda_b, const OracleConfig& cfg = {});

}  // namespace gridtopo
