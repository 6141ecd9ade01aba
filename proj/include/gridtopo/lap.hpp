#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gridtopo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Relative tolerance for Laplacian membership checks (row sums, symmetry).
inline constexpr double kLapTol = 1e-9;

// Member of the set L: symmetric, zero row sums, non-positive off-diagonals,
// hence positive semi-definite by diagonal dominance.
struct RealLaplacian {
  int m = 0;
  Matrix entries;  // m x m

  RealLaplacian() = default;
  RealLaplacian(int m_, Matrix e) : m(m_), entries(std::move(e)) {}
};

// Y = G + jB with G and B_tilde = -B both real Laplacians.
struct ComplexAdmittance {
  RealLaplacian g;        // conductance Laplacian
  RealLaplacian b_tilde;  // minus-susceptance Laplacian
};

// Unordered off-diagonal edge set, 1-based bus pairs stored as (min, max).
struct SupportSet {
  int m = 0;
  std::set<std::pair<int, int>> edges;
};

// Branch list of a grid case; one row per line, 1-based bus indices.
struct LineList {
  struct Line {
    int from = 0;
    int to = 0;
    double g_line = 0.0;       // series conductance, per unit
    double b_tilde_line = 0.0; // series minus-susceptance, per unit
  };
  int m = 0;
  std::vector<Line> lines;
};

// Checks the four Laplacian invariants; on failure fills *why if given.
bool is_laplacian(const Matrix& a, double tol = kLapTol, std::string* why = nullptr);

// Builds G and B_tilde from a line list with the standard sign convention:
// off-diagonal (i,j) = -line admittance, diagonal = minus the row's
// off-diagonal sum. Throws schema_error on a duplicate line for a pair.
ComplexAdmittance build_admittance(const LineList& lines);

// Maps an arbitrary square matrix into L: symmetrize, clip off-diagonals to
// non-positive, then set the diagonal from the row off-diagonal sums. The
// diagonal comes last so all invariants hold exactly at exit.
RealLaplacian project_to_laplacian(const Matrix& a);

// Prunes off-diagonals smaller in magnitude than tau = min(diag)/M and
// recomputes the diagonal. Identity when the diagonal is not strictly
// positive (tau <= 0 prunes nothing).
RealLaplacian threshold_offdiag(const RealLaplacian& a);

// F-score 2tp/(2tp+fp+fn) over unordered edge pairs; 1 when both are empty.
double fscore(const SupportSet& truth, const SupportSet& est);

// (1/M^2) * trace((est-truth)^T (est-truth)), the elementwise mean square.
double mse(const Matrix& truth, const Matrix& est);

// Edges (i,j) with |a[i][j]| > tol.
SupportSet support_of(const RealLaplacian& a, double tol = 0.0);

// Mean of |b_tilde[i][j]| / |g[i][j]| over entries where both are nonzero,
// diagonal included. Throws numerical_error when no entry qualifies.
double magnitude_ratio(const RealLaplacian& g, const RealLaplacian& b_tilde);

}  // namespace gridtopo
