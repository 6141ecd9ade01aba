#pragma once

#include <Eigen/Cholesky>
#include <utility>
#include <vector>

#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"

namespace gridtopo {

struct AlmConfig {
  double rho = 1e-4;       // penalty parameter
  double lambda_g = -1.0;  // l1 weight on G; negative means auto (see resolve_lambda)
  double lambda_b = -1.0;  // l1 weight on B_tilde
  int max_iters = 100;
  double eps = 0.01;       // threshold on the squared Frobenius iterate changes
  double jitter = 1e-10;   // relative diagonal regularizer for singular systems
  bool threshold = true;   // apply the tau pruning step during finalization
};

// Default l1 weight sigma_hat^2 * sqrt(log M / N) when the config carries the
// auto sentinel; sigma_hat^2 is the average diagonal of R_eta.
double resolve_lambda(double lambda, const NoiseModel& noise, int m, int n_samples);

struct AlmState {
  Matrix g, b_tilde;       // primal iterates
  Vector mu_g, mu_b;       // row-sum multipliers
  Matrix v_g, v_b;         // symmetry multipliers
  Matrix lam_g, lam_b;     // inequality multipliers, entrywise >= 0
  int iter = 0;

  static AlmState zeros(int m);
};

struct AlmReport {
  RealLaplacian g_hat, b_hat_tilde;  // finalized outputs
  Matrix g_raw, b_raw;               // last primal iterates before finalization
  int iterations = 0;
  bool converged = false;
  bool has_g = true;                 // false for DC, where G is not estimated
  double lambda_g_used = 0.0, lambda_b_used = 0.0;
  std::vector<double> change_g_sq, change_b_sq;  // squared Frobenius changes per iteration
  std::vector<double> objective;                 // constrained objective per iteration
};

// E = 11' (x) I + 2I - 2K; symmetric PSD, annihilates vec of symmetric
// zero-row-sum matrices.
Matrix build_e_matrix(int m);

// gamma = vec(mu 1' + (V - V') + lambda (I - 11'))
Vector gamma_vector(const Vector& mu, const Matrix& v_mult, double lambda, int m);

// Covariance-based starting point: clips positive off-diagonals of the
// sample covariances of Re/Im of the voltage proxy and restores zero row
// sums. Returns (G0, B0).
std::pair<Matrix, Matrix> init_from_samples(const MeasurementSet& meas);

// Constrained objective of the convex problem: psi plus the trace
// regularizers lambda_G tr((I-11')G) + lambda_B tr((I-11')Bt).
double constrained_objective(const QuadraticForm& q, const Matrix& g, const Matrix& b_tilde,
                             double lambda_g, double lambda_b);

// Holds the E matrix and the four factorizations, which depend only on the
// quadratic form and rho and are therefore shared by all iterations.
class AlmSolver {
 public:
  AlmSolver(const QuadraticForm& q, const AlmConfig& cfg);

  Matrix update_g(const AlmState& s) const;
  Matrix update_b(const AlmState& s) const;
  void update_multipliers(AlmState& s) const;

  AlmReport run(const MeasurementSet& meas) const;

  const AlmConfig& config() const { return cfg_; }

 private:
  struct Factored {
    Eigen::LDLT<Matrix> plain;     // H + rho E
    Eigen::LDLT<Matrix> shifted;   // H + rho (E + I)
    Matrix a_plain, a_shifted;     // the factored matrices, for residual checks
  };

  Vector solve_checked(const Eigen::LDLT<Matrix>& f, const Matrix& a, const Vector& rhs,
                       const char* what) const;
  Matrix masked_update(const Factored& f, const Matrix& cross, const Vector& hvec,
                       const Vector& gamma, const Matrix& lam, const Matrix& other) const;

  QuadraticForm q_;
  AlmConfig cfg_;
  int m_ = 0;
  Matrix e_;
  Factored fg_, fb_;
  bool has_g_factors_ = false;
};

// Convenience wrappers matching the solver steps one to one.
Matrix update_g(const QuadraticForm& q, const AlmState& s, const AlmConfig& cfg);
Matrix update_b(const QuadraticForm& q, const AlmState& s, const AlmConfig& cfg);
AlmState update_multipliers(const AlmState& s, const AlmConfig& cfg, bool touch_g = true);

// project_to_laplacian then, when enabled, threshold_offdiag, for each matrix.
std::pair<RealLaplacian, RealLaplacian> finalize(const Matrix& g_raw, const Matrix& b_raw,
                                                 bool threshold = true);

AlmReport run_alm(const QuadraticForm& q, const MeasurementSet& meas, const AlmConfig& cfg);

}  // namespace gridtopo
