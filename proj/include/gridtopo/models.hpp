#pragma once

#include <string>
#include <vector>

#include "gridtopo/lap.hpp"

namespace gridtopo {

enum class ModelKind { AC, DLPF, DC };

std::string to_string(ModelKind k);
ModelKind model_from_string(const std::string& s);  // throws schema_error

// Known measurement noise covariance R_eta (M x M, symmetric PD) with its
// inverse cached; the inverse is the weight of every model objective.
struct NoiseModel {
  Matrix r_eta;
  Matrix r_eta_inv;

  static NoiseModel from_covariance(Matrix r);  // checks SPD, inverts
  static NoiseModel isotropic(int m, double sigma2);

  // tr(R_eta)/M, the per-bus average noise power
  double sigma2_avg() const { return r_eta.trace() / static_cast<double>(r_eta.rows()); }
};

// Time series of N samples for one of the three measurement models.
// AC carries (p, q, v); DLPF carries (p, q, v_mag, theta); DC carries
// (p, theta). Fields of other models are left empty.
struct MeasurementSet {
  ModelKind model_kind = ModelKind::AC;
  int m = 0;
  int n_samples = 0;
  std::vector<Vector> p;
  std::vector<Vector> q;
  std::vector<CVector> v;
  std::vector<Vector> v_mag;
  std::vector<Vector> theta;
  NoiseModel noise;
};

// Re-expresses a measurement set under another model, deriving the voltage
// representation (v = |v| e^{j theta} in both directions). Throws
// schema_error when the target needs data the source lacks (DC has no q).
MeasurementSet convert_measurements(const MeasurementSet& meas, ModelKind target);
bool convertible_to(const MeasurementSet& meas, ModelKind target);

// The objective in vec coordinates:
//   psi(G, Bt) = 1/2 g' H1 g + g' H2 b + 1/2 b' H4 b + h1' g + h2' b + const
// with g = vec(G), b = vec(Bt) and H3 = H2' so that the gradient pair is
// (H1 g + H2 b + h1, H3 g + H4 b + h2).
struct QuadraticForm {
  int m = 0;
  Matrix h1_mat, h2_mat, h3_mat, h4_mat;  // M^2 x M^2
  Vector h1_vec, h2_vec;                  // M^2
  double const_term = 0.0;
  bool estimates_g = true;
};

// One sample of the generic weighted residual  scale/2 * |a1 + A1 G a2 + A2 Bt a3|^2_W.
struct PerSampleQuadratic {
  CVector a1, a2, a3;
  CMatrix big_a1, big_a2;
  Matrix weight;  // real PD
  double scale = 1.0;
};

// Accumulates the H blocks, h vectors and constant of the summed generic
// residuals. Every model builder is a special case of this expansion.
QuadraticForm assemble_from_samples(const std::vector<PerSampleQuadratic>& samples);

// psi_AC = sum_n |(p+jq) - diag(v)(G+jBt)v*|^2_{R^-1}
QuadraticForm build_ac(const MeasurementSet& meas);

// psi_DLPF = sum_n |p - G|v| - Bt theta|^2_{R^-1} + |q + G theta - Bt|v||^2_{R^-1}
QuadraticForm build_dlpf(const MeasurementSet& meas);

// psi_DC = sum_n |p - Bt theta|^2_{R^-1}; only Bt is estimable
QuadraticForm build_dc(const MeasurementSet& meas);

QuadraticForm build_model(const MeasurementSet& meas);  // dispatch on model_kind

double eval_objective(const QuadraticForm& q, const Matrix& g, const Matrix& b_tilde);

// Returns (H1 g + H2 b + h1, H3 g + H4 b + h2).
std::pair<Vector, Vector> grad_objective(const QuadraticForm& q, const Matrix& g,
                                         const Matrix& b_tilde);

}  // namespace gridtopo
