#include "gridtopo/models.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>

#include "gridtopo/errors.hpp"
#include "gridtopo/linalg.hpp"

namespace gridtopo {

using namespace std::complex_literals;

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::AC: return "ac";
    case ModelKind::DLPF: return "dlpf";
    case ModelKind::DC: return "dc";
  }
  return "?";
}

ModelKind model_from_string(const std::string& s) {
  if (s == "ac") return ModelKind::AC;
  if (s == "dlpf") return ModelKind::DLPF;
  if (s == "dc") return ModelKind::DC;
  throw schema_error("unknown model '" + s + "' (expected ac, dlpf or dc)");
}

NoiseModel NoiseModel::from_covariance(Matrix r) {
  if (r.rows() != r.cols()) throw schema_error("noise covariance must be square");
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()))
    throw schema_error("noise covariance must be symmetric");
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success)
    throw schema_error("noise covariance must be positive definite");
  NoiseModel nm;
  nm.r_eta_inv = llt.solve(Matrix::Identity(r.rows(), r.cols()));
  nm.r_eta = std::move(r);
  return nm;
}

NoiseModel NoiseModel::isotropic(int m, double sigma2) {
  if (!(sigma2 > 0.0)) throw schema_error("sigma2 must be positive");
  NoiseModel nm;
  nm.r_eta = sigma2 * Matrix::Identity(m, m);
  nm.r_eta_inv = (1.0 / sigma2) * Matrix::Identity(m, m);
  return nm;
}

bool convertible_to(const MeasurementSet& meas, ModelKind target) {
  switch (target) {
    case ModelKind::AC:
    case ModelKind::DLPF:
      // need reactive power and a full voltage representation
      return !meas.q.empty() && (!meas.v.empty() || (!meas.v_mag.empty() && !meas.theta.empty()));
    case ModelKind::DC:
      return !meas.theta.empty() || !meas.v.empty();
  }
  return false;
}

MeasurementSet convert_measurements(const MeasurementSet& meas, ModelKind target) {
  if (!convertible_to(meas, target))
    throw schema_error("measurements for model '" + to_string(meas.model_kind) +
                       "' cannot serve the '" + to_string(target) + "' estimator");
  MeasurementSet out;
  out.model_kind = target;
  out.m = meas.m;
  out.n_samples = meas.n_samples;
  out.noise = meas.noise;
  out.p = meas.p;

  auto phasor = [&](int n) -> CVector {
    if (!meas.v.empty()) return meas.v[n];
    CVector vn(meas.m);
    for (int i = 0; i < meas.m; ++i)
      vn(i) = meas.v_mag[n](i) * std::exp(1i * meas.theta[n](i));
    return vn;
  };
  auto angles = [&](int n) -> Vector {
    if (!meas.theta.empty()) return meas.theta[n];
    return meas.v[n].array().arg().matrix();
  };

  switch (target) {
    case ModelKind::AC:
      out.q = meas.q;
      out.v.reserve(meas.n_samples);
      for (int n = 0; n < meas.n_samples; ++n) out.v.push_back(phasor(n));
      break;
    case ModelKind::DLPF:
      out.q = meas.q;
      out.v_mag.reserve(meas.n_samples);
      out.theta.reserve(meas.n_samples);
      for (int n = 0; n < meas.n_samples; ++n) {
        if (!meas.v_mag.empty()) {
          out.v_mag.push_back(meas.v_mag[n]);
        } else {
          out.v_mag.push_back(meas.v[n].cwiseAbs());
        }
        out.theta.push_back(angles(n));
      }
      break;
    case ModelKind::DC:
      out.theta.reserve(meas.n_samples);
      for (int n = 0; n < meas.n_samples; ++n) out.theta.push_back(angles(n));
      break;
  }
  return out;
}

QuadraticForm assemble_from_samples(const std::vector<PerSampleQuadratic>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples to assemble");
  const int m = static_cast<int>(samples.front().a1.size());
  const int mm = m * m;
  QuadraticForm q;
  q.m = m;
  q.h1_mat = Matrix::Zero(mm, mm);
  q.h2_mat = Matrix::Zero(mm, mm);
  q.h3_mat = Matrix::Zero(mm, mm);
  q.h4_mat = Matrix::Zero(mm, mm);
  q.h1_vec = Vector::Zero(mm);
  q.h2_vec = Vector::Zero(mm);

  for (const auto& s : samples) {
    if (s.a1.size() != m || s.a2.size() != m || s.a3.size() != m ||
        s.big_a1.rows() != m || s.big_a1.cols() != m ||
        s.big_a2.rows() != m || s.big_a2.cols() != m ||
        s.weight.rows() != m || s.weight.cols() != m)
      throw std::invalid_argument("sample dimension mismatch");

    const CMatrix wc = s.weight.cast<std::complex<double>>();
    const CMatrix wa1 = s.big_a1.adjoint() * wc;  // A1^H W
    const CMatrix wa2 = s.big_a2.adjoint() * wc;  // A2^H W
    const CMatrix d11 = wa1 * s.big_a1;
    const CMatrix d12 = wa1 * s.big_a2;
    const CMatrix d21 = wa2 * s.big_a1;
    const CMatrix d22 = wa2 * s.big_a2;
    const CMatrix p22 = s.a2.conjugate() * s.a2.transpose();
    const CMatrix p23 = s.a2.conjugate() * s.a3.transpose();
    const CMatrix p32 = s.a3.conjugate() * s.a2.transpose();
    const CMatrix p33 = s.a3.conjugate() * s.a3.transpose();

    add_kron_real(q.h1_mat, s.scale, p22, d11);
    add_kron_real(q.h2_mat, s.scale, p23, d12);
    add_kron_real(q.h3_mat, s.scale, p32, d21);
    add_kron_real(q.h4_mat, s.scale, p33, d22);

    const CVector y1 = wa1 * s.a1;
    const CVector y2 = wa2 * s.a1;
    const CMatrix g1 = y1 * s.a2.adjoint();
    const CMatrix g2 = y2 * s.a3.adjoint();
    q.h1_vec += s.scale * Eigen::Map<const CVector>(g1.data(), mm).real();
    q.h2_vec += s.scale * Eigen::Map<const CVector>(g2.data(), mm).real();

    q.const_term += 0.5 * s.scale * std::real(s.a1.dot(wc * s.a1));
  }
  return q;
}

static void check_noise(const MeasurementSet& meas) {
  if (meas.m < 1 || meas.n_samples < 1) throw schema_error("empty measurement set");
  if (meas.noise.r_eta_inv.rows() != meas.m || meas.noise.r_eta_inv.cols() != meas.m)
    throw schema_error("measurement set carries no noise model of matching size");
}

QuadraticForm build_ac(const MeasurementSet& meas) {
  if (meas.model_kind != ModelKind::AC) throw schema_error("build_ac needs AC measurements");
  check_noise(meas);
  const int m = meas.m;
  std::vector<PerSampleQuadratic> samples;
  samples.reserve(meas.n_samples);
  for (int n = 0; n < meas.n_samples; ++n) {
    PerSampleQuadratic s;
    s.a1 = meas.p[n].cast<std::complex<double>>() + 1i * meas.q[n].cast<std::complex<double>>();
    const CVector neg_v = -meas.v[n];
    const CVector neg_jv = -1i * meas.v[n];
    s.big_a1 = CMatrix(neg_v.asDiagonal());
    s.a2 = meas.v[n].conjugate();
    s.big_a2 = CMatrix(neg_jv.asDiagonal());
    s.a3 = meas.v[n].conjugate();
    s.weight = meas.noise.r_eta_inv;
    s.scale = 2.0;
    samples.push_back(std::move(s));
  }
  (void)m;
  QuadraticForm q = assemble_from_samples(samples);
  q.estimates_g = true;
  return q;
}

QuadraticForm build_dlpf(const MeasurementSet& meas) {
  if (meas.model_kind != ModelKind::DLPF) throw schema_error("build_dlpf needs DLPF measurements");
  check_noise(meas);
  const int m = meas.m;
  const Matrix& w = meas.noise.r_eta_inv;
  // All samples share the weight, so the sums over n are formed first and a
  // single Kronecker product assembles each block.
  Matrix svv = Matrix::Zero(m, m), stt = Matrix::Zero(m, m), svt = Matrix::Zero(m, m);
  Matrix spv = Matrix::Zero(m, m), spt = Matrix::Zero(m, m);
  Matrix sqv = Matrix::Zero(m, m), sqt = Matrix::Zero(m, m);
  double cst = 0.0;
  for (int n = 0; n < meas.n_samples; ++n) {
    const Vector& a = meas.v_mag[n];
    const Vector& t = meas.theta[n];
    svv.noalias() += a * a.transpose();
    stt.noalias() += t * t.transpose();
    svt.noalias() += a * t.transpose();
    spv.noalias() += meas.p[n] * a.transpose();
    spt.noalias() += meas.p[n] * t.transpose();
    sqv.noalias() += meas.q[n] * a.transpose();
    sqt.noalias() += meas.q[n] * t.transpose();
    cst += meas.p[n].dot(w * meas.p[n]) + meas.q[n].dot(w * meas.q[n]);
  }
  QuadraticForm q;
  q.m = m;
  q.h1_mat = kron(2.0 * (svv + stt), w);
  q.h2_mat = kron(2.0 * (svt - svt.transpose()), w);
  q.h3_mat = q.h2_mat.transpose();
  q.h4_mat = q.h1_mat;
  const Matrix m1 = 2.0 * (w * (sqt - spv));
  const Matrix m2 = -2.0 * (w * (spt + sqv));
  q.h1_vec = vec(m1);
  q.h2_vec = vec(m2);
  q.const_term = cst;
  q.estimates_g = true;
  return q;
}

QuadraticForm build_dc(const MeasurementSet& meas) {
  if (meas.model_kind != ModelKind::DC) throw schema_error("build_dc needs DC measurements");
  check_noise(meas);
  const int m = meas.m;
  const int mm = m * m;
  const Matrix& w = meas.noise.r_eta_inv;
  Matrix stt = Matrix::Zero(m, m), spt = Matrix::Zero(m, m);
  double cst = 0.0;
  for (int n = 0; n < meas.n_samples; ++n) {
    const Vector& t = meas.theta[n];
    stt.noalias() += t * t.transpose();
    spt.noalias() += meas.p[n] * t.transpose();
    cst += meas.p[n].dot(w * meas.p[n]);
  }
  QuadraticForm q;
  q.m = m;
  q.h1_mat = Matrix::Zero(mm, mm);
  q.h2_mat = Matrix::Zero(mm, mm);
  q.h3_mat = Matrix::Zero(mm, mm);
  q.h4_mat = kron(2.0 * stt, w);
  q.h1_vec = Vector::Zero(mm);
  const Matrix m2 = -2.0 * (w * spt);
  q.h2_vec = vec(m2);
  q.const_term = cst;
  q.estimates_g = false;
  return q;
}

QuadraticForm build_model(const MeasurementSet& meas) {
  switch (meas.model_kind) {
    case ModelKind::AC: return build_ac(meas);
    case ModelKind::DLPF: return build_dlpf(meas);
    case ModelKind::DC: return build_dc(meas);
  }
  throw schema_error("unknown model kind");
}

static void check_dims(const QuadraticForm& q, const Matrix& g, const Matrix& b) {
  if (g.rows() != q.m || g.cols() != q.m || b.rows() != q.m || b.cols() != q.m)
    throw std::invalid_argument("iterate dimensions do not match the quadratic form");
}

double eval_objective(const QuadraticForm& q, const Matrix& g, const Matrix& b_tilde) {
  check_dims(q, g, b_tilde);
  const Vector gv = vec(g);
  const Vector bv = vec(b_tilde);
  return 0.5 * gv.dot(q.h1_mat * gv) + gv.dot(q.h2_mat * bv) +
         0.5 * bv.dot(q.h4_mat * bv) + q.h1_vec.dot(gv) + q.h2_vec.dot(bv) + q.const_term;
}

std::pair<Vector, Vector> grad_objective(const QuadraticForm& q, const Matrix& g,
                                         const Matrix& b_tilde) {
  check_dims(q, g, b_tilde);
  const Vector gv = vec(g);
  const Vector bv = vec(b_tilde);
  return {q.h1_mat * gv + q.h2_mat * bv + q.h1_vec,
          q.h3_mat * gv + q.h4_mat * bv + q.h2_vec};
}

}  // namespace gridtopo
