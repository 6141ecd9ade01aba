#include "gridtopo/alm.hpp"

#include <cmath>
#include <complex>

#include "gridtopo/errors.hpp"
#include "gridtopo/linalg.hpp"

namespace gridtopo {

using namespace std::complex_literals;

double resolve_lambda(double lambda, const NoiseModel& noise, int m, int n_samples) {
  if (lambda >= 0.0) return lambda;
  if (n_samples < 1) throw schema_error("cannot pick lambda without samples");
  return noise.sigma2_avg() * std::sqrt(std::log(static_cast<double>(m)) / n_samples);
}

AlmState AlmState::zeros(int m) {
  AlmState s;
  s.g = Matrix::Zero(m, m);
  s.b_tilde = Matrix::Zero(m, m);
  s.mu_g = Vector::Zero(m);
  s.mu_b = Vector::Zero(m);
  s.v_g = Matrix::Zero(m, m);
  s.v_b = Matrix::Zero(m, m);
  s.lam_g = Matrix::Zero(m, m);
  s.lam_b = Matrix::Zero(m, m);
  return s;
}

Matrix build_e_matrix(int m) {
  if (m < 1) throw std::invalid_argument("bus count must be positive");
  const int mm = m * m;
  Matrix e = kron(Matrix::Ones(m, m), Matrix::Identity(m, m));
  e += 2.0 * Matrix::Identity(mm, mm);
  e -= 2.0 * commutation_matrix(m);
  return e;
}

Vector gamma_vector(const Vector& mu, const Matrix& v_mult, double lambda, int m) {
  if (mu.size() != m || v_mult.rows() != m || v_mult.cols() != m)
    throw std::invalid_argument("gamma_vector dimension mismatch");
  Matrix a = mu * Eigen::RowVectorXd::Ones(m);
  a += v_mult - v_mult.transpose();
  // I - 11' has zero diagonal and -1 off the diagonal
  a.array() -= lambda;
  a.diagonal().array() += lambda;
  return vec(a);
}

std::pair<Matrix, Matrix> init_from_samples(const MeasurementSet& meas) {
  if (meas.n_samples < 1) throw schema_error("initialization needs at least one sample");
  const int m = meas.m;
  const int n = meas.n_samples;

  // voltage phasor proxy: v for AC, |v| e^{j theta} for DLPF, e^{j theta} for DC
  std::vector<CVector> x;
  x.reserve(n);
  for (int k = 0; k < n; ++k) {
    CVector xn(m);
    switch (meas.model_kind) {
      case ModelKind::AC:
        xn = meas.v[k];
        break;
      case ModelKind::DLPF:
        for (int i = 0; i < m; ++i)
          xn(i) = meas.v_mag[k](i) * std::exp(1i * meas.theta[k](i));
        break;
      case ModelKind::DC:
        for (int i = 0; i < m; ++i) xn(i) = std::exp(1i * meas.theta[k](i));
        break;
    }
    x.push_back(std::move(xn));
  }

  Vector mean_re = Vector::Zero(m), mean_im = Vector::Zero(m);
  for (const auto& xn : x) {
    mean_re += xn.real();
    mean_im += xn.imag();
  }
  mean_re /= n;
  mean_im /= n;

  Matrix s_re = Matrix::Zero(m, m), s_im = Matrix::Zero(m, m);
  for (const auto& xn : x) {
    const Vector dre = xn.real() - mean_re;
    const Vector dim = xn.imag() - mean_im;
    s_re.noalias() += dre * dre.transpose();
    s_im.noalias() += dim * dim.transpose();
  }
  s_re /= n;
  s_im /= n;

  // keep the diagonal and the non-positive off-diagonals, then restore zero
  // row sums through the diagonal
  auto clip = [m](Matrix s) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && s(i, j) > 0.0) s(i, j) = 0.0;
    const Vector rows = s.rowwise().sum();
    s.diagonal() -= rows;
    return s;
  };
  return {clip(std::move(s_re)), clip(std::move(s_im))};
}

double constrained_objective(const QuadraticForm& q, const Matrix& g, const Matrix& b_tilde,
                             double lambda_g, double lambda_b) {
  double obj = eval_objective(q, g, b_tilde);
  if (q.estimates_g) obj += lambda_g * (g.trace() - g.sum());
  obj += lambda_b * (b_tilde.trace() - b_tilde.sum());
  return obj;
}

/* ------------------------------ AlmSolver ------------------------------ */

namespace {

// LDLT does not fail loudly on rank deficiency, so validate with a probe
// solve and fall back to a jittered diagonal once.
bool probe_ok(const Eigen::LDLT<Matrix>& f, const Matrix& a) {
  if (f.info() != Eigen::Success) return false;
  const Vector probe = Vector::Ones(a.rows());
  const Vector x = f.solve(probe);
  if (!x.allFinite()) return false;
  return (a * x - probe).norm() <= 1e-6 * probe.norm();
}

void factor_with_jitter(Eigen::LDLT<Matrix>& f, Matrix& a, double jitter) {
  f.compute(a);
  if (probe_ok(f, a)) return;
  const double bump = jitter * a.trace() / static_cast<double>(a.rows());
  a.diagonal().array() += bump;
  f.compute(a);
}

}  // namespace

AlmSolver::AlmSolver(const QuadraticForm& q, const AlmConfig& cfg) : q_(q), cfg_(cfg), m_(q.m) {
  if (!(cfg.rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  e_ = build_e_matrix(m_);
  const int mm = m_ * m_;
  const Matrix eye = Matrix::Identity(mm, mm);
  if (q.estimates_g) {
    fg_.a_plain = q.h1_mat + cfg.rho * e_;
    fg_.a_shifted = q.h1_mat + cfg.rho * (e_ + eye);
    factor_with_jitter(fg_.plain, fg_.a_plain, cfg.jitter);
    factor_with_jitter(fg_.shifted, fg_.a_shifted, cfg.jitter);
    has_g_factors_ = true;
  }
  fb_.a_plain = q.h4_mat + cfg.rho * e_;
  fb_.a_shifted = q.h4_mat + cfg.rho * (e_ + eye);
  factor_with_jitter(fb_.plain, fb_.a_plain, cfg.jitter);
  factor_with_jitter(fb_.shifted, fb_.a_shifted, cfg.jitter);
}

Vector AlmSolver::solve_checked(const Eigen::LDLT<Matrix>& f, const Matrix& a, const Vector& rhs,
                                const char* what) const {
  const Vector x = f.solve(rhs);
  const double scale = std::max(1.0, rhs.norm());
  if (!x.allFinite() || (a * x - rhs).norm() > 1e-6 * scale)
    throw numerical_error(std::string("singular system in ") + what);
  return x;
}

Matrix AlmSolver::masked_update(const Factored& f, const Matrix& cross, const Vector& hvec,
                                const Vector& gamma, const Matrix& lam,
                                const Matrix& other) const {
  const Vector rhs = -cross * vec(other) - hvec - gamma;
  const Vector x1 = solve_checked(f.plain, f.a_plain, rhs, "primal update");
  const Vector rhs2 = rhs - vec(lam);
  const Vector x2 = solve_checked(f.shifted, f.a_shifted, rhs2, "primal update");
  const Matrix cand1 = unvec(x1, m_);
  const Matrix cand2 = unvec(x2, m_);
  Matrix out(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      out(i, j) = (i == j || lam(i, j) + cfg_.rho * cand1(i, j) <= 0.0) ? cand1(i, j)
                                                                       : cand2(i, j);
  return out;
}

Matrix AlmSolver::update_g(const AlmState& s) const {
  if (!q_.estimates_g) throw std::invalid_argument("this model does not estimate G");
  const Vector gamma = gamma_vector(s.mu_g, s.v_g, cfg_.lambda_g, m_);
  return masked_update(fg_, q_.h2_mat, q_.h1_vec, gamma, s.lam_g, s.b_tilde);
}

Matrix AlmSolver::update_b(const AlmState& s) const {
  const Vector gamma = gamma_vector(s.mu_b, s.v_b, cfg_.lambda_b, m_);
  return masked_update(fb_, q_.h3_mat, q_.h2_vec, gamma, s.lam_b, s.g);
}

// The sign constraint covers off-diagonal entries only, so its multiplier
// keeps a zero diagonal. Letting the diagonal accumulate would leak into the
// shifted solve through vec(lam) and destabilize large-rho runs.
void ascend_multipliers(const Matrix& x, double rho, Vector& mu, Matrix& v, Matrix& lam) {
  mu += rho * x.rowwise().sum();
  v += rho * (x - x.transpose());
  lam = (lam + rho * x).cwiseMax(0.0);
  lam.diagonal().setZero();
}

void AlmSolver::update_multipliers(AlmState& s) const {
  if (q_.estimates_g) ascend_multipliers(s.g, cfg_.rho, s.mu_g, s.v_g, s.lam_g);
  ascend_multipliers(s.b_tilde, cfg_.rho, s.mu_b, s.v_b, s.lam_b);
}

AlmReport AlmSolver::run(const MeasurementSet& meas) const {
  if (cfg_.lambda_g < 0.0 || cfg_.lambda_b < 0.0)
    throw std::invalid_argument("lambda must be resolved before running (see run_alm)");

  AlmState s = AlmState::zeros(m_);
  auto [g0, b0] = init_from_samples(meas);
  if (q_.estimates_g) s.g = std::move(g0);
  s.b_tilde = std::move(b0);

  AlmReport rep;
  rep.has_g = q_.estimates_g;
  rep.lambda_g_used = cfg_.lambda_g;
  rep.lambda_b_used = cfg_.lambda_b;

  for (int k = 1; k <= cfg_.max_iters; ++k) {
    const Matrix g_old = s.g;
    const Matrix b_old = s.b_tilde;
    if (q_.estimates_g) s.g = update_g(s);
    s.b_tilde = update_b(s);
    update_multipliers(s);
    s.iter = k;

    const double dg2 = q_.estimates_g ? (s.g - g_old).squaredNorm() : 0.0;
    const double db2 = (s.b_tilde - b_old).squaredNorm();
    rep.change_g_sq.push_back(dg2);
    rep.change_b_sq.push_back(db2);
    rep.objective.push_back(
        constrained_objective(q_, s.g, s.b_tilde, cfg_.lambda_g, cfg_.lambda_b));
    if (dg2 < cfg_.eps && db2 < cfg_.eps) {
      rep.converged = true;
      break;
    }
  }
  rep.iterations = s.iter;
  rep.b_raw = s.b_tilde;
  rep.b_hat_tilde = cfg_.threshold ? threshold_offdiag(project_to_laplacian(s.b_tilde))
                                   : project_to_laplacian(s.b_tilde);
  if (q_.estimates_g) {
    rep.g_raw = s.g;
    rep.g_hat = cfg_.threshold ? threshold_offdiag(project_to_laplacian(s.g))
                               : project_to_laplacian(s.g);
  }
  return rep;
}

/* --------------------------- free wrappers ----------------------------- */

Matrix update_g(const QuadraticForm& q, const AlmState& s, const AlmConfig& cfg) {
  return AlmSolver(q, cfg).update_g(s);
}

Matrix update_b(const QuadraticForm& q, const AlmState& s, const AlmConfig& cfg) {
  return AlmSolver(q, cfg).update_b(s);
}

AlmState update_multipliers(const AlmState& s, const AlmConfig& cfg, bool touch_g) {
  AlmState out = s;
  if (touch_g) ascend_multipliers(out.g, cfg.rho, out.mu_g, out.v_g, out.lam_g);
  ascend_multipliers(out.b_tilde, cfg.rho, out.mu_b, out.v_b, out.lam_b);
  return out;
}

std::pair<RealLaplacian, RealLaplacian> finalize(const Matrix& g_raw, const Matrix& b_raw,
                                                 bool threshold) {
  RealLaplacian g = project_to_laplacian(g_raw);
  RealLaplacian b = project_to_laplacian(b_raw);
  if (threshold) {
    g = threshold_offdiag(g);
    b = threshold_offdiag(b);
  }
  return {std::move(g), std::move(b)};
}

AlmReport run_alm(const QuadraticForm& q, const MeasurementSet& meas, const AlmConfig& cfg) {
  AlmConfig resolved = cfg;
  resolved.lambda_g = q.estimates_g
                          ? resolve_lambda(cfg.lambda_g, meas.noise, q.m, meas.n_samples)
                          : 0.0;
  resolved.lambda_b = resolve_lambda(cfg.lambda_b, meas.noise, q.m, meas.n_samples);
  return AlmSolver(q, resolved).run(meas);
}

}  // namespace gridtopo
