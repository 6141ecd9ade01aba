#include <doctest.h>

#include <complex>

#include "gridtopo/errors.hpp"
#include "gridtopo/linalg.hpp"
#include "gridtopo/models.hpp"
#include "gridtopo/rng.hpp"
#include "helpers.hpp"

using namespace gridtopo;
using namespace std::complex_literals;
using testutil::quick_sim;
using testutil::random_admittance;

namespace {

Matrix random_square(int m, Rng& rng, double sd = 1.0) {
  Matrix x(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal(0.0, sd);
  return x;
}

// objective evaluated straight from the residual definitions, no H blocks
double residual_objective(const MeasurementSet& meas, const Matrix& g, const Matrix& b) {
  const CMatrix w = meas.noise.r_eta_inv.cast<std::complex<double>>();
  double psi = 0.0;
  for (int n = 0; n < meas.n_samples; ++n) {
    switch (meas.model_kind) {
      case ModelKind::AC: {
        const CVector y = (g + 1i * b).cast<std::complex<double>>().eval() *
                          meas.v[n].conjugate();
        const CVector r = meas.p[n].cast<std::complex<double>>() +
                          1i * meas.q[n].cast<std::complex<double>>() -
                          CVector(meas.v[n].asDiagonal() * y);
        psi += std::real(r.dot(w * r));
        break;
      }
      case ModelKind::DLPF: {
        const Vector r1 = meas.p[n] - g * meas.v_mag[n] - b * meas.theta[n];
        const Vector r2 = meas.q[n] + g * meas.theta[n] - b * meas.v_mag[n];
        psi += r1.dot(meas.noise.r_eta_inv * r1) + r2.dot(meas.noise.r_eta_inv * r2);
        break;
      }
      case ModelKind::DC: {
        const Vector r = meas.p[n] - b * meas.theta[n];
        psi += r.dot(meas.noise.r_eta_inv * r);
        break;
      }
    }
  }
  return psi;
}

}  // namespace

TEST_CASE("model names round-trip and bad names are rejected") {
  for (ModelKind k : {ModelKind::AC, ModelKind::DLPF, ModelKind::DC})
    CHECK(model_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(model_from_string("acdc"), schema_error);
  CHECK_THROWS_AS(model_from_string(""), schema_error);
}

TEST_CASE("NoiseModel constructors") {
  NoiseModel iso = NoiseModel::isotropic(3, 0.25);
  CHECK(iso.r_eta(1, 1) == 0.25);
  CHECK(iso.r_eta_inv(2, 2) == 4.0);
  CHECK(iso.sigma2_avg() == doctest::Approx(0.25));

  Matrix r(2, 2);
  r << 2.0, 0.5, 0.5, 1.0;
  NoiseModel nm = NoiseModel::from_covariance(r);
  CHECK((nm.r_eta * nm.r_eta_inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(nm.sigma2_avg() == doctest::Approx(1.5));

  CHECK_THROWS_AS(NoiseModel::isotropic(3, 0.0), schema_error);
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(NoiseModel::from_covariance(bad), schema_error);
  bad << 1.0, 0.3, -0.3, 1.0;  // not symmetric
  CHECK_THROWS_AS(NoiseModel::from_covariance(bad), schema_error);
}

TEST_CASE("convert_measurements derives voltage representations both ways") {
  ComplexAdmittance adm = random_admittance(4, 21);
  MeasurementSet ac = quick_sim(adm, ModelKind::AC, 5, 30.0, 3).meas;

  MeasurementSet dlpf = convert_measurements(ac, ModelKind::DLPF);
  REQUIRE(dlpf.v_mag.size() == 5);
  for (int n = 0; n < 5; ++n) {
    CHECK((dlpf.v_mag[n] - ac.v[n].cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-15);
    for (int i = 0; i < 4; ++i)
      CHECK(dlpf.theta[n](i) == doctest::Approx(std::arg(ac.v[n](i))).epsilon(1e-14));
  }

  // round trip back to a phasor
  MeasurementSet ac2 = convert_measurements(dlpf, ModelKind::AC);
  for (int n = 0; n < 5; ++n)
    CHECK((ac2.v[n] - ac.v[n]).cwiseAbs().maxCoeff() <= 1e-14);

  MeasurementSet dc = convert_measurements(ac, ModelKind::DC);
  CHECK(dc.q.empty());
  CHECK(dc.theta.size() == 5);

  // DC has no reactive power, so the richer models are out of reach
  CHECK_FALSE(convertible_to(dc, ModelKind::AC));
  CHECK_FALSE(convertible_to(dc, ModelKind::DLPF));
  CHECK(convertible_to(dc, ModelKind::DC));
  CHECK_THROWS_AS(convert_measurements(dc, ModelKind::AC), schema_error);

  CHECK(convertible_to(ac, ModelKind::DC));
  CHECK(convertible_to(dlpf, ModelKind::AC));
}

TEST_CASE("eval_objective equals the residual-sum definition for every model") {
  Rng rng(777);
  ComplexAdmittance adm = random_admittance(4, 5);
  for (ModelKind kind : {ModelKind::AC, ModelKind::DLPF, ModelKind::DC}) {
    MeasurementSet meas = quick_sim(adm, kind, 20, 20.0, 9).meas;
    QuadraticForm q = build_model(meas);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix g = kind == ModelKind::DC ? Matrix::Zero(4, 4) : random_square(4, rng);
      const Matrix b = random_square(4, rng);
      const double lhs = eval_objective(q, g, b);
      const double rhs = residual_objective(meas, g, b);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("gradients match central finite differences on all models") {
  Rng rng(31337);
  for (ModelKind kind : {ModelKind::AC, ModelKind::DLPF, ModelKind::DC}) {
    ComplexAdmittance adm = random_admittance(3, 17);
    MeasurementSet meas = quick_sim(adm, kind, 15, 25.0, 2).meas;
    QuadraticForm q = build_model(meas);

    Matrix g = kind == ModelKind::DC ? Matrix::Zero(3, 3) : random_square(3, rng, 0.5);
    Matrix b = random_square(3, rng, 0.5);
    auto [grad_g, grad_b] = grad_objective(q, g, b);

    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (q.estimates_g) {
          Matrix gp = g, gm = g;
          gp(i, j) += h;
          gm(i, j) -= h;
          const double fd = (eval_objective(q, gp, b) - eval_objective(q, gm, b)) / (2 * h);
          const double an = grad_g(i + 3 * j);
          CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
        }
        Matrix bp = b, bm = b;
        bp(i, j) += h;
        bm(i, j) -= h;
        const double fdb = (eval_objective(q, g, bp) - eval_objective(q, g, bm)) / (2 * h);
        const double an = grad_b(i + 3 * j);
        CHECK(std::abs(fdb - an) <= 1e-5 * std::max(1.0, std::abs(an)));
      }
    }
  }
}

TEST_CASE("AC block structure: H4 == H1, H2 antisymmetric, H3 == H2^T") {
  ComplexAdmittance adm = random_admittance(4, 8);
  MeasurementSet meas = quick_sim(adm, ModelKind::AC, 12, 20.0, 4).meas;
  QuadraticForm q = build_ac(meas);
  const double scale = q.h1_mat.cwiseAbs().maxCoeff();
  CHECK((q.h4_mat - q.h1_mat).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK((q.h2_mat + Matrix(q.h2_mat.transpose())).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK((q.h3_mat - Matrix(q.h2_mat.transpose())).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK((q.h1_mat - Matrix(q.h1_mat.transpose())).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK(q.estimates_g);
}

TEST_CASE("DLPF summed builder equals the generic per-sample assembly") {
  ComplexAdmittance adm = random_admittance(3, 42);
  MeasurementSet meas = quick_sim(adm, ModelKind::DLPF, 10, 25.0, 6).meas;
  QuadraticForm fast = build_dlpf(meas);

  // p residual: a1 = p, A1 = -I, a2 = |v|, A2 = -I, a3 = theta
  // q residual: a1 = q, A1 = +I, a2 = theta, A2 = -I, a3 = |v|
  std::vector<PerSampleQuadratic> samples;
  const CMatrix eye = CMatrix::Identity(3, 3);
  for (int n = 0; n < meas.n_samples; ++n) {
    PerSampleQuadratic s1;
    s1.a1 = meas.p[n].cast<std::complex<double>>();
    s1.big_a1 = -eye;
    s1.a2 = meas.v_mag[n].cast<std::complex<double>>();
    s1.big_a2 = -eye;
    s1.a3 = meas.theta[n].cast<std::complex<double>>();
    s1.weight = meas.noise.r_eta_inv;
    s1.scale = 2.0;
    samples.push_back(s1);

    PerSampleQuadratic s2;
    s2.a1 = meas.q[n].cast<std::complex<double>>();
    s2.big_a1 = eye;
    s2.a2 = meas.theta[n].cast<std::complex<double>>();
    s2.big_a2 = -eye;
    s2.a3 = meas.v_mag[n].cast<std::complex<double>>();
    s2.weight = meas.noise.r_eta_inv;
    s2.scale = 2.0;
    samples.push_back(s2);
  }
  QuadraticForm slow = assemble_from_samples(samples);

  const double scale = fast.h1_mat.cwiseAbs().maxCoeff();
  CHECK((fast.h1_mat - slow.h1_mat).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK((fast.h2_mat - slow.h2_mat).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK((fast.h3_mat - slow.h3_mat).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK((fast.h4_mat - slow.h4_mat).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK((fast.h1_vec - slow.h1_vec).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, fast.h1_vec.cwiseAbs().maxCoeff()));
  CHECK((fast.h2_vec - slow.h2_vec).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, fast.h2_vec.cwiseAbs().maxCoeff()));
  CHECK(fast.const_term == doctest::Approx(slow.const_term).epsilon(1e-12));
}

TEST_CASE("DC form only touches the B side") {
  ComplexAdmittance adm = random_admittance(3, 15);
  MeasurementSet meas = quick_sim(adm, ModelKind::DC, 10, 25.0, 6).meas;
  QuadraticForm q = build_dc(meas);
  CHECK_FALSE(q.estimates_g);
  CHECK(q.h1_mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.h2_mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.h3_mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.h1_vec.cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.h4_mat.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("builders reject a mismatched model kind and bad dimensions") {
  ComplexAdmittance adm = random_admittance(3, 33);
  MeasurementSet ac = quick_sim(adm, ModelKind::AC, 4, 30.0, 1).meas;
  CHECK_THROWS_AS(build_dlpf(ac), schema_error);
  CHECK_THROWS_AS(build_dc(ac), schema_error);

  QuadraticForm q = build_ac(ac);
  CHECK_THROWS_AS(eval_objective(q, Matrix::Zero(2, 2), Matrix::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(grad_objective(q, Matrix::Zero(3, 3), Matrix::Zero(4, 4)),
                  std::invalid_argument);
}
