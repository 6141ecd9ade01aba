#include "gridtopo/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <vector>

#include "gridtopo/errors.hpp"
#include "gridtopo/rng.hpp"

namespace gridtopo {

using namespace std::complex_literals;

std::pair<ComplexAdmittance, LineList> gen_grid(const GridSpec& spec) {
  if (spec.m < 2) throw schema_error("grid needs at least 2 buses");
  if (!(spec.overlap > 0.0 && spec.overlap <= 1.0))
    throw schema_error("overlap must be in (0, 1]");
  if (!(spec.ratio_mean > 0.0)) throw schema_error("ratio_mean must be positive");
  const int m = spec.m;
  const long max_extra =
      static_cast<long>(m) * (m - 1) / 2 - (m - 1);
  if (spec.extra_edges < 0 || spec.extra_edges > max_extra)
    throw schema_error("extra_edges exceeds complete-graph capacity");

  Rng rng(spec.seed);

  // random spanning tree: shuffle the nodes, attach each to a random earlier one
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = m - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(0, i)]);

  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < m; ++i) {
    const int a = perm[i];
    const int b = perm[rng.uniform_int(0, i - 1)];
    edges.insert(std::minmax(a, b));
  }

  // chords drawn uniformly from the remaining pairs
  std::vector<std::pair<int, int>> cands;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (!edges.count({i, j})) cands.push_back({i, j});
  for (int k = 0; k < spec.extra_edges; ++k) {
    const int idx = rng.uniform_int(0, static_cast<int>(cands.size()) - 1);
    edges.insert(cands[idx]);
    cands.erase(cands.begin() + idx);
  }

  // per line: b_tilde uniform, the b/g ratio lognormal with median ratio_mean
  // and fixed log-scale spread 0.25; a dropped line keeps its b_tilde edge
  LineList lines;
  lines.m = m;
  for (const auto& [i, j] : edges) {
    LineList::Line ln;
    ln.from = i + 1;
    ln.to = j + 1;
    ln.b_tilde_line = rng.uniform(0.5, 2.0);
    const double ratio = std::exp(rng.normal(std::log(spec.ratio_mean), 0.25));
    ln.g_line = ln.b_tilde_line / ratio;
    if (rng.uniform() > spec.overlap) ln.g_line = 0.0;
    lines.lines.push_back(ln);
  }
  ComplexAdmittance adm = build_admittance(lines);
  return {std::move(adm), std::move(lines)};
}

SimResult simulate(const ComplexAdmittance& adm, const SimSpec& spec) {
  if (spec.n_samples < 1) throw schema_error("need at least one sample");
  const int m = adm.g.m;
  const int n = spec.n_samples;
  const Matrix& g = adm.g.entries;
  const Matrix& b = adm.b_tilde.entries;
  Rng rng(spec.seed);

  std::vector<Vector> v_mag(n), theta(n);
  for (int k = 0; k < n; ++k) {
    v_mag[k] = Vector(m);
    theta[k] = Vector(m);
    for (int i = 0; i < m; ++i) v_mag[k](i) = rng.uniform(0.95, 1.05);
    for (int i = 0; i < m; ++i) theta[k](i) = rng.uniform(-0.2, 0.2);
  }

  // noiseless injections by the exact model equation
  std::vector<Vector> p0(n), q0(n);
  std::vector<CVector> v(n);
  double sigpow = 0.0;
  for (int k = 0; k < n; ++k) {
    switch (spec.model_kind) {
      case ModelKind::AC: {
        CVector vk(m);
        for (int i = 0; i < m; ++i) vk(i) = v_mag[k](i) * std::exp(1i * theta[k](i));
        const CVector s =
            vk.asDiagonal() * ((g.cast<std::complex<double>>() +
                                1i * b.cast<std::complex<double>>()) *
                               vk.conjugate());
        p0[k] = s.real();
        q0[k] = s.imag();
        v[k] = std::move(vk);
        sigpow += p0[k].squaredNorm() + q0[k].squaredNorm();
        break;
      }
      case ModelKind::DLPF:
        p0[k] = g * v_mag[k] + b * theta[k];
        q0[k] = -g * theta[k] + b * v_mag[k];
        sigpow += p0[k].squaredNorm() + q0[k].squaredNorm();
        break;
      case ModelKind::DC:
        p0[k] = b * theta[k];
        sigpow += p0[k].squaredNorm();
        break;
    }
  }

  const double sigma2 =
      spec.noiseless ? 0.0
                     : sigpow / (static_cast<double>(m) * n * std::pow(10.0, spec.snr_db / 10.0));
  const double s_half = std::sqrt(sigma2 / 2.0);

  MeasurementSet meas;
  meas.model_kind = spec.model_kind;
  meas.m = m;
  meas.n_samples = n;
  meas.noise = NoiseModel::isotropic(m, spec.noiseless ? 1.0 : sigma2);

  auto noisy = [&](const Vector& base) {
    Vector out = base;
    for (int i = 0; i < m; ++i) out(i) += s_half * rng.normal();
    return out;
  };

  for (int k = 0; k < n; ++k) {
    switch (spec.model_kind) {
      case ModelKind::AC:
        // complex circularly symmetric noise: Re and Im each with cov sigma2/2 I
        meas.p.push_back(noisy(p0[k]));
        meas.q.push_back(noisy(q0[k]));
        meas.v.push_back(std::move(v[k]));
        break;
      case ModelKind::DLPF:
        meas.p.push_back(noisy(p0[k]));
        meas.q.push_back(noisy(q0[k]));
        meas.v_mag.push_back(v_mag[k]);
        meas.theta.push_back(theta[k]);
        break;
      case ModelKind::DC:
        // only the real part of the noise enters, cov sigma2/2 I
        meas.p.push_back(noisy(p0[k]));
        meas.theta.push_back(theta[k]);
        break;
    }
  }
  return {std::move(meas), sigma2};
}

double snr_of(const MeasurementSet& meas, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  double power = 0.0;
  for (int k = 0; k < meas.n_samples; ++k) {
    power += meas.p[k].squaredNorm();
    if (meas.model_kind != ModelKind::DC) power += meas.q[k].squaredNorm();
  }
  return 10.0 *
         std::log10(power / (static_cast<double>(meas.m) * meas.n_samples * sigma2));
}

}  // namespace gridtopo
