#pragma once

#include <cstdint>
#include <utility>

#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"

namespace gridtopo {

struct GridSpec {
  int m = 4;
  int extra_edges = 0;       // chords beyond the random spanning tree
  double ratio_mean = 2.0;   // typical |b_tilde| / |g| per line
  double overlap = 1.0;      // fraction of lines present in both supports
  std::uint64_t seed = 0;
};

struct SimSpec {
  ModelKind model_kind = ModelKind::AC;
  int n_samples = 1;
  double snr_db = 30.0;
  bool noiseless = false;    // skip noise entirely; R_eta recorded as identity
  std::uint64_t seed = 0;
};

// Random connected grid with controlled joint sparsity: spanning tree plus
// chords, per line b_tilde ~ U[0.5, 2.0], g = b_tilde / ratio with the ratio
// lognormal (median ratio_mean), and with probability 1 - overlap a line is
// dropped from the G support only.
std::pair<ComplexAdmittance, LineList> gen_grid(const GridSpec& spec);

struct SimResult {
  MeasurementSet meas;
  double sigma2 = 0.0;  // zero when noiseless; the recorded R_eta is then I
};

// Draws voltage excitation (|v| ~ U[0.95, 1.05], theta ~ U[-0.2, 0.2] i.i.d.),
// evaluates the exact model injections, calibrates sigma^2 to the target SNR
// and adds Gaussian noise with R_eta = sigma^2 I.
SimResult simulate(const ComplexAdmittance& adm, const SimSpec& spec);

// 10 log10( sum_n |p + jq|^2 / (M N sigma^2) ); DC uses |p|^2.
double snr_of(const MeasurementSet& meas, double sigma2);

}  // namespace gridtopo
