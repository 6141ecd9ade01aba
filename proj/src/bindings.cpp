// Python module _gridtopo: bindings for the estimation library. Matrices
// cross the boundary as numpy arrays; the Laplacian wrapper structs stay on
// the C++ side and functions taking or returning them are re-expressed in
// terms of plain matrices here.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gridtopo/alm.hpp"
#include "gridtopo/datagen.hpp"
#include "gridtopo/errors.hpp"
#include "gridtopo/io.hpp"
#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"
#include "gridtopo/oracle.hpp"

namespace py = pybind11;
using namespace gridtopo;

namespace {

using PyLine = std::tuple<int, int, double, double>;

std::vector<PyLine> lines_out(const LineList& ll) {
  std::vector<PyLine> out;
  out.reserve(ll.lines.size());
  for (const auto& ln : ll.lines) out.emplace_back(ln.from, ln.to, ln.g_line, ln.b_tilde_line);
  return out;
}

LineList lines_in(const std::vector<PyLine>& rows, int m) {
  LineList ll;
  for (const auto& [f, t, g, b] : rows) ll.lines.push_back({f, t, g, b});
  int seen = 0;
  for (const auto& ln : ll.lines) seen = std::max({seen, ln.from, ln.to});
  if (m == 0) m = seen;
  if (m < seen) throw schema_error("bus count smaller than largest line endpoint");
  ll.m = m;
  return ll;
}

RealLaplacian as_laplacian(const Matrix& a, const char* name) {
  std::string why;
  if (!is_laplacian(a, kLapTol, &why))
    throw schema_error(std::string(name) + " is not a Laplacian: " + why);
  return RealLaplacian(static_cast<int>(a.rows()), a);
}

AlmConfig config_from_kwargs(double rho, double lambda_g, double lambda_b, int max_iters,
                             double eps, double jitter, bool threshold) {
  AlmConfig cfg;
  cfg.rho = rho;
  cfg.lambda_g = lambda_g;
  cfg.lambda_b = lambda_b;
  cfg.max_iters = max_iters;
  cfg.eps = eps;
  cfg.jitter = jitter;
  cfg.threshold = threshold;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_gridtopo, mod) {
  mod.doc() = "Sparse complex Laplacian estimation from power measurements";

  py::register_exception<schema_error>(mod, "SchemaError", PyExc_ValueError);
  py::register_exception<numerical_error>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<MeasurementSet>(mod, "MeasurementSet",
                             "Time series of injection and voltage samples for one model.\n"
                             "Fields unused by the model stay empty: ac carries (p, q, v),\n"
                             "dlpf carries (p, q, v_mag, theta), dc carries (p, theta).")
      .def(py::init<>())
      .def_property(
          "model", [](const MeasurementSet& s) { return to_string(s.model_kind); },
          [](MeasurementSet& s, const std::string& v) { s.model_kind = model_from_string(v); },
          "Measurement model: 'ac', 'dlpf' or 'dc'.")
      .def_readwrite("m", &MeasurementSet::m, "Number of buses.")
      .def_readwrite("n_samples", &MeasurementSet::n_samples, "Number of time samples.")
      .def_readwrite("p", &MeasurementSet::p, "Active power injections, one vector per sample.")
      .def_readwrite("q", &MeasurementSet::q, "Reactive power injections.")
      .def_readwrite("v", &MeasurementSet::v, "Complex voltage phasors (ac).")
      .def_readwrite("v_mag", &MeasurementSet::v_mag, "Voltage magnitudes (dlpf).")
      .def_readwrite("theta", &MeasurementSet::theta, "Voltage angles (dlpf, dc).")
      .def(
          "set_isotropic_noise",
          [](MeasurementSet& s, double sigma2) {
            s.noise = NoiseModel::isotropic(s.m, sigma2 == 0.0 ? 1.0 : sigma2);
          },
          py::arg("sigma2"),
          "Attach R_eta = sigma2 * I. Zero selects unit weights, the convention\n"
          "for noiseless data.")
      .def(
          "set_noise_covariance",
          [](MeasurementSet& s, const Matrix& r) {
            if (r.rows() != s.m) throw schema_error("noise covariance size must match bus count");
            s.noise = NoiseModel::from_covariance(r);
          },
          py::arg("r"), "Attach a full symmetric positive-definite noise covariance.")
      .def_property_readonly(
          "noise_covariance", [](const MeasurementSet& s) { return s.noise.r_eta; },
          "The attached R_eta (empty until a noise model is set).")
      .def_property_readonly(
          "sigma2_avg",
          [](const MeasurementSet& s) {
            if (s.noise.r_eta.rows() == 0) throw schema_error("no noise model attached");
            return s.noise.sigma2_avg();
          },
          "Average per-bus noise power tr(R_eta)/m.")
      .def("__repr__", [](const MeasurementSet& s) {
        return "MeasurementSet(model='" + to_string(s.model_kind) +
               "', m=" + std::to_string(s.m) + ", n_samples=" + std::to_string(s.n_samples) + ")";
      });

  py::class_<QuadraticForm>(mod, "QuadraticForm",
                            "Assembled quadratic objective of one measurement model; pass to\n"
                            "eval_objective, grad_objective or oracle_solve.")
      .def_readonly("m", &QuadraticForm::m, "Number of buses.")
      .def_readonly("estimates_g", &QuadraticForm::estimates_g,
                    "False for dc, where only B_tilde is identifiable.")
      .def("__repr__", [](const QuadraticForm& q) {
        return std::string("QuadraticForm(m=") + std::to_string(q.m) +
               ", estimates_g=" + (q.estimates_g ? "True" : "False") + ")";
      });

  py::class_<AlmReport>(mod, "AlmReport", "Result of one augmented-Lagrangian solve.")
      .def_property_readonly(
          "g_hat", [](const AlmReport& r) { return r.g_hat.entries; },
          "Finalized conductance Laplacian (empty when has_g is False).")
      .def_property_readonly(
          "b_hat_tilde", [](const AlmReport& r) { return r.b_hat_tilde.entries; },
          "Finalized minus-susceptance Laplacian.")
      .def_readonly("g_raw", &AlmReport::g_raw, "Last G iterate before finalization.")
      .def_readonly("b_raw", &AlmReport::b_raw, "Last B_tilde iterate before finalization.")
      .def_readonly("iterations", &AlmReport::iterations)
      .def_readonly("converged", &AlmReport::converged)
      .def_readonly("has_g", &AlmReport::has_g)
      .def_readonly("lambda_g_used", &AlmReport::lambda_g_used)
      .def_readonly("lambda_b_used", &AlmReport::lambda_b_used)
      .def_readonly("change_g_sq", &AlmReport::change_g_sq,
                    "Squared Frobenius change of G per iteration.")
      .def_readonly("change_b_sq", &AlmReport::change_b_sq)
      .def_readonly("objective", &AlmReport::objective,
                    "Constrained objective after each iteration.")
      .def("__repr__", [](const AlmReport& r) {
        return std::string("AlmReport(iterations=") + std::to_string(r.iterations) +
               ", converged=" + (r.converged ? "True" : "False") +
               ", has_g=" + (r.has_g ? "True" : "False") + ")";
      });

  // ---- data generation ----

  mod.def(
      "gen_grid",
      [](int m, int extra_edges, double ratio_mean, double overlap, std::uint64_t seed) {
        GridSpec spec;
        spec.m = m;
        spec.extra_edges = extra_edges;
        spec.ratio_mean = ratio_mean;
        spec.overlap = overlap;
        spec.seed = seed;
        auto [adm, ll] = gen_grid(spec);
        return py::make_tuple(adm.g.entries, adm.b_tilde.entries, lines_out(ll));
      },
      py::arg("m"), py::arg("extra_edges") = 0, py::arg("ratio_mean") = 2.0,
      py::arg("overlap") = 1.0, py::arg("seed") = 0,
      "Random connected grid: spanning tree plus chords. Returns\n"
      "(g, b_tilde, lines) with lines as (from, to, g_line, b_tilde_line) tuples.");

  mod.def(
      "simulate",
      [](const Matrix& g, const Matrix& b_tilde, const std::string& model, int n_samples,
         double snr_db, bool noiseless, std::uint64_t seed) {
        ComplexAdmittance adm{as_laplacian(g, "g"), as_laplacian(b_tilde, "b_tilde")};
        if (adm.g.m != adm.b_tilde.m) throw schema_error("g and b_tilde sizes differ");
        SimSpec spec;
        spec.model_kind = model_from_string(model);
        spec.n_samples = n_samples;
        spec.snr_db = snr_db;
        spec.noiseless = noiseless;
        spec.seed = seed;
        SimResult r = simulate(adm, spec);
        return py::make_tuple(r.meas, r.sigma2);
      },
      py::arg("g"), py::arg("b_tilde"), py::arg("model") = "ac", py::arg("n_samples") = 1,
      py::arg("snr_db") = 30.0, py::arg("noiseless") = false, py::arg("seed") = 0,
      "Draw voltage excitation, evaluate the exact model and add Gaussian noise\n"
      "calibrated to the target SNR. Returns (measurements, sigma2); the noise\n"
      "model is already attached to the measurement set.");

  mod.def("snr_of", &snr_of, py::arg("meas"), py::arg("sigma2"),
          "Empirical SNR in dB of a measurement set against a noise power.");

  mod.def(
      "convert",
      [](const MeasurementSet& meas, const std::string& model) {
        return convert_measurements(meas, model_from_string(model));
      },
      py::arg("meas"), py::arg("model"),
      "Re-express measurements under another model ('ac', 'dlpf', 'dc');\n"
      "raises SchemaError when the target needs data the source lacks.");

  // ---- objectives ----

  mod.def("build_model", &build_model, py::arg("meas"),
          "Assemble the quadratic objective of the measurement model.");

  mod.def("eval_objective", &eval_objective, py::arg("q"), py::arg("g"), py::arg("b_tilde"),
          "Value of the model objective at (g, b_tilde).");

  mod.def("grad_objective", &grad_objective, py::arg("q"), py::arg("g"), py::arg("b_tilde"),
          "Gradient pair (d/dg, d/db_tilde) in vec coordinates.");

  mod.def(
      "resolve_lambda",
      [](double lam, const MeasurementSet& meas) {
        return resolve_lambda(lam, meas.noise, meas.m, meas.n_samples);
      },
      py::arg("lam"), py::arg("meas"),
      "The l1 weight actually used: lam itself when non-negative, otherwise the\n"
      "noise-scaled default sigma2 * sqrt(log(m)/n).");

  // ---- estimation ----

  mod.def(
      "estimate",
      [](const MeasurementSet& meas, double rho, double lambda_g, double lambda_b, int max_iters,
         double eps, double jitter, bool threshold) {
        AlmConfig cfg =
            config_from_kwargs(rho, lambda_g, lambda_b, max_iters, eps, jitter, threshold);
        QuadraticForm q = build_model(meas);
        return run_alm(q, meas, cfg);
      },
      py::arg("meas"), py::arg("rho") = 1e-4, py::arg("lambda_g") = -1.0,
      py::arg("lambda_b") = -1.0, py::arg("max_iters") = 100, py::arg("eps") = 0.01,
      py::arg("jitter") = 1e-10, py::arg("threshold") = true,
      "Estimate the admittance Laplacians by the augmented-Lagrangian solver.\n"
      "Negative lambda selects the noise-scaled default weight.");

  mod.def(
      "oracle_solve",
      [](const QuadraticForm& q, double lambda_g, double lambda_b, int max_iters, double tol,
         int dykstra_iters, double step_safety) {
        OracleConfig cfg;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.dykstra_iters = dykstra_iters;
        cfg.step_safety = step_safety;
        auto [g, b, obj] = oracle_solve(q, lambda_g, lambda_b, cfg);
        return py::make_tuple(g, b, obj);
      },
      py::arg("q"), py::arg("lambda_g"), py::arg("lambda_b"), py::arg("max_iters") = 50000,
      py::arg("tol") = 1e-12, py::arg("dykstra_iters") = 200, py::arg("step_safety") = 0.9,
      "Reference projected-gradient solver for the same convex problem;\n"
      "slow, independent of the main solver, limited to small grids.\n"
      "Returns (g, b_tilde, objective).");

  // ---- Laplacian operations and metrics ----

  mod.def("is_laplacian",
          [](const Matrix& a, double tol) { return is_laplacian(a, tol); },
          py::arg("a"), py::arg("tol") = kLapTol,
          "Whether a is symmetric with zero row sums and non-positive\n"
          "off-diagonals, within tolerance.");

  mod.def(
      "project_to_laplacian",
      [](const Matrix& a) { return project_to_laplacian(a).entries; }, py::arg("a"),
      "Map an arbitrary square matrix into the Laplacian set: symmetrize, clip\n"
      "off-diagonals to non-positive, rebuild the diagonal.");

  mod.def(
      "threshold_offdiag",
      [](const Matrix& a) {
        return threshold_offdiag(RealLaplacian(static_cast<int>(a.rows()), a)).entries;
      },
      py::arg("a"),
      "Prune off-diagonals below tau = min(diag)/m in magnitude and recompute\n"
      "the diagonal; identity when the diagonal is not strictly positive.");

  mod.def("project_feasible", &project_feasible, py::arg("a"), py::arg("iters") = 200,
          "Orthogonal projection onto {symmetric, zero row sums, off-diag <= 0}\n"
          "by Dykstra alternation.");

  mod.def(
      "support_edges",
      [](const Matrix& a, double tol) {
        SupportSet s = support_of(RealLaplacian(static_cast<int>(a.rows()), a), tol);
        return std::vector<std::pair<int, int>>(s.edges.begin(), s.edges.end());
      },
      py::arg("a"), py::arg("tol") = 0.0,
      "Sorted 1-based (i, j) pairs with |a[i, j]| > tol, i < j.");

  mod.def(
      "fscore",
      [](const Matrix& truth, const Matrix& est, double tol) {
        return fscore(support_of(RealLaplacian(static_cast<int>(truth.rows()), truth), tol),
                      support_of(RealLaplacian(static_cast<int>(est.rows()), est), tol));
      },
      py::arg("truth"), py::arg("est"), py::arg("tol") = 0.0,
      "Edge-support F-score 2tp/(2tp+fp+fn); 1.0 when both supports are empty.");

  mod.def("mse", &mse, py::arg("truth"), py::arg("est"),
          "Elementwise mean squared error (1/m^2) ||est - truth||_F^2.");

  mod.def(
      "magnitude_ratio",
      [](const Matrix& g, const Matrix& b_tilde) {
        return magnitude_ratio(RealLaplacian(static_cast<int>(g.rows()), g),
                               RealLaplacian(static_cast<int>(b_tilde.rows()), b_tilde));
      },
      py::arg("g"), py::arg("b_tilde"),
      "Mean |b_tilde| / |g| over entries where both are nonzero.");

  // ---- files ----

  mod.def(
      "load_case",
      [](const std::string& path) {
        LineList ll = read_case(path);
        ComplexAdmittance adm = build_admittance(ll);
        return py::make_tuple(adm.g.entries, adm.b_tilde.entries, lines_out(ll));
      },
      py::arg("path"),
      "Read a grid case CSV and build its admittance Laplacians. Returns\n"
      "(g, b_tilde, lines).");

  mod.def(
      "save_case",
      [](const std::string& path, const std::vector<PyLine>& rows, int m) {
        write_case(path, lines_in(rows, m));
      },
      py::arg("path"), py::arg("lines"), py::arg("m") = 0,
      "Write a grid case CSV from (from, to, g_line, b_tilde_line) tuples;\n"
      "m = 0 infers the bus count from the largest endpoint.");

  mod.def("read_measurements", &read_measurements, py::arg("path"),
          "Read a measurement CSV; the model kind is inferred from the populated\n"
          "columns. Attach a noise model before building the objective.");

  mod.def("write_measurements", &write_measurements, py::arg("path"), py::arg("meas"),
          "Write a measurement CSV (noise model not included; record sigma2 in a\n"
          "sidecar JSON next to it if needed).");
}
