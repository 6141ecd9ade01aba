#include "gridtopo/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "gridtopo/alm.hpp"
#include "gridtopo/datagen.hpp"
#include "gridtopo/errors.hpp"
#include "gridtopo/io.hpp"
#include "gridtopo/oracle.hpp"

namespace gridtopo {

namespace {

using json = nlohmann::ordered_json;

/* ----------------------------- shared args ----------------------------- */

struct CaseOrGrid {
  std::string case_path;
  GridSpec grid;
  bool grid_given = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--case", case_path, "grid case CSV file");
    auto* gm = cmd->add_option("--grid-m", grid.m, "bus count of a generated grid");
    cmd->add_option("--extra-edges", grid.extra_edges, "chords beyond the spanning tree");
    cmd->add_option("--ratio-mean", grid.ratio_mean, "typical b_tilde/g per line");
    cmd->add_option("--overlap", grid.overlap, "fraction of lines in both supports");
    gm->excludes("--case");
  }

  // seed applies only when the grid is generated
  std::pair<ComplexAdmittance, std::optional<LineList>> load(std::uint64_t seed) {
    if (!case_path.empty()) {
      LineList lines = read_case(case_path);
      return {build_admittance(lines), std::nullopt};
    }
    grid.seed = seed;
    grid_given = true;
    auto [adm, lines] = gen_grid(grid);
    return {std::move(adm), std::move(lines)};
  }
};

struct SolverArgs {
  AlmConfig cfg;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--rho", cfg.rho, "penalty parameter")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-g", cfg.lambda_g, "l1 weight on G (negative = auto)");
    cmd->add_option("--lambda-b", cfg.lambda_b, "l1 weight on B_tilde (negative = auto)");
    cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", cfg.eps, "stop threshold on squared iterate changes")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--jitter", cfg.jitter, "diagonal regularizer for singular systems");
    cmd->add_flag("!--no-threshold", cfg.threshold, "skip the tau pruning step");
  }
};

struct NoiseArgs {
  double sigma2 = -1.0;
  std::string cov_path;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--sigma2", sigma2, "isotropic noise variance (R_eta = sigma2 I)");
    cmd->add_option("--noise-cov", cov_path, "noise covariance CSV")->excludes("--sigma2");
  }

  // resolve against a measurement file's sidecar JSON when no flag was given
  NoiseModel resolve(int m, const std::string& meas_path) const {
    if (!cov_path.empty()) return NoiseModel::from_covariance(read_matrix_csv(cov_path));
    if (sigma2 >= 0.0)
      return NoiseModel::isotropic(m, sigma2 == 0.0 ? 1.0 : sigma2);
    const std::string sidecar = sidecar_path(meas_path);
    std::ifstream in(sidecar);
    if (!in)
      throw schema_error("no noise given and no sidecar '" + sidecar +
                         "' (use --sigma2 or --noise-cov)");
    json j;
    in >> j;
    const double s2 = j.value("sigma2", -1.0);
    if (s2 < 0.0) throw schema_error(sidecar + ": no sigma2 entry");
    return NoiseModel::isotropic(m, s2 == 0.0 ? 1.0 : s2);
  }

  static std::string sidecar_path(const std::string& meas_path) {
    const auto dot = meas_path.rfind('.');
    return (dot == std::string::npos ? meas_path : meas_path.substr(0, dot)) + ".json";
  }
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw schema_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/* ------------------------------ simulate ------------------------------- */

struct SimulateArgs {
  CaseOrGrid src;
  std::string model = "ac";
  double snr_db = 30.0;
  int samples = 800;
  std::uint64_t seed = 0;
  bool noiseless = false;
  std::string out = "sim";
};

void do_simulate(SimulateArgs& a) {
  auto [adm, lines] = a.src.load(a.seed);
  SimSpec spec;
  spec.model_kind = model_from_string(a.model);
  spec.n_samples = a.samples;
  spec.snr_db = a.snr_db;
  spec.noiseless = a.noiseless;
  spec.seed = a.seed + 1;  // keep the grid and the draw streams apart
  SimResult sim = simulate(adm, spec);

  write_measurements(a.out + ".csv", sim.meas);
  if (lines) write_case(a.out + "_case.csv", *lines);

  json j;
  j["model"] = a.model;
  j["buses"] = sim.meas.m;
  j["samples"] = a.samples;
  j["snr_db_target"] = a.snr_db;
  j["sigma2"] = sim.sigma2;
  j["noiseless"] = a.noiseless;
  j["seed"] = a.seed;
  if (!a.src.case_path.empty()) {
    j["case"] = a.src.case_path;
  } else {
    j["case"] = "generated";
    j["grid"] = {{"m", a.src.grid.m},
                 {"extra_edges", a.src.grid.extra_edges},
                 {"ratio_mean", a.src.grid.ratio_mean},
                 {"overlap", a.src.grid.overlap}};
  }
  write_json(a.out + ".json", j);
  std::cout << "wrote " << a.out << ".csv (" << sim.meas.n_samples << " samples, "
            << sim.meas.m << " buses, sigma2 " << fmt_full(sim.sigma2) << ")\n";
}

/* ------------------------------ estimate ------------------------------- */

struct EstimateArgs {
  std::string meas_path;
  std::string model;
  NoiseArgs noise;
  SolverArgs solver;
  std::string out = "est";
};

json report_to_json(const AlmReport& rep) {
  json j;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["has_g"] = rep.has_g;
  j["lambda_g"] = rep.lambda_g_used;
  j["lambda_b"] = rep.lambda_b_used;
  j["objective"] = rep.objective;
  j["change_g_sq"] = rep.change_g_sq;
  j["change_b_sq"] = rep.change_b_sq;
  return j;
}

void do_estimate(EstimateArgs& a) {
  MeasurementSet meas = read_measurements(a.meas_path);
  meas.noise = a.noise.resolve(meas.m, a.meas_path);
  const ModelKind kind = model_from_string(a.model);
  MeasurementSet conv = convert_measurements(meas, kind);
  QuadraticForm q = build_model(conv);
  AlmReport rep = run_alm(q, conv, a.solver.cfg);

  if (rep.has_g) write_matrix_csv(a.out + "_g.csv", rep.g_hat.entries);
  write_matrix_csv(a.out + "_b_tilde.csv", rep.b_hat_tilde.entries);
  json j = report_to_json(rep);
  j["model"] = a.model;
  j["buses"] = meas.m;
  write_json(a.out + "_report.json", j);
  std::cout << "estimate: " << rep.iterations << " iterations, converged "
            << (rep.converged ? "yes" : "no") << "\n";
}

/* -------------------------------- eval --------------------------------- */

struct EvalArgs {
  std::string truth_case;
  std::string est_g, est_b;
  std::string out;
};

void do_eval(EvalArgs& a) {
  LineList lines = read_case(a.truth_case);
  ComplexAdmittance truth = build_admittance(lines);
  json j;
  if (a.est_g.empty() && a.est_b.empty())
    throw schema_error("nothing to evaluate (need --est-g and/or --est-b)");
  if (!a.est_g.empty()) {
    Matrix eg = read_matrix_csv(a.est_g);
    if (eg.rows() != truth.g.m) throw schema_error("estimated G size differs from the case");
    RealLaplacian est(truth.g.m, eg);
    j["mse_g"] = mse(truth.g.entries, eg);
    j["fscore_g"] = fscore(support_of(truth.g), support_of(est));
  }
  if (!a.est_b.empty()) {
    Matrix eb = read_matrix_csv(a.est_b);
    if (eb.rows() != truth.b_tilde.m)
      throw schema_error("estimated B_tilde size differs from the case");
    RealLaplacian est(truth.b_tilde.m, eb);
    j["mse_b"] = mse(truth.b_tilde.entries, eb);
    j["fscore_b"] = fscore(support_of(truth.b_tilde), support_of(est));
  }
  if (a.out.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json(a.out, j);
}

/* ----------------------------- case-stats ------------------------------ */

struct CaseStatsArgs {
  std::vector<std::string> cases;
  bool as_json = false;
};

void do_case_stats(CaseStatsArgs& a) {
  json rows = json::array();
  for (const auto& path : a.cases) {
    LineList lines = read_case(path);
    ComplexAdmittance adm = build_admittance(lines);
    const SupportSet sg = support_of(adm.g);
    const SupportSet sb = support_of(adm.b_tilde);
    json r;
    r["case"] = path;
    r["buses"] = adm.g.m;
    r["edges_g"] = sg.edges.size();
    r["edges_b"] = sb.edges.size();
    r["fscore"] = fscore(sg, sb);
    r["ratio"] = magnitude_ratio(adm.g, adm.b_tilde);
    rows.push_back(std::move(r));
  }
  if (a.as_json) {
    std::cout << rows.dump(2) << "\n";
    return;
  }
  std::cout << "case  buses  |edges G|  |edges B|  F-score  ratio\n";
  for (const auto& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f    %.3f", r["fscore"].get<double>(),
                  r["ratio"].get<double>());
    std::cout << r["case"].get<std::string>() << "  " << r["buses"].get<int>() << "  "
              << r["edges_g"].get<std::size_t>() << "  " << r["edges_b"].get<std::size_t>()
              << "  " << buf << "\n";
  }
}

/* ----------------------------- monte carlo ----------------------------- */

struct MonteCarloArgs {
  CaseOrGrid src;
  std::string gen_model = "dlpf";
  std::string variants = "auto";
  std::vector<double> snr_db;
  int trials = 20;
  int samples = 800;
  std::uint64_t seed = 0;
  int threads = 0;
  SolverArgs solver;
  std::string out = "mc";
};

struct TrialRow {
  std::string variant;
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool has_g = false;
  double mse_g = 0.0, mse_b = 0.0, fscore_g = 0.0, fscore_b = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status = "ok";
};

int pick_thread_count(int flag_value) {
  if (const char* env = std::getenv("GRIDTOPO_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (flag_value > 0) return flag_value;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 4u));
}

void do_montecarlo(MonteCarloArgs& a) {
  const auto t_start = std::chrono::steady_clock::now();
  if (a.snr_db.empty()) throw CLI::ValidationError("--snr-db", "at least one SNR is required");
  if (a.trials < 1) throw CLI::ValidationError("--trials", "trials must be at least 1");

  auto [adm, lines] = a.src.load(a.seed);
  const ModelKind gen_kind = model_from_string(a.gen_model);

  std::vector<ModelKind> variants;
  if (a.variants == "auto") {
    for (ModelKind k : {ModelKind::AC, ModelKind::DLPF, ModelKind::DC}) {
      MeasurementSet probe;
      probe.model_kind = gen_kind;
      probe.q.resize(gen_kind == ModelKind::DC ? 0 : 1);
      probe.v.resize(gen_kind == ModelKind::AC ? 1 : 0);
      probe.v_mag.resize(gen_kind == ModelKind::DLPF ? 1 : 0);
      probe.theta.resize(gen_kind == ModelKind::AC ? 0 : 1);
      if (convertible_to(probe, k)) variants.push_back(k);
    }
  } else {
    std::stringstream ss(a.variants);
    std::string tok;
    while (std::getline(ss, tok, ',')) variants.push_back(model_from_string(tok));
  }

  const int n_snr = static_cast<int>(a.snr_db.size());
  const int n_tasks = n_snr * a.trials;
  std::vector<std::vector<TrialRow>> results(n_tasks);

  auto run_task = [&](int task) {
    const int snr_idx = task / a.trials;
    const int trial = task % a.trials;
    const std::uint64_t trial_seed = a.seed + static_cast<std::uint64_t>(task) + 1;

    SimSpec spec;
    spec.model_kind = gen_kind;
    spec.n_samples = a.samples;
    spec.snr_db = a.snr_db[snr_idx];
    spec.seed = trial_seed;
    SimResult sim = simulate(adm, spec);

    for (ModelKind variant : variants) {
      TrialRow row;
      row.variant = to_string(variant);
      row.snr_db = a.snr_db[snr_idx];
      row.trial = trial;
      row.seed = trial_seed;
      try {
        MeasurementSet conv = convert_measurements(sim.meas, variant);
        QuadraticForm q = build_model(conv);
        AlmReport rep = run_alm(q, conv, a.solver.cfg);
        row.iterations = rep.iterations;
        row.converged = rep.converged;
        row.has_g = rep.has_g;
        row.mse_b = mse(adm.b_tilde.entries, rep.b_hat_tilde.entries);
        row.fscore_b = fscore(support_of(adm.b_tilde), support_of(rep.b_hat_tilde));
        if (rep.has_g) {
          row.mse_g = mse(adm.g.entries, rep.g_hat.entries);
          row.fscore_g = fscore(support_of(adm.g), support_of(rep.g_hat));
        }
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg)
          if (c == ',' || c == '\n') c = ';';
        row.status = msg;
      }
      results[task].push_back(std::move(row));
    }
  };

  const int n_threads = std::min(pick_thread_count(a.threads), n_tasks);
  if (n_threads <= 1) {
    for (int t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  // long-format rows in deterministic task order, one line per variant
  const std::string results_path = a.out + "_results.csv";
  {
    std::ofstream out(results_path);
    if (!out) throw schema_error("cannot write '" + results_path + "'");
    out << "gen_model,variant,snr_db,trial,seed,mse_g,mse_b,fscore_g,fscore_b,"
           "iterations,converged,status\n";
    for (const auto& rows : results) {
      for (const auto& r : rows) {
        out << a.gen_model << ',' << r.variant << ',' << fmt_full(r.snr_db) << ','
            << r.trial << ',' << r.seed << ',';
        if (r.status == "ok" && r.has_g) out << fmt_full(r.mse_g);
        out << ',';
        if (r.status == "ok") out << fmt_full(r.mse_b);
        out << ',';
        if (r.status == "ok" && r.has_g) out << fmt_full(r.fscore_g);
        out << ',';
        if (r.status == "ok") out << fmt_full(r.fscore_b);
        out << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.status
            << "\n";
      }
    }
  }

  // aggregates per variant and SNR over the trials that succeeded
  json agg = json::array();
  for (ModelKind variant : variants) {
    const std::string vname = to_string(variant);
    for (int s = 0; s < n_snr; ++s) {
      std::vector<double> mg, mb, fg, fb;
      int ok = 0, failed = 0;
      for (int trial = 0; trial < a.trials; ++trial) {
        const auto& rows = results[s * a.trials + trial];
        for (const auto& r : rows) {
          if (r.variant != vname) continue;
          if (r.status != "ok") {
            ++failed;
            continue;
          }
          ++ok;
          mb.push_back(r.mse_b);
          fb.push_back(r.fscore_b);
          if (r.has_g) {
            mg.push_back(r.mse_g);
            fg.push_back(r.fscore_g);
          }
        }
      }
      json e;
      e["variant"] = vname;
      e["snr_db"] = a.snr_db[s];
      e["trials_ok"] = ok;
      e["trials_failed"] = failed;
      e["median_mse_b"] = median(mb);
      e["mean_mse_b"] = mean(mb);
      e["median_fscore_b"] = median(fb);
      e["mean_fscore_b"] = mean(fb);
      if (!mg.empty()) {
        e["median_mse_g"] = median(mg);
        e["mean_mse_g"] = mean(mg);
        e["median_fscore_g"] = median(fg);
        e["mean_fscore_g"] = mean(fg);
      }
      agg.push_back(std::move(e));
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  json summary;
  summary["gen_model"] = a.gen_model;
  summary["trials"] = a.trials;
  summary["samples"] = a.samples;
  summary["seed"] = a.seed;
  summary["snr_db"] = a.snr_db;
  summary["threads"] = n_threads;
  summary["results_csv"] = results_path;
  summary["aggregates"] = std::move(agg);
  // wall time lives here, not in the CSV, to keep the CSV byte-stable
  summary["wall_time_sec"] = wall;
  write_json(a.out + "_summary.json", summary);
  std::cout << "wrote " << results_path << " and " << a.out << "_summary.json ("
            << n_tasks << " trials, " << n_threads << " threads)\n";
}

/* ------------------------------- oracle -------------------------------- */

struct OracleArgs {
  std::string meas_path;
  std::string model;
  NoiseArgs noise;
  double lambda_g = -1.0, lambda_b = -1.0;
  OracleConfig cfg;
  std::string out = "oracle";
};

void do_oracle(OracleArgs& a) {
  MeasurementSet meas = read_measurements(a.meas_path);
  meas.noise = a.noise.resolve(meas.m, a.meas_path);
  const ModelKind kind = model_from_string(a.model);
  MeasurementSet conv = convert_measurements(meas, kind);
  QuadraticForm q = build_model(conv);
  const double lg =
      q.estimates_g ? resolve_lambda(a.lambda_g, conv.noise, q.m, conv.n_samples) : 0.0;
  const double lb = resolve_lambda(a.lambda_b, conv.noise, q.m, conv.n_samples);
  auto [g, b, obj] = oracle_solve(q, lg, lb, a.cfg);

  if (q.estimates_g) write_matrix_csv(a.out + "_g.csv", g);
  write_matrix_csv(a.out + "_b_tilde.csv", b);
  json j;
  j["model"] = a.model;
  j["objective"] = obj;
  j["lambda_g"] = lg;
  j["lambda_b"] = lb;
  write_json(a.out + "_report.json", j);
  std::cout << "oracle objective " << fmt_full(obj) << "\n";
}

}  // namespace

/* ------------------------------ dispatcher ------------------------------ */

int run_cli(int argc, char** argv) {
  CLI::App app{"sparse complex Laplacian estimation from power measurements"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "generate noisy measurements for a grid");
  sim_args.src.add_to(sim);
  sim->add_option("--model", sim_args.model, "measurement model: ac, dlpf or dc");
  sim->add_option("--snr-db", sim_args.snr_db, "target SNR in dB");
  sim->add_option("--samples", sim_args.samples, "number of samples")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_flag("--noiseless", sim_args.noiseless, "skip the noise entirely");
  sim->add_option("--out", sim_args.out, "output prefix");
  sim->callback([&] { do_simulate(sim_args); });

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "run the ALM estimator on measurements");
  est->add_option("--meas", est_args.meas_path, "measurement CSV")->required();
  est->add_option("--model", est_args.model, "estimator model: ac, dlpf or dc")->required();
  est_args.noise.add_to(est);
  est_args.solver.add_to(est);
  est->add_option("--out", est_args.out, "output prefix");
  est->callback([&] { do_estimate(est_args); });

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "compare estimates against a truth case");
  ev->add_option("--truth-case", eval_args.truth_case, "ground-truth case CSV")->required();
  ev->add_option("--est-g", eval_args.est_g, "estimated G matrix CSV");
  ev->add_option("--est-b", eval_args.est_b, "estimated B_tilde matrix CSV");
  ev->add_option("--out", eval_args.out, "write metrics JSON here instead of stdout");
  ev->callback([&] { do_eval(eval_args); });

  CaseStatsArgs cs_args;
  auto* cs = app.add_subcommand("case-stats", "edge counts, support F-score and ratio");
  cs->add_option("--case", cs_args.cases, "case CSV (repeatable)")->required();
  cs->add_flag("--json", cs_args.as_json, "emit JSON instead of a table");
  cs->callback([&] { do_case_stats(cs_args); });

  MonteCarloArgs mc_args;
  auto* mc = app.add_subcommand("montecarlo", "seeded SNR sweep over repeated trials");
  mc_args.src.add_to(mc);
  mc->add_option("--model", mc_args.gen_model, "data-generation model");
  mc->add_option("--variants", mc_args.variants,
                 "comma list of estimator models, or 'auto'");
  mc->add_option("--snr-db", mc_args.snr_db, "SNR grid in dB")->delimiter(',')->required();
  mc->add_option("--trials", mc_args.trials, "trials per SNR");
  mc->add_option("--samples", mc_args.samples, "samples per trial")
      ->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_args.seed, "top-level seed");
  mc->add_option("--threads", mc_args.threads, "worker threads (0 = auto)");
  mc_args.solver.add_to(mc);
  mc->add_option("--out", mc_args.out, "output prefix");
  mc->callback([&] { do_montecarlo(mc_args); });

  OracleArgs orc_args;
  auto* orc = app.add_subcommand("oracle", "reference projected-gradient solver (M <= 8)");
  orc->add_option("--meas", orc_args.meas_path, "measurement CSV")->required();
  orc->add_option("--model", orc_args.model, "estimator model")->required();
  orc_args.noise.add_to(orc);
  orc->add_option("--lambda-g", orc_args.lambda_g, "l1 weight on G (negative = auto)");
  orc->add_option("--lambda-b", orc_args.lambda_b, "l1 weight on B_tilde (negative = auto)");
  orc->add_option("--max-iters", orc_args.cfg.max_iters, "iteration cap");
  orc->add_option("--tol", orc_args.cfg.tol, "relative objective-change stop");
  orc->add_option("--out", orc_args.out, "output prefix");
  orc->callback([&] { do_oracle(orc_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  static std::string prog = "gridtopo";
  argv.push_back(prog.data());
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gridtopo
