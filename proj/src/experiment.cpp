#include "rabivqe/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rabivqe {

namespace {

std::string fmt_f(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("atomic rename to " + path.string() + " failed: " +
                  ec.message());
}

std::string header_block(const ExperimentConfig& cfg,
                         const std::string& command) {
  std::ostringstream out;
  out << "# " << kToolName << " " << command << " " << kToolVersion << "\n";
  out << "# config_hash=" << hash_hex(config_hash(cfg)) << "\n";
  out << "# seed=" << cfg.optimizer.seed << "\n";
  return out.str();
}

json base_json(const ExperimentConfig& cfg, const std::string& command) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = hash_hex(config_hash(cfg));
  j["seed"] = cfg.optimizer.seed;
  return j;
}

// Runs fn(0..ntasks-1) on a bounded pool; task results must be written to
// disjoint slots. The first exception is rethrown after all workers join.
void run_pool(int jobs, int ntasks, const std::function<void(int)>& fn) {
  if (ntasks <= 0) return;
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, ntasks);
  if (jobs == 1) {
    for (int i = 0; i < ntasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= ntasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int effective_jobs(const ExperimentConfig& cfg) { return cfg.jobs; }

constexpr const char* kSchemaText = R"(Output file schemas
===================

Every CSV begins with three comment lines:
  # rabi-vqe <command> <version>
  # config_hash=<16 hex digits, FNV-1a of the canonical config JSON>
  # seed=<optimizer seed>
Floating-point values are printed with "%.17g" (full round-trip precision).
All files are written atomically (temp file + rename).

ground_truth.csv
  One row per Omega from the configured list, exact-diagonalization
  reference values.
  Columns: omega0, omega, lambda, g, fock_cutoff, ground_energy,
           gap, parity, dq, dp, uncertainty_product, fock_file
  fock_file names a per-Omega CSV in the same directory.

fock_ed_omega<omega>.csv
  Fock populations of the reduced exact ground state.
  Columns: n, population

vqe_omega<omega>_p<depth>.json
  Full record of one warm-started run at the requested depth: physical
  parameters, best angles (thetas, layout [alpha_1, beta_1, gamma_1, ...]),
  best_energy, exact_energy, fidelity, infidelity, accepted-step energy
  history, best_restart, aborted_restarts, wall_time_s, and final-state
  parity / dq / dp / uncertainty_product.

blocks_omega<omega>_p<depth>.csv
  Block-by-block trace of the optimized circuit; row 0 is the initial
  state, row j the state after block j.
  Columns: block, norm, parity, dq, dp, uncertainty_product,
           fock_0 .. fock_<N>

final_state_omega<omega>_p<depth>.csv
  Amplitudes of the optimized state in the flattened hybrid basis
  (index = 2n + s, s = 0 spin-up / 1 spin-down).
  Columns: index, n, s, re, im

wigner_omega<omega>_p<depth>_block<j>.csv  (with --capture-blocks)
<stem>_wigner.csv  (wigner subcommand)
  Phase-space quasi-probability as a matrix. After the comment header the
  first row is "q\p" followed by the p-axis values; each following row
  starts with its q value followed by W(q, p) across the p axis.

fidelity_depth.csv  (sweep)
  One row per (omega, depth).
  Columns: omega, depth, best_energy, exact_energy, infidelity

scaling.csv  (sweep)
  One row per omega; VQE values taken from the deepest run.
  Columns: omega, dq_exact, dp_exact, dq_vqe, dp_vqe, infidelity_final

fit_summary.json  (sweep)
  Log-log least-squares fits of dq and dp against omega for the exact
  states, and for the VQE states over the points whose final infidelity is
  at or below the reported threshold (null when fewer than 3 qualify).
  Each fit reports exponent, log_prefactor, r_squared.
)";

void write_schema(const fs::path& dir) {
  write_file_atomic(dir / "schema.txt", kSchemaText);
}

struct StateRecord {
  double parity = 0.0;
  QuadratureStats stats;
  std::vector<double> fock;
};

StateRecord record_state(const HybridState& state, const BosonOps& ops) {
  StateRecord rec;
  rec.parity = parity_expectation(state);
  const BosonDensityMatrix rho = partial_trace_spin(state);
  rec.stats = quadrature_stats(rho, ops.q, ops.p);
  rec.fock = fock_distribution(rho);
  return rec;
}

std::string wigner_matrix_csv(const ExperimentConfig& cfg,
                              const std::string& command,
                              const WignerGrid& grid) {
  std::ostringstream out;
  out << header_block(cfg, command);
  out << "q\\p";
  for (int j = 0; j < grid.p_axis.size(); ++j)
    out << "," << fmt_f(grid.p_axis[j]);
  out << "\n";
  for (int i = 0; i < grid.q_axis.size(); ++i) {
    out << fmt_f(grid.q_axis[i]);
    for (int j = 0; j < grid.p_axis.size(); ++j)
      out << "," << fmt_f(grid.values(i, j));
    out << "\n";
  }
  return out.str();
}

std::string blocks_csv(const ExperimentConfig& cfg,
                       const std::vector<BlockTraceRow>& rows) {
  std::ostringstream out;
  out << header_block(cfg, "vqe");
  out << "block,norm,parity,dq,dp,uncertainty_product";
  if (!rows.empty())
    for (std::size_t n = 0; n < rows.front().fock.size(); ++n)
      out << ",fock_" << n;
  out << "\n";
  for (const auto& row : rows) {
    out << row.block << "," << fmt_f(row.norm) << "," << fmt_f(row.parity)
        << "," << fmt_f(row.dq) << "," << fmt_f(row.dp) << ","
        << fmt_f(row.product);
    for (const double pop : row.fock) out << "," << fmt_f(pop);
    out << "\n";
  }
  return out.str();
}

json fit_to_json(const PowerLawFit& fit) {
  return json{{"exponent", fit.exponent},
              {"log_prefactor", fit.log_prefactor},
              {"r_squared", fit.r_squared}};
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const char* known[] = {"omega0",      "omega_list", "g",
                                "lambda",      "fock_cutoff", "p_max",
                                "optimizer",   "out_dir",    "jobs",
                                "capture_blocks", "wigner_grid"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key: " + key);
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("omega0")) cfg.omega0 = j.at("omega0").get<double>();
    if (j.contains("omega_list"))
      cfg.omega_list = j.at("omega_list").get<std::vector<double>>();
    if (j.contains("g")) cfg.g = j.at("g").get<double>();
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("fock_cutoff"))
      cfg.fock_cutoff = j.at("fock_cutoff").get<int>();
    if (j.contains("p_max")) cfg.p_max = j.at("p_max").get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("capture_blocks"))
      cfg.capture_blocks = j.at("capture_blocks").get<bool>();
    if (j.contains("wigner_grid"))
      cfg.wigner_grid = j.at("wigner_grid").get<std::string>();
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      static const char* opt_known[] = {"gradient_step", "convergence_tol",
                                        "max_iterations", "restarts",
                                        "init_scale",     "seed"};
      for (const auto& [key, value] : o.items()) {
        bool ok = false;
        for (const char* k : opt_known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown optimizer key: " + key);
      }
      OptimizerConfig& opt = cfg.optimizer;
      if (o.contains("gradient_step"))
        opt.gradient_step = o.at("gradient_step").get<double>();
      if (o.contains("convergence_tol"))
        opt.convergence_tol = o.at("convergence_tol").get<double>();
      if (o.contains("max_iterations"))
        opt.max_iterations = o.at("max_iterations").get<int>();
      if (o.contains("restarts")) opt.restarts = o.at("restarts").get<int>();
      if (o.contains("init_scale"))
        opt.init_scale = o.at("init_scale").get<double>();
      if (o.contains("seed")) opt.seed = o.at("seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  if (cfg.g && cfg.lambda)
    throw ConfigError("exactly one of g and lambda may be specified");
  if (!(cfg.omega0 > 0.0)) throw ConfigError("omega0 must be positive");
  if (cfg.omega_list.empty()) throw ConfigError("omega_list must not be empty");
  for (const double w : cfg.omega_list)
    if (!(w > 0.0)) throw ConfigError("omega values must be positive");
  if (cfg.fock_cutoff < 1) throw ConfigError("fock_cutoff must be at least 1");
  if (cfg.p_max < 1) throw ConfigError("p_max must be at least 1");
  if (cfg.jobs < 0) throw ConfigError("jobs must be non-negative");
  if (cfg.optimizer.restarts < 1)
    throw ConfigError("optimizer restarts must be at least 1");
  if (cfg.optimizer.max_iterations < 1)
    throw ConfigError("optimizer max_iterations must be at least 1");
  if (!(cfg.optimizer.gradient_step > 0.0))
    throw ConfigError("optimizer gradient_step must be positive");
  if (!(cfg.optimizer.convergence_tol > 0.0))
    throw ConfigError("optimizer convergence_tol must be positive");
  if (cfg.optimizer.init_scale < 0.0)
    throw ConfigError("optimizer init_scale must be non-negative");
  parse_wigner_grid(cfg.wigner_grid);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["omega0"] = cfg.omega0;
  j["omega_list"] = cfg.omega_list;
  if (cfg.g) j["g"] = *cfg.g;
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  j["fock_cutoff"] = cfg.fock_cutoff;
  j["p_max"] = cfg.p_max;
  j["out_dir"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  j["capture_blocks"] = cfg.capture_blocks;
  j["wigner_grid"] = cfg.wigner_grid;
  j["optimizer"] = {{"gradient_step", cfg.optimizer.gradient_step},
                    {"convergence_tol", cfg.optimizer.convergence_tol},
                    {"max_iterations", cfg.optimizer.max_iterations},
                    {"restarts", cfg.optimizer.restarts},
                    {"init_scale", cfg.optimizer.init_scale},
                    {"seed", cfg.optimizer.seed}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RabiParams resolve_params(const ExperimentConfig& cfg, double Omega) {
  try {
    if (cfg.lambda)
      return RabiParams::from_lambda(cfg.omega0, Omega, *cfg.lambda);
    return RabiParams::from_g(cfg.omega0, Omega, cfg.g.value_or(1.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
  std::string dir = cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("RABI_VQE_OUT");
    dir = (env && *env) ? env : "out";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
  return dir;
}

WignerGridSpec parse_wigner_grid(const std::string& text) {
  WignerGridSpec spec;
  char trailing = 0;
  const int got = std::sscanf(text.c_str(), "%lf:%lf:%d%c", &spec.lo,
                              &spec.hi, &spec.npts, &trailing);
  if (got != 3)
    throw ConfigError("wigner grid must be \"qmin:qmax:npts\", got \"" +
                      text + "\"");
  if (!(spec.hi > spec.lo) || spec.npts < 2)
    throw ConfigError("wigner grid needs qmax > qmin and npts >= 2");
  return spec;
}

int cmd_ground_truth(const ExperimentConfig& cfg) {
  const fs::path dir = resolve_out_dir(cfg);
  const HilbertConfig hilbert = HilbertConfig::with_cutoff(cfg.fock_cutoff);
  const BosonOps ops = build_boson_ops(hilbert);

  struct Row {
    RabiParams params;
    GroundState gs;
    StateRecord rec;
  };
  std::vector<Row> rows(cfg.omega_list.size());
  run_pool(effective_jobs(cfg), static_cast<int>(cfg.omega_list.size()),
           [&](int i) {
             const RabiParams params =
                 resolve_params(cfg, cfg.omega_list[i]);
             const HamiltonianSet hams = build_hamiltonians(params, hilbert);
             Row row;
             row.params = params;
             row.gs = exact_ground_state(hams.h_full);
             row.rec = record_state(row.gs.state, ops);
             rows[i] = std::move(row);
           });

  std::ostringstream out;
  out << header_block(cfg, "ground-truth");
  out << "omega0,omega,lambda,g,fock_cutoff,ground_energy,gap,parity,dq,dp,"
         "uncertainty_product,fock_file\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    const std::string fock_name =
        "fock_ed_omega" + fmt_short(row.params.Omega) + ".csv";
    out << fmt_f(row.params.omega0) << "," << fmt_f(row.params.Omega) << ","
        << fmt_f(row.params.lam) << "," << fmt_f(row.params.g()) << ","
        << cfg.fock_cutoff << "," << fmt_f(row.gs.energy) << ","
        << fmt_f(row.gs.gap) << "," << fmt_f(row.gs.parity) << ","
        << fmt_f(row.rec.stats.dq) << "," << fmt_f(row.rec.stats.dp) << ","
        << fmt_f(row.rec.stats.product) << "," << fock_name << "\n";

    std::ostringstream fock;
    fock << header_block(cfg, "ground-truth");
    fock << "n,population\n";
    for (std::size_t n = 0; n < row.rec.fock.size(); ++n)
      fock << n << "," << fmt_f(row.rec.fock[n]) << "\n";
    write_file_atomic(dir / fock_name, fock.str());
  }
  write_file_atomic(dir / "ground_truth.csv", out.str());
  write_schema(dir);
  return 0;
}

int cmd_vqe(const ExperimentConfig& cfg, double Omega, int depth) {
  if (depth < 1) throw ConfigError("depth must be at least 1");
  const fs::path dir = resolve_out_dir(cfg);
  const HilbertConfig hilbert = HilbertConfig::with_cutoff(cfg.fock_cutoff);
  const RabiParams params = resolve_params(cfg, Omega);

  const std::vector<VqeRun> runs =
      depth_sweep(params, depth, hilbert, cfg.optimizer);
  const VqeRun& run = runs.back();

  const HamiltonianSet hams = build_hamiltonians(params, hilbert);
  const CompiledAnsatz ansatz = compile_ansatz(hilbert, hams);
  const AnsatzApplication app = apply_ansatz(
      ansatz, run.best_thetas, initial_state(hilbert), true);
  const std::vector<BlockTraceRow> rows = block_trace_report(run, app.blocks);

  const BosonOps ops = build_boson_ops(hilbert);
  const StateRecord final_rec = record_state(run.final_state, ops);

  const std::string tag =
      "omega" + fmt_short(Omega) + "_p" + std::to_string(depth);

  json j = base_json(cfg, "vqe");
  j["omega0"] = params.omega0;
  j["omega"] = params.Omega;
  j["lambda"] = params.lam;
  j["g"] = params.g();
  j["fock_cutoff"] = run.fock_cutoff;
  j["depth"] = run.depth;
  j["best_energy"] = run.best_energy;
  j["exact_energy"] = run.exact_energy;
  j["fidelity"] = run.fidelity;
  j["infidelity"] = 1.0 - run.fidelity;
  j["best_restart"] = run.best_restart;
  j["aborted_restarts"] = run.aborted_restarts;
  j["accepted_steps"] =
      run.energy_history.empty() ? 0 : run.energy_history.size() - 1;
  j["thetas"] = run.best_thetas.values;
  j["energy_history"] = run.energy_history;
  j["parity"] = final_rec.parity;
  j["dq"] = final_rec.stats.dq;
  j["dp"] = final_rec.stats.dp;
  j["uncertainty_product"] = final_rec.stats.product;
  j["wall_time_s"] = run.wall_time_s;
  write_file_atomic(dir / ("vqe_" + tag + ".json"), j.dump(2) + "\n");

  write_file_atomic(dir / ("blocks_" + tag + ".csv"), blocks_csv(cfg, rows));

  std::ostringstream state;
  state << header_block(cfg, "vqe");
  state << "index,n,s,re,im\n";
  for (int i = 0; i < run.final_state.dim(); ++i)
    state << i << "," << i / 2 << "," << i % 2 << ","
          << fmt_f(run.final_state.amplitudes[i].real()) << ","
          << fmt_f(run.final_state.amplitudes[i].imag()) << "\n";
  write_file_atomic(dir / ("final_state_" + tag + ".csv"), state.str());

  if (cfg.capture_blocks) {
    const WignerGridSpec spec = parse_wigner_grid(cfg.wigner_grid);
    const Eigen::VectorXd axis = uniform_axis(spec.lo, spec.hi, spec.npts);
    const HybridState psi0 = initial_state(hilbert);
    for (int b = 0; b <= run.depth; ++b) {
      const HybridState& s = (b == 0) ? psi0 : app.blocks[b - 1];
      const WignerGrid grid = wigner(partial_trace_spin(s), axis, axis);
      write_file_atomic(
          dir / ("wigner_" + tag + "_block" + std::to_string(b) + ".csv"),
          wigner_matrix_csv(cfg, "vqe", grid));
    }
  }
  write_schema(dir);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const fs::path dir = resolve_out_dir(cfg);
  const HilbertConfig hilbert = HilbertConfig::with_cutoff(cfg.fock_cutoff);
  const BosonOps ops = build_boson_ops(hilbert);

  struct OmegaResult {
    RabiParams params;
    std::vector<VqeRun> runs;
    StateRecord exact_rec;
    StateRecord final_rec;
  };
  std::vector<OmegaResult> results(cfg.omega_list.size());
  run_pool(effective_jobs(cfg), static_cast<int>(cfg.omega_list.size()),
           [&](int i) {
             OmegaResult res;
             res.params = resolve_params(cfg, cfg.omega_list[i]);
             res.runs = depth_sweep(res.params, cfg.p_max, hilbert,
                                    cfg.optimizer);
             const HamiltonianSet hams =
                 build_hamiltonians(res.params, hilbert);
             const GroundState gs = exact_ground_state(hams.h_full);
             res.exact_rec = record_state(gs.state, ops);
             res.final_rec = record_state(res.runs.back().final_state, ops);
             results[i] = std::move(res);
           });

  std::ostringstream fid;
  fid << header_block(cfg, "sweep");
  fid << "omega,depth,best_energy,exact_energy,infidelity\n";
  for (const OmegaResult& res : results)
    for (const VqeRun& run : res.runs)
      fid << fmt_f(res.params.Omega) << "," << run.depth << ","
          << fmt_f(run.best_energy) << "," << fmt_f(run.exact_energy) << ","
          << fmt_f(1.0 - run.fidelity) << "\n";
  write_file_atomic(dir / "fidelity_depth.csv", fid.str());

  std::ostringstream scal;
  scal << header_block(cfg, "sweep");
  scal << "omega,dq_exact,dp_exact,dq_vqe,dp_vqe,infidelity_final\n";
  for (const OmegaResult& res : results)
    scal << fmt_f(res.params.Omega) << "," << fmt_f(res.exact_rec.stats.dq)
         << "," << fmt_f(res.exact_rec.stats.dp) << ","
         << fmt_f(res.final_rec.stats.dq) << ","
         << fmt_f(res.final_rec.stats.dp) << ","
         << fmt_f(1.0 - res.runs.back().fidelity) << "\n";
  write_file_atomic(dir / "scaling.csv", scal.str());

  constexpr double kInfidelityThreshold = 1e-6;
  std::vector<double> omegas, dq_exact, dp_exact;
  std::vector<double> omegas_ok, dq_vqe, dp_vqe;
  for (const OmegaResult& res : results) {
    omegas.push_back(res.params.Omega);
    dq_exact.push_back(res.exact_rec.stats.dq);
    dp_exact.push_back(res.exact_rec.stats.dp);
    if (1.0 - res.runs.back().fidelity <= kInfidelityThreshold) {
      omegas_ok.push_back(res.params.Omega);
      dq_vqe.push_back(res.final_rec.stats.dq);
      dp_vqe.push_back(res.final_rec.stats.dp);
    }
  }

  json summary = base_json(cfg, "sweep");
  summary["omegas"] = omegas;
  summary["infidelity_threshold"] = kInfidelityThreshold;
  if (omegas.size() >= 3) {
    summary["exact"] = {{"dq", fit_to_json(powerlaw_fit(omegas, dq_exact))},
                        {"dp", fit_to_json(powerlaw_fit(omegas, dp_exact))}};
  } else {
    summary["exact"] = nullptr;
  }
  summary["vqe_points_used"] = omegas_ok.size();
  if (omegas_ok.size() >= 3) {
    summary["vqe"] = {{"dq", fit_to_json(powerlaw_fit(omegas_ok, dq_vqe))},
                      {"dp", fit_to_json(powerlaw_fit(omegas_ok, dp_vqe))}};
  } else {
    summary["vqe"] = nullptr;
  }
  write_file_atomic(dir / "fit_summary.json", summary.dump(2) + "\n");
  write_schema(dir);
  return 0;
}

int cmd_wigner(const ExperimentConfig& cfg, const std::string& state_path) {
  std::ifstream in(state_path, std::ios::binary);
  if (!in) throw IoError("cannot read state file " + state_path);

  std::vector<complexd> amps;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line.rfind("index,", 0) != 0)
        throw ConfigError("state file must have an index,n,s,re,im header");
      saw_header = true;
      continue;
    }
    int index = 0, n = 0, s = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf", &index, &n, &s, &re,
                    &im) != 5)
      throw ConfigError("malformed state row: " + line);
    if (index != static_cast<int>(amps.size()))
      throw ConfigError("state rows must be contiguous from index 0");
    amps.emplace_back(re, im);
  }
  if (amps.size() < 4 || amps.size() % 2 != 0)
    throw ConfigError("state file does not describe a hybrid-basis state");

  HybridState state{
      Eigen::Map<const Vector>(amps.data(), static_cast<int>(amps.size()))};
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-8)
    throw NumericError("stored state is not normalized: |psi| = " +
                       fmt_short(norm));
  state.amplitudes /= norm;

  const WignerGridSpec spec = parse_wigner_grid(cfg.wigner_grid);
  const Eigen::VectorXd axis = uniform_axis(spec.lo, spec.hi, spec.npts);
  const WignerGrid grid = wigner(partial_trace_spin(state), axis, axis);

  const fs::path dir = resolve_out_dir(cfg);
  const std::string stem = fs::path(state_path).stem().string();
  write_file_atomic(dir / (stem + "_wigner.csv"),
                    wigner_matrix_csv(cfg, "wigner", grid));
  write_schema(dir);
  return 0;
}

}  // namespace rabivqe
