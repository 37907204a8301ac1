// Command-line front end: phantom generation, solves, spectra and self-checks.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "pdncg/continuation.hpp"
#include "pdncg/io.hpp"
#include "pdncg/newton_system.hpp"
#include "pdncg/problems.hpp"
#include "pdncg/suites.hpp"

namespace fs = std::filesystem;
using namespace pdncg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

// Raised for anything the user has to fix (bad keys, values, files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kConfigKeys = {
    "problem", "image", "sampling_ratio", "target_psnr", "c",          "mu",       "eta",
    "tau1",    "tau2",  "rho",            "precond",     "continuation", "seed",   "grad_tol",
    "max_outer", "max_pcg", "eta_schedule", "n",         "m",          "k",        "noise_level",
};

struct RunConfig {
  std::string problem = "itv";
  std::string image = "phantom:64";
  double sampling_ratio = 0.25;
  double target_psnr = kNoNoise;
  double c = 5.0e-2;
  double mu = 1.0e-5;
  double rho = 0.5;
  std::string precond = "exact";
  bool continuation = true;
  std::uint64_t seed = 1;
  Index n = 256, m = 64, k = 8;
  double noise_level = 0.0;
  SolverConfig solver;
};

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "none") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "': not a number: '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "': not an integer: '" + v + "'");
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return v;
  std::string all;
  for (const char* o : options) all += std::string(all.empty() ? "" : "|") + o;
  throw UsageError("config key '" + key + "': expected " + all + ", got '" + v + "'");
}

PrecondMode precond_mode(const std::string& s) {
  if (s == "none") return PrecondMode::identity();
  if (s == "exact") return PrecondMode::exact_banded();
  return PrecondMode::truncated_cg(15);
}

RunConfig load_config(const fs::path& path) {
  std::map<std::string, std::string> kv;
  try {
    kv = io::read_config(path, kConfigKeys);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  RunConfig rc;
  for (const auto& [key, v] : kv) {
    if (key == "problem") rc.problem = one_of(key, v, {"itv", "l1-dense"});
    else if (key == "image") rc.image = v;
    else if (key == "sampling_ratio") rc.sampling_ratio = to_double(key, v);
    else if (key == "target_psnr") rc.target_psnr = to_double(key, v);
    else if (key == "c") rc.c = to_double(key, v);
    else if (key == "mu") rc.mu = to_double(key, v);
    else if (key == "eta") rc.solver.eta = to_double(key, v);
    else if (key == "tau1") rc.solver.tau1 = to_double(key, v);
    else if (key == "tau2") rc.solver.tau2 = to_double(key, v);
    else if (key == "rho") rc.rho = to_double(key, v);
    else if (key == "precond") rc.precond = one_of(key, v, {"none", "exact", "cg15"});
    else if (key == "continuation") rc.continuation = one_of(key, v, {"on", "off"}) == "on";
    else if (key == "seed") rc.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "grad_tol") rc.solver.grad_tol = to_double(key, v);
    else if (key == "max_outer") rc.solver.max_outer = static_cast<int>(to_int(key, v));
    else if (key == "max_pcg") rc.solver.max_pcg_iterations = static_cast<int>(to_int(key, v));
    else if (key == "eta_schedule")
      rc.solver.eta_schedule = one_of(key, v, {"fixed", "decreasing"}) == "fixed" ? EtaSchedule::fixed
                                                                                  : EtaSchedule::decreasing;
    else if (key == "n") rc.n = to_int(key, v);
    else if (key == "m") rc.m = to_int(key, v);
    else if (key == "k") rc.k = to_int(key, v);
    else if (key == "noise_level") rc.noise_level = to_double(key, v);
  }
  if (!(rc.c > 0.0) || !(rc.mu > 0.0) || !std::isfinite(rc.c) || !std::isfinite(rc.mu)) {
    throw UsageError("c and mu must be positive and finite");
  }
  if (!(rc.rho > 0.0)) throw UsageError("rho must be positive");
  if (!(rc.solver.eta >= 0.0 && rc.solver.eta < 1.0)) throw UsageError("eta must lie in [0, 1)");
  if (!(rc.solver.tau1 > 0.0 && rc.solver.tau1 < 1.0)) throw UsageError("tau1 must lie in (0, 1)");
  if (!(rc.solver.tau2 > 0.0 && rc.solver.tau2 < 0.5)) throw UsageError("tau2 must lie in (0, 1/2)");
  if (!(rc.solver.grad_tol > 0.0)) throw UsageError("grad_tol must be positive");
  if (rc.solver.max_outer < 0 || rc.solver.max_pcg_iterations < 1) throw UsageError("iteration caps out of range");
  rc.solver.rho = rc.rho;
  rc.solver.precond = precond_mode(rc.precond);
  rc.solver.verify_steps = false;
  return rc;
}

Image load_image(const std::string& source) {
  const std::string prefix = "phantom:";
  if (source.rfind(prefix, 0) == 0) {
    const long long size = to_int("image", source.substr(prefix.size()));
    if (size < 16) throw UsageError("phantom size must be at least 16");
    return shepp_logan(size, size);
  }
  if (!fs::exists(source)) throw UsageError("image file not found: " + source);
  try {
    return io::read_pgm(source);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

ProblemInstance build_instance(const RunConfig& rc) {
  try {
    if (rc.problem == "itv") {
      return make_itv_instance(load_image(rc.image), rc.sampling_ratio, rc.target_psnr, rc.seed);
    }
    return make_l1_dense_instance(rc.n, rc.m, rc.k, rc.noise_level, rc.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

struct SolveResult {
  SolverState state;
  double wall_s = 0.0;
  std::uint64_t matvecs = 0;
};

SolveResult solve(const RunConfig& rc, const ProblemInstance& inst) {
  SmoothedObjective target(rc.c, rc.mu, inst.A, inst.W, inst.b);
  const auto before = inst.A->action_count() + inst.W->action_count();
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult r;
  if (rc.continuation) {
    ContinuationConfig cc;
    cc.solver = rc.solver;
    r.state = run_continuation(target, cc, make_schedule(rc.c, rc.mu));
  } else {
    r.state = solve_subproblem(target, rc.solver, SolverState::zeros(target.n(), target.l()));
  }
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.matvecs = inst.A->action_count() + inst.W->action_count() - before;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
  if (!f) throw std::runtime_error("failed writing " + p.string());
}

int cmd_phantom(long long size, const std::string& out) {
  if (size < 16) {
    std::cerr << "phantom: size must be at least 16 (got " << size << ")\n";
    return kExitError;
  }
  io::write_pgm(out, shepp_logan(size, size));
  return kExitOk;
}

int cmd_solve(const std::string& config, const std::string& out_dir) {
  const RunConfig rc = load_config(config);
  const ProblemInstance inst = build_instance(rc);
  const SolveResult r = solve(rc, inst);  // SolverAbort propagates; nothing written yet
  const auto& s = r.state;

  int pcg_total = 0;
  for (const auto& rec : s.trace) pcg_total += rec.pcg_iters;
  std::ostringstream metrics;
  metrics << "problem=" << rc.problem << "\n"
          << "n=" << inst.A->cols() << "\nm=" << inst.A->rows() << "\n"
          << "converged=" << (s.converged ? 1 : 0) << "\n"
          << "stagnated=" << (s.stagnated ? 1 : 0) << "\n"
          << "outer_iterations=" << s.trace.size() - (s.trace.empty() ? 0 : 1) << "\n"
          << "pcg_iterations=" << pcg_total << "\n"
          << "final_grad_norm=" << fmt(s.trace.empty() ? 0.0 : s.trace.back().grad_norm) << "\n";
  if (inst.ground_truth) {
    if (rc.problem == "itv") {
      metrics << "psnr=" << fmt(psnr(s.x, *inst.ground_truth)) << "\n";
      if (inst.noisy) metrics << "noisy_psnr=" << fmt(psnr(*inst.noisy, *inst.ground_truth)) << "\n";
    }
    metrics << "relative_error=" << fmt(relative_error(s.x, *inst.ground_truth)) << "\n";
  }
  metrics << "total_matvecs=" << r.matvecs << "\n"
          << "wall_time_s=" << fmt(r.wall_s) << "\n";

  std::ostringstream sol;
  sol.precision(17);
  for (double v : s.x) sol << v << "\n";

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  if (rc.problem == "itv") {
    Image img{inst.n1, inst.n2, s.x};
    io::write_pgm(dir / "reconstruction.pgm", img);
  }
  write_text(dir / "solution.txt", sol.str());
  write_text(dir / "trace.csv", io::trace_csv(s.trace));
  write_text(dir / "metrics.txt", metrics.str());
  std::cout << metrics.str();
  return s.converged ? kExitOk : kExitFailed;
}

std::string summary(const SpectrumReport& rep, int stage, int iter) {
  std::ostringstream os;
  os << "stage=" << stage << " iter=" << iter << " sigma=" << rep.sigma << " nu=" << fmt(rep.nu)
     << " delta=" << fmt(rep.delta) << " chi=" << fmt(rep.chi) << " lambda_min_wbc=" << fmt(rep.lambda_min_wbc)
     << " bound=" << fmt(rep.bound) << " bound_kernel=" << fmt(rep.bound_kernel)
     << " eigvecs_in_kernel=" << rep.eigvecs_in_kernel << " raw_relative_spread=" << fmt(rep.raw_relative_spread())
     << " precond_max_deviation=" << fmt(rep.precond_max_deviation()) << "\n";
  return os.str();
}

int cmd_spectrum(const std::string& config, std::optional<double> nu, const std::string& out, int every) {
  RunConfig rc = load_config(config);
  const ProblemInstance inst = build_instance(rc);
  if (inst.A->cols() > kSpectrumMaxDimension) {
    throw UsageError("spectrum: n = " + std::to_string(inst.A->cols()) + " exceeds " +
                     std::to_string(kSpectrumMaxDimension));
  }
  const double nu_v = nu.value_or(1.0 / (2.0 * rc.mu));
  if (!(nu_v > 0.0)) throw UsageError("nu must be positive");
  if (every > 0) rc.solver.snapshot_every = every;
  const SolveResult r = solve(rc, inst);
  SmoothedObjective target(rc.c, rc.mu, inst.A, inst.W, inst.b);
  const bool pre = rc.precond != "none";

  const int last_stage = r.state.trace.empty() ? 0 : r.state.trace.back().stage;
  std::string sums;
  const fs::path base(out);
  for (const auto& snap : r.state.snapshots) {
    if (snap.stage != last_stage) continue;
    NewtonSystem sys(target, snap.x, snap.g_re, snap.g_im);
    const auto rep = spectrum_report(sys, rc.rho, nu_v, pre);
    const fs::path p = base.parent_path() / (base.stem().string() + "_s" + std::to_string(snap.stage) + "_k" +
                                             std::to_string(snap.iter) + base.extension().string());
    write_text(p, spectrum_csv(rep));
    sums += summary(rep, snap.stage, snap.iter);
  }
  NewtonSystem sys(target, r.state.x, r.state.g_re, r.state.g_im);
  const auto rep = spectrum_report(sys, rc.rho, nu_v, pre);
  write_text(base, spectrum_csv(rep));
  sums += summary(rep, last_stage, r.state.trace.empty() ? 0 : r.state.trace.back().iter);
  write_text(base.string() + ".summary", sums);
  std::cout << sums;
  return kExitOk;
}

int cmd_check(const std::string& suite, const std::string& csv) {
  const auto rep = suites::run(suite);
  std::cout << rep.text();
  if (!csv.empty()) write_text(csv, rep.csv());
  std::cout << (rep.passed() ? "all checks passed\n" : "some checks FAILED\n");
  return rep.passed() ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual Newton conjugate gradients for sparse reconstruction"};
  app.require_subcommand(1);

  long long size = 0;
  std::string phantom_out;
  auto* phantom = app.add_subcommand("phantom", "Write a Shepp-Logan phantom as PGM");
  phantom->add_option("--size", size, "Image side length (>= 16)")->required();
  phantom->add_option("--out", phantom_out, "Output PGM file")->required();

  std::string config, out_dir;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a configured problem");
  solve_cmd->add_option("--config", config, "key=value configuration file")->required();
  solve_cmd->add_option("--out-dir", out_dir, "Directory for reconstruction, trace and metrics")->required();

  std::string spectrum_config, spectrum_out;
  std::optional<double> nu;
  int every = 0;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the Newton matrix with and without preconditioning");
  spectrum->add_option("--config", spectrum_config, "key=value configuration file")->required();
  spectrum->add_option("--nu", nu, "Threshold on D_i (default 1/(2 mu))");
  spectrum->add_option("--out", spectrum_out, "CSV for the final Newton system")->required();
  spectrum->add_option("--every", every, "Also export systems every K iterations of the final stage");

  std::string suite, check_csv;
  auto* check = app.add_subcommand("check", "Run self-check suites");
  check->add_option("--suite", suite, "derivatives|invariants|rate|all|fault")->required();
  check->add_option("--csv", check_csv, "Optional CSV report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*phantom) return cmd_phantom(size, phantom_out);
    if (*solve_cmd) return cmd_solve(config, out_dir);
    if (*spectrum) return cmd_spectrum(spectrum_config, nu, spectrum_out, every);
    if (*check) {
      const auto& known = suites::names();
      if (std::find(known.begin(), known.end(), suite) == known.end()) {
        std::cerr << "check: unknown suite '" << suite << "'\n";
        return kExitError;
      }
      return cmd_check(suite, check_csv);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const SolverAbort& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
