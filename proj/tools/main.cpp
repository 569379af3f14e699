/* nhmech: command-line frontend for the nonholonomic mechanics toolkit.
 *
 * Subcommands:
 *   simulate  integrate the constrained dynamics, write a trajectory CSV
 *   check     run one named verification and emit a JSON report
 *   reduce    Chaplygin reduction pipeline: reduce, solve on the quotient,
 *             reconstruct, and compare against the full dynamics
 *
 * Exit codes: 0 pass, 1 check failed, 2 configuration error,
 * 3 numerical failure (step index in the message). Reports go to stdout
 * (and to --out when given); timings and diagnostics go to stderr.
 */

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhmech/driver.hpp"
#include "nhmech/hamjac.hpp"
#include "nhmech/reduction.hpp"
#include "nhmech/systems.hpp"

namespace {

using nhmech::CheckReport;
using nhmech::ConfigError;
using nhmech::Json;
using nhmech::Params;
using nhmech::State;
using nhmech::SystemBundle;

double parse_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end == nullptr || *end != '\0')
    throw ConfigError(what + ": '" + text + "' is not a number");
  return x;
}

Params parse_kv(const std::vector<std::string>& items, const std::string& what) {
  Params out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(what + ": expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] =
        parse_number(item.substr(eq + 1), what + " " + item.substr(0, eq));
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::string::size_type pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    vals.push_back(parse_number(text.substr(pos, comma - pos), what));
    pos = comma + 1;
  }
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = vals[static_cast<size_t>(i)];
  return v;
}

/* Options shared by every subcommand. */
struct CommonOpts {
  std::string system = "free_particle";
  std::vector<std::string> param_kv;
  std::string candidate;
  std::vector<std::string> cand_kv;
  std::optional<double> c1, c2;
  double tol = 1e-8;
  int grid_count = 100;
  unsigned seed = 0;
  std::string out;
  std::string q0_text, v0_text;
  std::string config_path;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--system", o.system,
                  "built-in system bundle (see `check --list-systems`)")
      ->capture_default_str();
  cmd->add_option("--param", o.param_kv,
                  "system parameter override, key=value (repeatable)");
  cmd->add_option("--candidate", o.candidate, "candidate name from the bundle");
  cmd->add_option("--cand-param", o.cand_kv,
                  "candidate parameter, key=value (repeatable)");
  cmd->add_option("--c1", o.c1, "shorthand for --cand-param c1=X");
  cmd->add_option("--c2", o.c2, "shorthand for --cand-param c2=X");
  cmd->add_option("--tol", o.tol, "residual tolerance")->capture_default_str();
  cmd->add_option("--grid", o.grid_count, "number of quasi-random grid points")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "grid sequence offset")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "also write the report/CSV to this path");
  cmd->add_option("--q0", o.q0_text, "initial configuration, comma-separated");
  cmd->add_option("--v0", o.v0_text, "initial velocity, comma-separated");
  cmd->add_option("--config", o.config_path,
                  "flat key=value option file; command-line flags win")
      ->expected(1);
}

/* Expand `--config FILE` into option tokens. The file holds one key=value
 * per line (comments start with '#'); each key maps to the long option of
 * the same name. A key given explicitly on the command line suppresses all
 * config lines for that key, so flags always win. */
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::set<std::string> explicit_keys;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    explicit_keys.insert(eq == std::string::npos ? a.substr(2)
                                                 : a.substr(2, eq - 2));
  }

  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string entry = line.substr(first, last - first + 1);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + entry + "'");
    const std::string key = entry.substr(0, eq);
    if (explicit_keys.count(key)) continue;
    args.push_back("--" + key);
    args.push_back(entry.substr(eq + 1));
  }
  return args;
}

SystemBundle load_bundle(const CommonOpts& o) {
  return nhmech::get_system(o.system, parse_kv(o.param_kv, "--param"));
}

Params candidate_params(const CommonOpts& o) {
  Params p = parse_kv(o.cand_kv, "--cand-param");
  if (o.c1) p["c1"] = *o.c1;
  if (o.c2) p["c2"] = *o.c2;
  return p;
}

std::optional<Eigen::VectorXd> opt_vector(const std::string& text,
                                          const std::string& what) {
  if (text.empty()) return std::nullopt;
  return parse_vector(text, what);
}

void emit(const Json& j, const std::string& out_path) {
  const std::string text = nhmech::dump_json(j) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    if (!f) throw ConfigError("cannot write '" + out_path + "'");
  }
}

/* ------------------------------------------------------------------ */

struct SimulateOpts {
  double dt = 1e-3;
  long steps = 1000;
  bool no_stabilize = false;
};

int run_simulate(const CommonOpts& o, const SimulateOpts& so) {
  SystemBundle b = load_bundle(o);
  const auto& sys = nhmech::require_dynamics(b);
  State s0 = nhmech::bundle_state(b, opt_vector(o.q0_text, "--q0"),
                                  opt_vector(o.v0_text, "--v0"));
  const Eigen::VectorXd res0 = nhmech::constraint_residual(b.cs, s0);
  const double r0 = res0.size() ? res0.lpNorm<Eigen::Infinity>() : 0.0;
  if (r0 > o.tol)
    throw ConfigError("initial state is off the constraint manifold: |psi| = " +
                      nhmech::format_double(r0) + " > tol " +
                      nhmech::format_double(o.tol));

  nhmech::Trajectory traj =
      nhmech::integrate(sys, b.cs, s0, so.dt, so.steps, !so.no_stabilize);

  const std::string out_path = o.out.empty() ? "trajectory.csv" : o.out;
  {
    std::ofstream f(out_path, std::ios::binary);
    nhmech::write_trajectory_csv(traj, sys.n, b.cs.k, f);
    if (!f) throw ConfigError("cannot write '" + out_path + "'");
  }

  double psi_max = 0.0;
  for (double r : traj.psi_max) psi_max = std::max(psi_max, r);
  Json j;
  j["command"] = "simulate";
  j["system"] = b.name;
  j["params"] = nhmech::params_to_json(b.params);
  j["dt"] = so.dt;
  j["steps"] = so.steps;
  j["rows"] = static_cast<long>(traj.times.size());
  j["energy_initial"] = traj.energies.front();
  j["energy_final"] = traj.energies.back();
  j["energy_drift"] = std::abs(traj.energies.back() - traj.energies.front());
  j["psi_max"] = psi_max;
  j["csv"] = out_path;
  const std::string text = nhmech::dump_json(j) + "\n";
  std::fputs(text.c_str(), stdout);
  return 0;
}

/* ------------------------------------------------------------------ */

struct CheckCliOpts {
  std::string check;
  int depth = 4;
  bool weak = false;
  std::string sign = "minus";
  double mu1 = 1.0, mu2 = 0.5;
  std::string mu_claim_text;
  std::string xi_text;
  double dt = 1e-3;
  long steps = 1000;
  bool list_systems = false;
};

int run_check(const CommonOpts& o, const CheckCliOpts& co) {
  if (co.list_systems) {
    Json j;
    j["systems"] = nhmech::registered_systems();
    emit(j, o.out);
    return 0;
  }
  if (co.check.empty())
    throw ConfigError("check: --check NAME is required");
  SystemBundle b = load_bundle(o);

  nhmech::CheckOptions d;
  d.check = co.check;
  d.candidate = o.candidate;
  d.cand_params = candidate_params(o);
  d.tol = o.tol;
  d.grid_count = o.grid_count;
  d.seed = o.seed;
  d.q0 = opt_vector(o.q0_text, "--q0");
  d.v0 = opt_vector(o.v0_text, "--v0");
  d.depth = co.depth;
  d.weak = co.weak;
  d.sign = co.sign;
  d.mu1 = co.mu1;
  d.mu2 = co.mu2;
  d.mu_claim = opt_vector(co.mu_claim_text, "--mu-claim");
  d.xi = opt_vector(co.xi_text, "--xi");
  d.dt = co.dt;
  d.steps = co.steps;

  Json root;
  root["command"] = "check";
  root["check"] = co.check;
  root["system"] = b.name;
  root["params"] = nhmech::params_to_json(b.params);
  CheckReport rep = nhmech::run_named_check(b, d, &root);
  root["report"] = rep.to_json();
  root["pass"] = rep.pass;
  emit(root, o.out);
  return rep.pass ? 0 : 1;
}

/* ------------------------------------------------------------------ */

int run_reduce(const CommonOpts& o) {
  SystemBundle b = load_bundle(o);
  nhmech::ReduceOptions ro;
  ro.candidate = o.candidate;
  ro.cand_params = candidate_params(o);
  ro.tol = o.tol;
  ro.grid_count = o.grid_count;
  ro.seed = o.seed;
  Json root = nhmech::run_reduce_pipeline(b, ro);
  emit(root, o.out);
  return root["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nhmech: nonholonomic mechanics toolkit"};
  app.require_subcommand(1);

  CommonOpts sim_common, chk_common, red_common;
  SimulateOpts sim_opts;
  CheckCliOpts chk_opts;

  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate the constrained dynamics and write a CSV");
  add_common(sim, sim_common);
  sim->add_option("--dt", sim_opts.dt, "time step")->capture_default_str();
  sim->add_option("--steps", sim_opts.steps, "number of RK4 steps")
      ->capture_default_str();
  sim->add_flag("--no-stabilize", sim_opts.no_stabilize,
                "skip per-step velocity projection onto the constraints");

  CLI::App* chk =
      app.add_subcommand("check", "run one named verification, emit JSON");
  add_common(chk, chk_common);
  chk->add_option("--check", chk_opts.check,
                  "in_N | closedness | hj_weak | hj_strong | related | forced "
                  "| hamiltonian | reduced | horizontal_mu | classify | chow "
                  "| chow_transfer | noether | bates");
  chk->add_option("--depth", chk_opts.depth, "bracket depth for chow checks")
      ->capture_default_str();
  chk->add_flag("--weak", chk_opts.weak,
                "hamiltonian check: test along the distribution only");
  chk->add_option("--sign", chk_opts.sign,
                  "forced check: sign convention (plus|minus)")
      ->capture_default_str();
  chk->add_option("--mu1", chk_opts.mu1, "horizontal_mu: first momentum value")
      ->capture_default_str();
  chk->add_option("--mu2", chk_opts.mu2, "horizontal_mu: second momentum value")
      ->capture_default_str();
  chk->add_option("--mu-claim", chk_opts.mu_claim_text,
                  "horizontal_mu: claimed momentum values to test against, "
                  "comma-separated (defaults to the fixture's own)");
  chk->add_option("--xi", chk_opts.xi_text,
                  "noether: constant generator coefficients, comma-separated");
  chk->add_option("--dt", chk_opts.dt, "noether: integration step")
      ->capture_default_str();
  chk->add_option("--steps", chk_opts.steps, "noether: integration steps")
      ->capture_default_str();
  chk->add_flag("--list-systems", chk_opts.list_systems,
                "print the registered system names and exit");

  CLI::App* red = app.add_subcommand(
      "reduce", "quotient pipeline: reduce, check, reconstruct, compare");
  add_common(red, red_common);

  try {
    std::vector<std::string> args =
        apply_config_file(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = 2;
  try {
    if (sim->parsed())
      code = run_simulate(sim_common, sim_opts);
    else if (chk->parsed())
      code = run_check(chk_common, chk_opts);
    else if (red->parsed())
      code = run_reduce(red_common);
  } catch (const nhmech::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const nhmech::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const nhmech::DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const nhmech::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const nhmech::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::fprintf(stderr, "elapsed %.3f s\n", dt.count());
  return code;
}
