#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhmech/systems.hpp"

namespace nhmech {

/* Frontend-neutral option set for the named verification checks. The CLI
   and the Python module both fill this struct and call run_named_check,
   so every check behaves identically regardless of the entry point. */
struct CheckOptions {
  std::string check;

  std::string candidate; /* bundle candidate name; empty means not given */
  Params cand_params;

  double tol = 1e-8;
  int grid_count = 100;
  unsigned seed = 0;

  /* Initial-state override for the single-point checks. */
  std::optional<Eigen::VectorXd> q0, v0;

  int depth = 4;              /* bracket-growth depth */
  bool weak = false;          /* hamiltonian: distribution-only mode */
  std::string sign = "minus"; /* forced: sign convention */

  double mu1 = 1.0, mu2 = 0.5;             /* horizontal_mu fixture values */
  std::optional<Eigen::VectorXd> mu_claim; /* momentum to test against */

  std::optional<Eigen::VectorXd> xi; /* noether generator coefficients */
  double dt = 1e-3;                  /* noether integration step */
  long steps = 1000;                 /* noether integration length */
};

/* Names accepted by run_named_check, in the documented order. */
const std::vector<std::string>& check_names();

/* Dispatch on options.check. When root is given, presentation fields
   (candidate label, sign) are added to it. Unknown names and invalid
   option combinations raise ConfigError. */
CheckReport run_named_check(const SystemBundle& bundle, const CheckOptions& o,
                            Json* root = nullptr);

struct ReduceOptions {
  std::string candidate;
  Params cand_params;
  double tol = 1e-8;
  int grid_count = 100;
  unsigned seed = 0;
};

/* Quotient pipeline: reduce, test the reduced equation, reconstruct, test
   invariance of the lift and its relation to the full dynamics. Returns
   the complete report object; "pass" gates on the reduced equation and
   the invariance of the reconstruction. The unreduced comparison is
   reported, not gated: a quotient-level solution need not solve the full
   equations upstairs, and for the turning-motion candidates it measurably
   does not. */
Json run_reduce_pipeline(const SystemBundle& bundle, const ReduceOptions& o);

/* Shared frontend helpers; each raises ConfigError when the bundle lacks
   the requested piece. */
const LagrangianSystem& require_dynamics(const SystemBundle& bundle);
const GroupActionSpec& require_action(const SystemBundle& bundle);
HJCandidate require_candidate(const SystemBundle& bundle,
                              const std::string& name, const Params& params);

/* state0 with optional component-wise overrides; lengths must agree. */
State bundle_state(const SystemBundle& bundle,
                   const std::optional<Eigen::VectorXd>& q0,
                   const std::optional<Eigen::VectorXd>& v0);

/* Quasi-random sample grids over the bundle's default boxes. */
std::vector<Eigen::VectorXd> bundle_grid(const SystemBundle& bundle, int count,
                                         unsigned seed,
                                         std::string* describe = nullptr);
std::vector<Eigen::VectorXd> bundle_reduced_grid(const SystemBundle& bundle,
                                                 int count, unsigned seed,
                                                 std::string* describe = nullptr);

Json params_to_json(const Params& params);

}  // namespace nhmech
