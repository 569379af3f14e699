#include "nhmech/driver.hpp"

#include <algorithm>

#include "nhmech/hamjac.hpp"
#include "nhmech/reduction.hpp"

namespace nhmech {

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "in_N",       "closedness", "hj_weak",       "hj_strong",
      "related",    "forced",     "hamiltonian",   "reduced",
      "horizontal_mu", "classify", "chow",         "chow_transfer",
      "noether",    "bates"};
  return names;
}

const LagrangianSystem& require_dynamics(const SystemBundle& bundle) {
  if (!bundle.sys)
    throw ConfigError("system '" + bundle.name +
                      "' is constraint-only (no Lagrangian dynamics)");
  return *bundle.sys;
}

const GroupActionSpec& require_action(const SystemBundle& bundle) {
  if (!bundle.action)
    throw ConfigError("system '" + bundle.name +
                      "' declares no symmetry action");
  return *bundle.action;
}

HJCandidate require_candidate(const SystemBundle& bundle,
                              const std::string& name, const Params& params) {
  if (name.empty()) {
    std::string names;
    for (const auto& [k, v] : bundle.candidates)
      names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("a candidate name is required; system '" + bundle.name +
                      "' provides: " + (names.empty() ? "(none)" : names));
  }
  return build_candidate(bundle, name, params);
}

State bundle_state(const SystemBundle& bundle,
                   const std::optional<Eigen::VectorXd>& q0,
                   const std::optional<Eigen::VectorXd>& v0) {
  State s = bundle.state0;
  if (q0) s.q = *q0;
  if (v0) s.v = *v0;
  if (s.q.size() != s.v.size())
    throw ConfigError("q0 and v0 must have equal lengths (got " +
                      std::to_string(s.q.size()) + " and " +
                      std::to_string(s.v.size()) + ")");
  return s;
}

std::vector<Eigen::VectorXd> bundle_grid(const SystemBundle& bundle, int count,
                                         unsigned seed,
                                         std::string* describe) {
  GridSpec g{bundle.box_lo, bundle.box_hi, count, seed};
  if (describe) *describe = g.describe();
  return halton_grid(g);
}

std::vector<Eigen::VectorXd> bundle_reduced_grid(const SystemBundle& bundle,
                                                 int count, unsigned seed,
                                                 std::string* describe) {
  if (bundle.qbar_lo.size() == 0)
    throw ConfigError("system '" + bundle.name +
                      "' has no reduced sample box");
  GridSpec g{bundle.qbar_lo, bundle.qbar_hi, count, seed};
  if (describe) *describe = g.describe();
  return halton_grid(g);
}

Json params_to_json(const Params& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

CheckReport run_named_check(const SystemBundle& b, const CheckOptions& o,
                            Json* root) {
  const std::string& which = o.check;
  auto note = [root](const char* key, const Json& value) {
    if (root) (*root)[key] = value;
  };

  if (which == "in_N") {
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    return check_in_N(cand, b.cs, bundle_grid(b, o.grid_count, o.seed), o.tol);
  }
  if (which == "closedness") {
    const auto& sys = require_dynamics(b);
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    auto grid = bundle_grid(b, o.grid_count, o.seed);
    return b.cs.linear
               ? check_closedness_linear(cand, sys, b.cs, grid, o.tol)
               : check_nonlinear_pullback(cand, sys, b.cs, grid, o.tol);
  }
  if (which == "hj_weak" || which == "hj_strong") {
    const auto& sys = require_dynamics(b);
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    return check_hj_condition(cand, sys, b.cs,
                              bundle_grid(b, o.grid_count, o.seed),
                              which == "hj_strong", o.tol);
  }
  if (which == "related") {
    const auto& sys = require_dynamics(b);
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    return check_related(cand, sys, b.cs, bundle_grid(b, o.grid_count, o.seed),
                         o.tol);
  }
  if (which == "forced") {
    const auto& sys = require_dynamics(b);
    ReducedSystem red = chaplygin_reduce(sys, b.cs, require_action(b));
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    if (o.sign != "plus" && o.sign != "minus")
      throw ConfigError("sign must be plus or minus, got '" + o.sign + "'");
    note("sign", o.sign);
    return check_forced_hj(cand, red.base, red.gyro,
                           bundle_reduced_grid(b, o.grid_count, o.seed),
                           o.sign == "plus" ? HJSign::plus : HJSign::minus,
                           o.tol);
  }
  if (which == "hamiltonian") {
    const auto& sys = require_dynamics(b);
    HJCandidate sigma = legendre_compose(
        sys, require_candidate(b, o.candidate, o.cand_params));
    note("candidate", sigma.label);
    return check_hamiltonian_hj(sigma, sys, b.cs,
                                bundle_grid(b, o.grid_count, o.seed), !o.weak,
                                o.tol);
  }
  if (which == "reduced") {
    const auto& sys = require_dynamics(b);
    const auto& action = require_action(b);
    HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);
    note("candidate", cand.label);
    if (action.quotient && action.quotient->hlift) {
      ReducedSystem red = chaplygin_reduce(sys, b.cs, action);
      return check_reduced_hj(red, cand,
                              bundle_reduced_grid(b, o.grid_count, o.seed),
                              ReducedVariant::chaplygin, o.tol);
    }
    return check_reduced_hj_general(
        sys, b.cs, action, cand, bundle_reduced_grid(b, o.grid_count, o.seed),
        o.tol);
  }
  if (which == "horizontal_mu") {
    HorizontalMuFixture fx = horizontal_mu_fixture(o.mu1, o.mu2);
    note("candidate", fx.candidate.label);
    Eigen::VectorXd mu = fx.mu;
    if (o.mu_claim) {
      mu = *o.mu_claim;
      if (mu.size() != fx.mu.size())
        throw ConfigError("mu_claim needs " + std::to_string(fx.mu.size()) +
                          " components");
    }
    GridSpec g{Eigen::VectorXd::Constant(3, -1.0),
               Eigen::VectorXd::Constant(3, 1.0), o.grid_count, o.seed};
    CheckReport rep = check_horizontal_mu(fx.sys, fx.cs, fx.action,
                                          fx.candidate, mu, halton_grid(g),
                                          o.tol);
    rep.grid_spec = g.describe();
    return rep;
  }
  if (which == "classify") {
    const auto& sys = require_dynamics(b);
    Classification c = classify_case(sys, b.cs, require_action(b),
                                     bundle_state(b, o.q0, o.v0));
    CheckReport rep;
    rep.name = "classification";
    rep.points_tested = 1;
    rep.tolerance = 0.0;
    rep.max_residual = 0.0;
    rep.extra["verdict"] = c.verdict;
    rep.extra["dim_V"] = c.dim_V;
    rep.extra["dim_VN"] = c.dim_VN;
    rep.extra["dim_H"] = c.dim_H;
    rep.extra["dim_VN_cap_H"] = c.dim_VN_cap_H;
    rep.extra["dim_VN_plus_H"] = c.dim_VN_plus_H;
    rep.extra["dim_TN"] = c.dim_TN;
    return rep.finalize();
  }
  if (which == "chow") {
    if (b.dist_generators.empty())
      throw ConfigError("system '" + b.name +
                        "' has no distribution generators");
    const State s = bundle_state(b, o.q0, o.v0);
    ChowFlag flag = chow_flag(b.dist_generators, s.q, o.depth);
    CheckReport rep;
    rep.name = "bracket_growth";
    rep.points_tested = 1;
    rep.tolerance = 0.0;
    rep.max_residual = flag.complete ? 0.0 : 1.0;
    rep.extra["growth"] = flag.growth;
    rep.extra["complete"] = flag.complete;
    rep.extra["depth_used"] = flag.depth_used;
    return rep.finalize();
  }
  if (which == "noether") {
    const auto& sys = require_dynamics(b);
    const auto& action = require_action(b);
    const State s0 = bundle_state(b, o.q0, o.v0);
    Trajectory traj = integrate(sys, b.cs, s0, o.dt, o.steps, true);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(action.dim_g);
    xi[0] = 1.0;
    if (o.xi) {
      xi = *o.xi;
      if (xi.size() != action.dim_g)
        throw ConfigError("xi needs " + std::to_string(action.dim_g) +
                          " coefficients");
    }
    SmoothMap sect = constant_coefficients(xi, sys.n);
    return noether_check(sys, b.cs, action, sect, traj, o.tol);
  }
  if (which == "bates") {
    const auto& sys = require_dynamics(b);
    return bates_sniatycki_check(sys, b.cs, require_action(b),
                                 bundle_state(b, o.q0, o.v0), o.tol);
  }
  if (which == "chow_transfer") {
    const auto& action = require_action(b);
    if (b.dist_generators.empty())
      throw ConfigError("system '" + b.name +
                        "' has no distribution generators");
    const State s = bundle_state(b, o.q0, o.v0);
    ChowTransfer t = chow_transfer(b.dist_generators, action, s.q, o.depth);
    CheckReport rep;
    rep.name = "chow_transfer";
    rep.points_tested = 1;
    rep.tolerance = 0.0;
    rep.max_residual = t.agree ? 0.0 : 1.0;
    rep.extra["growth_full"] = t.on_q.growth;
    rep.extra["complete_full"] = t.on_q.complete;
    rep.extra["growth_reduced"] = t.reduced.growth;
    rep.extra["complete_reduced"] = t.reduced.complete;
    rep.extra["agree"] = t.agree;
    return rep.finalize();
  }

  std::string all;
  for (const std::string& n : check_names())
    all += (all.empty() ? "" : ", ") + n;
  throw ConfigError("unknown check '" + which + "'; expected one of " + all);
}

Json run_reduce_pipeline(const SystemBundle& b, const ReduceOptions& o) {
  const auto& sys = require_dynamics(b);
  const auto& action = require_action(b);
  if (!action.quotient || !action.quotient->hlift)
    throw ConfigError("reduce: system '" + b.name +
                      "' lacks quotient data with a horizontal lift");

  ReducedSystem red = chaplygin_reduce(sys, b.cs, action);
  HJCandidate cand = require_candidate(b, o.candidate, o.cand_params);

  auto qbar_grid = bundle_reduced_grid(b, o.grid_count, o.seed);
  auto q_grid = bundle_grid(b, o.grid_count, o.seed);

  CheckReport hj = check_reduced_hj(red, cand, qbar_grid,
                                    ReducedVariant::chaplygin, o.tol);
  HJCandidate full = reconstruct(action, cand);
  CheckReport inv = check_pushforward_invariance(action, full, q_grid, o.tol);
  CheckReport rel = check_related(full, sys, b.cs, q_grid, o.tol);

  Json root;
  root["command"] = "reduce";
  root["system"] = b.name;
  root["params"] = params_to_json(b.params);
  root["candidate"] = cand.label;
  root["reduced_dim"] = red.base.n;
  root["reduced_hj"] = hj.to_json();
  root["reconstructed"] = full.label;
  root["invariance"] = inv.to_json();
  root["full_relatedness"] = rel.to_json();
  root["pass"] = hj.pass && inv.pass;
  return root;
}

}  // namespace nhmech
