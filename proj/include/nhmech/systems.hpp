#pragma once

#include <map>
#include <string>
#include <vector>

#include "nhmech/reduction.hpp"

namespace nhmech {

using Params = std::map<std::string, double>;

/* A pinned expected value for tests and the CLI. `at` records the input the
   value refers to (meaning depends on the fixture, see the registry source);
   `source` tags how the value was obtained: closed_form (hand elimination),
   recomputed (independent numerical rederivation) or construction (true by
   design of the bundle). */
struct Fixture {
  Eigen::VectorXd value;
  Eigen::VectorXd at;
  double tolerance = 0.0;
  std::string source;
};

/* A named candidate family; build() merges the given parameters over the
   per-candidate defaults and rejects unknown keys. */
struct CandidateEntry {
  std::string summary;
  Params defaults;
  std::function<HJCandidate(const Params&)> build;
};

/* Everything the CLI and the test suite need about one built-in system.
   sys is absent for kinematic-only demos; action is absent when the system
   ships without a symmetry group. */
struct SystemBundle {
  std::string name;
  Params params;
  std::optional<LagrangianSystem> sys;
  ConstraintSet cs;
  std::optional<GroupActionSpec> action;
  std::vector<SmoothMap> dist_generators; /* span of the admissible directions */
  std::map<std::string, CandidateEntry> candidates;
  std::map<std::string, Fixture> fixtures;
  Eigen::VectorXd box_lo, box_hi;         /* default check box on Q */
  Eigen::VectorXd qbar_lo, qbar_hi;       /* default box on the quotient */
  State state0;                           /* admissible default initial state */
};

/* Registry lookup. Unknown names, unknown parameter keys and nonpositive
   parameter values raise ConfigError. */
SystemBundle get_system(const std::string& name, const Params& params = {});

std::vector<std::string> registered_systems();

/* Build a candidate from a bundle by name, with parameter overrides. */
HJCandidate build_candidate(const SystemBundle& bundle, const std::string& name,
                            const Params& params = {});

/* Synthetic horizontal-case setup: free particle with the constraint
   "vertical velocity = 0" and the planar translation group. The momentum of
   the motion is mu and the matching candidate field is the constant
   (mu1/m, mu2/m, 0). Used by the horizontal-momentum check. */
struct HorizontalMuFixture {
  LagrangianSystem sys;
  ConstraintSet cs;
  GroupActionSpec action;
  HJCandidate candidate;
  Eigen::VectorXd mu;
};

HorizontalMuFixture horizontal_mu_fixture(double mu1 = 1.0, double mu2 = 0.5,
                                          double m = 1.0);

}  // namespace nhmech
