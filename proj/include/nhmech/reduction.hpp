#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhmech/hamjac.hpp"

namespace nhmech {

/* A Lie group acting on Q through its infinitesimal generators, with
   optional quotient-chart data for reduction. The horizontal lift must be
   fiberwise linear in the reduced velocity. */
struct GroupActionSpec {
  int dim_g = 0;
  std::vector<SmoothMap> generators; /* each n -> n */
  /* c[(i*dim_g + j)*dim_g + k] = c^k_{ij}; empty means abelian. */
  std::vector<double> structure_constants;

  struct Quotient {
    int dim_qbar = 0;
    SmoothMap project;              /* n -> dim_qbar */
    SmoothMap section;              /* dim_qbar -> n */
    std::optional<SmoothMap> hlift; /* (q, vbar) -> v, arity n + dim_qbar */
  };
  std::optional<Quotient> quotient;
};

/* Reduced Chaplygin data: an ordinary Lagrangian on the quotient plus the
   gyroscopic one-form entering its equations of motion on the right-hand
   side, d/dt (dL* by dvbar) - (dL* by dqbar) = gyro. */
struct ReducedSystem {
  LagrangianSystem base;
  SmoothMap gyro; /* (qbar, vbar) -> covector, plain-value level only */
};

/* Consistency of user-supplied quotient data: project o section = id,
   hlift lands in the constraint distribution, Tproject o hlift = id. */
CheckReport check_quotient_data(const ConstraintSet& cs,
                                const GroupActionSpec& action,
                                const std::vector<Eigen::VectorXd>& qbar_grid,
                                double tol = 1e-10);

/* Generator-wise invariance of L and tangency of the lifted action to the
   constraint manifold at the given on-manifold samples. */
CheckReport check_invariance(const LagrangianSystem& sys,
                             const ConstraintSet& cs,
                             const GroupActionSpec& action,
                             const std::vector<State>& samples,
                             double tol = 1e-8);

/* Relative position of the symmetry directions and the constraints at s. */
struct Classification {
  std::string verdict; /* pure_kinematic | horizontal | general */
  int dim_V = 0;       /* span of tangent-lifted generators */
  int dim_VN = 0;      /* ... intersected with TN */
  int dim_H = 0;
  int dim_VN_cap_H = 0;
  int dim_VN_plus_H = 0;
  int dim_TN = 0;
};

Classification classify_case(const LagrangianSystem& sys,
                             const ConstraintSet& cs,
                             const GroupActionSpec& action, const State& s);

/* Subalgebra of generator directions annihilated by the reaction covectors
   at q, as a subspace of generator coefficients. */
Subspace momentum_subspace(const LagrangianSystem& sys,
                           const ConstraintSet& cs,
                           const GroupActionSpec& action,
                           const Eigen::VectorXd& q);

/* Constant coefficient section c(q) = coeffs, usable wherever a
   configuration dependent section is expected. */
SmoothMap constant_coefficients(const Eigen::VectorXd& coeffs, int arity);

/* J_xi = dL/dv . xi_Q(q) for constant coefficients or a configuration
   dependent section of coefficients. */
double nonholonomic_momentum(const LagrangianSystem& sys,
                             const GroupActionSpec& action,
                             const Eigen::VectorXd& xi_coeffs, const State& s);
double nonholonomic_momentum(const LagrangianSystem& sys,
                             const GroupActionSpec& action,
                             const SmoothMap& xi_section, const State& s);

/* Compares d/dt of the momentum along a trajectory (fourth-order finite
   differences) with the complete-lift derivative of L by the section
   field. Conservation holds when the section stays inside the momentum
   subspace along the path. */
CheckReport noether_check(const LagrangianSystem& sys, const ConstraintSet& cs,
                          const GroupActionSpec& action,
                          const SmoothMap& xi_section, const Trajectory& traj,
                          double tol = 1e-7);

/* Chaplygin reduction: L* by composition with section and horizontal lift,
   the gyroscopic one-form by contraction of the constrained dynamics with
   the numerically assembled difference of exterior derivatives. */
ReducedSystem chaplygin_reduce(const LagrangianSystem& sys,
                               const ConstraintSet& cs,
                               const GroupActionSpec& action);

enum class ReducedVariant { chaplygin, pure_kinematic };

/* Reduced Hamilton-Jacobi test on the quotient. The chaplygin variant
   evaluates the forced energy equation under both sign conventions and
   records which one holds; the pure_kinematic variant fixes the minus sign
   and adds the closedness side condition (pullback of the reduced
   two-form). */
CheckReport check_reduced_hj(const ReducedSystem& red, const HJCandidate& cand,
                             const std::vector<Eigen::VectorXd>& grid,
                             ReducedVariant variant, double tol = 1e-8);

/* General-case reduced test for candidates qbar -> full velocity at the
   section point: d(E o candidate) must lie in the projected reaction
   codistribution; includes the reduced-constraint membership gate. */
CheckReport check_reduced_hj_general(const LagrangianSystem& sys,
                                     const ConstraintSet& cs,
                                     const GroupActionSpec& action,
                                     const HJCandidate& cand,
                                     const std::vector<Eigen::VectorXd>& grid,
                                     double tol = 1e-8);

/* Invariant extension of a reduced candidate: through the horizontal lift
   when present, otherwise by transporting the section velocity unchanged
   (exact for translation actions). */
HJCandidate reconstruct(const GroupActionSpec& action,
                        const HJCandidate& reduced);

/* max |[xi_Q, X]| over generators and grid: G-invariance of a field. */
CheckReport check_pushforward_invariance(const GroupActionSpec& action,
                                         const HJCandidate& cand,
                                         const std::vector<Eigen::VectorXd>& grid,
                                         double tol = 1e-8);

/* Horizontal-symmetry verification on the momentum level set: isotropy
   invariance of the candidate, momentum matching, and the unreduced
   Hamilton-Jacobi conditions. Requires horizontal classification. */
CheckReport check_horizontal_mu(const LagrangianSystem& sys,
                                const ConstraintSet& cs,
                                const GroupActionSpec& action,
                                const HJCandidate& cand,
                                const Eigen::VectorXd& mu,
                                const std::vector<Eigen::VectorXd>& grid,
                                double tol = 1e-8);

/* Pre-quotient test of the reduced-dynamics equation on the subbundle
   U = H intersect (V cap F_L)-perp: the constrained field paired against
   every u in U must reproduce dE_L(u). */
CheckReport bates_sniatycki_check(const LagrangianSystem& sys,
                                  const ConstraintSet& cs,
                                  const GroupActionSpec& action, const State& s,
                                  double tol = 1e-8);

/* Bracket-growth completeness computed on Q and for the projected generator
   fields on the quotient, with the agreement verdict. */
struct ChowTransfer {
  ChowFlag on_q;
  ChowFlag reduced;
  bool agree = false;
};

ChowTransfer chow_transfer(const std::vector<SmoothMap>& generators,
                           const GroupActionSpec& action,
                           const Eigen::VectorXd& q, int max_depth,
                           double tol = kRankTol);

}  // namespace nhmech
