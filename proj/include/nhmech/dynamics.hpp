#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nhmech/constraints.hpp"

namespace nhmech {

struct ConstrainedField {
  Eigen::VectorXd accel;       /* n */
  Eigen::VectorXd multipliers; /* k */
  double residual_norm = 0.0;  /* equation-of-motion residual */
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Eigen::VectorXd> multipliers;
  std::vector<double> energies;
  std::vector<double> psi_max;
};

/* Multiplier route: solve the k x k system enforcing d/dt psi = 0 along the
   field, with the reaction forces +lambda_a dpsi^a/dv on the right side. */
ConstrainedField constrained_field(const LagrangianSystem& sys,
                                   const ConstraintSet& cs, const State& s,
                                   double on_tol = 1e-8);

/* Independent projector route: split T(TQ)|_N = TN (+) F_L-perp numerically
   and project the free Euler-Lagrange field onto TN. Serves as the
   brute-force oracle for constrained_field. */
ConstrainedField projector_field(const LagrangianSystem& sys,
                                 const ConstraintSet& cs, const State& s,
                                 double on_tol = 1e-8);

/* Classical RK4 on (q, v); with stabilize set, each step ends with a minimal
   W-metric velocity correction back onto the constraint manifold. */
Trajectory integrate(const LagrangianSystem& sys, const ConstraintSet& cs,
                     const State& s0, double dt, long steps,
                     bool stabilize = true);

/* Minimal W-metric correction of the velocity onto the constraint manifold
   (exact in one pass for linear constraints, short Newton loop otherwise). */
State project_velocity(const LagrangianSystem& sys, const ConstraintSet& cs,
                       const State& s);

/* CSV schema: t,q1..qn,v1..vn,lam1..lamk,energy,psi_max with 17 significant
   digits. */
void write_trajectory_csv(const Trajectory& traj, int n, int k,
                          std::ostream& out);
std::string trajectory_csv(const Trajectory& traj, int n, int k);

/* Pairs (i_Gamma omega_L - dE_L) against a basis of F_L and checks the
   second-order (SODE) property of the constrained field. */
CheckReport verify_motion_equation(const LagrangianSystem& sys,
                                   const ConstraintSet& cs, const State& s,
                                   double tol = 1e-9);

struct HamiltonianField {
  Eigen::VectorXd qdot;
  Eigen::VectorXd pdot;
  Eigen::VectorXd multipliers; /* beta_a */
};

/* Constrained Hamilton equations for mechanical systems with linear
   constraints; multipliers from differentiating Psi^a = psi^a_i dH/dp_i. */
HamiltonianField hamiltonian_field(const LagrangianSystem& sys,
                                   const ConstraintSet& cs,
                                   const PhasePoint& ph);

}  // namespace nhmech
