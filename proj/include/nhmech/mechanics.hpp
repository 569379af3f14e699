#pragma once

#include <Eigen/Dense>
#include <optional>

#include "nhmech/smooth.hpp"

namespace nhmech {

/* Optional mechanical-type structure L = (1/2) v^T M(q) v - V(q). The
   components are kept as smooth maps so derivatives flow through them. */
struct MechanicalData {
  SmoothMap metric;    /* n -> n*n, row-major entries of M(q) */
  SmoothMap potential; /* n -> 1 */
};

struct LagrangianSystem {
  int n = 0;
  SmoothMap L; /* 2n -> 1 on (q, v) */
  std::optional<MechanicalData> mechanical;
};

/* L(q, v) = (1/2) v^T M(q) v - V(q) assembled from mechanical data. */
SmoothMap mechanical_lagrangian(const MechanicalData& md, int n);

struct State {
  Eigen::VectorXd q;
  Eigen::VectorXd v;
};

struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

/* Concatenate (q, v) into the 2n tangent-bundle coordinate vector. */
Eigen::VectorXd tangent_coords(const State& s);

double energy(const LagrangianSystem& sys, const State& s);

Eigen::VectorXd momentum(const LagrangianSystem& sys, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& v);

PhasePoint legendre(const LagrangianSystem& sys, const State& s);

/* Closed-form fiber inverse v = M(q)^{-1} p; mechanical systems only. */
State legendre_inverse(const LagrangianSystem& sys, const PhasePoint& ph);

double hamiltonian(const LagrangianSystem& sys, const PhasePoint& ph);

Eigen::MatrixXd metric_matrix(const LagrangianSystem& sys,
                              const Eigen::VectorXd& q);

/* Hessian of L in the velocities (the matrix W); throws RegularityError if
   ill-conditioned past 1e12. */
Eigen::MatrixXd velocity_hessian(const LagrangianSystem& sys, const State& s);

/* Full second-derivative matrix of L over (q, v), blocks [qq qv; vq vv]. */
Eigen::MatrixXd full_hessian(const LagrangianSystem& sys, const State& s);

Eigen::VectorXd lagrangian_gradient(const LagrangianSystem& sys,
                                    const State& s);

/* Coordinate matrix of the Poincare-Cartan two-form at (q, v): antisymmetric
   2n x 2n with omega(U, W) = U^T Omega W. */
Eigen::MatrixXd lagrangian_two_form(const LagrangianSystem& sys,
                                    const State& s);

/* Differential of the energy as a 2n covector on TQ. */
Eigen::VectorXd denergy(const LagrangianSystem& sys, const State& s);

/* Euler-Lagrange vector field (v, a) with W a = dL/dq - (d2L/dv dq) v. */
Eigen::VectorXd unconstrained_field(const LagrangianSystem& sys,
                                    const State& s);

/* The fiber derivative dL/dv as a smooth map TQ -> R^n (supports three
   derivative levels; one level is consumed by the AD). */
SmoothMap momentum_map(const LagrangianSystem& sys);

/* H(q, p) = (1/2) p^T M(q)^{-1} p + V(q) as a smooth map on (q, p);
   mechanical systems only. AD flows through the matrix solve. */
SmoothMap hamiltonian_map(const LagrangianSystem& sys);

}  // namespace nhmech
