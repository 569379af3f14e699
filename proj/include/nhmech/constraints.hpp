#pragma once

#include <vector>

#include "nhmech/linalg.hpp"
#include "nhmech/mechanics.hpp"
#include "nhmech/report.hpp"

namespace nhmech {

/* k velocity-dependent constraint functions psi^a(q, v). When the linear
   flag is set, coeff(q) holds the k x n coefficient matrix with
   psi^a = coeff^a_i(q) v^i. */
struct ConstraintSet {
  int k = 0;
  SmoothMap psi; /* 2n -> k */
  bool linear = false;
  std::optional<SmoothMap> coeff; /* n -> k*n, row-major */
};

Eigen::VectorXd constraint_residual(const ConstraintSet& cs, const State& s);

bool on_constraint_manifold(const ConstraintSet& cs, const State& s,
                            double tol = 1e-8);

/* Rows dpsi^a/dv at (q, v): the semibasic reaction covectors. */
Eigen::MatrixXd reaction_matrix(const ConstraintSet& cs, const State& s);

std::vector<Eigen::VectorXd> reaction_basis(const ConstraintSet& cs,
                                            const State& s);

/* Kernel of the reaction covectors in R^n (the admissible base directions;
   the constraint-distribution fiber for linear constraints). */
Subspace constraint_distribution(const ConstraintSet& cs, const State& s);

/* C^{ab} = -W^{ij} (dpsi^a/dv^i)(dpsi^b/dv^j); invertibility of C is the
   compatibility condition. */
Eigen::MatrixXd compatibility_matrix(const LagrangianSystem& sys,
                                     const ConstraintSet& cs, const State& s);

CheckReport check_admissibility(const ConstraintSet& cs, const State& s,
                                double tol = 1e-8);

/* Liouville tangency |v . dpsi/dv| over the given on-manifold samples;
   reaction forces are workless exactly when this vanishes. */
CheckReport check_ideal(const ConstraintSet& cs,
                        const std::vector<State>& samples, double tol = 1e-8);

struct ChowFlag {
  std::vector<int> growth;
  bool complete = false;
  int depth_used = 0;
};

/* Growth vector of the iterated-bracket flag of the generator fields at q.
   Depth d adds brackets of every depth-(d-1) field with every generator;
   stops early once the ranks saturate the dimension or stall. */
ChowFlag chow_flag(const std::vector<SmoothMap>& generators,
                   const Eigen::VectorXd& q, int max_depth,
                   double tol = kRankTol);

/* Tangent space of the constraint manifold at s, as a subspace of R^{2n}. */
Subspace tangent_N(const ConstraintSet& cs, const State& s);

/* F_L fiber: kernel of the semibasic lifts (A 0) of the reaction rows. */
Subspace f_distribution(const ConstraintSet& cs, const State& s);

/* H = TN intersect F_L; requires compatibility. If omega_min_sv is given it
   receives the smallest singular value of the two-form restricted to H
   (nondegeneracy witness). */
Subspace h_distribution(const LagrangianSystem& sys, const ConstraintSet& cs,
                        const State& s, double* omega_min_sv = nullptr);

}  // namespace nhmech
