#pragma once

#include <string>
#include <vector>

#include "nhmech/dynamics.hpp"

namespace nhmech {

/* A candidate solution of the Hamilton-Jacobi conditions: either a vector
   field X: Q -> TQ or a one-form sigma: Q -> T*Q, stored as its coordinate
   map Q -> R^n. */
struct HJCandidate {
  enum class Kind { vector_field, one_form };
  Kind kind = Kind::vector_field;
  SmoothMap map;
  std::string label;
};

/* Axis-aligned box sampled with a Halton sequence; seed shifts the start
   index, so equal specs reproduce byte-identical point sets. */
struct GridSpec {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  int count = 100;
  unsigned seed = 0;

  std::string describe() const;
};

std::vector<Eigen::VectorXd> halton_grid(const GridSpec& grid);

/* Regular tensor-product grid with counts[i] samples per axis, endpoints
   included. */
std::vector<Eigen::VectorXd> product_grid(const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi,
                                          const std::vector<int>& counts);

/* max |psi(q, X(q))| over the grid: does the image of X lie inside the
   constraint manifold? */
CheckReport check_in_N(const HJCandidate& cand, const ConstraintSet& cs,
                       const std::vector<Eigen::VectorXd>& grid,
                       double tol = 1e-8);

/* Exterior derivative of the composed momentum one-form sigma = FL o X,
   evaluated on pairs of constraint-distribution directions at each grid
   point. Linear constraints. */
CheckReport check_closedness_linear(const HJCandidate& cand,
                                    const LagrangianSystem& sys,
                                    const ConstraintSet& cs,
                                    const std::vector<Eigen::VectorXd>& grid,
                                    double tol = 1e-8);

/* Pullback X* omega_L evaluated on pairs from ker dpsi/dv(q, X(q)); the
   nonlinear-constraint generalization of the closedness test. */
CheckReport check_nonlinear_pullback(const HJCandidate& cand,
                                     const LagrangianSystem& sys,
                                     const ConstraintSet& cs,
                                     const std::vector<Eigen::VectorXd>& grid,
                                     double tol = 1e-8);

/* Differential of g = E_L o X. Weak mode tests dg against the constraint
   distribution only; strong mode requires dg = 0 outright. */
CheckReport check_hj_condition(const HJCandidate& cand,
                               const LagrangianSystem& sys,
                               const ConstraintSet& cs,
                               const std::vector<Eigen::VectorXd>& grid,
                               bool strong, double tol = 1e-8);

/* |DX(q) X(q) - accel(q, X(q))|: X maps its own integral curves onto
   trajectories of the constrained dynamics. */
CheckReport check_related(const HJCandidate& cand, const LagrangianSystem& sys,
                          const ConstraintSet& cs,
                          const std::vector<Eigen::VectorXd>& grid,
                          double tol = 1e-8);

/* Sign convention for the forced energy equation d(E_L o X) = s X*alpha. */
enum class HJSign { plus, minus };

inline const char* to_string(HJSign s) {
  return s == HJSign::plus ? "plus" : "minus";
}

/* Forced variant on an unconstrained system: residual of
   d(E_L o X) - s X*alpha for a semibasic force one-form alpha(q, v). */
CheckReport check_forced_hj(const HJCandidate& cand,
                            const LagrangianSystem& sys,
                            const SmoothMap& force,
                            const std::vector<Eigen::VectorXd>& grid,
                            HJSign sign = HJSign::minus, double tol = 1e-8);

/* Hamiltonian-side twin for one-form candidates sigma: gates on
   sigma(Q) being inside M = FL(N), then tests d(H o sigma) (weak against
   the constraint distribution, strong outright) plus closedness of sigma
   on distribution pairs. Mechanical systems with linear constraints. */
CheckReport check_hamiltonian_hj(const HJCandidate& cand,
                                 const LagrangianSystem& sys,
                                 const ConstraintSet& cs,
                                 const std::vector<Eigen::VectorXd>& grid,
                                 bool strong, double tol = 1e-8);

/* Diagnostic: do the reaction covectors vanish along X? Reports
   max |A(q, X(q))^T lambda(q, X(q))|; expected to fail on genuinely
   constrained motion. */
CheckReport check_no_reaction(const HJCandidate& cand,
                              const LagrangianSystem& sys,
                              const ConstraintSet& cs,
                              const std::vector<Eigen::VectorXd>& grid,
                              double tol = 1e-8);

/* The one-form sigma = FL o X as a candidate for the Hamiltonian checks. */
HJCandidate legendre_compose(const LagrangianSystem& sys,
                             const HJCandidate& cand);

}  // namespace nhmech
