#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nhmech/error.hpp"

namespace nhmech {

/* Default rank cutoff, relative to the largest singular value. */
constexpr double kRankTol = 1e-9;

int numeric_rank(const Eigen::MatrixXd& A, double tol = kRankTol);

/* Orthonormal basis of the column span (left singular vectors kept above
   the relative cutoff). */
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& A,
                                    double tol = kRankTol);

/* Orthonormal basis of the right null space {x : A x = 0}. */
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, double tol = kRankTol);

/* A linear subspace of R^ambient stored as an explicit orthonormal basis. */
struct Subspace {
  int ambient = 0;
  Eigen::MatrixXd basis; /* ambient x rank, orthonormal columns */
  double tol = kRankTol; /* rank tolerance used at construction */

  static Subspace span(const Eigen::MatrixXd& vectors, double tol = kRankTol);
  static Subspace span(const std::vector<Eigen::VectorXd>& vectors,
                       double tol = kRankTol);
  static Subspace zero(int ambient);
  static Subspace full(int ambient);

  int rank() const { return static_cast<int>(basis.cols()); }
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  double distance(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& v, double tol_abs = 1e-10) const;
};

int subspace_rank(const std::vector<Eigen::VectorXd>& vectors,
                  double tol = kRankTol);

/* Covectors vanishing on S, identified with vectors via the dot pairing. */
Subspace annihilator(const Subspace& S);

Subspace intersect(const Subspace& A, const Subspace& B);
Subspace subspace_sum(const Subspace& A, const Subspace& B);
bool same_span(const Subspace& A, const Subspace& B, double tol_abs = 1e-10);

/* {u : omega(u, s) = 0 for all s in S} for an antisymmetric nondegenerate
   omega; throws RegularityError carrying the offending singular value if
   omega is degenerate at the rank tolerance. */
Subspace symplectic_orthogonal(const Eigen::MatrixXd& omega, const Subspace& S);

}  // namespace nhmech
