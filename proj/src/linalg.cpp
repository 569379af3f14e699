#include "nhmech/linalg.hpp"

#include <string>

namespace nhmech {

namespace {

Eigen::MatrixXd stack_columns(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd A(vectors.front().size(), vectors.size());
  for (size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != A.rows())
      throw DimensionError("subspace: vectors have mixed ambient dimensions");
    A.col(static_cast<long>(j)) = vectors[j];
  }
  return A;
}

}  // namespace

int numeric_rank(const Eigen::MatrixXd& A, double tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (long i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& A, double tol) {
  if (A.rows() == 0 || A.cols() == 0) return Eigen::MatrixXd(A.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (long i = 0; i < s.size(); ++i)
      if (s(i) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, double tol) {
  if (A.cols() == 0) return Eigen::MatrixXd(0, 0);
  if (A.rows() == 0)
    return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (long i = 0; i < s.size(); ++i)
      if (s(i) > tol * s(0)) ++r;
  return svd.matrixV().rightCols(A.cols() - r);
}

Subspace Subspace::span(const Eigen::MatrixXd& vectors, double tol) {
  Subspace S;
  S.ambient = static_cast<int>(vectors.rows());
  S.basis = orthonormal_columns(vectors, tol);
  S.tol = tol;
  return S;
}

Subspace Subspace::span(const std::vector<Eigen::VectorXd>& vectors,
                        double tol) {
  return span(stack_columns(vectors), tol);
}

Subspace Subspace::zero(int ambient) {
  Subspace S;
  S.ambient = ambient;
  S.basis = Eigen::MatrixXd(ambient, 0);
  return S;
}

Subspace Subspace::full(int ambient) {
  Subspace S;
  S.ambient = ambient;
  S.basis = Eigen::MatrixXd::Identity(ambient, ambient);
  return S;
}

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& v) const {
  if (v.size() != ambient)
    throw DimensionError("Subspace::project: dimension mismatch");
  if (basis.cols() == 0) return Eigen::VectorXd::Zero(ambient);
  return basis * (basis.transpose() * v);
}

double Subspace::distance(const Eigen::VectorXd& v) const {
  return (v - project(v)).norm();
}

bool Subspace::contains(const Eigen::VectorXd& v, double tol_abs) const {
  return distance(v) <= tol_abs * std::max(1.0, v.norm());
}

int subspace_rank(const std::vector<Eigen::VectorXd>& vectors, double tol) {
  if (vectors.empty()) return 0;
  return numeric_rank(stack_columns(vectors), tol);
}

Subspace annihilator(const Subspace& S) {
  Subspace A;
  A.ambient = S.ambient;
  A.tol = S.tol;
  if (S.rank() == 0) {
    A.basis = Eigen::MatrixXd::Identity(S.ambient, S.ambient);
  } else {
    A.basis = kernel_basis(S.basis.transpose(), S.tol);
  }
  return A;
}

Subspace intersect(const Subspace& A, const Subspace& B) {
  if (A.ambient != B.ambient)
    throw DimensionError("intersect: ambient dimensions differ");
  if (A.rank() == 0 || B.rank() == 0) return Subspace::zero(A.ambient);
  /* x in both spans iff A c = B d for some coefficients; read c off the
     kernel of [A | -B]. */
  Eigen::MatrixXd M(A.ambient, A.rank() + B.rank());
  M.leftCols(A.rank()) = A.basis;
  M.rightCols(B.rank()) = -B.basis;
  Eigen::MatrixXd K = kernel_basis(M, std::min(A.tol, B.tol));
  if (K.cols() == 0) return Subspace::zero(A.ambient);
  Eigen::MatrixXd vecs = A.basis * K.topRows(A.rank());
  return Subspace::span(vecs, std::min(A.tol, B.tol));
}

Subspace subspace_sum(const Subspace& A, const Subspace& B) {
  if (A.ambient != B.ambient)
    throw DimensionError("subspace_sum: ambient dimensions differ");
  Eigen::MatrixXd M(A.ambient, A.rank() + B.rank());
  M.leftCols(A.rank()) = A.basis;
  M.rightCols(B.rank()) = B.basis;
  return Subspace::span(M, std::min(A.tol, B.tol));
}

bool same_span(const Subspace& A, const Subspace& B, double tol_abs) {
  if (A.ambient != B.ambient || A.rank() != B.rank()) return false;
  for (int j = 0; j < A.rank(); ++j)
    if (!B.contains(A.basis.col(j), tol_abs)) return false;
  return true;
}

Subspace symplectic_orthogonal(const Eigen::MatrixXd& omega,
                               const Subspace& S) {
  if (omega.rows() != omega.cols() || omega.rows() != S.ambient)
    throw DimensionError("symplectic_orthogonal: omega/subspace mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= S.tol * s(0))
    throw RegularityError(
        "symplectic_orthogonal: omega degenerate, smallest singular value " +
        std::to_string(s.size() ? s(s.size() - 1) : 0.0));
  if (S.rank() == 0) return Subspace::full(S.ambient);
  /* omega(u, s_j) = s_j^T omega^T u is zero for all j. */
  return Subspace::span(kernel_basis(S.basis.transpose() * omega.transpose(),
                                     S.tol),
                        S.tol);
}

}  // namespace nhmech
