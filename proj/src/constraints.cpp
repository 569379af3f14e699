#include "nhmech/constraints.hpp"

namespace nhmech {

Eigen::VectorXd constraint_residual(const ConstraintSet& cs, const State& s) {
  return cs.psi(tangent_coords(s));
}

bool on_constraint_manifold(const ConstraintSet& cs, const State& s,
                            double tol) {
  if (cs.k == 0) return true;
  return constraint_residual(cs, s).lpNorm<Eigen::Infinity>() <= tol;
}

Eigen::MatrixXd reaction_matrix(const ConstraintSet& cs, const State& s) {
  const int n = static_cast<int>(s.q.size());
  return cs.psi.jacobian(tangent_coords(s)).rightCols(n);
}

std::vector<Eigen::VectorXd> reaction_basis(const ConstraintSet& cs,
                                            const State& s) {
  Eigen::MatrixXd A = reaction_matrix(cs, s);
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(cs.k);
  for (int a = 0; a < cs.k; ++a) rows.push_back(A.row(a).transpose());
  return rows;
}

Subspace constraint_distribution(const ConstraintSet& cs, const State& s) {
  const int n = static_cast<int>(s.q.size());
  if (cs.k == 0) return Subspace::full(n);
  return Subspace::span(kernel_basis(reaction_matrix(cs, s)));
}

Eigen::MatrixXd compatibility_matrix(const LagrangianSystem& sys,
                                     const ConstraintSet& cs, const State& s) {
  if (cs.k == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd W = velocity_hessian(sys, s);
  Eigen::MatrixXd A = reaction_matrix(cs, s);
  return -A * W.partialPivLu().solve(A.transpose());
}

CheckReport check_admissibility(const ConstraintSet& cs, const State& s,
                                double tol) {
  CheckReport rep;
  rep.name = "admissibility";
  rep.points_tested = 1;
  rep.tolerance = tol;
  rep.grid_spec = "single state";
  Eigen::VectorXd res = constraint_residual(cs, s);
  double off = cs.k ? res.lpNorm<Eigen::Infinity>() : 0.0;
  if (off > tol) {
    rep.max_residual = off;
    rep.extra["rejected"] = "state off the constraint manifold";
    return rep.finalize();
  }
  Eigen::MatrixXd A = reaction_matrix(cs, s);
  int r = numeric_rank(A);
  rep.extra["rank"] = r;
  rep.extra["k"] = cs.k;
  if (cs.k > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    rep.extra["singular_value_ratio"] =
        sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  }
  rep.max_residual = static_cast<double>(cs.k - r);
  return rep.finalize();
}

CheckReport check_ideal(const ConstraintSet& cs,
                        const std::vector<State>& samples, double tol) {
  CheckReport rep;
  rep.name = "ideality";
  rep.points_tested = static_cast<int>(samples.size());
  rep.tolerance = tol;
  rep.grid_spec = std::to_string(samples.size()) + " user samples";
  double worst = 0.0;
  for (const auto& s : samples) {
    Eigen::MatrixXd A = reaction_matrix(cs, s);
    Eigen::VectorXd delta = A * s.v; /* Liouville derivative of each psi^a */
    worst = std::max(worst, delta.lpNorm<Eigen::Infinity>());
  }
  rep.max_residual = worst;
  return rep.finalize();
}

ChowFlag chow_flag(const std::vector<SmoothMap>& generators,
                   const Eigen::VectorXd& q, int max_depth, double tol) {
  ChowFlag flag;
  const int n = static_cast<int>(q.size());
  std::vector<Eigen::VectorXd> values;
  for (const auto& g : generators) values.push_back(g(q));
  int r = subspace_rank(values, tol);
  flag.growth.push_back(r);
  flag.depth_used = 1;
  if (generators.empty() || r == n || max_depth <= 1) {
    flag.complete = (r == n);
    return flag;
  }
  std::vector<SmoothMap> previous(generators.begin(), generators.end());
  for (int depth = 2; depth <= max_depth; ++depth) {
    std::vector<SmoothMap> fresh;
    for (const auto& f : previous)
      for (const auto& g : generators) {
        SmoothMap b = bracket_field(f, g);
        values.push_back(b(q));
        fresh.push_back(std::move(b));
      }
    int rn = subspace_rank(values, tol);
    flag.growth.push_back(rn);
    flag.depth_used = depth;
    if (rn == n || rn == r) break;
    r = rn;
    previous = std::move(fresh);
  }
  flag.complete = (flag.growth.back() == n);
  return flag;
}

Subspace tangent_N(const ConstraintSet& cs, const State& s) {
  const int n = static_cast<int>(s.q.size());
  if (cs.k == 0) return Subspace::full(2 * n);
  return Subspace::span(kernel_basis(cs.psi.jacobian(tangent_coords(s))));
}

Subspace f_distribution(const ConstraintSet& cs, const State& s) {
  const int n = static_cast<int>(s.q.size());
  if (cs.k == 0) return Subspace::full(2 * n);
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(cs.k, 2 * n);
  lifted.leftCols(n) = reaction_matrix(cs, s);
  return Subspace::span(kernel_basis(lifted));
}

Subspace h_distribution(const LagrangianSystem& sys, const ConstraintSet& cs,
                        const State& s, double* omega_min_sv) {
  Eigen::MatrixXd C = compatibility_matrix(sys, cs, s);
  if (cs.k > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    if (!lu.isInvertible())
      throw CompatibilityError(
          "h_distribution: compatibility matrix singular at this state");
  }
  Subspace H = intersect(tangent_N(cs, s), f_distribution(cs, s));
  if (omega_min_sv) {
    Eigen::MatrixXd Om = lagrangian_two_form(sys, s);
    Eigen::MatrixXd G = H.basis.transpose() * Om * H.basis;
    if (G.rows() == 0) {
      *omega_min_sv = 0.0;
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
      const auto& sv = svd.singularValues();
      *omega_min_sv = sv(sv.size() - 1);
    }
  }
  return H;
}

}  // namespace nhmech
