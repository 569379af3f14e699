#include "nhmech/hamjac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nhmech/error.hpp"

namespace nhmech {

namespace {

const int kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(int base, long index) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::string default_grid_label(std::size_t count) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "points=%zu", count);
  return buf;
}

/* E_L at a tangent point, generic over the AD level. Costs one level for
   the fiber gradient. */
template <typename T>
T energy_eval(const SmoothMap& L, const DVec<T>& z, int n) {
  DVec<T> p = grad_slice(L, z, n, n);
  T e = -L.eval(z)[0];
  for (int i = 0; i < n; ++i) e += p[i] * z[n + i];
  return e;
}

/* Gradient over q of g(q) = E_L(q, X(q)). */
Eigen::VectorXd denergy_along(const SmoothMap& L, const SmoothMap& X,
                              const Eigen::VectorXd& q, double* value) {
  const int n = static_cast<int>(q.size());
  Eigen::VectorXd dg(n);
  for (int j = 0; j < n; ++j) {
    DVec<D1> qd(n);
    for (int i = 0; i < n; ++i) qd[i] = D1(q[i], i == j ? 1.0 : 0.0);
    DVec<D1> v = X.eval(qd);
    DVec<D1> z(2 * n);
    for (int i = 0; i < n; ++i) {
      z[i] = qd[i];
      z[n + i] = v[i];
    }
    D1 e = energy_eval(L, z, n);
    dg[j] = e.b;
    if (j == 0 && value) *value = e.a;
  }
  return dg;
}

/* sigma = FL o X as a smooth map on Q (three derivative levels; one is
   consumed by the fiber gradient inside). */
SmoothMap compose_momentum(const LagrangianSystem& sys, const SmoothMap& X) {
  const int n = sys.n;
  const SmoothMap L = sys.L;
  auto ev = [L, X, n](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    DVec<T> v = X.eval(q);
    DVec<T> z(2 * n);
    for (int i = 0; i < n; ++i) {
      z[i] = q[i];
      z[n + i] = v[i];
    }
    return grad_slice(L, z, n, n);
  };
  return SmoothMap::from_levels(
      n, n, [ev](const DVec<double>& q) { return ev(q); },
      [ev](const DVec<D1>& q) { return ev(q); },
      [ev](const DVec<D2>& q) { return ev(q); },
      [ev](const DVec<D3>& q) { return ev(q); });
}

/* max over basis pairs of |u^T (J^T - J) w|: the exterior derivative of the
   one-form with jacobian J, evaluated on the subspace. */
double skew_pair_residual(const Eigen::MatrixXd& J, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd K = J.transpose() - J;
  double worst = 0.0;
  for (int a = 0; a < B.cols(); ++a)
    for (int b = a + 1; b < B.cols(); ++b)
      worst = std::max(worst, std::abs(B.col(a).dot(K * B.col(b))));
  return worst;
}

void require_vector_field(const HJCandidate& cand, const char* op) {
  if (cand.kind != HJCandidate::Kind::vector_field)
    throw DomainError(std::string(op) + ": candidate must be a vector field");
}

}  // namespace

std::string GridSpec::describe() const {
  std::string s = "halton count=" + std::to_string(count) +
                  " seed=" + std::to_string(seed) + " box=";
  for (int d = 0; d < lo.size(); ++d) {
    if (d) s += "x";
    s += "[" + format_double(lo[d]) + "," + format_double(hi[d]) + "]";
  }
  return s;
}

std::vector<Eigen::VectorXd> halton_grid(const GridSpec& grid) {
  const int dim = static_cast<int>(grid.lo.size());
  if (dim != grid.hi.size())
    throw DimensionError("halton_grid: box bounds disagree");
  if (dim > static_cast<int>(sizeof(kHaltonPrimes) / sizeof(int)))
    throw DimensionError("halton_grid: dimension too large");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    const long index = static_cast<long>(grid.seed) + 1 + i;
    Eigen::VectorXd p(dim);
    for (int d = 0; d < dim; ++d) {
      const double u = radical_inverse(kHaltonPrimes[d], index);
      p[d] = grid.lo[d] + u * (grid.hi[d] - grid.lo[d]);
    }
    pts.push_back(p);
  }
  return pts;
}

std::vector<Eigen::VectorXd> product_grid(const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi,
                                          const std::vector<int>& counts) {
  const int dim = static_cast<int>(lo.size());
  if (dim != hi.size() || dim != static_cast<int>(counts.size()))
    throw DimensionError("product_grid: dimension mismatch");
  long total = 1;
  for (int c : counts) {
    if (c < 1) throw DomainError("product_grid: counts must be positive");
    total *= c;
  }
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(total);
  std::vector<int> idx(dim, 0);
  for (long t = 0; t < total; ++t) {
    Eigen::VectorXd p(dim);
    for (int d = 0; d < dim; ++d) {
      p[d] = counts[d] == 1
                 ? lo[d]
                 : lo[d] + (hi[d] - lo[d]) * idx[d] / (counts[d] - 1);
    }
    pts.push_back(p);
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
    }
  }
  return pts;
}

CheckReport check_in_N(const HJCandidate& cand, const ConstraintSet& cs,
                       const std::vector<Eigen::VectorXd>& grid, double tol) {
  require_vector_field(cand, "check_in_N");
  CheckReport rep;
  rep.name = "in_N";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const Eigen::VectorXd r = constraint_residual(cs, {q, v});
    rep.max_residual =
        std::max(rep.max_residual, r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  return rep.finalize();
}

CheckReport check_closedness_linear(const HJCandidate& cand,
                                    const LagrangianSystem& sys,
                                    const ConstraintSet& cs,
                                    const std::vector<Eigen::VectorXd>& grid,
                                    double tol) {
  require_vector_field(cand, "check_closedness_linear");
  if (!cs.linear)
    throw UnsupportedError(
        "check_closedness_linear: needs linear constraints; use "
        "check_nonlinear_pullback");
  CheckReport rep;
  rep.name = "closedness_linear";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  const SmoothMap sigma = compose_momentum(sys, cand.map);
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const Subspace D = constraint_distribution(cs, {q, v});
    const Eigen::MatrixXd J = sigma.jacobian(q);
    rep.max_residual = std::max(rep.max_residual, skew_pair_residual(J, D.basis));
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  return rep.finalize();
}

CheckReport check_nonlinear_pullback(const HJCandidate& cand,
                                     const LagrangianSystem& sys,
                                     const ConstraintSet& cs,
                                     const std::vector<Eigen::VectorXd>& grid,
                                     double tol) {
  require_vector_field(cand, "check_nonlinear_pullback");
  CheckReport rep;
  rep.name = "nonlinear_pullback";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  const int n = sys.n;
  bool vacuous = true;
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const State s{q, v};
    const Eigen::MatrixXd A = reaction_matrix(cs, s);
    const Eigen::MatrixXd Dhat = kernel_basis(A);
    ++rep.points_tested;
    if (Dhat.cols() == 0) continue;
    vacuous = false;
    const Eigen::MatrixXd DX = cand.map.jacobian(q);
    const Eigen::MatrixXd Om = lagrangian_two_form(sys, s);
    for (int a = 0; a < Dhat.cols(); ++a) {
      Eigen::VectorXd ua(2 * n);
      ua << Dhat.col(a), DX * Dhat.col(a);
      for (int b = a + 1; b < Dhat.cols(); ++b) {
        Eigen::VectorXd wb(2 * n);
        wb << Dhat.col(b), DX * Dhat.col(b);
        rep.max_residual =
            std::max(rep.max_residual, std::abs(ua.dot(Om * wb)));
      }
    }
  }
  rep.extra["candidate"] = cand.label;
  rep.extra["vacuous"] = vacuous;
  return rep.finalize();
}

CheckReport check_hj_condition(const HJCandidate& cand,
                               const LagrangianSystem& sys,
                               const ConstraintSet& cs,
                               const std::vector<Eigen::VectorXd>& grid,
                               bool strong, double tol) {
  require_vector_field(cand, "check_hj_condition");
  CheckReport rep;
  rep.name = strong ? "hj_strong" : "hj_weak";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  double emin = 0.0, emax = 0.0;
  for (const auto& q : grid) {
    double eval = 0.0;
    const Eigen::VectorXd dg = denergy_along(sys.L, cand.map, q, &eval);
    if (rep.points_tested == 0) {
      emin = emax = eval;
    } else {
      emin = std::min(emin, eval);
      emax = std::max(emax, eval);
    }
    double r;
    if (strong) {
      r = dg.cwiseAbs().maxCoeff();
    } else {
      const Eigen::VectorXd v = cand.map(q);
      const Subspace D = constraint_distribution(cs, {q, v});
      r = 0.0;
      for (int a = 0; a < D.basis.cols(); ++a)
        r = std::max(r, std::abs(dg.dot(D.basis.col(a))));
    }
    rep.max_residual = std::max(rep.max_residual, r);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  rep.extra["energy_min"] = emin;
  rep.extra["energy_max"] = emax;
  return rep.finalize();
}

CheckReport check_related(const HJCandidate& cand, const LagrangianSystem& sys,
                          const ConstraintSet& cs,
                          const std::vector<Eigen::VectorXd>& grid,
                          double tol) {
  require_vector_field(cand, "check_related");
  CheckReport rep;
  rep.name = "related";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const ConstrainedField cf = constrained_field(sys, cs, {q, v});
    const Eigen::MatrixXd DX = cand.map.jacobian(q);
    const double r = (DX * v - cf.accel).cwiseAbs().maxCoeff();
    rep.max_residual = std::max(rep.max_residual, r);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  return rep.finalize();
}

CheckReport check_forced_hj(const HJCandidate& cand,
                            const LagrangianSystem& sys,
                            const SmoothMap& force,
                            const std::vector<Eigen::VectorXd>& grid,
                            HJSign sign, double tol) {
  require_vector_field(cand, "check_forced_hj");
  if (force.arity() != 2 * sys.n || force.coarity() != sys.n)
    throw DimensionError("check_forced_hj: force must map TQ to n covector "
                         "components");
  CheckReport rep;
  rep.name = "forced_hj";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  const double s = sign == HJSign::plus ? 1.0 : -1.0;
  const int n = sys.n;
  for (const auto& q : grid) {
    const Eigen::VectorXd dg = denergy_along(sys.L, cand.map, q, nullptr);
    const Eigen::VectorXd v = cand.map(q);
    Eigen::VectorXd z(2 * n);
    z << q, v;
    const Eigen::VectorXd alpha = force(z);
    const double r = (dg - s * alpha).cwiseAbs().maxCoeff();
    rep.max_residual = std::max(rep.max_residual, r);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  rep.extra["sign"] = to_string(sign);
  return rep.finalize();
}

CheckReport check_hamiltonian_hj(const HJCandidate& cand,
                                 const LagrangianSystem& sys,
                                 const ConstraintSet& cs,
                                 const std::vector<Eigen::VectorXd>& grid,
                                 bool strong, double tol) {
  if (cand.kind != HJCandidate::Kind::one_form)
    throw DomainError("check_hamiltonian_hj: candidate must be a one-form");
  if (!sys.mechanical)
    throw UnsupportedError(
        "check_hamiltonian_hj: Hamiltonian side needs mechanical structure");
  if (cs.k > 0 && !cs.linear)
    throw UnsupportedError(
        "check_hamiltonian_hj: Hamiltonian side covers linear constraints");
  CheckReport rep;
  rep.name = strong ? "hamiltonian_hj_strong" : "hamiltonian_hj_weak";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  const int n = sys.n;
  const SmoothMap H = hamiltonian_map(sys);
  const SmoothMap sigma = cand.map;

  /* Gate: sigma must land in M = FL(N), tested through
     Psi^a = psi^a_i dH/dp_i. */
  double gate = 0.0;
  for (const auto& q : grid) {
    const Eigen::VectorXd p = sigma(q);
    if (cs.k == 0) continue;
    DVec<double> z(2 * n);
    for (int i = 0; i < n; ++i) {
      z[i] = q[i];
      z[n + i] = p[i];
    }
    const DVec<double> dHp = grad_slice(H, z, n, n);
    const Eigen::VectorXd c = (*cs.coeff)(q);
    for (int a = 0; a < cs.k; ++a) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += c[a * n + i] * dHp[i];
      gate = std::max(gate, std::abs(acc));
    }
  }
  rep.extra["candidate"] = cand.label;
  rep.extra["in_M_residual"] = gate;
  if (gate > tol) {
    rep.max_residual = gate;
    rep.points_tested = static_cast<int>(grid.size());
    rep.extra["gate"] = "in_M";
    return rep.finalize();
  }

  double denergy_part = 0.0, closed_part = 0.0;
  for (const auto& q : grid) {
    /* dh for h(q) = H(q, sigma(q)). */
    Eigen::VectorXd dh(n);
    for (int j = 0; j < n; ++j) {
      DVec<D1> qd(n);
      for (int i = 0; i < n; ++i) qd[i] = D1(q[i], i == j ? 1.0 : 0.0);
      DVec<D1> pd = sigma.eval(qd);
      DVec<D1> zd(2 * n);
      for (int i = 0; i < n; ++i) {
        zd[i] = qd[i];
        zd[n + i] = pd[i];
      }
      dh[j] = H.eval(zd)[0].b;
    }
    const Subspace D =
        constraint_distribution(cs, {q, Eigen::VectorXd::Zero(n)});
    double r;
    if (strong) {
      r = dh.cwiseAbs().maxCoeff();
    } else {
      r = 0.0;
      for (int a = 0; a < D.basis.cols(); ++a)
        r = std::max(r, std::abs(dh.dot(D.basis.col(a))));
    }
    denergy_part = std::max(denergy_part, r);
    const Eigen::MatrixXd J = sigma.jacobian(q);
    closed_part = std::max(closed_part, skew_pair_residual(J, D.basis));
    ++rep.points_tested;
  }
  rep.extra["denergy_residual"] = denergy_part;
  rep.extra["closedness_residual"] = closed_part;
  rep.max_residual = std::max(denergy_part, closed_part);
  return rep.finalize();
}

CheckReport check_no_reaction(const HJCandidate& cand,
                              const LagrangianSystem& sys,
                              const ConstraintSet& cs,
                              const std::vector<Eigen::VectorXd>& grid,
                              double tol) {
  require_vector_field(cand, "check_no_reaction");
  CheckReport rep;
  rep.name = "no_reaction";
  rep.tolerance = tol;
  rep.grid_spec = default_grid_label(grid.size());
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const State s{q, v};
    const ConstrainedField cf = constrained_field(sys, cs, s);
    const Eigen::MatrixXd A = reaction_matrix(cs, s);
    const double r = cs.k == 0
                         ? 0.0
                         : (A.transpose() * cf.multipliers)
                               .cwiseAbs()
                               .maxCoeff();
    rep.max_residual = std::max(rep.max_residual, r);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  return rep.finalize();
}

HJCandidate legendre_compose(const LagrangianSystem& sys,
                             const HJCandidate& cand) {
  if (cand.kind != HJCandidate::Kind::vector_field)
    throw DomainError("legendre_compose: candidate must be a vector field");
  HJCandidate out;
  out.kind = HJCandidate::Kind::one_form;
  out.map = compose_momentum(sys, cand.map);
  out.label = "FL." + cand.label;
  return out;
}

}  // namespace nhmech
