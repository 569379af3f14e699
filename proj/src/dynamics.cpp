#include "nhmech/dynamics.hpp"

#include <ostream>
#include <sstream>

#include "nhmech/report.hpp"

namespace nhmech {

namespace {

/* Shared pieces of one dynamics evaluation at a state. */
struct FieldWork {
  Eigen::MatrixXd W;      /* velocity Hessian */
  Eigen::MatrixXd B;      /* d2L/dv dq */
  Eigen::VectorXd Lq;     /* dL/dq */
  Eigen::MatrixXd A;      /* reaction rows, k x n */
  Eigen::VectorXd psra;   /* -(dpsi/dq) v, the drift term */
};

FieldWork prepare(const LagrangianSystem& sys, const ConstraintSet& cs,
                  const State& s) {
  const int n = sys.n;
  FieldWork w;
  Eigen::MatrixXd H = full_hessian(sys, s);
  w.W = H.block(n, n, n, n);
  w.B = H.block(n, 0, n, n);
  w.Lq = lagrangian_gradient(sys, s).head(n);
  Eigen::MatrixXd J = cs.psi.jacobian(tangent_coords(s));
  w.A = J.rightCols(n);
  w.psra = -J.leftCols(n) * s.v;
  return w;
}

double motion_residual(const LagrangianSystem& sys, const ConstraintSet& cs,
                       const State& s, const Eigen::VectorXd& accel,
                       const Eigen::VectorXd& lambda) {
  /* d/dt dL/dv - dL/dq - lambda^T dpsi/dv, evaluated in coordinates. */
  const int n = sys.n;
  Eigen::MatrixXd H = full_hessian(sys, s);
  Eigen::VectorXd el = H.block(n, n, n, n) * accel +
                       H.block(n, 0, n, n) * s.v -
                       lagrangian_gradient(sys, s).head(n);
  if (cs.k > 0) el -= reaction_matrix(cs, s).transpose() * lambda;
  return el.lpNorm<Eigen::Infinity>();
}

void require_on_manifold(const ConstraintSet& cs, const State& s,
                         double on_tol, const char* who) {
  if (cs.k == 0) return;
  double res = constraint_residual(cs, s).lpNorm<Eigen::Infinity>();
  if (res > on_tol)
    throw DomainError(std::string(who) +
                      ": state off the constraint manifold (|psi| = " +
                      format_double(res) + ")");
}

}  // namespace

ConstrainedField constrained_field(const LagrangianSystem& sys,
                                   const ConstraintSet& cs, const State& s,
                                   double on_tol) {
  require_on_manifold(cs, s, on_tol, "constrained_field");
  FieldWork w = prepare(sys, cs, s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.W);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12)
    throw RegularityError("constrained_field: singular velocity Hessian");
  Eigen::PartialPivLU<Eigen::MatrixXd> Wlu(w.W);
  Eigen::VectorXd rhs = w.Lq - w.B * s.v;
  ConstrainedField out;
  if (cs.k == 0) {
    out.accel = Wlu.solve(rhs);
    out.multipliers = Eigen::VectorXd(0);
  } else {
    /* (A W^-1 A^T) lambda = -dpsi_q v - A W^-1 rhs; the matrix is -C. */
    Eigen::MatrixXd AWA = w.A * Wlu.solve(w.A.transpose());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(AWA);
    if (!lu.isInvertible())
      throw CompatibilityError(
          "constrained_field: multiplier system singular (compatibility "
          "condition fails)");
    Eigen::VectorXd lambda = lu.solve(w.psra - w.A * Wlu.solve(rhs));
    out.accel = Wlu.solve(rhs + w.A.transpose() * lambda);
    out.multipliers = lambda;
  }
  out.residual_norm = motion_residual(sys, cs, s, out.accel, out.multipliers);
  return out;
}

ConstrainedField projector_field(const LagrangianSystem& sys,
                                 const ConstraintSet& cs, const State& s,
                                 double on_tol) {
  require_on_manifold(cs, s, on_tol, "projector_field");
  const int n = sys.n;
  Eigen::VectorXd gamma = unconstrained_field(sys, s);
  ConstrainedField out;
  if (cs.k == 0) {
    out.accel = gamma.tail(n);
    out.multipliers = Eigen::VectorXd(0);
    out.residual_norm = 0.0;
    return out;
  }
  Subspace TN = tangent_N(cs, s);
  Subspace FL = f_distribution(cs, s);
  Eigen::MatrixXd Om = lagrangian_two_form(sys, s);
  Subspace Fperp = symplectic_orthogonal(Om, FL);
  if (TN.rank() + Fperp.rank() != 2 * n)
    throw CompatibilityError("projector_field: TN and F_L-perp do not split "
                             "the tangent space");
  /* gamma = t + f with t in TN, f in F_L-perp; P(gamma) = t. */
  Eigen::MatrixXd M(2 * n, 2 * n);
  M.leftCols(TN.rank()) = TN.basis;
  M.rightCols(Fperp.rank()) = Fperp.basis;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw CompatibilityError(
        "projector_field: direct-sum decomposition is numerically singular");
  Eigen::VectorXd coeff = lu.solve(gamma);
  Eigen::VectorXd proj = TN.basis * coeff.head(TN.rank());
  out.accel = proj.tail(n);
  /* Recover multipliers from the reaction force the projection implies. */
  Eigen::MatrixXd A = reaction_matrix(cs, s);
  Eigen::MatrixXd W = velocity_hessian(sys, s);
  Eigen::VectorXd force = W * (out.accel - gamma.tail(n));
  out.multipliers =
      A.transpose().colPivHouseholderQr().solve(force);
  out.residual_norm = motion_residual(sys, cs, s, out.accel, out.multipliers);
  return out;
}

namespace {

/* Minimal correction of v onto psi(q, .) = 0 in the W-metric: iterate
   v <- v - W^-1 A^T (A W^-1 A^T)^-1 psi. One pass is exact for linear
   constraints; nonlinear ones get a short Newton loop. */
void project_velocity_inplace(const LagrangianSystem& sys,
                              const ConstraintSet& cs, State& s, long step) {
  if (cs.k == 0) return;
  for (int it = 0; it < 5; ++it) {
    Eigen::VectorXd res = constraint_residual(cs, s);
    if (res.lpNorm<Eigen::Infinity>() < 1e-13) return;
    Eigen::MatrixXd A = reaction_matrix(cs, s);
    Eigen::MatrixXd W = velocity_hessian(sys, s);
    Eigen::PartialPivLU<Eigen::MatrixXd> Wlu(W);
    Eigen::MatrixXd AWA = A * Wlu.solve(A.transpose());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(AWA);
    if (!lu.isInvertible())
      throw NumericalError("velocity projection: singular correction system",
                           step);
    s.v -= Wlu.solve(A.transpose() * lu.solve(res));
  }
}

}  // namespace

State project_velocity(const LagrangianSystem& sys, const ConstraintSet& cs,
                       const State& s) {
  State out = s;
  project_velocity_inplace(sys, cs, out, -1);
  const Eigen::VectorXd res = constraint_residual(cs, out);
  if (res.size() && res.lpNorm<Eigen::Infinity>() > 1e-10)
    throw NumericalError("velocity projection did not converge", -1);
  return out;
}

Trajectory integrate(const LagrangianSystem& sys, const ConstraintSet& cs,
                     const State& s0, double dt, long steps, bool stabilize) {
  require_on_manifold(cs, s0, 1e-8, "integrate");
  const int n = sys.n;
  Trajectory traj;
  auto record = [&](double t, const State& s) {
    ConstrainedField f = constrained_field(sys, cs, s, 1e-6);
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.multipliers.push_back(f.multipliers);
    traj.energies.push_back(energy(sys, s));
    traj.psi_max.push_back(
        cs.k ? constraint_residual(cs, s).lpNorm<Eigen::Infinity>() : 0.0);
    return f;
  };
  State s = s0;
  record(0.0, s);
  auto deriv = [&](const State& st, long step) -> Eigen::VectorXd {
    try {
      ConstrainedField f = constrained_field(sys, cs, st, 1e-3);
      Eigen::VectorXd d(2 * n);
      d << st.v, f.accel;
      return d;
    } catch (const Error& e) {
      throw NumericalError(std::string("integrate: ") + e.what(), step);
    }
  };
  for (long i = 0; i < steps; ++i) {
    Eigen::VectorXd y(2 * n);
    y << s.q, s.v;
    auto unpack = [n](const Eigen::VectorXd& z) {
      return State{z.head(n), z.tail(n)};
    };
    Eigen::VectorXd k1 = deriv(s, i);
    Eigen::VectorXd k2 = deriv(unpack(y + 0.5 * dt * k1), i);
    Eigen::VectorXd k3 = deriv(unpack(y + 0.5 * dt * k2), i);
    Eigen::VectorXd k4 = deriv(unpack(y + dt * k3), i);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s = unpack(y);
    if (stabilize) project_velocity_inplace(sys, cs, s, i);
    record(dt * static_cast<double>(i + 1), s);
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, int n, int k,
                          std::ostream& out) {
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",q" << i;
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  for (int a = 1; a <= k; ++a) out << ",lam" << a;
  out << ",energy,psi_max\n";
  for (size_t r = 0; r < traj.times.size(); ++r) {
    out << format_double(traj.times[r]);
    for (int i = 0; i < n; ++i) out << "," << format_double(traj.states[r].q(i));
    for (int i = 0; i < n; ++i) out << "," << format_double(traj.states[r].v(i));
    for (int a = 0; a < k; ++a)
      out << "," << format_double(traj.multipliers[r](a));
    out << "," << format_double(traj.energies[r]) << ","
        << format_double(traj.psi_max[r]) << "\n";
  }
}

std::string trajectory_csv(const Trajectory& traj, int n, int k) {
  std::ostringstream os;
  write_trajectory_csv(traj, n, k, os);
  return os.str();
}

CheckReport verify_motion_equation(const LagrangianSystem& sys,
                                   const ConstraintSet& cs, const State& s,
                                   double tol) {
  CheckReport rep;
  rep.name = "motion_equation";
  rep.points_tested = 1;
  rep.tolerance = tol;
  rep.grid_spec = "single state";
  ConstrainedField f = constrained_field(sys, cs, s);
  const int n = sys.n;
  Eigen::VectorXd gamma(2 * n);
  gamma << s.v, f.accel;
  /* One-form i_Gamma omega_L - dE_L paired against a basis of F_L. */
  Eigen::MatrixXd Om = lagrangian_two_form(sys, s);
  Eigen::VectorXd oneform = Om.transpose() * gamma - denergy(sys, s);
  Subspace FL = f_distribution(cs, s);
  double worst = 0.0;
  for (int j = 0; j < FL.rank(); ++j)
    worst = std::max(worst, std::abs(oneform.dot(FL.basis.col(j))));
  /* SODE property is built into the (v, a) layout; report the constraint
     drift d/dt psi as the second component. */
  Eigen::MatrixXd J = cs.psi.jacobian(tangent_coords(s));
  if (cs.k > 0) {
    Eigen::VectorXd drift = J.leftCols(n) * s.v + J.rightCols(n) * f.accel;
    rep.extra["constraint_drift"] = drift.lpNorm<Eigen::Infinity>();
    worst = std::max(worst, drift.lpNorm<Eigen::Infinity>());
  }
  rep.extra["f_l_dimension"] = FL.rank();
  rep.max_residual = worst;
  return rep.finalize();
}

HamiltonianField hamiltonian_field(const LagrangianSystem& sys,
                                   const ConstraintSet& cs,
                                   const PhasePoint& ph) {
  if (!sys.mechanical)
    throw UnsupportedError(
        "hamiltonian_field: Hamiltonian side requires mechanical data");
  if (cs.k > 0 && (!cs.linear || !cs.coeff))
    throw UnsupportedError(
        "hamiltonian_field: Hamiltonian side supports linear constraints only");
  const int n = sys.n;
  SmoothMap H = hamiltonian_map(sys);
  Eigen::VectorXd x(2 * n);
  x << ph.q, ph.p;
  Eigen::VectorXd dH = to_eigen(grad<double>(H, from_eigen(x)));
  Eigen::VectorXd Hq = dH.head(n);
  Eigen::VectorXd Hp = dH.tail(n);
  HamiltonianField out;
  out.qdot = Hp;
  if (cs.k == 0) {
    out.pdot = -Hq;
    out.multipliers = Eigen::VectorXd(0);
    return out;
  }
  /* Psi^a(q, p) = psi^a_i(q) dH/dp_i; require d/dt Psi = 0. The evaluator
     consumes one AD level for dH/dp, so it is wired up to level 3 only. */
  const SmoothMap coeff = *cs.coeff;
  auto psi_eval = [H, coeff, n, k = cs.k](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    DVec<T> q(z.begin(), z.begin() + n);
    DVec<T> dHp = grad_slice(H, z, n, n);
    DVec<T> c = coeff.eval(q);
    DVec<T> out_(k);
    for (int a = 0; a < k; ++a) {
      T acc = T(0);
      for (int i = 0; i < n; ++i) acc += c[a * n + i] * dHp[i];
      out_[a] = acc;
    }
    return out_;
  };
  SmoothMap Psi = SmoothMap::from_levels(
      2 * n, cs.k,
      [psi_eval](const DVec<double>& z) { return psi_eval(z); },
      [psi_eval](const DVec<D1>& z) { return psi_eval(z); },
      [psi_eval](const DVec<D2>& z) { return psi_eval(z); },
      [psi_eval](const DVec<D3>& z) { return psi_eval(z); });
  Eigen::MatrixXd JPsi = Psi.jacobian(x);
  Eigen::MatrixXd Pq = JPsi.leftCols(n);
  Eigen::MatrixXd Pp = JPsi.rightCols(n);
  Eigen::MatrixXd Acoef(cs.k, n);
  Eigen::VectorXd cf = (*cs.coeff)(ph.q);
  for (int a = 0; a < cs.k; ++a)
    for (int i = 0; i < n; ++i) Acoef(a, i) = cf(a * n + i);
  /* Pq qdot + Pp (-Hq + A^T beta) = 0. */
  Eigen::MatrixXd Mb = Pp * Acoef.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Mb);
  if (!lu.isInvertible())
    throw CompatibilityError(
        "hamiltonian_field: multiplier system singular");
  Eigen::VectorXd beta = lu.solve(Pp * Hq - Pq * out.qdot);
  out.pdot = -Hq + Acoef.transpose() * beta;
  out.multipliers = beta;
  return out;
}

}  // namespace nhmech
