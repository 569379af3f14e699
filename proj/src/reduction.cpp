#include "nhmech/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "nhmech/error.hpp"

namespace nhmech {

namespace {

std::string grid_label(std::size_t count) {
  return "points=" + std::to_string(count);
}

/* Tangent (complete) lift of a generator at s: (xi(q), Dxi(q) v). */
Eigen::VectorXd complete_lift(const SmoothMap& gen, const State& s) {
  const int n = static_cast<int>(s.q.size());
  Eigen::VectorXd out(2 * n);
  out.head(n) = gen(s.q);
  out.tail(n) = gen.jacobian(s.q) * s.v;
  return out;
}

/* Derivative of a function on TQ along the complete lift of gen. */
double complete_lift_derivative(const SmoothMap& f, const SmoothMap& gen,
                                const State& s, int component) {
  const int n = static_cast<int>(s.q.size());
  const Eigen::VectorXd lift = complete_lift(gen, s);
  DVec<D1> z(2 * n);
  const Eigen::VectorXd x = tangent_coords(s);
  for (int i = 0; i < 2 * n; ++i) z[i] = D1(x[i], lift[i]);
  return f.eval(z)[component].b;
}

/* xi_Q(q) = sum_j c_j(q) gen_j(q) as a smooth map; section must expose the
   same derivative depth as the generators. */
SmoothMap combination_field(const std::vector<SmoothMap>& generators,
                            const SmoothMap& section, int n, int dim_g) {
  auto ev = [generators, section, n, dim_g](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    DVec<T> c = section.eval(q);
    DVec<T> out(n, T(0));
    for (int j = 0; j < dim_g; ++j) {
      DVec<T> g = generators[j].eval(q);
      for (int i = 0; i < n; ++i) out[i] += c[j] * g[i];
    }
    return out;
  };
  return SmoothMap::make(n, n, ev);
}

/* Columns of the fiberwise-linear horizontal lift at q. */
template <typename T>
std::vector<DVec<T>> hlift_columns(const SmoothMap& hlift, const DVec<T>& q,
                                   int n, int nbar) {
  std::vector<DVec<T>> cols(nbar);
  DVec<T> z(n + nbar);
  for (int i = 0; i < n; ++i) z[i] = q[i];
  for (int b = 0; b < nbar; ++b) {
    for (int j = 0; j < nbar; ++j) z[n + j] = T(j == b ? 1.0 : 0.0);
    cols[b] = hlift.eval(z);
  }
  return cols;
}

Eigen::MatrixXd hlift_matrix(const SmoothMap& hlift, const Eigen::VectorXd& q,
                             int nbar) {
  const int n = static_cast<int>(q.size());
  const auto cols = hlift_columns(hlift, from_eigen(q), n, nbar);
  Eigen::MatrixXd Lam(n, nbar);
  for (int b = 0; b < nbar; ++b) Lam.col(b) = to_eigen(cols[b]);
  return Lam;
}

const GroupActionSpec::Quotient& require_quotient(const GroupActionSpec& a,
                                                  const char* op) {
  if (!a.quotient)
    throw ConfigError(std::string(op) + ": action carries no quotient data");
  return *a.quotient;
}

}  // namespace

SmoothMap constant_coefficients(const Eigen::VectorXd& coeffs, int arity) {
  const DVec<double> c = from_eigen(coeffs);
  const int dim = static_cast<int>(c.size());
  return SmoothMap::make(arity, dim, [c, dim](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    DVec<T> out(dim);
    for (int j = 0; j < dim; ++j) out[j] = T(c[j]);
    return out;
  });
}

CheckReport check_quotient_data(const ConstraintSet& cs,
                                const GroupActionSpec& action,
                                const std::vector<Eigen::VectorXd>& qbar_grid,
                                double tol) {
  const auto& quot = require_quotient(action, "check_quotient_data");
  CheckReport rep;
  rep.name = "quotient_data";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(qbar_grid.size());
  const int nbar = quot.dim_qbar;
  double sect_res = 0.0, lift_res = 0.0, proj_res = 0.0;
  for (const auto& qbar : qbar_grid) {
    const Eigen::VectorXd q = quot.section(qbar);
    sect_res = std::max(sect_res,
                        (quot.project(q) - qbar).cwiseAbs().maxCoeff());
    if (!quot.hlift) {
      ++rep.points_tested;
      continue;
    }
    const Eigen::MatrixXd Lam = hlift_matrix(*quot.hlift, q, nbar);
    const Eigen::MatrixXd Drho = quot.project.jacobian(q);
    proj_res = std::max(
        proj_res,
        (Drho * Lam - Eigen::MatrixXd::Identity(nbar, nbar))
            .cwiseAbs()
            .maxCoeff());
    for (int b = 0; b < nbar; ++b) {
      const Eigen::VectorXd r = constraint_residual(cs, {q, Lam.col(b)});
      if (r.size())
        lift_res = std::max(lift_res, r.cwiseAbs().maxCoeff());
    }
    ++rep.points_tested;
  }
  rep.extra["section_residual"] = sect_res;
  rep.extra["lift_in_distribution_residual"] = lift_res;
  rep.extra["projection_identity_residual"] = proj_res;
  rep.max_residual = std::max({sect_res, lift_res, proj_res});
  return rep.finalize();
}

CheckReport check_invariance(const LagrangianSystem& sys,
                             const ConstraintSet& cs,
                             const GroupActionSpec& action,
                             const std::vector<State>& samples, double tol) {
  CheckReport rep;
  rep.name = "invariance";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(samples.size());
  Json per_gen = Json::array();
  for (int j = 0; j < action.dim_g; ++j) {
    double worst_L = 0.0, worst_psi = 0.0;
    for (const auto& s : samples) {
      worst_L = std::max(
          worst_L,
          std::abs(complete_lift_derivative(sys.L, action.generators[j], s, 0)));
      for (int a = 0; a < cs.k; ++a)
        worst_psi = std::max(
            worst_psi,
            std::abs(complete_lift_derivative(cs.psi, action.generators[j], s,
                                              a)));
    }
    Json g = Json::object();
    g["generator"] = j;
    g["lagrangian_residual"] = worst_L;
    g["constraint_tangency_residual"] = worst_psi;
    g["pass"] = std::max(worst_L, worst_psi) <= tol;
    per_gen.push_back(g);
    rep.max_residual = std::max(rep.max_residual, std::max(worst_L, worst_psi));
  }
  rep.points_tested = static_cast<int>(samples.size());
  rep.extra["generators"] = per_gen;
  return rep.finalize();
}

Classification classify_case(const LagrangianSystem& sys,
                             const ConstraintSet& cs,
                             const GroupActionSpec& action, const State& s) {
  const int n = static_cast<int>(s.q.size());
  Classification out;

  std::vector<Eigen::VectorXd> lifts;
  lifts.reserve(action.dim_g);
  for (const auto& gen : action.generators) lifts.push_back(complete_lift(gen, s));
  const Subspace V = lifts.empty() ? Subspace::zero(2 * n)
                                   : Subspace::span(lifts);
  const Subspace TN = tangent_N(cs, s);
  const Subspace VN = intersect(V, TN);
  const Subspace H = h_distribution(sys, cs, s);
  const Subspace inter = intersect(VN, H);
  const Subspace sum = subspace_sum(VN, H);

  out.dim_V = V.rank();
  out.dim_VN = VN.rank();
  out.dim_H = H.rank();
  out.dim_VN_cap_H = inter.rank();
  out.dim_VN_plus_H = sum.rank();
  out.dim_TN = TN.rank();

  if (out.dim_VN > 0 && out.dim_VN_cap_H == out.dim_VN)
    out.verdict = "horizontal";
  else if (out.dim_VN_cap_H == 0)
    out.verdict = "pure_kinematic";
  else
    out.verdict = "general";
  return out;
}

Subspace momentum_subspace(const LagrangianSystem& sys,
                           const ConstraintSet& cs,
                           const GroupActionSpec& action,
                           const Eigen::VectorXd& q) {
  const int n = static_cast<int>(q.size());
  if (action.dim_g == 0) return Subspace::zero(0);

  std::vector<Eigen::VectorXd> vel_samples;
  if (cs.linear || cs.k == 0) {
    vel_samples.push_back(Eigen::VectorXd::Zero(n));
  } else {
    GridSpec gs;
    gs.lo = Eigen::VectorXd::Constant(n, -1.0);
    gs.hi = Eigen::VectorXd::Constant(n, 1.0);
    gs.count = 8;
    for (const auto& v : halton_grid(gs)) {
      try {
        vel_samples.push_back(project_velocity(sys, cs, {q, v}).v);
      } catch (const Error&) {
        /* sample failed to project; skip it */
      }
    }
    if (vel_samples.empty())
      throw DomainError(
          "momentum_subspace: no admissible velocity samples at q");
  }

  Eigen::MatrixXd gen_vals(n, action.dim_g);
  for (int j = 0; j < action.dim_g; ++j)
    gen_vals.col(j) = action.generators[j](q);

  Eigen::MatrixXd rows(static_cast<int>(vel_samples.size()) * cs.k,
                       action.dim_g);
  int r = 0;
  for (const auto& v : vel_samples) {
    const Eigen::MatrixXd A = reaction_matrix(cs, {q, v});
    for (int a = 0; a < cs.k; ++a) rows.row(r++) = A.row(a) * gen_vals;
  }
  if (rows.rows() == 0) return Subspace::full(action.dim_g);
  Subspace out;
  out.ambient = action.dim_g;
  out.basis = kernel_basis(rows);
  return out;
}

double nonholonomic_momentum(const LagrangianSystem& sys,
                             const GroupActionSpec& action,
                             const Eigen::VectorXd& xi_coeffs, const State& s) {
  if (xi_coeffs.size() != action.dim_g)
    throw DimensionError("nonholonomic_momentum: coefficient size mismatch");
  const Eigen::VectorXd p = momentum(sys, s.q, s.v);
  double J = 0.0;
  for (int j = 0; j < action.dim_g; ++j)
    J += xi_coeffs[j] * p.dot(action.generators[j](s.q));
  return J;
}

double nonholonomic_momentum(const LagrangianSystem& sys,
                             const GroupActionSpec& action,
                             const SmoothMap& xi_section, const State& s) {
  const Eigen::VectorXd c = xi_section(s.q);
  return nonholonomic_momentum(sys, action, c, s);
}

CheckReport noether_check(const LagrangianSystem& sys, const ConstraintSet& cs,
                          const GroupActionSpec& action,
                          const SmoothMap& xi_section, const Trajectory& traj,
                          double tol) {
  (void)cs;
  const long len = static_cast<long>(traj.states.size());
  if (len < 5)
    throw DomainError("noether_check: need at least five trajectory samples");
  const double dt = traj.times[1] - traj.times[0];
  const int n = sys.n;

  std::vector<double> J(len);
  for (long i = 0; i < len; ++i)
    J[i] = nonholonomic_momentum(sys, action, xi_section, traj.states[i]);

  const SmoothMap Xi =
      combination_field(action.generators, xi_section, n, action.dim_g);

  CheckReport rep;
  rep.name = "noether";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(static_cast<std::size_t>(len));
  double jmin = J[0], jmax = J[0];
  for (double v : J) {
    jmin = std::min(jmin, v);
    jmax = std::max(jmax, v);
  }
  for (long i = 2; i + 2 < len; ++i) {
    const double dJ =
        (-J[i + 2] + 8.0 * J[i + 1] - 8.0 * J[i - 1] + J[i - 2]) / (12.0 * dt);
    const double rhs = complete_lift_derivative(sys.L, Xi, traj.states[i], 0);
    rep.max_residual = std::max(rep.max_residual, std::abs(dJ - rhs));
    ++rep.points_tested;
  }
  rep.extra["momentum_drift"] = jmax - jmin;
  rep.extra["momentum_initial"] = J.front();
  rep.extra["momentum_final"] = J.back();
  return rep.finalize();
}

ReducedSystem chaplygin_reduce(const LagrangianSystem& sys,
                               const ConstraintSet& cs,
                               const GroupActionSpec& action) {
  const auto& quot = require_quotient(action, "chaplygin_reduce");
  if (!quot.hlift)
    throw ConfigError("chaplygin_reduce: quotient has no horizontal lift");
  const int n = sys.n;
  const int nbar = quot.dim_qbar;
  const SmoothMap L = sys.L;
  const SmoothMap section = quot.section;
  const SmoothMap project = quot.project;
  const SmoothMap hlift = *quot.hlift;

  ReducedSystem red;
  red.base.n = nbar;
  red.base.L = SmoothMap::make(2 * nbar, 1, [L, section, hlift, n, nbar](
                                                const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    DVec<T> qbar(x.begin(), x.begin() + nbar);
    DVec<T> q = section.eval(qbar);
    DVec<T> z(n + nbar);
    for (int i = 0; i < n; ++i) z[i] = q[i];
    for (int b = 0; b < nbar; ++b) z[n + b] = x[nbar + b];
    DVec<T> v = hlift.eval(z);
    DVec<T> full(2 * n);
    for (int i = 0; i < n; ++i) {
      full[i] = q[i];
      full[n + i] = v[i];
    }
    return L.eval(full);
  });

  if (sys.mechanical) {
    const SmoothMap metric = sys.mechanical->metric;
    const SmoothMap potential = sys.mechanical->potential;
    MechanicalData md;
    md.metric = SmoothMap::make(
        nbar, nbar * nbar, [metric, section, hlift, n, nbar](const auto& qbar) {
          using T = std::decay_t<decltype(qbar[0])>;
          DVec<T> q = section.eval(qbar);
          DVec<T> M = metric.eval(q);
          auto cols = hlift_columns(hlift, q, n, nbar);
          DVec<T> out(nbar * nbar);
          for (int a = 0; a < nbar; ++a)
            for (int b = 0; b < nbar; ++b) {
              T acc = T(0);
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                  acc += cols[a][i] * M[i * n + j] * cols[b][j];
              out[a * nbar + b] = acc;
            }
          return out;
        });
    md.potential = SmoothMap::make(nbar, 1, [potential, section](
                                                const auto& qbar) {
      return potential.eval(section.eval(qbar));
    });
    red.base.mechanical = md;
  }

  /* Gyroscopic one-form on the chart (q, vbar) of the constraint manifold:
     difference of the exterior derivative of the horizontally projected
     momentum form and the horizontal pullback of its exterior derivative,
     contracted with the constrained dynamics, then read off along the
     horizontal-lift directions. */
  auto gyro0 = [sys, cs, L, section, project, hlift, n,
                nbar](const DVec<double>& x) {
    const Eigen::VectorXd qbar = to_eigen(DVec<double>(x.begin(), x.begin() + nbar));
    const Eigen::VectorXd vbar = to_eigen(DVec<double>(x.begin() + nbar, x.end()));
    const Eigen::VectorXd q = section(qbar);
    const int m = n + nbar;

    auto beta = [&](const DVec<D1>& y) {
      DVec<D1> qy(y.begin(), y.begin() + n);
      DVec<D1> z(n + nbar);
      for (int i = 0; i < n; ++i) z[i] = qy[i];
      for (int b = 0; b < nbar; ++b) z[n + b] = y[n + b];
      DVec<D1> v = hlift.eval(z);
      DVec<D1> full(2 * n);
      for (int i = 0; i < n; ++i) {
        full[i] = qy[i];
        full[n + i] = v[i];
      }
      DVec<D1> p = grad_slice(L, full, n, n);
      DVec<D1> out(m, D1(0.0));
      for (int i = 0; i < n; ++i) out[i] = p[i];
      return out;
    };

    auto gamma = [&](const DVec<D1>& y) {
      DVec<D1> qy(y.begin(), y.begin() + n);
      DVec<D1> bet = beta(y);
      auto cols = hlift_columns(hlift, qy, n, nbar);
      auto drho = jac_rows(project, qy); /* nbar rows of n entries */
      /* H = Lam * Drho; gamma_q = H^T p. */
      DVec<D1> out(m, D1(0.0));
      for (int j = 0; j < n; ++j) {
        D1 acc(0.0);
        for (int b = 0; b < nbar; ++b)
          for (int i = 0; i < n; ++i)
            acc += bet[i] * cols[b][i] * drho[b][j];
        out[j] = acc;
      }
      return out;
    };

    auto jac_of = [m](auto&& f, const DVec<double>& at) {
      Eigen::MatrixXd Jm(m, m);
      for (int col = 0; col < m; ++col) {
        DVec<D1> y(m);
        for (int i = 0; i < m; ++i) y[i] = D1(at[i], i == col ? 1.0 : 0.0);
        DVec<D1> out = f(y);
        for (int row = 0; row < m; ++row) Jm(row, col) = out[row].b;
      }
      return Jm;
    };

    DVec<double> wc(m);
    for (int i = 0; i < n; ++i) wc[i] = q[i];
    for (int b = 0; b < nbar; ++b) wc[n + b] = vbar[b];
    const Eigen::MatrixXd Jb = jac_of(beta, wc);
    const Eigen::MatrixXd Jg = jac_of(gamma, wc);

    const Eigen::MatrixXd Lam = hlift_matrix(hlift, q, nbar);
    const Eigen::MatrixXd Drho = project.jacobian(q);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    h.topLeftCorner(n, n) = Lam * Drho;
    h.bottomRightCorner(nbar, nbar) =
        Eigen::MatrixXd::Identity(nbar, nbar);

    const Eigen::MatrixXd two_form =
        (Jg.transpose() - Jg) -
        h.transpose() * (Jb.transpose() - Jb) * h;

    /* Chart velocity of the constrained dynamics: (v, d/dt (Drho v)). */
    const Eigen::VectorXd v = Lam * vbar;
    const Eigen::VectorXd a = constrained_field(sys, cs, {q, v}).accel;
    Eigen::VectorXd vbardot(nbar);
    {
      DVec<D1> qd(n);
      for (int i = 0; i < n; ++i) qd[i] = D1(q[i], v[i]);
      auto drho = jac_rows(project, qd);
      for (int b = 0; b < nbar; ++b) {
        D1 acc(0.0);
        for (int i = 0; i < n; ++i) acc += drho[b][i] * D1(v[i], a[i]);
        vbardot[b] = acc.b;
      }
    }
    Eigen::VectorXd gamma_chart(m);
    gamma_chart << v, vbardot;

    const Eigen::VectorXd contracted = two_form.transpose() * gamma_chart;
    const Eigen::VectorXd abar = Lam.transpose() * contracted.head(n);
    return from_eigen(abar);
  };

  red.gyro = SmoothMap::from_levels(2 * nbar, nbar, gyro0);
  return red;
}

CheckReport check_reduced_hj(const ReducedSystem& red, const HJCandidate& cand,
                             const std::vector<Eigen::VectorXd>& grid,
                             ReducedVariant variant, double tol) {
  const int nbar = red.base.n;
  if (variant == ReducedVariant::chaplygin) {
    const CheckReport plus =
        check_forced_hj(cand, red.base, red.gyro, grid, HJSign::plus, tol);
    const CheckReport minus =
        check_forced_hj(cand, red.base, red.gyro, grid, HJSign::minus, tol);
    CheckReport rep;
    rep.name = "reduced_hj_chaplygin";
    rep.tolerance = tol;
    rep.grid_spec = grid_label(grid.size());
    rep.points_tested = plus.points_tested;
    rep.extra["candidate"] = cand.label;
    rep.extra["residual_plus"] = plus.max_residual;
    rep.extra["residual_minus"] = minus.max_residual;
    const bool pp = plus.max_residual <= tol;
    const bool pm = minus.max_residual <= tol;
    rep.extra["satisfied_sign"] =
        pp && pm ? "both" : (pp ? "plus" : (pm ? "minus" : "none"));
    rep.max_residual = std::min(plus.max_residual, minus.max_residual);
    return rep.finalize();
  }

  /* Pure kinematic: fixed minus sign plus the closedness side condition
     (vanishing pullback of the reduced two-form). */
  const CheckReport minus =
      check_forced_hj(cand, red.base, red.gyro, grid, HJSign::minus, tol);
  double pullback = 0.0;
  for (const auto& qbar : grid) {
    const Eigen::VectorXd vbar = cand.map(qbar);
    const Eigen::MatrixXd DX = cand.map.jacobian(qbar);
    const Eigen::MatrixXd Om = lagrangian_two_form(red.base, {qbar, vbar});
    for (int a = 0; a < nbar; ++a) {
      Eigen::VectorXd ua(2 * nbar);
      ua << Eigen::VectorXd::Unit(nbar, a), DX.col(a);
      for (int b = a + 1; b < nbar; ++b) {
        Eigen::VectorXd wb(2 * nbar);
        wb << Eigen::VectorXd::Unit(nbar, b), DX.col(b);
        pullback = std::max(pullback, std::abs(ua.dot(Om * wb)));
      }
    }
  }
  CheckReport rep;
  rep.name = "reduced_hj_pure_kinematic";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(grid.size());
  rep.points_tested = minus.points_tested;
  rep.extra["candidate"] = cand.label;
  rep.extra["energy_residual"] = minus.max_residual;
  rep.extra["two_form_pullback_residual"] = pullback;
  rep.max_residual = std::max(minus.max_residual, pullback);
  return rep.finalize();
}

CheckReport check_reduced_hj_general(const LagrangianSystem& sys,
                                     const ConstraintSet& cs,
                                     const GroupActionSpec& action,
                                     const HJCandidate& cand,
                                     const std::vector<Eigen::VectorXd>& grid,
                                     double tol) {
  const auto& quot = require_quotient(action, "check_reduced_hj_general");
  const int n = sys.n;
  const int nbar = quot.dim_qbar;
  const SmoothMap section = quot.section;
  const SmoothMap L = sys.L;

  CheckReport rep;
  rep.name = "reduced_hj_general";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(grid.size());
  double gate = 0.0, energy_part = 0.0;
  for (const auto& qbar : grid) {
    const Eigen::VectorXd q = section(qbar);
    const Eigen::VectorXd v = cand.map(qbar);
    const Eigen::VectorXd r = constraint_residual(cs, {q, v});
    if (r.size()) gate = std::max(gate, r.cwiseAbs().maxCoeff());

    /* dg over qbar for g = E_L(section(qbar), cand(qbar)). */
    Eigen::VectorXd dg(nbar);
    for (int j = 0; j < nbar; ++j) {
      DVec<D1> qbd(nbar);
      for (int i = 0; i < nbar; ++i)
        qbd[i] = D1(qbar[i], i == j ? 1.0 : 0.0);
      DVec<D1> qd = section.eval(qbd);
      DVec<D1> vd = cand.map.eval(qbd);
      DVec<D1> z(2 * n);
      for (int i = 0; i < n; ++i) {
        z[i] = qd[i];
        z[n + i] = vd[i];
      }
      DVec<D1> p = grad_slice(L, z, n, n);
      D1 e = -L.eval(z)[0];
      for (int i = 0; i < n; ++i) e += p[i] * z[n + i];
      dg[j] = e.b;
    }

    /* Projected reaction codistribution: covectors c on the quotient with
       Drho^T c inside the row span of dpsi/dv. */
    const Eigen::MatrixXd Drho = quot.project.jacobian(q);
    const Eigen::MatrixXd A = reaction_matrix(cs, {q, v});
    Eigen::MatrixXd stacked(n, nbar + cs.k);
    stacked.leftCols(nbar) = Drho.transpose();
    if (cs.k) stacked.rightCols(cs.k) = -A.transpose();
    const Eigen::MatrixXd ker = kernel_basis(stacked);
    Eigen::VectorXd resid = dg;
    if (ker.cols() > 0) {
      const Eigen::MatrixXd Fbar =
          orthonormal_columns(ker.topRows(nbar));
      if (Fbar.cols() > 0) resid = dg - Fbar * (Fbar.transpose() * dg);
    }
    energy_part = std::max(energy_part,
                           resid.size() ? resid.cwiseAbs().maxCoeff() : 0.0);
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  rep.extra["in_N_residual"] = gate;
  rep.extra["energy_residual"] = energy_part;
  rep.max_residual = std::max(gate, energy_part);
  return rep.finalize();
}

HJCandidate reconstruct(const GroupActionSpec& action,
                        const HJCandidate& reduced) {
  const auto& quot = require_quotient(action, "reconstruct");
  const SmoothMap project = quot.project;
  const int n = project.arity();
  const int nbar = quot.dim_qbar;

  HJCandidate out;
  out.kind = HJCandidate::Kind::vector_field;
  out.label = "lift." + reduced.label;
  if (quot.hlift) {
    const SmoothMap hlift = *quot.hlift;
    const SmoothMap xbar = reduced.map;
    out.map = SmoothMap::make(n, n, [project, hlift, xbar, n, nbar](
                                        const auto& q) {
      using T = std::decay_t<decltype(q[0])>;
      DVec<T> qbar = project.eval(q);
      DVec<T> vbar = xbar.eval(qbar);
      DVec<T> z(n + nbar);
      for (int i = 0; i < n; ++i) z[i] = q[i];
      for (int b = 0; b < nbar; ++b) z[n + b] = vbar[b];
      return hlift.eval(z);
    });
  } else {
    const SmoothMap xbar = reduced.map;
    out.map = SmoothMap::make(n, n, [project, xbar](const auto& q) {
      return xbar.eval(project.eval(q));
    });
  }
  return out;
}

CheckReport check_pushforward_invariance(
    const GroupActionSpec& action, const HJCandidate& cand,
    const std::vector<Eigen::VectorXd>& grid, double tol) {
  CheckReport rep;
  rep.name = "pushforward_invariance";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(grid.size());
  for (const auto& q : grid) {
    for (const auto& gen : action.generators) {
      const Eigen::VectorXd br = lie_bracket(gen, cand.map, q);
      rep.max_residual = std::max(rep.max_residual, br.cwiseAbs().maxCoeff());
    }
    ++rep.points_tested;
  }
  rep.extra["candidate"] = cand.label;
  return rep.finalize();
}

CheckReport check_horizontal_mu(const LagrangianSystem& sys,
                                const ConstraintSet& cs,
                                const GroupActionSpec& action,
                                const HJCandidate& cand,
                                const Eigen::VectorXd& mu,
                                const std::vector<Eigen::VectorXd>& grid,
                                double tol) {
  if (mu.size() != action.dim_g)
    throw DimensionError("check_horizontal_mu: momentum size mismatch");
  if (grid.empty())
    throw DomainError("check_horizontal_mu: empty grid");

  {
    const Eigen::VectorXd q0 = grid.front();
    const Classification cls =
        classify_case(sys, cs, action, {q0, cand.map(q0)});
    if (cls.verdict != "horizontal")
      throw DomainError(
          "check_horizontal_mu: classification at the sample state is '" +
          cls.verdict + "', not 'horizontal'");
  }

  /* Isotropy subalgebra: kernel of xi -> ad*_xi mu, full algebra when no
     structure constants are given (abelian). */
  Eigen::MatrixXd iso;
  const int g = action.dim_g;
  if (action.structure_constants.empty()) {
    iso = Eigen::MatrixXd::Identity(g, g);
  } else {
    Eigen::MatrixXd ad(g, g);
    for (int j = 0; j < g; ++j)
      for (int i = 0; i < g; ++i) {
        double acc = 0.0;
        for (int k = 0; k < g; ++k)
          acc += mu[k] * action.structure_constants[(i * g + j) * g + k];
        ad(j, i) = acc;
      }
    iso = kernel_basis(ad);
  }

  double invariance_part = 0.0, momentum_part = 0.0;
  for (const auto& q : grid) {
    const Eigen::VectorXd v = cand.map(q);
    const Eigen::VectorXd p = momentum(sys, q, v);
    for (int c = 0; c < iso.cols(); ++c) {
      /* Pushforward along the combination generator. */
      Eigen::VectorXd br = Eigen::VectorXd::Zero(sys.n);
      double Jc = 0.0, muc = 0.0;
      for (int j = 0; j < g; ++j) {
        if (iso(j, c) == 0.0) continue;
        br += iso(j, c) * lie_bracket(action.generators[j], cand.map, q);
        Jc += iso(j, c) * p.dot(action.generators[j](q));
        muc += iso(j, c) * mu[j];
      }
      invariance_part =
          std::max(invariance_part, br.cwiseAbs().maxCoeff());
      momentum_part = std::max(momentum_part, std::abs(Jc - muc));
    }
  }

  const CheckReport in_n = check_in_N(cand, cs, grid, tol);
  const CheckReport weak = check_hj_condition(cand, sys, cs, grid, false, tol);
  double hj_part = std::max(in_n.max_residual, weak.max_residual);
  if (cs.linear && cs.k > 0) {
    const CheckReport closed =
        check_closedness_linear(cand, sys, cs, grid, tol);
    hj_part = std::max(hj_part, closed.max_residual);
  }

  CheckReport rep;
  rep.name = "horizontal_mu";
  rep.tolerance = tol;
  rep.grid_spec = grid_label(grid.size());
  rep.points_tested = static_cast<int>(grid.size());
  rep.extra["candidate"] = cand.label;
  rep.extra["isotropy_dim"] = static_cast<int>(iso.cols());
  rep.extra["invariance_residual"] = invariance_part;
  rep.extra["momentum_residual"] = momentum_part;
  rep.extra["hj_residual"] = hj_part;
  rep.max_residual = std::max({invariance_part, momentum_part, hj_part});
  return rep.finalize();
}

CheckReport bates_sniatycki_check(const LagrangianSystem& sys,
                                  const ConstraintSet& cs,
                                  const GroupActionSpec& action, const State& s,
                                  double tol) {
  const int n = static_cast<int>(s.q.size());

  std::vector<Eigen::VectorXd> lifts;
  lifts.reserve(action.dim_g);
  for (const auto& gen : action.generators) lifts.push_back(complete_lift(gen, s));
  const Subspace V = lifts.empty() ? Subspace::zero(2 * n)
                                   : Subspace::span(lifts);
  const Subspace F = f_distribution(cs, s);
  const Subspace H = h_distribution(sys, cs, s);
  const Eigen::MatrixXd Om = lagrangian_two_form(sys, s);
  const Subspace VF = intersect(V, F);
  const Subspace perp = symplectic_orthogonal(Om, VF);
  const Subspace U = intersect(H, perp);

  const ConstrainedField cf = constrained_field(sys, cs, s);
  Eigen::VectorXd gamma(2 * n);
  gamma << s.v, cf.accel;
  const Eigen::VectorXd dE = denergy(sys, s);

  CheckReport rep;
  rep.name = "bates_sniatycki";
  rep.tolerance = tol;
  rep.grid_spec = "points=1";
  rep.points_tested = 1;
  for (int c = 0; c < U.basis.cols(); ++c) {
    const Eigen::VectorXd u = U.basis.col(c);
    rep.max_residual =
        std::max(rep.max_residual, std::abs(gamma.dot(Om * u) - dE.dot(u)));
  }
  rep.extra["dim_U"] = U.rank();
  rep.extra["dim_V_cap_F"] = VF.rank();
  rep.extra["dim_H"] = H.rank();
  return rep.finalize();
}

ChowTransfer chow_transfer(const std::vector<SmoothMap>& generators,
                           const GroupActionSpec& action,
                           const Eigen::VectorXd& q, int max_depth,
                           double tol) {
  const auto& quot = require_quotient(action, "chow_transfer");
  const int nbar = quot.dim_qbar;
  const SmoothMap project = quot.project;
  const SmoothMap section = quot.section;

  ChowTransfer out;
  out.on_q = chow_flag(generators, q, max_depth, tol);

  std::vector<SmoothMap> reduced;
  reduced.reserve(generators.size());
  for (const auto& gen : generators) {
    auto ev = [project, section, gen, nbar](const auto& qbar) {
      using T = std::decay_t<decltype(qbar[0])>;
      DVec<T> qs = section.eval(qbar);
      DVec<T> g = gen.eval(qs);
      auto drho = jac_rows(project, qs);
      DVec<T> o(nbar);
      for (int b = 0; b < nbar; ++b) {
        T acc = T(0);
        for (std::size_t i = 0; i < g.size(); ++i) acc += drho[b][i] * g[i];
        o[b] = acc;
      }
      return o;
    };
    reduced.push_back(SmoothMap::from_levels(
        nbar, nbar, [ev](const DVec<double>& x) { return ev(x); },
        [ev](const DVec<D1>& x) { return ev(x); },
        [ev](const DVec<D2>& x) { return ev(x); },
        [ev](const DVec<D3>& x) { return ev(x); }));
  }
  out.reduced = chow_flag(reduced, project(q), max_depth, tol);
  out.agree = out.on_q.complete == out.reduced.complete;
  return out;
}

}  // namespace nhmech
