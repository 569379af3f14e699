#include "nhmech/mechanics.hpp"

namespace nhmech {

namespace {

constexpr double kConditionLimit = 1e12;

void check_dims(const LagrangianSystem& sys, const State& s) {
  if (s.q.size() != sys.n || s.v.size() != sys.n)
    throw DimensionError("state dimensions do not match the system");
}

template <typename T>
DVec<T> momentum_eval(const SmoothMap& L, const DVec<T>& x, int n) {
  return grad_slice(L, x, n, n);
}

}  // namespace

Eigen::VectorXd tangent_coords(const State& s) {
  Eigen::VectorXd x(s.q.size() + s.v.size());
  x << s.q, s.v;
  return x;
}

SmoothMap mechanical_lagrangian(const MechanicalData& md, int n) {
  const SmoothMap metric = md.metric;
  const SmoothMap potential = md.potential;
  return SmoothMap::make(2 * n, 1, [metric, potential, n](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    DVec<T> q(x.begin(), x.begin() + n);
    const DVec<T> M = metric.eval(q);
    T kin(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) kin += x[n + i] * M[i * n + j] * x[n + j];
    const DVec<T> V = potential.eval(q);
    return DVec<T>{kin * T(0.5) - V[0]};
  });
}

double energy(const LagrangianSystem& sys, const State& s) {
  check_dims(sys, s);
  Eigen::VectorXd p = momentum(sys, s.q, s.v);
  double Lval = sys.L(tangent_coords(s))(0);
  return s.v.dot(p) - Lval;
}

Eigen::VectorXd momentum(const LagrangianSystem& sys, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& v) {
  State s{q, v};
  check_dims(sys, s);
  DVec<double> x = from_eigen(tangent_coords(s));
  return to_eigen(momentum_eval(sys.L, x, sys.n));
}

PhasePoint legendre(const LagrangianSystem& sys, const State& s) {
  return PhasePoint{s.q, momentum(sys, s.q, s.v)};
}

Eigen::MatrixXd metric_matrix(const LagrangianSystem& sys,
                              const Eigen::VectorXd& q) {
  if (!sys.mechanical)
    throw UnsupportedError("metric_matrix: system has no mechanical data");
  Eigen::VectorXd flat = sys.mechanical->metric(q);
  Eigen::MatrixXd M(sys.n, sys.n);
  for (int i = 0; i < sys.n; ++i)
    for (int j = 0; j < sys.n; ++j) M(i, j) = flat(i * sys.n + j);
  return M;
}

State legendre_inverse(const LagrangianSystem& sys, const PhasePoint& ph) {
  if (!sys.mechanical)
    throw UnsupportedError(
        "legendre_inverse: closed-form inverse requires mechanical data");
  Eigen::MatrixXd M = metric_matrix(sys, ph.q);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw RegularityError("legendre_inverse: metric singular at this point");
  return State{ph.q, lu.solve(ph.p)};
}

double hamiltonian(const LagrangianSystem& sys, const PhasePoint& ph) {
  State s = legendre_inverse(sys, ph);
  double V = sys.mechanical->potential(ph.q)(0);
  return 0.5 * ph.p.dot(s.v) + V;
}

Eigen::MatrixXd velocity_hessian(const LagrangianSystem& sys, const State& s) {
  Eigen::MatrixXd W = full_hessian(sys, s).block(sys.n, sys.n, sys.n, sys.n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 ||
      sv(0) / sv(sv.size() - 1) > kConditionLimit)
    throw RegularityError(
        "velocity Hessian ill-conditioned at the queried state (condition "
        "number above 1e12)");
  return W;
}

Eigen::MatrixXd full_hessian(const LagrangianSystem& sys, const State& s) {
  check_dims(sys, s);
  return sys.L.hessian(tangent_coords(s));
}

Eigen::VectorXd lagrangian_gradient(const LagrangianSystem& sys,
                                    const State& s) {
  check_dims(sys, s);
  DVec<double> x = from_eigen(tangent_coords(s));
  return to_eigen(grad<double>(sys.L, x));
}

Eigen::MatrixXd lagrangian_two_form(const LagrangianSystem& sys,
                                    const State& s) {
  const int n = sys.n;
  Eigen::MatrixXd H = full_hessian(sys, s);
  Eigen::MatrixXd B = H.block(n, 0, n, n); /* d p_i / d q_j */
  Eigen::MatrixXd W = H.block(n, n, n, n);
  Eigen::MatrixXd Om = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Om.topLeftCorner(n, n) = B - B.transpose();
  Om.topRightCorner(n, n) = W;
  Om.bottomLeftCorner(n, n) = -W;
  return Om;
}

Eigen::VectorXd denergy(const LagrangianSystem& sys, const State& s) {
  const int n = sys.n;
  Eigen::MatrixXd H = full_hessian(sys, s);
  Eigen::VectorXd g = lagrangian_gradient(sys, s);
  Eigen::MatrixXd B = H.block(n, 0, n, n);
  Eigen::MatrixXd W = H.block(n, n, n, n);
  Eigen::VectorXd dE(2 * n);
  dE.head(n) = B.transpose() * s.v - g.head(n);
  dE.tail(n) = W * s.v;
  return dE;
}

Eigen::VectorXd unconstrained_field(const LagrangianSystem& sys,
                                    const State& s) {
  const int n = sys.n;
  Eigen::MatrixXd H = full_hessian(sys, s);
  Eigen::VectorXd g = lagrangian_gradient(sys, s);
  Eigen::MatrixXd B = H.block(n, 0, n, n);
  Eigen::MatrixXd W = H.block(n, n, n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 ||
      sv(0) / sv(sv.size() - 1) > kConditionLimit)
    throw RegularityError("unconstrained_field: singular velocity Hessian");
  Eigen::VectorXd a = W.partialPivLu().solve(g.head(n) - B * s.v);
  Eigen::VectorXd field(2 * n);
  field << s.v, a;
  return field;
}

SmoothMap momentum_map(const LagrangianSystem& sys) {
  const SmoothMap L = sys.L;
  const int n = sys.n;
  return SmoothMap::from_levels(
      2 * n, n,
      [L, n](const DVec<double>& x) { return momentum_eval(L, x, n); },
      [L, n](const DVec<D1>& x) { return momentum_eval(L, x, n); },
      [L, n](const DVec<D2>& x) { return momentum_eval(L, x, n); },
      [L, n](const DVec<D3>& x) { return momentum_eval(L, x, n); });
}

SmoothMap hamiltonian_map(const LagrangianSystem& sys) {
  if (!sys.mechanical)
    throw UnsupportedError("hamiltonian_map: requires mechanical data");
  const SmoothMap metric = sys.mechanical->metric;
  const SmoothMap potential = sys.mechanical->potential;
  const int n = sys.n;
  return SmoothMap::make(2 * n, 1, [metric, potential, n](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    DVec<T> q(x.begin(), x.begin() + n);
    DVec<T> p(x.begin() + n, x.end());
    DVec<T> Mflat = metric.eval(q);
    DVec<T> u = linsolve<T>(Mflat, p, n);
    T h = potential.eval(q)[0];
    for (int i = 0; i < n; ++i) h += 0.5 * p[i] * u[i];
    return DVec<T>{h};
  });
}

}  // namespace nhmech
