#include "nhmech/systems.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "nhmech/error.hpp"

namespace nhmech {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Params merge_params(const Params& defaults, const Params& given,
                    const std::string& where, bool require_positive) {
  Params out = defaults;
  for (const auto& [key, val] : given) {
    auto it = out.find(key);
    if (it == out.end())
      throw ConfigError(where + ": unknown parameter '" + key + "'");
    it->second = val;
  }
  if (require_positive)
    for (const auto& [key, val] : out)
      if (!(val > 0.0))
        throw ConfigError(where + ": parameter '" + key +
                          "' must be positive (got " + fmt_g(val) + ")");
  return out;
}

SmoothMap zero_scalar(int arity) {
  return SmoothMap::make(arity, 1, [](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    return DVec<T>{T(0)};
  });
}

SmoothMap constant_metric(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  DVec<double> entries(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries[i * n + j] = M(i, j);
  return SmoothMap::make(n, n * n, [entries, n](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    DVec<T> out(n * n);
    for (int i = 0; i < n * n; ++i) out[i] = T(entries[i]);
    return out;
  });
}

Eigen::VectorXd unit(int n, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[i] = 1.0;
  return e;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<long>(xs.size()));
  long i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/* ---- free particle with the linear constraint zdot = y xdot ---- */

SystemBundle make_free_particle(Params p) {
  const double m = p.at("m");
  const int n = 3;
  SystemBundle b;
  b.name = "free_particle";
  b.params = p;

  MechanicalData md{constant_metric(m * Eigen::MatrixXd::Identity(n, n)),
                    zero_scalar(n)};
  b.sys = LagrangianSystem{n, mechanical_lagrangian(md, n), md};

  b.cs.k = 1;
  b.cs.linear = true;
  b.cs.psi = SmoothMap::make(2 * n, 1, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[5] - z[1] * z[3]};
  });
  b.cs.coeff = SmoothMap::make(n, n, [](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    return DVec<T>{-q[1], T(0), T(1)};
  });

  GroupActionSpec act;
  act.dim_g = 2;
  act.generators = {constant_coefficients(unit(n, 0), n),
                    constant_coefficients(unit(n, 2), n)};
  GroupActionSpec::Quotient quot;
  quot.dim_qbar = 1;
  quot.project = SmoothMap::make(n, 1, [](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    return DVec<T>{q[1]};
  });
  quot.section = SmoothMap::make(1, n, [](const auto& y) {
    using T = std::decay_t<decltype(y[0])>;
    return DVec<T>{T(0), y[0], T(0)};
  });
  act.quotient = quot;
  b.action = act;

  b.dist_generators = {SmoothMap::make(n, n,
                                       [](const auto& q) {
                                         using T = std::decay_t<decltype(q[0])>;
                                         return DVec<T>{T(1), T(0), q[1]};
                                       }),
                       constant_coefficients(unit(n, 1), n)};

  auto family_velocity = [](const auto& y, double c1, double c2) {
    using T = std::decay_t<decltype(y)>;
    using std::sqrt;
    T root = sqrt(T(1) + y * y);
    return DVec<T>{c1 / root, T(c2), c1 * y / root};
  };

  CandidateEntry family;
  family.summary =
      "two-parameter field (c1/sqrt(1+y^2), c2, c1 y/sqrt(1+y^2))";
  family.defaults = {{"c1", 1.0}, {"c2", 2.0}};
  family.build = [family_velocity, n](const Params& cp) {
    const double c1 = cp.at("c1"), c2 = cp.at("c2");
    HJCandidate cand;
    cand.kind = HJCandidate::Kind::vector_field;
    cand.label = "family(c1=" + fmt_g(c1) + ",c2=" + fmt_g(c2) + ")";
    cand.map =
        SmoothMap::make(n, n, [family_velocity, c1, c2](const auto& q) {
          return family_velocity(q[1], c1, c2);
        });
    return cand;
  };
  b.candidates["family"] = family;

  CandidateEntry reduced;
  reduced.summary = "the same family as a velocity profile over the quotient";
  reduced.defaults = {{"c1", 1.0}, {"c2", 2.0}};
  reduced.build = [family_velocity, n](const Params& cp) {
    const double c1 = cp.at("c1"), c2 = cp.at("c2");
    HJCandidate cand;
    cand.kind = HJCandidate::Kind::vector_field;
    cand.label = "reduced_family(c1=" + fmt_g(c1) + ",c2=" + fmt_g(c2) + ")";
    cand.map =
        SmoothMap::make(1, n, [family_velocity, c1, c2](const auto& y) {
          return family_velocity(y[0], c1, c2);
        });
    return cand;
  };
  b.candidates["reduced_family"] = reduced;

  /* Closed forms from eliminating the multiplier by hand:
     xddot = -y ydot xdot / (1+y^2), lambda = m ydot xdot / (1+y^2),
     compatibility scalar -(1+y^2)/m. */
  b.fixtures["constrained_accel"] =
      Fixture{vec({-0.5, 0.0, 0.5}), vec({0, 1, 0, 1, 1, 1}), 1e-10,
              "closed_form"};
  b.fixtures["multiplier"] =
      Fixture{vec({0.5 * m}), vec({0, 1, 0, 1, 1, 1}), 1e-10, "closed_form"};
  b.fixtures["compatibility"] =
      Fixture{vec({-5.0 / m}), vec({0, 2, 0}), 1e-10, "closed_form"};
  b.fixtures["psi_jacobian"] =
      Fixture{vec({0, -1, 0, -2, 0, 1}), vec({0, 2, 0, 1, 0, 1}), 1e-12,
              "closed_form"};
  b.fixtures["family_energy"] =
      Fixture{vec({0.5 * m * 5.0}), vec({1, 2}), 1e-12, "closed_form"};
  b.fixtures["classification_dims"] =
      Fixture{vec({1, 2}), Eigen::VectorXd(), 0.0, "recomputed"};

  b.box_lo = vec({-3, -3, -3});
  b.box_hi = vec({3, 3, 3});
  b.qbar_lo = vec({-3});
  b.qbar_hi = vec({3});
  b.state0 = State{vec({0, 0, 0}), vec({1, 0, 0})};
  return b;
}

/* ---- two-wheeled carriage ---- */

SystemBundle make_carriage(Params p) {
  const double m = p.at("m"), m0 = p.at("m0"), l = p.at("l"), J = p.at("J");
  const double C = p.at("C"), a = p.at("a"), r = p.at("r");
  const int n = 5; /* coordinates x, y, phi, phi1, phi2 */
  SystemBundle b;
  b.name = "carriage";
  b.params = p;

  SmoothMap metric =
      SmoothMap::make(n, n * n, [m, m0, l, J, C, n](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        using std::cos;
        using std::sin;
        T c = cos(q[2]), s = sin(q[2]);
        DVec<T> M(n * n, T(0));
        M[0 * n + 0] = T(m);
        M[1 * n + 1] = T(m);
        M[2 * n + 2] = T(J);
        M[3 * n + 3] = T(C);
        M[4 * n + 4] = T(C);
        M[0 * n + 2] = M[2 * n + 0] = -m0 * l * s;
        M[1 * n + 2] = M[2 * n + 1] = m0 * l * c;
        return M;
      });
  MechanicalData md{metric, zero_scalar(n)};
  b.sys = LagrangianSystem{n, mechanical_lagrangian(md, n), md};

  b.cs.k = 3;
  b.cs.linear = true;
  b.cs.psi = SmoothMap::make(2 * n, 3, [a, r](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::cos;
    using std::sin;
    T c = cos(z[2]), s = sin(z[2]);
    T wheel_sum = z[8] + z[9];
    return DVec<T>{z[5] + (a / 2.0) * c * wheel_sum,
                   z[6] + (a / 2.0) * s * wheel_sum,
                   z[7] + (a / (2.0 * r)) * (z[8] - z[9])};
  });
  b.cs.coeff = SmoothMap::make(n, 3 * n, [a, r, n](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    using std::cos;
    using std::sin;
    T c = cos(q[2]), s = sin(q[2]);
    DVec<T> A(3 * n, T(0));
    A[0 * n + 0] = T(1);
    A[0 * n + 3] = A[0 * n + 4] = (a / 2.0) * c;
    A[1 * n + 1] = T(1);
    A[1 * n + 3] = A[1 * n + 4] = (a / 2.0) * s;
    A[2 * n + 2] = T(1);
    A[2 * n + 3] = T(a / (2.0 * r));
    A[2 * n + 4] = T(-a / (2.0 * r));
    return A;
  });

  GroupActionSpec act;
  act.dim_g = 3;
  act.generators = {constant_coefficients(unit(n, 0), n),
                    constant_coefficients(unit(n, 1), n),
                    SmoothMap::make(n, n, [](const auto& q) {
                      using T = std::decay_t<decltype(q[0])>;
                      return DVec<T>{-q[1], q[0], T(1), T(0), T(0)};
                    })};
  /* Vector-field brackets of the generators: [e1,e3] = e2, [e2,e3] = -e1. */
  act.structure_constants.assign(27, 0.0);
  auto sc = [&act](int i, int j, int k, double v) {
    act.structure_constants[(i * 3 + j) * 3 + k] = v;
    act.structure_constants[(j * 3 + i) * 3 + k] = -v;
  };
  sc(0, 2, 1, 1.0);
  sc(1, 2, 0, -1.0);

  /* Constraint-consistent horizontal lift: the wheel rates determine the
     frame velocities. */
  auto lift_cols = [a, r, n](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    using std::cos;
    using std::sin;
    T c = cos(q[2]), s = sin(q[2]);
    std::pair<DVec<T>, DVec<T>> cols;
    cols.first = DVec<T>{-(a / 2.0) * c, -(a / 2.0) * s, T(-a / (2.0 * r)),
                         T(1), T(0)};
    cols.second = DVec<T>{-(a / 2.0) * c, -(a / 2.0) * s, T(a / (2.0 * r)),
                          T(0), T(1)};
    return cols;
  };

  GroupActionSpec::Quotient quot;
  quot.dim_qbar = 2;
  quot.project = SmoothMap::make(n, 2, [](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    return DVec<T>{q[3], q[4]};
  });
  quot.section = SmoothMap::make(2, n, [](const auto& qb) {
    using T = std::decay_t<decltype(qb[0])>;
    return DVec<T>{T(0), T(0), T(0), qb[0], qb[1]};
  });
  quot.hlift = SmoothMap::make(n + 2, n, [lift_cols, n](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    DVec<T> q(z.begin(), z.begin() + n);
    auto cols = lift_cols(q);
    DVec<T> v(n);
    for (int i = 0; i < n; ++i)
      v[i] = z[n] * cols.first[i] + z[n + 1] * cols.second[i];
    return v;
  });
  act.quotient = quot;
  b.action = act;

  b.dist_generators = {SmoothMap::make(n, n,
                                       [lift_cols](const auto& q) {
                                         return lift_cols(q).first;
                                       }),
                       SmoothMap::make(n, n, [lift_cols](const auto& q) {
                         return lift_cols(q).second;
                       })};

  const double K = m0 * l * a * a * a / (4.0 * r * r);
  const double R = 0.25 * m * a * a + J * a * a / (4.0 * r * r) + C;
  const double S = 0.25 * m * a * a - J * a * a / (4.0 * r * r);
  const double kappa = K / R;

  CandidateEntry x1;
  x1.summary = "exp(K phi2 / R) d/dphi1 on the wheel torus";
  x1.build = [kappa](const Params&) {
    HJCandidate cand;
    cand.kind = HJCandidate::Kind::vector_field;
    cand.label = "xbar1";
    cand.map = SmoothMap::make(2, 2, [kappa](const auto& qb) {
      using T = std::decay_t<decltype(qb[0])>;
      using std::exp;
      return DVec<T>{exp(kappa * qb[1]), T(0)};
    });
    return cand;
  };
  b.candidates["xbar1"] = x1;

  CandidateEntry x2;
  x2.summary = "exp(-K phi1 / R) d/dphi2 on the wheel torus";
  x2.build = [kappa](const Params&) {
    HJCandidate cand;
    cand.kind = HJCandidate::Kind::vector_field;
    cand.label = "xbar2";
    cand.map = SmoothMap::make(2, 2, [kappa](const auto& qb) {
      using T = std::decay_t<decltype(qb[0])>;
      using std::exp;
      return DVec<T>{T(0), exp(-kappa * qb[0])};
    });
    return cand;
  };
  b.candidates["xbar2"] = x2;

  CandidateEntry roll;
  roll.summary = "equal wheel rates c (straight rolling, zero gyroscopic force)";
  roll.defaults = {{"c", 1.0}};
  roll.build = [](const Params& cp) {
    const double c = cp.at("c");
    HJCandidate cand;
    cand.kind = HJCandidate::Kind::vector_field;
    cand.label = "straight_roll(c=" + fmt_g(c) + ")";
    cand.map = SmoothMap::make(2, 2, [c](const auto& qb) {
      using T = std::decay_t<decltype(qb[0])>;
      (void)qb;
      return DVec<T>{T(c), T(c)};
    });
    return cand;
  };
  b.candidates["straight_roll"] = roll;

  b.fixtures["gyro_unit_roll"] =
      Fixture{vec({0.0, -K}), vec({0, 0, 1, 0}), 1e-8, "closed_form"};
  b.fixtures["reduced_mass"] =
      Fixture{vec({R, S}), Eigen::VectorXd(), 1e-12, "closed_form"};
  b.fixtures["growth"] =
      Fixture{vec({2, 3, 4, 4}), Eigen::VectorXd(), 0.0, "recomputed"};
  b.fixtures["xi3_at_zero"] =
      Fixture{vec({0.0, a * a / (2.0 * r), 0, 0, 0}), Eigen::VectorXd::Zero(5),
              1e-12, "closed_form"};
  b.fixtures["xi4_at_zero"] =
      Fixture{vec({a * a * a / (4.0 * r * r), 0, 0, 0, 0}),
              Eigen::VectorXd::Zero(5), 1e-12, "closed_form"};

  b.box_lo = vec({-1, -1, 0, 0, 0});
  b.box_hi = vec({1, 1, 2 * kPi, 2 * kPi, 2 * kPi});
  b.qbar_lo = vec({0, 0});
  b.qbar_hi = vec({2 * kPi, 2 * kPi});
  /* Straight rolling from the origin: both wheels at unit rate. */
  b.state0 = State{Eigen::VectorXd::Zero(n), vec({-a, 0, 0, 1, 1})};
  return b;
}

/* ---- vertical rolling disk, constraints only ---- */

SystemBundle make_rolling_disk(Params p) {
  const double R = p.at("R");
  const int n = 4; /* x, y, phi (heading), psi (rolling angle) */
  SystemBundle b;
  b.name = "rolling_disk";
  b.params = p;

  b.cs.k = 2;
  b.cs.linear = true;
  b.cs.psi = SmoothMap::make(2 * n, 2, [R](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::cos;
    using std::sin;
    return DVec<T>{z[4] - R * z[7] * cos(z[2]), z[5] - R * z[7] * sin(z[2])};
  });
  b.cs.coeff = SmoothMap::make(n, 2 * n, [R, n](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    using std::cos;
    using std::sin;
    DVec<T> A(2 * n, T(0));
    A[0 * n + 0] = T(1);
    A[0 * n + 3] = -R * cos(q[2]);
    A[1 * n + 1] = T(1);
    A[1 * n + 3] = -R * sin(q[2]);
    return A;
  });

  b.dist_generators = {constant_coefficients(unit(n, 2), n),
                       SmoothMap::make(n, n, [R](const auto& q) {
                         using T = std::decay_t<decltype(q[0])>;
                         using std::cos;
                         using std::sin;
                         return DVec<T>{R * cos(q[2]), R * sin(q[2]), T(0),
                                        T(1)};
                       })};

  b.fixtures["growth"] =
      Fixture{vec({2, 3, 4}), Eigen::VectorXd(), 0.0, "recomputed"};

  b.box_lo = vec({-1, -1, 0, 0});
  b.box_hi = vec({1, 1, 2 * kPi, 2 * kPi});
  b.state0 = State{Eigen::VectorXd::Zero(n), vec({R, 0, 0, 1})};
  return b;
}

/* ---- block-and-wheel machine with a velocity-quadratic constraint ---- */

SystemBundle make_appel_hamel(Params p) {
  const double a = p.at("a"), bb = p.at("b");
  const int n = 3; /* x, y, z */
  SystemBundle b;
  b.name = "appel_hamel";
  b.params = p;

  const double ratio = a * a / (bb * bb);
  MechanicalData md{constant_metric(Eigen::MatrixXd::Identity(n, n)),
                    zero_scalar(n)};
  b.sys = LagrangianSystem{n, mechanical_lagrangian(md, n), md};

  b.cs.k = 1;
  b.cs.linear = false;
  b.cs.psi = SmoothMap::make(2 * n, 1, [ratio](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[3] * z[3] + z[4] * z[4] - ratio * z[5] * z[5]};
  });

  b.fixtures["homogeneity_degree"] =
      Fixture{vec({2}), Eigen::VectorXd(), 0.0, "construction"};
  b.fixtures["reaction_row"] =
      Fixture{vec({2, 0, -2 * ratio}), vec({0, 0, 0, 1, 0, 1}), 1e-12,
              "closed_form"};

  b.box_lo = vec({-1, -1, -1});
  b.box_hi = vec({1, 1, 1});
  b.state0 = State{vec({0, 0, 0}), vec({1, 0, 1})};
  return b;
}

}  // namespace

SystemBundle get_system(const std::string& name, const Params& params) {
  if (name == "free_particle")
    return make_free_particle(
        merge_params({{"m", 1.0}}, params, "free_particle", true));
  if (name == "carriage")
    return make_carriage(merge_params({{"m", 4.0},
                                       {"m0", 1.0},
                                       {"l", 1.0},
                                       {"J", 1.0},
                                       {"C", 1.0},
                                       {"a", 1.0},
                                       {"r", 1.0}},
                                      params, "carriage", true));
  if (name == "rolling_disk")
    return make_rolling_disk(
        merge_params({{"R", 1.0}}, params, "rolling_disk", true));
  if (name == "appel_hamel")
    return make_appel_hamel(
        merge_params({{"a", 1.0}, {"b", 1.0}}, params, "appel_hamel", true));
  throw ConfigError("unknown system '" + name +
                    "' (available: appel_hamel, carriage, free_particle, "
                    "rolling_disk)");
}

std::vector<std::string> registered_systems() {
  return {"appel_hamel", "carriage", "free_particle", "rolling_disk"};
}

HJCandidate build_candidate(const SystemBundle& bundle, const std::string& name,
                            const Params& params) {
  auto it = bundle.candidates.find(name);
  if (it == bundle.candidates.end()) {
    std::string available;
    for (const auto& [key, entry] : bundle.candidates) {
      if (!available.empty()) available += ", ";
      available += key;
    }
    if (available.empty()) available = "none";
    throw ConfigError(bundle.name + ": unknown candidate '" + name +
                      "' (available: " + available + ")");
  }
  return it->second.build(
      merge_params(it->second.defaults, params, bundle.name + "/" + name,
                   false));
}

HorizontalMuFixture horizontal_mu_fixture(double mu1, double mu2, double m) {
  if (!(m > 0.0))
    throw ConfigError("horizontal_mu_fixture: mass must be positive");
  const int n = 3;
  HorizontalMuFixture f;

  MechanicalData md{constant_metric(m * Eigen::MatrixXd::Identity(n, n)),
                    zero_scalar(n)};
  f.sys = LagrangianSystem{n, mechanical_lagrangian(md, n), md};

  f.cs.k = 1;
  f.cs.linear = true;
  f.cs.psi = SmoothMap::make(2 * n, 1, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[5]};
  });
  f.cs.coeff = constant_coefficients(unit(n, 2), n);

  f.action.dim_g = 2;
  f.action.generators = {constant_coefficients(unit(n, 0), n),
                         constant_coefficients(unit(n, 1), n)};

  f.mu = vec({mu1, mu2});
  f.candidate.kind = HJCandidate::Kind::vector_field;
  f.candidate.label =
      "momentum_match(mu1=" + fmt_g(mu1) + ",mu2=" + fmt_g(mu2) + ")";
  const double v1 = mu1 / m, v2 = mu2 / m;
  f.candidate.map = SmoothMap::make(n, n, [v1, v2](const auto& q) {
    using T = std::decay_t<decltype(q[0])>;
    (void)q;
    return DVec<T>{T(v1), T(v2), T(0)};
  });
  return f;
}

}  // namespace nhmech
