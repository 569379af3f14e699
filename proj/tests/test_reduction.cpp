#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nhmech/reduction.hpp"

using namespace nhmech;

TEST_CASE("quotient data is consistent for both symmetric systems") {
  for (const char* name : {"free_particle", "carriage"}) {
    SystemBundle b = get_system(name);
    GridSpec g{b.qbar_lo, b.qbar_hi, 25, 0};
    CheckReport rep = check_quotient_data(b.cs, *b.action, halton_grid(g));
    CHECK(rep.pass);
  }
}

TEST_CASE("lagrangian and constraints are invariant under the action") {
  testutil::Sampler rng;
  for (const char* name : {"free_particle", "carriage"}) {
    SystemBundle b = get_system(name);
    std::vector<State> samples;
    for (int t = 0; t < 15; ++t) samples.push_back(rng.admissible_state(b));
    CHECK(check_invariance(*b.sys, b.cs, *b.action, samples).pass);
  }
}

TEST_CASE("a group that moves the constraint is rejected") {
  /* Translation in y changes psi = v_z - y v_x, so invariance must fail. */
  SystemBundle b = get_system("free_particle");
  GroupActionSpec bad;
  bad.dim_g = 1;
  bad.generators.push_back(SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    (void)z;
    return DVec<T>{T(0.0), T(1.0), T(0.0)};
  }));
  testutil::Sampler rng;
  std::vector<State> samples;
  for (int t = 0; t < 10; ++t) samples.push_back(rng.admissible_state(b));
  CheckReport rep = check_invariance(*b.sys, b.cs, bad, samples);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("classification: general for the shear constraint") {
  SystemBundle b = get_system("free_particle");
  testutil::Sampler rng;
  for (int t = 0; t < 20; ++t) {
    State s = rng.admissible_state(b);
    Classification c = classify_case(*b.sys, b.cs, *b.action, s);
    CHECK(c.verdict == "general");
    CHECK(c.dim_VN_cap_H == 1);
    CHECK(c.dim_VN == 2);
  }
}

TEST_CASE("classification: the carriage is purely kinematic") {
  SystemBundle b = get_system("carriage");
  testutil::Sampler rng;
  for (int t = 0; t < 20; ++t) {
    State s = rng.admissible_state(b);
    Classification c = classify_case(*b.sys, b.cs, *b.action, s);
    CHECK(c.verdict == "pure_kinematic");
    CHECK(c.dim_VN_cap_H == 0);
    CHECK(c.dim_VN == 3);
    CHECK(c.dim_H == 4);
    CHECK(c.dim_VN_plus_H == c.dim_TN);
  }
}

TEST_CASE("momentum subspace of the shear system is one-dimensional") {
  SystemBundle b = get_system("free_particle");
  Eigen::VectorXd q(3);
  q << 0, 2, 0;
  Subspace S = momentum_subspace(*b.sys, b.cs, *b.action, q);
  CHECK(S.rank() == 1);
  CHECK(S.contains((Eigen::VectorXd(2) << 1, 2).finished()));
}

TEST_CASE("momentum subspace of the carriage is trivial") {
  SystemBundle b = get_system("carriage");
  testutil::Sampler rng;
  Eigen::VectorXd q = rng.vector(b.box_lo, b.box_hi);
  CHECK(momentum_subspace(*b.sys, b.cs, *b.action, q).rank() == 0);
}

TEST_CASE("nonholonomic momentum overloads agree") {
  SystemBundle b = get_system("free_particle", {{"m", 1.5}});
  State s{(Eigen::VectorXd(3) << 0.5, 2.0, 1.0).finished(),
          (Eigen::VectorXd(3) << 1.0, -0.5, 2.0).finished()};
  Eigen::VectorXd xi(2);
  xi << 1.0, 2.0;
  const double j1 = nonholonomic_momentum(*b.sys, *b.action, xi, s);
  /* J = <p, xi_Q> = m (v_x + 2 v_z). */
  CHECK(j1 == doctest::Approx(1.5 * (1.0 + 2.0 * 2.0)).epsilon(1e-12));
  SmoothMap sect = constant_coefficients(xi, 3);
  CHECK(nonholonomic_momentum(*b.sys, *b.action, sect, s) ==
        doctest::Approx(j1).epsilon(1e-12));
}

TEST_CASE("momentum conservation holds only inside the momentum subspace") {
  SystemBundle b = get_system("free_particle");
  /* y stays zero: the x-translation generator lies in the momentum
     subspace all along and its momentum is conserved. */
  Trajectory flat = integrate(*b.sys, b.cs, b.state0, 1e-3, 800, true);
  Eigen::VectorXd e1(2);
  e1 << 1.0, 0.0;
  SmoothMap sect1 = constant_coefficients(e1, 3);
  CHECK(noether_check(*b.sys, b.cs, *b.action, sect1, flat, 1e-8).pass);

  /* Along a path with moving y, the same constant section leaves the
     momentum subspace and conservation fails. */
  State curved{(Eigen::VectorXd(3) << 0, 1, 0).finished(),
               (Eigen::VectorXd(3) << 1, 1, 1).finished()};
  Trajectory tr = integrate(*b.sys, b.cs, curved, 1e-3, 800, true);
  CheckReport off = noether_check(*b.sys, b.cs, *b.action, sect1, tr, 1e-8);
  CHECK_FALSE(off.pass);
  CHECK(off.max_residual > 1e-3);
}

TEST_CASE("reduced mass matrix and reduced lagrangian closed forms") {
  for (double r : {1.0, 1.3}) {
    Params p = {{"r", r}};
    SystemBundle b = get_system("carriage", p);
    const double m = 4.0, J = 1.0, C = 1.0, a = 1.0;
    const double R = 0.25 * m * a * a + J * a * a / (4 * r * r) + C;
    const double S = 0.25 * m * a * a - J * a * a / (4 * r * r);
    ReducedSystem red = chaplygin_reduce(*b.sys, b.cs, *b.action);
    REQUIRE(red.base.n == 2);
    testutil::Sampler rng;
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd qbar = rng.cube(2, 0, 6.28);
      Eigen::VectorXd vbar = rng.cube(2, -1.5, 1.5);
      Eigen::MatrixXd M = metric_matrix(red.base, qbar);
      CHECK(M(0, 0) == doctest::Approx(R).epsilon(1e-12));
      CHECK(M(1, 1) == doctest::Approx(R).epsilon(1e-12));
      CHECK(M(0, 1) == doctest::Approx(S).epsilon(1e-12));
      const double want =
          0.5 * (R * vbar[0] * vbar[0] + R * vbar[1] * vbar[1]) +
          S * vbar[0] * vbar[1];
      Eigen::VectorXd z(4);
      z << qbar, vbar;
      CHECK(red.base.L(z)[0] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("gyroscopic one-form matches the closed form and does no work") {
  for (double r : {1.0, 1.3}) {
    SystemBundle b = get_system("carriage", {{"r", r}});
    const double m0 = 1.0, l = 1.0, a = 1.0;
    const double K = m0 * l * a * a * a / (4 * r * r);
    ReducedSystem red = chaplygin_reduce(*b.sys, b.cs, *b.action);
    testutil::Sampler rng;
    for (int t = 0; t < 8; ++t) {
      Eigen::VectorXd z(4);
      z << rng.cube(2, 0, 6.28), rng.cube(2, -1.5, 1.5);
      Eigen::VectorXd alpha = red.gyro(z);
      const double v1 = z[2], v2 = z[3];
      CHECK(alpha[0] == doctest::Approx(K * (v1 - v2) * v2).epsilon(1e-8));
      CHECK(alpha[1] == doctest::Approx(-K * (v1 - v2) * v1).epsilon(1e-8));
      /* Gyroscopic forces are workless. */
      CHECK(std::abs(alpha[0] * v1 + alpha[1] * v2) < 1e-10);
    }
  }
}

TEST_CASE("unit-roll gyroscopic fixture") {
  SystemBundle b = get_system("carriage");
  const Fixture& fx = b.fixtures.at("gyro_unit_roll");
  ReducedSystem red = chaplygin_reduce(*b.sys, b.cs, *b.action);
  CHECK((red.gyro(fx.at) - fx.value).cwiseAbs().maxCoeff() < fx.tolerance);
}

TEST_CASE("reduced equation holds under exactly one sign per candidate") {
  SystemBundle b = get_system("carriage");
  ReducedSystem red = chaplygin_reduce(*b.sys, b.cs, *b.action);
  GridSpec g{b.qbar_lo, b.qbar_hi, 50, 0};
  auto grid = halton_grid(g);

  CheckReport r1 = check_reduced_hj(red, build_candidate(b, "xbar1", {}), grid,
                                    ReducedVariant::chaplygin);
  CHECK(r1.pass);
  CHECK(r1.extra.at("satisfied_sign") == "minus");
  CHECK(r1.extra.at("residual_plus").get<double>() > 1e-3);

  CheckReport r2 = check_reduced_hj(red, build_candidate(b, "xbar2", {}), grid,
                                    ReducedVariant::chaplygin);
  CHECK(r2.pass);
  CHECK(r2.extra.at("satisfied_sign") == "plus");

  CheckReport r3 = check_reduced_hj(red, build_candidate(b, "straight_roll", {}),
                                    grid, ReducedVariant::chaplygin);
  CHECK(r3.pass);
  CHECK(r3.extra.at("satisfied_sign") == "both");
}

TEST_CASE("exponential candidates still solve the reduced equation at r != 1") {
  SystemBundle b = get_system("carriage", {{"r", 1.3}});
  ReducedSystem red = chaplygin_reduce(*b.sys, b.cs, *b.action);
  GridSpec g{b.qbar_lo, b.qbar_hi, 40, 0};
  CheckReport rep = check_reduced_hj(red, build_candidate(b, "xbar1", {}),
                                     halton_grid(g), ReducedVariant::chaplygin);
  CHECK(rep.pass);
}

TEST_CASE("general-variant reduced check on the shear system") {
  SystemBundle b = get_system("free_particle");
  HJCandidate cand = build_candidate(b, "reduced_family", {});
  GridSpec g{b.qbar_lo, b.qbar_hi, 50, 0};
  CheckReport rep = check_reduced_hj_general(*b.sys, b.cs, *b.action, cand,
                                             halton_grid(g));
  CHECK(rep.pass);
}

TEST_CASE("reconstruction lifts reduced candidates into the distribution") {
  SystemBundle b = get_system("carriage");
  HJCandidate xbar = build_candidate(b, "xbar1", {});
  HJCandidate full = reconstruct(*b.action, xbar);
  const auto& quot = *b.action->quotient;
  testutil::Sampler rng;
  for (int t = 0; t < 6; ++t) {
    Eigen::VectorXd q = rng.vector(b.box_lo, b.box_hi);
    Eigen::VectorXd X = full.map(q);
    /* The lift stays inside the constraint distribution... */
    Eigen::VectorXd z(10);
    z << q, X;
    CHECK(b.cs.psi(z).cwiseAbs().maxCoeff() < 1e-10);
    /* ...and projects back onto the reduced candidate. */
    Eigen::VectorXd down = quot.project.jacobian(q) * X;
    Eigen::VectorXd want = xbar.map(quot.project(q));
    CHECK((down - want).cwiseAbs().maxCoeff() < 1e-10);
  }
  GridSpec g{b.box_lo, b.box_hi, 40, 0};
  CHECK(check_pushforward_invariance(*b.action, full, halton_grid(g)).pass);
}

TEST_CASE("reconstructed quotient solutions miss the full equations") {
  /* The reduced solutions do satisfy the quotient-level equation, yet
     their lifts fail the full relatedness test: reduction genuinely
     loses information here. The straight-rolling candidate, which is an
     honest full solution, passes the same test. */
  SystemBundle b = get_system("carriage");
  GridSpec g{b.box_lo, b.box_hi, 40, 0};
  auto grid = halton_grid(g);
  HJCandidate lift1 = reconstruct(*b.action, build_candidate(b, "xbar1", {}));
  CheckReport r1 = check_related(lift1, *b.sys, b.cs, grid, 1e-7);
  CHECK_FALSE(r1.pass);
  CHECK(r1.max_residual > 1e-3);

  HJCandidate roll =
      reconstruct(*b.action, build_candidate(b, "straight_roll", {}));
  CHECK(check_related(roll, *b.sys, b.cs, grid, 1e-7).pass);
}

TEST_CASE("bracket completeness transfers to the quotient only when true") {
  SystemBundle fp = get_system("free_particle");
  ChowTransfer t1 =
      chow_transfer(fp.dist_generators, *fp.action, fp.state0.q, 4);
  CHECK(t1.on_q.complete);
  CHECK(t1.reduced.complete);
  CHECK(t1.agree);

  SystemBundle car = get_system("carriage");
  ChowTransfer t2 =
      chow_transfer(car.dist_generators, *car.action, car.state0.q, 4);
  CHECK_FALSE(t2.on_q.complete);
  CHECK(t2.reduced.complete);
  CHECK_FALSE(t2.agree);
}

TEST_CASE("subbundle test of the reduced dynamics at admissible states") {
  SystemBundle car = get_system("carriage");
  testutil::Sampler rng;
  for (int t = 0; t < 5; ++t) {
    State s = rng.admissible_state(car);
    CheckReport rep = bates_sniatycki_check(*car.sys, car.cs, *car.action, s);
    CHECK(rep.pass);
    CHECK(rep.extra.at("dim_U").get<int>() == 4);
  }
}

TEST_CASE("horizontal momentum check passes only for the matching value") {
  HorizontalMuFixture fx = horizontal_mu_fixture(1.0, 0.5);
  GridSpec g{Eigen::VectorXd::Constant(3, -1.0),
             Eigen::VectorXd::Constant(3, 1.0), 30, 0};
  auto grid = halton_grid(g);
  CHECK(check_horizontal_mu(fx.sys, fx.cs, fx.action, fx.candidate, fx.mu,
                            grid)
            .pass);
  Eigen::VectorXd wrong = fx.mu;
  wrong[0] += 0.3;
  CheckReport rep =
      check_horizontal_mu(fx.sys, fx.cs, fx.action, fx.candidate, wrong, grid);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("constant coefficient sections are constant") {
  Eigen::VectorXd c(2);
  c << 0.7, -1.2;
  SmoothMap sect = constant_coefficients(c, 5);
  Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(5, -1, 1);
  CHECK((sect(q) - c).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sect.jacobian(q).cwiseAbs().maxCoeff() == 0.0);
}
