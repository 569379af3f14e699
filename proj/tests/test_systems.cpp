#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nhmech/systems.hpp"

using namespace nhmech;

TEST_CASE("registry contents") {
  auto names = registered_systems();
  REQUIRE(names.size() == 4);
  CHECK(names == std::vector<std::string>{"appel_hamel", "carriage",
                                          "free_particle", "rolling_disk"});
  CHECK_THROWS_AS(get_system("slide_rule"), ConfigError);
}

TEST_CASE("parameter merging validates keys and signs") {
  SystemBundle b = get_system("free_particle", {{"m", 2.5}});
  CHECK(b.params.at("m") == 2.5);
  CHECK_THROWS_AS(get_system("free_particle", {{"mass", 1.0}}), ConfigError);
  CHECK_THROWS_AS(get_system("free_particle", {{"m", -1.0}}), ConfigError);
  CHECK_THROWS_AS(get_system("carriage", {{"r", 0.0}}), ConfigError);
}

TEST_CASE("default states sit on the constraint manifolds") {
  for (const auto& name : registered_systems()) {
    SystemBundle b = get_system(name);
    CAPTURE(name);
    CHECK(constraint_residual(b.cs, b.state0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(b.box_lo.size() == b.state0.q.size());
    CHECK(b.box_hi.size() == b.state0.q.size());
  }
}

TEST_CASE("admissibility and compatibility hold across the sample boxes") {
  testutil::Sampler rng;
  for (const char* name : {"free_particle", "carriage"}) {
    SystemBundle b = get_system(name);
    CAPTURE(name);
    for (int t = 0; t < 20; ++t) {
      State s = rng.admissible_state(b);
      CHECK(check_admissibility(b.cs, s).pass);
      Eigen::MatrixXd C = compatibility_matrix(*b.sys, b.cs, s);
      CHECK(std::abs(C.fullPivLu().determinant()) > 1e-8);
    }
  }
}

TEST_CASE("quadratic constraint bundle is regular away from flat rolling") {
  SystemBundle b = get_system("appel_hamel");
  testutil::Sampler rng;
  for (int t = 0; t < 20; ++t) {
    const double c = rng.uniform(0.5, 1.5) * (t % 2 ? 1.0 : -1.0);
    State s{rng.cube(3, -1, 1), (Eigen::VectorXd(3) << c, 0, c).finished()};
    CHECK(check_admissibility(b.cs, s).pass);
    Eigen::MatrixXd C = compatibility_matrix(*b.sys, b.cs, s);
    CHECK(std::abs(C(0, 0)) > 1e-8);
  }
}

TEST_CASE("rolling disk distribution is regular under a flat metric") {
  SystemBundle b = get_system("rolling_disk");
  CHECK_FALSE(b.sys.has_value());
  MechanicalData md;
  md.metric = SmoothMap::make(4, 16, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    (void)z;
    DVec<T> g(16, T(0.0));
    for (int i = 0; i < 4; ++i) g[5 * i] = T(1.0);
    return g;
  });
  md.potential = SmoothMap::make(4, 1, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    (void)z;
    return DVec<T>{T(0.0)};
  });
  LagrangianSystem sys;
  sys.n = 4;
  sys.L = mechanical_lagrangian(md, 4);
  sys.mechanical = md;
  testutil::Sampler rng;
  for (int t = 0; t < 10; ++t) {
    State s{rng.cube(4, -2, 2), rng.cube(4, -1, 1)};
    Eigen::MatrixXd C = compatibility_matrix(sys, b.cs, s);
    CHECK(std::abs(C.fullPivLu().determinant()) > 1e-8);
  }
  const Fixture& fx = b.fixtures.at("growth");
  ChowFlag f = chow_flag(b.dist_generators, b.state0.q, 4);
  REQUIRE(static_cast<int>(f.growth.size()) == fx.value.size());
  for (int i = 0; i < fx.value.size(); ++i)
    CHECK(f.growth[static_cast<size_t>(i)] == static_cast<int>(fx.value[i]));
}

TEST_CASE("candidate builders honor defaults and reject unknown keys") {
  SystemBundle b = get_system("free_particle");
  HJCandidate def = build_candidate(b, "family", {});
  Eigen::VectorXd q(3);
  q << 0, 0, 0;
  CHECK(def.map(q)[0] == doctest::Approx(1.0));
  CHECK(def.map(q)[1] == doctest::Approx(2.0));
  HJCandidate scaled = build_candidate(b, "family", {{"c1", 3.0}});
  CHECK(scaled.map(q)[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(build_candidate(b, "family", {{"c9", 1.0}}), ConfigError);
  CHECK_THROWS_AS(build_candidate(b, "no_such", {}), ConfigError);
}

TEST_CASE("family energy fixture") {
  SystemBundle b = get_system("free_particle");
  const Fixture& fx = b.fixtures.at("family_energy");
  HJCandidate cand = build_candidate(
      b, "family", {{"c1", fx.at[0]}, {"c2", fx.at[1]}});
  testutil::Sampler rng;
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd q = rng.cube(3, -2, 2);
    State s{q, cand.map(q)};
    CHECK(energy(*b.sys, s) == doctest::Approx(fx.value[0]).epsilon(1e-12));
  }
}

TEST_CASE("wheel constraint coefficients match the geometry") {
  const double a = 1.0, r = 1.3;
  SystemBundle b = get_system("carriage", {{"r", r}});
  testutil::Sampler rng;
  const double phi = rng.uniform(0, 6.28);
  Eigen::VectorXd q(5);
  q << 0.4, -0.7, phi, 1.0, 2.0;
  Eigen::VectorXd c = (*b.cs.coeff)(q);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>
      Cm(c.data(), 3, 5);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 5);
  want(0, 0) = 1;
  want(0, 3) = want(0, 4) = 0.5 * a * std::cos(phi);
  want(1, 1) = 1;
  want(1, 3) = want(1, 4) = 0.5 * a * std::sin(phi);
  want(2, 2) = 1;
  want(2, 3) = 0.5 * a / r;
  want(2, 4) = -0.5 * a / r;
  CHECK((Cm - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("carriage lift columns annihilate the constraints") {
  SystemBundle b = get_system("carriage", {{"a", 1.5}, {"r", 0.8}});
  const auto& quot = *b.action->quotient;
  testutil::Sampler rng;
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd q = rng.vector(b.box_lo, b.box_hi);
    Eigen::VectorXd w(7);
    w << q, rng.cube(2, -2, 2);
    Eigen::VectorXd v = (*quot.hlift)(w);
    Eigen::VectorXd z(10);
    z << q, v;
    CHECK(b.cs.psi(z).cwiseAbs().maxCoeff() < 1e-12);
    /* Lift reproduces the wheel rates. */
    CHECK(v[3] == doctest::Approx(w[5]).epsilon(1e-12));
    CHECK(v[4] == doctest::Approx(w[6]).epsilon(1e-12));
  }
}

TEST_CASE("structure constants encode the planar group") {
  SystemBundle b = get_system("carriage");
  const auto& sc = b.action->structure_constants;
  REQUIRE(sc.size() == 27);
  auto c = [&](int i, int j, int k) { return sc[(i * 3 + j) * 3 + k]; };
  /* [e1, e3] = e2 and [e2, e3] = -e1; all else zero. */
  CHECK(c(0, 2, 1) == 1.0);
  CHECK(c(2, 0, 1) == -1.0);
  CHECK(c(1, 2, 0) == -1.0);
  CHECK(c(2, 1, 0) == 1.0);
  CHECK(c(0, 1, 2) == 0.0);
  /* Consistency with the generator vector fields themselves. */
  const auto& gen = b.action->generators;
  testutil::Sampler rng;
  Eigen::VectorXd q = rng.vector(b.box_lo, b.box_hi);
  Eigen::VectorXd br = lie_bracket(gen[0], gen[2], q);
  Eigen::VectorXd want = gen[1](q);
  CHECK((br - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("bracket fixtures at the origin") {
  SystemBundle b = get_system("carriage");
  SmoothMap xi3 = bracket_field(b.dist_generators[0], b.dist_generators[1]);
  SmoothMap xi4 = bracket_field(b.dist_generators[0], xi3);
  const Fixture& f3 = b.fixtures.at("xi3_at_zero");
  const Fixture& f4 = b.fixtures.at("xi4_at_zero");
  CHECK((xi3(f3.at) - f3.value).cwiseAbs().maxCoeff() < f3.tolerance);
  CHECK((xi4(f4.at) - f4.value).cwiseAbs().maxCoeff() < f4.tolerance);
}

TEST_CASE("horizontal fixture is self-consistent") {
  HorizontalMuFixture fx = horizontal_mu_fixture(2.0, -1.0, 2.0);
  CHECK(fx.sys.n == 3);
  CHECK(fx.action.dim_g == 2);
  CHECK(fx.mu[0] == 2.0);
  CHECK(fx.mu[1] == -1.0);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd X = fx.candidate.map(q);
  /* Candidate velocity times mass reproduces mu. */
  CHECK(X[0] == doctest::Approx(1.0));
  CHECK(X[1] == doctest::Approx(-0.5));
  CHECK(X[2] == doctest::Approx(0.0));
}

TEST_CASE("fixtures carry source tags") {
  for (const auto& name : registered_systems()) {
    SystemBundle b = get_system(name);
    for (const auto& [key, fx] : b.fixtures) {
      CAPTURE(name);
      CAPTURE(key);
      CHECK((fx.source == "closed_form" || fx.source == "recomputed" ||
             fx.source == "construction"));
    }
  }
}
