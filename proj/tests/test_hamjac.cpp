#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nhmech/hamjac.hpp"
#include "nhmech/reduction.hpp"

using namespace nhmech;

static GridSpec fp_grid(int count = 60, unsigned seed = 0) {
  SystemBundle b = get_system("free_particle");
  return GridSpec{b.box_lo, b.box_hi, count, seed};
}

TEST_CASE("halton grids are deterministic and live inside the box") {
  GridSpec g = fp_grid(40, 0);
  auto pts1 = halton_grid(g);
  auto pts2 = halton_grid(g);
  REQUIRE(pts1.size() == 40);
  for (size_t i = 0; i < pts1.size(); ++i) {
    CHECK((pts1[i] - pts2[i]).norm() == 0.0);
    for (int d = 0; d < 3; ++d) {
      CHECK(pts1[i][d] >= g.lo[d]);
      CHECK(pts1[i][d] <= g.hi[d]);
    }
  }
  GridSpec shifted = g;
  shifted.seed = 7;
  auto pts3 = halton_grid(shifted);
  CHECK((pts3[0] - pts1[0]).norm() > 1e-12);
  CHECK(g.describe() == fp_grid(40, 0).describe());
}

TEST_CASE("product grid includes endpoints and has the right count") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0, -1;
  hi << 1, 1;
  auto pts = product_grid(lo, hi, {3, 5});
  REQUIRE(pts.size() == 15);
  CHECK((pts.front() - lo).norm() == 0.0);
  CHECK((pts.back() - hi).norm() == 0.0);
}

TEST_CASE("solution family satisfies every lagrangian-side condition") {
  SystemBundle b = get_system("free_particle");
  HJCandidate cand = build_candidate(b, "family", {{"c1", 1.0}, {"c2", 2.0}});
  auto grid = halton_grid(fp_grid());
  CHECK(check_in_N(cand, b.cs, grid).pass);
  CHECK(check_closedness_linear(cand, *b.sys, b.cs, grid).pass);
  CHECK(check_hj_condition(cand, *b.sys, b.cs, grid, false).pass);
  CHECK(check_hj_condition(cand, *b.sys, b.cs, grid, true).pass);
  CHECK(check_related(cand, *b.sys, b.cs, grid).pass);
  /* Different family parameters are solutions too. */
  HJCandidate other = build_candidate(b, "family", {{"c1", -2.0}, {"c2", 0.5}});
  CHECK(check_related(other, *b.sys, b.cs, grid).pass);
}

TEST_CASE("the reaction forces do not vanish along the family") {
  SystemBundle b = get_system("free_particle");
  HJCandidate cand = build_candidate(b, "family", {});
  auto grid = halton_grid(fp_grid());
  CheckReport rep = check_no_reaction(cand, *b.sys, b.cs, grid);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual > 0.1);
}

TEST_CASE("perturbing the candidate breaks membership in N") {
  SystemBundle b = get_system("free_particle");
  HJCandidate bad;
  bad.kind = HJCandidate::Kind::vector_field;
  bad.label = "family plus vertical drift";
  bad.map = SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::sqrt;
    T den = sqrt(1.0 + z[1] * z[1]);
    return DVec<T>{1.0 / den, T(2.0), z[1] / den + 0.1 * z[1]};
  });
  auto grid = halton_grid(fp_grid());
  CheckReport rep = check_in_N(bad, b.cs, grid);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual > 0.01);
}

TEST_CASE("an in-N field that is not closed fails closedness and relatedness") {
  /* X = (c1, c2, c1 y) stays inside the constraint manifold but its
     momentum one-form has nonzero exterior derivative on the admissible
     pairs, and it is not mapped onto the dynamics. */
  SystemBundle b = get_system("free_particle");
  HJCandidate skew;
  skew.kind = HJCandidate::Kind::vector_field;
  skew.label = "linear shear";
  skew.map = SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{T(1.0), T(2.0), z[1]};
  });
  auto grid = halton_grid(fp_grid());
  CHECK(check_in_N(skew, b.cs, grid).pass);
  CheckReport closed = check_closedness_linear(skew, *b.sys, b.cs, grid);
  CHECK_FALSE(closed.pass);
  CHECK(closed.max_residual > 1e-3);
  CheckReport rel = check_related(skew, *b.sys, b.cs, grid);
  CHECK_FALSE(rel.pass);
  CHECK(rel.max_residual > 1e-3);
}

TEST_CASE("hamiltonian-side checks mirror the lagrangian side") {
  SystemBundle b = get_system("free_particle");
  auto grid = halton_grid(fp_grid());

  HJCandidate good = build_candidate(b, "family", {});
  HJCandidate sigma = legendre_compose(*b.sys, good);
  CHECK(sigma.kind == HJCandidate::Kind::one_form);
  CheckReport lag = check_hj_condition(good, *b.sys, b.cs, grid, true);
  CheckReport ham = check_hamiltonian_hj(sigma, *b.sys, b.cs, grid, true);
  CHECK(lag.pass == ham.pass);
  CHECK(ham.max_residual <= 10.0 * lag.max_residual + 1e-12);
  CHECK(lag.max_residual <= 10.0 * ham.max_residual + 1e-12);

  /* A candidate with non-constant energy must fail on both sides. */
  HJCandidate varying;
  varying.kind = HJCandidate::Kind::vector_field;
  varying.label = "energy gradient";
  varying.map = SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[1], T(0.0), z[1] * z[1]};
  });
  CheckReport lag2 = check_hj_condition(varying, *b.sys, b.cs, grid, true);
  CheckReport ham2 =
      check_hamiltonian_hj(legendre_compose(*b.sys, varying), *b.sys, b.cs,
                           grid, true);
  CHECK_FALSE(lag2.pass);
  CHECK(lag2.pass == ham2.pass);
}

TEST_CASE("legendre composition is the metric contraction") {
  SystemBundle b = get_system("free_particle", {{"m", 2.0}});
  HJCandidate cand = build_candidate(b, "family", {});
  HJCandidate sigma = legendre_compose(*b.sys, cand);
  testutil::Sampler rng;
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd q = rng.cube(3, -2, 2);
    CHECK((sigma.map(q) - 2.0 * cand.map(q)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("constant fields on the quadratic constraint are solutions") {
  SystemBundle ah = get_system("appel_hamel");
  HJCandidate cand;
  cand.kind = HJCandidate::Kind::vector_field;
  cand.label = "steady slide";
  cand.map = SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    (void)z;
    return DVec<T>{T(0.8), T(0.0), T(0.8)};
  });
  GridSpec g{ah.box_lo, ah.box_hi, 40, 0};
  auto grid = halton_grid(g);
  CHECK(check_in_N(cand, ah.cs, grid).pass);
  CHECK(check_nonlinear_pullback(cand, *ah.sys, ah.cs, grid).pass);
  CHECK(check_hj_condition(cand, *ah.sys, ah.cs, grid, true).pass);
  CHECK(check_related(cand, *ah.sys, ah.cs, grid).pass);

  /* Scaling the vertical component off the cone breaks membership. */
  HJCandidate off;
  off.kind = HJCandidate::Kind::vector_field;
  off.label = "off cone";
  off.map = SmoothMap::make(3, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    (void)z;
    return DVec<T>{T(0.8), T(0.0), T(0.6)};
  });
  CHECK_FALSE(check_in_N(off, ah.cs, grid).pass);
}

TEST_CASE("forced equation on the reduced carriage picks the minus sign") {
  SystemBundle car = get_system("carriage");
  ReducedSystem red = chaplygin_reduce(*car.sys, car.cs, *car.action);
  HJCandidate xbar1 = build_candidate(car, "xbar1", {});
  GridSpec g{car.qbar_lo, car.qbar_hi, 50, 0};
  auto grid = halton_grid(g);
  CheckReport minus =
      check_forced_hj(xbar1, red.base, red.gyro, grid, HJSign::minus);
  CheckReport plus =
      check_forced_hj(xbar1, red.base, red.gyro, grid, HJSign::plus);
  CHECK(minus.pass);
  CHECK_FALSE(plus.pass);
  CHECK(plus.max_residual > 1e-3);
}

TEST_CASE("grid spec description is stable") {
  GridSpec g = fp_grid(25, 3);
  CHECK(g.describe() == fp_grid(25, 3).describe());
  CHECK(g.describe() != fp_grid(26, 3).describe());
}
