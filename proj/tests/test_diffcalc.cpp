#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nhmech/smooth.hpp"

using namespace nhmech;

TEST_CASE("dual arithmetic reproduces closed-form derivatives") {
  /* f(x) = x^2 sin x + exp(cos x); f'(x) = 2x sin x + x^2 cos x
     - sin x exp(cos x). */
  auto f = [](auto x) {
    using std::cos;
    using std::exp;
    using std::sin;
    return x * x * sin(x) + exp(cos(x));
  };
  for (double x0 : {0.3, -1.2, 2.7}) {
    D1 x{x0, 1.0};
    D1 y = f(x);
    const double want_val = x0 * x0 * std::sin(x0) + std::exp(std::cos(x0));
    const double want_der = 2 * x0 * std::sin(x0) + x0 * x0 * std::cos(x0) -
                            std::sin(x0) * std::exp(std::cos(x0));
    CHECK(y.a == doctest::Approx(want_val).epsilon(1e-14));
    CHECK(y.b == doctest::Approx(want_der).epsilon(1e-13));
  }
}

TEST_CASE("dual division and sqrt") {
  auto f = [](auto x) {
    using std::sqrt;
    return (x + 1.0) / sqrt(x * x + 1.0);
  };
  const double x0 = 0.8;
  D1 y = f(D1{x0, 1.0});
  const double h = 1e-7;
  const double fd = (f(x0 + h) - f(x0 - h)) / (2 * h);
  CHECK(y.b == doctest::Approx(fd).epsilon(1e-7));
}

static SmoothMap test_map() {
  return SmoothMap::make(2, 3, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::exp;
    using std::sin;
    return DVec<T>{z[0] * z[0] * z[1], sin(z[0] * z[1]), exp(z[0])};
  });
}

TEST_CASE("jacobian matches central differences") {
  SmoothMap f = test_map();
  testutil::Sampler rng;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = rng.cube(2, -1.5, 1.5);
    Eigen::MatrixXd J = f.jacobian(x);
    Eigen::MatrixXd Jfd = testutil::fd_jacobian(f, x);
    CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("hessian of a scalar matches the closed form and differences") {
  SmoothMap g = SmoothMap::make(2, 1, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[0] * z[0] * z[1] * z[1] * z[1]};
  });
  const Eigen::VectorXd x = (Eigen::VectorXd(2) << 1.3, -0.7).finished();
  Eigen::MatrixXd H = g.hessian(x);
  Eigen::MatrixXd want(2, 2);
  want << 2 * std::pow(x[1], 3), 6 * x[0] * x[1] * x[1],
      6 * x[0] * x[1] * x[1], 6 * x[0] * x[0] * x[1];
  CHECK((H - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((H - testutil::fd_hessian(g, x)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("directional derivative equals jacobian contraction") {
  SmoothMap f = test_map();
  const Eigen::VectorXd x = (Eigen::VectorXd(2) << 0.4, 1.1).finished();
  const Eigen::VectorXd d = (Eigen::VectorXd(2) << -0.3, 0.9).finished();
  DVec<double> xs = from_eigen(x);
  DVec<double> ds = from_eigen(d);
  DVec<double> y = dirderiv(f, xs, ds);
  Eigen::VectorXd want = f.jacobian(x) * d;
  for (int i = 0; i < 3; ++i)
    CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-13));
}

TEST_CASE("identity map") {
  SmoothMap id = SmoothMap::identity(3);
  const Eigen::VectorXd x = (Eigen::VectorXd(3) << 1, 2, 3).finished();
  CHECK((id(x) - x).norm() == 0.0);
  CHECK((id.jacobian(x) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("lie bracket of rotation and translation fields") {
  /* X = (-y, x), Y = (1, 0): [X, Y] = DY X - DX Y = (0, -1). */
  SmoothMap X = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{-z[1], z[0]};
  });
  SmoothMap Y = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{T(1.0), T(0.0)};
  });
  testutil::Sampler rng;
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::VectorXd q = rng.cube(2, -2, 2);
    Eigen::VectorXd br = lie_bracket(X, Y, q);
    CHECK(br[0] == doctest::Approx(0.0));
    CHECK(br[1] == doctest::Approx(-1.0));
  }
}

TEST_CASE("bracket_field is itself differentiable") {
  /* Brackets consume one derivative level; the resulting field must still
     expose a correct jacobian (checked against finite differences of the
     bracket evaluations). */
  SmoothMap X = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::sin;
    return DVec<T>{sin(z[1]), z[0] * z[1]};
  });
  SmoothMap Y = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::cos;
    return DVec<T>{z[0] * z[0], cos(z[0])};
  });
  SmoothMap B = bracket_field(X, Y);
  const Eigen::VectorXd q = (Eigen::VectorXd(2) << 0.6, -0.4).finished();
  CHECK((B(q) - lie_bracket(X, Y, q)).norm() < 1e-14);
  Eigen::MatrixXd J = B.jacobian(q);
  Eigen::MatrixXd Jfd = testutil::fd_jacobian(B, q);
  CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("iterated brackets: second-level field still evaluates") {
  SmoothMap X = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    using std::sin;
    return DVec<T>{T(1.0), sin(z[0])};
  });
  SmoothMap Y = SmoothMap::make(2, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{T(0.0), z[0] * z[0] * z[0]};
  });
  SmoothMap B1 = bracket_field(X, Y);
  SmoothMap B2 = bracket_field(X, B1);
  /* [X, Y] = (0, 3x^2), [X, [X, Y]] = (0, 6x). */
  const Eigen::VectorXd q = (Eigen::VectorXd(2) << 0.9, 0.2).finished();
  CHECK(B1(q)[1] == doctest::Approx(3 * 0.81).epsilon(1e-12));
  CHECK(B2(q)[1] == doctest::Approx(6 * 0.9).epsilon(1e-10));
}

TEST_CASE("grad_slice extracts partial gradients") {
  SmoothMap f = SmoothMap::make(4, 1, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    return DVec<T>{z[0] * z[2] + z[1] * z[3] * z[3]};
  });
  const Eigen::VectorXd x = (Eigen::VectorXd(4) << 1, 2, 3, 4).finished();
  Eigen::MatrixXd J = f.jacobian(x);
  DVec<double> xs = from_eigen(x);
  DVec<double> gtail = grad_slice(f, xs, 2, 2);
  CHECK(gtail[0] == doctest::Approx(J(0, 2)));
  CHECK(gtail[1] == doctest::Approx(J(0, 3)));
}

TEST_CASE("linsolve differentiates through the solve") {
  /* x(t) solves A(t) x = b(t) with A = [[2+t, 1], [1, 3]], b = (1, t).
     Compare the dual-number derivative with finite differences. */
  SmoothMap sol = SmoothMap::make(1, 2, [](const auto& z) {
    using T = std::decay_t<decltype(z[0])>;
    DVec<T> A{z[0] + 2.0, T(1.0), T(1.0), T(3.0)};
    DVec<T> b{T(1.0), z[0]};
    return linsolve(A, b, 2);
  });
  const Eigen::VectorXd t0 = Eigen::VectorXd::Constant(1, 0.4);
  Eigen::MatrixXd J = sol.jacobian(t0);
  Eigen::MatrixXd Jfd = testutil::fd_jacobian(sol, t0);
  CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-7);
}
