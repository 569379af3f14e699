#pragma once

/* Shared utilities for the unit tests: finite-difference oracles and a
 * deterministic sampler for admissible states. Finite differences are the
 * independent cross-check for every derivative the library computes with
 * dual numbers. */

#include <random>

#include "nhmech/constraints.hpp"
#include "nhmech/dynamics.hpp"
#include "nhmech/systems.hpp"

namespace testutil {

inline Eigen::MatrixXd fd_jacobian(const nhmech::SmoothMap& f,
                                   const Eigen::VectorXd& x,
                                   double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

/* Central-difference Hessian of a scalar-valued map. */
inline Eigen::MatrixXd fd_hessian(const nhmech::SmoothMap& f,
                                  const Eigen::VectorXd& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  auto val = [&](const Eigen::VectorXd& y) { return f(y)[0]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h; xpp[j] += h;
      xpm[i] += h; xpm[j] -= h;
      xmp[i] -= h; xmp[j] += h;
      xmm[i] -= h; xmm[j] -= h;
      H(i, j) = (val(xpp) - val(xpm) - val(xmp) + val(xmm)) / (4.0 * h * h);
    }
  return H;
}

/* Deterministic uniform draws in [lo, hi]. */
class Sampler {
public:
  explicit Sampler(unsigned seed = 20240817) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  Eigen::VectorXd vector(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    for (int i = 0; i < v.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }

  Eigen::VectorXd cube(int n, double lo, double hi) {
    return vector(Eigen::VectorXd::Constant(n, lo),
                  Eigen::VectorXd::Constant(n, hi));
  }

  /* Random admissible state of a bundle: configuration drawn from the
     bundle box, raw velocity from [-1,1]^n, then projected onto the
     constraint manifold. */
  nhmech::State admissible_state(const nhmech::SystemBundle& b) {
    const int n = static_cast<int>(b.state0.q.size());
    nhmech::State s{vector(b.box_lo, b.box_hi), cube(n, -1.0, 1.0)};
    if (!b.sys) return s;
    return nhmech::project_velocity(*b.sys, b.cs, s);
  }

private:
  std::mt19937 gen_;
};

}  // namespace testutil
