#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "nhmech/dual.hpp"
#include "nhmech/error.hpp"

namespace nhmech {

template <typename T>
using DVec = std::vector<T>;

/* A smooth map R^arity -> R^coarity given by a single generic evaluator that
   accepts dual-number-valued inputs. Maps built with make() can be evaluated
   with up to four nested dual levels, which supports exact derivatives up to
   fourth order (needed for iterated Lie brackets). Maps derived from the AD
   of another map carry correspondingly fewer levels. */
class SmoothMap {
public:
  using F0 = std::function<DVec<double>(const DVec<double>&)>;
  using F1 = std::function<DVec<D1>(const DVec<D1>&)>;
  using F2 = std::function<DVec<D2>(const DVec<D2>&)>;
  using F3 = std::function<DVec<D3>(const DVec<D3>&)>;
  using F4 = std::function<DVec<D4>(const DVec<D4>&)>;

  SmoothMap() = default;

  template <typename F>
  static SmoothMap make(int arity, int coarity, F f) {
    SmoothMap m;
    m.arity_ = arity;
    m.coarity_ = coarity;
    m.max_level_ = 4;
    m.f0_ = [f](const DVec<double>& x) { return f(x); };
    m.f1_ = [f](const DVec<D1>& x) { return f(x); };
    m.f2_ = [f](const DVec<D2>& x) { return f(x); };
    m.f3_ = [f](const DVec<D3>& x) { return f(x); };
    m.f4_ = [f](const DVec<D4>& x) { return f(x); };
    return m;
  }

  static SmoothMap from_levels(int arity, int coarity, F0 f0, F1 f1 = nullptr,
                               F2 f2 = nullptr, F3 f3 = nullptr) {
    SmoothMap m;
    m.arity_ = arity;
    m.coarity_ = coarity;
    m.f0_ = std::move(f0);
    m.f1_ = std::move(f1);
    m.f2_ = std::move(f2);
    m.f3_ = std::move(f3);
    m.max_level_ = m.f3_ ? 3 : (m.f2_ ? 2 : (m.f1_ ? 1 : 0));
    return m;
  }

  static SmoothMap identity(int n) {
    return make(n, n, [](const auto& x) { return x; });
  }

  bool valid() const { return static_cast<bool>(f0_); }
  int arity() const { return arity_; }
  int coarity() const { return coarity_; }
  int max_level() const { return max_level_; }

  template <typename T>
  DVec<T> eval(const DVec<T>& x) const {
    constexpr int L = DualLevel<T>::value;
    static_assert(L <= 4, "dual nesting too deep");
    if (static_cast<int>(x.size()) != arity_)
      throw DimensionError("SmoothMap: input has size " +
                           std::to_string(x.size()) + ", expected " +
                           std::to_string(arity_));
    if constexpr (L == 0) {
      require(f0_, 0);
      return f0_(x);
    } else if constexpr (L == 1) {
      require(f1_, 1);
      return f1_(x);
    } else if constexpr (L == 2) {
      require(f2_, 2);
      return f2_(x);
    } else if constexpr (L == 3) {
      require(f3_, 3);
      return f3_(x);
    } else {
      require(f4_, 4);
      return f4_(x);
    }
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
  /* Symmetric second-derivative matrix; requires coarity 1. */
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

private:
  template <typename Fn>
  void require(const Fn& f, int level) const {
    if (!f)
      throw UnsupportedError(
          "SmoothMap: derivative level " + std::to_string(level) +
          " not available (map derived from AD supports up to level " +
          std::to_string(max_level_) + ")");
  }

  int arity_ = 0, coarity_ = 0, max_level_ = -1;
  F0 f0_;
  F1 f1_;
  F2 f2_;
  F3 f3_;
  F4 f4_;
};

inline Eigen::VectorXd to_eigen(const DVec<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
}

inline DVec<double> from_eigen(const Eigen::VectorXd& x) {
  return DVec<double>(x.data(), x.data() + x.size());
}

/* Directional derivative Df(x).d computed with one dual-seeded evaluation.
   Works at any level T for which f supports level(T)+1. */
template <typename T>
DVec<T> dirderiv(const SmoothMap& f, const DVec<T>& x, const DVec<T>& d) {
  DVec<Dual<T>> z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = Dual<T>(x[i], d[i]);
  DVec<Dual<T>> out = f.eval(z);
  DVec<T> r(out.size());
  for (size_t i = 0; i < out.size(); ++i) r[i] = out[i].b;
  return r;
}

/* Gradient of a scalar-valued map with respect to inputs [begin, begin+count),
   other inputs held fixed. */
template <typename T>
DVec<T> grad_slice(const SmoothMap& f, const DVec<T>& x, int begin, int count) {
  DVec<T> g(count);
  DVec<Dual<T>> z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = Dual<T>(x[i]);
  for (int j = 0; j < count; ++j) {
    z[begin + j].b = T(1);
    DVec<Dual<T>> out = f.eval(z);
    g[j] = out[0].b;
    z[begin + j].b = T(0);
  }
  return g;
}

template <typename T>
DVec<T> grad(const SmoothMap& f, const DVec<T>& x) {
  return grad_slice(f, x, 0, static_cast<int>(x.size()));
}

/* Jacobian rows at generic dual level: out[i][j] = df_i/dx_j. */
template <typename T>
std::vector<DVec<T>> jac_rows(const SmoothMap& f, const DVec<T>& x) {
  std::vector<DVec<T>> J(f.coarity(), DVec<T>(f.arity()));
  DVec<Dual<T>> z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = Dual<T>(x[i]);
  for (int j = 0; j < f.arity(); ++j) {
    z[j].b = T(1);
    DVec<Dual<T>> out = f.eval(z);
    for (int i = 0; i < f.coarity(); ++i) J[i][j] = out[i].b;
    z[j].b = T(0);
  }
  return J;
}

inline Eigen::VectorXd SmoothMap::operator()(const Eigen::VectorXd& x) const {
  return to_eigen(eval(from_eigen(x)));
}

inline Eigen::MatrixXd SmoothMap::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd J(coarity_, arity_);
  DVec<D1> z(arity_);
  DVec<double> xv = from_eigen(x);
  if (static_cast<int>(xv.size()) != arity_)
    throw DimensionError("jacobian: input dimension mismatch");
  for (int i = 0; i < arity_; ++i) z[i] = D1(xv[i]);
  for (int j = 0; j < arity_; ++j) {
    z[j].b = 1.0;
    DVec<D1> out = eval(z);
    for (int i = 0; i < coarity_; ++i) J(i, j) = out[i].b;
    z[j].b = 0.0;
  }
  return J;
}

inline Eigen::MatrixXd SmoothMap::hessian(const Eigen::VectorXd& x) const {
  if (coarity_ != 1) throw DimensionError("hessian: map must be scalar-valued");
  Eigen::MatrixXd H(arity_, arity_);
  DVec<double> xv = from_eigen(x);
  DVec<D2> z(arity_);
  for (int i = 0; i < arity_; ++i) z[i] = D2(D1(xv[i]));
  for (int j = 0; j < arity_; ++j) {
    z[j].a.b = 1.0; /* inner seed: direction j */
    for (int i = j; i < arity_; ++i) {
      z[i].b.a = 1.0; /* outer seed: direction i */
      DVec<D2> out = eval(z);
      H(i, j) = H(j, i) = out[0].b.b;
      z[i].b.a = 0.0;
    }
    z[j].a.b = 0.0;
  }
  return H;
}

/* Jacobi-Lie bracket [X, Y](q) = DY(q).X(q) - DX(q).Y(q). */
template <typename T>
DVec<T> bracket_eval(const SmoothMap& X, const SmoothMap& Y, const DVec<T>& q) {
  DVec<T> Xq = X.eval(q);
  DVec<T> Yq = Y.eval(q);
  DVec<T> dYX = dirderiv(Y, q, Xq);
  DVec<T> dXY = dirderiv(X, q, Yq);
  DVec<T> r(dYX.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = dYX[i] - dXY[i];
  return r;
}

inline Eigen::VectorXd lie_bracket(const SmoothMap& X, const SmoothMap& Y,
                                   const Eigen::VectorXd& q) {
  if (X.arity() != Y.arity() || X.coarity() != Y.coarity() ||
      X.arity() != X.coarity())
    throw DimensionError("lie_bracket: vector fields must share one chart");
  if (q.size() != X.arity())
    throw DimensionError("lie_bracket: point dimension mismatch");
  return to_eigen(bracket_eval(X, Y, from_eigen(q)));
}

/* The bracket as a field usable in further brackets. Each application costs
   one dual level, so depth is bounded by the nesting budget of the inputs. */
inline SmoothMap bracket_field(const SmoothMap& X, const SmoothMap& Y) {
  int n = X.arity();
  int lv = std::min(X.max_level(), Y.max_level()) - 1;
  SmoothMap::F0 f0;
  SmoothMap::F1 f1;
  SmoothMap::F2 f2;
  SmoothMap::F3 f3;
  if (lv >= 0) f0 = [X, Y](const DVec<double>& q) { return bracket_eval(X, Y, q); };
  if (lv >= 1) f1 = [X, Y](const DVec<D1>& q) { return bracket_eval(X, Y, q); };
  if (lv >= 2) f2 = [X, Y](const DVec<D2>& q) { return bracket_eval(X, Y, q); };
  if (lv >= 3) f3 = [X, Y](const DVec<D3>& q) { return bracket_eval(X, Y, q); };
  if (!f0)
    throw UnsupportedError("bracket_field: derivative budget exhausted (deepen "
                           "the base fields' nesting)");
  return SmoothMap::from_levels(n, n, std::move(f0), std::move(f1),
                                std::move(f2), std::move(f3));
}

/* Dense linear solve A x = b with partial pivoting, generic over the dual
   scalar so AD flows through matrix inverses (used for M(q)^-1 on the
   Hamiltonian side). A is row-major n x n, consumed in place. */
template <typename T>
DVec<T> linsolve(DVec<T> A, DVec<T> b, int n) {
  using std::abs;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = abs(scalar_value(A[c * n + c]));
    for (int r = c + 1; r < n; ++r) {
      double cand = abs(scalar_value(A[r * n + c]));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best < 1e-14)
      throw RegularityError("linsolve: pivot " + std::to_string(best) +
                            " below threshold, matrix numerically singular");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(A[c * n + j], A[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      T m = A[r * n + c] / A[c * n + c];
      for (int j = c; j < n; ++j) A[r * n + j] -= m * A[c * n + j];
      b[r] -= m * b[c];
    }
  }
  DVec<T> x(n);
  for (int c = n - 1; c >= 0; --c) {
    T s = b[c];
    for (int j = c + 1; j < n; ++j) s -= A[c * n + j] * x[j];
    x[c] = s / A[c * n + c];
  }
  return x;
}

}  // namespace nhmech
