#pragma once

#include <Eigen/Dense>

#include <vector>

namespace harnack {

// =========================================================================
// Truncated multivariate Taylor arithmetic
// =========================================================================
//
// Closed-form metrics enter the pipeline as order-4 jets: every scalar
// carries its Taylor coefficients up to total degree 4 around the working
// point. Sums, products, reciprocals and elementary functions propagate
// the coefficients exactly, so second derivatives of the Ricci tensor (the
// deepest data the space-time package needs) come out at roundoff accuracy
// with no stencils involved.

class JetBasis {
 public:
  JetBasis(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monoms_.size()); }

  const std::vector<int>& monomial(int i) const { return monoms_[i]; }
  // index of the monomial with the given exponents, -1 if degree > order
  int index_of(const std::vector<int>& exps) const;
  // index of monomial(i) * monomial(j), -1 if the product overflows the order
  int prod(int i, int j) const { return prod_[static_cast<size_t>(i) * monoms_.size() + j]; }
  // index of monomial(i) with exponent of variable v reduced by one, -1 if zero
  int lower(int i, int v) const { return lower_[static_cast<size_t>(i) * nvars_ + v]; }

  // process-wide cache, one basis per (nvars, order)
  static const JetBasis& shared(int nvars, int order = 4);

 private:
  int nvars_;
  int order_;
  std::vector<std::vector<int>> monoms_;
  std::vector<int> prod_;
  std::vector<int> lower_;
};

struct TaylorScalar {
  const JetBasis* b = nullptr;
  Eigen::VectorXd c;

  TaylorScalar() = default;
  explicit TaylorScalar(const JetBasis& basis) : b(&basis), c(Eigen::VectorXd::Zero(basis.size())) {}

  static TaylorScalar constant(const JetBasis& basis, double v);
  static TaylorScalar variable(const JetBasis& basis, int i, double x0);

  double val() const { return c[0]; }
  Eigen::VectorXd grad() const;
  Eigen::MatrixXd hess() const;

  // partial derivative with respect to variable i (top-degree terms drop out)
  TaylorScalar deriv(int i) const;

  TaylorScalar operator-() const;
  TaylorScalar& operator+=(const TaylorScalar& o);
  TaylorScalar& operator-=(const TaylorScalar& o);
  TaylorScalar& operator*=(double s);

  friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b2) { return a += b2; }
  friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b2) { return a -= b2; }
  friend TaylorScalar operator*(TaylorScalar a, double s) { return a *= s; }
  friend TaylorScalar operator*(double s, TaylorScalar a) { return a *= s; }
  friend TaylorScalar operator+(TaylorScalar a, double s) { a.c[0] += s; return a; }
  friend TaylorScalar operator+(double s, TaylorScalar a) { a.c[0] += s; return a; }
  friend TaylorScalar operator-(TaylorScalar a, double s) { a.c[0] -= s; return a; }
  friend TaylorScalar operator-(double s, const TaylorScalar& a) { TaylorScalar r = -a; r.c[0] += s; return r; }
  friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b2);

  // composition with a univariate series: f(self) where derivs[k] is the
  // k-th derivative of f at the constant part
  TaylorScalar series(const std::vector<double>& derivs) const;

  // throws std::domain_error when the constant part is zero (or negative
  // where that matters)
  TaylorScalar recip() const;
  TaylorScalar sqrt() const;
  TaylorScalar exp() const;
  TaylorScalar sin() const;
  TaylorScalar cos() const;

  friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b2) { return a * b2.recip(); }
  friend TaylorScalar operator/(TaylorScalar a, double s) { return a *= (1.0 / s); }
  friend TaylorScalar operator/(double s, const TaylorScalar& a) { return a.recip() * s; }
};

// Row-major n x n matrix of jets.
using TaylorMatrix = std::vector<TaylorScalar>;

// Inverse of a jet-valued matrix: invert the constant part numerically,
// then sum the finite Neumann series of the (nilpotent) higher-order rest.
TaylorMatrix taylor_matrix_inverse(const TaylorMatrix& m, int n);

}  // namespace harnack
