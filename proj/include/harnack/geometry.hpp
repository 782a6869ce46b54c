#pragma once

#include "harnack/acvt.hpp"
#include "harnack/taylor.hpp"

#include <memory>
#include <string>
#include <utility>

namespace harnack {

// Small dense value arrays for rank-3 / rank-4 coordinate data.
struct Array3 {
  int n = 0;
  std::vector<double> v;

  Array3() = default;
  explicit Array3(int nn) : n(nn), v(static_cast<size_t>(nn) * nn * nn, 0.0) {}
  double& operator()(int a, int b, int c) { return v[(static_cast<size_t>(a) * n + b) * n + c]; }
  double operator()(int a, int b, int c) const { return v[(static_cast<size_t>(a) * n + b) * n + c]; }
};

struct Array4 {
  int n = 0;
  std::vector<double> v;

  Array4() = default;
  explicit Array4(int nn) : n(nn), v(static_cast<size_t>(nn) * nn * nn * nn, 0.0) {}
  double& operator()(int a, int b, int c, int d) {
    return v[((static_cast<size_t>(a) * n + b) * n + c) * n + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return v[((static_cast<size_t>(a) * n + b) * n + c) * n + d];
  }
};

// =========================================================================
// Pointwise curvature data
// =========================================================================
//
// Everything the space-time package reads off a metric at one (x, t).
// Partial derivatives are plain coordinate derivatives at the working
// point; covariant combinations are assembled downstream. Sign convention:
// R_ijkl = g_lm (d_j Gam^m_ik - d_i Gam^m_jk + Gam Gam - Gam Gam), which
// makes the round sphere positive: Ric_jl = g^ik R_ijkl = (n-1) kappa g_jl.

struct CurvatureJet {
  int n = 0;
  Eigen::MatrixXd g, g_inv;
  Array3 gamma;    // (k,i,j)    = Gam^k_ij
  Array4 dgamma;   // (l,k,i,j)  = d_l Gam^k_ij
  AlgCurvTensor riem;
  Eigen::MatrixXd ric;
  Array3 dric;     // (k,i,j)    = d_k Ric_ij
  Array4 ddric;    // (k,l,i,j)  = d_k d_l Ric_ij
  double scal = 0.0;
  Eigen::VectorXd dscal;
  Eigen::MatrixXd ddscal;
};

// Runs the metric -> curvature pipeline on order-4 jets of g_ij (row-major
// n x n TaylorMatrix over a basis with nvars = n). Exact to roundoff when
// the jets are exact.
CurvatureJet curvature_from_metric_jets(const TaylorMatrix& gT, int n);

// =========================================================================
// GeometryProvider
// =========================================================================
//
// A Ricci flow g(t) presented pointwise. Implementations must satisfy
// d/dt g_ij = -2 Ric_ij on their domain: closed-form ones to roundoff,
// gridded ones to the order of their stencils. That equation is what every
// downstream residual check silently relies on.

class GeometryProvider {
 public:
  virtual ~GeometryProvider() = default;

  virtual int n() const = 0;
  virtual bool closed_form() const = 0;
  virtual std::pair<double, double> time_domain() const = 0;
  virtual bool in_domain(const Eigen::VectorXd& x, double t) const;
  virtual std::string describe() const = 0;

  virtual CurvatureJet jet(const Eigen::VectorXd& x, double t) const = 0;
  // d/dt g_ij at fixed coordinates
  virtual Eigen::MatrixXd dt_metric(const Eigen::VectorXd& x, double t) const = 0;
};

// max |d/dt g_ij + 2 Ric_ij| at (x, t)
double ricci_flow_residual(const GeometryProvider& p, const Eigen::VectorXd& x, double t);

}  // namespace harnack
