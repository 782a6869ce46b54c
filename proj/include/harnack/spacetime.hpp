#pragma once

#include "harnack/acvt.hpp"
#include "harnack/cone.hpp"
#include "harnack/geometry.hpp"

#include <cstdint>
#include <vector>

namespace harnack {

// =========================================================================
// Space-time package
// =========================================================================
//
// Everything here lives on the product of the manifold with the time axis,
// index set {0..n-1, tau = n}. The connection in that index set:
//
//   D_i e_j   = Gamma^k_ij e_k                       (spatial)
//   D_i e_tau = D_tau e_i = -(Ric_i^j + c delta) e_j
//   D_tau e_tau = -(1/2) grad scal - 3c e_tau
//
// with c = 1/(2t), or 0 throughout in ancient mode. The degenerate metric
// h = diag(g, 1/t^2) is used for norms only; index raising always goes
// through the spatial g^{-1}.

struct SpaceTimePoint {
  int n = 0;
  Eigen::VectorXd x;
  double t = 0.0;
  bool ancient = false;

  Eigen::MatrixXd g, g_inv;
  Eigen::MatrixXd ric;
  double scal = 0.0;
  Eigen::VectorXd dscal;     // coordinate partials of scal
  double lap_scal = 0.0;     // g^{pq} D_p D_q scal
  double dt_scal = 0.0;      // lap_scal + 2|Ric|^2, the flow value of d/dt scal

  AlgCurvTensor R;           // spatial curvature, dim n
  Array3 P;                  // (i,j,k) = D_i Ric_jk - D_j Ric_ik
  Eigen::MatrixXd M;         // Lap Ric - (1/2) D^2 scal + 2 R.Ric - Ric.Ric + c Ric
  Array4 DDRic;              // (k,l,i,j) = D_k D_l Ric_ij

  Array3 gamma;              // spatial Christoffels (k,i,j)
  Array3 gamma_tilde;        // (b, direction, slot), indices over {0..n-1, tau}
  Eigen::MatrixXd h, h_inv;  // set when t > 0

  CurvatureJet jet;
};

SpaceTimePoint compute_point(const GeometryProvider& p, const Eigen::VectorXd& x, double t,
                             bool ancient = false);

// Curvature tensor on the (n+1)-dimensional index set: spatial block R,
// mixed block P, time-time block M (each with its four sign placements).
// Throws when the result fails validation at 1e-8, which signals an
// upstream sign error rather than roundoff.
AlgCurvTensor assemble_spacetime_S(const SpaceTimePoint& pt);

// =========================================================================
// Residual checks
// =========================================================================

struct StencilSpec {
  double hx = 0.01;
  double ht = 0.0;  // 0 = 0.01 * t
  int order = 6;    // central stencil order: 2, 4 or 6
};

// defaults that push closed-form providers to the roundoff floor
StencilSpec closed_form_stencil();
// second-order stencils tied to a grid spacing
StencilSpec grid_stencil(double dx);

struct EvolutionResidual {
  AlgCurvTensor residual;  // D_tau S - Lap S - (2/t) S - Q(S), dim n+1
  double residual_norm;    // h-norm
  double q_norm;           // h-norm of the Q term, the natural scale
};

// Time and space derivatives of the assembled S by central differences with
// connection corrections; Q contracts with diag(g^{-1}, 0). Refuses t < 5 ht
// (the 1/t coefficients amplify stencil noise) and stencil points that leave
// the provider's domain.
EvolutionResidual evolution_residual(const GeometryProvider& p, const Eigen::VectorXd& x,
                                     double t, const StencilSpec& stencil);

// M_ij + D^m P_imj - Ric^{lm} R_iljm - c Ric_ij, evaluated exactly from the
// point jet (no stencils): zero up to the provider's derivative accuracy.
Eigen::MatrixXd hamilton_identity_residual(const GeometryProvider& p, const Eigen::VectorXd& x,
                                           double t);

struct HEvolutionCheck {
  double lhs_norm = 0.0;     // | D_tau h - Lap h - (1/t) h |_h from differences
  double rhs_formula = 0.0;  // 2 t^2 |Ric|^2 + 2 t scal + n/2
  double grad_lhs = 0.0;     // | D_v h |_h^2 from differences
  double grad_rhs = 0.0;     // 2 t^2 Ric^2(v,v) + 2 t Ric(v,v) + g(v,v)/2
};

HEvolutionCheck h_evolution_check(const GeometryProvider& p, const Eigen::VectorXd& x, double t,
                                  const Eigen::VectorXd& v, const StencilSpec& stencil);

// =========================================================================
// Harnack expressions
// =========================================================================

struct HarnackReport {
  double value = 0.0;  // = M_term + 2 P_term + R_term
  Eigen::VectorXd v, w;
  bool ancient = false;
  double M_term = 0.0, P_term = 0.0, R_term = 0.0;
};

// M(w,w) + 2 P(v,w,w) + R(v,w,v,w); equals the isotropic form of the
// assembled S at the tuple (e_tau + v, 0, w, 0).
HarnackReport harnack_form(const SpaceTimePoint& pt, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& w);

// d/dt scal + scal/t + 2 <dscal, v> + 2 Ric(v,v), using the flow identity
// d/dt scal = Lap scal + 2 |Ric|^2; the scal/t term drops in ancient mode.
// Equals twice the sum of harnack_form over a g-orthonormal basis of w.
double trace_harnack(const SpaceTimePoint& pt, const Eigen::VectorXd& v);

struct TraceMinReport {
  enum class Status { ok, degenerate, unbounded_below };
  Status status = Status::ok;
  double min = 0.0;
  Eigen::VectorXd v_star;            // -(1/2) Ric^{-1} grad scal
  Eigen::VectorXd bad_direction;     // set when status != ok
  double equality_residual = 0.0;    // |M + 2 sym P(v*) + R(v*,.,v*,.)|_g:
                                     // zero iff the form vanishes for all w
};

// Closed-form minimizer over v (quadratic with Hessian 2 Ric). Requires
// Ric positive definite; otherwise reports the offending direction.
TraceMinReport trace_harnack_min(const SpaceTimePoint& pt);

struct HarnackMinReport {
  double min = 0.0;
  Eigen::VectorXd v, w;
  int starts = 0;
};

// Minimize the Harnack form over |w|_g = 1 and unconstrained v by
// alternating a minimal-eigenvector step in w with the stationarity solve
// in v. Best-found over deterministic plus seeded random starts.
HarnackMinReport harnack_min(const SpaceTimePoint& pt, int starts = 8,
                             std::uint64_t seed = 0x5eed);

// =========================================================================
// Solitons and transport
// =========================================================================

struct SolitonReport {
  bool expanding = false;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> V;  // -(1/2) Ric^{-1} grad scal at each point
  double residual_norm = 0.0;      // sup_x | D_i V^j - Ric_i^j - c delta |_g
  double tol = 0.0;
  bool is_soliton = false;
};

// V is determined pointwise by d_i scal + 2 Ric_ij V^j = 0; the report says
// whether it satisfies the soliton equation D_i V^j = Ric_i^j + c delta_i^j
// (c = 1/(2t0) in expanding mode, 0 in steady). The covariant derivative of
// V uses central differences of step fd_step plus the Gamma correction.
// Throws std::domain_error when Ric is not positive definite at a sample.
SolitonReport soliton_detect(const GeometryProvider& p, double t0,
                             const std::vector<Eigen::VectorXd>& samples, bool expanding,
                             double fd_step = 1e-4, double tol = 1e-6);

// Transport of the space-time vector v0 (tau component last) along a
// spatial polyline at fixed t0, by RK4 on dv/ds + GammaTilde(gamma') v = 0.
Eigen::VectorXd parallel_transport(const GeometryProvider& p, double t0,
                                   const std::vector<Eigen::VectorXd>& path,
                                   const Eigen::VectorXd& v0, bool ancient = false,
                                   int substeps_per_segment = 64);

}  // namespace harnack
