#pragma once

#include "harnack/cone.hpp"
#include "harnack/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <memory>

namespace harnack {

// Euclidean space, g = identity for all t. The total equality fixture.
std::shared_ptr<GeometryProvider> flat_flow(int n);

// Shrinking round sphere in a fixed stereographic chart:
//   g(t) = (r0^2 - 2(n-1)t) * g_round,  kappa(t) = 1 / (r0^2 - 2(n-1)t),
// domain t in (0, r0^2 / (2(n-1))). Everything closed-form.
std::shared_ptr<GeometryProvider> sphere_flow(int n, double r0);

// 2-D steady soliton: g_ij(x,t) = e^{-4t} delta_ij / (1 + e^{-4t}|x|^2),
// the t=0 slice being (dx^2+dy^2)/(1+x^2+y^2) with scal = 4/(1+|x|^2).
// The soliton field is V(x,t) = 2x at every time. Ancient domain.
std::shared_ptr<GeometryProvider> cigar_flow();

// =========================================================================
// Rotationally symmetric numeric flow on S^n
// =========================================================================
//
// Metric ansatz g = phi(x,t)^2 dx^2 + psi(x,t)^2 g_{S^{n-1}} over a fixed
// coordinate interval [0, L] (x is arclength at the initial time, so
// phi(.,0) = 1). Ricci flow reduces to the coupled system
//
//   d/dt psi = psi_ss - (n-2)(1 - psi_s^2)/psi
//   d/dt phi = (n-1)(psi_ss/psi) phi
//
// with psi_s = phi^{-1} d/dx psi. Both fields are evolved: freezing phi
// (or re-parametrizing to arclength every step) would break the fixed-
// coordinate flow equation d/dt g = -2 Ric that all downstream residual
// checks assume. Pole regularity (psi ~ s - c s^3) is handled by fitting c
// from the nearest interior nodes and replacing the 0/0 ratios with their
// series values inside a small patch around each pole.

struct GridFlow {
  int nsphere = 0;              // manifold dimension n
  double L = 0.0;               // coordinate length of the interval
  int ns = 0;                   // nodes per slice, poles included
  std::vector<double> times;
  std::vector<std::vector<double>> psi;  // one slice per time
  std::vector<std::vector<double>> phi;

  double dx() const { return L / (ns - 1); }
};

struct WarpedParams {
  int ns = 101;
  double t_span = 0.05;
  double dt = 0.0;  // 0 = pick 0.25 * dx^2; anything above 0.4 * dx^2 throws
};

// Explicit time stepping of the profile system from psi0 (phi starts at 1).
// Throws on CFL violation or inadmissible initial profile; truncates the
// time range if psi touches zero in the interior (neck pinch).
GridFlow evolve_warped(int n, const std::function<double(double)>& psi0, double L,
                       const WarpedParams& params);

std::shared_ptr<GeometryProvider> warped_flow(const GridFlow& flow);
std::shared_ptr<GeometryProvider> warped_flow(int n, const std::function<double(double)>& psi0,
                                              double L, const WarpedParams& params);

// Snapshot format: header "warped n=<n> L=<L> ns=<ns> nt=<nt> fields=psi,phi",
// a line of times, then per time one line of psi samples and one of phi.
void write_gridflow(std::ostream& os, const GridFlow& flow);
GridFlow read_gridflow(std::istream& is);
void save_gridflow(const std::string& path, const GridFlow& flow);
GridFlow load_gridflow(const std::string& path);

// Closed-form profile curvatures, used to cross-check the generic pipeline:
// radial sectional curvature -psi_ss/psi and spherical (1 - psi_s^2)/psi^2
// at coordinate x, via the same stencils as the provider.
struct WarpedSectional {
  double k_rad = 0.0;
  double k_sph = 0.0;
};
WarpedSectional warped_sectional(const GridFlow& flow, double x, double t);

// Nonnegative isotropic curvature of M x R^2 is a hypothesis, not a
// theorem, for numeric fixtures: sample it. Returns the smallest membership
// minimum of the spatial curvature (zero-padded into R^{n+1}) over an
// interior grid of sample points.
double nic_sample_minimum(const GeometryProvider& p, const std::vector<Eigen::VectorXd>& xs,
                          const std::vector<double>& ts,
                          const MembershipOptions& opts = {});

}  // namespace harnack
