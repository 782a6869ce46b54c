#pragma once

#include "harnack/acvt.hpp"
#include "harnack/cone.hpp"

#include <iosfwd>
#include <vector>

namespace harnack {

// =========================================================================
// The reaction ODE dS/dt = Q(S)
// =========================================================================
//
// Quadratic right-hand side, so finite-time blow-up is the norm (constant
// curvature follows the Riccati solution kappa(t) = kappa0 / (1 - 4 kappa0 t)
// in dimension 3). Fixed-step RK4 keeps convergence-order measurements
// clean; the blow-up guard truncates trajectories instead of fighting the
// singularity with ever-smaller steps.

struct IntegratorConfig {
  double step = 1e-3;     // recommended: step * |S0| <= 0.01
  double t_start = 0.0;
  double t_end = 1.0;
  int save_every = 10;    // keep every k-th state (first and last always kept)
  double blowup_guard = 1e4;  // stop once |S| > guard * max(1, |S0|)
  ContractionMetric contraction;   // empty -> identity(dim)
  bool add_time_reaction = false;  // add (2/t) S to the right-hand side
  bool monitor_every_step = false; // save (and run membership) at every step
  MembershipOptions membership;
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<AlgCurvTensor> states;
  std::vector<double> cone_mins;  // membership minimum at each saved state
  bool blew_up = false;
};

// (2/t) S, the linear term of the spatially homogeneous reduction of the
// space-time evolution equation. Throws std::domain_error for t <= 0.
AlgCurvTensor scaled_ode_step_term(const AlgCurvTensor& S, double t);

// Classical RK4 from t_start to t_end with the last step shortened to land
// on t_end exactly. The trajectory ends early (blew_up = true) when the
// guard trips or a component stops being finite; the offending state is not
// recorded. Throws std::invalid_argument when S0 fails validation at 1e-8.
OdeTrajectory integrate_ode(const AlgCurvTensor& S0, const IntegratorConfig& cfg);

// CSV export, columns time,frob_norm,cone_min.
void write_trajectory_csv(std::ostream& os, const OdeTrajectory& traj);

}  // namespace harnack
