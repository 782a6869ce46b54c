#include "harnack/odeflow.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace harnack {

AlgCurvTensor scaled_ode_step_term(const AlgCurvTensor& S, double t) {
  if (t <= 0.0) throw std::domain_error("scaled_ode_step_term: t must be positive");
  return S * (2.0 / t);
}

namespace {

bool all_finite(const AlgCurvTensor& S) {
  for (double v : S.data())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

OdeTrajectory integrate_ode(const AlgCurvTensor& S0, const IntegratorConfig& cfg) {
  if (cfg.step <= 0.0) throw std::invalid_argument("integrate_ode: step must be positive");
  if (!validate_acvt(S0).ok(1e-8))
    throw std::invalid_argument("integrate_ode: S0 fails curvature symmetry validation");

  const int d = S0.dim();
  ContractionMetric C = cfg.contraction;
  if (C.w.rows() != d || C.w.cols() != d) C.w = Eigen::MatrixXd::Identity(d, d);

  auto rhs = [&](const AlgCurvTensor& S, double t) {
    AlgCurvTensor f = q_map(S, C);
    if (cfg.add_time_reaction) f += scaled_ode_step_term(S, t);
    return f;
  };

  OdeTrajectory traj;
  auto save = [&](const AlgCurvTensor& S, double t) {
    traj.times.push_back(t);
    traj.states.push_back(S);
    traj.cone_mins.push_back(cone_membership(S, cfg.membership).min_value);
  };

  const double guard = cfg.blowup_guard * std::max(1.0, frob_norm(S0));
  const int every = std::max(1, cfg.save_every);

  AlgCurvTensor S = S0;
  double t = cfg.t_start;
  save(S, t);

  long step_index = 0;
  while (t < cfg.t_end - 1e-15 * std::max(1.0, std::abs(cfg.t_end))) {
    const double h = std::min(cfg.step, cfg.t_end - t);

    AlgCurvTensor k1 = rhs(S, t);
    AlgCurvTensor k2 = rhs(S + (h / 2.0) * k1, t + h / 2.0);
    AlgCurvTensor k3 = rhs(S + (h / 2.0) * k2, t + h / 2.0);
    AlgCurvTensor k4 = rhs(S + h * k3, t + h);

    AlgCurvTensor next = S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(next) || frob_norm(next) > guard) {
      traj.blew_up = true;
      break;
    }

    S = std::move(next);
    t += h;
    ++step_index;

    const bool last = t >= cfg.t_end - 1e-15 * std::max(1.0, std::abs(cfg.t_end));
    if (cfg.monitor_every_step || last || step_index % every == 0) save(S, t);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const OdeTrajectory& traj) {
  os << "time,frob_norm,cone_min\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    os << shortest_double(traj.times[i]) << ',' << shortest_double(frob_norm(traj.states[i]))
       << ',' << shortest_double(traj.cone_mins[i]) << '\n';
  }
}

}  // namespace harnack
