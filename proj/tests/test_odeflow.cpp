#include "harnack/odeflow.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace harnack;

namespace {

AlgCurvTensor constant_curvature3(double kappa) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  return kappa * 0.5 * kulkarni_nomizu(id, id);
}

}  // namespace

TEST_CASE("zero initial data stays zero") {
  IntegratorConfig cfg;
  cfg.t_end = 0.2;
  OdeTrajectory traj = integrate_ode(AlgCurvTensor(3), cfg);
  CHECK_FALSE(traj.blew_up);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.2).epsilon(1e-12));
  for (const AlgCurvTensor& S : traj.states) CHECK(frob_norm(S) == 0.0);
  for (double m : traj.cone_mins) CHECK(m == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant curvature follows the scalar riccati solution") {
  AlgCurvTensor S0 = constant_curvature3(1.0);
  IntegratorConfig cfg;
  cfg.step = 0.01 / frob_norm(S0);
  cfg.t_end = 0.1;
  OdeTrajectory traj = integrate_ode(S0, cfg);
  CHECK_FALSE(traj.blew_up);
  const double got = traj.states.back()(0, 1, 0, 1);
  CHECK(std::abs(got - 1.0 / (1.0 - 0.4)) <= 1e-6);

  // the full tensor stays a constant-curvature tensor
  AlgCurvTensor diff = traj.states.back() - got * constant_curvature3(1.0);
  CHECK(frob_norm(diff) <= 1e-9 * frob_norm(traj.states.back()));
}

TEST_CASE("rk4 error drops sixteenfold under step halving") {
  AlgCurvTensor S0 = constant_curvature3(1.0);
  auto err = [&](double step) {
    IntegratorConfig cfg;
    cfg.step = step;
    cfg.t_end = 0.1;
    cfg.save_every = 1 << 30;
    return std::abs(integrate_ode(S0, cfg).states.back()(0, 1, 0, 1) - 1.0 / 0.6);
  };
  const double ratio = err(4e-3) / err(2e-3);
  CHECK(ratio > 16.0 * 0.7);
  CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("blow-up guard truncates instead of overflowing") {
  AlgCurvTensor S0 = constant_curvature3(1.0);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 1.0;  // riccati blow-up at t = 0.25 is inside the range
  cfg.blowup_guard = 1e3;
  OdeTrajectory traj = integrate_ode(S0, cfg);
  CHECK(traj.blew_up);
  CHECK(traj.times.back() < 0.26);
  for (const AlgCurvTensor& S : traj.states)
    CHECK(frob_norm(S) <= 1.1 * 1e3 * std::max(1.0, frob_norm(S0)));
}

TEST_CASE("trajectories preserve the curvature symmetries") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 4; ++it) {
    AlgCurvTensor S0 = random_cone_tensor(rng(), 3 + it % 3, 2);
    IntegratorConfig cfg;
    cfg.step = 0.01 / std::max(1.0, frob_norm(S0));
    cfg.t_end = 0.3;
    cfg.membership.starts = 8;
    OdeTrajectory traj = integrate_ode(S0, cfg);
    for (const AlgCurvTensor& S : traj.states) {
      ValidationReport rep = validate_acvt(S);
      CHECK(rep.worst() <= 1e-8 * rep.scale);
    }
    REQUIRE(traj.times.size() == traj.states.size());
    REQUIRE(traj.times.size() == traj.cone_mins.size());
    for (size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
  }
}

TEST_CASE("cone membership along reaction trajectories") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 6; ++it) {
    const int d = 3 + it % 3;
    AlgCurvTensor S0 = random_cone_tensor(rng(), d, 1 + it % 3);
    IntegratorConfig cfg;
    cfg.step = 0.01 / std::max(1.0, frob_norm(S0));
    cfg.t_end = 0.5;
    cfg.membership.starts = 16;
    cfg.membership.seed = rng();
    OdeTrajectory traj = integrate_ode(S0, cfg);
    for (size_t k = 0; k < traj.states.size(); ++k)
      CHECK(traj.cone_mins[k] >= -1e-6 * std::max(1.0, traj.states[k].max_abs()));
  }
}

TEST_CASE("scaled reaction term") {
  AlgCurvTensor S = random_valid_acvt(3, 3);
  AlgCurvTensor twice = scaled_ode_step_term(S, 1.0);
  CHECK(frob_norm(twice - 2.0 * S) == 0.0);
  CHECK(frob_norm(scaled_ode_step_term(AlgCurvTensor(3), 0.5)) == 0.0);
  CHECK_THROWS_AS(scaled_ode_step_term(S, 0.0), std::domain_error);
  CHECK_THROWS_AS(scaled_ode_step_term(S, -1.0), std::domain_error);
}

TEST_CASE("time reaction alone is the t^2 integrating factor") {
  // zero contraction weights kill Q, leaving dS/dt = (2/t) S with the exact
  // solution S(t) = (t/t0)^2 S(t0)
  AlgCurvTensor S0 = random_valid_acvt(9, 3);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_start = 1.0;
  cfg.t_end = 2.0;
  cfg.add_time_reaction = true;
  cfg.contraction.w = Eigen::MatrixXd::Zero(3, 3);
  cfg.save_every = 1 << 30;
  OdeTrajectory traj = integrate_ode(S0, cfg);
  AlgCurvTensor diff = traj.states.back() - 4.0 * S0;
  CHECK(frob_norm(diff) <= 1e-8 * frob_norm(S0));
}

TEST_CASE("invalid initial data is rejected") {
  AlgCurvTensor bad(3);
  bad(0, 1, 0, 1) = 1.0;  // missing all symmetry partners
  CHECK_THROWS_AS(integrate_ode(bad, IntegratorConfig{}), std::invalid_argument);
}

TEST_CASE("csv export has the documented columns") {
  AlgCurvTensor S0 = constant_curvature3(1.0);
  IntegratorConfig cfg;
  cfg.step = 2e-3;
  cfg.t_end = 0.05;
  cfg.membership.starts = 8;
  OdeTrajectory traj = integrate_ode(S0, cfg);
  std::stringstream ss;
  write_trajectory_csv(ss, traj);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "time,frob_norm,cone_min");
  size_t lines = 0;
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) ++lines;
  CHECK(lines == traj.times.size());
}
