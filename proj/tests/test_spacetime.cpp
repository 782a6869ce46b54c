#include "harnack/spacetime.hpp"

#include "harnack/geometries.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace harnack;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

double pinched(double x) {
  const double s = std::sin(x);
  return s * (1.0 - 0.03 * s * s);
}

}  // namespace

TEST_CASE("sphere point data matches the closed forms") {
  auto p = sphere_flow(3, 1.0);
  const Eigen::VectorXd x = vec3(0.3, -0.2, 0.5);
  const double t = 0.1, kappa = 5.0 / 3.0;
  SpaceTimePoint pt = compute_point(*p, x, t);

  CHECK(pt.scal == doctest::Approx(10.0).epsilon(1e-12));
  CHECK((pt.ric - 2.0 * kappa * pt.g).cwiseAbs().maxCoeff() <= 1e-10);

  // D Ric is proportional to D g = 0, so the antisymmetrized part vanishes
  double pmax = 0.0;
  for (double v : pt.P.v) pmax = std::max(pmax, std::abs(v));
  CHECK(pmax <= 1e-9);

  // M = (4 kappa^2 + kappa / t) g on the shrinking round sphere
  const double mcoef = 4.0 * kappa * kappa + kappa / t;  // 250/9
  CHECK((pt.M - mcoef * pt.g).cwiseAbs().maxCoeff() <= 1e-8);

  // dt scal = lap scal + 2 |Ric|^2 = 200/3
  CHECK(pt.dt_scal == doctest::Approx(200.0 / 3.0).epsilon(1e-10));

  // degenerate metric block: h = diag(g, 1/t^2), |h|_h = sqrt(n+1)
  CHECK(pt.h(3, 3) == doctest::Approx(100.0).epsilon(1e-14));
  const double hn = std::sqrt((pt.h_inv * pt.h * pt.h_inv * pt.h).trace());
  CHECK(hn == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compute_point rejects bad times") {
  auto flat = flat_flow(3);
  CHECK_THROWS_AS(compute_point(*flat, Eigen::VectorXd::Zero(3), -1.0), std::domain_error);
  CHECK_THROWS_AS(compute_point(*flat, Eigen::VectorXd::Zero(3), 0.0), std::domain_error);
  auto sph = sphere_flow(3, 1.0);
  CHECK_THROWS_AS(compute_point(*sph, Eigen::VectorXd::Zero(3), 0.3), std::domain_error);
  // ancient mode lifts the t > 0 requirement where the provider allows it
  SpaceTimePoint pt = compute_point(*cigar_flow(), vec2(0.1, 0.2), -2.0, true);
  CHECK(pt.ancient);
}

TEST_CASE("assembled tensor places the blocks with the advertised signs") {
  auto p = sphere_flow(3, 1.0);
  SpaceTimePoint pt = compute_point(*p, vec3(0.2, 0.1, -0.4), 0.1);
  AlgCurvTensor S = assemble_spacetime_S(pt);  // throws if validation fails

  const int n = 3, tau = 3;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(S(i, tau, j, tau) == doctest::Approx(pt.M(i, j)).epsilon(1e-13));
      CHECK(S(tau, i, tau, j) == doctest::Approx(pt.M(i, j)).epsilon(1e-13));
      CHECK(S(i, tau, tau, j) == doctest::Approx(-pt.M(i, j)).epsilon(1e-13));
      for (int k = 0; k < n; ++k) {
        CHECK(S(i, j, tau, k) == doctest::Approx(pt.P(i, j, k)).epsilon(1e-13));
        CHECK(S(i, j, k, tau) == doctest::Approx(-pt.P(i, j, k)).epsilon(1e-13));
        for (int l = 0; l < n; ++l)
          CHECK(S(i, j, k, l) == doctest::Approx(pt.R(i, j, k, l)).epsilon(1e-13));
      }
    }

  ValidationReport rep = validate_acvt(S);
  CHECK(rep.ok(1e-10));
}

TEST_CASE("flat space-time tensor is static and the residual vanishes") {
  auto p = flat_flow(3);
  EvolutionResidual r =
      evolution_residual(*p, vec3(0.3, -0.1, 0.8), 0.5, closed_form_stencil());
  CHECK(r.residual_norm <= 1e-14);
  CHECK(r.q_norm <= 1e-14);
}

TEST_CASE("sphere evolution residual sits at the stencil floor") {
  auto p = sphere_flow(3, 1.0);
  EvolutionResidual r =
      evolution_residual(*p, vec3(0.25, -0.15, 0.4), 0.1, closed_form_stencil());
  CHECK(r.q_norm > 1.0);  // the Q term is genuinely large here
  CHECK(r.residual_norm <= 1e-9 * std::max(1.0, r.q_norm));
}

TEST_CASE("evolution residual on a gridded flow meets its stencil budget") {
  WarpedParams wp;
  wp.ns = 101;
  wp.t_span = 0.035;
  GridFlow f = evolve_warped(3, pinched, M_PI, wp);
  auto p = warped_flow(f);
  const double dx = f.dx();
  StencilSpec st = grid_stencil(dx);
  const double t = 0.02;
  REQUIRE(p->in_domain(vec3(1.2, 0.1, -0.2), t));
  EvolutionResidual r = evolution_residual(*p, vec3(1.2, 0.1, -0.2), t, st);
  CHECK(r.residual_norm <= 50.0 * dx * dx * std::max(1.0, r.q_norm));
}

TEST_CASE("evolution residual refuses times the stencil cannot support") {
  auto p = sphere_flow(3, 1.0);
  StencilSpec coarse{0.01, 0.03, 2};
  CHECK_THROWS_AS(evolution_residual(*p, vec3(0.1, 0.0, 0.0), 0.1, coarse),
                  std::domain_error);
  // time stencil would cross the extinction time
  CHECK_THROWS_AS(
      evolution_residual(*p, vec3(0.1, 0.0, 0.0), 0.246, closed_form_stencil()),
      std::domain_error);
}

TEST_CASE("second order identity holds exactly on point jets") {
  auto sph = sphere_flow(3, 1.0);
  CHECK(hamilton_identity_residual(*sph, vec3(0.3, -0.2, 0.5), 0.1).cwiseAbs().maxCoeff() <=
        1e-10);
  auto cig = cigar_flow();
  CHECK(hamilton_identity_residual(*cig, vec2(0.4, -0.7), 0.3).cwiseAbs().maxCoeff() <= 1e-10);

  WarpedParams wp;
  wp.ns = 81;
  wp.t_span = 0.01;
  GridFlow f = evolve_warped(3, pinched, M_PI, wp);
  auto wrp = warped_flow(f);
  const double t = 0.5 * (f.times[1] + f.times[f.times.size() - 3]);
  CHECK(hamilton_identity_residual(*wrp, vec3(1.3, 0.05, -0.1), t).cwiseAbs().maxCoeff() <=
        1e-8);
}

TEST_CASE("degenerate metric heat identity, flat and sphere anchors") {
  auto flat = flat_flow(3);
  {
    const double t = 0.7;
    StencilSpec st{0.005, 0.005 * t, 6};
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
    v[0] = 1.0;
    HEvolutionCheck hc = h_evolution_check(*flat, vec3(0.1, 0.2, -0.3), t, v, st);
    CHECK(hc.rhs_formula == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::abs(hc.lhs_norm - hc.rhs_formula) <= 1e-9);
    CHECK(hc.grad_rhs == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(hc.grad_lhs - hc.grad_rhs) <= 1e-9);
  }
  {
    auto sph = sphere_flow(3, 1.0);
    const double t = 0.1;
    StencilSpec st{0.005, 0.005 * t, 6};
    Eigen::VectorXd v = vec3(0.3, -0.5, 0.2);
    HEvolutionCheck hc = h_evolution_check(*sph, vec3(0.2, 0.15, -0.3), t, v, st);
    CHECK(hc.rhs_formula == doctest::Approx(25.0 / 6.0).epsilon(1e-12));
    CHECK(std::abs(hc.lhs_norm - hc.rhs_formula) <= 1e-8);
    CHECK(std::abs(hc.grad_lhs - hc.grad_rhs) <= 1e-8 * std::max(1.0, hc.grad_rhs));
  }
}

TEST_CASE("harnack form equals the isotropic form of the assembled tensor") {
  auto p = sphere_flow(3, 1.0);
  SpaceTimePoint pt = compute_point(*p, vec3(0.15, -0.3, 0.45), 0.12);
  AlgCurvTensor S = assemble_spacetime_S(pt);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 8; ++rep) {
    Eigen::VectorXd v = randn(rng, 3), w = randn(rng, 3);
    HarnackReport hr = harnack_form(pt, v, w);
    CHECK(hr.value == doctest::Approx(hr.M_term + 2.0 * hr.P_term + hr.R_term).epsilon(1e-12));

    FourTuple tup = FourTuple::zero(4);
    tup.v1.head(3) = v;
    tup.v1[3] = 1.0;
    tup.v3.head(3) = w;
    const double iso = isotropic_form(S, tup);
    CHECK(hr.value == doctest::Approx(iso).epsilon(1e-10));
  }
}

TEST_CASE("trace is twice the orthonormal sum of the form") {
  auto p = sphere_flow(3, 1.0);
  SpaceTimePoint pt = compute_point(*p, vec3(0.3, 0.05, -0.25), 0.08);
  std::mt19937_64 rng(11);
  Eigen::VectorXd v = randn(rng, 3);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pt.g);
  Eigen::MatrixXd B = es.operatorInverseSqrt();  // columns are g-orthonormal
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) sum += harnack_form(pt, v, B.col(a)).value;
  CHECK(trace_harnack(pt, v) == doctest::Approx(2.0 * sum).epsilon(1e-11));
}

TEST_CASE("trace minimum on the shrinking sphere") {
  auto p = sphere_flow(3, 1.0);
  SpaceTimePoint pt = compute_point(*p, vec3(0.25, -0.1, 0.3), 0.1);
  TraceMinReport tm = trace_harnack_min(pt);
  REQUIRE(tm.status == TraceMinReport::Status::ok);
  CHECK(tm.min == doctest::Approx(500.0 / 3.0).epsilon(1e-8));
  CHECK(tm.v_star.norm() <= 1e-8);
  // the round sphere is not a gradient soliton: the matrix form cannot vanish
  CHECK(tm.equality_residual > 1.0);
  // and the reported v_star really is the minimizer
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep)
    CHECK(trace_harnack(pt, tm.v_star + 0.3 * randn(rng, 3)) >= tm.min - 1e-9);
}

TEST_CASE("flat trace minimum is degenerate") {
  auto p = flat_flow(3);
  SpaceTimePoint pt = compute_point(*p, vec3(0.0, 0.0, 0.0), 1.0);
  TraceMinReport tm = trace_harnack_min(pt);
  CHECK(tm.status == TraceMinReport::Status::degenerate);
  CHECK(tm.bad_direction.size() == 3);
}

TEST_CASE("full minimization on the sphere finds the flat v direction") {
  auto p = sphere_flow(3, 1.0);
  SpaceTimePoint pt = compute_point(*p, vec3(0.2, -0.3, 0.1), 0.1);
  HarnackMinReport hm = harnack_min(pt, 8, 0x5eed);
  // minimum of M(w,w) + R(v,w,v,w) over unit w is the M coefficient, at v = 0
  CHECK(hm.min == doctest::Approx(250.0 / 9.0).epsilon(1e-8));
  CHECK(hm.min >= 0.0);
  CHECK(harnack_form(pt, hm.v, hm.w).value == doctest::Approx(hm.min).epsilon(1e-10));
}

TEST_CASE("steady soliton field detected on the cigar") {
  auto p = cigar_flow();
  std::vector<Eigen::VectorXd> samples = {vec2(0.3, 0.1), vec2(-0.5, 0.4), vec2(1.0, -0.2)};
  SolitonReport rep = soliton_detect(*p, 0.0, samples, false);
  CHECK(rep.is_soliton);
  CHECK(rep.residual_norm <= 1e-6);
  REQUIRE(rep.V.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    CHECK((rep.V[i] - 2.0 * samples[i]).norm() <= 1e-7);
}

TEST_CASE("shrinking sphere is not an expanding soliton, with the exact defect") {
  auto p = sphere_flow(3, 1.0);
  std::vector<Eigen::VectorXd> samples = {vec3(0.2, 0.1, -0.3), vec3(-0.4, 0.25, 0.05)};
  const double t0 = 0.1;
  SolitonReport rep = soliton_detect(*p, t0, samples, true);
  CHECK(!rep.is_soliton);
  // V = 0, so the defect is |Ric/g + c| times sqrt(n) pointwise
  const double kappa = 5.0 / 3.0;
  const double want = std::abs(2.0 * kappa + 1.0 / (2.0 * t0)) * std::sqrt(3.0);
  CHECK(rep.residual_norm == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("soliton detection requires positive Ricci") {
  auto p = flat_flow(3);
  std::vector<Eigen::VectorXd> samples = {vec3(0.0, 0.0, 0.0)};
  CHECK_THROWS_AS(soliton_detect(*p, 1.0, samples, false), std::domain_error);
}

TEST_CASE("flat transport tilts the time vector into the travel direction") {
  auto p = flat_flow(3);
  const double t0 = 0.5;
  Eigen::VectorXd a = vec3(0.0, 0.0, 0.0), b = vec3(0.8, 0.0, 0.0);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(4);
  v0[3] = 1.0;
  Eigen::VectorXd out = parallel_transport(*p, t0, {a, b}, v0);
  Eigen::VectorXd want = v0;
  want[0] = 0.8 / (2.0 * t0);
  CHECK((out - want).cwiseAbs().maxCoeff() <= 1e-12);

  // returning along the reverse path undoes the tilt
  Eigen::VectorXd back = parallel_transport(*p, t0, {b, a}, out);
  CHECK((back - v0).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(parallel_transport(*p, t0, {a, b}, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("ancient transport keeps the time component frozen") {
  auto p = cigar_flow();
  Eigen::VectorXd v0(3);
  v0 << 0.4, -0.2, 0.7;
  std::vector<Eigen::VectorXd> path = {vec2(0.0, 0.0), vec2(0.5, 0.3), vec2(0.2, 0.9)};
  Eigen::VectorXd out = parallel_transport(*p, -1.0, path, v0, true);
  CHECK(out[2] == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("cigar attains trace equality in ancient mode") {
  auto p = cigar_flow();
  for (const auto& x : {vec2(0.3, -0.2), vec2(0.9, 0.4)}) {
    SpaceTimePoint pt = compute_point(*p, x, -0.7, true);
    TraceMinReport tm = trace_harnack_min(pt);
    REQUIRE(tm.status == TraceMinReport::Status::ok);
    CHECK(std::abs(tm.min) <= 1e-8);
    // equality of the trace at v* forces the matrix form itself to vanish
    CHECK(tm.equality_residual <= 1e-6);
  }
}
