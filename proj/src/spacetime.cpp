#include "harnack/spacetime.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace harnack {

namespace {

// Sum over the four slots of T(..., D_dir e_slot, ...), the correction
// subtracted from a plain directional derivative of a (0,4) component array.
AlgCurvTensor slot_correction(const Array3& GT, int dir, const AlgCurvTensor& T) {
  const int N = T.dim();
  AlgCurvTensor out(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double s = 0.0;
          for (int b = 0; b < N; ++b) {
            s += GT(b, dir, i) * T(b, j, k, l);
            s += GT(b, dir, j) * T(i, b, k, l);
            s += GT(b, dir, k) * T(i, j, b, l);
            s += GT(b, dir, l) * T(i, j, k, b);
          }
          out(i, j, k, l) = s;
        }
  return out;
}

Eigen::MatrixXd slot_correction2(const Array3& GT, int dir, const Eigen::MatrixXd& T) {
  const int N = static_cast<int>(T.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
  for (int a = 0; a < N; ++a)
    for (int b2 = 0; b2 < N; ++b2) {
      double s = 0.0;
      for (int m = 0; m < N; ++m) {
        s += GT(m, dir, a) * T(m, b2);
        s += GT(m, dir, b2) * T(a, m);
      }
      out(a, b2) = s;
    }
  return out;
}

void central_stencil(int order, std::vector<int>& offs, std::vector<double>& cofs) {
  switch (order) {
    case 2:
      offs = {-1, 1};
      cofs = {-0.5, 0.5};
      break;
    case 4:
      offs = {-2, -1, 1, 2};
      cofs = {1.0 / 12, -2.0 / 3, 2.0 / 3, -1.0 / 12};
      break;
    case 6:
      offs = {-3, -2, -1, 1, 2, 3};
      cofs = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 3.0 / 4, -3.0 / 20, 1.0 / 60};
      break;
    default:
      throw std::invalid_argument("stencil order must be 2, 4 or 6");
  }
}

double rank2_hnorm(const Eigen::MatrixXd& X, const Eigen::MatrixXd& hinv) {
  return std::sqrt(std::abs((hinv * X * hinv * X.transpose()).trace()));
}

}  // namespace

SpaceTimePoint compute_point(const GeometryProvider& p, const Eigen::VectorXd& x, double t,
                             bool ancient) {
  if (!ancient && t <= 0.0) throw std::domain_error("compute_point: t must be positive");
  if (!p.in_domain(x, t)) throw std::domain_error("compute_point: (x, t) outside provider domain");

  SpaceTimePoint pt;
  pt.jet = p.jet(x, t);
  const CurvatureJet& j = pt.jet;
  const int n = j.n;
  const double c = ancient ? 0.0 : 1.0 / (2.0 * t);

  pt.n = n;
  pt.x = x;
  pt.t = t;
  pt.ancient = ancient;
  pt.g = j.g;
  pt.g_inv = j.g_inv;
  pt.ric = j.ric;
  pt.scal = j.scal;
  pt.dscal = j.dscal;
  pt.R = j.riem;
  pt.gamma = j.gamma;

  // D_k Ric_ij
  Array3 DRic(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        double s = j.dric(k, i, jj);
        for (int m = 0; m < n; ++m)
          s -= j.gamma(m, k, i) * j.ric(m, jj) + j.gamma(m, k, jj) * j.ric(i, m);
        DRic(k, i, jj) = s;
      }

  pt.P = Array3(n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k) pt.P(i, jj, k) = DRic(i, jj, k) - DRic(jj, i, k);

  // D_p D_q Ric_ij: differentiate the first covariant derivative, then
  // correct all three of its slots
  pt.DDRic = Array4(n);
  for (int q = 0; q < n; ++q)
    for (int pp = 0; pp < n; ++pp)
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
          double dpart = j.ddric(pp, q, i, jj);
          for (int m = 0; m < n; ++m) {
            dpart -= j.dgamma(pp, m, q, i) * j.ric(m, jj) + j.gamma(m, q, i) * j.dric(pp, m, jj);
            dpart -= j.dgamma(pp, m, q, jj) * j.ric(i, m) + j.gamma(m, q, jj) * j.dric(pp, i, m);
          }
          double corr = 0.0;
          for (int m = 0; m < n; ++m) {
            corr += j.gamma(m, pp, q) * DRic(m, i, jj);
            corr += j.gamma(m, pp, i) * DRic(q, m, jj);
            corr += j.gamma(m, pp, jj) * DRic(q, i, m);
          }
          pt.DDRic(pp, q, i, jj) = dpart - corr;
        }

  Eigen::MatrixXd LapRic = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      double s = 0.0;
      for (int pp = 0; pp < n; ++pp)
        for (int q = 0; q < n; ++q) s += j.g_inv(pp, q) * pt.DDRic(pp, q, i, jj);
      LapRic(i, jj) = s;
    }

  Eigen::MatrixXd Hscal(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      double s = j.ddscal(i, jj);
      for (int m = 0; m < n; ++m) s -= j.dscal[m] * j.gamma(m, i, jj);
      Hscal(i, jj) = s;
    }

  Eigen::MatrixXd Ricup = j.g_inv * j.ric * j.g_inv;
  Eigen::MatrixXd RR = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += j.riem(i, k, jj, l) * Ricup(k, l);
      RR(i, jj) = 2.0 * s;
    }

  pt.M = LapRic - 0.5 * Hscal + RR - j.ric * j.g_inv * j.ric + c * j.ric;
  pt.lap_scal = (j.g_inv.cwiseProduct(Hscal)).sum();
  pt.dt_scal = pt.lap_scal + 2.0 * (j.g_inv * j.ric * j.g_inv * j.ric).trace();

  const int N = n + 1;
  pt.gamma_tilde = Array3(N);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) pt.gamma_tilde(k, i, jj) = j.gamma(k, i, jj);
  Eigen::MatrixXd mixed = j.g_inv * j.ric;  // (j, i) = Ric_i^j
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      const double val = -(mixed(jj, i) + (i == jj ? c : 0.0));
      pt.gamma_tilde(jj, i, n) = val;
      pt.gamma_tilde(jj, n, i) = val;
    }
  Eigen::VectorXd gradscal = j.g_inv * j.dscal;
  for (int jj = 0; jj < n; ++jj) pt.gamma_tilde(jj, n, n) = -0.5 * gradscal[jj];
  pt.gamma_tilde(n, n, n) = -3.0 * c;

  if (t > 0.0) {
    pt.h = Eigen::MatrixXd::Zero(N, N);
    pt.h.topLeftCorner(n, n) = j.g;
    pt.h(n, n) = 1.0 / (t * t);
    pt.h_inv = Eigen::MatrixXd::Zero(N, N);
    pt.h_inv.topLeftCorner(n, n) = j.g_inv;
    pt.h_inv(n, n) = t * t;
  }
  return pt;
}

AlgCurvTensor assemble_spacetime_S(const SpaceTimePoint& pt) {
  const int n = pt.n;
  const int N = n + 1;
  AlgCurvTensor S(N);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) S(i, jj, k, l) = pt.R(i, jj, k, l);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k) {
        const double v = pt.P(i, jj, k);
        S(i, jj, n, k) = v;
        S(i, jj, k, n) = -v;
        S(n, k, i, jj) = v;
        S(k, n, i, jj) = -v;
      }
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      const double v = pt.M(i, jj);
      S(i, n, jj, n) = v;
      S(i, n, n, jj) = -v;
      S(n, i, jj, n) = -v;
      S(n, i, n, jj) = v;
    }
  ValidationReport rep = validate_acvt(S);
  if (!rep.ok(1e-8))
    throw std::runtime_error("assemble_spacetime_S: symmetry violation " +
                             std::to_string(rep.worst()) + ", upstream sign error likely");
  return S;
}

StencilSpec closed_form_stencil() { return StencilSpec{0.01, 0.0, 6}; }

StencilSpec grid_stencil(double dx) { return StencilSpec{2.0 * dx, 2.5 * dx * dx, 2}; }

EvolutionResidual evolution_residual(const GeometryProvider& p, const Eigen::VectorXd& x,
                                     double t, const StencilSpec& stencil) {
  StencilSpec st = stencil;
  if (st.ht <= 0.0) st.ht = 0.01 * t;
  if (t < 5.0 * st.ht)
    throw std::domain_error("evolution_residual: t below 5*ht, time stencil too coarse there");

  std::vector<int> offs;
  std::vector<double> cofs;
  central_stencil(st.order, offs, cofs);
  const int maxoff = offs.back();

  for (int o : offs)
    if (!p.in_domain(x, t + o * st.ht))
      throw std::domain_error("evolution_residual: time stencil leaves provider domain");
  const int n = p.n();
  for (int dir = 0; dir < n; ++dir)
    for (int sgn : {-1, 1}) {
      Eigen::VectorXd xx = x;
      xx[dir] += sgn * 2 * maxoff * st.hx;
      if (!p.in_domain(xx, t))
        throw std::domain_error("evolution_residual: space stencil leaves provider domain");
    }

  SpaceTimePoint pt0 = compute_point(p, x, t);
  const int N = n + 1;

  auto Sfield = [&](const Eigen::VectorXd& xx, double tt) {
    return assemble_spacetime_S(compute_point(p, xx, tt));
  };

  AlgCurvTensor S0 = Sfield(x, t);

  AlgCurvTensor dSdt(N);
  for (size_t m = 0; m < offs.size(); ++m) dSdt += cofs[m] * Sfield(x, t + offs[m] * st.ht);
  dSdt *= 1.0 / st.ht;
  AlgCurvTensor DtauS = dSdt - slot_correction(pt0.gamma_tilde, n, S0);

  // T_q = covariant x_q-derivative of S as a component field
  auto Tq = [&](const Eigen::VectorXd& xx, int q) {
    AlgCurvTensor d(N);
    for (size_t m = 0; m < offs.size(); ++m) {
      Eigen::VectorXd x2 = xx;
      x2[q] += offs[m] * st.hx;
      d += cofs[m] * Sfield(x2, t);
    }
    d *= 1.0 / st.hx;
    SpaceTimePoint ptx = compute_point(p, xx, t);
    return d - slot_correction(ptx.gamma_tilde, q, assemble_spacetime_S(ptx));
  };

  std::vector<AlgCurvTensor> T0(n);
  for (int q = 0; q < n; ++q) T0[q] = Tq(x, q);

  AlgCurvTensor Lap(N);
  for (int pp = 0; pp < n; ++pp)
    for (int q = 0; q < n; ++q) {
      AlgCurvTensor dT(N);
      for (size_t m = 0; m < offs.size(); ++m) {
        Eigen::VectorXd x2 = x;
        x2[pp] += offs[m] * st.hx;
        dT += cofs[m] * Tq(x2, q);
      }
      dT *= 1.0 / st.hx;
      AlgCurvTensor corr = slot_correction(pt0.gamma_tilde, pp, T0[q]);
      for (int k = 0; k < n; ++k) corr += pt0.gamma(k, pp, q) * T0[k];
      Lap += pt0.g_inv(pp, q) * (dT - corr);
    }

  ContractionMetric C;
  C.w = Eigen::MatrixXd::Zero(N, N);
  C.w.topLeftCorner(n, n) = pt0.g_inv;
  AlgCurvTensor QS = q_map(S0, C);

  EvolutionResidual out;
  out.residual = DtauS - Lap - (2.0 / t) * S0 - QS;
  out.residual_norm = tensor_norm(out.residual, pt0.h_inv);
  out.q_norm = tensor_norm(QS, pt0.h_inv);
  return out;
}

Eigen::MatrixXd hamilton_identity_residual(const GeometryProvider& p, const Eigen::VectorXd& x,
                                           double t) {
  SpaceTimePoint pt = compute_point(p, x, t);
  const int n = pt.n;
  const double c = 1.0 / (2.0 * t);
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      double dp = 0.0;  // D^m P_imj = g^{km} D_k P_imj
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
          dp += pt.g_inv(k, m) * (pt.DDRic(k, i, m, jj) - pt.DDRic(k, m, i, jj));
      double rr = 0.0;  // Ric^{lm} R_iljm
      Eigen::MatrixXd Ricup = pt.g_inv * pt.ric * pt.g_inv;
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) rr += Ricup(l, m) * pt.R(i, l, jj, m);
      out(i, jj) = pt.M(i, jj) + dp - rr - c * pt.ric(i, jj);
    }
  return out;
}

HEvolutionCheck h_evolution_check(const GeometryProvider& p, const Eigen::VectorXd& x, double t,
                                  const Eigen::VectorXd& v, const StencilSpec& stencil) {
  StencilSpec st = stencil;
  if (st.ht <= 0.0) st.ht = 0.01 * t;
  if (t < 5.0 * st.ht) throw std::domain_error("h_evolution_check: t below 5*ht");

  std::vector<int> offs;
  std::vector<double> cofs;
  central_stencil(st.order, offs, cofs);

  SpaceTimePoint pt0 = compute_point(p, x, t);
  const int n = pt0.n;
  const int N = n + 1;

  auto hfield = [&](const Eigen::VectorXd& xx, double tt) {
    CurvatureJet j = p.jet(xx, tt);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
    h.topLeftCorner(n, n) = j.g;
    h(n, n) = 1.0 / (tt * tt);
    return h;
  };

  Eigen::MatrixXd h0 = hfield(x, t);

  Eigen::MatrixXd dhdt = Eigen::MatrixXd::Zero(N, N);
  for (size_t m = 0; m < offs.size(); ++m) dhdt += cofs[m] * hfield(x, t + offs[m] * st.ht);
  dhdt /= st.ht;
  Eigen::MatrixXd Dtau_h = dhdt - slot_correction2(pt0.gamma_tilde, n, h0);

  auto Tq2 = [&](const Eigen::VectorXd& xx, int q) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(N, N);
    for (size_t m = 0; m < offs.size(); ++m) {
      Eigen::VectorXd x2 = xx;
      x2[q] += offs[m] * st.hx;
      d += cofs[m] * hfield(x2, t);
    }
    d /= st.hx;
    SpaceTimePoint ptx = compute_point(p, xx, t);
    return (d - slot_correction2(ptx.gamma_tilde, q, hfield(xx, t))).eval();
  };

  std::vector<Eigen::MatrixXd> T0(n);
  for (int q = 0; q < n; ++q) T0[q] = Tq2(x, q);

  Eigen::MatrixXd Lap = Eigen::MatrixXd::Zero(N, N);
  for (int pp = 0; pp < n; ++pp)
    for (int q = 0; q < n; ++q) {
      Eigen::MatrixXd dT = Eigen::MatrixXd::Zero(N, N);
      for (size_t m = 0; m < offs.size(); ++m) {
        Eigen::VectorXd x2 = x;
        x2[pp] += offs[m] * st.hx;
        dT += cofs[m] * Tq2(x2, q);
      }
      dT /= st.hx;
      Eigen::MatrixXd corr = slot_correction2(pt0.gamma_tilde, pp, T0[q]);
      for (int k = 0; k < n; ++k) corr += pt0.gamma(k, pp, q) * T0[k];
      Lap += pt0.g_inv(pp, q) * (dT - corr);
    }

  Eigen::MatrixXd lhs = Dtau_h - Lap - h0 / t;

  Eigen::MatrixXd Dv = Eigen::MatrixXd::Zero(N, N);
  for (int q = 0; q < n; ++q) Dv += v[q] * T0[q];

  const double ric2 = (pt0.g_inv * pt0.ric * pt0.g_inv * pt0.ric).trace();
  HEvolutionCheck out;
  out.lhs_norm = rank2_hnorm(lhs, pt0.h_inv);
  out.rhs_formula = 2.0 * t * t * ric2 + 2.0 * t * pt0.scal + 0.5 * n;
  out.grad_lhs = rank2_hnorm(Dv, pt0.h_inv);
  out.grad_lhs *= out.grad_lhs;  // the display is for the squared norm
  const double ric_vv = v.dot(pt0.ric * v);
  const double ric2_vv = v.dot(pt0.ric * pt0.g_inv * pt0.ric * v);
  out.grad_rhs = 2.0 * t * t * ric2_vv + 2.0 * t * ric_vv + 0.5 * v.dot(pt0.g * v);
  return out;
}

HarnackReport harnack_form(const SpaceTimePoint& pt, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& w) {
  const int n = pt.n;
  HarnackReport rep;
  rep.v = v;
  rep.w = w;
  rep.ancient = pt.ancient;
  rep.M_term = w.dot(pt.M * w);
  double pterm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k) pterm += pt.P(i, jj, k) * v[i] * w[jj] * w[k];
  rep.P_term = pterm;
  rep.R_term = pt.R.eval(v, w, v, w);
  rep.value = rep.M_term + 2.0 * rep.P_term + rep.R_term;
  return rep;
}

double trace_harnack(const SpaceTimePoint& pt, const Eigen::VectorXd& v) {
  double out = pt.dt_scal + 2.0 * pt.dscal.dot(v) + 2.0 * v.dot(pt.ric * v);
  if (!pt.ancient) out += pt.scal / pt.t;
  return out;
}

namespace {

// M + P(v)-symmetrization + R(v,.,v,.), the quadratic form of w -> harnack_form
Eigen::MatrixXd w_form_matrix(const SpaceTimePoint& pt, const Eigen::VectorXd& v) {
  const int n = pt.n;
  Eigen::MatrixXd Pv = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k) Pv(jj, k) += v[i] * pt.P(i, jj, k);
  Eigen::MatrixXd Rv(n, n);
  for (int jj = 0; jj < n; ++jj)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += pt.R(i, jj, k, l) * v[i] * v[k];
      Rv(jj, l) = s;
    }
  return pt.M + Pv + Pv.transpose() + Rv;
}

}  // namespace

TraceMinReport trace_harnack_min(const SpaceTimePoint& pt) {
  TraceMinReport rep;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pt.ric, pt.g);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lam_max = ev.cwiseAbs().maxCoeff();
  const double floor_ = 1e-12 * std::max(1.0, lam_max);
  if (ev[0] < -floor_) {
    rep.status = TraceMinReport::Status::unbounded_below;
    rep.bad_direction = es.eigenvectors().col(0);
    return rep;
  }
  if (ev[0] <= floor_) {
    rep.status = TraceMinReport::Status::degenerate;
    rep.bad_direction = es.eigenvectors().col(0);
    return rep;
  }
  rep.v_star = pt.ric.ldlt().solve(-0.5 * pt.dscal);
  rep.min = trace_harnack(pt, rep.v_star);
  rep.equality_residual = tensor_norm(Sym2(w_form_matrix(pt, rep.v_star)), pt.g_inv);
  return rep;
}

HarnackMinReport harnack_min(const SpaceTimePoint& pt, int starts, std::uint64_t seed) {
  const int n = pt.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Eigen::VectorXd> v_starts;
  v_starts.push_back(Eigen::VectorXd::Zero(n));
  {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pt.ric, pt.g);
    if (es.eigenvalues()[0] > 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
      v_starts.push_back(pt.ric.ldlt().solve(-0.5 * pt.dscal));
  }
  while (static_cast<int>(v_starts.size()) < std::max(starts, 2)) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    v_starts.push_back(v);
  }

  HarnackMinReport best;
  best.min = std::numeric_limits<double>::infinity();
  best.starts = static_cast<int>(v_starts.size());

  for (const Eigen::VectorXd& v0 : v_starts) {
    Eigen::VectorXd v = v0;
    Eigen::VectorXd w;
    double value = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int iter = 0; iter < 80 && stall < 3; ++iter) {
      // w-step: minimal generalized eigenvector of the quadratic form in w
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(w_form_matrix(pt, v), pt.g);
      w = es.eigenvectors().col(0);
      // v-step: stationarity R(v,w,.,w) grad = -P(.,w,w), pseudo-solved so a
      // singular R_w (flat directions) falls back to minimum-norm v
      Eigen::MatrixXd Rw(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int jj = 0; jj < n; ++jj)
            for (int l = 0; l < n; ++l) s += pt.R(i, jj, k, l) * w[jj] * w[l];
          Rw(i, k) = s;
        }
      Eigen::VectorXd pw = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
          for (int k = 0; k < n; ++k) pw[i] += pt.P(i, jj, k) * w[jj] * w[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(Rw);
      const double cut = 1e-12 * std::max(1.0, rs.eigenvalues().cwiseAbs().maxCoeff());
      Eigen::VectorXd vn = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < n; ++k)
        if (rs.eigenvalues()[k] > cut)
          vn += (rs.eigenvectors().col(k).dot(-pw) / rs.eigenvalues()[k]) * rs.eigenvectors().col(k);
      v = vn;

      const double now = harnack_form(pt, v, w).value;
      if (value - now <= 1e-13 * (1.0 + std::abs(value)))
        ++stall;
      else
        stall = 0;
      value = now;
    }
    if (value < best.min) {
      best.min = value;
      best.v = v;
      best.w = w;
    }
  }
  return best;
}

SolitonReport soliton_detect(const GeometryProvider& p, double t0,
                             const std::vector<Eigen::VectorXd>& samples, bool expanding,
                             double fd_step, double tol) {
  const int n = p.n();
  const double c = expanding ? 1.0 / (2.0 * t0) : 0.0;
  if (expanding && t0 <= 0.0) throw std::domain_error("soliton_detect: expanding mode needs t0 > 0");

  auto V_at = [&](const Eigen::VectorXd& xx) {
    CurvatureJet j = p.jet(xx, t0);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(j.ric, j.g);
    if (es.eigenvalues()[0] <= 0.0) {
      std::string where = "(";
      for (int i = 0; i < n; ++i) where += shortest_double(xx[i]) + (i + 1 < n ? "," : ")");
      throw std::domain_error("soliton_detect: Ric not positive definite at sample " + where);
    }
    return Eigen::VectorXd(j.ric.ldlt().solve(-0.5 * j.dscal));
  };

  SolitonReport rep;
  rep.expanding = expanding;
  rep.tol = tol;

  for (const Eigen::VectorXd& x : samples) {
    CurvatureJet j = p.jet(x, t0);
    Eigen::VectorXd V0 = V_at(x);
    rep.points.push_back(x);
    rep.V.push_back(V0);

    Eigen::MatrixXd DV(n, n);  // (i, j) = D_i V^j
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += fd_step;
      xm[i] -= fd_step;
      Eigen::VectorXd dV = (V_at(xp) - V_at(xm)) / (2.0 * fd_step);
      for (int jj = 0; jj < n; ++jj) {
        double corr = 0.0;
        for (int a = 0; a < n; ++a) corr += j.gamma(jj, i, a) * V0[a];
        DV(i, jj) = dV[jj] + corr;
      }
    }
    Eigen::MatrixXd mixed = j.g_inv * j.ric;  // (j, i) = Ric_i^j
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) A(i, jj) = DV(i, jj) - mixed(jj, i) - (i == jj ? c : 0.0);
    // invariant Frobenius norm of the (1,1) tensor A_i^j
    const double norm2 = (A.transpose() * j.g_inv * A * j.g).trace();
    rep.residual_norm = std::max(rep.residual_norm, std::sqrt(std::abs(norm2)));
  }
  rep.is_soliton = rep.residual_norm <= tol;
  return rep;
}

Eigen::VectorXd parallel_transport(const GeometryProvider& p, double t0,
                                   const std::vector<Eigen::VectorXd>& path,
                                   const Eigen::VectorXd& v0, bool ancient,
                                   int substeps_per_segment) {
  if (path.size() < 2) return v0;
  const int n = p.n();
  const int N = n + 1;
  if (v0.size() != N)
    throw std::invalid_argument("parallel_transport: v0 must have the space-time dimension");

  Eigen::VectorXd v = v0;
  for (size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const Eigen::VectorXd a = path[seg];
    const Eigen::VectorXd dirv = path[seg + 1] - a;

    auto rhs = [&](double s, const Eigen::VectorXd& vv) {
      SpaceTimePoint pt = compute_point(p, a + s * dirv, t0, ancient);
      Eigen::MatrixXd Gdir = Eigen::MatrixXd::Zero(N, N);
      for (int b = 0; b < N; ++b)
        for (int slot = 0; slot < N; ++slot) {
          double s2 = 0.0;
          for (int i = 0; i < n; ++i) s2 += dirv[i] * pt.gamma_tilde(b, i, slot);
          Gdir(b, slot) = s2;
        }
      return Eigen::VectorXd(-Gdir * vv);
    };

    const double hstep = 1.0 / substeps_per_segment;
    double s = 0.0;
    for (int k = 0; k < substeps_per_segment; ++k) {
      Eigen::VectorXd k1 = rhs(s, v);
      Eigen::VectorXd k2 = rhs(s + hstep / 2, v + (hstep / 2) * k1);
      Eigen::VectorXd k3 = rhs(s + hstep / 2, v + (hstep / 2) * k2);
      Eigen::VectorXd k4 = rhs(s + hstep, v + hstep * k3);
      v += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s += hstep;
    }
  }
  return v;
}

}  // namespace harnack
