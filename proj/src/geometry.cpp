#include "harnack/geometry.hpp"

#include <cmath>

namespace harnack {

CurvatureJet curvature_from_metric_jets(const TaylorMatrix& gT, int n) {
  const JetBasis& b = *gT[0].b;
  auto G = [&](int i, int j) -> const TaylorScalar& { return gT[static_cast<size_t>(i) * n + j]; };

  TaylorMatrix ginvT = taylor_matrix_inverse(gT, n);
  auto Gi = [&](int i, int j) -> const TaylorScalar& {
    return ginvT[static_cast<size_t>(i) * n + j];
  };

  // dg[i][j][k] = d_k g_ij
  std::vector<TaylorScalar> dg(static_cast<size_t>(n) * n * n);
  auto DG = [&](int i, int j, int k) -> TaylorScalar& {
    return dg[(static_cast<size_t>(i) * n + j) * n + k];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) DG(i, j, k) = G(i, j).deriv(k);

  // Gam^k_ij = (1/2) g^kl (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<TaylorScalar> gam(static_cast<size_t>(n) * n * n);
  auto GAM = [&](int k, int i, int j) -> TaylorScalar& {
    return gam[(static_cast<size_t>(k) * n + i) * n + j];
  };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        TaylorScalar acc(b);
        for (int l = 0; l < n; ++l) acc += Gi(k, l) * (DG(j, l, i) + DG(i, l, j) - DG(i, j, l));
        GAM(k, i, j) = acc * 0.5;
      }

  // R_ijkl = g_lm ( d_j Gam^m_ik - d_i Gam^m_jk + Gam^m_ja Gam^a_ik - Gam^m_ia Gam^a_jk )
  // Only the jets of Ric are consumed below, so R itself keeps point values.
  std::vector<TaylorScalar> rm(static_cast<size_t>(n) * n * n * n);
  auto RM = [&](int i, int j, int k, int l) -> TaylorScalar& {
    return rm[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  };
  std::vector<TaylorScalar> dgam(static_cast<size_t>(n) * n * n * n);  // (m,i,k,dir)
  auto DGAM = [&](int m, int i, int k, int dir) -> TaylorScalar& {
    return dgam[((static_cast<size_t>(m) * n + i) * n + k) * n + dir];
  };
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int dir = 0; dir < n; ++dir) DGAM(m, i, k, dir) = GAM(m, i, k).deriv(dir);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          TaylorScalar acc(b);
          for (int m = 0; m < n; ++m) {
            TaylorScalar term = DGAM(m, i, k, j) - DGAM(m, j, k, i);
            for (int a = 0; a < n; ++a)
              term += GAM(m, j, a) * GAM(a, i, k) - GAM(m, i, a) * GAM(a, j, k);
            acc += G(l, m) * term;
          }
          RM(i, j, k, l) = acc;
        }

  std::vector<TaylorScalar> ricT(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      TaylorScalar acc(b);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) acc += Gi(i, k) * RM(i, j, k, l);
      ricT[static_cast<size_t>(j) * n + l] = acc;
    }
  TaylorScalar scalT(b);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) scalT += Gi(j, l) * ricT[static_cast<size_t>(j) * n + l];

  CurvatureJet out;
  out.n = n;
  out.g.resize(n, n);
  out.g_inv.resize(n, n);
  out.gamma = Array3(n);
  out.dgamma = Array4(n);
  out.riem = AlgCurvTensor(n);
  out.ric.resize(n, n);
  out.dric = Array3(n);
  out.ddric = Array4(n);
  out.dscal.resize(n);
  out.ddscal.resize(n, n);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.g(i, j) = G(i, j).val();
      out.g_inv(i, j) = Gi(i, j).val();
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.gamma(k, i, j) = GAM(k, i, j).val();
        Eigen::VectorXd gr = GAM(k, i, j).grad();
        for (int l = 0; l < n; ++l) out.dgamma(l, k, i, j) = gr[l];
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.riem(i, j, k, l) = RM(i, j, k, l).val();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const TaylorScalar& r = ricT[static_cast<size_t>(i) * n + j];
      out.ric(i, j) = r.val();
      Eigen::VectorXd gr = r.grad();
      Eigen::MatrixXd h = r.hess();
      for (int k = 0; k < n; ++k) {
        out.dric(k, i, j) = gr[k];
        for (int l = 0; l < n; ++l) out.ddric(k, l, i, j) = h(k, l);
      }
    }
  out.scal = scalT.val();
  out.dscal = scalT.grad();
  out.ddscal = scalT.hess();
  return out;
}

bool GeometryProvider::in_domain(const Eigen::VectorXd&, double t) const {
  auto [t0, t1] = time_domain();
  return t > t0 && t < t1;
}

double ricci_flow_residual(const GeometryProvider& p, const Eigen::VectorXd& x, double t) {
  CurvatureJet j = p.jet(x, t);
  Eigen::MatrixXd r = p.dt_metric(x, t) + 2.0 * j.ric;
  return r.cwiseAbs().maxCoeff();
}

}  // namespace harnack
