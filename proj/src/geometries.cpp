#include "harnack/geometries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace harnack {

namespace {

// ---------------------------------------------------------------------------
// Flat
// ---------------------------------------------------------------------------

class FlatProvider final : public GeometryProvider {
 public:
  explicit FlatProvider(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("flat_flow: need n >= 2");
  }

  int n() const override { return n_; }
  bool closed_form() const override { return true; }
  std::pair<double, double> time_domain() const override {
    return {0.0, std::numeric_limits<double>::infinity()};
  }
  std::string describe() const override { return "flat n=" + std::to_string(n_); }

  CurvatureJet jet(const Eigen::VectorXd&, double) const override {
    const JetBasis& b = JetBasis::shared(n_);
    TaylorMatrix gT(static_cast<size_t>(n_) * n_, TaylorScalar(b));
    for (int i = 0; i < n_; ++i) gT[static_cast<size_t>(i) * n_ + i] = TaylorScalar::constant(b, 1.0);
    return curvature_from_metric_jets(gT, n_);
  }

  Eigen::MatrixXd dt_metric(const Eigen::VectorXd&, double) const override {
    return Eigen::MatrixXd::Zero(n_, n_);
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// Shrinking round sphere, stereographic chart
// ---------------------------------------------------------------------------

class SphereProvider final : public GeometryProvider {
 public:
  SphereProvider(int n, double r0) : n_(n), r0_(r0) {
    if (n < 2 || r0 <= 0.0) throw std::invalid_argument("sphere_flow: need n >= 2, r0 > 0");
  }

  int n() const override { return n_; }
  bool closed_form() const override { return true; }
  std::pair<double, double> time_domain() const override {
    return {0.0, r0_ * r0_ / (2.0 * (n_ - 1))};
  }
  std::string describe() const override {
    return "sphere n=" + std::to_string(n_) + " r0=" + shortest_double(r0_);
  }

  CurvatureJet jet(const Eigen::VectorXd& x, double t) const override {
    if (!in_domain(x, t)) throw std::domain_error("sphere_flow: t outside (0, r0^2/(2(n-1)))");
    const double phi = r0_ * r0_ - 2.0 * (n_ - 1) * t;
    const JetBasis& b = JetBasis::shared(n_);
    TaylorScalar q(b);
    for (int i = 0; i < n_; ++i) {
      TaylorScalar xi = TaylorScalar::variable(b, i, x[i]);
      q += xi * xi;
    }
    TaylorScalar w = (1.0 + q * 0.25).recip();
    w = w * w * phi;  // conformal factor of the round metric, scaled by phi(t)
    TaylorMatrix gT(static_cast<size_t>(n_) * n_, TaylorScalar(b));
    for (int i = 0; i < n_; ++i) gT[static_cast<size_t>(i) * n_ + i] = w;
    return curvature_from_metric_jets(gT, n_);
  }

  Eigen::MatrixXd dt_metric(const Eigen::VectorXd& x, double) const override {
    const double u = 1.0 / (1.0 + 0.25 * x.squaredNorm());
    return -2.0 * (n_ - 1) * u * u * Eigen::MatrixXd::Identity(n_, n_);
  }

 private:
  int n_;
  double r0_;
};

// ---------------------------------------------------------------------------
// Cigar
// ---------------------------------------------------------------------------

class CigarProvider final : public GeometryProvider {
 public:
  int n() const override { return 2; }
  bool closed_form() const override { return true; }
  std::pair<double, double> time_domain() const override {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  std::string describe() const override { return "cigar"; }

  CurvatureJet jet(const Eigen::VectorXd& x, double t) const override {
    const double a = std::exp(-4.0 * t);
    const JetBasis& b = JetBasis::shared(2);
    TaylorScalar q(b);
    for (int i = 0; i < 2; ++i) {
      TaylorScalar xi = TaylorScalar::variable(b, i, x[i]);
      q += xi * xi;
    }
    TaylorScalar w = (1.0 + q * a).recip() * a;
    TaylorMatrix gT(4, TaylorScalar(b));
    gT[0] = w;
    gT[3] = w;
    return curvature_from_metric_jets(gT, 2);
  }

  Eigen::MatrixXd dt_metric(const Eigen::VectorXd& x, double t) const override {
    const double a = std::exp(-4.0 * t);
    const double den = 1.0 + a * x.squaredNorm();
    return (-4.0 * a / (den * den)) * Eigen::MatrixXd::Identity(2, 2);
  }
};

// ---------------------------------------------------------------------------
// Warped profile flow
// ---------------------------------------------------------------------------

struct ProfileDerivs {
  double psi_s, psi_ss, sphere_term, log_phi_rate;
};

// cubic Lagrange interpolation on four uniformly spaced samples
double lagrange4(const double* xs, const double* fs, double x) {
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    double li = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) li *= (x - xs[j]) / (xs[i] - xs[j]);
    out += fs[i] * li;
  }
  return out;
}

double lagrange4_deriv(const double* xs, const double* fs, double x) {
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      double term = 1.0 / (xs[i] - xs[k]);
      for (int j = 0; j < 4; ++j)
        if (j != i && j != k) term *= (x - xs[j]) / (xs[i] - xs[j]);
      sum += term;
    }
    out += fs[i] * sum;
  }
  return out;
}

// x-derivatives 0..4 of psi and phi at (x, t): second-order node stencils,
// cubic interpolation across nodes, cubic interpolation across slices.
// want_dt additionally fills dt_vals = (d/dt psi, d/dt phi) at (x, t).
void profile_sample(const GridFlow& f, double x, double t, double* psi_d, double* phi_d,
                    double* dt_vals, bool want_dt) {
  const double dx = f.dx();
  const int ns = f.ns;
  const int nt = static_cast<int>(f.times.size());

  int it = static_cast<int>(std::upper_bound(f.times.begin(), f.times.end(), t) -
                            f.times.begin()) - 1;
  int i0 = std::clamp(it - 1, 0, nt - 4);

  int jx = static_cast<int>(std::floor(x / dx));
  int j0 = std::clamp(jx - 1, 2, ns - 6);  // node stencils need j0-2 .. j0+5

  double node_x[4], slice_t[4];
  for (int j = 0; j < 4; ++j) node_x[j] = (j0 + j) * dx;
  for (int s = 0; s < 4; ++s) slice_t[s] = f.times[i0 + s];

  auto node_deriv = [dx](const std::vector<double>& fvals, int j, int k) {
    switch (k) {
      case 0: return fvals[j];
      case 1: return (fvals[j + 1] - fvals[j - 1]) / (2.0 * dx);
      case 2: return (fvals[j + 1] - 2.0 * fvals[j] + fvals[j - 1]) / (dx * dx);
      case 3:
        return (fvals[j + 2] - 2.0 * fvals[j + 1] + 2.0 * fvals[j - 1] - fvals[j - 2]) /
               (2.0 * dx * dx * dx);
      default:
        return (fvals[j + 2] - 4.0 * fvals[j + 1] + 6.0 * fvals[j] - 4.0 * fvals[j - 1] +
                fvals[j - 2]) /
               (dx * dx * dx * dx);
    }
  };

  for (int field = 0; field < 2; ++field) {
    double* out = field == 0 ? psi_d : phi_d;
    for (int k = 0; k <= 4; ++k) {
      double per_slice[4];
      for (int s = 0; s < 4; ++s) {
        const std::vector<double>& row = field == 0 ? f.psi[i0 + s] : f.phi[i0 + s];
        double per_node[4];
        for (int j = 0; j < 4; ++j) per_node[j] = node_deriv(row, j0 + j, k);
        per_slice[s] = lagrange4(node_x, per_node, x);
      }
      out[k] = lagrange4(slice_t, per_slice, t);
      if (want_dt && k == 0) dt_vals[field] = lagrange4_deriv(slice_t, per_slice, t);
    }
  }
}

class WarpedProvider final : public GeometryProvider {
 public:
  explicit WarpedProvider(GridFlow flow) : f_(std::move(flow)) {
    if (f_.ns < 11 || static_cast<int>(f_.times.size()) < 4)
      throw std::invalid_argument("warped_flow: grid too small (need ns >= 11, nt >= 4)");
    if (f_.psi.size() != f_.times.size() || f_.phi.size() != f_.times.size())
      throw std::invalid_argument("warped_flow: slice count mismatch");
  }

  int n() const override { return f_.nsphere; }
  bool closed_form() const override { return false; }
  std::pair<double, double> time_domain() const override {
    return {f_.times.front(), f_.times.back()};
  }
  std::string describe() const override {
    return "warped n=" + std::to_string(f_.nsphere) + " ns=" + std::to_string(f_.ns) +
           " nt=" + std::to_string(f_.times.size());
  }

  bool in_domain(const Eigen::VectorXd& x, double t) const override {
    const double dx = f_.dx();
    if (x[0] < 4.0 * dx || x[0] > f_.L - 4.0 * dx) return false;
    for (int a = 1; a < f_.nsphere; ++a)
      if (std::abs(x[a]) > 1.0) return false;
    // four time slices around t, none of them extrapolated
    return t >= f_.times[1] && t <= f_.times[f_.times.size() - 3];
  }

  CurvatureJet jet(const Eigen::VectorXd& x, double t) const override {
    if (!in_domain(x, t)) throw std::domain_error("warped_flow: (x, t) outside grid domain");
    double psi_d[5], phi_d[5], unused_t[2];
    profile_sample(f_, x[0], t, psi_d, phi_d, unused_t, false);

    const int n = f_.nsphere;
    const JetBasis& b = JetBasis::shared(n);
    TaylorScalar xj = TaylorScalar::variable(b, 0, x[0]);
    TaylorScalar psi_jet = xj.series({psi_d[0], psi_d[1], psi_d[2], psi_d[3], psi_d[4]});
    TaylorScalar phi_jet = xj.series({phi_d[0], phi_d[1], phi_d[2], phi_d[3], phi_d[4]});

    TaylorScalar q(b);
    for (int a = 1; a < n; ++a) {
      TaylorScalar ya = TaylorScalar::variable(b, a, x[a]);
      q += ya * ya;
    }
    TaylorScalar u = (1.0 + q * 0.25).recip();  // unit S^{n-1}, stereographic
    TaylorScalar sph = psi_jet * psi_jet * u * u;

    TaylorMatrix gT(static_cast<size_t>(n) * n, TaylorScalar(b));
    gT[0] = phi_jet * phi_jet;
    for (int a = 1; a < n; ++a) gT[static_cast<size_t>(a) * n + a] = sph;
    return curvature_from_metric_jets(gT, n);
  }

  Eigen::MatrixXd dt_metric(const Eigen::VectorXd& x, double t) const override {
    if (!in_domain(x, t)) throw std::domain_error("warped_flow: (x, t) outside grid domain");
    double psi_d[5], phi_d[5], dt_vals[2];
    profile_sample(f_, x[0], t, psi_d, phi_d, dt_vals, true);
    const int n = f_.nsphere;
    double u0 = 1.0;
    for (int a = 1; a < n; ++a) u0 += 0.25 * x[a] * x[a];
    u0 = 1.0 / u0;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    out(0, 0) = 2.0 * phi_d[0] * dt_vals[1];
    for (int a = 1; a < n; ++a) out(a, a) = 2.0 * psi_d[0] * dt_vals[0] * u0 * u0;
    return out;
  }

 private:
  GridFlow f_;
};

}  // namespace

std::shared_ptr<GeometryProvider> flat_flow(int n) { return std::make_shared<FlatProvider>(n); }

std::shared_ptr<GeometryProvider> sphere_flow(int n, double r0) {
  return std::make_shared<SphereProvider>(n, r0);
}

std::shared_ptr<GeometryProvider> cigar_flow() { return std::make_shared<CigarProvider>(); }

GridFlow evolve_warped(int n, const std::function<double(double)>& psi0, double L,
                       const WarpedParams& params) {
  if (n < 3) throw std::invalid_argument("evolve_warped: need n >= 3");
  if (params.ns < 11) throw std::invalid_argument("evolve_warped: need ns >= 11");
  if (L <= 0.0 || params.t_span <= 0.0) throw std::invalid_argument("evolve_warped: bad L/t_span");

  GridFlow f;
  f.nsphere = n;
  f.L = L;
  f.ns = params.ns;
  const int ns = params.ns;
  const double dx = f.dx();

  double dt = params.dt > 0.0 ? params.dt : 0.25 * dx * dx;
  if (dt > 0.4 * dx * dx * (1.0 + 1e-12))
    throw std::invalid_argument("evolve_warped: CFL violation, need dt <= 0.4 dx^2");

  // Integrating in the fixed coordinate gauge is hopeless: the radial factor
  // obeys a zeroth-order equation there and feeds pole noise straight back
  // into the profile, a discrete face of the gauge degeneracy that makes
  // unmodified Ricci flow only weakly parabolic. The arclength gauge trades
  // that for a nonlocal advection velocity, and the quadrature for that
  // velocity amplifies any near-pole ring perturbation by O(1/h^2), which
  // outruns diffusion at every resolution. What does work is a background
  // gauge: pull the flow back along the diffeomorphisms generated by
  // W^k = g^{ij}(Gamma^k_ij - Gamma0^k_ij), with Gamma0 the connection of
  // the round reference dxi^2 + sin^2(xi) dOmega^2 on [0, pi]. The modified
  // equations are strictly parabolic and local, and in the log variables
  // psi = e^B sin(xi), phi = e^A (x rescaled to xi = pi x / L) the 1/sin^2
  // singularities cancel at the poles whenever A and B agree there, a
  // property the pole update preserves exactly. Reported snapshots are in
  // the original gauge: coordinate labels are transported along -W and the
  // fields sampled at the transported positions, so the stored psi, phi
  // solve the unmodified flow.
  const int m = n - 1;
  const double h = M_PI / (ns - 1);
  std::vector<double> u(ns);
  for (int j = 0; j < ns; ++j) u[j] = psi0(j * dx);
  u[0] = 0.0;
  u[ns - 1] = 0.0;
  for (int j = 1; j < ns - 1; ++j)
    if (u[j] <= 0.0) throw std::invalid_argument("evolve_warped: psi0 not positive inside");
  if (std::abs(u[1] / dx - 1.0) > 0.05 || std::abs(u[ns - 2] / dx - 1.0) > 0.05)
    throw std::invalid_argument("evolve_warped: psi0 violates pole slope conditions");

  std::vector<double> sx(ns), cot(ns);
  for (int j = 0; j < ns; ++j) {
    sx[j] = std::sin(j * h);
    cot[j] = std::cos(j * h) / sx[j];  // poles never read this entry
  }

  std::vector<double> A(ns, std::log(L / M_PI)), B(ns), eta(ns);
  for (int j = 1; j < ns - 1; ++j) B[j] = std::log(u[j] / sx[j]);
  // even extension through the poles, then pin A = B there so the pole
  // limit of the equations applies from the first step
  B[0] = (4.0 * B[1] - B[2]) / 3.0;
  B[ns - 1] = (4.0 * B[ns - 2] - B[ns - 3]) / 3.0;
  A[0] = B[0] = 0.5 * (A[0] + B[0]);
  A[ns - 1] = B[ns - 1] = 0.5 * (A[ns - 1] + B[ns - 1]);
  for (int j = 0; j < ns; ++j) eta[j] = j * h;

  std::vector<double> At(ns), Bt(ns), W(ns), psi_row(ns), phi_row(ns);

  auto rhs = [&]() {
    for (int j = 1; j < ns - 1; ++j) {
      const double s2i = 1.0 / (sx[j] * sx[j]);
      const double ax = (A[j + 1] - A[j - 1]) / (2.0 * h);
      const double bx = (B[j + 1] - B[j - 1]) / (2.0 * h);
      const double axx = (A[j + 1] - 2.0 * A[j] + A[j - 1]) / (h * h);
      const double bxx = (B[j + 1] - 2.0 * B[j] + B[j - 1]) / (h * h);
      const double eA = std::exp(-2.0 * A[j]);
      const double eB = std::exp(-2.0 * B[j]);
      At[j] = eA * (axx - ax * ax + m * (bx + cot[j]) * (bx + cot[j])) +
              m * eB * ((ax - 2.0 * bx) * cot[j] - s2i);
      Bt[j] = eA * (bxx - s2i) + eB * (s2i + m * bx * cot[j] - m);
    }
    // pole limit, with ghost values from the even reflection
    At[0] = Bt[0] = std::exp(-2.0 * A[0]) *
                    (2.0 * (A[1] - A[0]) / (h * h) + m * 2.0 * (B[1] - B[0]) / (h * h) - m);
    At[ns - 1] = Bt[ns - 1] =
        std::exp(-2.0 * A[ns - 1]) * (2.0 * (A[ns - 2] - A[ns - 1]) / (h * h) +
                                      m * 2.0 * (B[ns - 2] - B[ns - 1]) / (h * h) - m);
  };

  // forward Euler between snapshots, substepped against the current explicit
  // stability bound. The log variables keep psi positive by construction, so
  // a neck pinch announces itself as runaway stiffness (or overflow), not as
  // a sign change; either way we stop and keep the rows emitted so far.
  auto advance = [&](double span) {
    double rem = span;
    for (int count = 0; rem > 0.0; ++count) {
      double stiff = 0.0;
      for (int j = 0; j < ns; ++j) {
        const double s2i = (j == 0 || j == ns - 1) ? 1.0 : 1.0 / (sx[j] * sx[j]);
        stiff = std::max(stiff, 4.0 * std::exp(-2.0 * A[j]) / (h * h) +
                                    2.0 * (m + 1) * std::exp(-2.0 * B[j]) * s2i);
      }
      if (!std::isfinite(stiff) || count >= 4096) return false;
      const double sub = std::min(rem, 1.0 / stiff);
      rhs();
      for (int j = 0; j < ns; ++j) {
        A[j] += sub * At[j];
        B[j] += sub * Bt[j];
      }
      rem -= sub;
    }
    for (int j = 0; j < ns; ++j)
      if (!std::isfinite(A[j]) || !std::isfinite(B[j])) return false;
    return true;
  };

  // cubic interpolation of a grid field at xi in [0, pi]
  auto interp = [&](const std::vector<double>& fld, double xi) {
    const double p = std::clamp(xi, 0.0, M_PI) / h;
    const int base = std::clamp(static_cast<int>(p) - 1, 0, ns - 4);
    double xs[4], fs[4];
    for (int i = 0; i < 4; ++i) {
      xs[i] = base + i;
      fs[i] = fld[base + i];
    }
    return lagrange4(xs, fs, p);
  };

  auto emit = [&]() {
    for (int j = 1; j < ns - 1; ++j) psi_row[j] = std::sin(eta[j]) * std::exp(interp(B, eta[j]));
    psi_row[0] = 0.0;
    psi_row[ns - 1] = 0.0;
    // phi carries the stretch of the label map back to x units; the pole
    // slopes use the odd extension of eta through the poles
    const double scale = M_PI / L;
    for (int j = 1; j < ns - 1; ++j)
      phi_row[j] =
          std::exp(interp(A, eta[j])) * (eta[j + 1] - eta[j - 1]) / (2.0 * h) * scale;
    phi_row[0] = std::exp(A[0]) * (8.0 * eta[1] - eta[2]) / (6.0 * h) * scale;
    phi_row[ns - 1] = std::exp(A[ns - 1]) *
                      (8.0 * (M_PI - eta[ns - 2]) - (M_PI - eta[ns - 3])) / (6.0 * h) * scale;
    f.psi.push_back(psi_row);
    f.phi.push_back(phi_row);
  };

  const int steps = std::max(4, static_cast<int>(std::lround(params.t_span / dt)));
  f.times.push_back(0.0);
  emit();

  for (int step = 0; step < steps; ++step) {
    for (int j = 1; j < ns - 1; ++j) {
      const double ax = (A[j + 1] - A[j - 1]) / (2.0 * h);
      const double bx = (B[j + 1] - B[j - 1]) / (2.0 * h);
      W[j] = std::exp(-2.0 * A[j]) * (ax - m * (bx + cot[j])) +
             m * cot[j] * std::exp(-2.0 * B[j]);
    }
    W[0] = 0.0;
    W[ns - 1] = 0.0;
    // labels ride -W; step them with the fields frozen at the step start
    for (int j = 1; j < ns - 1; ++j)
      eta[j] = std::clamp(eta[j] - dt * interp(W, eta[j]), 0.0, M_PI);

    if (!advance(dt)) break;
    f.times.push_back(f.times.back() + dt);
    emit();
  }

  if (f.times.size() < 4) throw std::runtime_error("evolve_warped: flow collapsed immediately");
  return f;
}

std::shared_ptr<GeometryProvider> warped_flow(const GridFlow& flow) {
  return std::make_shared<WarpedProvider>(flow);
}

std::shared_ptr<GeometryProvider> warped_flow(int n, const std::function<double(double)>& psi0,
                                              double L, const WarpedParams& params) {
  return warped_flow(evolve_warped(n, psi0, L, params));
}

void write_gridflow(std::ostream& os, const GridFlow& f) {
  os << "warped n=" << f.nsphere << " L=" << shortest_double(f.L) << " ns=" << f.ns
     << " nt=" << f.times.size() << " fields=psi,phi\n";
  for (size_t i = 0; i < f.times.size(); ++i)
    os << shortest_double(f.times[i]) << (i + 1 < f.times.size() ? ' ' : '\n');
  for (size_t i = 0; i < f.times.size(); ++i) {
    for (int j = 0; j < f.ns; ++j) os << shortest_double(f.psi[i][j]) << (j + 1 < f.ns ? ' ' : '\n');
    for (int j = 0; j < f.ns; ++j) os << shortest_double(f.phi[i][j]) << (j + 1 < f.ns ? ' ' : '\n');
  }
}

GridFlow read_gridflow(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("gridflow: empty input");
  GridFlow f;
  int nt = 0;
  char fields[64] = {0};
  if (std::sscanf(header.c_str(), "warped n=%d L=%lf ns=%d nt=%d fields=%63s", &f.nsphere, &f.L,
                  &f.ns, &nt, fields) != 5)
    throw std::runtime_error("gridflow: bad header: " + header);
  if (std::string(fields) != "psi,phi")
    throw std::runtime_error("gridflow: unsupported fields descriptor: " + std::string(fields));
  if (f.nsphere < 3 || f.ns < 11 || nt < 4) throw std::runtime_error("gridflow: grid too small");

  auto read_row = [&is](int count, const char* what) {
    std::vector<double> row(count);
    for (int j = 0; j < count; ++j)
      if (!(is >> row[j])) throw std::runtime_error(std::string("gridflow: truncated ") + what);
    return row;
  };
  f.times = read_row(nt, "times");
  for (int i = 0; i < nt; ++i) {
    f.psi.push_back(read_row(f.ns, "psi row"));
    f.phi.push_back(read_row(f.ns, "phi row"));
  }
  for (int i = 1; i < nt; ++i)
    if (f.times[i] <= f.times[i - 1]) throw std::runtime_error("gridflow: times not increasing");
  const double dx = f.dx();
  if (std::abs(f.psi[0][1] / dx - 1.0) > 0.05)
    throw std::runtime_error("gridflow: pole slope far from 1, not a smooth closure");
  return f;
}

void save_gridflow(const std::string& path, const GridFlow& flow) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_gridflow(os, flow);
}

GridFlow load_gridflow(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_gridflow(is);
}

WarpedSectional warped_sectional(const GridFlow& flow, double x, double t) {
  double psi_d[5], phi_d[5], unused[2];
  profile_sample(flow, x, t, psi_d, phi_d, unused, false);
  const double psi = psi_d[0], phi = phi_d[0];
  const double psi_s = psi_d[1] / phi;
  const double psi_ss = psi_d[2] / (phi * phi) - psi_d[1] * phi_d[1] / (phi * phi * phi);
  WarpedSectional out;
  out.k_rad = -psi_ss / psi;
  out.k_sph = (1.0 - psi_s * psi_s) / (psi * psi);
  return out;
}

double nic_sample_minimum(const GeometryProvider& p, const std::vector<Eigen::VectorXd>& xs,
                          const std::vector<double>& ts, const MembershipOptions& opts) {
  double worst = std::numeric_limits<double>::infinity();
  for (double t : ts)
    for (const auto& x : xs) {
      if (!p.in_domain(x, t)) continue;
      CurvatureJet j = p.jet(x, t);
      // orthonormalize so the report is frame-independent
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j.g);
      Eigen::MatrixXd L = es.operatorInverseSqrt();
      AlgCurvTensor Rf = transform_tensor(j.riem, L);
      ConeCertificate cert = cone_membership(embed_acvt(Rf, p.n() + 1), opts);
      worst = std::min(worst, cert.min_value);
    }
  return worst;
}

}  // namespace harnack
