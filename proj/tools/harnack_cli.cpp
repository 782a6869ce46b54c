// Command-line front end for the verification suites. Emits one JSON report
// per run plus CSV files for anything grid-shaped; exit code 0 means every
// check passed, 1 means a mathematical check failed, 2 means the run never
// got to the mathematics (bad flags, unreadable files, out-of-domain
// requests).

#include "harnack/acvt.hpp"
#include "harnack/cone.hpp"
#include "harnack/geometries.hpp"
#include "harnack/odeflow.hpp"
#include "harnack/report.hpp"
#include "harnack/spacetime.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace harnack;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 42;
  int dim = 0;        // 0 = per-command default
  int grid = 0;       // 0 = per-command default
  int instances = 0;  // 0 = per-command default
  double time = 0.0;  // 0 = provider midpoint (soliton-detect)
  bool expanding = false;
  bool ancient = false;
  std::string provider;  // empty = per-command default
  std::string out_dir = ".";
  std::map<std::string, double> tol;

  double tol_or(const std::string& name, double dflt) const {
    auto it = tol.find(name);
    return it == tol.end() ? dflt : it->second;
  }
};

struct ProviderBundle {
  std::shared_ptr<GeometryProvider> p;
  std::optional<GridFlow> flow;  // kept for grid-aware stencil choices
};

// --------------------------------------------------------------------------
// config plumbing
// --------------------------------------------------------------------------

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config parse error in " + path + ": " + e.what());
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("dim")) cfg.dim = j.at("dim").get<int>();
  if (j.contains("grid")) cfg.grid = j.at("grid").get<int>();
  if (j.contains("instances")) cfg.instances = j.at("instances").get<int>();
  if (j.contains("time")) cfg.time = j.at("time").get<double>();
  if (j.contains("expanding")) cfg.expanding = j.at("expanding").get<bool>();
  if (j.contains("ancient")) cfg.ancient = j.at("ancient").get<bool>();
  if (j.contains("provider")) cfg.provider = j.at("provider").get<std::string>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("tol"))
    for (auto& [k, v] : j.at("tol").items()) cfg.tol[k] = v.get<double>();
}

void apply_tol_flags(RunConfig& cfg, const std::vector<std::string>& specs) {
  for (const std::string& s : specs) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--tol wants name=value, got: " + s);
    double v = 0.0;
    try {
      v = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tol value is not a number: " + s);
    }
    if (!(v > 0.0)) throw UsageError("--tol values must be positive: " + s);
    cfg.tol[s.substr(0, eq)] = v;
  }
}

std::map<std::string, std::string> parse_kv(const std::string& s) {
  std::map<std::string, std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("provider parameter wants k=v, got: " + item);
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

ProviderBundle make_provider(const std::string& spec) {
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "flat") {
      auto kv = parse_kv(rest);
      const int n = kv.count("n") ? std::stoi(kv.at("n")) : 3;
      return {flat_flow(n), std::nullopt};
    }
    if (kind == "sphere") {
      auto kv = parse_kv(rest);
      const int n = kv.count("n") ? std::stoi(kv.at("n")) : 3;
      const double r0 = kv.count("r0") ? std::stod(kv.at("r0")) : 1.0;
      return {sphere_flow(n, r0), std::nullopt};
    }
    if (kind == "cigar") return {cigar_flow(), std::nullopt};
    if (kind == "warped") {
      if (rest.empty()) throw UsageError("warped provider wants a snapshot path");
      GridFlow flow = load_gridflow(rest);
      return {warped_flow(flow), flow};
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("provider '" + spec + "': " + e.what());
  }
  throw UsageError("unknown provider kind: " + spec);
}

// --------------------------------------------------------------------------
// sample grids
// --------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, int k) {
  std::vector<double> out;
  if (k <= 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  for (int i = 0; i < k; ++i) out.push_back(lo + (hi - lo) * i / (k - 1));
  return out;
}

std::vector<Eigen::VectorXd> x_samples(const ProviderBundle& pb, int k) {
  const int n = pb.p->n();
  std::vector<Eigen::VectorXd> out;
  if (pb.flow) {
    const double dx = pb.flow->dx();
    for (double s : linspace(10.0 * dx, pb.flow->L - 10.0 * dx, k)) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x[0] = s;
      out.push_back(x);
    }
    return out;
  }
  Eigen::VectorXd dir(n);
  for (int i = 0; i < n; ++i) dir[i] = 1.0 / (1.0 + i);
  dir.normalize();
  for (double s : linspace(-0.8, 0.8, k)) out.push_back(s * dir);
  return out;
}

std::vector<double> t_samples(const ProviderBundle& pb, int k) {
  auto [lo, hi] = pb.p->time_domain();
  if (!std::isfinite(lo)) lo = 0.0;
  if (!std::isfinite(hi)) hi = lo + 1.0;
  if (pb.flow) {
    // the grid stencil hard-refuses t < 5*ht, and the 1/t coefficients keep
    // its truncation above the grid tolerance until roughly twice that, so
    // sample from 10.5*ht up to what the provider's slice window accepts
    const double ht = grid_stencil(pb.flow->dx()).ht;
    const std::vector<double>& ts = pb.flow->times;
    lo = std::max(10.5 * ht, ts[1] + 1.05 * ht);
    hi = ts[ts.size() - 3] - 1.05 * ht;
    if (!(lo < hi))
      throw UsageError(
          "snapshot time range too short for its grid spacing: these checks "
          "need a time span of roughly 30*dx^2");
    return linspace(lo, hi, k);
  }
  // stop at 0.6 of a finite lifetime: any fixed-order time stencil loses the
  // closed-form tolerance to truncation once the curvature blowup is near
  return linspace(lo + 0.3 * (hi - lo), lo + 0.6 * (hi - lo), k);
}

StencilSpec pick_stencil(const ProviderBundle& pb) {
  return pb.flow ? grid_stencil(pb.flow->dx()) : closed_form_stencil();
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / file;
}

nlohmann::ordered_json echo_config(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  if (cfg.dim) j["dim"] = cfg.dim;
  if (cfg.grid) j["grid"] = cfg.grid;
  if (cfg.instances) j["instances"] = cfg.instances;
  if (cfg.time != 0.0) j["time"] = cfg.time;
  if (cfg.expanding) j["expanding"] = true;
  if (cfg.ancient) j["ancient"] = true;
  if (!cfg.provider.empty()) j["provider"] = cfg.provider;
  j["out"] = cfg.out_dir;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.tol) t[k] = v;
  j["tol"] = t;
  return j;
}

// string-celled CSV for the x..., t, quantity, value scan layout
void write_scan_csv(const std::filesystem::path& path, int n,
                    const std::vector<std::tuple<Eigen::VectorXd, double, std::string, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (int i = 0; i < n; ++i) out << "x" << i << ",";
  out << "t,quantity,value\n";
  for (const auto& [x, t, q, v] : rows) {
    for (int i = 0; i < n; ++i) out << shortest_double(x[i]) << ",";
    out << shortest_double(t) << "," << q << "," << shortest_double(v) << "\n";
  }
}

// --------------------------------------------------------------------------
// identity-suite
// --------------------------------------------------------------------------

// quarter of the sum of d^2/ds^2 of the isotropic form along v + s w at
// s = 0 and the same with the substituted tuple (v2, -v1, v4, -v3); the
// closed form halves each second derivative before averaging, so this is
// the matching normalization. Fourth-order central stencil.
double second_variation_fd(const AlgCurvTensor& S, const FourTuple& v, const FourTuple& w,
                           double h) {
  auto value = [&](const FourTuple& base, double s) {
    FourTuple t;
    t.v1 = base.v1 + s * w.v1;
    t.v2 = base.v2 + s * w.v2;
    t.v3 = base.v3 + s * w.v3;
    t.v4 = base.v4 + s * w.v4;
    return isotropic_form(S, t);
  };
  auto second = [&](const FourTuple& base) {
    return (-value(base, 2 * h) + 16 * value(base, h) - 30 * value(base, 0) +
            16 * value(base, -h) - value(base, -2 * h)) /
           (12 * h * h);
  };
  FourTuple sub;
  sub.v1 = v.v2;
  sub.v2 = -v.v1;
  sub.v3 = v.v4;
  sub.v4 = -v.v3;
  return 0.25 * (second(v) + second(sub));
}

FourTuple random_tuple(std::mt19937_64& rng, int d, bool normalized) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourTuple t;
  for (Eigen::VectorXd* v : {&t.v1, &t.v2, &t.v3, &t.v4}) {
    v->resize(d);
    for (int i = 0; i < d; ++i) (*v)[i] = gauss(rng);
  }
  if (normalized) t.normalize();
  return t;
}

ReportDocument cmd_identity_suite(const RunConfig& cfg) {
  const int dmax = cfg.dim ? cfg.dim : 5;
  if (dmax < 2) throw UsageError("identity-suite: need dim >= 2, there is no curvature below");
  if (dmax > 8) throw UsageError("identity-suite: dim > 8 is outside the supported range");
  const int instances = cfg.instances ? cfg.instances : 100;
  std::mt19937_64 rng(cfg.seed);

  ReportDocument doc;
  doc.command = "identity-suite";
  doc.config = echo_config(cfg);

  double worst_closure = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int d = 2 + i % (dmax - 1);
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    ValidationReport rep = validate_acvt(q_map(S, ContractionMetric::identity(d)));
    worst_closure = std::max(worst_closure, rep.worst() / rep.scale);
  }
  doc.add(CheckRecord::residual("q_closure_axioms", worst_closure,
                                cfg.tol_or("q_closure", 1e-10),
                                "curvature reaction term stays an algebraic curvature tensor"));

  double worst_ident = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int d = 2 + i % (dmax - 1);
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    FourTuple v = random_tuple(rng, d, true);
    QBoundaryParts parts = q_boundary_decomposition(S, v);
    const double scale = std::max({1.0, std::abs(parts.lhs), std::abs(parts.rhs)});
    worst_ident = std::max(worst_ident, std::abs(parts.lhs - parts.rhs) / scale);
  }
  doc.add(CheckRecord::residual("q_boundary_identity", worst_ident,
                                cfg.tol_or("identity", 1e-10),
                                "reaction-term value at a tuple equals squares plus traces"));

  double worst_sv = 0.0;
  for (int i = 0; i < std::max(1, instances / 2); ++i) {
    const int d = 2 + i % (dmax - 1);
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    FourTuple v = random_tuple(rng, d, true);
    FourTuple w = random_tuple(rng, d, false);
    const double closed = second_variation_form(S, v, w);
    const double fd = second_variation_fd(S, v, w, 1e-3);
    const double scale = std::max({1.0, std::abs(closed), std::abs(fd)});
    worst_sv = std::max(worst_sv, std::abs(closed - fd) / scale);
  }
  doc.add(CheckRecord::residual("second_variation_fd_crosscheck", worst_sv,
                                cfg.tol_or("second_variation", 1e-6),
                                "closed-form second variation matches direct differentiation"));

  double worst_psd = std::numeric_limits<double>::infinity();
  int engaged = 0;
  const int boundary_instances = std::max(3, instances / 20);
  MembershipOptions mopts;
  for (int i = 0; i < boundary_instances; ++i) {
    const int d = 4 + i % 2;
    mopts.seed = rng();
    std::optional<BoundaryResult> br =
        deform_to_boundary(random_cone_tensor(rng(), d, 2 + i % 3), mopts);
    if (!br) continue;
    ++engaged;
    BlockMatrixBundle blocks = build_block_matrix(br->S, br->cert.argmin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks.big);
    const double scale = std::max(1.0, blocks.big.cwiseAbs().maxCoeff());
    worst_psd = std::min(worst_psd, es.eigenvalues()[0] / scale);
  }
  doc.add(CheckRecord::residual("boundary_instances_missed",
                                static_cast<double>(boundary_instances - engaged), 0.5,
                                "every random tensor deforms to a usable boundary tuple"));
  doc.add(CheckRecord::nonneg("block_matrix_psd_at_boundary", worst_psd,
                              cfg.tol_or("block_psd", 1e-6),
                              "second-variation block matrix is positive semidefinite"));
  return doc;
}

// --------------------------------------------------------------------------
// cone-check
// --------------------------------------------------------------------------

ReportDocument cmd_cone_check(const RunConfig& cfg) {
  const int instances = cfg.instances ? cfg.instances : 25;
  if (cfg.dim && cfg.dim < 2) throw UsageError("cone-check: need dim >= 2");
  std::mt19937_64 rng(cfg.seed);

  ReportDocument doc;
  doc.command = "cone-check";
  doc.config = echo_config(cfg);

  double worst_block = std::numeric_limits<double>::infinity();
  double worst_trace = std::numeric_limits<double>::infinity();
  double worst_q = std::numeric_limits<double>::infinity();
  int engaged = 0;

  std::vector<std::vector<double>> rows;
  MembershipOptions mopts;
  for (int i = 0; i < instances; ++i) {
    const int d = cfg.dim ? cfg.dim : 4 + i % 2;
    mopts.seed = rng();
    const std::uint64_t tensor_seed = rng();
    std::optional<BoundaryResult> br =
        deform_to_boundary(random_cone_tensor(tensor_seed, d, 2 + i % 3), mopts);
    if (!br) continue;
    ++engaged;

    BlockMatrixBundle blocks = build_block_matrix(br->S, br->cert.argmin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks.big);
    const double bscale = std::max(1.0, blocks.big.cwiseAbs().maxCoeff());
    const double bmin = es.eigenvalues()[0] / bscale;

    const double tval = trace_inequality_value(blocks);
    const double tscale = std::max(1.0, blocks.a.norm() * blocks.b.norm() +
                                            blocks.e.norm() * blocks.f.norm() +
                                            blocks.c.squaredNorm() + blocks.d.squaredNorm());

    QBoundaryParts parts = q_boundary_decomposition(br->S, br->cert.argmin);
    const double qscale = std::max(1.0, parts.squares + std::abs(parts.traces));

    worst_block = std::min(worst_block, bmin);
    worst_trace = std::min(worst_trace, tval / tscale);
    worst_q = std::min(worst_q, parts.lhs / qscale);
    rows.push_back({static_cast<double>(i), static_cast<double>(d), br->theta,
                    br->cert.min_value, bmin, tval / tscale, parts.lhs / qscale});
  }

  write_csv(out_path(cfg, "cone_check.csv").string(),
            {"instance", "d", "theta", "cone_min", "block_min_scaled", "trace_value_scaled",
             "q_value_scaled"},
            rows);

  doc.add(CheckRecord::residual("boundary_instances_missed",
                                static_cast<double>(instances - engaged), 0.5,
                                "every random tensor deforms to a usable boundary tuple"));
  doc.add(CheckRecord::nonneg("block_matrix_psd_at_boundary", worst_block,
                              cfg.tol_or("block_psd", 1e-6),
                              "second-variation block matrix is positive semidefinite"));
  doc.add(CheckRecord::nonneg("trace_inequality_at_boundary", worst_trace,
                              cfg.tol_or("trace_inequality", 1e-6),
                              "trace combination of the block matrix is nonnegative"));
  doc.add(CheckRecord::nonneg("q_form_at_boundary", worst_q, cfg.tol_or("q_boundary", 1e-6),
                              "reaction term is nonnegative at cone-boundary tuples"));
  return doc;
}

// --------------------------------------------------------------------------
// ode-invariance
// --------------------------------------------------------------------------

ReportDocument cmd_ode_invariance(const RunConfig& cfg) {
  const int seeds = cfg.instances ? cfg.instances : 50;
  if (cfg.dim && cfg.dim < 2) throw UsageError("ode-invariance: need dim >= 2");
  std::mt19937_64 rng(cfg.seed);

  ReportDocument doc;
  doc.command = "ode-invariance";
  doc.config = echo_config(cfg);

  double worst_min = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < seeds; ++i) {
    const int d = cfg.dim ? cfg.dim : 3 + i % 3;
    AlgCurvTensor S0 = random_cone_tensor(rng(), d, 1 + i % 3);
    IntegratorConfig icfg;
    icfg.step = 0.01 / std::max(1.0, frob_norm(S0));
    icfg.t_end = 0.5;
    icfg.save_every = 10;
    icfg.membership.starts = 16;
    icfg.membership.seed = rng();
    OdeTrajectory traj = integrate_ode(S0, icfg);

    double run_min = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < traj.states.size(); ++k) {
      const double scale = std::max(1.0, traj.states[k].max_abs());
      run_min = std::min(run_min, traj.cone_mins[k] / scale);
    }
    worst_min = std::min(worst_min, run_min);
    rows.push_back({static_cast<double>(i), static_cast<double>(d), run_min,
                    traj.blew_up ? 1.0 : 0.0, traj.times.back()});
  }
  write_csv(out_path(cfg, "ode_invariance.csv").string(),
            {"seed_index", "d", "worst_cone_min_scaled", "blew_up", "t_last"}, rows);

  doc.add(CheckRecord::nonneg("cone_min_along_trajectories", worst_min,
                              cfg.tol_or("cone_min", 1e-6),
                              "the curvature cone is preserved by the reaction flow"));

  // constant-curvature reduction: kappa' = 4 kappa^2 in dimension 3, so the
  // (0,1,0,1) component follows 1/(1 - 4t) from kappa0 = 1
  {
    Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
    AlgCurvTensor S0 = 0.5 * kulkarni_nomizu(id3, id3);
    IntegratorConfig icfg;
    icfg.step = 0.01 / std::max(1.0, frob_norm(S0));
    icfg.t_end = 0.1;
    icfg.save_every = 5;
    icfg.membership.starts = 8;
    OdeTrajectory traj = integrate_ode(S0, icfg);
    {
      std::ofstream os(out_path(cfg, "ode_riccati.csv"));
      write_trajectory_csv(os, traj);
    }
    const double got = traj.states.back()(0, 1, 0, 1);
    doc.add(CheckRecord::residual("riccati_blowup_anchor", got - 1.0 / (1.0 - 4.0 * 0.1),
                                  cfg.tol_or("riccati", 1e-6),
                                  "constant-curvature flow follows the scalar Riccati solution"));

    auto end_err = [&](double step) {
      IntegratorConfig c2 = icfg;
      c2.step = step;
      c2.save_every = 1 << 30;
      const double got2 = integrate_ode(S0, c2).states.back()(0, 1, 0, 1);
      return std::abs(got2 - 1.0 / (1.0 - 4.0 * 0.1));
    };
    const double ratio = end_err(4e-3) / end_err(2e-3);
    doc.add(CheckRecord::residual("rk4_halving_error_ratio", ratio - 16.0,
                                  cfg.tol_or("rk4_ratio", 4.8),
                                  "global error contracts 16-fold under step halving"));
  }
  return doc;
}

// --------------------------------------------------------------------------
// verify-evolution
// --------------------------------------------------------------------------

ReportDocument cmd_verify_evolution(const RunConfig& cfg) {
  ProviderBundle pb = make_provider(cfg.provider.empty() ? "sphere:n=3,r0=1" : cfg.provider);
  const int k = cfg.grid ? cfg.grid : 5;
  const int n = pb.p->n();
  const StencilSpec st = pick_stencil(pb);
  const bool closed = pb.p->closed_form();
  const double grid_tol = pb.flow ? 50.0 * pb.flow->dx() * pb.flow->dx() : 0.0;

  ReportDocument doc;
  doc.command = "verify-evolution";
  doc.config = echo_config(cfg);
  doc.config["provider_resolved"] = pb.p->describe();

  std::vector<std::tuple<Eigen::VectorXd, double, std::string, double>> rows;
  double worst_flow = 0.0, worst_evo = 0.0, worst_ham = 0.0, worst_lem = 0.0, worst_grad = 0.0;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (const Eigen::VectorXd& x : x_samples(pb, k))
    for (double t : t_samples(pb, k)) {
      worst_flow = std::max(worst_flow, ricci_flow_residual(*pb.p, x, t));

      EvolutionResidual er = evolution_residual(*pb.p, x, t, st);
      const double evo = er.residual_norm / std::max(1.0, er.q_norm);
      worst_evo = std::max(worst_evo, evo);
      rows.emplace_back(x, t, "evolution_residual_rel", evo);

      SpaceTimePoint pt = compute_point(*pb.p, x, t);
      Eigen::MatrixXd ham = hamilton_identity_residual(*pb.p, x, t);
      const double hrel =
          tensor_norm(ham, pt.g_inv) / std::max(1.0, tensor_norm(pt.M, pt.g_inv));
      worst_ham = std::max(worst_ham, hrel);
      rows.emplace_back(x, t, "second_order_identity_rel", hrel);

      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v[i] = gauss(rng);
      StencilSpec lst = st;
      if (closed) lst = StencilSpec{0.005, 0.005 * t, 6};
      HEvolutionCheck hc = h_evolution_check(*pb.p, x, t, v, lst);
      const double lem = std::abs(hc.lhs_norm - hc.rhs_formula) / std::max(1.0, hc.rhs_formula);
      const double grad =
          std::abs(hc.grad_lhs - hc.grad_rhs) / std::max(1.0, std::abs(hc.grad_rhs));
      worst_lem = std::max(worst_lem, lem);
      worst_grad = std::max(worst_grad, grad);
      rows.emplace_back(x, t, "h_heat_identity_rel", lem);
      rows.emplace_back(x, t, "h_gradient_identity_rel", grad);
    }

  write_scan_csv(out_path(cfg, "evolution_scan.csv"), n, rows);

  doc.add(CheckRecord::residual(
      "ricci_flow_equation", worst_flow, cfg.tol_or("flow", closed ? 1e-10 : grid_tol),
      "provider metrics satisfy the Ricci flow equation"));
  doc.add(CheckRecord::residual(
      "spacetime_evolution_residual", worst_evo, cfg.tol_or("evolution", closed ? 1e-9 : grid_tol),
      "space-time curvature satisfies its evolution identity"));
  doc.add(CheckRecord::residual(
      "second_order_curvature_identity", worst_ham,
      cfg.tol_or("hamilton", closed ? 1e-9 : grid_tol),
      "time-time block equals its second-order curvature expression"));
  doc.add(CheckRecord::residual(
      "h_heat_identity", worst_lem, cfg.tol_or("h_evolution", closed ? 1e-10 : grid_tol),
      "degenerate metric solves its heat identity with the stated norm"));
  doc.add(CheckRecord::residual(
      "h_gradient_identity", worst_grad, cfg.tol_or("h_gradient", closed ? 1e-10 : grid_tol),
      "gradient of the degenerate metric has the stated squared norm"));

  // stencil self-convergence on closed-form providers: second-order stencils
  // at halving h must shrink the residual at rate 2
  if (closed) {
    const Eigen::VectorXd x0 = x_samples(pb, 3)[1];
    const double t0 = t_samples(pb, 3)[1];
    std::vector<std::vector<double>> study;
    double prev = 0.0, worst_rate_gap = 0.0;
    int idx = 0;
    for (double h : {0.08, 0.04, 0.02}) {
      EvolutionResidual er = evolution_residual(*pb.p, x0, t0, StencilSpec{h, 0.2 * h * t0, 2});
      const double r = er.residual_norm / std::max(1.0, er.q_norm);
      double rate = std::numeric_limits<double>::quiet_NaN();
      if (idx > 0) {
        rate = std::log2(prev / r);
        worst_rate_gap = std::max(worst_rate_gap, std::abs(rate - 2.0));
      }
      study.push_back({h, r, rate});
      prev = r;
      ++idx;
    }
    write_csv(out_path(cfg, "residual_study.csv").string(), {"h_grid", "residual_norm", "rate"},
              study);
    doc.add(CheckRecord::residual("stencil_convergence_rate_gap", worst_rate_gap,
                                  cfg.tol_or("rate_band", 0.35),
                                  "discretized evolution residual vanishes at stencil order"));
  }
  return doc;
}

// --------------------------------------------------------------------------
// harnack-scan
// --------------------------------------------------------------------------

ReportDocument cmd_harnack_scan(const RunConfig& cfg) {
  ProviderBundle pb = make_provider(cfg.provider.empty() ? "sphere:n=3,r0=1" : cfg.provider);
  const int k = cfg.grid ? cfg.grid : 10;
  const int n = pb.p->n();

  ReportDocument doc;
  doc.command = "harnack-scan";
  doc.config = echo_config(cfg);
  doc.config["provider_resolved"] = pb.p->describe();

  std::vector<std::tuple<Eigen::VectorXd, double, std::string, double>> rows;
  double worst_hmin = std::numeric_limits<double>::infinity();
  double worst_cone = std::numeric_limits<double>::infinity();
  double grid_trace_min = std::numeric_limits<double>::infinity();
  int trace_not_ok = 0;

  std::mt19937_64 rng(cfg.seed);
  MembershipOptions mopts;
  mopts.starts = 16;

  for (const Eigen::VectorXd& x : x_samples(pb, k))
    for (double t : t_samples(pb, k)) {
      SpaceTimePoint pt = compute_point(*pb.p, x, t, cfg.ancient);

      TraceMinReport tr = trace_harnack_min(pt);
      if (tr.status == TraceMinReport::Status::ok) {
        grid_trace_min = std::min(grid_trace_min, tr.min);
        rows.emplace_back(x, t, "trace_harnack_min", tr.min);
      } else {
        ++trace_not_ok;
      }

      HarnackMinReport hm = harnack_min(pt, 8, rng());
      const double fscale =
          std::max(1.0, tensor_norm(pt.M, pt.g_inv) + frob_norm(pt.R));
      worst_hmin = std::min(worst_hmin, hm.min / fscale);
      rows.emplace_back(x, t, "harnack_min_scaled", hm.min / fscale);

      AlgCurvTensor S = assemble_spacetime_S(pt);
      mopts.seed = rng();
      ConeCertificate cert = cone_membership(S, mopts);
      const double cscale = std::max(1.0, S.max_abs());
      worst_cone = std::min(worst_cone, cert.min_value / cscale);
      rows.emplace_back(x, t, "spacetime_cone_min_scaled", cert.min_value / cscale);
    }

  write_scan_csv(out_path(cfg, "harnack_scan.csv"), n, rows);

  doc.add(CheckRecord::residual("trace_min_solvable_everywhere",
                                static_cast<double>(trace_not_ok), 0.5,
                                "Ricci curvature stays positive definite on the scan grid"));
  doc.add(CheckRecord::nonneg("harnack_form_min", worst_hmin, cfg.tol_or("harnack_min", 1e-6),
                              "Harnack form is nonnegative for all directions"));
  doc.add(CheckRecord::nonneg("spacetime_cone_membership", worst_cone,
                              cfg.tol_or("membership", 1e-8),
                              "space-time curvature has nonnegative isotropic curvature"));
  doc.add(CheckRecord::nonneg("trace_harnack_grid_min",
                              std::isfinite(grid_trace_min) ? grid_trace_min : 0.0,
                              cfg.tol_or("trace_min", 1e-6),
                              "trace Harnack expression is nonnegative at its minimizer"));
  return doc;
}

// --------------------------------------------------------------------------
// soliton-detect
// --------------------------------------------------------------------------

ReportDocument cmd_soliton_detect(const RunConfig& cfg) {
  ProviderBundle pb = make_provider(cfg.provider.empty() ? "cigar" : cfg.provider);
  const int k = cfg.grid ? cfg.grid : 12;
  const int n = pb.p->n();

  double t0 = cfg.time;
  if (t0 == 0.0 && cfg.expanding) {
    auto [lo, hi] = pb.p->time_domain();
    if (!std::isfinite(lo)) lo = 0.0;
    if (!std::isfinite(hi)) hi = lo + 1.0;
    t0 = lo + 0.4 * (hi - lo);
  }
  if (cfg.expanding && t0 <= 0.0)
    throw UsageError("soliton-detect: expanding mode needs a positive --time");

  ReportDocument doc;
  doc.command = "soliton-detect";
  doc.config = echo_config(cfg);
  doc.config["provider_resolved"] = pb.p->describe();
  doc.config["time_resolved"] = t0;

  std::vector<Eigen::VectorXd> samples;
  for (const Eigen::VectorXd& x : x_samples(pb, k))
    if (pb.p->in_domain(x, t0)) samples.push_back(x);
  if (samples.empty()) throw UsageError("soliton-detect: no in-domain sample points at that time");

  SolitonReport rep = soliton_detect(*pb.p, t0, samples, cfg.expanding, 1e-4,
                                     cfg.tol_or("soliton", 1e-6));

  std::vector<std::tuple<Eigen::VectorXd, double, std::string, double>> rows;
  for (const Eigen::VectorXd& x : samples) {
    SolitonReport one = soliton_detect(*pb.p, t0, {x}, cfg.expanding, 1e-4, rep.tol);
    rows.emplace_back(x, t0, "soliton_residual", one.residual_norm);
  }
  write_scan_csv(out_path(cfg, "soliton_scan.csv"), n, rows);

  doc.add(CheckRecord::residual(
      cfg.expanding ? "expanding_soliton_residual" : "steady_soliton_residual", rep.residual_norm,
      rep.tol, "flow is self-similar: the reconstructed vector field solves the soliton equation"));
  return doc;
}

// --------------------------------------------------------------------------

ReportDocument dispatch(const RunConfig& cfg) {
  if (cfg.command == "identity-suite") return cmd_identity_suite(cfg);
  if (cfg.command == "cone-check") return cmd_cone_check(cfg);
  if (cfg.command == "ode-invariance") return cmd_ode_invariance(cfg);
  if (cfg.command == "verify-evolution") return cmd_verify_evolution(cfg);
  if (cfg.command == "harnack-scan") return cmd_harnack_scan(cfg);
  if (cfg.command == "soliton-detect") return cmd_soliton_detect(cfg);
  throw UsageError("unknown command: " + cfg.command);
}

std::string report_filename(const std::string& command) {
  std::string s = command;
  for (char& c : s)
    if (c == '-') c = '_';
  return s + ".json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks for a differential Harnack inequality under Ricci flow"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> tol_specs;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with defaults for the flags below");
    sub->add_option("--seed", cfg.seed, "RNG seed (default 42)");
    sub->add_option("--dim", cfg.dim, "algebra dimension for random instances");
    sub->add_option("--grid", cfg.grid, "per-axis sample count for scans");
    sub->add_option("--instances", cfg.instances, "number of random instances / seeds");
    sub->add_option("--out", cfg.out_dir, "output directory (default .)");
    sub->add_option("--tol", tol_specs, "tolerance override, name=value (repeatable)");
    sub->add_option("--provider", cfg.provider,
                    "geometry: sphere:n=3,r0=1 | flat:n=3 | cigar | warped:<snapshot>");
    sub->add_option("--time", cfg.time, "time slice (soliton-detect)");
    sub->add_flag("--expanding", cfg.expanding, "test the expanding soliton equation");
    sub->add_flag("--ancient", cfg.ancient, "drop the 1/(2t) terms (harnack-scan)");
  };
  for (const char* name : {"identity-suite", "cone-check", "ode-invariance", "verify-evolution",
                           "harnack-scan", "soliton-detect"})
    add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0, parse errors exit 2
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    // config file first, then explicit flags on top
    if (sub->count("--config")) {
      RunConfig flags = cfg;
      cfg = RunConfig{};
      apply_config_file(cfg, config_path);
      if (sub->count("--seed")) cfg.seed = flags.seed;
      if (sub->count("--dim")) cfg.dim = flags.dim;
      if (sub->count("--grid")) cfg.grid = flags.grid;
      if (sub->count("--instances")) cfg.instances = flags.instances;
      if (sub->count("--out")) cfg.out_dir = flags.out_dir;
      if (sub->count("--provider")) cfg.provider = flags.provider;
      if (sub->count("--time")) cfg.time = flags.time;
      if (sub->count("--expanding")) cfg.expanding = flags.expanding;
      if (sub->count("--ancient")) cfg.ancient = flags.ancient;
    }
    apply_tol_flags(cfg, tol_specs);
    for (const auto& [name, v] : cfg.tol)
      if (!(v > 0.0)) throw UsageError("tolerance must be positive: " + name);
    cfg.command = sub->get_name();

    ReportDocument doc = dispatch(cfg);
    write_json_report(doc, out_path(cfg, report_filename(cfg.command)).string());
    std::cout << doc.to_json(false).dump(2) << "\n";
    std::cerr << doc.command << ": " << doc.passed() << "/" << doc.total() << " checks passed\n";
    return doc.all_pass() ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
