#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace harnack {

using Sym2 = Eigen::MatrixXd;

// =========================================================================
// AlgCurvTensor: dense (0,4) tensor on R^d
// =========================================================================
//
// Index convention: comps(i,j,k,l) with the algebraic curvature symmetries
//   comps(i,j,k,l) = -comps(j,i,k,l) = comps(k,l,i,j)
// and the first Bianchi identity
//   comps(i,j,k,l) + comps(j,k,i,l) + comps(k,i,j,l) = 0.
// Nothing enforces these on write; validate_acvt measures them.

class AlgCurvTensor {
 public:
  AlgCurvTensor() = default;
  explicit AlgCurvTensor(int d) : d_(d), c_(static_cast<size_t>(d) * d * d * d, 0.0) {}

  int dim() const { return d_; }

  double& operator()(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return c_[idx(i, j, k, l)]; }

  const std::vector<double>& data() const { return c_; }
  std::vector<double>& data() { return c_; }

  AlgCurvTensor& operator+=(const AlgCurvTensor& o);
  AlgCurvTensor& operator-=(const AlgCurvTensor& o);
  AlgCurvTensor& operator*=(double s);

  friend AlgCurvTensor operator+(AlgCurvTensor a, const AlgCurvTensor& b) { return a += b; }
  friend AlgCurvTensor operator-(AlgCurvTensor a, const AlgCurvTensor& b) { return a -= b; }
  friend AlgCurvTensor operator*(AlgCurvTensor a, double s) { return a *= s; }
  friend AlgCurvTensor operator*(double s, AlgCurvTensor a) { return a *= s; }

  // S(v1,v2,v3,v4), full 4-linear evaluation
  double eval(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
              const Eigen::VectorXd& v3, const Eigen::VectorXd& v4) const;

  double max_abs() const;

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * d_ + j) * d_ + k) * d_ + l;
  }

  int d_ = 0;
  std::vector<double> c_;
};

// Weights for index contraction in q_map and tensor_norm. Symmetric PSD,
// possibly rank-deficient (e.g. spatial() zeroes out the last direction).
struct ContractionMetric {
  Eigen::MatrixXd w;

  static ContractionMetric identity(int d);
  static ContractionMetric spatial(int d);  // diag(1,...,1,0)
};

struct ValidationReport {
  double antisym = 0.0;   // max |T_ijkl + T_jikl|, both index pairs
  double pair_sym = 0.0;  // max |T_ijkl - T_klij|
  double bianchi = 0.0;   // max |T_ijkl + T_jkil + T_kijl|
  double scale = 1.0;     // max(1, max|comps|)

  double worst() const;
  bool ok(double tol) const { return worst() <= tol * scale; }
  std::vector<std::string> violations(double tol) const;
};

// =========================================================================
// Operations
// =========================================================================

ValidationReport validate_acvt(const AlgCurvTensor& T);

// (A ^ B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il.
// With this normalization (1/2)(g ^ g) is the constant-curvature-1 tensor.
AlgCurvTensor kulkarni_nomizu(const Sym2& A, const Sym2& B);

// Ric_jl = g_inv^{ik} R_ijkl; round sphere of curvature k gives (d-1)k g.
Sym2 contract_ricci(const AlgCurvTensor& R, const Eigen::MatrixXd& g_inv);
double contract_scal(const Sym2& ric, const Eigen::MatrixXd& g_inv);

/// Quadratic curvature reaction term:
///   Q(S)_abcd = sum C^pq C^rs [ S_abpr S_cdqs + 2 S_apcr S_bqds - 2 S_apdr S_bqcs ].
/// Preserves the curvature symmetries including first Bianchi.
AlgCurvTensor q_map(const AlgCurvTensor& S, const ContractionMetric& C);

// Deterministic sum of `terms` Kulkarni-Nomizu squares A ^ A with A = B*B,
// B random symmetric. Output has nonnegative curvature operator.
AlgCurvTensor random_cone_tensor(std::uint64_t seed, int d, int terms);

// Random tensor with all four algebraic symmetries (no positivity). Built by
// symmetrizing white noise and removing its fully antisymmetric part.
AlgCurvTensor random_valid_acvt(std::uint64_t seed, int d);

// Projection of an arbitrary (0,4) tensor onto the curvature symmetry class.
AlgCurvTensor project_curvature(const AlgCurvTensor& T);

// Pullback (L.S)(v1,..,v4) = S(L v1,..,L v4).
AlgCurvTensor transform_tensor(const AlgCurvTensor& S, const Eigen::MatrixXd& L);

// Zero-padded copy in dimension D >= dim (extra directions are flat).
AlgCurvTensor embed_acvt(const AlgCurvTensor& S, int D);

// Full contraction norms sqrt(T_... T_... C^.. C^.. ...), one C per index
// slot. C must be symmetric PSD for these to be norms (seminorms when
// rank-deficient).
double tensor_norm(const AlgCurvTensor& T, const Eigen::MatrixXd& C);
double tensor_norm(const Sym2& A, const Eigen::MatrixXd& C);

// Plain Frobenius norm of the component array.
double frob_norm(const AlgCurvTensor& T);

// =========================================================================
// Text serialization
// =========================================================================
//
// Format: header "acvt d=<d>", then one "i j k l value" line per nonzero
// component, values printed as shortest round-trip decimals.

// Shortest decimal string that round-trips to the same double.
std::string shortest_double(double v);

void write_acvt(std::ostream& os, const AlgCurvTensor& T);
AlgCurvTensor read_acvt(std::istream& is);

void save_acvt(const std::string& path, const AlgCurvTensor& T);
AlgCurvTensor load_acvt(const std::string& path);

}  // namespace harnack
