#include "harnack/acvt.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace harnack {

AlgCurvTensor& AlgCurvTensor::operator+=(const AlgCurvTensor& o) {
  assert(d_ == o.d_);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

AlgCurvTensor& AlgCurvTensor::operator-=(const AlgCurvTensor& o) {
  assert(d_ == o.d_);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

AlgCurvTensor& AlgCurvTensor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

double AlgCurvTensor::eval(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                           const Eigen::VectorXd& v3, const Eigen::VectorXd& v4) const {
  const int d = d_;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    if (v1[i] == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      if (v2[j] == 0.0) continue;
      const double vij = v1[i] * v2[j];
      for (int k = 0; k < d; ++k) {
        if (v3[k] == 0.0) continue;
        const double vijk = vij * v3[k];
        const double* row = &c_[idx(i, j, k, 0)];
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += row[l] * v4[l];
        acc += vijk * s;
      }
    }
  }
  return acc;
}

double AlgCurvTensor::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

ContractionMetric ContractionMetric::identity(int d) {
  return {Eigen::MatrixXd::Identity(d, d)};
}

ContractionMetric ContractionMetric::spatial(int d) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(d, d);
  w(d - 1, d - 1) = 0.0;
  return {w};
}

double ValidationReport::worst() const {
  return std::max({antisym, pair_sym, bianchi});
}

std::vector<std::string> ValidationReport::violations(double tol) const {
  std::vector<std::string> out;
  if (antisym > tol * scale) out.push_back("antisymmetry");
  if (pair_sym > tol * scale) out.push_back("pair_symmetry");
  if (bianchi > tol * scale) out.push_back("first_bianchi");
  return out;
}

ValidationReport validate_acvt(const AlgCurvTensor& T) {
  const int d = T.dim();
  ValidationReport r;
  r.scale = std::max(1.0, T.max_abs());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double t = T(i, j, k, l);
          r.antisym = std::max(r.antisym, std::abs(t + T(j, i, k, l)));
          r.antisym = std::max(r.antisym, std::abs(t + T(i, j, l, k)));
          r.pair_sym = std::max(r.pair_sym, std::abs(t - T(k, l, i, j)));
          r.bianchi = std::max(r.bianchi, std::abs(t + T(j, k, i, l) + T(k, i, j, l)));
        }
  return r;
}

AlgCurvTensor kulkarni_nomizu(const Sym2& A, const Sym2& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    throw std::invalid_argument("kulkarni_nomizu: factors must be square and equal-sized");
  const int d = static_cast<int>(A.rows());
  AlgCurvTensor T(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          T(i, j, k, l) =
              A(i, k) * B(j, l) + A(j, l) * B(i, k) - A(i, l) * B(j, k) - A(j, k) * B(i, l);
  return T;
}

Sym2 contract_ricci(const AlgCurvTensor& R, const Eigen::MatrixXd& g_inv) {
  const int d = R.dim();
  Sym2 ric = Sym2::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) s += g_inv(i, k) * R(i, j, k, l);
      ric(j, l) = s;
    }
  return ric;
}

double contract_scal(const Sym2& ric, const Eigen::MatrixXd& g_inv) {
  return (g_inv * ric).trace();
}

namespace {

// Raise one index slot of T with the weights C: out = contraction of slot
// `slot` against C. Used to reduce q_map and tensor_norm to O(d^6)/O(d^5).
AlgCurvTensor raise_slot(const AlgCurvTensor& T, const Eigen::MatrixXd& C, int slot) {
  const int d = T.dim();
  AlgCurvTensor out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          switch (slot) {
            case 0:
              for (int m = 0; m < d; ++m) s += C(i, m) * T(m, j, k, l);
              break;
            case 1:
              for (int m = 0; m < d; ++m) s += C(j, m) * T(i, m, k, l);
              break;
            case 2:
              for (int m = 0; m < d; ++m) s += C(k, m) * T(i, j, m, l);
              break;
            default:
              for (int m = 0; m < d; ++m) s += C(l, m) * T(i, j, k, m);
              break;
          }
          out(i, j, k, l) = s;
        }
  return out;
}

}  // namespace

AlgCurvTensor q_map(const AlgCurvTensor& S, const ContractionMetric& C) {
  const int d = S.dim();
  // S with slots (2,4) raised: R1_aqcs = sum C^pq C^rs S_apcr,
  // and with slots (3,4) raised: R2_abqs = sum C^pq C^rs S_abpr.
  const AlgCurvTensor R1 = raise_slot(raise_slot(S, C.w, 1), C.w, 3);
  const AlgCurvTensor R2 = raise_slot(raise_slot(S, C.w, 2), C.w, 3);
  AlgCurvTensor Q(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double t1 = 0.0, t2 = 0.0, t3 = 0.0;
          for (int q = 0; q < d; ++q)
            for (int s = 0; s < d; ++s) {
              t1 += R2(a, b, q, s) * S(c, e, q, s);
              t2 += R1(a, q, c, s) * S(b, q, e, s);
              t3 += R1(a, q, e, s) * S(b, q, c, s);
            }
          Q(a, b, c, e) = t1 + 2.0 * t2 - 2.0 * t3;
        }
  return Q;
}

AlgCurvTensor random_cone_tensor(std::uint64_t seed, int d, int terms) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  AlgCurvTensor out(d);
  for (int a = 0; a < terms; ++a) {
    Eigen::MatrixXd X(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) X(i, j) = nd(gen);
    const Eigen::MatrixXd B = 0.5 * (X + X.transpose());
    const Eigen::MatrixXd A = B * B;
    out += kulkarni_nomizu(A, A);
  }
  return out;
}

AlgCurvTensor project_curvature(const AlgCurvTensor& T) {
  const int d = T.dim();
  AlgCurvTensor P(d);
  // antisymmetrize both pairs, then symmetrize the pair exchange
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double a = T(i, j, k, l) - T(j, i, k, l) - T(i, j, l, k) + T(j, i, l, k);
          const double b = T(k, l, i, j) - T(l, k, i, j) - T(k, l, j, i) + T(l, k, j, i);
          P(i, j, k, l) = 0.125 * (a + b);
        }
  // remove the fully antisymmetric part: for pair-symmetric antisymmetric
  // tensors the cyclic sum b(T) is totally antisymmetric and b acts as 3*id
  // on that subspace, so P - b(P)/3 satisfies first Bianchi.
  AlgCurvTensor out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double cyc = P(i, j, k, l) + P(j, k, i, l) + P(k, i, j, l);
          out(i, j, k, l) = P(i, j, k, l) - cyc / 3.0;
        }
  return out;
}

AlgCurvTensor random_valid_acvt(std::uint64_t seed, int d) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  AlgCurvTensor T(d);
  for (double& v : T.data()) v = nd(gen);
  return project_curvature(T);
}

AlgCurvTensor transform_tensor(const AlgCurvTensor& S, const Eigen::MatrixXd& L) {
  const int d = S.dim();
  // contract one slot at a time: slot m of the result pairs with column m of L
  AlgCurvTensor cur = S;
  for (int slot = 0; slot < 4; ++slot) {
    AlgCurvTensor next(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            double s = 0.0;
            switch (slot) {
              case 0:
                for (int m = 0; m < d; ++m) s += L(m, i) * cur(m, j, k, l);
                break;
              case 1:
                for (int m = 0; m < d; ++m) s += L(m, j) * cur(i, m, k, l);
                break;
              case 2:
                for (int m = 0; m < d; ++m) s += L(m, k) * cur(i, j, m, l);
                break;
              default:
                for (int m = 0; m < d; ++m) s += L(m, l) * cur(i, j, k, m);
                break;
            }
            next(i, j, k, l) = s;
          }
    cur = next;
  }
  return cur;
}

AlgCurvTensor embed_acvt(const AlgCurvTensor& S, int D) {
  const int d = S.dim();
  if (D < d) throw std::invalid_argument("embed_acvt: target dimension too small");
  AlgCurvTensor out(D);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) out(i, j, k, l) = S(i, j, k, l);
  return out;
}

double tensor_norm(const AlgCurvTensor& T, const Eigen::MatrixXd& C) {
  AlgCurvTensor U = T;
  for (int slot = 0; slot < 4; ++slot) U = raise_slot(U, C, slot);
  double s = 0.0;
  const auto& a = U.data();
  const auto& b = T.data();
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::sqrt(std::max(0.0, s));
}

double tensor_norm(const Sym2& A, const Eigen::MatrixXd& C) {
  return std::sqrt(std::max(0.0, (C * A * C * A).trace()));
}

double frob_norm(const AlgCurvTensor& T) {
  double s = 0.0;
  for (double v : T.data()) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string shortest_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_acvt(std::ostream& os, const AlgCurvTensor& T) {
  const int d = T.dim();
  os << "acvt d=" << d << "\n";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          if (T(i, j, k, l) != 0.0)
            os << i << ' ' << j << ' ' << k << ' ' << l << ' ' << shortest_double(T(i, j, k, l))
               << "\n";
}

AlgCurvTensor read_acvt(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("acvt: empty input");
  int d = 0;
  if (std::sscanf(header.c_str(), "acvt d=%d", &d) != 1 || d <= 0)
    throw std::runtime_error("acvt: bad header '" + header + "'");
  AlgCurvTensor T(d);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i, j, k, l;
    std::string val;
    if (!(ls >> i >> j >> k >> l >> val)) throw std::runtime_error("acvt: bad line '" + line + "'");
    if (i < 0 || i >= d || j < 0 || j >= d || k < 0 || k >= d || l < 0 || l >= d)
      throw std::runtime_error("acvt: index out of range in '" + line + "'");
    double v = 0.0;
    auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc()) throw std::runtime_error("acvt: bad value '" + val + "'");
    T(i, j, k, l) = v;
  }
  return T;
}

void save_acvt(const std::string& path, const AlgCurvTensor& T) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("acvt: cannot open " + path);
  write_acvt(f, T);
}

AlgCurvTensor load_acvt(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("acvt: cannot open " + path);
  return read_acvt(f);
}

}  // namespace harnack
