#pragma once

#include "harnack/acvt.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace harnack {

// =========================================================================
// Nonnegative isotropic curvature cone
// =========================================================================
//
// K = { S : isotropic_form(S, t) >= 0 for every 4-tuple t }. The form has
// unavoidable zeros (e.g. (u,0,u,0)), so the membership minimum of any
// tensor is <= 0 and equals 0 exactly on K.

struct FourTuple {
  Eigen::VectorXd v1, v2, v3, v4;

  static FourTuple zero(int d);
  // scale (v1,v2) and (v3,v4) to unit Euclidean block norms
  void normalize();
};

// S(v1,v3,v1,v3) + S(v1,v4,v1,v4) + S(v2,v3,v2,v3) + S(v2,v4,v2,v4)
//   - 2 S(v1,v2,v3,v4)
double isotropic_form(const AlgCurvTensor& S, const FourTuple& t);

// Restriction to an orthonormal frame:
//   R(e1,e3,e1,e3) + l^2 R(e1,e4,e1,e4) + m^2 R(e2,e3,e2,e3)
//   + l^2 m^2 R(e2,e4,e2,e4) - 2 l m R(e1,e2,e3,e4)
// Equals isotropic_form at (e1, m e2, e3, l e4). Frame must be orthonormal
// to 1e-10 or std::invalid_argument is thrown.
double frame_form(const AlgCurvTensor& S, const std::array<Eigen::VectorXd, 4>& frame,
                  double lambda, double mu);

struct MembershipOptions {
  int starts = 32;
  int max_iters = 100;
  double tol = 1e-9;           // member iff min_value >= -tol * scale
  double stall_rel = 1e-14;    // improvement threshold, relative to scale
  int stall_rounds = 3;
  std::uint64_t seed = 0x5eed;
};

struct ConeCertificate {
  double min_value = 0.0;
  bool member = false;
  double tol = 0.0;
  FourTuple argmin;
  int starts = 0;
  int converged_starts = 0;
};

// Minimize the isotropic form over normalized tuples by alternating minimal
// eigenvector steps: for fixed (v3,v4) the form is a quadratic in the
// concatenated vector (v1,v2), and symmetrically for the other pair.
ConeCertificate cone_membership(const AlgCurvTensor& S, const MembershipOptions& opts = {});

std::string certificate_json(const ConeCertificate& cert);

// =========================================================================
// Second variation at a degenerate tuple
// =========================================================================
//
// The quadratic form in w that is nonnegative whenever S lies in K and the
// isotropic form vanishes at v:
//
//   S(w1,v3,w1,v3) + S(w1,v4,w1,v4) + S(w2,v3,w2,v3) + S(w2,v4,w2,v4)
// + S(v1,w3,v1,w3) + S(v2,w3,v2,w3) + S(v1,w4,v1,w4) + S(v2,w4,v2,w4)
// - 2 [ S(v3,w1,v1,w3) + S(v4,w1,v2,w3) ]
// - 2 [ S(v4,w1,v1,w4) - S(v3,w1,v2,w4) ]
// + 2 [ S(v4,w2,v1,w3) - S(v3,w2,v2,w3) ]
// - 2 [ S(v3,w2,v1,w4) + S(v4,w2,v2,w4) ]
// - 2 S(w1,w2,v3,v4) - 2 S(v1,v2,w3,w4)
//
// For Bianchi-satisfying S this equals the mean of the second s-derivative
// of the isotropic form along v + s w taken at v and at the substituted
// tuple {v2,-v1,v4,-v3} (same w).
double second_variation_form(const AlgCurvTensor& S, const FourTuple& v, const FourTuple& w);

// =========================================================================
// Block matrices at a degenerate tuple (spatial directions only)
// =========================================================================
//
// For S on R^{n+1} with e_1..e_n the spatial coordinate directions:
//   a_pq = S(v1,e_p,v1,e_q) + S(v2,e_p,v2,e_q)
//   b_pq = S(v3,e_p,v3,e_q) + S(v4,e_p,v4,e_q)
//   c_pq = S(v3,e_p,v1,e_q) + S(v4,e_p,v2,e_q)
//   d_pq = S(v4,e_p,v1,e_q) - S(v3,e_p,v2,e_q)
//   e_pq = S(v1,v2,e_p,e_q)
//   f_pq = S(v3,v4,e_p,e_q)
// big is the 4n x 4n matrix
//   [  B -F -C -D ]
//   [  F  B  D -C ]
//   [ -C' D'  A -E ]
//   [ -D' -C' E  A ]
// which represents the second variation restricted to spatial w and is PSD
// at degenerate tuples of tensors in K.
struct BlockMatrixBundle {
  Eigen::MatrixXd a, b, c, d, e, f;
  Eigen::MatrixXd big;
};

BlockMatrixBundle build_block_matrix(const AlgCurvTensor& S, const FourTuple& v);

// sum a_pq b_pq - sum e_pq f_pq - sum c_pq c_qp - sum d_pq d_qp,
// nonnegative whenever big is PSD
double trace_inequality_value(const BlockMatrixBundle& blocks);

// Exact decomposition of the isotropic form of q_map(S, spatial) at v:
//   lhs = isotropic_form(q_map(S, spatial), v)
//   rhs = sum_pq [S(v1,v3,e_p,e_q) - S(v2,v4,e_p,e_q)]^2
//       + sum_pq [S(v1,v4,e_p,e_q) + S(v2,v3,e_p,e_q)]^2
//       + 2 sum a_pq b_pq - 2 sum e_pq f_pq - 2 sum c_pq c_qp - 2 sum d_pq d_qp
// The two sides agree for every Bianchi-satisfying S and every tuple.
struct QBoundaryParts {
  double lhs = 0.0;
  double rhs = 0.0;
  double squares = 0.0;   // the two sum-of-squares terms
  double traces = 0.0;    // the trace combination (2x trace_inequality_value)
};

QBoundaryParts q_boundary_decomposition(const AlgCurvTensor& S, const FourTuple& v);

// =========================================================================
// Boundary deformation
// =========================================================================
//
// Walks S0 - theta * (1/2)(I ^ I) to the cone boundary by root-finding on
// the membership minimum, exploiting that the value at a fixed tuple is
// linear in theta. Accepts theta once the minimum sits in
// [-1e-10, 1e-8] x scale with a genuinely negative argmin, so the returned
// tuple is an actual near-contact tuple rather than a structural zero.
struct BoundaryResult {
  AlgCurvTensor S;
  double theta = 0.0;
  ConeCertificate cert;
};

std::optional<BoundaryResult> deform_to_boundary(const AlgCurvTensor& S0,
                                                 const MembershipOptions& opts = {},
                                                 int max_bisect = 120);

}  // namespace harnack
