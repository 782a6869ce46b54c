#include "harnack/cone.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <random>

using namespace harnack;

namespace {

AlgCurvTensor constant_curvature(int d, double kappa) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return kappa * 0.5 * kulkarni_nomizu(id, id);
}

FourTuple basis_tuple(int d, int a, int b, int c, int e) {
  FourTuple t;
  t.v1 = Eigen::VectorXd::Unit(d, a);
  t.v2 = Eigen::VectorXd::Unit(d, b);
  t.v3 = Eigen::VectorXd::Unit(d, c);
  t.v4 = Eigen::VectorXd::Unit(d, e);
  return t;
}

}  // namespace

TEST_CASE("isotropic form anchors") {
  AlgCurvTensor S = constant_curvature(4, 1.0);
  CHECK(isotropic_form(S, basis_tuple(4, 0, 1, 2, 3)) == doctest::Approx(4.0).epsilon(1e-14));

  CHECK(isotropic_form(AlgCurvTensor(4), basis_tuple(4, 0, 1, 2, 3)) == 0.0);

  FourTuple same;
  same.v1 = same.v2 = same.v3 = same.v4 = Eigen::VectorXd::Unit(4, 1);
  CHECK(isotropic_form(S, same) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("isotropic form homogeneity in the two pairs") {
  std::mt19937_64 rng(3);
  AlgCurvTensor S = random_valid_acvt(rng(), 5);
  FourTuple t = oracles::random_tuple(rng, 5, false);
  FourTuple scaled = t;
  scaled.v1 *= 2.0;
  scaled.v2 *= 2.0;
  scaled.v3 *= -3.0;
  scaled.v4 *= -3.0;
  const double want = 4.0 * 9.0 * isotropic_form(S, t);
  CHECK(isotropic_form(S, scaled) ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("frame form matches the isotropic form at the bridged tuple") {
  std::mt19937_64 rng(5);
  AlgCurvTensor S = random_valid_acvt(rng(), 4);
  std::array<Eigen::VectorXd, 4> frame = {
      Eigen::VectorXd::Unit(4, 0), Eigen::VectorXd::Unit(4, 1), Eigen::VectorXd::Unit(4, 2),
      Eigen::VectorXd::Unit(4, 3)};
  for (double lambda : {0.0, 0.4, 1.0})
    for (double mu : {0.0, -0.7, 1.0}) {
      FourTuple t;
      t.v1 = frame[0];
      t.v2 = mu * frame[1];
      t.v3 = frame[2];
      t.v4 = lambda * frame[3];
      CHECK(frame_form(S, frame, lambda, mu) ==
            doctest::Approx(isotropic_form(S, t)).epsilon(1e-12));
    }

  AlgCurvTensor R = constant_curvature(4, 1.0);
  CHECK(frame_form(R, frame, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(frame_form(R, frame, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(frame_form(AlgCurvTensor(4), frame, 0.3, 0.9) == 0.0);

  std::array<Eigen::VectorXd, 4> skewed = frame;
  skewed[1] = (frame[0] + frame[1]).eval();
  CHECK_THROWS_AS(frame_form(S, skewed, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("membership verdicts on space forms") {
  MembershipOptions opts;

  ConeCertificate zero = cone_membership(AlgCurvTensor(4), opts);
  CHECK(zero.member);
  CHECK(zero.min_value == doctest::Approx(0.0).epsilon(1e-12));

  // negative curvature: global minimum -1, attained at pairs like (e1,0,e2,0);
  // value frozen from an exhaustive random-tuple search
  ConeCertificate neg = cone_membership(constant_curvature(4, -1.0), opts);
  CHECK_FALSE(neg.member);
  CHECK(neg.min_value <= -0.5);
  CHECK(neg.min_value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(oracles::brute_isotropic_min(constant_curvature(4, -1.0), 20000, 1) >= -1.0 - 1e-9);
  // the certificate's tuple reproduces its value
  CHECK(isotropic_form(constant_curvature(4, -1.0), neg.argmin) ==
        doctest::Approx(neg.min_value).epsilon(1e-10));

  // positive spatial curvature embedded with a flat time direction
  ConeCertificate emb = cone_membership(embed_acvt(constant_curvature(3, 1.0), 4), opts);
  CHECK(emb.member);
  CHECK(emb.min_value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("membership of nonnegative curvature operators and GL invariance") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MembershipOptions opts;
  opts.starts = 24;
  for (int it = 0; it < 6; ++it) {
    const int d = 4 + it % 2;
    AlgCurvTensor S = random_cone_tensor(rng(), d, 1 + it % 3);
    opts.seed = rng();
    ConeCertificate cert = cone_membership(S, opts);
    CHECK(cert.min_value >= -1e-8 * std::max(1.0, S.max_abs()));
    CHECK(cert.member);

    // pull back by a random well-conditioned map: the verdict must not move
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) L(i, j) += 0.25 * gauss(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
    if (svd.singularValues()(d - 1) < 0.2) continue;
    opts.seed = rng();
    CHECK(cone_membership(transform_tensor(S, L), opts).member == cert.member);
  }

  opts.seed = 4;
  ConeCertificate neg = cone_membership(constant_curvature(4, -1.0), opts);
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(4, 4);
  L(0, 1) = 0.5;
  L(2, 2) = 1.5;
  CHECK(cone_membership(transform_tensor(constant_curvature(4, -1.0), L), opts).member ==
        neg.member);
}

TEST_CASE("second variation closed form against direct differentiation") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 30; ++it) {
    const int d = 2 + it % 4;
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    FourTuple v = oracles::random_tuple(rng, d);
    FourTuple w = oracles::random_tuple(rng, d, false);
    const double closed = second_variation_form(S, v, w);
    const double fd = oracles::fd_second_variation(S, v, w);
    CHECK(std::abs(closed - fd) <= 1e-6 * std::max({1.0, std::abs(closed), std::abs(fd)}));
  }

  AlgCurvTensor S = random_valid_acvt(rng(), 4);
  FourTuple v = oracles::random_tuple(rng, 4);
  CHECK(second_variation_form(S, v, FourTuple::zero(4)) == 0.0);
  CHECK(second_variation_form(AlgCurvTensor(4), v, oracles::random_tuple(rng, 4)) == 0.0);
}

TEST_CASE("boundary deformation lands on a genuine near-contact tuple") {
  std::mt19937_64 rng(41);
  MembershipOptions opts;
  opts.seed = rng();
  std::optional<BoundaryResult> br = deform_to_boundary(random_cone_tensor(rng(), 4, 3), opts);
  REQUIRE(br.has_value());
  const double scale = std::max(1.0, br->S.max_abs());
  CHECK(br->cert.min_value >= -1e-10 * scale);
  CHECK(br->cert.min_value <= 1e-8 * scale);
  CHECK(br->theta > 0.0);
  // the contact tuple really evaluates to the certified minimum
  CHECK(isotropic_form(br->S, br->cert.argmin) ==
        doctest::Approx(br->cert.min_value).epsilon(1e-10));
}

TEST_CASE("second variation and block matrix are nonnegative at boundary tuples") {
  std::mt19937_64 rng(53);
  MembershipOptions opts;
  int done = 0;
  for (int it = 0; it < 8 && done < 5; ++it) {
    const int d = 4 + it % 2;
    opts.seed = rng();
    std::optional<BoundaryResult> br =
        deform_to_boundary(random_cone_tensor(rng(), d, 2 + it % 2), opts);
    if (!br) continue;
    ++done;
    const double scale = std::max(1.0, br->S.max_abs());

    for (int k = 0; k < 5; ++k) {
      FourTuple w = oracles::random_tuple(rng, d, false);
      CHECK(second_variation_form(br->S, br->cert.argmin, w) >= -1e-6 * scale);
    }

    BlockMatrixBundle blocks = build_block_matrix(br->S, br->cert.argmin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks.big);
    CHECK(es.eigenvalues()(0) >= -1e-6 * std::max(1.0, blocks.big.cwiseAbs().maxCoeff()));
    CHECK(trace_inequality_value(blocks) >= -1e-6 * scale * scale);
  }
  CHECK(done >= 3);
}

TEST_CASE("block matrix structure and zero cases") {
  std::mt19937_64 rng(67);
  AlgCurvTensor S = random_valid_acvt(rng(), 4);
  FourTuple v = oracles::random_tuple(rng, 4);
  BlockMatrixBundle blocks = build_block_matrix(S, v);
  const int n = 3;
  CHECK((blocks.a - blocks.a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((blocks.b - blocks.b.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((blocks.e + blocks.e.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((blocks.f + blocks.f.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(blocks.big.rows() == 4 * n);
  CHECK((blocks.big - blocks.big.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  // spot-check the layout
  CHECK(blocks.big.block(0, 0, n, n).isApprox(blocks.b, 1e-12));
  CHECK(blocks.big.block(0, n, n, n).isApprox(-blocks.f, 1e-12));
  CHECK(blocks.big.block(2 * n, 2 * n, n, n).isApprox(blocks.a, 1e-12));
  CHECK(blocks.big.block(n, 2 * n, n, n).isApprox(blocks.d, 1e-12));

  BlockMatrixBundle zero = build_block_matrix(AlgCurvTensor(4), v);
  CHECK(zero.big.cwiseAbs().maxCoeff() == 0.0);
  CHECK(trace_inequality_value(zero) == 0.0);

  // time-direction tuple against a spatial-only tensor sees nothing
  AlgCurvTensor spatial = embed_acvt(constant_curvature(3, 1.0), 4);
  FourTuple tv;
  tv.v1 = Eigen::VectorXd::Unit(4, 3);
  tv.v2 = Eigen::VectorXd::Zero(4);
  tv.v3 = Eigen::VectorXd::Unit(4, 3);
  tv.v4 = Eigen::VectorXd::Zero(4);
  CHECK(build_block_matrix(spatial, tv).big.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace inequality holds for structured PSD matrices") {
  std::mt19937_64 rng(71);
  for (int it = 0; it < 20; ++it) {
    const int n = 2 + it % 3;
    BlockMatrixBundle bundle = oracles::random_structured_psd(rng, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bundle.big);
    REQUIRE(es.eigenvalues()(0) >= -1e-10 * bundle.big.cwiseAbs().maxCoeff());
    CHECK(trace_inequality_value(bundle) >=
          -1e-10 * std::max(1.0, bundle.big.cwiseAbs().maxCoeff() *
                                     bundle.big.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("q boundary decomposition identity") {
  std::mt19937_64 rng(83);
  for (int it = 0; it < 40; ++it) {
    const int d = 2 + it % 4;
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    FourTuple v = oracles::random_tuple(rng, d);
    QBoundaryParts parts = q_boundary_decomposition(S, v);
    const double scale = std::max({1.0, std::abs(parts.lhs), std::abs(parts.rhs)});
    CHECK(std::abs(parts.lhs - parts.rhs) <= 1e-10 * scale);
    CHECK(parts.rhs == doctest::Approx(parts.squares + parts.traces).epsilon(1e-12));
  }

  QBoundaryParts zero = q_boundary_decomposition(AlgCurvTensor(4), basis_tuple(4, 0, 1, 2, 3));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
}

TEST_CASE("certificates serialize to JSON with the expected fields") {
  ConeCertificate cert = cone_membership(AlgCurvTensor(3), MembershipOptions{});
  std::string js = certificate_json(cert);
  CHECK(js.find("\"min_value\"") != std::string::npos);
  CHECK(js.find("\"member\"") != std::string::npos);
  CHECK(js.find("\"argmin\"") != std::string::npos);
  CHECK(js.find("\"converged_starts\"") != std::string::npos);
}
