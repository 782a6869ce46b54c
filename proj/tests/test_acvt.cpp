#include "harnack/acvt.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace harnack;

namespace {

AlgCurvTensor constant_curvature(int d, double kappa) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return kappa * 0.5 * kulkarni_nomizu(id, id);
}

}  // namespace

TEST_CASE("validation accepts the zero tensor and curvature constructions") {
  CHECK(validate_acvt(AlgCurvTensor(4)).worst() == 0.0);

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  AlgCurvTensor R = 0.5 * kulkarni_nomizu(id, id);
  CHECK(validate_acvt(R).ok(1e-12));
}

TEST_CASE("validation flags a constructed antisymmetry violation") {
  AlgCurvTensor T(4);
  T(0, 1, 0, 1) = 1.0;
  T(1, 0, 0, 1) = 1.0;  // should be -1
  T(0, 1, 1, 0) = 1.0;  // pair-symmetric copies of the bad entry
  T(1, 0, 1, 0) = 1.0;
  ValidationReport rep = validate_acvt(T);
  CHECK(rep.antisym > 0.5);
  CHECK_FALSE(rep.ok(1e-8));
  CHECK_FALSE(rep.violations(1e-8).empty());
}

TEST_CASE("kulkarni-nomizu anchor components") {
  Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  CHECK(kulkarni_nomizu(id3, id3)(0, 1, 0, 1) == doctest::Approx(2.0).epsilon(1e-14));

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(kulkarni_nomizu(A, id2)(0, 1, 0, 1) == doctest::Approx(3.0).epsilon(1e-14));

  CHECK(frob_norm(kulkarni_nomizu(A, Eigen::MatrixXd::Zero(2, 2))) == 0.0);
  CHECK_THROWS_AS(kulkarni_nomizu(id3, id2), std::invalid_argument);
}

TEST_CASE("kulkarni-nomizu output always satisfies the curvature symmetries") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int it = 0; it < 20; ++it) {
    const int d = 2 + it % 5;
    Eigen::MatrixXd A(d, d), B(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        A(i, j) = A(j, i) = gauss(rng);
        B(i, j) = B(j, i) = gauss(rng);
      }
    CHECK(validate_acvt(kulkarni_nomizu(A, B)).ok(1e-12));
  }
}

TEST_CASE("ricci and scalar traces on space forms") {
  Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  Sym2 ric = contract_ricci(constant_curvature(3, 1.0), id3);
  CHECK((ric - 2.0 * id3).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(contract_scal(ric, id3) == doctest::Approx(6.0).epsilon(1e-14));

  Eigen::MatrixXd id4 = Eigen::MatrixXd::Identity(4, 4);
  Sym2 ric4 = contract_ricci(constant_curvature(4, -1.0), id4);
  CHECK((ric4 + 3.0 * id4).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(contract_scal(ric4, id4) == doctest::Approx(-12.0).epsilon(1e-14));

  CHECK(contract_scal(contract_ricci(AlgCurvTensor(3), id3), id3) == 0.0);
}

TEST_CASE("q_map anchor: unit curvature in three dimensions") {
  AlgCurvTensor Q = q_map(constant_curvature(3, 1.0), ContractionMetric::identity(3));
  CHECK(Q(0, 1, 0, 1) == doctest::Approx(4.0).epsilon(1e-13));
  // dkappa/dt = 2(d-1)kappa^2 means the whole tensor is 4x the input here
  AlgCurvTensor diff = Q - 4.0 * constant_curvature(3, 1.0);
  CHECK(frob_norm(diff) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("q_map of zero and quadratic homogeneity") {
  CHECK(frob_norm(q_map(AlgCurvTensor(3), ContractionMetric::identity(3))) == 0.0);

  AlgCurvTensor S = random_valid_acvt(11, 4);
  ContractionMetric C = ContractionMetric::identity(4);
  AlgCurvTensor lhs = q_map(3.0 * S, C);
  AlgCurvTensor rhs = 9.0 * q_map(S, C);
  CHECK(frob_norm(lhs - rhs) <= 1e-12 * std::max(1.0, frob_norm(rhs)));
}

TEST_CASE("q_map with spatial contraction respects the block embedding") {
  // spatial-only tensor on R^4, contraction diag(1,1,1,0): the result is the
  // three-dimensional Q computed inside the spatial block
  AlgCurvTensor S3 = random_valid_acvt(23, 3);
  AlgCurvTensor S4 = embed_acvt(S3, 4);
  AlgCurvTensor Q4 = q_map(S4, ContractionMetric::spatial(4));
  AlgCurvTensor Q3 = q_map(S3, ContractionMetric::identity(3));
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const double want =
              (i < 3 && j < 3 && k < 3 && l < 3) ? Q3(i, j, k, l) : 0.0;
          worst = std::max(worst, std::abs(Q4(i, j, k, l) - want));
        }
  CHECK(worst <= 1e-12 * std::max(1.0, frob_norm(Q3)));
}

TEST_CASE("q_map closure over random valid tensors") {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 40; ++it) {
    const int d = 2 + it % 5;
    AlgCurvTensor S = random_valid_acvt(rng(), d);
    ValidationReport rep = validate_acvt(q_map(S, ContractionMetric::identity(d)));
    CHECK(rep.worst() <= 1e-10 * rep.scale);
  }
}

TEST_CASE("random_cone_tensor is deterministic and symmetric") {
  AlgCurvTensor a = random_cone_tensor(1234, 4, 3);
  AlgCurvTensor b = random_cone_tensor(1234, 4, 3);
  CHECK(frob_norm(a - b) == 0.0);
  CHECK(validate_acvt(a).ok(1e-12));
  CHECK(frob_norm(random_cone_tensor(1234, 4, 3) - random_cone_tensor(4321, 4, 3)) > 0.0);
}

TEST_CASE("tensor norms") {
  Eigen::MatrixXd id4 = Eigen::MatrixXd::Identity(4, 4);
  CHECK(tensor_norm(Sym2(id4), id4) == doctest::Approx(2.0).epsilon(1e-14));  // sqrt(4)
  CHECK(tensor_norm(AlgCurvTensor(4), id4) == 0.0);

  // norm of a (0,4) tensor under a metric equals the Euclidean norm after
  // pulling back by g^{-1/2}
  AlgCurvTensor S = random_valid_acvt(5, 3);
  Eigen::MatrixXd g(3, 3);
  g << 2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  Eigen::MatrixXd g_inv_half = es.operatorInverseSqrt();
  CHECK(tensor_norm(S, g.inverse()) ==
        doctest::Approx(frob_norm(transform_tensor(S, g_inv_half))).epsilon(1e-12));
}

TEST_CASE("transform and embed behave as pullbacks") {
  AlgCurvTensor S = random_valid_acvt(17, 3);
  Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  CHECK(frob_norm(transform_tensor(S, id3) - S) == 0.0);
  CHECK(validate_acvt(embed_acvt(S, 5)).ok(1e-12));
  CHECK_THROWS_AS(embed_acvt(S, 2), std::invalid_argument);
}

TEST_CASE("serialization round-trips exactly") {
  AlgCurvTensor S = random_valid_acvt(31, 4);
  std::stringstream ss;
  write_acvt(ss, S);
  AlgCurvTensor back = read_acvt(ss);
  REQUIRE(back.dim() == 4);
  CHECK(frob_norm(S - back) == 0.0);

  std::stringstream bad("acvt d=0\n");
  CHECK_THROWS(read_acvt(bad));
}

TEST_CASE("shortest_double round-trips awkward values") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, -0.0, 5.0}) {
    CHECK(std::stod(shortest_double(v)) == v);
  }
}
