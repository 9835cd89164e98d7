#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "sddi/system.hpp"

using namespace sddi;

namespace {

SpMat from_dense(const Eigen::MatrixXd& A) {
  SpMat S(A.rows(), A.cols());
  std::vector<Triplet> t;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) t.emplace_back(i, j, A(i, j));
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

}  // namespace

TEST_CASE("pure mass system reproduces the previous state") {
  TransientSystem sys;
  sys.layout.n_u = 3;
  Eigen::MatrixXd M(3, 3);
  M << 2, 0, 0, 0, 3, 0, 0, 0, 4;
  sys.M = from_dense(M);
  sys.K = SpMat(3, 3);
  ImplicitSolver solver(sys, 0.25);
  Vec x0(3);
  x0 << 1.0, -2.0, 0.5;
  Vec x1 = solver.advance(0.0, x0);
  REQUIRE((x1 - x0).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("dirichlet elimination lifts values into coupled rows") {
  // 0 = K x - b with x1 pinned to 5: row 0 gives 2 x0 + 5 = 7
  TransientSystem sys;
  sys.layout.n_u = 2;
  Eigen::MatrixXd K(2, 2);
  K << 2, 1, 1, 2;
  sys.K = from_dense(K);
  sys.M = SpMat(2, 2);
  sys.load_volume = [](double) {
    Vec b(2);
    b << 7.0, 0.0;
    return b;
  };
  sys.dirichlet.emplace_back(1, [](double) { return 5.0; });
  ImplicitSolver solver(sys, 1.0);
  SolveAudit audit;
  Vec x = solver.advance(0.0, Vec::Zero(2), &audit);
  REQUIRE(x[0] == Catch::Approx(1.0).epsilon(1e-13));
  REQUIRE(x[1] == 5.0);
  // reaction at the pinned dof: (K x - b)_1 = 1 + 10 - 0 = 11, work 5 * 11
  REQUIRE(audit.boundary_work_rate == Catch::Approx(55.0).epsilon(1e-13));
}

TEST_CASE("time-dependent dirichlet values are evaluated at the new time") {
  TransientSystem sys;
  sys.layout.n_u = 2;
  sys.M = from_dense(Eigen::MatrixXd::Identity(2, 2));
  sys.K = SpMat(2, 2);
  sys.dirichlet.emplace_back(0, [](double t) { return std::sin(t); });
  ImplicitSolver solver(sys, 0.5);
  Vec x = solver.advance(1.0, Vec::Zero(2));
  REQUIRE(x[0] == std::sin(1.5));
  REQUIRE(x[1] == 0.0);
}

TEST_CASE("singular operators are reported") {
  TransientSystem sys;
  sys.layout.n_u = 2;
  sys.M = SpMat(2, 2);
  sys.K = SpMat(2, 2);
  REQUIRE_THROWS_WITH((ImplicitSolver{sys, 1.0}),
                      Catch::Matchers::ContainsSubstring("singular"));
}

TEST_CASE("constraint rows are monitored through the audit") {
  // layout with one multiplier row: residual of that row must vanish for the
  // solved state because the row is never constrained
  TransientSystem sys;
  sys.layout.n_u = 2;
  sys.layout.n_pi = 1;
  Eigen::MatrixXd K(3, 3);
  K << 2, 0, 1, 0, 2, 1, -1, -1, 0;
  sys.K = from_dense(K);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
  M(0, 0) = M(1, 1) = 1.0;
  sys.M = from_dense(M);
  sys.load_volume = [](double) {
    Vec b(3);
    b << 1.0, 2.0, 0.0;
    return b;
  };
  ImplicitSolver solver(sys, 0.1);
  SolveAudit audit;
  Vec x = solver.advance(0.0, Vec::Zero(3), &audit);
  REQUIRE(audit.constraint_residual < 1e-12);
  REQUIRE(x[0] + x[1] == Catch::Approx(0.0).margin(1e-12));  // the constraint itself
}

TEST_CASE("matrix market export round-trips") {
  Eigen::MatrixXd A(2, 3);
  A << 1.5, 0.0, -2.25, 0.0, 3.75, 0.0;
  const std::string path = "mm_roundtrip.mtx";
  write_matrix_market(from_dense(A), path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "%%MatrixMarket matrix coordinate real general");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  REQUIRE(rows == 2);
  REQUIRE(cols == 3);
  REQUIRE(nnz == 3);
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(2, 3);
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    back(i - 1, j - 1) = v;
  }
  REQUIRE((back - A).norm() == 0.0);
  std::remove(path.c_str());
}
