// Distributed under the MIT License.
// See LICENSE for details.

#include <cmath>
#include <random>

#include "doctest.h"
#include "tfc/errors.hpp"
#include "tfc/solvers.hpp"

using namespace tfc;

namespace {

const LsqMethod kAll[] = {LsqMethod::NormalEquations, LsqMethod::Qr,
                          LsqMethod::ScaledQr,        LsqMethod::SvdPinv,
                          LsqMethod::Cholesky,        LsqMethod::IllConditioned};

}  // namespace

TEST_CASE("method names round-trip") {
  for (LsqMethod m : kAll) CHECK(lsq_method_from_name(lsq_method_name(m)) == m);
  CHECK(std::string(lsq_method_name(LsqMethod::ScaledQr)) == "scaled-qr");
  CHECK_THROWS_AS(lsq_method_from_name("lu"), Error);
}

TEST_CASE("identity systems") {
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -2.0, 3.0);
  for (LsqMethod m : kAll) {
    CHECK((lstsq(Eigen::MatrixXd::Identity(5, 5), b, m) - b).norm() < 1e-15);
  }
}

TEST_CASE("scaled QR matches the normal equations on a well-conditioned system") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd A(40, 10);
  Eigen::VectorXd b(40);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = n(rng);
  A.col(3) *= 1e3;
  // Oracle: solve A^T A x = A^T b directly.
  const Eigen::VectorXd oracle = (A.transpose() * A).inverse() * (A.transpose() * b);
  const Eigen::VectorXd x = lstsq(A, b, LsqMethod::ScaledQr);
  CHECK((x - oracle).norm() <= 1e-10 * oracle.norm());
  CHECK((lstsq(A, b, LsqMethod::NormalEquations) - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("property: all methods agree on random consistent systems") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> cols(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const int c = cols(rng);
    const int r = c + static_cast<int>(rng() % 20);
    Eigen::MatrixXd A(r, c);
    Eigen::VectorXd xt(c);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < c; ++i) xt[i] = n(rng);
    const Eigen::VectorXd b = A * xt;
    for (LsqMethod m : kAll) {
      const Eigen::VectorXd x = lstsq(A, b, m);
      CHECK((x - xt).norm() <= 1e-9 * xt.norm());
    }
  }
}

TEST_CASE("rank deficiency") {
  Eigen::MatrixXd A(4, 3);
  A << 1, 2, 3, 2, 4, 6, 1, 0, 1, 0, 1, 1;
  A.col(2) = A.col(0) + A.col(1);
  Eigen::VectorXd b(4);
  b << 1, 2, 3, 4;
  CHECK_THROWS_AS(lstsq(A, b, LsqMethod::Qr), RankDeficient);
  CHECK_THROWS_AS(lstsq(A, b, LsqMethod::ScaledQr), RankDeficient);
  CHECK_THROWS_AS(lstsq(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2), LsqMethod::Cholesky),
                  RankDeficient);
  // Minimum-norm solution: orthogonal to the null space (1, 1, -1).
  for (LsqMethod m : {LsqMethod::SvdPinv, LsqMethod::IllConditioned}) {
    const Eigen::VectorXd x = lstsq(A, b, m);
    CHECK(std::fabs(x[0] + x[1] - x[2]) < 1e-12);
    const Eigen::VectorXd r = A * x - b;
    CHECK(std::fabs((A.transpose() * r).norm()) < 1e-12);
  }
}

TEST_CASE("ill-conditioned Hilbert system") {
  Eigen::MatrixXd H(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) H(i, j) = 1.0 / (i + j + 1);
  }
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(8);
  const double r_svd = (H * lstsq(H, b, LsqMethod::SvdPinv) - b).norm();
  double r_chol = std::numeric_limits<double>::infinity();
  try {
    r_chol = (H * lstsq(H, b, LsqMethod::Cholesky) - b).norm();
  } catch (const RankDeficient&) {
  }
  CHECK(r_svd <= r_chol);
}

TEST_CASE("nlls on scalar problems") {
  auto L = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, x[0] * x[0] - 4.0);
  };
  auto J = [](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, 2.0 * x[0]); };
  NllsConfig cfg;
  cfg.check_jacobian = true;
  NllsResult r = nlls(L, J, Eigen::VectorXd::Ones(1), cfg);
  CHECK(std::fabs(r.xi[0] - 2.0) < 1e-13);
  CHECK(r.iterations <= 8);
  CHECK(r.reason == Termination::ResidualNorm);
  CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations + 1));

  auto L2 = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, x[0] * x[0] + 1.0);
  };
  NllsResult r2 = nlls(L2, J, Eigen::VectorXd::Constant(1, 0.7));
  CHECK(r2.reason == Termination::MaxIterations);
  CHECK(r2.iterations == 50);
  // From 1 the first step lands on the stationary point 0.
  NllsConfig pinv;
  pinv.method = LsqMethod::SvdPinv;
  NllsResult r3 = nlls(L2, J, Eigen::VectorXd::Ones(1), pinv);
  CHECK(r3.xi[0] == 0.0);
  CHECK(r3.reason == Termination::StepNorm);
  CHECK_THROWS_AS(nlls(L2, J, Eigen::VectorXd::Ones(1)), RankDeficient);

  auto bad = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, 7.0); };
  CHECK_THROWS_AS(nlls(L, bad, Eigen::VectorXd::Ones(1), cfg), Error);

  NllsConfig c0;
  c0.max_iter = 0;
  CHECK_THROWS_AS(nlls(L, J, Eigen::VectorXd::Ones(1), c0), Error);
}

TEST_CASE("nlls on affine and stalled problems") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 2, 3, 4, 5, 7;
  Eigen::VectorXd b(3);
  b << 1, -1, 2;
  Eigen::VectorXd xt(2);
  xt << 0.5, -0.25;
  const Eigen::VectorXd bc = A * xt;
  NllsResult r = nlls([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - bc; },
                      [&](const Eigen::VectorXd&) { return A; }, Eigen::VectorXd::Zero(2));
  CHECK(r.iterations == 1);
  CHECK((r.xi - xt).norm() < 1e-13);

  // Inconsistent system: the residual never drops below tol, the step does.
  NllsResult s = nlls([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; },
                      [&](const Eigen::VectorXd&) { return A; }, Eigen::VectorXd::Zero(2));
  CHECK(s.reason == Termination::StepNorm);
  CHECK(s.iterations == 2);

  // The clamp hook runs after every update.
  NllsConfig cfg;
  cfg.clamp = [](Eigen::VectorXd& x) { x = x.cwiseMin(0.1); };
  NllsResult c = nlls([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - bc; },
                      [&](const Eigen::VectorXd&) { return A; }, Eigen::VectorXd::Zero(2), cfg);
  CHECK(c.xi.maxCoeff() <= 0.1);
}

TEST_CASE("nlls reports the failing iteration") {
  auto L = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(2, x[0] + x[1] + 1.0); };
  auto J = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Ones(2, 2); };
  try {
    nlls(L, J, Eigen::VectorXd::Zero(2));
    FAIL("expected rank deficiency");
  } catch (const RankDeficient& e) {
    CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
  }
}
