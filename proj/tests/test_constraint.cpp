// Distributed under the MIT License.
// See LICENSE for details.

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tfc/constraint.hpp"
#include "tfc/errors.hpp"

using namespace tfc;

namespace {

constexpr double kPi = std::numbers::pi;

// Polynomial sum c_i x^i with exact derivatives.
class Poly : public Univariate {
 public:
  explicit Poly(std::vector<double> c) : c_(std::move(c)) {}
  double value(double x, int d) const override {
    double acc = 0.0;
    for (std::size_t i = static_cast<std::size_t>(d); i < c_.size(); ++i) {
      double f = 1.0;
      for (int k = 0; k < d; ++k) f *= static_cast<double>(i) - k;
      acc += c_[i] * f * std::pow(x, static_cast<double>(i) - d);
    }
    return acc;
  }

 private:
  std::vector<double> c_;
};

Poly random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(degree + 1));
  for (auto& v : c) v = u(rng);
  return Poly(c);
}

ConstraintOperator point(double a, int d = 0, double coef = 1.0) {
  return {OperatorTerm{coef, DimMode::point(a, d)}};
}

ConstraintOperator random_operator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> loc(-1.0, 2.0);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  std::uniform_int_distribution<int> kind(0, 3);
  switch (kind(rng)) {
    case 0:
      return point(loc(rng), 0, coef(rng));
    case 1:
      return point(loc(rng), 1 + static_cast<int>(rng() % 2), coef(rng));
    case 2: {
      double a = loc(rng), b = loc(rng);
      if (a > b) std::swap(a, b);
      return {OperatorTerm{coef(rng), DimMode::integral(a, b + 0.1)}};
    }
    default:
      return {OperatorTerm{1.0, DimMode::point(loc(rng))},
              OperatorTerm{-1.0, DimMode::point(loc(rng), static_cast<int>(rng() % 2))}};
  }
}

// A random constraint set with a nonsingular monomial support matrix.
std::vector<UnivariateConstraint> random_constraints(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 4);
  std::uniform_real_distribution<double> kap(-3.0, 3.0);
  for (;;) {
    std::vector<UnivariateConstraint> cs(static_cast<std::size_t>(size(rng)));
    for (auto& c : cs) {
      c.op = random_operator(rng);
      c.kappa = kap(rng);
    }
    std::vector<ConstraintOperator> ops;
    for (const auto& c : cs) ops.push_back(c.op);
    Eigen::MatrixXd S = support_matrix(ops, SupportBasis::monomials(static_cast<int>(cs.size())));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] > 1e-3 * sv[0]) return cs;
  }
}

}  // namespace

TEST_CASE("apply_operator") {
  ExprFunction f(parse("x^2"), "x");
  ConstraintOperator op{{2.0, DimMode::point(2.0)}, {kPi, DimMode::point(0.0, 2)}};
  CHECK(apply_operator(op, f) == doctest::Approx(8.0 + 2.0 * kPi).epsilon(1e-15));
  ExprFunction one(parse("1"), "x");
  CHECK(apply_operator({{1.0, DimMode::integral(-2.0, 3.0)}}, one) ==
        doctest::Approx(5.0).epsilon(1e-14));

  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    Poly f1 = random_poly(rng, 3), f2 = random_poly(rng, 3);
    LambdaFunction sum([&](double x, int d) { return f1.value(x, d) + f2.value(x, d); });
    ConstraintOperator o = random_operator(rng);
    CHECK(std::fabs(apply_operator(o, sum) - apply_operator(o, f1) - apply_operator(o, f2)) <
          1e-12);
  }
}

TEST_CASE("support matrices of the worked examples") {
  std::vector<ConstraintOperator> ops{point(0.0), point(1.0, 1), point(2.0)};
  Eigen::MatrixXd S = support_matrix(ops, SupportBasis({0, 2, 3}));
  Eigen::Matrix3d expect;
  expect << 1, 0, 0, 0, 2, 3, 1, 4, 8;
  CHECK((S - expect).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd alpha = solve_switching(S);
  Eigen::Matrix3d a;
  a << 1, 0, 0, 0.75, 2, -0.75, -0.5, -1, 0.5;
  CHECK((alpha - a).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd Ssing = support_matrix(ops, SupportBasis::monomials(3));
  Eigen::Matrix3d es;
  es << 1, 0, 0, 0, 1, 2, 1, 2, 4;
  CHECK((Ssing - es).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(solve_switching(Ssing), SingularSupport);

  std::vector<ConstraintOperator> iops{{OperatorTerm{1.0, DimMode::integral(-2, 3)}},
                                       {OperatorTerm{3.0, DimMode::integral(0, 2)}}};
  Eigen::MatrixXd Si = support_matrix(iops, SupportBasis::monomials(2));
  Eigen::Matrix2d ei;
  ei << 5, 2.5, 6, 6;
  CHECK((Si - ei).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::Matrix2d ai;
  ai << 0.4, -1.0 / 6.0, -0.4, 1.0 / 3.0;
  CHECK((solve_switching(Si) - ai).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Si * solve_switching(Si) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

  CHECK((solve_switching(Eigen::MatrixXd::Identity(4, 4)) -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() == 0.0);
}

TEST_CASE("switching functions of the worked examples") {
  UnivariateCE ce({{point(0.0), 1.0}, {point(1.0, 1), 2.0}, {point(2.0), 3.0}}, {0, 2, 3});
  UnivariateCE ci({{{OperatorTerm{1.0, DimMode::integral(-2, 3)}}, 5.0},
                   {{OperatorTerm{3.0, DimMode::integral(0, 2)}}, 2.0}});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    const double x2 = x * x, x3 = x2 * x;
    CHECK(ce.switching().phi(0, x, 0) == doctest::Approx((-2 * x3 + 3 * x2 + 4) / 4));
    CHECK(ce.switching().phi(1, x, 0) == doctest::Approx(-x3 + 2 * x2));
    CHECK(ce.switching().phi(2, x, 0) == doctest::Approx((2 * x3 - 3 * x2) / 4));
    CHECK(ci.switching().phi(0, x, 0) == doctest::Approx((2 - 2 * x) / 5));
    CHECK(ci.switching().phi(1, x, 0) == doctest::Approx((2 * x - 1) / 6));
  }

  UnivariateCE single({{point(0.0), 4.0}});
  Poly g({1.0, 2.0, 3.0});
  CHECK(single.evaluate(g, 0.7) == doctest::Approx(g.value(0.7, 0) + 4.0 - g.value(0.0, 0)));
}

TEST_CASE("projection values") {
  UnivariateConstraint c{{{2.0, DimMode::point(2.0)}, {kPi, DimMode::point(0.0, 2)}}, 3.0};
  ExprFunction g(parse("x^2"), "x");
  CHECK(projection_value(c, g) == doctest::Approx(3.0 - (8.0 + 2.0 * kPi)).epsilon(1e-15));
  UnivariateConstraint sat{point(1.0), 1.0};
  CHECK(projection_value(sat, g) == 0.0);
}

TEST_CASE("constrained expression evaluation") {
  UnivariateCE ce({{point(0.0), 1.0}, {point(1.0, 1), 2.0}, {point(2.0), 3.0}}, {0, 2, 3});
  LambdaFunction zero([](double, int) { return 0.0; });
  CHECK(ce.evaluate(zero, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ce.evaluate(zero, 1.0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ce.evaluate(zero, 2.0) == doctest::Approx(3.0).epsilon(1e-15));

  Poly g0({0.3, -1.0, 0.0, 1.0});
  CeFunction y(ce, g0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  std::uniform_real_distribution<double> beta(-5.0, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    CHECK(std::fabs(ce.evaluate(y, x) - ce.evaluate(g0, x)) < 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    const double b1 = beta(rng), b2 = beta(rng), b3 = beta(rng);
    Poly gb({b1, 0.0, b2, 1.0 + b3});
    Poly g3({0.0, 0.0, 0.0, 1.0});
    const double x = u(rng);
    CHECK(std::fabs(ce.evaluate(gb, x) - ce.evaluate(g3, x)) < 1e-11);
  }

  // Affine form agrees with direct evaluation for g = h . xi.
  Eigen::Vector3d xi(0.4, -0.2, 0.9);
  auto h = [](double x, int d) {
    Eigen::RowVectorXd r(3);
    for (int k = 0; k < 3; ++k) {
      const int e = k + 1;
      r[k] = d > e ? 0.0 : std::tgamma(e + 1) / std::tgamma(e - d + 1) * std::pow(x, e - d);
    }
    return r;
  };
  auto hint = [](double a, double b) {
    Eigen::RowVectorXd r(3);
    for (int k = 0; k < 3; ++k) r[k] = (std::pow(b, k + 2) - std::pow(a, k + 2)) / (k + 2);
    return r;
  };
  Poly gx({0.0, 0.4, -0.2, 0.9});
  for (double x : {-1.0, 0.5, 2.5}) {
    Eigen::RowVectorXd row;
    double off = 0.0;
    ce.evaluate_affine(h, hint, x, 1, row, off);
    CHECK(row.dot(xi) + off == doctest::Approx(ce.evaluate(gx, x, 1)).epsilon(1e-13));
  }
}

TEST_CASE("property: constraint satisfaction, idempotence, null space, Kronecker") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::uniform_real_distribution<double> beta(-2.0, 2.0);
  for (int set = 0; set < 100; ++set) {
    auto cs = random_constraints(rng);
    UnivariateCE ce(cs);
    const auto& sw = ce.switching();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (int j = 0; j < sw.count(); ++j) {
        LambdaFunction phi([&](double x, int d) { return sw.phi(j, x, d); });
        const double v = apply_operator(cs[i].op, phi);
        CHECK(std::fabs(v - (static_cast<int>(i) == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
    Poly g = random_poly(rng, 6);
    CeFunction y(ce, g);
    for (const auto& c : cs) {
      CHECK(std::fabs(apply_operator(c.op, y) - c.kappa) < 1e-10);
    }
    CeFunction yy(ce, y);
    std::vector<double> span_c(cs.size());
    for (auto& c : span_c) c = beta(rng);
    LambdaFunction shifted([&](double x, int d) {
      double v = g.value(x, d);
      for (std::size_t s = 0; s < span_c.size(); ++s) {
        v += span_c[s] * sw.supports().value(s, x, d);
      }
      return v;
    });
    for (int k = 0; k < 5; ++k) {
      const double x = u(rng);
      const double base = y.value(x, 0);
      CHECK(std::fabs(yy.value(x, 0) - base) < 1e-12 * std::max(1.0, std::fabs(base)));
      CHECK(std::fabs(ce.evaluate(shifted, x) - base) <
            1e-12 * std::max(1.0, std::fabs(base)) * 10);
    }
  }
}
