// Distributed under the MIT License.
// See LICENSE for details.

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tfc/desolve.hpp"
#include "tfc/errors.hpp"
#include "tfc/problems.hpp"

using namespace tfc;

namespace {

DeProblem single_slope_problem() {
  DeProblem p;
  p.id = "slope";
  p.dims = {{"x", -1.0, 1.0}};
  DeVariable u;
  u.name = "u";
  u.constraints = {point_constraint(0, 0.0, 0, parse("2"))};
  u.basis.family = Family::Chebyshev;
  u.basis.degree = 1;
  u.basis.removal[0] = {0};
  p.variables = {u};
  p.residuals = {parse("u_x")};
  p.train = {{7}, GridKind::Cgl};
  p.test = {{11}, GridKind::Uniform};
  return p;
}

Eigen::VectorXd perturbed(const DeModel& m, double scale, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd t = m.initial_theta();
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] += u(rng);
  return t;
}

}  // namespace

TEST_CASE("grid kinds round-trip") {
  CHECK(grid_kind_from_name(grid_kind_name(GridKind::Cgl)) == GridKind::Cgl);
  CHECK(grid_kind_from_name(grid_kind_name(GridKind::Uniform)) ==
        GridKind::Uniform);
  CHECK_THROWS_AS(grid_kind_from_name("random"), Error);
}

TEST_CASE("tensor grids place the last dimension fastest") {
  const Eigen::MatrixXd X =
      make_grid({{"x", 0.0, 1.0}, {"y", 2.0, 4.0}}, {{2, 3}, GridKind::Uniform});
  REQUIRE(X.rows() == 6);
  CHECK(X(0, 0) == 0.0);
  CHECK(X(1, 0) == 0.0);
  CHECK(X(3, 0) == 1.0);
  CHECK(X(0, 1) == 2.0);
  CHECK(X(1, 1) == doctest::Approx(3.0));
  CHECK(X(2, 1) == 4.0);
  const Eigen::MatrixXd C = make_grid({{"x", 0.0, 1.0}}, {{5}, GridKind::Cgl});
  // Oracle: (1 - cos(j pi / 4)) / 2.
  for (int j = 0; j < 5; ++j) {
    CHECK(C(j, 0) ==
          doctest::Approx((1.0 - std::cos(j * std::numbers::pi / 4)) / 2).epsilon(1e-15));
  }
}

TEST_CASE("derivative symbols") {
  const std::vector<std::string> vars = {"u", "v"};
  const std::vector<std::string> dims = {"r", "th"};
  auto s = parse_derivative_symbol("u_rrthth", vars, dims);
  REQUIRE(s);
  CHECK(s->variable == 0);
  CHECK(s->orders == std::vector<int>{2, 2});
  s = parse_derivative_symbol("v", vars, dims);
  REQUIRE(s);
  CHECK(s->variable == 1);
  CHECK(s->orders == std::vector<int>{0, 0});
  CHECK_FALSE(parse_derivative_symbol("u_z", vars, dims));
  CHECK_FALSE(parse_derivative_symbol("w_r", vars, dims));
  CHECK_FALSE(parse_derivative_symbol("r", vars, dims));
}

TEST_CASE("a slope residual assembles to a column of ones") {
  const LinearSystem ls = assemble_linear(single_slope_problem());
  REQUIRE(ls.A.cols() == 1);
  REQUIRE(ls.A.rows() == 7);
  for (Eigen::Index i = 0; i < 7; ++i) {
    CHECK(ls.A(i, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(ls.b[i]) < 1e-15);
  }
}

TEST_CASE("products of unknowns are rejected by the linear assembly") {
  DeProblem p = single_slope_problem();
  p.residuals = {parse("u*u_x - 1")};
  DeModel m(p);
  CHECK_FALSE(m.is_affine());
  CHECK_THROWS_AS(m.assemble_linear(), NonAffineResidual);
  p.residuals = {parse("sin(x)*u_x - x^2")};
  CHECK(DeModel(p).is_affine());
}

TEST_CASE("malformed problems raise configuration errors") {
  DeProblem p = single_slope_problem();
  p.residuals = {parse("u_y")};
  CHECK_THROWS_AS(DeModel{p}, ConfigError);
  p = single_slope_problem();
  p.variables[0].name = "x";
  CHECK_THROWS_AS(DeModel{p}, ConfigError);
}

TEST_CASE("jacobian matches central differences") {
  const DeModel m(balloon_problem(52, 12, 20));
  const Eigen::VectorXd t = perturbed(m, 0.05, 11);
  const Eigen::MatrixXd J = m.jacobian(t);
  REQUIRE(J.rows() == m.num_rows());
  REQUIRE(J.cols() == m.num_unknowns());
  Eigen::MatrixXd fd(J.rows(), J.cols());
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(t[k]));
    Eigen::VectorXd a = t, b = t;
    a[k] += h;
    b[k] -= h;
    fd.col(k) = (m.residual(a) - m.residual(b)) / (2.0 * h);
  }
  CHECK((J - fd).norm() / fd.norm() < 1e-5);
}

TEST_CASE("a linear problem on the iterative path converges in one step") {
  DeProblem p = simple_pde_problem(15, 15);
  const SolveReport direct = solve(p);
  p.solver.force_nonlinear = true;
  const SolveReport iterative = solve(p);
  CHECK(iterative.nonlinear);
  CHECK(iterative.iterations == 1);
  CHECK(iterative.converged);
  REQUIRE(direct.xi.size() == 1);
  CHECK((direct.xi[0] - iterative.xi[0]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("clamp cases") {
  const InequalityClamp c(parse("0"), parse("1"));
  CHECK(c.value(-10.0, 0.3) == 0.0);
  CHECK(c.derivative(-10.0, 4.0, 0.3) == 0.0);
  CHECK(c.value(10.0, 0.3) == 1.0);
  CHECK(c.value(0.25, 0.3) == 0.25);
  CHECK(c.derivative(0.25, 4.0, 0.3) == 4.0);
  CHECK(c.sensitivity(0.25, 0.3) == 1.0);
  CHECK(c.sensitivity(-1.0, 0.3) == 0.0);

  const InequalityClamp s(parse("x - 1"), parse("x^2 + 1"));
  CHECK(s.value(-5.0, 2.0) == 1.0);
  // Clamped to the upper bound, the derivative follows it: d(x^2 + 1) = 2x.
  CHECK(s.derivative(9.0, 0.0, 2.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(InequalityClamp(parse("x + 2"), parse("x")), ConfigError);
}

TEST_CASE("property: clamped output never leaves its bounds") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), w = std::abs(u(rng)) + 0.1, k = u(rng);
    const double f = u(rng), amp = 5.0 * u(rng);
    Bindings fixed{{"a", a}, {"w", w}, {"k", k}};
    const InequalityClamp c(parse("a + k*sin(x)"), parse("a + k*sin(x) + w"), "x",
                            fixed);
    LambdaFunction inner([&](double x, int d) {
      return d == 0 ? amp * std::sin(f * x) : amp * f * std::cos(f * x);
    });
    const ClampedFunction y(inner, c);
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng);
      const double v = y.value(x, 0);
      CHECK(v >= c.lower(x) - 1e-15);
      CHECK(v <= c.upper(x) + 1e-15);
    }
  }
}

TEST_CASE("clamping a constrained expression keeps an in-bounds point constraint") {
  const UnivariateCE ce({{{{1.0, DimMode::point(0.3)}}, 0.5}});
  const ExprFunction g(parse("3*sin(5*x) + x^2"), "x");
  const CeFunction y(ce, g);
  const InequalityClamp c(parse("0"), parse("1"));
  const ClampedFunction yc(y, c);
  CHECK(yc.value(0.3, 0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x = -1.0; x <= 1.0; x += 0.05) {
    CHECK(yc.value(x, 0) >= 0.0);
    CHECK(yc.value(x, 0) <= 1.0);
  }
  CHECK_THROWS_AS(yc.value(0.1, 2), Error);
}

TEST_CASE("split constrained expressions are continuous for any coefficients") {
  SplitSpec s = convection_diffusion_split(12, 16);
  const DeProblem sp = make_split_problem(convection_diffusion_problem(3.0, 12, 16), s);
  REQUIRE(sp.variables.size() == 2);
  CHECK(sp.variables[0].name == "y1");
  CHECK(sp.variables[1].name == "y2");
  const DeModel m(sp);
  const Eigen::VectorXd t = perturbed(m, 0.3, 5);
  const Eigen::VectorXd xi = m.full_xi(t);
  const Bindings sym = m.symbols(t);
  const double xp = sym.at("xp"), yp = sym.at("yp"), dyp = sym.at("dyp");
  const double c1 = 2.0 / xp, c2 = 2.0 / (1.0 - xp);
  Eigen::MatrixXd z(1, 1);
  auto at = [&](int v, double zz, int d) {
    z(0, 0) = zz;
    return m.system().evaluate(v, z, {DimMode::point(zz, d)}, xi, sym)[0];
  };
  CHECK(at(0, 1.0, 0) == doctest::Approx(yp).epsilon(1e-13));
  CHECK(at(1, -1.0, 0) == doctest::Approx(yp).epsilon(1e-13));
  CHECK(c1 * at(0, 1.0, 1) == doctest::Approx(dyp).epsilon(1e-12));
  CHECK(c2 * at(1, -1.0, 1) == doctest::Approx(dyp).epsilon(1e-12));
  CHECK(at(0, -1.0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(at(1, 1.0, 0)) < 1e-13);
}

TEST_CASE("split solve at a low Peclet number") {
  const SolveReport r =
      solve_split(convection_diffusion_problem(1.0, 30, 40), convection_diffusion_split(30, 40));
  CHECK(r.converged);
  REQUIRE(r.max_error);
  CHECK(*r.max_error < 1e-13);
  const TestSamples& ts = r.samples;
  const Eigen::Index n = ts.points.rows() / 2;
  // The two halves meet at the split point.
  CHECK(ts.points(n - 1, 0) == doctest::Approx(ts.points(n, 0)).epsilon(1e-15));
  CHECK(ts.values[0][n - 1] == doctest::Approx(ts.values[0][n]).epsilon(1e-14));
}

TEST_CASE("embedded constraints hold at random boundary samples") {
  CHECK(solve(simple_pde_problem(10, 10)).constraint_error < 1e-13);
  CHECK(solve(wave1d_problem(12, 16)).constraint_error < 1e-13);
  CHECK(solve(biharmonic_cartesian_problem(12, 14)).constraint_error < 1e-13);
  CHECK(solve(balloon_problem(55, 20, 30)).constraint_error < 1e-12);
}

TEST_CASE("simple PDE error does not grow with the basis") {
  double previous = 1.0;
  for (int m : {5, 10, 15}) {
    const SolveReport r = solve(simple_pde_problem(30, m));
    REQUIRE(r.max_error);
    CHECK(r.basis_size == simple_pde_basis_size(m));
    CHECK(*r.max_error <= 10.0 * previous);
    previous = *r.max_error;
  }
  CHECK(previous < 1e-13);
}

TEST_CASE("TFC beats the spectral variant at n = m = 15") {
  const SolveReport tfc = solve(simple_pde_problem(15, 15));
  const SolveReport spectral = solve(simple_pde_problem(15, 15, Method::Spectral));
  REQUIRE(tfc.max_error);
  REQUIRE(spectral.max_error);
  CHECK(*tfc.max_error < *spectral.max_error);
  CHECK(spectral.basis_size == 136);
}

TEST_CASE("basis sizes") {
  CHECK(simple_pde_basis_size(5) == 17);
  CHECK(simple_pde_basis_size(25) == 347);
  CHECK(wave2d_basis_size(3) == 12);
  CHECK(wave2d_basis_size(18) == 1322);
}

TEST_CASE("non-convergence is reported") {
  DeProblem p = balloon_problem(52, 12, 20);
  p.solver.max_iter = 1;
  p.solver.warm_start_iterations = 0;
  const SolveReport r = solve(p);
  CHECK_FALSE(r.converged);
  REQUIRE(r.termination);
  CHECK(*r.termination == Termination::MaxIterations);
}
