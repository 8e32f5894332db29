// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/problems.hpp"

#include <numbers>

#include "tfc/errors.hpp"

namespace tfc {

namespace {

constexpr double kPi = std::numbers::pi;

Expr P(const char* text) { return parse(text); }

BasisSpec polynomial(Family f, int degree) {
  BasisSpec b;
  b.kind = BasisSpec::Kind::Polynomial;
  b.family = f;
  b.degree = degree;
  b.total_degree = true;
  return b;
}

BasisSpec elm(int neurons, std::uint64_t seed, double lo, double hi) {
  BasisSpec b;
  b.kind = BasisSpec::Kind::Elm;
  b.neurons = neurons;
  b.seed = seed;
  b.weight_lo = lo;
  b.weight_hi = hi;
  b.activation = Activation::Tanh;
  return b;
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::Tfc:
      return "tfc";
    case Method::Spectral:
      return "spectral";
    case Method::Xtfc:
      return "xtfc";
  }
  return "tfc";
}

}  // namespace

Constraint point_constraint(int dim, double a, int d, const Expr& kappa) {
  Constraint c;
  c.dim = dim;
  c.op = {{1.0, DimMode::point(a, d)}};
  c.kappa = kappa;
  return c;
}

int simple_pde_basis_size(int m) {
  if (m < 2) throw Error("degree must be at least 2");
  return (m + 1) * (m + 2) / 2 - 4;
}

int wave2d_basis_size(int degree) {
  if (degree < 3) throw Error("degree must be at least 3");
  return (degree + 1) * (degree + 2) * (degree + 3) / 6 - 8;
}

DeProblem simple_pde_problem(int n, int m, Method method, std::uint64_t seed) {
  DeProblem p;
  p.id = "simple-pde-" + method_tag(method);
  p.dims = {{"x", 0.0, 1.0}, {"y", 0.0, 1.0}};
  DeVariable u;
  u.name = "u";
  u.constraints = {point_constraint(0, 0.0, 0, P("y^3")),
                   point_constraint(0, 1.0, 0, P("(1 + y^3)*exp(-1)")),
                   point_constraint(1, 0.0, 0, P("x*exp(-x)")),
                   point_constraint(1, 1.0, 0, P("exp(-x)*(x + 1)"))};
  u.exact = P("exp(-x)*(x + y^3)");
  if (method == Method::Xtfc) {
    u.basis = elm(m, seed, -1.0, 1.0);
    p.solver.method = LsqMethod::IllConditioned;
  } else {
    u.basis = polynomial(Family::Chebyshev, m);
    if (method == Method::Spectral) {
      p.spectral = true;
      p.solver.method = LsqMethod::SvdPinv;
    }
  }
  p.variables = {u};
  p.residuals = {P("u_xx + u_yy - exp(-x)*(x - 2 + y^3 + 6*y)")};
  p.train = {{n, n}, GridKind::Cgl};
  p.test = {{100, 100}, GridKind::Uniform};
  return p;
}

DeProblem wave1d_problem(int degree, int n) {
  DeProblem p;
  p.id = "wave1d";
  p.dims = {{"x", 0.0, 1.0}, {"t", 0.0, 1.0}};
  DeVariable u;
  u.name = "u";
  u.constraints = {point_constraint(0, 0.0, 0, P("0")),
                   point_constraint(0, 1.0, 0, P("0")),
                   point_constraint(1, 0.0, 0, P("sin(pi*x)")),
                   point_constraint(1, 0.0, 1, P("0"))};
  u.exact = P("sin(pi*x)*cos(pi*t)");
  u.basis = polynomial(Family::Legendre, degree);
  p.variables = {u};
  p.residuals = {P("u_xx - u_tt")};
  p.train = {{n, n}, GridKind::Cgl};
  p.test = {{100, 100}, GridKind::Uniform};
  return p;
}

DeProblem wave2d_problem(int m, Method method, int n, std::uint64_t seed) {
  DeProblem p;
  p.id = "wave2d-" + method_tag(method);
  p.dims = {{"x", 0.0, 1.0}, {"y", 0.0, 1.0}, {"t", 0.0, 1.0}};
  DeVariable u;
  u.name = "u";
  u.constraints = {point_constraint(0, 0.0, 0, P("0")),
                   point_constraint(0, 1.0, 0, P("0")),
                   point_constraint(1, 0.0, 0, P("0")),
                   point_constraint(1, 1.0, 0, P("0")),
                   point_constraint(2, 0.0, 0, P("sin(pi*x)*sin(pi*y)")),
                   point_constraint(2, 0.0, 1, P("0"))};
  u.exact = P("sin(pi*x)*sin(pi*y)*cos(pi*sqrt(2)/8*t)");
  if (method == Method::Xtfc) {
    u.basis = elm(m, seed, -1.0, 1.0);
    p.solver.method = LsqMethod::IllConditioned;
  } else {
    u.basis = polynomial(Family::Chebyshev, m);
    if (method == Method::Spectral) {
      p.spectral = true;
      p.solver.method = LsqMethod::SvdPinv;
    }
  }
  p.variables = {u};
  p.residuals = {P("u_xx + u_yy - 64*u_tt")};
  p.train = {{n, n, n}, GridKind::Uniform};
  p.test = {{15, 15, 15}, GridKind::Uniform};
  return p;
}

DeProblem biharmonic_cartesian_problem(int degree, int n) {
  DeProblem p;
  p.id = "biharmonic-cart";
  p.dims = {{"x", 0.0, 1.0}, {"y", 0.0, 1.0}};
  DeVariable u;
  u.name = "u";
  const Expr zero = P("0");
  u.constraints = {point_constraint(0, 0.0, 0, zero), point_constraint(0, 1.0, 0, zero),
                   point_constraint(0, 0.0, 2, zero), point_constraint(0, 1.0, 2, zero),
                   point_constraint(1, 0.0, 0, zero), point_constraint(1, 1.0, 0, zero),
                   point_constraint(1, 0.0, 2, zero), point_constraint(1, 1.0, 2, zero)};
  u.exact = P("sin(pi*x)*sin(pi*y)/pi^2");
  u.basis = polynomial(Family::Chebyshev, degree);
  p.variables = {u};
  p.residuals = {P("u_xxxx + 2*u_xxyy + u_yyyy - 4*pi^2*sin(pi*x)*sin(pi*y)")};
  p.train = {{n, n}, GridKind::Cgl};
  p.test = {{100, 100}, GridKind::Uniform};
  return p;
}

DeProblem biharmonic_polar_problem(int degree, int n) {
  DeProblem p;
  p.id = "biharmonic-polar";
  p.dims = {{"r", 1.0, 4.0}, {"th", 0.0, 2.0 * kPi}};
  DeVariable u;
  u.name = "u";
  u.constraints = {
      point_constraint(0, 1.0, 0, P("sin(2*th)/4 + sin(3*th)/16 + pi*cos(th) + 1/8")),
      point_constraint(0, 4.0, 0, P("4*sin(2*th) + 4*sin(3*th) + pi*cos(th)/4 + 2")),
      point_constraint(0, 1.0, 2, P("sin(2*th)/2 + 3*sin(3*th)/8 + 2*pi*cos(th) + 1/4")),
      point_constraint(0, 4.0, 2, P("sin(2*th)/2 + 3*sin(3*th)/2 + pi*cos(th)/32 + 1/4"))};
  for (int d = 0; d < 4; ++d) {
    Constraint c;
    c.dim = 1;
    c.op = {{1.0, DimMode::point(0.0, d)}, {-1.0, DimMode::point(2.0 * kPi, d)}};
    c.kappa = P("0");
    u.constraints.push_back(c);
  }
  // The constant function satisfies every periodic constraint, so the
  // th-supports start at the linear term.
  u.supports[1] = {1, 2, 3, 4};
  u.exact = P("r^3/16*sin(3*th) + r^2/4*sin(2*th) + r^2/8 + pi*cos(th)/r");
  u.basis = polynomial(Family::Chebyshev, degree);
  p.variables = {u};
  p.residuals = {P("u_rrrr + 2/r^2*u_rrthth + 1/r^4*u_thththth + 2/r*u_rrr"
                   " - 2/r^3*u_rthth - 1/r^2*u_rr + 4/r^4*u_thth + 1/r^3*u_r")};
  p.train = {{n, n}, GridKind::Cgl};
  p.test = {{100, 100}, GridKind::Uniform};
  // The periodic projection leaves the system numerically rank deficient.
  p.solver.method = LsqMethod::IllConditioned;
  return p;
}

DeProblem convection_diffusion_problem(double peclet, int degree, int n) {
  DeProblem p;
  p.id = "convection-diffusion";
  p.dims = {{"x", 0.0, 1.0}};
  p.parameters["Pe"] = peclet;
  DeVariable y;
  y.name = "y";
  y.constraints = {point_constraint(0, 0.0, 0, P("1")),
                   point_constraint(0, 1.0, 0, P("0"))};
  y.exact = P("(1 - exp(Pe*(x - 1)))/(1 - exp(-Pe))");
  y.basis = polynomial(Family::Legendre, degree);
  p.variables = {y};
  p.residuals = {P("y_xx - Pe*y_x")};
  p.train = {{n}, GridKind::Cgl};
  p.test = {{1000}, GridKind::Uniform};
  return p;
}

SplitSpec convection_diffusion_split(int degree, int n) {
  SplitSpec s;
  s.bounds = {1e-3, 1.0 - 1e-3};
  s.xp0 = 0.5;
  // Linear interpolant of the boundary values at the initial split.
  s.yp0 = 0.5;
  s.dyp0 = -1.0;
  s.points = n;
  s.test_points = 1000;
  s.basis = polynomial(Family::Legendre, degree);
  return s;
}

const std::vector<BalloonAtmosphere>& balloon_atmosphere() {
  static const std::vector<BalloonAtmosphere> table = {
      {52, 1.28, 11.62, 8.719},  {53, 1.15, 10.74, 8.716},
      {54, 1.03, 9.97, 8.713},   {55, 0.921, 9.29, 8.71},
      {56, 0.818, 8.67, 8.707},  {57, 0.721, 8.12, 8.704},
      {58, 0.629, 7.58, 8.702},  {59, 0.545, 7.14, 8.699},
      {60, 0.469, 6.812, 8.696}, {61, 0.41, 6.675, 8.693},
      {62, 0.341, 6.2675, 8.69}};
  return table;
}

DeProblem balloon_problem(int altitude_km, int degree, int n) {
  const BalloonAtmosphere* atm = nullptr;
  for (const auto& row : balloon_atmosphere()) {
    if (row.altitude_km == altitude_km) atm = &row;
  }
  if (!atm) throw ConfigError("altitude", "no atmospheric data for this altitude");
  DeProblem p;
  p.id = "balloon-" + std::to_string(altitude_km);
  p.dims = {{"z", -1.0, 1.0}};
  const double g = atm->gravity;
  p.parameters = {{"Rs", 2.5},        {"w", 0.095},      {"ws", 0.215},
                  {"g", g},           {"rho", atm->density},
                  {"msg", atm->gas_mass},                {"L", 208.0 * g},
                  {"b", g * atm->density * (1.0 - 4e-3 / 4.34e-2)}};
  p.extras = {{"beta", 1.0, std::nullopt}, {"ld", 12.0, std::nullopt}};

  const std::string y0 = "(Rs*(1 - cos(beta)))";
  const std::string as0 = "(2*pi*Rs*" + y0 + ")";
  const std::string vs0 = "(pi/3*" + y0 + "^2*(3*Rs - " + y0 + "))";
  const std::string vs = "(4/3*pi*Rs^3)";
  const std::string t0 = "(L + g*(w + ws)*" + as0 + " + g*(" + vs0 + "/" + vs +
                         "*msg - rho*" + vs0 + "))";
  const std::string c = "(2/(ld - Rs*beta))";

  auto var = [&](const char* name) {
    DeVariable v;
    v.name = name;
    v.basis = polynomial(Family::Chebyshev, degree);
    return v;
  };
  DeVariable th = var("th"), q = var("q"), r = var("r"), y = var("y");
  th.constraints = {point_constraint(0, -1.0, 0, P("pi/2 - beta")),
                    point_constraint(0, 1.0, 0, P("-pi/2"))};
  q.constraints = {point_constraint(0, -1.0, 0, parse("2*pi*cos(beta)/" + t0))};
  r.constraints = {point_constraint(0, -1.0, 0, P("Rs*sin(beta)")),
                   point_constraint(0, 1.0, 0, P("0"))};
  y.constraints = {point_constraint(0, -1.0, 0, parse(y0))};
  p.variables = {th, q, r, y};
  p.residuals = {
      parse(c + "*th_z + q*r*w*sin(th) + q*r*b*(y - " + y0 + ")"),
      parse(c + "*q_z + q^2*w*r*cos(th)"),
      parse(c + "*r_z - sin(th)"),
      parse(c + "*y_z - cos(th)")};
  p.train = {{n}, GridKind::Cgl};
  p.test = {{100}, GridKind::Uniform};
  p.solver.method = LsqMethod::ScaledQr;
  p.solver.tol = 1e-13;
  p.solver.max_iter = 100;
  p.solver.warm_start_iterations = 20;
  return p;
}

}  // namespace tfc
