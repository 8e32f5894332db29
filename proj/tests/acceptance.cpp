// Distributed under the MIT License.
// See LICENSE for details.

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tfc/constraint.hpp"
#include "tfc/desolve.hpp"
#include "tfc/errors.hpp"
#include "tfc/freefn.hpp"
#include "tfc/multivar.hpp"
#include "tfc/problems.hpp"

using namespace tfc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) { return fmt::format("{:.3e}", v); }

double max_error(const SolveReport& r) { return r.max_error.value_or(INFINITY); }
double mean_error(const SolveReport& r) { return r.mean_error.value_or(INFINITY); }

// ---------------------------------------------------------------------------
// Benchmark problems.

Outcome simple_pde_tfc() {
  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport r15 = solve(simple_pde_problem(15, 15));
  const double wall = seconds_since(t0);
  const SolveReport r10 = solve(simple_pde_problem(10, 10));
  const bool pass = max_error(r15) <= 1e-13 && wall < 10.0 && max_error(r10) <= 1e-8;
  return {pass, fmt::format("n=m=15 max {} (<= 1e-13) in {:.2f} s (< 10 s); n=m=10 max {} "
                            "(<= 1e-8)",
                            sci(max_error(r15)), wall, sci(max_error(r10)))};
}

Outcome simple_pde_spectral() {
  const double tfc = max_error(solve(simple_pde_problem(15, 15)));
  const double spec = max_error(solve(simple_pde_problem(15, 15, Method::Spectral)));
  const bool pass = spec >= 1e-13 && spec <= 1e-10 && tfc < spec;
  return {pass, fmt::format("spectral max {} in [1e-13, 1e-10]; TFC max {} < spectral",
                            sci(spec), sci(tfc))};
}

Outcome simple_pde_xtfc() {
  double best = INFINITY;
  std::uint64_t best_seed = 0;
  for (std::uint64_t seed = 0; seed <= 9; ++seed) {
    const double e = max_error(solve(simple_pde_problem(15, 132, Method::Xtfc, seed)));
    if (e < best) {
      best = e;
      best_seed = seed;
    }
  }
  return {best <= 1e-9,
          fmt::format("best of seeds 0-9: max {} (seed {}) <= 1e-9", sci(best), best_seed)};
}

Outcome wave1d() {
  const double e = mean_error(solve(wave1d_problem(20, 30)));
  return {e <= 1e-12, fmt::format("mean {} <= 1e-12", sci(e))};
}

// Seeds are tried in order until one meets `target`; best-of-10 meets the
// target exactly when some seed does.
std::pair<double, std::uint64_t> first_xtfc_below(int neurons, double target) {
  double best = INFINITY;
  std::uint64_t best_seed = 0;
  for (std::uint64_t seed = 0; seed <= 9; ++seed) {
    const double e = mean_error(solve(wave2d_problem(neurons, Method::Xtfc, 11, seed)));
    if (e < best) {
      best = e;
      best_seed = seed;
    }
    if (best < target) break;
  }
  return {best, best_seed};
}

Outcome wave2d() {
  const auto [e650, s650] = first_xtfc_below(650, 1e-3);
  const double tfc212 = mean_error(solve(wave2d_problem(9, Method::Tfc)));
  const auto [e212, s212] = first_xtfc_below(212, tfc212);
  const bool pass = e650 <= 1e-3 && e212 < tfc212;
  return {pass, fmt::format("X-TFC 650 mean {} (seed {}) <= 1e-3; at 212: X-TFC mean {} "
                            "(seed {}) < TFC mean {}",
                            sci(e650), s650, sci(e212), s212, sci(tfc212))};
}

Outcome biharmonic_cartesian() {
  const double e = mean_error(solve(biharmonic_cartesian_problem(26, 20)));
  return {e <= 1e-12, fmt::format("mean {} <= 1e-12", sci(e))};
}

Outcome biharmonic_polar() {
  const double e = mean_error(solve(biharmonic_polar_problem(30, 30)));
  return {e <= 1e-6, fmt::format("mean {} <= 1e-6", sci(e))};
}

Outcome convection_diffusion() {
  const double whole = max_error(solve(convection_diffusion_problem(1.0)));
  const SolveReport split =
      solve_split(convection_diffusion_problem(1e6), convection_diffusion_split());
  const bool pass = whole <= 1e-13 && max_error(split) <= 1e-9 && mean_error(split) <= 1e-11;
  return {pass, fmt::format("Pe=1 whole max {} <= 1e-13; Pe=1e6 split max {} <= 1e-9, "
                            "mean {} <= 1e-11",
                            sci(whole), sci(max_error(split)), sci(mean_error(split)))};
}

Outcome balloon() {
  double worst_res = 0.0, worst_end = 0.0;
  bool converged = true;
  for (const BalloonAtmosphere& atm : balloon_atmosphere()) {
    const SolveReport r = solve(balloon_problem(atm.altitude_km));
    converged = converged && r.converged;
    worst_res = std::max(worst_res, r.max_residual);
    // r vanishes at the far end of the basis interval.
    const auto it = std::find(r.samples.variables.begin(), r.samples.variables.end(), "r");
    const auto v = static_cast<std::size_t>(it - r.samples.variables.begin());
    Eigen::Index last = 0;
    r.samples.points.col(0).maxCoeff(&last);
    worst_end = std::max(worst_end, std::fabs(r.samples.values.at(v)[last]));
  }
  const bool pass = converged && worst_res <= 1e-12 && worst_end <= 1e-12;
  return {pass, fmt::format("{} altitudes converged: {}; max residual {} <= 1e-12; "
                            "max |r(l_d)| {}",
                            balloon_atmosphere().size(), converged ? "yes" : "no",
                            sci(worst_res), sci(worst_end))};
}

// ---------------------------------------------------------------------------
// Property suites.

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

ConstraintOperator at(double a, int d = 0, double coef = 1.0) {
  return {OperatorTerm{coef, DimMode::point(a, d)}};
}

ConstraintOperator random_operator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> loc(-1.0, 2.0);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  switch (rng() % 4) {
    case 0:
      return at(loc(rng), 0, coef(rng));
    case 1:
      return at(loc(rng), 1 + static_cast<int>(rng() % 2), coef(rng));
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

std::vector<UnivariateConstraint> random_constraints(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> kap(-3.0, 3.0);
  for (;;) {
    std::vector<UnivariateConstraint> cs(1 + rng() % 4);
    std::vector<ConstraintOperator> ops;
    for (auto& c : cs) {
      c.op = random_operator(rng);
      c.kappa = kap(rng);
      ops.push_back(c.op);
    }
    const Eigen::MatrixXd S =
        support_matrix(ops, SupportBasis::monomials(static_cast<int>(cs.size())));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] > 1e-3 * sv[0]) return cs;
  }
}

/// Univariate satisfaction, idempotence, null space and Kronecker checks.
struct UnivariateTally {
  int cases = 0;
  double satisfaction = 0.0, idempotence = 0.0, null_space = 0.0, kronecker = 0.0;
};

UnivariateTally univariate_properties(int cases) {
  UnivariateTally t;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int k = 0; k < cases; ++k) {
    const auto cs = random_constraints(rng);
    const UnivariateCE ce(cs);
    const auto& sw = ce.switching();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (int j = 0; j < sw.count(); ++j) {
        LambdaFunction phi([&](double x, int d) { return sw.phi(j, x, d); });
        const double delta = static_cast<int>(i) == j ? 1.0 : 0.0;
        t.kronecker = std::max(t.kronecker, std::fabs(apply_operator(cs[i].op, phi) - delta));
      }
    }
    std::vector<double> gc(7);
    for (auto& v : gc) v = c(rng);
    const Poly g(gc);
    const CeFunction y(ce, g);
    for (const auto& con : cs) {
      t.satisfaction = std::max(t.satisfaction, std::fabs(apply_operator(con.op, y) - con.kappa));
    }
    const CeFunction yy(ce, y);
    std::vector<double> span(cs.size());
    for (auto& v : span) v = 2.0 * c(rng);
    LambdaFunction shifted([&](double x, int d) {
      double v = g.value(x, d);
      for (std::size_t s = 0; s < span.size(); ++s) v += span[s] * sw.supports().value(s, x, d);
      return v;
    });
    for (int p = 0; p < 5; ++p) {
      const double x = u(rng);
      const double base = y.value(x, 0);
      const double scale = std::max(1.0, std::fabs(base));
      t.idempotence = std::max(t.idempotence, std::fabs(yy.value(x, 0) - base) / scale);
      t.null_space = std::max(t.null_space, std::fabs(ce.evaluate(shifted, x) - base) / scale);
    }
    ++t.cases;
  }
  return t;
}

std::shared_ptr<const FreeFunction> cheb_free(const std::vector<Dimension>& dims, int m) {
  std::vector<UnivariateBasis> b;
  for (const auto& d : dims) b.emplace_back(Family::Chebyshev, m, DomainMap(d.lo, d.hi, -1, 1));
  return std::make_shared<TensorBasis>(b);
}

Eigen::MatrixXd random_points(std::mt19937_64& rng, const std::vector<Dimension>& dims, int n) {
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(dims.size()));
  for (std::size_t k = 0; k < dims.size(); ++k) {
    std::uniform_real_distribution<double> u(dims[k].lo, dims[k].hi);
    for (int p = 0; p < n; ++p) X(p, static_cast<Eigen::Index>(k)) = u(rng);
  }
  return X;
}

Modes random_modes(std::mt19937_64& rng, const std::vector<Dimension>& dims) {
  Modes m;
  for (const auto& d : dims) {
    std::uniform_real_distribution<double> u(d.lo, d.hi);
    switch (rng() % 4) {
      case 0:
      case 1:
        m.push_back(DimMode::free(static_cast<int>(rng() % 3)));
        break;
      case 2:
        m.push_back(DimMode::point(u(rng), static_cast<int>(rng() % 2)));
        break;
      default: {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        m.push_back(DimMode::integral(a, b));
      }
    }
  }
  return m;
}

Modes free_values(int n) { return Modes(static_cast<std::size_t>(n), DimMode::free(0)); }

std::vector<Dimension> point_dims() { return {{"x", 0.0, 2.0}, {"y", 0.0, 1.0}}; }

VariableDef point_variable(std::shared_ptr<const FreeFunction> g) {
  VariableDef u;
  u.name = "u";
  u.constraints = {
      {0, at(0.0), {}, parse("y^2*sin(pi*y)"), {}},
      {0, {{1.0, DimMode::point(1.0)}, {1.0, DimMode::point(2.0)}}, {}, parse("y*sin(pi*y)"), {}},
      {1, at(0.0, 1), {}, parse("0"), {}},
      {1, {{1.0, DimMode::point(0.0)}, {-1.0, DimMode::point(1.0)}}, {}, parse("0"), {}},
  };
  u.supports[1] = {1, 2};
  u.free = std::move(g);
  return u;
}

std::vector<Dimension> integral_dims() { return {{"x", 0.0, 2.0}, {"y", -1.0, 2.0}}; }

VariableDef integral_variable(std::shared_ptr<const FreeFunction> g, double a = -1.0,
                              double b = 1.0) {
  VariableDef u;
  u.name = "u";
  u.constraints = {
      {1, {{1.0, DimMode::point(0.0)}, {-2.0, DimMode::point(1.0, 1)}}, {}, parse("0"), {}},
      {1, at(2.0), {}, parse("sin(x)"), {}},
      {0, at(2.0), {{1, a, b}}, parse("5"), {}},
  };
  u.free = std::move(g);
  return u;
}

Outcome constraint_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kCases = 100;
  std::vector<std::string> failures;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  const UnivariateTally uni = univariate_properties(kCases);
  require(uni.satisfaction < 1e-10, "satisfaction " + sci(uni.satisfaction));
  require(uni.idempotence < 1e-12, "idempotence " + sci(uni.idempotence));
  require(uni.null_space < 1e-11, "null space " + sci(uni.null_space));
  require(uni.kronecker < 1e-12, "Kronecker " + sci(uni.kronecker));

  std::mt19937_64 rng(77);
  const auto pd = point_dims();
  const CeSystem forward(pd, {point_variable(cheb_free(pd, 6))});
  const CeSystem reverse(pd, {point_variable(cheb_free(pd, 6))}, {}, {1, 0});
  double order_gap = 0.0, multi_sat = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const Eigen::VectorXd xi = Eigen::VectorXd::Random(forward.size());
    const Eigen::MatrixXd X = random_points(rng, pd, 8);
    const Modes m = random_modes(rng, pd);
    const Eigen::VectorXd a = forward.evaluate(0, X, m, xi);
    const Eigen::VectorXd b = reverse.evaluate(0, X, m, xi);
    order_gap = std::max(order_gap, (a - b).cwiseAbs().maxCoeff() /
                                        std::max(1.0, a.cwiseAbs().maxCoeff()));
    for (int c = 0; c < 4; ++c) {
      auto [lhs, rhs] = forward.constraint_residual(0, c, X, xi);
      multi_sat = std::max(multi_sat, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  require(order_gap < 1e-11, "order invariance " + sci(order_gap));
  require(multi_sat < 1e-11, "multivariate satisfaction " + sci(multi_sat));

  const auto id = integral_dims();
  const CeSystem integral(id, {integral_variable(cheb_free(id, 5))});
  const TensorForm tensor(integral, 0);
  double tensor_gap = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const Modes m = random_modes(rng, id);
    const Eigen::MatrixXd X = random_points(rng, id, 6);
    const Affine a = integral.probe(0, X, m);
    const Affine b = tensor.probe(X, m);
    const double scale = std::max(1.0, a.A.cwiseAbs().maxCoeff());
    tensor_gap = std::max(tensor_gap, (a.A - b.A).cwiseAbs().maxCoeff() / scale);
    tensor_gap = std::max(tensor_gap, (a.b - b.b).cwiseAbs().maxCoeff() /
                                          std::max(1.0, a.b.cwiseAbs().maxCoeff()));
  }
  require(tensor_gap < 1e-11, "tensor form " + sci(tensor_gap));

  // Randomized integration ranges for the foreign integral.
  std::uniform_real_distribution<double> end(-1.0, 2.0);
  double zero_integral = 0.0, integral_sat = 0.0;
  int integral_cases = 0;
  while (integral_cases < kCases) {
    double a = end(rng), b = end(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.2) continue;
    std::unique_ptr<CeSystem> sys;
    try {
      sys = std::make_unique<CeSystem>(id, std::vector<VariableDef>{
                                               integral_variable(cheb_free(id, 4), a, b)});
    } catch (const SingularSupport&) {
      continue;
    }
    const SwitchingSet& sw = sys->switching(0, 1);
    for (int j = 0; j < sw.count(); ++j) {
      zero_integral = std::max(zero_integral, std::fabs(sw.phi_integral(j, a, b)));
    }
    const Eigen::VectorXd xi = Eigen::VectorXd::Random(sys->size());
    const Eigen::MatrixXd X = random_points(rng, id, 4);
    for (int c = 0; c < 3; ++c) {
      auto [lhs, rhs] = sys->constraint_residual(0, c, X, xi);
      integral_sat = std::max(integral_sat, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    ++integral_cases;
  }
  require(zero_integral < 1e-12, "augmented zero integrals " + sci(zero_integral));
  require(integral_sat < 1e-11, "integral satisfaction " + sci(integral_sat));

  const double wall = seconds_since(t0);
  require(wall < 60.0, fmt::format("runtime {:.1f} s", wall));
  std::string detail = fmt::format(
      "{} cases each; satisfaction {}, idempotence {}, null space {}, Kronecker {}, order {}, "
      "tensor {}, zero integrals {}; {:.1f} s (< 60 s)",
      kCases, sci(std::max({uni.satisfaction, multi_sat, integral_sat})), sci(uni.idempotence),
      sci(uni.null_space), sci(uni.kronecker), sci(order_gap), sci(tensor_gap),
      sci(zero_integral), wall);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// Worked examples.

Outcome golden_values() {
  const std::vector<ConstraintOperator> ops{at(0.0), at(1.0, 1), at(2.0)};
  const Eigen::MatrixXd S = support_matrix(ops, SupportBasis({0, 2, 3}));
  Eigen::Matrix3d s_ref, a_ref;
  s_ref << 1, 0, 0, 0, 2, 3, 1, 4, 8;
  a_ref << 1, 0, 0, 0.75, 2, -0.75, -0.5, -1, 0.5;
  const double point_err = std::max((S - s_ref).cwiseAbs().maxCoeff(),
                                    (solve_switching(S) - a_ref).cwiseAbs().maxCoeff());

  const std::vector<ConstraintOperator> iops{{OperatorTerm{1.0, DimMode::integral(-2, 3)}},
                                             {OperatorTerm{3.0, DimMode::integral(0, 2)}}};
  const Eigen::MatrixXd Si = support_matrix(iops, SupportBasis::monomials(2));
  Eigen::Matrix2d si_ref, ai_ref;
  si_ref << 5, 2.5, 6, 6;
  ai_ref << 0.4, -1.0 / 6.0, -0.4, 1.0 / 3.0;
  const double integral_err = std::max((Si - si_ref).cwiseAbs().maxCoeff(),
                                       (solve_switching(Si) - ai_ref).cwiseAbs().maxCoeff());

  const CeSystem sys(integral_dims(), {integral_variable(nullptr)});
  Eigen::Matrix<double, 3, 2> aug_ref;
  aug_ref << 0.5, 0.5, 2.75, 3.25, -1.5, -1.5;
  const double aug_err = (sys.switching(0, 1).alpha() - aug_ref).cwiseAbs().maxCoeff();

  const bool pass = point_err <= 1e-14 && integral_err <= 1e-14 && aug_err <= 1e-12;
  return {pass, fmt::format("point example {} <= 1e-14; integral example {} <= 1e-14; "
                            "augmented alpha {} <= 1e-12",
                            sci(point_err), sci(integral_err), sci(aug_err))};
}

Outcome component_graphs() {
  const auto graphs = enumerate_component_graphs({{0, 1, 2}, {0, 1}, {0, 1}, {1, 2}}, 3);
  bool acyclic = true;
  for (const auto& g : graphs) acyclic = acyclic && is_nilpotent(g.adjacency);

  // u(x,0) = 5 and u(0,y) + v(0,y) = 3.
  const auto pair = enumerate_component_graphs({{0, 1}}, 2);
  const std::vector<ComponentConstraintInfo> comps{{0, {0, 1}}};
  const std::vector<BoundaryCondition> conds{{0, 1, 0.0, 0}};
  std::vector<int> accepted;
  for (const auto& g : pair) {
    if (check_intersection_validity(g, comps, conds).accepted) {
      accepted.push_back(g.assignment.at(0));
    }
  }
  const bool pass = graphs.size() == 6 && acyclic && accepted == std::vector<int>{1};
  return {pass, fmt::format("{} valid graphs (expect 6), all nilpotent: {}; intersection rule "
                            "accepts {} graph(s), assigned to {}",
                            graphs.size(), acyclic ? "yes" : "no", accepted.size(),
                            accepted.size() == 1 ? (accepted[0] == 1 ? "v" : "u") : "-")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simple PDE, TFC Chebyshev", simple_pde_tfc},
      {"simple PDE, spectral comparison", simple_pde_spectral},
      {"simple PDE, X-TFC", simple_pde_xtfc},
      {"1D wave equation", wave1d},
      {"2D wave equation, X-TFC and trend", wave2d},
      {"biharmonic, Cartesian", biharmonic_cartesian},
      {"biharmonic, polar", biharmonic_polar},
      {"convection-diffusion, whole and split", convection_diffusion},
      {"balloon natural shape", balloon},
      {"constraint property suites", constraint_properties},
      {"golden switching coefficients", golden_values},
      {"component constraint graphs", component_graphs},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s AC%-2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
