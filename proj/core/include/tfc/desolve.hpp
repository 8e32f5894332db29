// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tfc/basis.hpp"
#include "tfc/expr.hpp"
#include "tfc/multivar.hpp"
#include "tfc/solvers.hpp"

namespace tfc {

/// Point placement along each dimension of a tensor grid.
enum class GridKind { Cgl, Uniform };

const char* grid_kind_name(GridKind k) noexcept;
GridKind grid_kind_from_name(const std::string& name);

/// Per-dimension point counts of a tensor grid.
struct GridSpec {
  std::vector<int> points;
  GridKind kind = GridKind::Cgl;
};

/// Tensor grid over the dimension intervals, one point per row with the
/// last dimension varying fastest. CGL nodes are mapped onto each interval.
Eigen::MatrixXd make_grid(const std::vector<Dimension>& dims,
                          const GridSpec& spec);

/// Free-function family of a dependent variable.
struct BasisSpec {
  enum class Kind { Polynomial, Elm };
  Kind kind = Kind::Polynomial;
  Family family = Family::Chebyshev;
  /// Polynomial degree per dimension (or total degree when capped).
  int degree = 10;
  /// Keeps only multi-indices whose sum is at most `degree`.
  bool total_degree = true;
  /// Per-dimension removal. Dimensions without an entry remove the
  /// support exponents of that dimension's constraints.
  std::map<int, std::vector<int>> removal;
  int neurons = 0;
  std::uint64_t seed = 0;
  double weight_lo = -1.0;
  double weight_hi = 1.0;
  Activation activation = Activation::Tanh;
};

/// A dependent variable of a differential equation.
struct DeVariable {
  std::string name;
  std::vector<Constraint> constraints;
  std::map<int, std::vector<int>> supports;
  BasisSpec basis;
  /// Analytic solution over the dimension names, when known.
  std::optional<Expr> exact;
};

/// Bounds applied to an unknown through the inequality form.
struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// A scalar unknown solved alongside the free-function coefficients.
struct ExtraUnknown {
  std::string name;
  double initial = 0.0;
  std::optional<Bounds> bounds;
};

/// How the least-squares problem is set up and solved.
struct SolverSettings {
  LsqMethod method = LsqMethod::ScaledQr;
  double tol = 1e-13;
  int max_iter = 50;
  /// Uses the iterative path even for affine problems.
  bool force_nonlinear = false;
  bool check_jacobian = false;
  /// Scales least-squares columns to unit 2-norm before solving.
  bool scale_columns = false;
  /// Iterations on the coefficients alone, with extras held at their
  /// initial values, before the joint iteration.
  int warm_start_iterations = 0;
};

/// A differential equation, its constraints and discretization.
///
/// Residual expressions read the dimension names, parameters, extra
/// unknowns and derivative symbols `<var>` or `<var>_<dims>`, where <dims>
/// concatenates dimension names, one per derivative order (u_xx, u_xy).
struct DeProblem {
  std::string id;
  std::vector<Dimension> dims;
  std::vector<DeVariable> variables;
  std::vector<Expr> residuals;
  Bindings parameters;
  std::vector<ExtraUnknown> extras;
  GridSpec train;
  GridSpec test{{}, GridKind::Uniform};
  SolverSettings solver;
  /// Appends constraint rows at training boundary points instead of
  /// embedding the constraints.
  bool spectral = false;
};

/// A derivative of a dependent variable read by a residual.
struct DerivativeSymbol {
  int variable = 0;
  /// Derivative order per dimension.
  std::vector<int> orders;
};

/// Splits `symbol` into a variable and per-dimension derivative orders.
/// Returns nothing for names that are not derivative symbols.
std::optional<DerivativeSymbol> parse_derivative_symbol(
    const std::string& symbol, const std::vector<std::string>& variables,
    const std::vector<std::string>& dims);

/// Piecewise bound y = g + (f_u - g) H(g - f_u) + (f_l - g) H(f_l - g),
/// with the step H treated as having zero derivative.
class InequalityClamp {
 public:
  /// Bounds are expressions of `var` and `fixed`. Throws ConfigError when
  /// f_l > f_u at a checked point.
  InequalityClamp(Expr lower, Expr upper, std::string var = "x",
                  Bindings fixed = {});

  double lower(double x) const;
  double upper(double x) const;
  /// Clamped value of `inner` at x.
  double value(double inner, double x) const;
  /// Derivative of the clamped value given the inner value and derivative.
  double derivative(double inner, double inner_d, double x) const;
  /// d(value)/d(inner): 1 inside the bounds, 0 when clamped.
  double sensitivity(double inner, double x) const;

 private:
  Expr lo_, hi_, dlo_, dhi_;
  std::string var_;
  Bindings fixed_;
};

/// A univariate function passed through an InequalityClamp.
class ClampedFunction : public Univariate {
 public:
  ClampedFunction(const Univariate& inner, const InequalityClamp& clamp)
      : inner_(inner), clamp_(clamp) {}
  /// Supports d = 0 and d = 1.
  double value(double x, int d) const override;

 private:
  const Univariate& inner_;
  const InequalityClamp& clamp_;
};

/// Residual rows of an affine problem: L(xi) = A xi - b.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Compiled problem: constrained expressions, residual derivatives and the
/// training grid. Unknowns are theta = [xi, raw extras].
class DeModel {
 public:
  /// Throws ConfigError for malformed problems.
  explicit DeModel(const DeProblem& problem);
  ~DeModel();
  DeModel(const DeModel&) = delete;
  DeModel& operator=(const DeModel&) = delete;

  const DeProblem& problem() const noexcept { return problem_; }
  const CeSystem& system() const noexcept { return *system_; }
  std::shared_ptr<const CeSystem> system_ptr() const noexcept {
    return system_;
  }
  const Eigen::MatrixXd& grid() const noexcept { return grid_; }
  /// Coefficients that the constrained expressions do not annihilate.
  int num_xi() const noexcept;
  int num_unknowns() const noexcept {
    return num_xi() + static_cast<int>(problem_.extras.size());
  }
  int num_rows() const noexcept;
  /// True when no residual multiplies unknowns and no extras exist.
  bool is_affine() const noexcept;

  /// Throws NonAffineResidual when a residual is not affine in the
  /// dependent variables or reads an extra unknown.
  LinearSystem assemble_linear() const;

  Eigen::VectorXd residual(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const;

  /// Initial unknowns: zero coefficients and the declared extra values.
  Eigen::VectorXd initial_theta() const;
  /// Effective (clamped) extra values keyed by name, plus parameters.
  Bindings symbols(const Eigen::VectorXd& theta) const;
  /// Effective extra values in declaration order.
  std::vector<double> extra_values(const Eigen::VectorXd& theta) const;
  /// Coefficient vector of the CeSystem, zero on annihilated columns.
  Eigen::VectorXd full_xi(const Eigen::VectorXd& theta) const;

 private:
  Eigen::VectorXd initial_theta_full() const;
  void evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* L,
                Eigen::MatrixXd* J) const;

  struct Impl;
  DeProblem problem_;
  std::shared_ptr<const CeSystem> system_;
  Eigen::MatrixXd grid_;
  std::unique_ptr<Impl> impl_;
};

/// Assembles the affine system of `problem` on its training grid.
LinearSystem assemble_linear(const DeProblem& problem);

/// Test-grid samples of a solution.
struct TestSamples {
  Eigen::MatrixXd points;
  std::vector<std::string> dim_names;
  std::vector<std::string> variables;
  /// values[v] holds variable v at every point.
  std::vector<Eigen::VectorXd> values;
  /// exact[v] is empty when variable v has no analytic solution.
  std::vector<Eigen::VectorXd> exact;
};

/// Outcome of a solve.
struct SolveReport {
  std::string problem_id;
  std::vector<std::string> variables;
  std::vector<Eigen::VectorXd> xi;
  std::vector<std::pair<std::string, double>> extras;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::optional<double> max_error;
  std::optional<double> mean_error;
  /// Largest |C[u] - kappa| over random samples of every constraint.
  double constraint_error = 0.0;
  double wall_seconds = 0.0;
  int iterations = 0;
  bool nonlinear = false;
  bool converged = true;
  std::optional<Termination> termination;
  int basis_size = 0;
  int training_points = 0;
  TestSamples samples;
};

/// Solves the problem, dispatching between the affine and iterative paths.
/// An iterative solve that stops on max-iterations returns a report with
/// converged = false.
SolveReport solve(const DeProblem& problem);

/// Two-subdomain solve of a one-dimensional problem with a movable split.
///
/// The variable is represented by two constrained expressions on the basis
/// interval [-1, 1], joined with C1 continuity through unknowns y_p and
/// dy_p at the split x_p, itself clamped to [bounds.lo, bounds.hi].
/// Constraints of the problem must be point constraints at the interval
/// ends.
struct SplitSpec {
  Bounds bounds{1e-3, 1.0 - 1e-3};
  double xp0 = 0.5;
  double yp0 = 0.0;
  double dyp0 = 0.0;
  /// Training and test points per subdomain.
  int points = 200;
  int test_points = 1000;
  BasisSpec basis;
  /// The split point is not identifiable when one subdomain already
  /// resolves the solution, so steps are minimum-norm by default.
  SolverSettings solver{LsqMethod::IllConditioned, 1e-13, 50, false, false,
                        true};
};

/// The two-variable problem used by solve_split, written on z in [-1, 1].
/// Variables are `<name>1` and `<name>2`; extras are xp, yp and dyp.
DeProblem make_split_problem(const DeProblem& problem, const SplitSpec& split);

SolveReport solve_split(const DeProblem& problem, const SplitSpec& split);

/// Builds the free function of a variable over `dims`.
std::shared_ptr<const FreeFunction> build_free_function(
    const DeVariable& var, const std::vector<Dimension>& dims);

}  // namespace tfc
