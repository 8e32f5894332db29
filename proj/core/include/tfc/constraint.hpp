// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfc/expr.hpp"

namespace tfc {

/// How a functional treats one independent dimension.
///   Free(d):        d-th derivative, left as a function of the coordinate.
///   Point(a, d):    d-th derivative evaluated at a.
///   Integral(a, b): definite integral over [a, b].
struct DimMode {
  enum class Kind { Free, Point, Integral };
  Kind kind = Kind::Free;
  int d = 0;
  double a = 0.0;
  double b = 0.0;

  static DimMode free(int d = 0) { return {Kind::Free, d, 0.0, 0.0}; }
  static DimMode point(double a, int d = 0) { return {Kind::Point, d, a, 0.0}; }
  static DimMode integral(double a, double b) {
    return {Kind::Integral, 0, a, b};
  }

  friend bool operator==(const DimMode&, const DimMode&) = default;
  friend auto operator<=>(const DimMode&, const DimMode&) = default;
};

using Modes = std::vector<DimMode>;

/// One weighted evaluation of a constraint operator: a point derivative or a
/// definite integral along the constrained dimension.
struct OperatorTerm {
  double coef = 1.0;
  DimMode mode;
};

/// A constraint operator is the weighted sum of its terms.
using ConstraintOperator = std::vector<OperatorTerm>;

/// A univariate function with derivatives and definite integrals.
class Univariate {
 public:
  virtual ~Univariate() = default;
  virtual double value(double x, int d) const = 0;
  /// Defaults to 64-node Gauss-Legendre quadrature.
  virtual double integral(double a, double b) const;
};

/// Wraps an Expr of one variable; other variables come from `fixed`.
class ExprFunction : public Univariate {
 public:
  ExprFunction(const Expr& e, std::string var, Bindings fixed = {});
  double value(double x, int d) const override;

 private:
  Expr expr_;
  std::string var_;
  Bindings fixed_;
  std::vector<Expr> derivs_;
};

/// Wraps a callable f(x, d).
class LambdaFunction : public Univariate {
 public:
  explicit LambdaFunction(std::function<double(double, int)> f)
      : f_(std::move(f)) {}
  double value(double x, int d) const override { return f_(x, d); }

 private:
  std::function<double(double, int)> f_;
};

/// Weighted sum of point derivatives and integrals of f.
double apply_operator(const ConstraintOperator& op, const Univariate& f);

/// Monomial support functions x^e with exact derivatives and integrals.
class SupportBasis {
 public:
  SupportBasis() = default;
  explicit SupportBasis(std::vector<int> exponents);
  /// Exponents 0..n-1.
  static SupportBasis monomials(int n);

  std::size_t size() const noexcept { return exponents_.size(); }
  const std::vector<int>& exponents() const noexcept { return exponents_; }
  double value(std::size_t j, double x, int d) const;
  double integral(std::size_t j, double a, double b) const;
  /// Result of applying an operator to support j.
  double apply(std::size_t j, const ConstraintOperator& op) const;

 private:
  std::vector<int> exponents_;
};

/// S_ij = C_i[s_j]. Extra rows are integrals that the switching functions
/// must annihilate.
Eigen::MatrixXd support_matrix(const std::vector<ConstraintOperator>& ops,
                               const SupportBasis& s);

/// Inverse of a square support matrix. Returns the first `ncols` columns
/// of S^-1 when ncols >= 0. Throws SingularSupport when the condition
/// estimate exceeds 1e12.
Eigen::MatrixXd solve_switching(const Eigen::MatrixXd& S, int ncols = -1);

/// Switching functions phi_j = sum_s s_s alpha(s, j).
class SwitchingSet {
 public:
  SwitchingSet() = default;
  SwitchingSet(SupportBasis s, Eigen::MatrixXd alpha);

  const SupportBasis& supports() const noexcept { return s_; }
  const Eigen::MatrixXd& alpha() const noexcept { return alpha_; }
  int count() const noexcept { return static_cast<int>(alpha_.cols()); }
  double phi(int j, double x, int d) const;
  double phi_integral(int j, double a, double b) const;
  /// phi_j probed with a one-dimensional mode at coordinate x.
  double phi_mode(int j, const DimMode& mode, double x) const;

 private:
  SupportBasis s_;
  Eigen::MatrixXd alpha_;
};

/// Builds a switching set for `ops` (one support per operator plus one per
/// entry of `zero_integrals`, whose integrals of every phi vanish).
/// Supports default to monomials 0..n-1 when `supports` is empty.
SwitchingSet build_switching(const std::vector<ConstraintOperator>& ops,
                             const std::vector<std::pair<double, double>>&
                                 zero_integrals = {},
                             const std::vector<int>& supports = {});

/// A constraint C[y] = kappa on a univariate function.
struct UnivariateConstraint {
  ConstraintOperator op;
  double kappa = 0.0;
};

/// rho = kappa - C[g].
double projection_value(const UnivariateConstraint& c, const Univariate& g);

/// y(x, g) = g(x) + sum_j phi_j(x) (kappa_j - C_j[g]).
class UnivariateCE {
 public:
  /// Throws SingularSupport.
  UnivariateCE(std::vector<UnivariateConstraint> constraints,
               const std::vector<int>& supports = {});

  const std::vector<UnivariateConstraint>& constraints() const noexcept {
    return constraints_;
  }
  const SwitchingSet& switching() const noexcept { return switching_; }

  double evaluate(const Univariate& g, double x, int d = 0) const;

  /// Affine form y^(d)(x) = row . xi + offset for g = h(x) . xi, where
  /// `h(x, d)` returns the basis row and `h_int(a, b)` its integrals.
  void evaluate_affine(
      const std::function<Eigen::RowVectorXd(double, int)>& h,
      const std::function<Eigen::RowVectorXd(double, double)>& h_int,
      double x, int d, Eigen::RowVectorXd& row, double& offset) const;

 private:
  std::vector<UnivariateConstraint> constraints_;
  SwitchingSet switching_;
};

/// The output y(., g) of a CE as a Univariate, enabling nested application.
class CeFunction : public Univariate {
 public:
  CeFunction(const UnivariateCE& ce, const Univariate& g) : ce_(ce), g_(g) {}
  double value(double x, int d) const override {
    return ce_.evaluate(g_, x, d);
  }

 private:
  const UnivariateCE& ce_;
  const Univariate& g_;
};

}  // namespace tfc
