// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/constraint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tfc/basis.hpp"
#include "tfc/errors.hpp"

namespace tfc {

double Univariate::integral(double a, double b) const {
  const Quadrature& q = gauss_legendre(64);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
    acc += q.weights[i] * value(mid + half * q.nodes[i], 0);
  }
  return acc * half;
}

ExprFunction::ExprFunction(const Expr& e, std::string var, Bindings fixed)
    : expr_(e), var_(std::move(var)), fixed_(std::move(fixed)) {
  derivs_.push_back(expr_);
  for (int d = 1; d <= 4; ++d) {
    derivs_.push_back(differentiate(derivs_.back(), var_, 1));
  }
}

double ExprFunction::value(double x, int d) const {
  if (d < 0) throw Error("derivative order must be non-negative");
  Bindings b = fixed_;
  b[var_] = x;
  if (d < static_cast<int>(derivs_.size())) {
    return evaluate(derivs_[static_cast<std::size_t>(d)], b);
  }
  return evaluate(differentiate(expr_, var_, d), b);
}

double apply_operator(const ConstraintOperator& op, const Univariate& f) {
  double acc = 0.0;
  for (const auto& t : op) {
    switch (t.mode.kind) {
      case DimMode::Kind::Point:
        acc += t.coef * f.value(t.mode.a, t.mode.d);
        break;
      case DimMode::Kind::Integral:
        acc += t.coef * f.integral(t.mode.a, t.mode.b);
        break;
      case DimMode::Kind::Free:
        throw Error("constraint operator term must be a point or integral");
    }
  }
  return acc;
}

// -------------------------------------------------------------- supports

SupportBasis::SupportBasis(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw Error("support exponent must be non-negative");
  }
}

SupportBasis SupportBasis::monomials(int n) {
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = i;
  return SupportBasis(std::move(e));
}

double SupportBasis::value(std::size_t j, double x, int d) const {
  const int e = exponents_.at(j);
  if (d > e) return 0.0;
  double factor = 1.0;
  for (int i = 0; i < d; ++i) factor *= e - i;
  const int p = e - d;
  double xp = 1.0;
  for (int i = 0; i < p; ++i) xp *= x;
  return factor * xp;
}

double SupportBasis::integral(std::size_t j, double a, double b) const {
  const int e = exponents_.at(j) + 1;
  double pa = 1.0, pb = 1.0;
  for (int i = 0; i < e; ++i) {
    pa *= a;
    pb *= b;
  }
  return (pb - pa) / e;
}

double SupportBasis::apply(std::size_t j, const ConstraintOperator& op) const {
  double acc = 0.0;
  for (const auto& t : op) {
    switch (t.mode.kind) {
      case DimMode::Kind::Point:
        acc += t.coef * value(j, t.mode.a, t.mode.d);
        break;
      case DimMode::Kind::Integral:
        acc += t.coef * integral(j, t.mode.a, t.mode.b);
        break;
      case DimMode::Kind::Free:
        throw Error("constraint operator term must be a point or integral");
    }
  }
  return acc;
}

Eigen::MatrixXd support_matrix(const std::vector<ConstraintOperator>& ops,
                               const SupportBasis& s) {
  Eigen::MatrixXd S(static_cast<Eigen::Index>(ops.size()),
                    static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          s.apply(j, ops[i]);
    }
  }
  return S;
}

Eigen::MatrixXd solve_switching(const Eigen::MatrixXd& S, int ncols) {
  if (S.rows() != S.cols()) throw Error("support matrix must be square");
  if (S.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  const double cond = smin > 0.0 ? sv[0] / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "support matrix is singular (condition estimate " << cond
        << "); choose different support functions";
    throw SingularSupport(cond, msg.str());
  }
  Eigen::MatrixXd inv = S.fullPivLu().inverse();
  if (ncols >= 0) return inv.leftCols(ncols);
  return inv;
}

// ------------------------------------------------------------- switching

SwitchingSet::SwitchingSet(SupportBasis s, Eigen::MatrixXd alpha)
    : s_(std::move(s)), alpha_(std::move(alpha)) {
  if (static_cast<std::size_t>(alpha_.rows()) != s_.size()) {
    throw Error("switching coefficients do not match the support count");
  }
}

double SwitchingSet::phi(int j, double x, int d) const {
  double acc = 0.0;
  for (std::size_t s = 0; s < s_.size(); ++s) {
    const double a = alpha_(static_cast<Eigen::Index>(s), j);
    if (a != 0.0) acc += a * s_.value(s, x, d);
  }
  return acc;
}

double SwitchingSet::phi_integral(int j, double a, double b) const {
  double acc = 0.0;
  for (std::size_t s = 0; s < s_.size(); ++s) {
    const double c = alpha_(static_cast<Eigen::Index>(s), j);
    if (c != 0.0) acc += c * s_.integral(s, a, b);
  }
  return acc;
}

double SwitchingSet::phi_mode(int j, const DimMode& mode, double x) const {
  switch (mode.kind) {
    case DimMode::Kind::Free:
      return phi(j, x, mode.d);
    case DimMode::Kind::Point:
      return phi(j, mode.a, mode.d);
    case DimMode::Kind::Integral:
      return phi_integral(j, mode.a, mode.b);
  }
  return 0.0;
}

SwitchingSet build_switching(
    const std::vector<ConstraintOperator>& ops,
    const std::vector<std::pair<double, double>>& zero_integrals,
    const std::vector<int>& supports) {
  const std::size_t n = ops.size() + zero_integrals.size();
  SupportBasis s;
  if (supports.empty()) {
    s = SupportBasis::monomials(static_cast<int>(n));
  } else {
    if (supports.size() != n) {
      throw Error("expected " + std::to_string(n) + " support functions, got " +
                  std::to_string(supports.size()));
    }
    s = SupportBasis(supports);
  }
  std::vector<ConstraintOperator> rows = ops;
  for (const auto& [a, b] : zero_integrals) {
    rows.push_back({OperatorTerm{1.0, DimMode::integral(a, b)}});
  }
  Eigen::MatrixXd S = support_matrix(rows, s);
  Eigen::MatrixXd alpha = solve_switching(S, static_cast<int>(ops.size()));
  return SwitchingSet(std::move(s), std::move(alpha));
}

// -------------------------------------------------------- univariate CE

double projection_value(const UnivariateConstraint& c, const Univariate& g) {
  return c.kappa - apply_operator(c.op, g);
}

UnivariateCE::UnivariateCE(std::vector<UnivariateConstraint> constraints,
                           const std::vector<int>& supports)
    : constraints_(std::move(constraints)) {
  std::vector<ConstraintOperator> ops;
  for (const auto& c : constraints_) ops.push_back(c.op);
  switching_ = build_switching(ops, {}, supports);
}

double UnivariateCE::evaluate(const Univariate& g, double x, int d) const {
  double y = g.value(x, d);
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    y += switching_.phi(static_cast<int>(j), x, d) *
         projection_value(constraints_[j], g);
  }
  return y;
}

void UnivariateCE::evaluate_affine(
    const std::function<Eigen::RowVectorXd(double, int)>& h,
    const std::function<Eigen::RowVectorXd(double, double)>& h_int, double x,
    int d, Eigen::RowVectorXd& row, double& offset) const {
  row = h(x, d);
  offset = 0.0;
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    const double p = switching_.phi(static_cast<int>(j), x, d);
    if (p == 0.0) continue;
    offset += p * constraints_[j].kappa;
    for (const auto& t : constraints_[j].op) {
      if (t.mode.kind == DimMode::Kind::Point) {
        row -= p * t.coef * h(t.mode.a, t.mode.d);
      } else {
        row -= p * t.coef * h_int(t.mode.a, t.mode.b);
      }
    }
  }
}

}  // namespace tfc
