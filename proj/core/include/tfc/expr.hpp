// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tfc {

/// Node kinds of the expression tree.
enum class Op { Number, Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };

/// Intrinsic functions. `Sgn` only arises as the derivative of `Abs`.
enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Ln, Sqrt, Abs, Sgn };

const char* fn_name(Fn fn) noexcept;

/// Immutable analytic expression over named real variables.
///
/// Grammar (whitespace ignored):
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := number | name | fn '(' expr ')' | '(' expr ')'
/// Names `pi` and `e` denote constants; any other name is a variable.
class Expr {
 public:
  /// The literal 0.
  Expr();

  static Expr number(double v);
  static Expr constant(const std::string& name);
  static Expr variable(const std::string& name);
  static Expr call(Fn fn, const Expr& arg);
  static Expr binary(Op op, const Expr& lhs, const Expr& rhs);
  static Expr negate(const Expr& arg);

  Op op() const noexcept;
  /// Literal value for Number, numeric value for Constant.
  double value() const noexcept;
  /// Variable or constant name.
  const std::string& name() const noexcept;
  Fn fn() const noexcept;
  /// Left operand of a binary node, or the argument of Neg and Call.
  const Expr& lhs() const noexcept;
  const Expr& rhs() const noexcept;

  bool is_number(double v) const noexcept;
  bool depends_on(std::string_view var) const;
  void collect_variables(std::set<std::string>& out) const;
  std::set<std::string> variables() const;

  /// Canonical text; `parse(e.str()).str() == e.str()`.
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, const Expr& exponent);

/// Parses expression text. Throws ParseError or UnknownIdentifier.
Expr parse(std::string_view source);

using Bindings = std::map<std::string, double, std::less<>>;

/// Evaluates with every free variable bound. Throws UnboundVariable or
/// DomainError; never returns NaN.
double evaluate(const Expr& e, const Bindings& bindings);

/// Exact symbolic derivative of the given order, simplified.
Expr differentiate(const Expr& e, const std::string& var, int order = 1);

/// Constant folding and 0/1 identities.
Expr simplify(const Expr& e);

/// Replaces every occurrence of `var` by `replacement`.
Expr substitute(const Expr& e, const std::string& var, const Expr& replacement);

bool structurally_equal(const Expr& a, const Expr& b);

/// Expression lowered to a stack program over a fixed slot layout.
/// Evaluation is reentrant.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Variables not listed in `slots` must be bound in `fixed`.
  CompiledExpr(const Expr& e, const std::vector<std::string>& slots,
               const Bindings& fixed = {});

  double operator()(const double* slot_values) const;
  bool is_constant() const noexcept { return constant_; }

 private:
  struct Instr {
    std::uint8_t code;
    std::uint8_t fn;
    std::uint32_t slot;
    double value;
  };
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
  bool constant_ = true;
};

}  // namespace tfc
