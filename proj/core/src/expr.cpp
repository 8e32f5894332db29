// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "tfc/errors.hpp"

namespace tfc {

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::string name;
  Fn fn = Fn::Sin;
  Expr lhs{std::shared_ptr<const Node>()};
  Expr rhs{std::shared_ptr<const Node>()};
};

namespace {

constexpr std::array<std::pair<const char*, Fn>, 11> kFunctions{{
    {"sin", Fn::Sin},
    {"cos", Fn::Cos},
    {"tan", Fn::Tan},
    {"sinh", Fn::Sinh},
    {"cosh", Fn::Cosh},
    {"tanh", Fn::Tanh},
    {"exp", Fn::Exp},
    {"ln", Fn::Ln},
    {"sqrt", Fn::Sqrt},
    {"abs", Fn::Abs},
    {"sgn", Fn::Sgn},
}};

bool lookup_function(std::string_view name, Fn& out) {
  for (const auto& [n, f] : kFunctions) {
    if (name == n) {
      out = f;
      return true;
    }
  }
  return false;
}

double constant_value(std::string_view name) {
  return name == "pi" ? std::numbers::pi : std::numbers::e;
}

double check(double v, const char* what) {
  if (std::isnan(v)) throw DomainError(std::string("NaN produced by ") + what);
  return v;
}

double apply_fn(Fn fn, double x) {
  switch (fn) {
    case Fn::Sin:
      return std::sin(x);
    case Fn::Cos:
      return std::cos(x);
    case Fn::Tan:
      return std::tan(x);
    case Fn::Sinh:
      return std::sinh(x);
    case Fn::Cosh:
      return std::cosh(x);
    case Fn::Tanh:
      return std::tanh(x);
    case Fn::Exp:
      return std::exp(x);
    case Fn::Ln:
      if (!(x > 0.0)) throw DomainError("ln of non-positive value");
      return std::log(x);
    case Fn::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(x);
    case Fn::Abs:
      return std::fabs(x);
    case Fn::Sgn:
      if (x == 0.0) throw NonDifferentiable("abs is not differentiable at 0");
      return x > 0.0 ? 1.0 : -1.0;
  }
  return 0.0;
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add:
      return a + b;
    case Op::Sub:
      return a - b;
    case Op::Mul:
      return a * b;
    case Op::Div:
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    case Op::Pow: {
      if (a < 0.0 && b != std::floor(b)) {
        throw DomainError("non-integer power of negative base");
      }
      if (a == 0.0 && b < 0.0) throw DomainError("negative power of zero");
      if (b == 2.0) return a * a;
      return std::pow(a, b);
    }
    default:
      return 0.0;
  }
}

}  // namespace

const char* fn_name(Fn fn) noexcept {
  for (const auto& [n, f] : kFunctions) {
    if (f == fn) return n;
  }
  return "?";
}

Expr::Expr() : Expr(number(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::number(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::constant(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->name = name;
  n->value = constant_value(name);
  return Expr(std::move(n));
}

Expr Expr::variable(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->name = name;
  return Expr(std::move(n));
}

Expr Expr::call(Fn fn, const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::Call;
  n->fn = fn;
  n->lhs = arg;
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, const Expr& lhs, const Expr& rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = lhs;
  n->rhs = rhs;
  return Expr(std::move(n));
}

Expr Expr::negate(const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::Neg;
  n->lhs = arg;
  return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
Fn Expr::fn() const noexcept { return node_->fn; }
const Expr& Expr::lhs() const noexcept { return node_->lhs; }
const Expr& Expr::rhs() const noexcept { return node_->rhs; }

bool Expr::is_number(double v) const noexcept {
  return op() == Op::Number && value() == v;
}

bool Expr::depends_on(std::string_view var) const {
  switch (op()) {
    case Op::Number:
    case Op::Constant:
      return false;
    case Op::Variable:
      return name() == var;
    case Op::Neg:
    case Op::Call:
      return lhs().depends_on(var);
    default:
      return lhs().depends_on(var) || rhs().depends_on(var);
  }
}

void Expr::collect_variables(std::set<std::string>& out) const {
  switch (op()) {
    case Op::Number:
    case Op::Constant:
      return;
    case Op::Variable:
      out.insert(name());
      return;
    case Op::Neg:
    case Op::Call:
      lhs().collect_variables(out);
      return;
    default:
      lhs().collect_variables(out);
      rhs().collect_variables(out);
  }
}

std::set<std::string> Expr::variables() const {
  std::set<std::string> out;
  collect_variables(out);
  return out;
}

namespace {

// Binding strength used by the printer; higher binds tighter.
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Number:
      return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print_number(double v, std::string& out) {
  if (std::isinf(v)) {
    out += v > 0 ? "(1/0)" : "(-1/0)";
    return;
  }
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Number:
      print_number(e.value(), out);
      return;
    case Op::Constant:
    case Op::Variable:
      out += e.name();
      return;
    case Op::Add:
    case Op::Sub:
      print_child(e.lhs(), 1, out);
      out += e.op() == Op::Add ? " + " : " - ";
      print_child(e.rhs(), 2, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_child(e.lhs(), 2, out);
      out += e.op() == Op::Mul ? "*" : "/";
      print_child(e.rhs(), 3, out);
      return;
    case Op::Pow:
      print_child(e.lhs(), 5, out);
      out += "^";
      print_child(e.rhs(), 3, out);
      return;
    case Op::Neg:
      out += "-";
      print_child(e.lhs(), 4, out);
      return;
    case Op::Call:
      out += fn_name(e.fn());
      out += "(";
      print(e.lhs(), out);
      out += ")";
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr::binary(Op::Add, a, b);
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::binary(Op::Sub, a, b);
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr::binary(Op::Mul, a, b);
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr::binary(Op::Div, a, b);
}
Expr operator-(const Expr& a) { return Expr::negate(a); }
Expr pow(const Expr& base, const Expr& exponent) {
  return Expr::binary(Op::Pow, base, exponent);
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      fail({"operator", "end of input"}, "unexpected trailing input");
    }
    return e;
  }

 private:
  static constexpr int kMaxDepth = 512;

  [[noreturn]] void fail(std::vector<std::string> expected,
                         const std::string& what) const {
    std::string msg = what + " at offset " + std::to_string(pos_) +
                      "; expected one of:";
    for (const auto& t : expected) msg += " '" + t + "'";
    throw ParseError(pos_, std::move(expected), msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        p.fail({"shallower nesting"}, "expression nested too deeply");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  Expr parse_expr() {
    DepthGuard guard(*this);
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_term();
      } else if (accept('-')) {
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    DepthGuard guard(*this);
    if (accept('-')) {
      Expr arg = parse_unary();
      if (arg.op() == Op::Number) return Expr::number(-arg.value());
      return -arg;
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return pow(base, parse_unary());
    return base;
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail({"number", "name", "(", "-"}, "unexpected end of input");
    }
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail({")"}, "unbalanced parenthesis");
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      std::size_t after = pos_;
      skip_ws();
      bool is_call = pos_ < src_.size() && src_[pos_] == '(';
      Fn fn;
      if (is_call) {
        if (!lookup_function(name, fn)) throw UnknownIdentifier(start, name);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail({")"}, "unbalanced parenthesis");
        return Expr::call(fn, arg);
      }
      pos_ = after;
      if (lookup_function(name, fn)) {
        fail({"("}, "function name without argument list");
      }
      if (name == "pi" || name == "e") return Expr::constant(name);
      return Expr::variable(name);
    }
    fail({"number", "name", "(", "-"}, "unexpected character");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      pos_ = start;
      fail({"number"}, "malformed number");
    }
    return Expr::number(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

// ------------------------------------------------------------ evaluation

double evaluate(const Expr& e, const Bindings& bindings) {
  switch (e.op()) {
    case Op::Number:
    case Op::Constant:
      return e.value();
    case Op::Variable: {
      auto it = bindings.find(e.name());
      if (it == bindings.end()) throw UnboundVariable(e.name());
      return it->second;
    }
    case Op::Neg:
      return -evaluate(e.lhs(), bindings);
    case Op::Call:
      return check(apply_fn(e.fn(), evaluate(e.lhs(), bindings)),
                   fn_name(e.fn()));
    default:
      return check(apply_binary(e.op(), evaluate(e.lhs(), bindings),
                                evaluate(e.rhs(), bindings)),
                   "arithmetic");
  }
}

// -------------------------------------------------------- simplification

namespace {

bool is_const(const Expr& e) { return e.op() == Op::Number; }

Expr fold_binary(Op op, const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) {
    double v = 0.0;
    try {
      v = apply_binary(op, a.value(), b.value());
    } catch (const DomainError&) {
      return Expr::binary(op, a, b);
    }
    if (std::isfinite(v)) return Expr::number(v);
    return Expr::binary(op, a, b);
  }
  switch (op) {
    case Op::Add:
      if (a.is_number(0.0)) return b;
      if (b.is_number(0.0)) return a;
      if (b.op() == Op::Neg) return fold_binary(Op::Sub, a, b.lhs());
      break;
    case Op::Sub:
      if (b.is_number(0.0)) return a;
      if (a.is_number(0.0)) return is_const(b) ? Expr::number(-b.value()) : -b;
      if (b.op() == Op::Neg) return fold_binary(Op::Add, a, b.lhs());
      break;
    case Op::Mul:
      if (a.is_number(0.0) || b.is_number(0.0)) return Expr::number(0.0);
      if (a.is_number(1.0)) return b;
      if (b.is_number(1.0)) return a;
      if (a.is_number(-1.0)) return -b;
      if (b.is_number(-1.0)) return -a;
      break;
    case Op::Div:
      if (b.is_number(1.0)) return a;
      if (a.is_number(0.0) && !is_const(b)) return Expr::number(0.0);
      break;
    case Op::Pow:
      if (b.is_number(0.0)) return Expr::number(1.0);
      if (b.is_number(1.0)) return a;
      break;
    default:
      break;
  }
  return Expr::binary(op, a, b);
}

Expr fold_neg(const Expr& a) {
  if (is_const(a)) return Expr::number(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return -a;
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::Number:
    case Op::Constant:
    case Op::Variable:
      return e;
    case Op::Neg:
      return fold_neg(simplify(e.lhs()));
    case Op::Call: {
      Expr arg = simplify(e.lhs());
      return Expr::call(e.fn(), arg);
    }
    default:
      return fold_binary(e.op(), simplify(e.lhs()), simplify(e.rhs()));
  }
}

// -------------------------------------------------------- differentiation

namespace {

Expr num(double v) { return Expr::number(v); }

// Simplifying constructors keep derivative trees small.
Expr add(const Expr& a, const Expr& b) { return fold_binary(Op::Add, a, b); }
Expr sub(const Expr& a, const Expr& b) { return fold_binary(Op::Sub, a, b); }
Expr mul(const Expr& a, const Expr& b) { return fold_binary(Op::Mul, a, b); }
Expr dvd(const Expr& a, const Expr& b) { return fold_binary(Op::Div, a, b); }
Expr pw(const Expr& a, const Expr& b) { return fold_binary(Op::Pow, a, b); }

Expr d1(const Expr& e, const std::string& var) {
  if (!e.depends_on(var)) return num(0.0);
  switch (e.op()) {
    case Op::Number:
    case Op::Constant:
      return num(0.0);
    case Op::Variable:
      return num(1.0);
    case Op::Add:
      return add(d1(e.lhs(), var), d1(e.rhs(), var));
    case Op::Sub:
      return sub(d1(e.lhs(), var), d1(e.rhs(), var));
    case Op::Mul:
      return add(mul(d1(e.lhs(), var), e.rhs()), mul(e.lhs(), d1(e.rhs(), var)));
    case Op::Div: {
      const Expr& f = e.lhs();
      const Expr& g = e.rhs();
      if (!g.depends_on(var)) return dvd(d1(f, var), g);
      return dvd(sub(mul(d1(f, var), g), mul(f, d1(g, var))),
                 pw(g, num(2.0)));
    }
    case Op::Pow: {
      const Expr& f = e.lhs();
      const Expr& g = e.rhs();
      if (!g.depends_on(var)) {
        return mul(mul(g, pw(f, sub(g, num(1.0)))), d1(f, var));
      }
      // d(f^g) = f^g * (g' ln f + g f'/f)
      Expr inner = add(mul(d1(g, var), Expr::call(Fn::Ln, f)),
                       dvd(mul(g, d1(f, var)), f));
      return mul(e, inner);
    }
    case Op::Neg:
      return fold_neg(d1(e.lhs(), var));
    case Op::Call: {
      const Expr& u = e.lhs();
      Expr du = d1(u, var);
      Expr outer;
      switch (e.fn()) {
        case Fn::Sin:
          outer = Expr::call(Fn::Cos, u);
          break;
        case Fn::Cos:
          outer = fold_neg(Expr::call(Fn::Sin, u));
          break;
        case Fn::Tan:
          outer = dvd(num(1.0), pw(Expr::call(Fn::Cos, u), num(2.0)));
          break;
        case Fn::Sinh:
          outer = Expr::call(Fn::Cosh, u);
          break;
        case Fn::Cosh:
          outer = Expr::call(Fn::Sinh, u);
          break;
        case Fn::Tanh:
          outer = sub(num(1.0), pw(Expr::call(Fn::Tanh, u), num(2.0)));
          break;
        case Fn::Exp:
          outer = e;
          break;
        case Fn::Ln:
          outer = dvd(num(1.0), u);
          break;
        case Fn::Sqrt:
          outer = dvd(num(0.5), e);
          break;
        case Fn::Abs:
          outer = Expr::call(Fn::Sgn, u);
          break;
        case Fn::Sgn:
          return num(0.0);
      }
      return mul(outer, du);
    }
  }
  return num(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var, int order) {
  if (order < 0) throw Error("negative derivative order");
  Expr out = simplify(e);
  for (int i = 0; i < order; ++i) out = simplify(d1(out, var));
  return out;
}

Expr substitute(const Expr& e, const std::string& var,
                const Expr& replacement) {
  switch (e.op()) {
    case Op::Number:
    case Op::Constant:
      return e;
    case Op::Variable:
      return e.name() == var ? replacement : e;
    case Op::Neg:
      return -substitute(e.lhs(), var, replacement);
    case Op::Call:
      return Expr::call(e.fn(), substitute(e.lhs(), var, replacement));
    default:
      return Expr::binary(e.op(), substitute(e.lhs(), var, replacement),
                          substitute(e.rhs(), var, replacement));
  }
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Number:
      return a.value() == b.value();
    case Op::Constant:
    case Op::Variable:
      return a.name() == b.name();
    case Op::Neg:
      return structurally_equal(a.lhs(), b.lhs());
    case Op::Call:
      return a.fn() == b.fn() && structurally_equal(a.lhs(), b.lhs());
    default:
      return structurally_equal(a.lhs(), b.lhs()) &&
             structurally_equal(a.rhs(), b.rhs());
  }
}

// --------------------------------------------------------- compiled form

namespace {

enum Code : std::uint8_t { kPush, kLoad, kNeg, kCall, kBin };

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots,
                           const Bindings& fixed) {
  std::size_t depth = 0;
  std::function<void(const Expr&)> emit = [&](const Expr& n) {
    switch (n.op()) {
      case Op::Number:
      case Op::Constant:
        program_.push_back({kPush, 0, 0, n.value()});
        ++depth;
        break;
      case Op::Variable: {
        std::uint32_t idx = 0;
        for (; idx < slots.size(); ++idx) {
          if (slots[idx] == n.name()) break;
        }
        if (idx < slots.size()) {
          program_.push_back({kLoad, 0, idx, 0.0});
          constant_ = false;
        } else {
          auto it = fixed.find(n.name());
          if (it == fixed.end()) throw UnboundVariable(n.name());
          program_.push_back({kPush, 0, 0, it->second});
        }
        ++depth;
        break;
      }
      case Op::Neg:
        emit(n.lhs());
        program_.push_back({kNeg, 0, 0, 0.0});
        break;
      case Op::Call:
        emit(n.lhs());
        program_.push_back(
            {kCall, static_cast<std::uint8_t>(n.fn()), 0, 0.0});
        break;
      default:
        emit(n.lhs());
        emit(n.rhs());
        program_.push_back({kBin, static_cast<std::uint8_t>(n.op()), 0, 0.0});
        --depth;
        break;
    }
    max_depth_ = std::max(max_depth_, depth);
  };
  emit(e);
}

double CompiledExpr::operator()(const double* slot_values) const {
  constexpr std::size_t kInline = 64;
  double inline_stack[kInline];
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(max_depth_);
    stack = heap.data();
  }
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.code) {
      case kPush:
        stack[top++] = in.value;
        break;
      case kLoad:
        stack[top++] = slot_values[in.slot];
        break;
      case kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
      case kCall:
        stack[top - 1] = check(apply_fn(static_cast<Fn>(in.fn), stack[top - 1]),
                               fn_name(static_cast<Fn>(in.fn)));
        break;
      default: {
        double b = stack[--top];
        stack[top - 1] = check(
            apply_binary(static_cast<Op>(in.fn), stack[top - 1], b),
            "arithmetic");
        break;
      }
    }
  }
  return top ? stack[0] : 0.0;
}

// ---------------------------------------------------------------- errors

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& message)
    : Error(message), offset_(offset), expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t offset,
                                     const std::string& name)
    : Error("unknown identifier '" + name + "' at offset " +
            std::to_string(offset)),
      offset_(offset) {}

UnboundVariable::UnboundVariable(const std::string& name)
    : Error("unbound variable '" + name + "'") {}

SingularSupport::SingularSupport(double condition, const std::string& message)
    : Error(message), condition_(condition) {}

ConfigError::ConfigError(std::string path, const std::string& message)
    : Error(path.empty() ? message : path + ": " + message),
      path_(std::move(path)) {}

}  // namespace tfc
