// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/desolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "tfc/errors.hpp"
#include "tfc/freefn.hpp"
#include "tfc/parallel.hpp"

namespace tfc {

namespace {

constexpr double kKernelRatio = 1e-11;
constexpr int kConstraintSamples = 200;
constexpr std::uint64_t kConstraintSeed = 20240611;

Eigen::VectorXd axis_nodes(const Dimension& d, int n, GridKind kind) {
  if (n < 1) throw ConfigError(d.name, "grid needs at least one point");
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (d.lo + d.hi));
  if (kind == GridKind::Uniform) return uniform_nodes(n, d.lo, d.hi);
  Eigen::VectorXd z = cgl_nodes(n);
  DomainMap map(d.lo, d.hi, -1.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = map.to_problem(z[i]);
  z[0] = d.lo;
  z[z.size() - 1] = d.hi;
  return z;
}

Eigen::MatrixXd tensor_points(const std::vector<Eigen::VectorXd>& axes) {
  Eigen::Index total = 1;
  for (const auto& a : axes) total *= a.size();
  const std::size_t nd = axes.size();
  Eigen::MatrixXd X(total, static_cast<Eigen::Index>(nd));
  std::vector<Eigen::Index> idx(nd, 0);
  for (Eigen::Index p = 0; p < total; ++p) {
    for (std::size_t k = 0; k < nd; ++k) {
      X(p, static_cast<Eigen::Index>(k)) = axes[k][idx[k]];
    }
    for (std::size_t k = nd; k > 0; --k) {
      if (++idx[k - 1] < axes[k - 1].size()) break;
      idx[k - 1] = 0;
    }
  }
  return X;
}

Modes free_modes(int nd) {
  return Modes(static_cast<std::size_t>(nd), DimMode::free(0));
}

// Default removal: the support exponents of each dimension's constraints.
Removal default_removal(const DeVariable& var, int dim) {
  auto it = var.supports.find(dim);
  if (it != var.supports.end()) return Removal::indices(it->second);
  int k = 0;
  for (const auto& c : var.constraints) {
    if (c.dim == dim) ++k;
  }
  return k == 0 ? Removal::none() : Removal::first(k);
}

DomainMap basis_map(Family f, const Dimension& d) {
  auto [z0, zf] = native_domain(f);
  if (!std::isfinite(z0) && !std::isfinite(zf)) {
    z0 = -1.0;
    zf = 1.0;
  } else if (!std::isfinite(zf)) {
    zf = z0 + 1.0;
  }
  return DomainMap(d.lo, d.hi, z0, zf);
}

// C[u_v] and the matching right-hand side at the rows of X.
std::pair<Eigen::VectorXd, Eigen::VectorXd> constraint_values(
    const CeSystem& sys, int v, const Constraint& c, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& xi, const Bindings& symbols) {
  const Modes base = free_modes(sys.num_dims());
  auto term_modes = [&](const DimMode& m) {
    Modes pm = base;
    pm[static_cast<std::size_t>(c.dim)] = m;
    for (const auto& f : c.foreign) {
      pm[static_cast<std::size_t>(f.dim)] = DimMode::integral(f.a, f.b);
    }
    return pm;
  };
  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(X.rows());
  for (const auto& t : c.op) {
    lhs += t.coef * sys.evaluate(v, X, term_modes(t.mode), xi, symbols);
  }
  Eigen::VectorXd rhs = probe_expr(c.kappa, sys.dim_names(), X, base, symbols);
  for (const auto& comp : c.components) {
    rhs += comp.coef * sys.evaluate(sys.variable_index(comp.variable), X,
                                    term_modes(comp.mode), xi, symbols);
  }
  return {lhs, rhs};
}

}  // namespace

// ------------------------------------------------------------------ grids

const char* grid_kind_name(GridKind k) noexcept {
  return k == GridKind::Cgl ? "cgl" : "uniform";
}

GridKind grid_kind_from_name(const std::string& name) {
  if (name == "cgl") return GridKind::Cgl;
  if (name == "uniform") return GridKind::Uniform;
  throw ConfigError("", "unknown grid kind '" + name + "'");
}

Eigen::MatrixXd make_grid(const std::vector<Dimension>& dims,
                          const GridSpec& spec) {
  if (spec.points.size() != dims.size()) {
    throw ConfigError("grid", "need one point count per dimension");
  }
  std::vector<Eigen::VectorXd> axes;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    axes.push_back(axis_nodes(dims[k], spec.points[k], spec.kind));
  }
  return tensor_points(axes);
}

// ---------------------------------------------------------------- symbols

std::optional<DerivativeSymbol> parse_derivative_symbol(
    const std::string& symbol, const std::vector<std::string>& variables,
    const std::vector<std::string>& dims) {
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const std::string& name = variables[v];
    DerivativeSymbol out;
    out.variable = static_cast<int>(v);
    out.orders.assign(dims.size(), 0);
    if (symbol == name) return out;
    if (symbol.size() <= name.size() + 1 ||
        symbol.compare(0, name.size(), name) != 0 ||
        symbol[name.size()] != '_') {
      continue;
    }
    const std::string rest = symbol.substr(name.size() + 1);
    // Longest dimension name first, with backtracking.
    std::vector<int> order(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return dims[static_cast<std::size_t>(a)].size() >
             dims[static_cast<std::size_t>(b)].size();
    });
    std::vector<int> counts(dims.size(), 0);
    std::function<bool(std::size_t)> split = [&](std::size_t pos) {
      if (pos == rest.size()) return true;
      for (int k : order) {
        const std::string& d = dims[static_cast<std::size_t>(k)];
        if (!d.empty() && rest.compare(pos, d.size(), d) == 0) {
          ++counts[static_cast<std::size_t>(k)];
          if (split(pos + d.size())) return true;
          --counts[static_cast<std::size_t>(k)];
        }
      }
      return false;
    };
    if (split(0)) {
      out.orders = counts;
      return out;
    }
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- clamps

InequalityClamp::InequalityClamp(Expr lower, Expr upper, std::string var,
                                 Bindings fixed)
    : lo_(std::move(lower)),
      hi_(std::move(upper)),
      var_(std::move(var)),
      fixed_(std::move(fixed)) {
  dlo_ = differentiate(lo_, var_, 1);
  dhi_ = differentiate(hi_, var_, 1);
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    double lo = 0.0, hi = 0.0;
    try {
      lo = this->lower(x);
      hi = this->upper(x);
    } catch (const DomainError&) {
      continue;
    }
    if (lo > hi) throw ConfigError("clamp", "lower bound exceeds upper bound");
  }
}

double InequalityClamp::lower(double x) const {
  Bindings b = fixed_;
  b[var_] = x;
  return evaluate(lo_, b);
}

double InequalityClamp::upper(double x) const {
  Bindings b = fixed_;
  b[var_] = x;
  return evaluate(hi_, b);
}

double InequalityClamp::value(double inner, double x) const {
  const double lo = lower(x);
  const double hi = upper(x);
  if (lo > hi) throw ConfigError("clamp", "lower bound exceeds upper bound");
  // Same as g + (f_u - g) H(g - f_u) + (f_l - g) H(f_l - g) without the
  // rounding of the sums.
  if (inner > hi) return hi;
  if (inner < lo) return lo;
  return inner;
}

double InequalityClamp::derivative(double inner, double inner_d,
                                   double x) const {
  const double lo = lower(x);
  const double hi = upper(x);
  if (lo > hi) throw ConfigError("clamp", "lower bound exceeds upper bound");
  Bindings b = fixed_;
  b[var_] = x;
  if (inner < lo) return evaluate(dlo_, b);
  if (inner > hi) return evaluate(dhi_, b);
  return inner_d;
}

double InequalityClamp::sensitivity(double inner, double x) const {
  return (inner < lower(x) || inner > upper(x)) ? 0.0 : 1.0;
}

double ClampedFunction::value(double x, int d) const {
  const double inner = inner_.value(x, 0);
  if (d == 0) return clamp_.value(inner, x);
  if (d == 1) return clamp_.derivative(inner, inner_.value(x, 1), x);
  throw Error("clamped functions provide derivatives up to order 1");
}

// ---------------------------------------------------------- free functions

std::shared_ptr<const FreeFunction> build_free_function(
    const DeVariable& var, const std::vector<Dimension>& dims) {
  const BasisSpec& bs = var.basis;
  const int nd = static_cast<int>(dims.size());
  if (bs.kind == BasisSpec::Kind::Elm) {
    if (bs.neurons <= 0) throw ConfigError(var.name, "neuron count must be positive");
    std::vector<DomainMap> maps;
    for (const auto& d : dims) maps.emplace_back(d.lo, d.hi, 0.0, 1.0);
    return std::make_shared<ElmBasis>(
        elm_init(bs.seed, bs.neurons, nd, bs.weight_lo, bs.weight_hi,
                 bs.activation),
        std::move(maps));
  }
  if (bs.degree < 0) throw ConfigError(var.name, "degree must be non-negative");
  std::vector<UnivariateBasis> bases;
  for (int k = 0; k < nd; ++k) {
    auto it = bs.removal.find(k);
    Removal rem = it != bs.removal.end() ? Removal::indices(it->second)
                                         : default_removal(var, k);
    for (int idx : rem.list()) {
      if (idx < 0 || idx > bs.degree) {
        throw ConfigError(var.name, "removal index outside the basis");
      }
    }
    bases.emplace_back(bs.family, bs.degree,
                       basis_map(bs.family, dims[static_cast<std::size_t>(k)]),
                       rem);
  }
  return std::make_shared<TensorBasis>(std::move(bases),
                                       bs.total_degree ? bs.degree : -1);
}

// ----------------------------------------------------------------- model

struct DeModel::Impl {
  struct Residual {
    CompiledExpr f;
    std::vector<std::pair<int, CompiledExpr>> dterm;
    std::vector<std::pair<int, CompiledExpr>> dextra;
    bool affine = true;
  };

  std::vector<std::string> var_names;
  std::vector<DerivativeSymbol> terms;
  std::vector<Modes> term_modes;
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::VectorXd> b0;
  // Part of b0 that does not come from kappa.
  std::vector<Eigen::VectorXd> bfree;
  std::vector<Residual> residuals;
  std::vector<int> active;
  std::vector<std::optional<InequalityClamp>> clamps;
  std::vector<bool> extra_in_kappa;
  bool reads_extras = false;
  // Spectral boundary rows over the active columns: S xi - s.
  Eigen::MatrixXd S;
  Eigen::VectorXd s;
  int nslots = 0;
  int ndims = 0;
};

DeModel::~DeModel() = default;

DeModel::DeModel(const DeProblem& problem)
    : problem_(problem), impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  const auto& dims = problem_.dims;
  const int nd = static_cast<int>(dims.size());
  im.ndims = nd;
  if (problem_.variables.empty()) {
    throw ConfigError("variables", "at least one dependent variable is required");
  }
  if (problem_.residuals.empty()) {
    throw ConfigError("residuals", "at least one residual is required");
  }
  std::vector<std::string> dim_names;
  for (const auto& d : dims) dim_names.push_back(d.name);

  std::set<std::string> taken(dim_names.begin(), dim_names.end());
  std::vector<std::string> symbols;
  for (const auto& [name, value] : problem_.parameters) {
    (void)value;
    if (!taken.insert(name).second) {
      throw ConfigError("parameters/" + name, "name already in use");
    }
    symbols.push_back(name);
  }
  for (const auto& e : problem_.extras) {
    if (!taken.insert(e.name).second) {
      throw ConfigError("extras/" + e.name, "name already in use");
    }
    symbols.push_back(e.name);
    if (e.bounds) {
      im.clamps.emplace_back(InequalityClamp(Expr::number(e.bounds->lo),
                                             Expr::number(e.bounds->hi)));
    } else {
      im.clamps.emplace_back(std::nullopt);
    }
  }
  for (const auto& v : problem_.variables) {
    if (v.name.empty() || v.name.find('_') != std::string::npos) {
      throw ConfigError("variables/" + v.name,
                        "variable names must be non-empty without '_'");
    }
    if (!taken.insert(v.name).second) {
      throw ConfigError("variables/" + v.name, "name already in use");
    }
    im.var_names.push_back(v.name);
  }

  std::vector<VariableDef> defs;
  for (const auto& v : problem_.variables) {
    VariableDef def;
    def.name = v.name;
    def.supports = v.supports;
    if (!problem_.spectral) def.constraints = v.constraints;
    DeVariable basis_var = v;
    if (problem_.spectral) basis_var.constraints.clear();
    def.free = build_free_function(basis_var, dims);
    defs.push_back(std::move(def));
  }
  system_ = std::make_shared<CeSystem>(dims, std::move(defs), symbols);

  grid_ = make_grid(dims, problem_.train);
  const Bindings sym0 = this->symbols(initial_theta_full());

  // Columns annihilated by the constrained expression carry no information.
  {
    const Eigen::Index n = system_->size();
    std::vector<bool> keep(static_cast<std::size_t>(n), true);
    for (int v = 0; v < system_->num_variables(); ++v) {
      if (system_->size(v) == 0) continue;
      Affine ce = system_->probe(v, grid_, free_modes(nd), sym0);
      Eigen::MatrixXd H;
      Eigen::VectorXd hb;
      system_->variable(v).free->probe(grid_, free_modes(nd), H, hb);
      for (int j = 0; j < system_->size(v); ++j) {
        const int col = system_->offset(v) + j;
        const double raw = H.col(j).norm();
        const double out = ce.A.col(col).norm();
        if (raw > 0.0 && out <= kKernelRatio * raw) {
          keep[static_cast<std::size_t>(col)] = false;
        }
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (keep[static_cast<std::size_t>(j)]) im.active.push_back(static_cast<int>(j));
    }
  }

  // Residual symbols.
  std::vector<std::string> term_names;
  for (std::size_t r = 0; r < problem_.residuals.size(); ++r) {
    for (const auto& name : problem_.residuals[r].variables()) {
      if (taken.count(name) && std::find(im.var_names.begin(), im.var_names.end(),
                                         name) == im.var_names.end()) {
        continue;
      }
      auto sym = parse_derivative_symbol(name, im.var_names, dim_names);
      if (!sym) {
        throw ConfigError("residuals/" + std::to_string(r),
                          "unknown symbol '" + name + "'");
      }
      if (std::find(term_names.begin(), term_names.end(), name) ==
          term_names.end()) {
        term_names.push_back(name);
        im.terms.push_back(*sym);
      }
    }
  }
  std::vector<std::string> slots = dim_names;
  slots.insert(slots.end(), term_names.begin(), term_names.end());
  for (const auto& e : problem_.extras) slots.push_back(e.name);
  im.nslots = static_cast<int>(slots.size());

  for (const auto& e : problem_.extras) {
    bool found = false;
    for (const auto& v : problem_.variables) {
      for (const auto& c : v.constraints) {
        if (c.kappa.depends_on(e.name)) found = true;
      }
    }
    im.extra_in_kappa.push_back(found);
    if (found) im.reads_extras = true;
  }

  for (const auto& t : im.terms) {
    Modes m;
    for (int o : t.orders) m.push_back(DimMode::free(o));
    im.term_modes.push_back(m);
    Affine a = system_->probe(t.variable, grid_, m, sym0);
    Eigen::MatrixXd Ar(a.A.rows(), static_cast<Eigen::Index>(im.active.size()));
    for (std::size_t j = 0; j < im.active.size(); ++j) {
      Ar.col(static_cast<Eigen::Index>(j)) = a.A.col(im.active[j]);
    }
    im.A.push_back(std::move(Ar));
    if (im.reads_extras) {
      ProbeOptions zero;
      zero.zero_free = true;
      im.bfree.push_back(a.b -
                         system_->probe(t.variable, grid_, m, sym0, zero).b);
    }
    im.b0.push_back(std::move(a.b));
  }

  for (std::size_t r = 0; r < problem_.residuals.size(); ++r) {
    const Expr& F = problem_.residuals[r];
    Impl::Residual res;
    res.f = CompiledExpr(F, slots, problem_.parameters);
    for (std::size_t s = 0; s < term_names.size(); ++s) {
      if (!F.depends_on(term_names[s])) continue;
      Expr d = differentiate(F, term_names[s], 1);
      for (const auto& other : term_names) {
        if (d.depends_on(other)) res.affine = false;
      }
      for (const auto& e : problem_.extras) {
        if (d.depends_on(e.name)) res.affine = false;
      }
      res.dterm.emplace_back(static_cast<int>(s),
                             CompiledExpr(d, slots, problem_.parameters));
    }
    for (std::size_t e = 0; e < problem_.extras.size(); ++e) {
      const std::string& name = problem_.extras[e].name;
      if (!F.depends_on(name)) continue;
      res.affine = false;
      im.reads_extras = true;
      res.dextra.emplace_back(
          static_cast<int>(e),
          CompiledExpr(differentiate(F, name, 1), slots, problem_.parameters));
    }
    im.residuals.push_back(std::move(res));
  }

  if (problem_.spectral) {
    if (!problem_.extras.empty()) {
      throw ConfigError("spectral", "spectral mode does not support extra unknowns");
    }
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<Eigen::VectorXd> rhs;
    Eigen::Index rows = 0;
    for (int v = 0; v < static_cast<int>(problem_.variables.size()); ++v) {
      const auto& cons = problem_.variables[static_cast<std::size_t>(v)].constraints;
      for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        const Constraint& c = cons[ci];
        if (!c.components.empty()) {
          throw ConfigError("spectral",
                            "spectral mode does not support component constraints");
        }
        GridSpec sub = problem_.train;
        sub.points[static_cast<std::size_t>(c.dim)] = 1;
        for (const auto& f : c.foreign) sub.points[static_cast<std::size_t>(f.dim)] = 1;
        const Eigen::MatrixXd Xc = make_grid(dims, sub);
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(Xc.rows(), system_->size());
        Eigen::VectorXd off = Eigen::VectorXd::Zero(Xc.rows());
        for (const auto& t : c.op) {
          Modes pm = free_modes(nd);
          pm[static_cast<std::size_t>(c.dim)] = t.mode;
          for (const auto& f : c.foreign) {
            pm[static_cast<std::size_t>(f.dim)] = DimMode::integral(f.a, f.b);
          }
          Affine a = system_->probe(v, Xc, pm, sym0);
          block += t.coef * a.A;
          off += t.coef * a.b;
        }
        Eigen::VectorXd kap =
            probe_expr(c.kappa, dim_names, Xc, free_modes(nd), sym0);
        Eigen::MatrixXd br(Xc.rows(), static_cast<Eigen::Index>(im.active.size()));
        for (std::size_t j = 0; j < im.active.size(); ++j) {
          br.col(static_cast<Eigen::Index>(j)) = block.col(im.active[j]);
        }
        blocks.push_back(std::move(br));
        rhs.push_back(kap - off);
        rows += Xc.rows();
      }
    }
    im.S.resize(rows, static_cast<Eigen::Index>(im.active.size()));
    im.s.resize(rows);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      im.S.middleRows(at, blocks[i].rows()) = blocks[i];
      im.s.segment(at, blocks[i].rows()) = rhs[i];
      at += blocks[i].rows();
    }
  }
}

Eigen::VectorXd DeModel::initial_theta_full() const {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(
      system_ ? system_->size() + static_cast<Eigen::Index>(problem_.extras.size())
              : static_cast<Eigen::Index>(problem_.extras.size()));
  const Eigen::Index off = theta.size() - static_cast<Eigen::Index>(problem_.extras.size());
  for (std::size_t e = 0; e < problem_.extras.size(); ++e) {
    theta[off + static_cast<Eigen::Index>(e)] = problem_.extras[e].initial;
  }
  return theta;
}

int DeModel::num_xi() const noexcept {
  return static_cast<int>(impl_->active.size());
}

int DeModel::num_rows() const noexcept {
  return static_cast<int>(grid_.rows()) *
             static_cast<int>(problem_.residuals.size()) +
         static_cast<int>(impl_->S.rows());
}

bool DeModel::is_affine() const noexcept {
  if (!problem_.extras.empty()) return false;
  for (const auto& r : impl_->residuals) {
    if (!r.affine) return false;
  }
  return true;
}

Eigen::VectorXd DeModel::initial_theta() const {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(num_unknowns());
  for (std::size_t e = 0; e < problem_.extras.size(); ++e) {
    theta[num_xi() + static_cast<Eigen::Index>(e)] = problem_.extras[e].initial;
  }
  return theta;
}

Eigen::VectorXd DeModel::full_xi(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(system_->size());
  for (std::size_t j = 0; j < impl_->active.size(); ++j) {
    xi[impl_->active[j]] = theta[static_cast<Eigen::Index>(j)];
  }
  return xi;
}

Bindings DeModel::symbols(const Eigen::VectorXd& theta) const {
  Bindings b = problem_.parameters;
  const Eigen::Index off =
      theta.size() - static_cast<Eigen::Index>(problem_.extras.size());
  for (std::size_t e = 0; e < problem_.extras.size(); ++e) {
    const double raw = theta[off + static_cast<Eigen::Index>(e)];
    const auto& clamp = impl_->clamps[e];
    b[problem_.extras[e].name] = clamp ? clamp->value(raw, 0.0) : raw;
  }
  return b;
}

std::vector<double> DeModel::extra_values(const Eigen::VectorXd& theta) const {
  const Bindings b = symbols(theta);
  std::vector<double> out;
  for (const auto& e : problem_.extras) out.push_back(b.at(e.name));
  return out;
}

LinearSystem DeModel::assemble_linear() const {
  const Impl& im = *impl_;
  if (!problem_.extras.empty()) {
    throw NonAffineResidual("problem has extra unknowns");
  }
  for (std::size_t r = 0; r < im.residuals.size(); ++r) {
    if (!im.residuals[r].affine) {
      throw NonAffineResidual("residual " + std::to_string(r) +
                              " is not affine in the dependent variables");
    }
  }
  const Eigen::Index N = grid_.rows();
  const Eigen::Index R = static_cast<Eigen::Index>(im.residuals.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(im.active.size());
  LinearSystem out;
  out.A.setZero(N * R + im.S.rows(), nc);
  out.b.setZero(N * R + im.S.rows());
  for (Eigen::Index r = 0; r < R; ++r) {
    const auto& res = im.residuals[static_cast<std::size_t>(r)];
    parallel_rows(N, [&](Eigen::Index begin, Eigen::Index end) {
      std::vector<double> slots(static_cast<std::size_t>(im.nslots), 0.0);
      for (Eigen::Index p = begin; p < end; ++p) {
        for (int k = 0; k < im.ndims; ++k) slots[static_cast<std::size_t>(k)] = grid_(p, k);
        double rhs = -res.f(slots.data());
        for (const auto& [s, dc] : res.dterm) {
          const double coef = dc(slots.data());
          out.A.row(r * N + p) += coef * im.A[static_cast<std::size_t>(s)].row(p);
          rhs -= coef * im.b0[static_cast<std::size_t>(s)][p];
        }
        out.b[r * N + p] = rhs;
      }
    }, 16);
  }
  if (im.S.rows() > 0) {
    out.A.bottomRows(im.S.rows()) = im.S;
    out.b.tail(im.S.rows()) = im.s;
  }
  return out;
}

Eigen::VectorXd DeModel::residual(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd L;
  evaluate(theta, &L, nullptr);
  return L;
}

Eigen::MatrixXd DeModel::jacobian(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd J;
  evaluate(theta, nullptr, &J);
  return J;
}

void DeModel::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* L,
                       Eigen::MatrixXd* J) const {
  const Impl& im = *impl_;
  if (theta.size() != num_unknowns()) {
    throw Error("unknown vector has wrong size");
  }
  const Eigen::Index N = grid_.rows();
  const Eigen::Index nc = num_xi();
  const std::size_t ne = problem_.extras.size();
  const std::size_t nt = im.terms.size();
  const Bindings sym = symbols(theta);
  const Eigen::VectorXd xi = theta.head(nc);
  std::vector<double> eff(ne), sens(ne, 1.0);
  for (std::size_t e = 0; e < ne; ++e) {
    const double raw = theta[nc + static_cast<Eigen::Index>(e)];
    eff[e] = sym.at(problem_.extras[e].name);
    if (im.clamps[e]) sens[e] = im.clamps[e]->sensitivity(raw, 0.0);
  }

  // Term values U[s] = A_s xi + b_s(extras) and offset sensitivities.
  std::vector<Eigen::VectorXd> U(nt);
  std::vector<std::vector<Eigen::VectorXd>> db(nt);
  for (std::size_t s = 0; s < nt; ++s) {
    const int v = im.terms[s].variable;
    Eigen::VectorXd b = im.b0[s];
    if (im.reads_extras) {
      ProbeOptions zero;
      zero.zero_free = true;
      b = im.bfree[s] + system_->probe(v, grid_, im.term_modes[s], sym, zero).b;
    }
    U[s] = im.A[s] * xi + b;
    if (J) {
      db[s].assign(ne, Eigen::VectorXd());
      for (std::size_t e = 0; e < ne; ++e) {
        if (!im.extra_in_kappa[e]) continue;
        ProbeOptions d;
        d.zero_free = true;
        d.kappa_derivative = problem_.extras[e].name;
        db[s][e] = system_->probe(v, grid_, im.term_modes[s], sym, d).b;
      }
    }
  }

  const Eigen::Index R = static_cast<Eigen::Index>(im.residuals.size());
  const Eigen::Index rows = N * R + im.S.rows();
  if (L) L->resize(rows);
  if (J) J->setZero(rows, num_unknowns());
  const std::size_t term0 = static_cast<std::size_t>(im.ndims);
  const std::size_t extra0 = term0 + nt;
  for (Eigen::Index r = 0; r < R; ++r) {
    const auto& res = im.residuals[static_cast<std::size_t>(r)];
    parallel_rows(N, [&](Eigen::Index begin, Eigen::Index end) {
      std::vector<double> slots(static_cast<std::size_t>(im.nslots), 0.0);
      for (Eigen::Index p = begin; p < end; ++p) {
        for (int k = 0; k < im.ndims; ++k) slots[static_cast<std::size_t>(k)] = grid_(p, k);
        for (std::size_t s = 0; s < nt; ++s) slots[term0 + s] = U[s][p];
        for (std::size_t e = 0; e < ne; ++e) slots[extra0 + e] = eff[e];
        const Eigen::Index row = r * N + p;
        if (L) (*L)[row] = res.f(slots.data());
        if (!J) continue;
        for (const auto& [s, dc] : res.dterm) {
          const double c = dc(slots.data());
          const auto su = static_cast<std::size_t>(s);
          J->row(row).head(nc) += c * im.A[su].row(p);
          for (std::size_t e = 0; e < ne; ++e) {
            if (db[su][e].size() == 0) continue;
            (*J)(row, nc + static_cast<Eigen::Index>(e)) += c * db[su][e][p] * sens[e];
          }
        }
        for (const auto& [e, dc] : res.dextra) {
          const auto eu = static_cast<std::size_t>(e);
          (*J)(row, nc + e) += dc(slots.data()) * sens[eu];
        }
      }
    }, 16);
  }
  if (im.S.rows() > 0) {
    if (L) L->tail(im.S.rows()) = im.S * xi - im.s;
    if (J) J->bottomLeftCorner(im.S.rows(), nc) = im.S;
  }
}

LinearSystem assemble_linear(const DeProblem& problem) {
  return DeModel(problem).assemble_linear();
}

// ------------------------------------------------------------------ solve

namespace {

void fill_report(const DeModel& model, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& L, SolveReport& rep) {
  const DeProblem& pb = model.problem();
  const CeSystem& sys = model.system();
  const Eigen::VectorXd xi = model.full_xi(theta);
  const Bindings sym = model.symbols(theta);
  const int nd = sys.num_dims();

  rep.problem_id = pb.id;
  rep.variables.clear();
  rep.xi.clear();
  for (int v = 0; v < sys.num_variables(); ++v) {
    rep.variables.push_back(sys.variable(v).name);
    rep.xi.push_back(xi.segment(sys.offset(v), sys.size(v)));
  }
  rep.extras.clear();
  for (const auto& e : pb.extras) rep.extras.emplace_back(e.name, sym.at(e.name));
  rep.basis_size = sys.size();
  rep.training_points = static_cast<int>(model.grid().rows());
  const Eigen::Index nres = model.grid().rows() *
                            static_cast<Eigen::Index>(pb.residuals.size());
  const Eigen::VectorXd absL = L.head(nres).cwiseAbs();
  rep.max_residual = absL.size() ? absL.maxCoeff() : 0.0;
  rep.mean_residual = absL.size() ? absL.mean() : 0.0;

  // Constraint satisfaction at random samples.
  std::mt19937_64 rng(kConstraintSeed);
  Eigen::MatrixXd Xr(kConstraintSamples, nd);
  for (int k = 0; k < nd; ++k) {
    std::uniform_real_distribution<double> u(pb.dims[static_cast<std::size_t>(k)].lo,
                                             pb.dims[static_cast<std::size_t>(k)].hi);
    for (int p = 0; p < kConstraintSamples; ++p) Xr(p, k) = u(rng);
  }
  rep.constraint_error = 0.0;
  for (int v = 0; v < sys.num_variables(); ++v) {
    for (const auto& c : pb.variables[static_cast<std::size_t>(v)].constraints) {
      auto [lhs, rhs] = constraint_values(sys, v, c, Xr, xi, sym);
      rep.constraint_error =
          std::max(rep.constraint_error, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }

  // Test grid.
  rep.samples = TestSamples{};
  rep.max_error.reset();
  rep.mean_error.reset();
  if (pb.test.points.empty()) return;
  TestSamples& ts = rep.samples;
  ts.points = make_grid(pb.dims, pb.test);
  ts.dim_names = sys.dim_names();
  double emax = 0.0, esum = 0.0;
  Eigen::Index ecount = 0;
  for (int v = 0; v < sys.num_variables(); ++v) {
    ts.variables.push_back(sys.variable(v).name);
    ts.values.push_back(sys.evaluate(v, ts.points, free_modes(nd), xi, sym));
    const auto& exact = pb.variables[static_cast<std::size_t>(v)].exact;
    if (exact) {
      Eigen::VectorXd ut =
          probe_expr(*exact, sys.dim_names(), ts.points, free_modes(nd), sym);
      const Eigen::VectorXd err = (ts.values.back() - ut).cwiseAbs();
      emax = std::max(emax, err.maxCoeff());
      esum += err.sum();
      ecount += err.size();
      ts.exact.push_back(std::move(ut));
    } else {
      ts.exact.emplace_back();
    }
  }
  if (ecount > 0) {
    rep.max_error = emax;
    rep.mean_error = esum / static_cast<double>(ecount);
  }
}

}  // namespace

SolveReport solve(const DeProblem& problem) {
  const auto t0 = std::chrono::steady_clock::now();
  DeModel model(problem);
  SolveReport rep;
  Eigen::VectorXd theta;
  if (model.is_affine() && !problem.solver.force_nonlinear) {
    LinearSystem ls = model.assemble_linear();
    theta = problem.solver.scale_columns
                ? scaled_lstsq(ls.A, ls.b, problem.solver.method)
                : lstsq(ls.A, ls.b, problem.solver.method);
    rep.iterations = 1;
    rep.nonlinear = false;
    rep.converged = true;
  } else {
    NllsConfig cfg;
    cfg.tol = problem.solver.tol;
    cfg.max_iter = problem.solver.max_iter;
    cfg.method = problem.solver.method;
    cfg.check_jacobian = problem.solver.check_jacobian;
    cfg.scale_columns = problem.solver.scale_columns;
    Eigen::VectorXd start = model.initial_theta();
    int warm_iterations = 0;
    const int nx = model.num_xi();
    if (problem.solver.warm_start_iterations > 0 && !problem.extras.empty()) {
      NllsConfig warm = cfg;
      warm.max_iter = problem.solver.warm_start_iterations;
      warm.check_jacobian = false;
      const Eigen::VectorXd fixed = start.tail(start.size() - nx);
      auto full = [&](const Eigen::VectorXd& xi) {
        Eigen::VectorXd t(start.size());
        t << xi, fixed;
        return t;
      };
      NllsResult w = nlls(
          [&](const Eigen::VectorXd& xi) { return model.residual(full(xi)); },
          [&](const Eigen::VectorXd& xi) {
            return Eigen::MatrixXd(model.jacobian(full(xi)).leftCols(nx));
          },
          start.head(nx), warm);
      start = full(w.xi);
      warm_iterations = w.iterations;
    }
    NllsResult r = nlls([&](const Eigen::VectorXd& t) { return model.residual(t); },
                        [&](const Eigen::VectorXd& t) { return model.jacobian(t); },
                        start, cfg);
    theta = r.xi;
    rep.iterations = warm_iterations + r.iterations;
    rep.nonlinear = true;
    rep.termination = r.reason;
    rep.converged = r.reason != Termination::MaxIterations;
  }
  fill_report(model, theta, model.residual(theta), rep);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ------------------------------------------------------------------ split

DeProblem make_split_problem(const DeProblem& problem, const SplitSpec& split) {
  if (problem.dims.size() != 1 || problem.variables.size() != 1) {
    throw ConfigError("split", "domain splitting needs one dimension and one variable");
  }
  if (!problem.extras.empty()) {
    throw ConfigError("split", "domain splitting does not support extra unknowns");
  }
  if (!(split.bounds.lo < split.bounds.hi)) {
    throw ConfigError("split/bounds", "lower bound must be below upper bound");
  }
  const Dimension& dim = problem.dims[0];
  const DeVariable& var = problem.variables[0];
  const std::string& x = dim.name;
  for (const std::string reserved : {"z", "xp", "yp", "dyp"}) {
    if (x == reserved || var.name == reserved ||
        problem.parameters.count(reserved)) {
      throw ConfigError("split", "name '" + reserved + "' is reserved");
    }
  }
  const Expr z = Expr::variable("z");
  const Expr xp = Expr::variable("xp");
  const Expr one = Expr::number(1.0);
  const Expr two = Expr::number(2.0);
  const Expr x0 = Expr::number(dim.lo);
  const Expr x1 = Expr::number(dim.hi);
  // Slopes dz/dx of the two subdomain maps.
  const Expr c[2] = {two / (xp - x0), two / (x1 - xp)};
  const Expr start[2] = {x0, xp};

  DeProblem out;
  out.id = problem.id;
  out.dims = {{"z", -1.0, 1.0}};
  out.parameters = problem.parameters;
  out.solver = split.solver;
  out.train = GridSpec{{split.points}, GridKind::Cgl};
  out.test = GridSpec{{split.test_points}, GridKind::Uniform};
  out.extras = {{"xp", split.xp0, split.bounds},
                {"yp", split.yp0, std::nullopt},
                {"dyp", split.dyp0, std::nullopt}};

  std::set<std::string> names;
  for (const auto& r : problem.residuals) {
    for (const auto& n : r.variables()) names.insert(n);
  }
  for (int k = 0; k < 2; ++k) {
    DeVariable sub;
    sub.name = var.name + std::to_string(k + 1);
    sub.basis = split.basis;
    const Expr xmap = start[k] + (z + one) / c[k];
    if (var.exact) sub.exact = simplify(substitute(*var.exact, x, xmap));
    out.variables.push_back(std::move(sub));
  }
  for (const auto& c0 : var.constraints) {
    if (c0.op.size() != 1 || !c0.foreign.empty() || !c0.components.empty() ||
        c0.op[0].mode.kind != DimMode::Kind::Point) {
      throw ConfigError("split", "only single-point constraints can be split");
    }
    const DimMode& m = c0.op[0].mode;
    int k;
    double zloc;
    if (m.a == dim.lo) {
      k = 0;
      zloc = -1.0;
    } else if (m.a == dim.hi) {
      k = 1;
      zloc = 1.0;
    } else {
      throw ConfigError("split", "constraints must sit at the interval ends");
    }
    Constraint cz;
    cz.dim = 0;
    cz.op = {{c0.op[0].coef, DimMode::point(zloc, m.d)}};
    cz.kappa = simplify(c0.kappa / pow(c[k], Expr::number(m.d)));
    out.variables[static_cast<std::size_t>(k)].constraints.push_back(cz);
  }
  const Expr yp = Expr::variable("yp");
  const Expr dyp = Expr::variable("dyp");
  auto& c1 = out.variables[0].constraints;
  c1.push_back({0, {{1.0, DimMode::point(1.0, 0)}}, {}, yp, {}});
  c1.push_back({0, {{1.0, DimMode::point(1.0, 1)}}, {}, dyp / c[0], {}});
  auto& c2 = out.variables[1].constraints;
  c2.push_back({0, {{1.0, DimMode::point(-1.0, 0)}}, {}, yp, {}});
  c2.push_back({0, {{1.0, DimMode::point(-1.0, 1)}}, {}, dyp / c[1], {}});

  std::vector<std::string> vnames = {var.name};
  std::vector<std::string> dnames = {x};
  for (const auto& r : problem.residuals) {
    for (int k = 0; k < 2; ++k) {
      const std::string sub = var.name + std::to_string(k + 1);
      Expr e = substitute(r, x, start[k] + (z + one) / c[k]);
      for (const auto& n : names) {
        auto sym = parse_derivative_symbol(n, vnames, dnames);
        if (!sym) continue;
        const int d = sym->orders[0];
        const Expr repl = Expr::variable(d == 0 ? sub : sub + "_" + std::string(static_cast<std::size_t>(d), 'z'));
        e = substitute(e, n, d == 0 ? repl : pow(c[k], Expr::number(d)) * repl);
      }
      out.residuals.push_back(simplify(e));
    }
  }
  return out;
}

SolveReport solve_split(const DeProblem& problem, const SplitSpec& split) {
  const DeProblem sub = make_split_problem(problem, split);
  SolveReport rep = solve(sub);
  // Report the test samples on the original coordinate.
  double xp = 0.0;
  for (const auto& [n, v] : rep.extras) {
    if (n == "xp") xp = v;
  }
  const Dimension& dim = problem.dims[0];
  const TestSamples& ts = rep.samples;
  TestSamples merged;
  merged.dim_names = {dim.name};
  merged.variables = {problem.variables[0].name};
  const Eigen::Index n = ts.points.rows();
  merged.points.resize(2 * n, 1);
  merged.values.emplace_back(2 * n);
  const bool exact = !ts.exact.empty() && ts.exact[0].size() == n;
  if (exact) merged.exact.emplace_back(2 * n);
  else merged.exact.emplace_back();
  const double lo[2] = {dim.lo, xp};
  const double hi[2] = {xp, dim.hi};
  for (int k = 0; k < 2; ++k) {
    for (Eigen::Index p = 0; p < n; ++p) {
      const double z = ts.points(p, 0);
      merged.points(k * n + p, 0) = lo[k] + (z + 1.0) * 0.5 * (hi[k] - lo[k]);
      merged.values[0][k * n + p] = ts.values[static_cast<std::size_t>(k)][p];
      if (exact) merged.exact[0][k * n + p] = ts.exact[static_cast<std::size_t>(k)][p];
    }
  }
  rep.samples = std::move(merged);
  return rep;
}

}  // namespace tfc
