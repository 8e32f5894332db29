// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/multivar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>

#include "tfc/errors.hpp"
#include "tfc/parallel.hpp"

namespace tfc {

// -------------------------------------------------------- processing order

ProcessingOrder order_dimensions(int ndims,
                                 const std::vector<Constraint>& constraints) {
  ProcessingOrder result;
  std::vector<std::set<int>> succ(static_cast<std::size_t>(ndims));
  std::vector<int> indegree(static_cast<std::size_t>(ndims), 0);
  for (const auto& c : constraints) {
    for (const auto& f : c.foreign) {
      if (f.dim == c.dim) continue;
      if (succ[static_cast<std::size_t>(c.dim)].insert(f.dim).second) {
        ++indegree[static_cast<std::size_t>(f.dim)];
        result.forced.emplace_back(c.dim, f.dim);
      }
    }
  }
  std::set<int> ready;
  for (int k = 0; k < ndims; ++k) {
    if (indegree[static_cast<std::size_t>(k)] == 0) ready.insert(k);
  }
  while (!ready.empty()) {
    const int k = *ready.begin();
    ready.erase(ready.begin());
    result.order.push_back(k);
    for (int s : succ[static_cast<std::size_t>(k)]) {
      if (--indegree[static_cast<std::size_t>(s)] == 0) ready.insert(s);
    }
  }
  if (static_cast<int>(result.order.size()) != ndims) {
    throw CyclicIntegralDependency(
        "integral constraints integrate over one another's dimensions; no "
        "processing order exists");
  }
  return result;
}

// ---------------------------------------------------------------- system

struct CeSystem::Context {
  const Bindings& symbols;
  const ProbeOptions& opts;
};

namespace {

bool has_free_mode(const Modes& modes) {
  return std::any_of(modes.begin(), modes.end(), [](const DimMode& m) {
    return m.kind == DimMode::Kind::Free;
  });
}

void add_scaled(Affine& out, const Affine& in, double s) {
  out.A.noalias() += s * in.A;
  out.b.noalias() += s * in.b;
}

}  // namespace

CeSystem::CeSystem(std::vector<Dimension> dims, std::vector<VariableDef> vars,
                   std::vector<std::string> symbols,
                   std::vector<int> order_override)
    : dims_(std::move(dims)), symbols_(std::move(symbols)) {
  const int nd = num_dims();
  if (nd == 0) throw ConfigError("", "at least one dimension is required");
  for (const auto& d : dims_) {
    if (!(d.lo < d.hi)) {
      throw ConfigError(d.name, "dimension interval must have lo < hi");
    }
    if (std::find(dim_names_.begin(), dim_names_.end(), d.name) !=
        dim_names_.end()) {
      throw ConfigError(d.name, "duplicate dimension name");
    }
    dim_names_.push_back(d.name);
  }
  std::set<std::string> known(dim_names_.begin(), dim_names_.end());
  known.insert(symbols_.begin(), symbols_.end());

  for (auto& def : vars) {
    Var v;
    v.def = std::move(def);
    vars_.push_back(std::move(v));
  }
  for (std::size_t vi = 0; vi < vars_.size(); ++vi) {
    for (std::size_t vj = 0; vj < vi; ++vj) {
      if (vars_[vi].def.name == vars_[vj].def.name) {
        throw ConfigError(vars_[vi].def.name, "duplicate variable name");
      }
    }
  }

  for (auto& var : vars_) {
    const std::string& vname = var.def.name;
    if (var.def.free && var.def.free->dims() != nd) {
      throw ConfigError(vname, "free function dimension does not match");
    }
    var.by_dim.assign(static_cast<std::size_t>(nd), {});
    for (std::size_t ci = 0; ci < var.def.constraints.size(); ++ci) {
      const Constraint& c = var.def.constraints[ci];
      const std::string where =
          vname + "/constraints/" + std::to_string(ci);
      if (c.dim < 0 || c.dim >= nd) {
        throw ConfigError(where, "constraint dimension out of range");
      }
      if (c.op.empty()) throw ConfigError(where, "constraint has no terms");
      for (const auto& t : c.op) {
        if (t.mode.kind == DimMode::Kind::Free) {
          throw ConfigError(where, "terms must be point or integral modes");
        }
      }
      std::set<int> fdims;
      for (const auto& f : c.foreign) {
        if (f.dim < 0 || f.dim >= nd || f.dim == c.dim ||
            !fdims.insert(f.dim).second) {
          throw ConfigError(where, "invalid foreign integral dimension");
        }
      }
      if (c.kappa.depends_on(dim_names_[static_cast<std::size_t>(c.dim)])) {
        throw ConfigError(where, "kappa depends on the constrained dimension");
      }
      for (int fd : fdims) {
        if (c.kappa.depends_on(dim_names_[static_cast<std::size_t>(fd)])) {
          throw ConfigError(where, "kappa depends on an integrated dimension");
        }
      }
      for (const auto& name : c.kappa.variables()) {
        if (!known.count(name)) {
          throw ConfigError(where, "unknown symbol '" + name + "' in kappa");
        }
      }
      for (const auto& comp : c.components) {
        int q = -1;
        for (std::size_t k = 0; k < vars_.size(); ++k) {
          if (vars_[k].def.name == comp.variable) q = static_cast<int>(k);
        }
        if (q < 0) {
          throw ConfigError(where, "unknown component variable '" +
                                       comp.variable + "'");
        }
        if (comp.mode.kind == DimMode::Kind::Free) {
          throw ConfigError(where, "component terms must be point or integral");
        }
        if (std::find(var.component_deps.begin(), var.component_deps.end(),
                      q) == var.component_deps.end()) {
          var.component_deps.push_back(q);
        }
      }
      var.by_dim[static_cast<std::size_t>(c.dim)].push_back(
          static_cast<int>(ci));
    }

    if (order_override.empty()) {
      var.order = order_dimensions(nd, var.def.constraints);
    } else {
      std::vector<int> sorted = order_override;
      std::sort(sorted.begin(), sorted.end());
      for (int k = 0; k < nd; ++k) {
        if (static_cast<int>(sorted.size()) != nd || sorted[k] != k) {
          throw ConfigError(vname, "processing order is not a permutation");
        }
      }
      ProcessingOrder natural = order_dimensions(nd, var.def.constraints);
      for (const auto& [l, k] : natural.forced) {
        auto pl = std::find(order_override.begin(), order_override.end(), l);
        auto pk = std::find(order_override.begin(), order_override.end(), k);
        if (pl > pk) {
          throw ConfigError(vname, "processing order violates an integral "
                                   "constraint dependency");
        }
      }
      var.order.order = order_override;
      var.order.forced = natural.forced;
    }

    var.switching.resize(static_cast<std::size_t>(nd));
    for (int k = 0; k < nd; ++k) {
      const auto& ids = var.by_dim[static_cast<std::size_t>(k)];
      if (ids.empty()) continue;
      std::vector<ConstraintOperator> ops;
      for (int ci : ids) {
        const Constraint& c = var.def.constraints[ci];
        ConstraintOperator op = c.op;
        for (const auto& f : c.foreign) {
          for (auto& t : op) t.coef *= f.b - f.a;
        }
        ops.push_back(std::move(op));
      }
      std::vector<std::pair<double, double>> zero;
      for (const auto& c : var.def.constraints) {
        for (const auto& f : c.foreign) {
          if (f.dim != k) continue;
          std::pair<double, double> iv{f.a, f.b};
          if (std::find(zero.begin(), zero.end(), iv) == zero.end()) {
            zero.push_back(iv);
          }
        }
      }
      std::vector<int> sup;
      auto it = var.def.supports.find(k);
      if (it != var.def.supports.end()) sup = it->second;
      try {
        var.switching[static_cast<std::size_t>(k)] =
            build_switching(ops, zero, sup);
      } catch (const SingularSupport& e) {
        throw SingularSupport(e.condition(),
                              vname + " along " +
                                  dim_names_[static_cast<std::size_t>(k)] +
                                  ": " + e.what());
      }
    }
    var.offset = total_;
    var.size = var.def.free ? var.def.free->size() : 0;
    total_ += var.size;
  }

  // Component dependencies: construct leaves first.
  const int nv = num_variables();
  std::vector<int> state(static_cast<std::size_t>(nv), 0);
  std::function<void(int)> visit = [&](int v) {
    if (state[static_cast<std::size_t>(v)] == 2) return;
    if (state[static_cast<std::size_t>(v)] == 1) {
      throw ConfigError(vars_[static_cast<std::size_t>(v)].def.name,
                        "component constraints form a cycle");
    }
    state[static_cast<std::size_t>(v)] = 1;
    for (int q : vars_[static_cast<std::size_t>(v)].component_deps) visit(q);
    state[static_cast<std::size_t>(v)] = 2;
    construction_.push_back(v);
  };
  for (int v = 0; v < nv; ++v) visit(v);
}

int CeSystem::dim_index(const std::string& name) const {
  for (std::size_t k = 0; k < dim_names_.size(); ++k) {
    if (dim_names_[k] == name) return static_cast<int>(k);
  }
  throw ConfigError(name, "unknown dimension");
}

int CeSystem::variable_index(const std::string& name) const {
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (vars_[k].def.name == name) return static_cast<int>(k);
  }
  throw ConfigError(name, "unknown variable");
}

const SwitchingSet& CeSystem::switching(int v, int dim) const {
  return vars_.at(static_cast<std::size_t>(v))
      .switching.at(static_cast<std::size_t>(dim));
}

const std::vector<int>& CeSystem::constraints_on(int v, int dim) const {
  return vars_.at(static_cast<std::size_t>(v))
      .by_dim.at(static_cast<std::size_t>(dim));
}

Eigen::VectorXd CeSystem::probe_kappa(const Constraint& c,
                                      const Eigen::MatrixXd& X,
                                      const Modes& modes,
                                      const Context& ctx) const {
  if (ctx.opts.kappa_derivative.empty()) {
    return probe_expr(c.kappa, dim_names_, X, modes, ctx.symbols);
  }
  Expr dk = differentiate(c.kappa, ctx.opts.kappa_derivative, 1);
  return probe_expr(dk, dim_names_, X, modes, ctx.symbols);
}

void CeSystem::expand(int v, int level, const Eigen::MatrixXd& X,
                      const Modes& modes, const Context& ctx,
                      Affine& out) const {
  if (X.rows() > 1 && !has_free_mode(modes)) {
    Affine one;
    expand_block(v, level, X.topRows(1), modes, ctx, one);
    out.A = one.A.replicate(X.rows(), 1);
    out.b = one.b.replicate(X.rows(), 1);
    return;
  }
  expand_block(v, level, X, modes, ctx, out);
}

void CeSystem::expand_block(int v, int level, const Eigen::MatrixXd& X,
                            const Modes& modes, const Context& ctx,
                            Affine& out) const {
  const Var& var = vars_[static_cast<std::size_t>(v)];
  const Eigen::Index npts = X.rows();
  if (level == 0) {
    out.A.setZero(npts, total_);
    out.b.setZero(npts);
    if (!ctx.opts.zero_free && var.def.free) {
      Eigen::MatrixXd A;
      Eigen::VectorXd b;
      var.def.free->probe(X, modes, A, b);
      out.A.middleCols(var.offset, var.size) = A;
      out.b = b;
    }
    return;
  }
  const int k = var.order.order[static_cast<std::size_t>(level - 1)];
  expand(v, level - 1, X, modes, ctx, out);
  const auto& ids = var.by_dim[static_cast<std::size_t>(k)];
  const SwitchingSet& sw = var.switching[static_cast<std::size_t>(k)];
  const DimMode& mk = modes[static_cast<std::size_t>(k)];
  for (std::size_t jj = 0; jj < ids.size(); ++jj) {
    const Constraint& c = var.def.constraints[ids[jj]];
    const int j = static_cast<int>(jj);
    Eigen::VectorXd scale(npts);
    if (mk.kind == DimMode::Kind::Free) {
      for (Eigen::Index p = 0; p < npts; ++p) scale[p] = sw.phi(j, X(p, k), mk.d);
    } else {
      scale.setConstant(sw.phi_mode(j, mk, 0.0));
    }
    for (const auto& f : c.foreign) {
      scale *= constant_mode_factor(modes[static_cast<std::size_t>(f.dim)]);
    }
    if (scale.isZero(0.0)) continue;

    Modes base = modes;
    base[static_cast<std::size_t>(k)] = DimMode::free(0);
    for (const auto& f : c.foreign) {
      base[static_cast<std::size_t>(f.dim)] = DimMode::free(0);
    }
    Affine rho;
    rho.A.setZero(npts, total_);
    rho.b = probe_kappa(c, X, base, ctx);

    auto term_modes = [&](const DimMode& m) {
      Modes pm = base;
      pm[static_cast<std::size_t>(k)] = m;
      for (const auto& f : c.foreign) {
        pm[static_cast<std::size_t>(f.dim)] = DimMode::integral(f.a, f.b);
      }
      return pm;
    };
    Affine t;
    for (const auto& comp : c.components) {
      const int q = variable_index(comp.variable);
      const int levels = num_dims();
      expand(q, levels, X, term_modes(comp.mode), ctx, t);
      add_scaled(rho, t, comp.coef);
    }
    for (const auto& term : c.op) {
      expand(v, level - 1, X, term_modes(term.mode), ctx, t);
      add_scaled(rho, t, -term.coef);
    }
    out.A.noalias() += scale.asDiagonal() * rho.A;
    out.b.array() += scale.array() * rho.b.array();
  }
}

Affine CeSystem::probe(int v, const Eigen::MatrixXd& X, const Modes& modes,
                       const Bindings& symbols,
                       const ProbeOptions& opts) const {
  if (v < 0 || v >= num_variables()) throw Error("variable index out of range");
  if (static_cast<int>(modes.size()) != num_dims() ||
      X.cols() != num_dims()) {
    throw Error("probe needs one mode and one coordinate column per dimension");
  }
  Context ctx{symbols, opts};
  Affine out;
  out.A.resize(X.rows(), total_);
  out.b.resize(X.rows());
  parallel_rows(X.rows(), [&](Eigen::Index begin, Eigen::Index end) {
    Affine part;
    expand(v, num_dims(), X.middleRows(begin, end - begin), modes, ctx, part);
    out.A.middleRows(begin, end - begin) = part.A;
    out.b.segment(begin, end - begin) = part.b;
  });
  return out;
}

Eigen::VectorXd CeSystem::evaluate(int v, const Eigen::MatrixXd& X,
                                   const Modes& modes,
                                   const Eigen::VectorXd& xi,
                                   const Bindings& symbols) const {
  Affine a = probe(v, X, modes, symbols);
  if (xi.size() != total_) throw Error("coefficient vector has wrong size");
  Eigen::VectorXd out = a.b;
  if (total_ > 0) out.noalias() += a.A * xi;
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> CeSystem::constraint_residual(
    int v, int ci, const Eigen::MatrixXd& X, const Eigen::VectorXd& xi,
    const Bindings& symbols) const {
  const Constraint& c =
      vars_.at(static_cast<std::size_t>(v)).def.constraints.at(
          static_cast<std::size_t>(ci));
  Modes base(static_cast<std::size_t>(num_dims()), DimMode::free(0));
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
    lhs += t.coef * evaluate(v, X, term_modes(t.mode), xi, symbols);
  }
  ProbeOptions opts;
  Context ctx{symbols, opts};
  Eigen::VectorXd rhs = probe_kappa(c, X, base, ctx);
  for (const auto& comp : c.components) {
    rhs += comp.coef * evaluate(variable_index(comp.variable), X,
                                term_modes(comp.mode), xi, symbols);
  }
  return {lhs, rhs};
}

// ------------------------------------------------------ CE free function

CeFreeFunction::CeFreeFunction(std::shared_ptr<const CeSystem> system, int v,
                               Bindings symbols)
    : system_(std::move(system)), v_(v), symbols_(std::move(symbols)) {}

void CeFreeFunction::probe(const Eigen::MatrixXd& X, const Modes& modes,
                           Eigen::MatrixXd& A, Eigen::VectorXd& b) const {
  Affine a = system_->probe(v_, X, modes, symbols_);
  A = std::move(a.A);
  b = std::move(a.b);
}

// ------------------------------------------------------------ tensor form

TensorForm::TensorForm(const CeSystem& system, int v) : system_(system), v_(v) {
  for (const auto& c : system.variable(v).constraints) {
    if (!c.components.empty()) {
      throw Error("tensor form does not support component constraints");
    }
  }
}

namespace {

// A product functional: one mode per dimension plus a scalar weight.
// `set[k]` marks dimensions already consumed by an operator.
struct ProductTerm {
  double coef = 1.0;
  Modes modes;
  std::vector<bool> set;
};

// Applies constraint c (acting on dim c.dim plus its foreign integrals) to
// every term. Dimensions already consumed hold functions constant along
// them, so the operator only contributes its constant factor there.
std::vector<ProductTerm> apply_constraint(const std::vector<ProductTerm>& in,
                                          const Constraint& c) {
  std::vector<ProductTerm> out;
  for (const auto& term : in) {
    for (const auto& t : c.op) {
      ProductTerm n = term;
      n.coef *= t.coef;
      const auto k = static_cast<std::size_t>(c.dim);
      if (n.set[k]) {
        n.coef *= constant_mode_factor(t.mode);
      } else {
        n.modes[k] = t.mode;
        n.set[k] = true;
      }
      for (const auto& f : c.foreign) {
        const auto m = static_cast<std::size_t>(f.dim);
        if (n.set[m]) {
          n.coef *= f.b - f.a;
        } else {
          n.modes[m] = DimMode::integral(f.a, f.b);
          n.set[m] = true;
        }
      }
      if (n.coef != 0.0) out.push_back(std::move(n));
    }
  }
  return out;
}

// Dimensions in K carry the outer mode on their switching functions, so M_K
// is left untouched along them.
void apply_outer_modes(ProductTerm& term, const Modes& modes,
                       const std::vector<int>& K) {
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (std::find(K.begin(), K.end(), static_cast<int>(k)) != K.end()) continue;
    if (term.set[k]) {
      term.coef *= constant_mode_factor(modes[k]);
    } else {
      term.modes[k] = modes[k];
    }
  }
}

}  // namespace

Affine TensorForm::entry_affine(const std::vector<int>& K,
                                const std::vector<int>& j,
                                const Eigen::MatrixXd& X, const Modes& modes,
                                const Bindings& symbols) const {
  const auto nd = static_cast<std::size_t>(system_.num_dims());
  const VariableDef& def = system_.variable(v_);
  Affine out;
  out.A.setZero(X.rows(), system_.size());
  out.b.setZero(X.rows());
  auto probe_g = [&](const Modes& m, double coef) {
    if (!def.free) return;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    def.free->probe(X, m, A, b);
    out.A.middleCols(system_.offset(v_), system_.size(v_)) += coef * A;
    out.b += coef * b;
  };
  if (K.empty()) {
    probe_g(modes, 1.0);
    return out;
  }
  auto constraint_of = [&](std::size_t i) -> const Constraint& {
    const auto& ids = system_.constraints_on(v_, K[i]);
    return def.constraints[static_cast<std::size_t>(ids.at(j.at(i)))];
  };
  const double sign = (K.size() % 2 == 1) ? 1.0 : -1.0;
  const Constraint& first = constraint_of(0);

  // g part: operators of K applied in processing order.
  ProductTerm seed{1.0, Modes(nd, DimMode::free(0)), std::vector<bool>(nd)};
  std::vector<ProductTerm> gterms{seed};
  for (std::size_t i = 0; i < K.size(); ++i) {
    gterms = apply_constraint(gterms, constraint_of(i));
  }
  for (auto& t : gterms) {
    apply_outer_modes(t, modes, K);
    if (t.coef != 0.0) probe_g(t.modes, -sign * t.coef);
  }

  // kappa part: the first kappa is constant along its own dimension and
  // its foreign integration dimensions.
  ProductTerm kseed = seed;
  kseed.set[static_cast<std::size_t>(first.dim)] = true;
  for (const auto& f : first.foreign) {
    kseed.set[static_cast<std::size_t>(f.dim)] = true;
  }
  std::vector<ProductTerm> kterms{kseed};
  for (std::size_t i = 1; i < K.size(); ++i) {
    kterms = apply_constraint(kterms, constraint_of(i));
  }
  for (auto& t : kterms) {
    apply_outer_modes(t, modes, K);
    if (t.coef == 0.0) continue;
    Modes m = t.modes;
    m[static_cast<std::size_t>(first.dim)] = DimMode::free(0);
    for (const auto& f : first.foreign) {
      m[static_cast<std::size_t>(f.dim)] = DimMode::free(0);
    }
    out.b += sign * t.coef *
             probe_expr(first.kappa, system_.dim_names(), X, m, symbols);
  }
  return out;
}

Eigen::VectorXd TensorForm::entry(const std::vector<int>& K,
                                  const std::vector<int>& j,
                                  const Eigen::MatrixXd& X, const Modes& modes,
                                  const Eigen::VectorXd& xi,
                                  const Bindings& symbols) const {
  Affine a = entry_affine(K, j, X, modes, symbols);
  Eigen::VectorXd out = a.b;
  if (a.A.cols() > 0) out += a.A * xi;
  return out;
}

Affine TensorForm::probe(const Eigen::MatrixXd& X, const Modes& modes,
                         const Bindings& symbols) const {
  const ProcessingOrder& order = system_.order(v_);
  std::vector<int> active;
  for (int k : order.order) {
    if (!system_.constraints_on(v_, k).empty()) active.push_back(k);
  }
  Affine out = entry_affine({}, {}, X, modes, symbols);
  const std::size_t na = active.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << na); ++mask) {
    std::vector<int> K;
    for (std::size_t i = 0; i < na; ++i) {
      if (mask & (std::size_t{1} << i)) K.push_back(active[i]);
    }
    std::vector<int> j(K.size(), 0);
    for (;;) {
      Eigen::VectorXd phi = Eigen::VectorXd::Ones(X.rows());
      for (std::size_t i = 0; i < K.size(); ++i) {
        const SwitchingSet& sw = system_.switching(v_, K[i]);
        const DimMode& m = modes[static_cast<std::size_t>(K[i])];
        if (m.kind == DimMode::Kind::Free) {
          for (Eigen::Index p = 0; p < X.rows(); ++p) {
            phi[p] *= sw.phi(j[i], X(p, K[i]), m.d);
          }
        } else {
          phi *= sw.phi_mode(j[i], m, 0.0);
        }
      }
      if (!phi.isZero(0.0)) {
        Affine e = entry_affine(K, j, X, modes, symbols);
        out.A.noalias() += phi.asDiagonal() * e.A;
        out.b.array() += phi.array() * e.b.array();
      }
      std::size_t i = 0;
      for (; i < K.size(); ++i) {
        const int count =
            static_cast<int>(system_.constraints_on(v_, K[i]).size());
        if (++j[i] < count) break;
        j[i] = 0;
      }
      if (i == K.size()) break;
    }
  }
  return out;
}

// -------------------------------------------------------- component graphs

bool is_nilpotent(const Eigen::MatrixXi& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (n == 0) return true;
  Eigen::MatrixXi a = (adjacency.array() != 0).cast<int>();
  Eigen::MatrixXi p = a;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.isZero()) return true;
    p = ((p * a).array() != 0).cast<int>();
  }
  return p.isZero();
}

std::vector<ComponentGraph> enumerate_component_graphs(
    const std::vector<std::vector<int>>& constraint_vars, int nvars) {
  std::vector<ComponentGraph> out;
  const std::size_t nc = constraint_vars.size();
  for (const auto& vars : constraint_vars) {
    if (vars.size() < 2) {
      throw Error("a component constraint needs at least two variables");
    }
    for (int v : vars) {
      if (v < 0 || v >= nvars) throw Error("component variable out of range");
    }
  }
  // Every distinct pair of coupled variables is an edge to orient.
  std::vector<std::pair<int, int>> pairs;
  for (const auto& vars : constraint_vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      for (std::size_t k = i + 1; k < vars.size(); ++k) {
        std::pair<int, int> e{std::min(vars[i], vars[k]),
                              std::max(vars[i], vars[k])};
        if (e.first == e.second) continue;
        if (std::find(pairs.begin(), pairs.end(), e) == pairs.end()) {
          pairs.push_back(e);
        }
      }
    }
  }
  if (pairs.size() >= 63) throw Error("too many coupled variable pairs");
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    ComponentGraph g;
    g.adjacency.setZero(nvars, nvars);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      const auto [a0, b0] = pairs[e];
      if (mask & (std::uint64_t{1} << e)) {
        g.adjacency(b0, a0) = 1;
      } else {
        g.adjacency(a0, b0) = 1;
      }
    }
    if (!is_nilpotent(g.adjacency)) continue;
    // Each constraint goes to the member that points at all the others.
    bool ok = true;
    for (std::size_t c = 0; c < nc && ok; ++c) {
      int src = -1;
      for (int p : constraint_vars[c]) {
        bool all = true;
        for (int q : constraint_vars[c]) {
          if (q != p && !g.adjacency(p, q)) all = false;
        }
        if (all) {
          src = p;
          break;
        }
      }
      if (src < 0) ok = false;
      g.assignment.push_back(src);
    }
    if (!ok) continue;
    // Leaves first: repeatedly take the lowest variable whose dependencies
    // are all placed.
    std::vector<bool> placed(static_cast<std::size_t>(nvars), false);
    for (int round = 0; round < nvars; ++round) {
      for (int v = 0; v < nvars; ++v) {
        if (placed[static_cast<std::size_t>(v)]) continue;
        bool ready = true;
        for (int q = 0; q < nvars; ++q) {
          if (g.adjacency(v, q) && !placed[static_cast<std::size_t>(q)]) {
            ready = false;
          }
        }
        if (ready) {
          placed[static_cast<std::size_t>(v)] = true;
          g.construction_order.push_back(v);
          break;
        }
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

IntersectionVerdict check_intersection_validity(
    const ComponentGraph& graph,
    const std::vector<ComponentConstraintInfo>& components,
    const std::vector<BoundaryCondition>& conditions,
    const std::vector<std::string>& variable_names) {
  auto name = [&](int v) {
    return v < static_cast<int>(variable_names.size())
               ? variable_names[static_cast<std::size_t>(v)]
               : "variable " + std::to_string(v);
  };
  IntersectionVerdict verdict;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& info = components[c];
    const int p = graph.assignment.at(c);
    for (const auto& bc : conditions) {
      if (bc.variable != p || bc.dim == info.dim) continue;
      for (int q : info.variables) {
        if (q == p) continue;
        const bool shared = std::any_of(
            conditions.begin(), conditions.end(),
            [&](const BoundaryCondition& o) {
              return o.variable == q && o.dim == bc.dim &&
                     o.location == bc.location && o.order == bc.order;
            });
        if (!shared) {
          verdict.accepted = false;
          verdict.diagnostics.push_back(
              "component constraint " + std::to_string(c) + " placed on " +
              name(p) + " intersects its condition along dimension " +
              std::to_string(bc.dim) + " at " + std::to_string(bc.location) +
              ", which " + name(q) + " does not share");
        }
      }
    }
  }
  return verdict;
}

}  // namespace tfc
