// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/freefn.hpp"

#include <cmath>
#include <functional>

#include "tfc/errors.hpp"

namespace tfc {

namespace {

constexpr int kQuadratureNodes = 64;

void check_modes(const Modes& modes, int dims) {
  if (static_cast<int>(modes.size()) != dims) {
    throw Error("mode count " + std::to_string(modes.size()) +
                " does not match dimension count " + std::to_string(dims));
  }
}

}  // namespace

double constant_mode_factor(const DimMode& mode) noexcept {
  switch (mode.kind) {
    case DimMode::Kind::Free:
    case DimMode::Kind::Point:
      return mode.d == 0 ? 1.0 : 0.0;
    case DimMode::Kind::Integral:
      return mode.b - mode.a;
  }
  return 0.0;
}

// ------------------------------------------------------------ tensor basis

TensorBasis::TensorBasis(std::vector<UnivariateBasis> bases, int total_degree)
    : bases_(std::move(bases)) {
  if (bases_.empty()) throw Error("tensor basis needs at least one dimension");
  std::vector<int> idx(bases_.size(), 0);
  const std::size_t n = bases_.size();
  // Odometer over the per-dimension degree caps, last dimension fastest.
  for (;;) {
    int sum = 0;
    bool all_removed = true;
    for (std::size_t k = 0; k < n; ++k) {
      sum += idx[k];
      if (!bases_[k].removal().contains(idx[k])) all_removed = false;
    }
    if ((total_degree < 0 || sum <= total_degree) && !all_removed) {
      indices_.push_back(idx);
    }
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (idx[k] < bases_[k].degree()) {
        ++idx[k];
        break;
      }
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

void TensorBasis::probe(const Eigen::MatrixXd& X, const Modes& modes,
                        Eigen::MatrixXd& A, Eigen::VectorXd& b) const {
  check_modes(modes, dims());
  const Eigen::Index npts = X.rows();
  std::vector<Eigen::MatrixXd> rows(bases_.size());
  for (std::size_t k = 0; k < bases_.size(); ++k) {
    const auto& basis = bases_[k];
    const DimMode& m = modes[k];
    switch (m.kind) {
      case DimMode::Kind::Free:
        rows[k] = basis.eval(X.col(static_cast<Eigen::Index>(k)), m.d, true);
        break;
      case DimMode::Kind::Point: {
        Eigen::VectorXd at = Eigen::VectorXd::Constant(1, m.a);
        rows[k] = basis.eval(at, m.d, true);
        break;
      }
      case DimMode::Kind::Integral:
        rows[k] = basis.integrals(m.a, m.b).transpose();
        break;
    }
  }
  A.resize(npts, size());
  for (std::size_t t = 0; t < indices_.size(); ++t) {
    const auto& idx = indices_[t];
    auto col = A.col(static_cast<Eigen::Index>(t));
    col.setOnes();
    for (std::size_t k = 0; k < bases_.size(); ++k) {
      const Eigen::MatrixXd& r = rows[k];
      if (r.rows() == 1) {
        col *= r(0, idx[k]);
      } else {
        col.array() *= r.col(idx[k]).array();
      }
    }
  }
  b.setZero(npts);
}

// --------------------------------------------------------------- ELM basis

ElmBasis::ElmBasis(ElmLayer layer, std::vector<DomainMap> maps)
    : layer_(std::move(layer)), maps_(std::move(maps)) {
  if (layer_.weights.cols() != static_cast<Eigen::Index>(maps_.size())) {
    throw Error("random-feature input dimension does not match the maps");
  }
}

void ElmBasis::probe(const Eigen::MatrixXd& X, const Modes& modes,
                     Eigen::MatrixXd& A, Eigen::VectorXd& b) const {
  check_modes(modes, dims());
  const Eigen::Index npts = X.rows();
  const Eigen::Index nn = layer_.biases.size();
  const int nd = dims();

  int order = 0;
  std::vector<int> integral_dims;
  for (int k = 0; k < nd; ++k) {
    order += modes[static_cast<std::size_t>(k)].d;
    if (modes[static_cast<std::size_t>(k)].kind == DimMode::Kind::Integral) {
      integral_dims.push_back(k);
    }
  }
  // Chain-rule factor per neuron.
  Eigen::VectorXd factor = Eigen::VectorXd::Ones(nn);
  for (int k = 0; k < nd; ++k) {
    const int d = modes[static_cast<std::size_t>(k)].d;
    if (d == 0) continue;
    for (Eigen::Index j = 0; j < nn; ++j) {
      factor[j] *= std::pow(layer_.weights(j, k) * maps_[k].c(), d);
    }
  }
  // Pre-activation contribution from non-integral dims at each point.
  Eigen::MatrixXd base = layer_.biases.transpose().replicate(npts, 1);
  for (int k = 0; k < nd; ++k) {
    const DimMode& m = modes[static_cast<std::size_t>(k)];
    if (m.kind == DimMode::Kind::Integral) continue;
    for (Eigen::Index p = 0; p < npts; ++p) {
      const double x = m.kind == DimMode::Kind::Free ? X(p, k) : m.a;
      const double z = maps_[k].to_basis(x);
      base.row(p) += z * layer_.weights.col(k).transpose();
    }
  }
  A.setZero(npts, nn);
  const Quadrature& q = gauss_legendre(kQuadratureNodes);
  const std::size_t ni = integral_dims.size();
  std::vector<int> counter(ni, 0);
  for (;;) {
    double weight = 1.0;
    Eigen::RowVectorXd shift = Eigen::RowVectorXd::Zero(nn);
    for (std::size_t i = 0; i < ni; ++i) {
      const int k = integral_dims[i];
      const DimMode& m = modes[static_cast<std::size_t>(k)];
      const double half = 0.5 * (m.b - m.a);
      const double x = 0.5 * (m.a + m.b) + half * q.nodes[counter[i]];
      weight *= half * q.weights[counter[i]];
      shift += maps_[k].to_basis(x) * layer_.weights.col(k).transpose();
    }
    for (Eigen::Index p = 0; p < npts; ++p) {
      for (Eigen::Index j = 0; j < nn; ++j) {
        A(p, j) +=
            weight * activation(layer_.act, base(p, j) + shift[j], order);
      }
    }
    std::size_t i = 0;
    for (; i < ni; ++i) {
      if (++counter[i] < kQuadratureNodes) break;
      counter[i] = 0;
    }
    if (i == ni) break;
  }
  A *= factor.asDiagonal();
  b.setZero(npts);
}

// ------------------------------------------------------- analytic function

ExprFreeFunction::ExprFreeFunction(Expr e, std::vector<std::string> dim_names,
                                   Bindings fixed)
    : expr_(std::move(e)), names_(std::move(dim_names)),
      fixed_(std::move(fixed)) {}

void ExprFreeFunction::probe(const Eigen::MatrixXd& X, const Modes& modes,
                             Eigen::MatrixXd& A, Eigen::VectorXd& b) const {
  check_modes(modes, dims());
  A.resize(X.rows(), 0);
  b = probe_expr(expr_, names_, X, modes, fixed_);
}

Eigen::VectorXd probe_expr(const Expr& e,
                           const std::vector<std::string>& dim_names,
                           const Eigen::MatrixXd& X, const Modes& modes,
                           const Bindings& fixed) {
  check_modes(modes, static_cast<int>(dim_names.size()));
  const Eigen::Index npts = X.rows();
  Expr f = e;
  std::vector<std::size_t> integral_dims;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k].kind == DimMode::Kind::Integral) {
      integral_dims.push_back(k);
    } else if (modes[k].d > 0) {
      f = differentiate(f, dim_names[k], modes[k].d);
    }
  }
  if (f.is_number(0.0)) return Eigen::VectorXd::Zero(npts);
  CompiledExpr program(f, dim_names, fixed);
  std::vector<double> slots(dim_names.size(), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k].kind == DimMode::Kind::Point) slots[k] = modes[k].a;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(npts);
  const Quadrature& q = gauss_legendre(kQuadratureNodes);
  const std::size_t ni = integral_dims.size();
  for (Eigen::Index p = 0; p < npts; ++p) {
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (modes[k].kind == DimMode::Kind::Free) {
        slots[k] = X(p, static_cast<Eigen::Index>(k));
      }
    }
    if (ni == 0) {
      out[p] = program(slots.data());
      continue;
    }
    std::vector<int> counter(ni, 0);
    double acc = 0.0;
    for (;;) {
      double weight = 1.0;
      for (std::size_t i = 0; i < ni; ++i) {
        const DimMode& m = modes[integral_dims[i]];
        const double half = 0.5 * (m.b - m.a);
        slots[integral_dims[i]] = 0.5 * (m.a + m.b) + half * q.nodes[counter[i]];
        weight *= half * q.weights[counter[i]];
      }
      acc += weight * program(slots.data());
      std::size_t i = 0;
      for (; i < ni; ++i) {
        if (++counter[i] < kQuadratureNodes) break;
        counter[i] = 0;
      }
      if (i == ni) break;
    }
    out[p] = acc;
  }
  return out;
}

}  // namespace tfc
