// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfc/basis.hpp"
#include "tfc/constraint.hpp"
#include "tfc/expr.hpp"

namespace tfc {

/// A multivariate free function that is affine in its coefficients xi.
///
/// probe() applies one DimMode per dimension and returns A and b such that
/// the probed value at row p of X equals A.row(p) . xi + b[p]. Columns of X
/// are problem coordinates in dimension order; Free dims read them.
class FreeFunction {
 public:
  virtual ~FreeFunction() = default;
  virtual int size() const = 0;
  virtual int dims() const = 0;
  virtual void probe(const Eigen::MatrixXd& X, const Modes& modes,
                     Eigen::MatrixXd& A, Eigen::VectorXd& b) const = 0;
};

/// Tensor product of univariate families with an optional total-degree cap.
/// A multi-index is dropped when every component lies in its dimension's
/// removal set or when the index sum exceeds the cap.
class TensorBasis : public FreeFunction {
 public:
  explicit TensorBasis(std::vector<UnivariateBasis> bases,
                       int total_degree = -1);

  int size() const override { return static_cast<int>(indices_.size()); }
  int dims() const override { return static_cast<int>(bases_.size()); }
  void probe(const Eigen::MatrixXd& X, const Modes& modes, Eigen::MatrixXd& A,
             Eigen::VectorXd& b) const override;

  const std::vector<UnivariateBasis>& bases() const noexcept { return bases_; }
  /// Retained multi-indices in column order.
  const std::vector<std::vector<int>>& indices() const noexcept {
    return indices_;
  }

 private:
  std::vector<UnivariateBasis> bases_;
  std::vector<std::vector<int>> indices_;
};

/// Random-feature layer sigma(W z + b) on inputs mapped to [0, 1].
class ElmBasis : public FreeFunction {
 public:
  /// `maps` send each problem interval to [0, 1].
  ElmBasis(ElmLayer layer, std::vector<DomainMap> maps);

  int size() const override { return static_cast<int>(layer_.biases.size()); }
  int dims() const override { return static_cast<int>(maps_.size()); }
  void probe(const Eigen::MatrixXd& X, const Modes& modes, Eigen::MatrixXd& A,
             Eigen::VectorXd& b) const override;

  const ElmLayer& layer() const noexcept { return layer_; }

 private:
  ElmLayer layer_;
  std::vector<DomainMap> maps_;
};

/// A fixed analytic free function with no coefficients.
class ExprFreeFunction : public FreeFunction {
 public:
  ExprFreeFunction(Expr e, std::vector<std::string> dim_names,
                   Bindings fixed = {});

  int size() const override { return 0; }
  int dims() const override { return static_cast<int>(names_.size()); }
  void probe(const Eigen::MatrixXd& X, const Modes& modes, Eigen::MatrixXd& A,
             Eigen::VectorXd& b) const override;

 private:
  Expr expr_;
  std::vector<std::string> names_;
  Bindings fixed_;
};

/// Probes an Expr over named dimensions. Derivatives are symbolic and
/// integral dimensions use nested 64-node Gauss-Legendre quadrature.
Eigen::VectorXd probe_expr(const Expr& e,
                           const std::vector<std::string>& dim_names,
                           const Eigen::MatrixXd& X, const Modes& modes,
                           const Bindings& fixed);

/// Multiplier for probing a function that is constant along one dimension:
/// 1 for value modes, 0 for derivatives, the interval length for integrals.
double constant_mode_factor(const DimMode& mode) noexcept;

}  // namespace tfc
