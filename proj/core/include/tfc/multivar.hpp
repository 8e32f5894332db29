// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tfc/constraint.hpp"
#include "tfc/expr.hpp"
#include "tfc/freefn.hpp"

namespace tfc {

/// An independent variable and its problem interval.
struct Dimension {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// Integration over another dimension that applies to a whole constraint,
/// e.g. the y-integral in  int_{-1}^{1} u(2, y) dy = 5  (an x-constraint).
struct ForeignIntegral {
  int dim = 0;
  double a = 0.0;
  double b = 0.0;
};

/// A term of kappa that reads another dependent variable's CE, e.g. the
/// v(x, 0) in  u(x, 0) = 5 - v(x, 0).
struct ComponentTerm {
  std::string variable;
  double coef = 1.0;
  DimMode mode;
};

/// C[u] = kappa along dimension `dim`.
struct Constraint {
  int dim = 0;
  ConstraintOperator op;
  std::vector<ForeignIntegral> foreign;
  /// Must not depend on `dim` or on any foreign dimension.
  Expr kappa;
  std::vector<ComponentTerm> components;
};

/// A dependent variable: its constraints, free function and supports.
struct VariableDef {
  std::string name;
  std::vector<Constraint> constraints;
  /// Per-dimension support exponents; defaults to monomials 0..n-1.
  std::map<int, std::vector<int>> supports;
  std::shared_ptr<const FreeFunction> free;
};

/// Order in which dimensions are embedded.
struct ProcessingOrder {
  std::vector<int> order;
  /// (l, k): an integral constraint on l integrates over k.
  std::vector<std::pair<int, int>> forced;
};

/// Embeds dimensions with integral constraints before the dimensions they
/// integrate over, lowest index first among the unconstrained choices.
/// Throws CyclicIntegralDependency.
ProcessingOrder order_dimensions(int ndims,
                                 const std::vector<Constraint>& constraints);

/// Affine value A xi + b over the global coefficient vector.
struct Affine {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Options for CeSystem::probe.
struct ProbeOptions {
  /// Drops every free function (g = 0).
  bool zero_free = false;
  /// Replaces every kappa by its partial derivative with respect to this
  /// symbol when non-empty.
  std::string kappa_derivative;
};

/// Constrained expressions for a set of dependent variables sharing the
/// same independent dimensions. Coefficients of all variables form one
/// global vector, ordered by variable.
class CeSystem {
 public:
  /// `symbols` binds every non-dimension name appearing in kappa
  /// expressions (parameters and extra unknowns); values may be rebound per
  /// probe. Throws ConfigError, SingularSupport or CyclicIntegralDependency.
  CeSystem(std::vector<Dimension> dims, std::vector<VariableDef> vars,
           std::vector<std::string> symbols = {},
           std::vector<int> order_override = {});

  int num_dims() const noexcept { return static_cast<int>(dims_.size()); }
  int num_variables() const noexcept { return static_cast<int>(vars_.size()); }
  const std::vector<Dimension>& dims() const noexcept { return dims_; }
  const std::vector<std::string>& dim_names() const noexcept {
    return dim_names_;
  }
  int dim_index(const std::string& name) const;
  int variable_index(const std::string& name) const;
  const VariableDef& variable(int v) const { return vars_.at(v).def; }

  int size() const noexcept { return total_; }
  int offset(int v) const { return vars_.at(v).offset; }
  int size(int v) const { return vars_.at(v).size; }

  const ProcessingOrder& order(int v) const { return vars_.at(v).order; }
  /// Switching functions of variable v along dimension dim.
  const SwitchingSet& switching(int v, int dim) const;
  /// Constraint indices of variable v along dimension dim.
  const std::vector<int>& constraints_on(int v, int dim) const;
  /// Variables in construction order (component dependencies first).
  const std::vector<int>& construction_order() const noexcept {
    return construction_;
  }

  /// Probes variable v with one mode per dimension at the rows of X.
  Affine probe(int v, const Eigen::MatrixXd& X, const Modes& modes,
               const Bindings& symbols = {},
               const ProbeOptions& opts = {}) const;

  /// Probed values for a given coefficient vector.
  Eigen::VectorXd evaluate(int v, const Eigen::MatrixXd& X, const Modes& modes,
                           const Eigen::VectorXd& xi,
                           const Bindings& symbols = {}) const;

  /// Value of C[u_v] for constraint c of variable v at the rows of X (only
  /// the dimensions not consumed by the constraint are read), together
  /// with the probed kappa. Used to verify constraint satisfaction.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> constraint_residual(
      int v, int c, const Eigen::MatrixXd& X, const Eigen::VectorXd& xi,
      const Bindings& symbols = {}) const;

 private:
  struct Var {
    VariableDef def;
    ProcessingOrder order;
    std::vector<SwitchingSet> switching;
    std::vector<std::vector<int>> by_dim;
    std::vector<int> component_deps;
    int offset = 0;
    int size = 0;
  };
  struct Context;

  void expand(int v, int level, const Eigen::MatrixXd& X, const Modes& modes,
              const Context& ctx, Affine& out) const;
  void expand_block(int v, int level, const Eigen::MatrixXd& X,
                    const Modes& modes, const Context& ctx, Affine& out) const;
  Eigen::VectorXd probe_kappa(const Constraint& c, const Eigen::MatrixXd& X,
                              const Modes& modes, const Context& ctx) const;

  std::vector<Dimension> dims_;
  std::vector<std::string> dim_names_;
  std::vector<std::string> symbols_;
  std::vector<Var> vars_;
  std::vector<int> construction_;
  int total_ = 0;
};

/// Wraps the output of a CeSystem variable for a fixed xi as a free
/// function, so a CE can be applied to its own output.
class CeFreeFunction : public FreeFunction {
 public:
  CeFreeFunction(std::shared_ptr<const CeSystem> system, int v,
                 Bindings symbols = {});
  int size() const override { return system_->size(); }
  int dims() const override { return system_->num_dims(); }
  void probe(const Eigen::MatrixXd& X, const Modes& modes, Eigen::MatrixXd& A,
             Eigen::VectorXd& b) const override;

 private:
  std::shared_ptr<const CeSystem> system_;
  int v_;
  Bindings symbols_;
};

/// Compact form u = g + sum_K M_K prod_{k in K} phi^k, built from nested
/// constraint operators. Independent of the recursive evaluator and limited
/// to variables without component terms.
class TensorForm {
 public:
  TensorForm(const CeSystem& system, int v);

  /// Probes u with one mode per dimension, mirroring CeSystem::probe.
  Affine probe(const Eigen::MatrixXd& X, const Modes& modes,
               const Bindings& symbols = {}) const;

  /// Entry M_K at index tuple j (one index per dim in K, in processing
  /// order) for the given free-function coefficients, probed with `modes`
  /// on the dimensions outside K. K = {} returns g itself.
  Eigen::VectorXd entry(const std::vector<int>& K, const std::vector<int>& j,
                        const Eigen::MatrixXd& X, const Modes& modes,
                        const Eigen::VectorXd& xi,
                        const Bindings& symbols = {}) const;

 private:
  Affine entry_affine(const std::vector<int>& K, const std::vector<int>& j,
                      const Eigen::MatrixXd& X, const Modes& modes,
                      const Bindings& symbols) const;

  const CeSystem& system_;
  int v_;
};

/// An assignment of component constraints to variables.
struct ComponentGraph {
  /// Variable chosen for each component constraint.
  std::vector<int> assignment;
  /// adjacency(p, q) = 1 when p is built after q.
  Eigen::MatrixXi adjacency;
  /// Variables ordered leaves first.
  std::vector<int> construction_order;
};

/// True when some power of the adjacency matrix vanishes.
bool is_nilpotent(const Eigen::MatrixXi& adjacency);

/// All acyclic orientations of the coupled variable pairs, each with the
/// assignment it induces: a constraint goes to the member with edges to all
/// other members. `constraint_vars[c]` lists the variables that component
/// constraint c couples.
std::vector<ComponentGraph> enumerate_component_graphs(
    const std::vector<std::vector<int>>& constraint_vars, int nvars);

/// A point-type boundary condition used by the intersection check.
struct BoundaryCondition {
  int variable = 0;
  int dim = 0;
  double location = 0.0;
  int order = 0;
};

/// A component constraint along `dim` coupling `variables`.
struct ComponentConstraintInfo {
  int dim = 0;
  std::vector<int> variables;
};

struct IntersectionVerdict {
  bool accepted = true;
  std::vector<std::string> diagnostics;
};

/// Rejects a graph when a component constraint placed on p meets one of
/// p's constraints along another dimension that some other coupled
/// variable does not share at the same location and order.
IntersectionVerdict check_intersection_validity(
    const ComponentGraph& graph,
    const std::vector<ComponentConstraintInfo>& components,
    const std::vector<BoundaryCondition>& conditions,
    const std::vector<std::string>& variable_names = {});

}  // namespace tfc
