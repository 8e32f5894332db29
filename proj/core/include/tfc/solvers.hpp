// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tfc {

/// Linear least-squares method.
enum class LsqMethod {
  NormalEquations,
  Qr,
  ScaledQr,
  SvdPinv,
  Cholesky,
  IllConditioned,
};

/// Canonical name, e.g. "scaled-qr".
const char* lsq_method_name(LsqMethod m) noexcept;
/// Inverse of lsq_method_name. Throws Error for unknown names.
LsqMethod lsq_method_from_name(const std::string& name);

/// Minimizes |A xi - b|_2. Qr, ScaledQr and Cholesky throw RankDeficient
/// when A does not have full column rank; the SVD paths return the
/// minimum-norm solution instead.
Eigen::VectorXd lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      LsqMethod method = LsqMethod::ScaledQr);

/// Why the nonlinear iteration stopped.
enum class Termination { ResidualNorm, StepNorm, MaxIterations };

const char* termination_name(Termination t) noexcept;

struct NllsConfig {
  double tol = 1e-13;
  int max_iter = 50;
  LsqMethod method = LsqMethod::ScaledQr;
  /// Applied to xi after every update.
  std::function<void(Eigen::VectorXd&)> clamp;
  /// Compares the Jacobian at xi0 against central differences (relative
  /// tolerance 1e-4) and throws Error on mismatch.
  bool check_jacobian = false;
  /// Scales the Jacobian columns to unit 2-norm before every step, so the
  /// SVD methods return the minimum-norm step in the scaled unknowns.
  bool scale_columns = false;
};

/// lstsq on A with columns scaled to unit 2-norm; the solution is
/// returned in the original unknowns.
Eigen::VectorXd scaled_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             LsqMethod method);

struct NllsResult {
  Eigen::VectorXd xi;
  int iterations = 0;
  Termination reason = Termination::MaxIterations;
  /// Infinity norm of the residual at each evaluated iterate.
  std::vector<double> residual_history;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Gauss-Newton iteration xi += dxi with J dxi = -L, stopping when
/// |L|_inf < tol, |dxi|_inf < tol or max_iter updates were made, checked
/// in that order.
NllsResult nlls(const ResidualFn& residual, const JacobianFn& jacobian,
                Eigen::VectorXd xi0, const NllsConfig& config = {});

}  // namespace tfc
