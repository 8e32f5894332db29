// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "tfc/errors.hpp"

namespace tfc {

namespace {

constexpr std::array<std::pair<LsqMethod, const char*>, 6> kMethods{{
    {LsqMethod::NormalEquations, "normal-equations"},
    {LsqMethod::Qr, "qr"},
    {LsqMethod::ScaledQr, "scaled-qr"},
    {LsqMethod::SvdPinv, "svd-pinv"},
    {LsqMethod::Cholesky, "cholesky"},
    {LsqMethod::IllConditioned, "ill-conditioned-lstsq"},
}};

void require_tall(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() < A.cols()) {
    throw RankDeficient(std::string(what) + " needs at least as many rows (" +
                        std::to_string(A.rows()) + ") as columns (" +
                        std::to_string(A.cols()) + ")");
  }
}

Eigen::VectorXd solve_qr(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const char* what) {
  require_tall(A, what);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols()) {
    throw RankDeficient(std::string(what) + ": numerical rank " +
                        std::to_string(qr.rank()) + " < " +
                        std::to_string(A.cols()) + " columns");
  }
  return qr.solve(b);
}

Eigen::VectorXd inverse_column_norms(const Eigen::MatrixXd& A) {
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    scale[j] = scale[j] > 0.0 ? 1.0 / scale[j] : 1.0;
  }
  return scale;
}

}  // namespace

const char* lsq_method_name(LsqMethod m) noexcept {
  for (const auto& [k, n] : kMethods) {
    if (k == m) return n;
  }
  return "?";
}

LsqMethod lsq_method_from_name(const std::string& name) {
  for (const auto& [k, n] : kMethods) {
    if (name == n) return k;
  }
  throw Error("unknown least-squares method '" + name + "'");
}

const char* termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::ResidualNorm:
      return "residual-inf-norm";
    case Termination::StepNorm:
      return "step-inf-norm";
    case Termination::MaxIterations:
      return "max-iterations";
  }
  return "?";
}

Eigen::VectorXd lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      LsqMethod method) {
  if (A.rows() != b.size()) {
    throw Error("lstsq: matrix has " + std::to_string(A.rows()) +
                " rows but right-hand side has " + std::to_string(b.size()));
  }
  if (A.cols() == 0) return Eigen::VectorXd(0);
  switch (method) {
    case LsqMethod::NormalEquations: {
      const Eigen::MatrixXd AtA = A.transpose() * A;
      return AtA.completeOrthogonalDecomposition().solve(A.transpose() * b);
    }
    case LsqMethod::Qr:
      return solve_qr(A, b, "qr");
    case LsqMethod::ScaledQr: {
      const Eigen::VectorXd scale = inverse_column_norms(A);
      const Eigen::MatrixXd As = A * scale.asDiagonal();
      return scale.asDiagonal() * solve_qr(As, b, "scaled-qr");
    }
    case LsqMethod::SvdPinv: {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
      return svd.solve(b);
    }
    case LsqMethod::Cholesky: {
      require_tall(A, "cholesky");
      Eigen::LLT<Eigen::MatrixXd> llt(A.transpose() * A);
      if (llt.info() != Eigen::Success) {
        throw RankDeficient("cholesky: normal matrix is not positive definite");
      }
      return llt.solve(A.transpose() * b);
    }
    case LsqMethod::IllConditioned: {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
      const auto& s = svd.singularValues();
      const double cutoff =
          (s.size() > 0 ? s[0] : 0.0) * 1e-14 *
          static_cast<double>(std::max(A.rows(), A.cols()));
      Eigen::VectorXd utb = svd.matrixU().transpose() * b;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        utb[i] = s[i] > cutoff ? utb[i] / s[i] : 0.0;
      }
      return svd.matrixV() * utb;
    }
  }
  throw Error("lstsq: unknown method");
}

Eigen::VectorXd scaled_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             LsqMethod method) {
  const Eigen::VectorXd scale = inverse_column_norms(A);
  return scale.asDiagonal() *
         lstsq(A * scale.asDiagonal(), b, method);
}

NllsResult nlls(const ResidualFn& residual, const JacobianFn& jacobian,
                Eigen::VectorXd xi0, const NllsConfig& config) {
  if (!(config.tol > 0.0)) throw Error("nlls: tol must be positive");
  if (config.max_iter < 1) throw Error("nlls: max_iter must be at least 1");

  if (config.check_jacobian) {
    const Eigen::MatrixXd J = jacobian(xi0);
    Eigen::MatrixXd fd(J.rows(), J.cols());
    for (Eigen::Index k = 0; k < xi0.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::fabs(xi0[k]));
      Eigen::VectorXd p = xi0, m = xi0;
      p[k] += h;
      m[k] -= h;
      fd.col(k) = (residual(p) - residual(m)) / (2.0 * h);
    }
    const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
    if ((J - fd).cwiseAbs().maxCoeff() > 1e-4 * scale) {
      throw Error("nlls: Jacobian disagrees with finite differences");
    }
  }

  NllsResult out;
  out.xi = std::move(xi0);
  double step = std::numeric_limits<double>::infinity();
  for (;;) {
    const Eigen::VectorXd L = residual(out.xi);
    const double rnorm = L.size() ? L.cwiseAbs().maxCoeff() : 0.0;
    out.residual_history.push_back(rnorm);
    if (!std::isfinite(rnorm)) {
      throw Error("nlls iteration " + std::to_string(out.iterations) +
                  ": residual is not finite");
    }
    if (rnorm < config.tol) {
      out.reason = Termination::ResidualNorm;
      break;
    }
    if (step < config.tol) {
      out.reason = Termination::StepNorm;
      break;
    }
    if (out.iterations >= config.max_iter) {
      out.reason = Termination::MaxIterations;
      break;
    }
    Eigen::VectorXd dxi;
    try {
      dxi = config.scale_columns
                ? scaled_lstsq(jacobian(out.xi), -L, config.method)
                : lstsq(jacobian(out.xi), -L, config.method);
    } catch (const RankDeficient& e) {
      throw RankDeficient("nlls iteration " + std::to_string(out.iterations) +
                          ": " + e.what());
    }
    out.xi += dxi;
    if (config.clamp) config.clamp(out.xi);
    step = dxi.size() ? dxi.cwiseAbs().maxCoeff() : 0.0;
    ++out.iterations;
  }
  return out;
}

}  // namespace tfc
