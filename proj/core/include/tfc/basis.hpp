// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tfc {

/// Univariate basis families with exact derivative recursions.
enum class Family {
  Chebyshev,
  Legendre,
  Laguerre,
  HermiteProb,
  HermitePhys,
  Fourier,
};

/// Activation functions of a random-feature layer.
enum class Activation { Sin, Swish, Tanh, Sigmoid, Relu };

const char* family_name(Family f) noexcept;
Family family_from_name(const std::string& name);
const char* activation_name(Activation a) noexcept;
Activation activation_from_name(const std::string& name);

/// Native domain of a family. Laguerre and Hermite report infinite bounds.
std::pair<double, double> native_domain(Family f) noexcept;

/// Linear map from a problem interval onto a basis interval.
class DomainMap {
 public:
  DomainMap() = default;
  /// Throws Error unless x0 < xf and z0 < zf, all finite.
  DomainMap(double x0, double xf, double z0, double zf);

  double x0() const noexcept { return x0_; }
  double xf() const noexcept { return xf_; }
  double z0() const noexcept { return z0_; }
  double zf() const noexcept { return zf_; }
  /// Slope dz/dx.
  double c() const noexcept { return c_; }
  double to_basis(double x) const noexcept { return z0_ + c_ * (x - x0_); }
  double to_problem(double z) const noexcept { return x0_ + (z - z0_) / c_; }
  bool contains(double x) const noexcept;

 private:
  double x0_ = -1.0, xf_ = 1.0, z0_ = -1.0, zf_ = 1.0, c_ = 1.0;
};

/// Values of the d-th native derivative of functions 0..m at each z.
/// Result has shape (z.size() x (m+1)). Fourier index k maps to 1 for k=0,
/// sin(ceil(k/2) z) for odd k and cos(k/2 z) for even k.
Eigen::MatrixXd family_values(Family f, int m, const Eigen::VectorXd& z, int d);

/// All native derivatives 0..dmax of functions 0..m at a single point.
/// out(d, k) holds the d-th derivative of function k.
void family_point(Family f, int m, double z, int dmax, Eigen::MatrixXd& out);

/// Indices removed from a family before it becomes a free function.
class Removal {
 public:
  Removal() = default;
  static Removal none() { return {}; }
  static Removal first(int k);
  static Removal indices(std::vector<int> idx);

  bool contains(int k) const noexcept;
  const std::vector<int>& list() const noexcept { return idx_; }

 private:
  std::vector<int> idx_;
};

/// A univariate family of degree m over a problem interval.
class UnivariateBasis {
 public:
  UnivariateBasis() = default;
  /// Throws Error when the removal exceeds m+1 functions.
  UnivariateBasis(Family f, int m, DomainMap map, Removal removal = {});

  Family family() const noexcept { return family_; }
  int degree() const noexcept { return m_; }
  const DomainMap& map() const noexcept { return map_; }
  const Removal& removal() const noexcept { return removal_; }
  /// Retained function indices in ascending order.
  const std::vector<int>& retained() const noexcept { return retained_; }

  /// H^(d) with respect to the problem variable, already scaled by c^d.
  /// With full=true all m+1 columns are returned. Throws Error for points
  /// outside the problem interval or negative d.
  Eigen::MatrixXd eval(const Eigen::VectorXd& x, int d, bool full = false) const;

  /// Integrals over [a, b] in problem coordinates of every function 0..m.
  Eigen::VectorXd integrals(double a, double b) const;

 private:
  Family family_ = Family::Chebyshev;
  int m_ = 0;
  DomainMap map_;
  Removal removal_;
  std::vector<int> retained_;
};

/// Chebyshev-Gauss-Lobatto nodes z_j = -cos(j pi/(N-1)). Throws for N < 2.
Eigen::VectorXd cgl_nodes(int n);

/// Uniform nodes on [a, b] including both endpoints.
Eigen::VectorXd uniform_nodes(int n, double a, double b);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
const Quadrature& gauss_legendre(int n);

/// n-th derivative of an activation at t. Relu derivatives beyond the
/// first are zero.
double activation(Activation a, double t, int n);

/// Fixed hidden layer of a random-feature model.
struct ElmLayer {
  Activation act = Activation::Tanh;
  /// Row j holds the input weights of neuron j.
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

/// Draws weights and biases i.i.d. uniform on [lo, hi] from a 64-bit
/// Mersenne twister seeded with `seed`. Throws unless lo < hi.
ElmLayer elm_init(std::uint64_t seed, int neurons, int input_dim, double lo,
                  double hi, Activation act = Activation::Tanh);

}  // namespace tfc
