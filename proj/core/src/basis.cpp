// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "tfc/errors.hpp"

namespace tfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyName {
  Family f;
  const char* name;
};
constexpr FamilyName kFamilies[] = {
    {Family::Chebyshev, "chebyshev"},     {Family::Legendre, "legendre"},
    {Family::Laguerre, "laguerre"},       {Family::HermiteProb, "hermite-prob"},
    {Family::HermitePhys, "hermite-phys"}, {Family::Fourier, "fourier"},
};

struct ActivationName {
  Activation a;
  const char* name;
};
constexpr ActivationName kActivations[] = {
    {Activation::Sin, "sin"},         {Activation::Swish, "swish"},
    {Activation::Tanh, "tanh"},       {Activation::Sigmoid, "sigmoid"},
    {Activation::Relu, "relu"},
};

}  // namespace

const char* family_name(Family f) noexcept {
  for (const auto& e : kFamilies) {
    if (e.f == f) return e.name;
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (const auto& e : kFamilies) {
    if (name == e.name) return e.f;
  }
  throw Error("unknown basis family '" + name + "'");
}

const char* activation_name(Activation a) noexcept {
  for (const auto& e : kActivations) {
    if (e.a == a) return e.name;
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  for (const auto& e : kActivations) {
    if (name == e.name) return e.a;
  }
  throw Error("unknown activation '" + name + "'");
}

std::pair<double, double> native_domain(Family f) noexcept {
  switch (f) {
    case Family::Chebyshev:
    case Family::Legendre:
      return {-1.0, 1.0};
    case Family::Fourier:
      return {-std::numbers::pi, std::numbers::pi};
    case Family::Laguerre:
      return {0.0, kInf};
    case Family::HermiteProb:
    case Family::HermitePhys:
      return {-kInf, kInf};
  }
  return {-1.0, 1.0};
}

DomainMap::DomainMap(double x0, double xf, double z0, double zf)
    : x0_(x0), xf_(xf), z0_(z0), zf_(zf) {
  if (!(std::isfinite(x0) && std::isfinite(xf) && std::isfinite(z0) &&
        std::isfinite(zf)) ||
      !(x0 < xf) || !(z0 < zf)) {
    throw Error("domain map requires finite intervals with lower < upper");
  }
  c_ = (zf - z0) / (xf - x0);
}

bool DomainMap::contains(double x) const noexcept {
  double tol = 1e-12 * std::max({1.0, std::fabs(x0_), std::fabs(xf_)});
  return x >= x0_ - tol && x <= xf_ + tol;
}

// ------------------------------------------------------------ recursions

void family_point(Family f, int m, double z, int dmax, Eigen::MatrixXd& out) {
  if (m < 0) throw Error("basis degree must be non-negative");
  if (dmax < 0) throw Error("derivative order must be non-negative");
  out.setZero(dmax + 1, m + 1);
  if (f == Family::Fourier) {
    for (int k = 0; k <= m; ++k) {
      if (k == 0) {
        out(0, 0) = 1.0;
        continue;
      }
      const int n = (k + 1) / 2;
      const bool is_sin = (k % 2) == 1;
      const double s = std::sin(n * z);
      const double c = std::cos(n * z);
      double scale = 1.0;
      for (int d = 0; d <= dmax; ++d) {
        // d-th derivative of sin cycles sin, cos, -sin, -cos.
        double v;
        const int phase = (d + (is_sin ? 0 : 1)) % 4;
        switch (phase) {
          case 0:
            v = s;
            break;
          case 1:
            v = c;
            break;
          case 2:
            v = -s;
            break;
          default:
            v = -c;
            break;
        }
        out(d, k) = scale * v;
        scale *= n;
      }
    }
    return;
  }

  out(0, 0) = 1.0;
  if (m == 0) return;
  switch (f) {
    case Family::Laguerre:
      out(0, 1) = 1.0 - z;
      if (dmax >= 1) out(1, 1) = -1.0;
      break;
    case Family::HermitePhys:
      out(0, 1) = 2.0 * z;
      if (dmax >= 1) out(1, 1) = 2.0;
      break;
    default:
      out(0, 1) = z;
      if (dmax >= 1) out(1, 1) = 1.0;
      break;
  }
  for (int k = 1; k < m; ++k) {
    const double kk = k;
    for (int d = 0; d <= dmax; ++d) {
      const double prev = d > 0 ? out(d - 1, k) : 0.0;
      const double cur = out(d, k);
      const double old = out(d, k - 1);
      double next = 0.0;
      switch (f) {
        case Family::Chebyshev:
          next = 2.0 * (d * prev + z * cur) - old;
          break;
        case Family::Legendre:
          next = ((2.0 * kk + 1.0) / (kk + 1.0)) * (d * prev + z * cur) -
                 (kk / (kk + 1.0)) * old;
          break;
        case Family::Laguerre:
          next = ((2.0 * kk + 1.0 - z) / (kk + 1.0)) * cur -
                 (d / (kk + 1.0)) * prev - (kk / (kk + 1.0)) * old;
          break;
        case Family::HermiteProb:
          next = d * prev + z * cur - kk * old;
          break;
        case Family::HermitePhys:
          next = 2.0 * d * prev + 2.0 * z * cur - 2.0 * kk * old;
          break;
        case Family::Fourier:
          break;
      }
      out(d, k + 1) = next;
    }
  }
}

Eigen::MatrixXd family_values(Family f, int m, const Eigen::VectorXd& z,
                              int d) {
  if (d < 0) throw Error("derivative order must be non-negative");
  Eigen::MatrixXd out(z.size(), m + 1);
  Eigen::MatrixXd work;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    family_point(f, m, z[i], d, work);
    out.row(i) = work.row(d);
  }
  return out;
}

// --------------------------------------------------------------- removal

Removal Removal::first(int k) {
  Removal r;
  for (int i = 0; i < k; ++i) r.idx_.push_back(i);
  return r;
}

Removal Removal::indices(std::vector<int> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int i : idx) {
    if (i < 0) throw Error("removed basis index must be non-negative");
  }
  Removal r;
  r.idx_ = std::move(idx);
  return r;
}

bool Removal::contains(int k) const noexcept {
  return std::binary_search(idx_.begin(), idx_.end(), k);
}

// ------------------------------------------------------ univariate basis

UnivariateBasis::UnivariateBasis(Family f, int m, DomainMap map,
                                 Removal removal)
    : family_(f), m_(m), map_(map), removal_(std::move(removal)) {
  if (m < 0) throw Error("basis degree must be non-negative");
  for (int i : removal_.list()) {
    if (i > m) {
      throw Error("removal index " + std::to_string(i) +
                  " exceeds basis degree " + std::to_string(m));
    }
  }
  for (int k = 0; k <= m; ++k) {
    if (!removal_.contains(k)) retained_.push_back(k);
  }
}

Eigen::MatrixXd UnivariateBasis::eval(const Eigen::VectorXd& x, int d,
                                      bool full) const {
  if (d < 0) throw Error("derivative order must be non-negative");
  Eigen::VectorXd z(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!map_.contains(x[i])) {
      throw Error("point " + std::to_string(x[i]) +
                  " outside basis problem interval");
    }
    z[i] = map_.to_basis(x[i]);
  }
  Eigen::MatrixXd h = family_values(family_, m_, z, d);
  h *= std::pow(map_.c(), d);
  if (full) return h;
  Eigen::MatrixXd out(h.rows(), static_cast<Eigen::Index>(retained_.size()));
  for (std::size_t j = 0; j < retained_.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = h.col(retained_[j]);
  }
  return out;
}

Eigen::VectorXd UnivariateBasis::integrals(double a, double b) const {
  const int n = std::max(64, m_ / 2 + 2);
  const Quadrature& q = gauss_legendre(n);
  const double za = map_.to_basis(a);
  const double zb = map_.to_basis(b);
  const double half = 0.5 * (zb - za);
  const double mid = 0.5 * (zb + za);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m_ + 1);
  Eigen::MatrixXd work;
  for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
    family_point(family_, m_, mid + half * q.nodes[i], 0, work);
    acc += q.weights[i] * work.row(0).transpose();
  }
  return acc * (half / map_.c());
}

// ----------------------------------------------------------------- nodes

Eigen::VectorXd cgl_nodes(int n) {
  if (n < 2) throw Error("CGL node count must be at least 2");
  Eigen::VectorXd z(n);
  for (int j = 0; j < n; ++j) {
    z[j] = -std::cos(j * std::numbers::pi / (n - 1));
  }
  z[0] = -1.0;
  z[n - 1] = 1.0;
  // Symmetric nodes are exact mirrors; the middle node is exactly zero.
  for (int j = 0; j < n / 2; ++j) z[n - 1 - j] = -z[j];
  if (n % 2 == 1) z[n / 2] = 0.0;
  return z;
}

Eigen::VectorXd uniform_nodes(int n, double a, double b) {
  if (n < 1) throw Error("node count must be positive");
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (a + b));
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  x[n - 1] = b;
  return x;
}

const Quadrature& gauss_legendre(int n) {
  if (n < 1) throw Error("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Quadrature q;
  q.nodes.setZero(n);
  q.weights.setZero(n);
  auto legendre = [n](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p = n == 0 ? 1.0 : p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  if (n == 1) {
    q.weights[0] = 2.0;
  } else {
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double p = 0.0, dp = 1.0;
      for (int iter = 0; iter < 100; ++iter) {
        legendre(x, p, dp);
        const double dx = p / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      legendre(x, p, dp);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      q.nodes[i] = -x;
      q.nodes[n - 1 - i] = x;
      q.weights[i] = w;
      q.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
      double p = 0.0, dp = 1.0;
      legendre(0.0, p, dp);
      q.weights[n / 2] = 2.0 / (dp * dp);
    }
  }
  return cache.emplace(n, std::move(q)).first->second;
}

// ----------------------------------------------------------- activations

namespace {

// Coefficients of P_n(y) where the n-th derivative of tanh or sigmoid is
// P_n evaluated at the function value y.
class ActivationPolys {
 public:
  static constexpr int kMaxOrder = 24;

  explicit ActivationPolys(bool sigmoid) {
    polys_.push_back({0.0, 1.0});
    for (int n = 1; n <= kMaxOrder; ++n) {
      const auto& p = polys_.back();
      std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
      for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = i * p[i];
      // Multiply by (1 - y^2) or (y - y^2).
      std::vector<double> next(dp.size() + 2, 0.0);
      for (std::size_t i = 0; i < dp.size(); ++i) {
        if (sigmoid) {
          next[i + 1] += dp[i];
        } else {
          next[i] += dp[i];
        }
        next[i + 2] -= dp[i];
      }
      polys_.push_back(std::move(next));
    }
  }

  double eval(int n, double y) const {
    if (n > kMaxOrder) throw Error("activation derivative order too high");
    const auto& p = polys_[static_cast<std::size_t>(n)];
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * y + p[i];
    return acc;
  }

 private:
  std::vector<std::vector<double>> polys_;
};

const ActivationPolys& tanh_polys() {
  static const ActivationPolys p(false);
  return p;
}
const ActivationPolys& sigmoid_polys() {
  static const ActivationPolys p(true);
  return p;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double activation(Activation a, double t, int n) {
  if (n < 0) throw Error("derivative order must be non-negative");
  switch (a) {
    case Activation::Sin:
      switch (n % 4) {
        case 0:
          return std::sin(t);
        case 1:
          return std::cos(t);
        case 2:
          return -std::sin(t);
        default:
          return -std::cos(t);
      }
    case Activation::Tanh:
      return tanh_polys().eval(n, std::tanh(t));
    case Activation::Sigmoid:
      return sigmoid_polys().eval(n, sigmoid(t));
    case Activation::Swish: {
      const double y = sigmoid(t);
      const double dn = sigmoid_polys().eval(n, y);
      const double dn1 = n > 0 ? sigmoid_polys().eval(n - 1, y) : 0.0;
      return t * dn + n * dn1;
    }
    case Activation::Relu:
      if (n == 0) return t > 0.0 ? t : 0.0;
      if (n == 1) return t > 0.0 ? 1.0 : 0.0;
      return 0.0;
  }
  return 0.0;
}

ElmLayer elm_init(std::uint64_t seed, int neurons, int input_dim, double lo,
                  double hi, Activation act) {
  if (!(lo < hi)) throw Error("random-feature range requires lo < hi");
  if (neurons < 1 || input_dim < 1) {
    throw Error("random-feature layer needs positive sizes");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ElmLayer layer;
  layer.act = act;
  layer.weights.resize(neurons, input_dim);
  layer.biases.resize(neurons);
  for (int j = 0; j < neurons; ++j) {
    for (int k = 0; k < input_dim; ++k) layer.weights(j, k) = dist(rng);
  }
  for (int j = 0; j < neurons; ++j) layer.biases[j] = dist(rng);
  return layer;
}

}  // namespace tfc
