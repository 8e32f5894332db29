// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <vector>

#include "tfc/desolve.hpp"

namespace tfc {

/// Point constraint  d^d u / dx_dim^d (a) = kappa.
Constraint point_constraint(int dim, double a, int d, const Expr& kappa);

/// Free-function choice for the benchmark problems.
enum class Method { Tfc, Spectral, Xtfc };

/// u_xx + u_yy = exp(-x)(x - 2 + y^3 + 6y) on [0, 1]^2 with Dirichlet data
/// from u = exp(-x)(x + y^3). `m` is the total Chebyshev degree, or the
/// neuron count for Xtfc.
DeProblem simple_pde_problem(int n, int m, Method method = Method::Tfc,
                             std::uint64_t seed = 0);

/// Retained basis size of the simple PDE at total degree m (17 at m = 5).
int simple_pde_basis_size(int m);

/// u_xx = u_tt on [0, 1]^2, fixed ends, u(x, 0) = sin(pi x), u_t(x, 0) = 0.
DeProblem wave1d_problem(int degree = 20, int n = 30);

/// u_xx + u_yy = 64 u_tt on [0, 1]^3 with clamped edges. `m` is the total
/// Chebyshev degree, or the neuron count for Xtfc.
DeProblem wave2d_problem(int m, Method method, int n = 11,
                         std::uint64_t seed = 0);

/// Basis size of the 2D wave problem at total degree d (12 at d = 3).
int wave2d_basis_size(int degree);

/// Biharmonic equation on [0, 1]^2 with simply supported edges.
DeProblem biharmonic_cartesian_problem(int degree = 26, int n = 20);

/// Biharmonic equation on the annulus r in [1, 4], th in [0, 2 pi] with
/// periodic constraints in th.
DeProblem biharmonic_polar_problem(int degree = 30, int n = 30);

/// y_xx - Pe y_x = 0, y(0) = 1, y(1) = 0 on one constrained expression.
DeProblem convection_diffusion_problem(double peclet, int degree = 190,
                                       int n = 200);

/// Split specification matching convection_diffusion_problem.
SplitSpec convection_diffusion_split(int degree = 190, int n = 200);

/// Venus atmosphere at one altitude.
struct BalloonAtmosphere {
  int altitude_km = 52;
  double density = 0.0;
  double gas_mass = 0.0;
  double gravity = 0.0;
};

/// Atmospheric data for 52..62 km.
const std::vector<BalloonAtmosphere>& balloon_atmosphere();

/// Natural-shape tandem balloon (zero circumferential stress) on the basis
/// interval z in [-1, 1] with unknown ends beta and ld.
DeProblem balloon_problem(int altitude_km = 52, int degree = 40,
                          int n = 60);

}  // namespace tfc
