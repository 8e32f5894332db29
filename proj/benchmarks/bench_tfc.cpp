// Distributed under the MIT License.
// See LICENSE for details.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "tfc/basis.hpp"
#include "tfc/desolve.hpp"
#include "tfc/expr.hpp"
#include "tfc/problems.hpp"
#include "tfc/solvers.hpp"

namespace {

void BM_ChebyshevValues(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(1000, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfc::family_values(tfc::Family::Chebyshev, m, z, 2));
  }
  state.SetItemsProcessed(state.iterations() * z.size());
}
BENCHMARK(BM_ChebyshevValues)->Arg(10)->Arg(50)->Arg(200);

void BM_ExpressionDerivative(benchmark::State& state) {
  const tfc::Expr e = tfc::parse("exp(-x)*(x + y^3)*sin(pi*x*y)");
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfc::differentiate(tfc::differentiate(e, "x"), "y"));
  }
}
BENCHMARK(BM_ExpressionDerivative);

void BM_Lstsq(benchmark::State& state) {
  const auto method = static_cast<tfc::LsqMethod>(state.range(0));
  const Eigen::MatrixXd A = Eigen::MatrixXd::Random(600, 200);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(600);
  for (auto _ : state) benchmark::DoNotOptimize(tfc::lstsq(A, b, method));
  state.SetLabel(tfc::lsq_method_name(method));
}
BENCHMARK(BM_Lstsq)
    ->Arg(static_cast<int>(tfc::LsqMethod::Qr))
    ->Arg(static_cast<int>(tfc::LsqMethod::ScaledQr))
    ->Arg(static_cast<int>(tfc::LsqMethod::SvdPinv))
    ->Arg(static_cast<int>(tfc::LsqMethod::Cholesky));

void BM_SimplePdeAssembly(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const tfc::DeProblem p = tfc::simple_pde_problem(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(tfc::assemble_linear(p));
}
BENCHMARK(BM_SimplePdeAssembly)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SimplePdeSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const tfc::DeProblem p = tfc::simple_pde_problem(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(tfc::solve(p));
}
BENCHMARK(BM_SimplePdeSolve)->Arg(10)->Arg(15)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_BalloonSolve(benchmark::State& state) {
  const tfc::DeProblem p = tfc::balloon_problem(52);
  for (auto _ : state) benchmark::DoNotOptimize(tfc::solve(p));
}
BENCHMARK(BM_BalloonSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
