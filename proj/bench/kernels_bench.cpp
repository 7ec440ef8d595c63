// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cos2q/hamiltonians.hpp"
#include "cos2q/kernels.hpp"

namespace {

using namespace cos2q;

CircuitParams params() { return CircuitParams::from_ghz(0.4, 20.0, 20.0); }

Vector test_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(std::sin(0.37 * i), std::cos(0.11 * i));
  return v.normalized();
}

template <bool Parallel>
void BM_spmv(benchmark::State& state) {
  const CircuitParams p = params();
  const TwoModeSpace space = circuit_space(p, static_cast<int>(state.range(0)));
  const OperatorMatrix h = circuit_hamiltonian(0.3, p, space);
  const auto view = kernels::CsrView::of(h.entries());
  const Vector x = test_vector(h.dimension());
  Vector y(h.dimension());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::spmv(view, {x.data(), std::size_t(x.size())}, {y.data(), std::size_t(y.size())});
    } else {
      kernels::serial::spmv(view, {x.data(), std::size_t(x.size())}, {y.data(), std::size_t(y.size())});
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * h.entries().nonZeros());
}

template <bool Parallel>
void BM_combine(benchmark::State& state) {
  const CircuitParams p = params();
  const TwoModeSpace space = circuit_space(p, static_cast<int>(state.range(0)));
  const HamiltonianFamily family(Model::circuit, p, space);
  const AffineOperator& a = family.affine();
  std::vector<std::span<const cplx>> blocks;
  for (std::size_t b = 0; b < a.block_count(); ++b) blocks.push_back(a.block_values(b));
  const std::vector<double> coeffs = family.coefficients(0.7);
  std::vector<cplx> out(blocks.front().size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::combine(coeffs, blocks, out);
    } else {
      kernels::serial::combine(coeffs, blocks, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_charge_to_phase(benchmark::State& state) {
  const CircuitParams p = params();
  const TwoModeSpace space = circuit_space(p, 12);
  const Vector x = test_vector(space.dimension());
  const std::vector<double> axis = periodic_axis(static_cast<int>(state.range(0)));
  std::vector<cplx> out(axis.size() * axis.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::charge_to_phase(space, {x.data(), std::size_t(x.size())}, axis, axis, out);
    } else {
      kernels::serial::charge_to_phase(space, {x.data(), std::size_t(x.size())}, axis, axis, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_potential_grid(benchmark::State& state) {
  const CircuitParams p = params();
  const std::vector<double> axis = periodic_axis(static_cast<int>(state.range(0)));
  std::vector<double> out(axis.size() * axis.size());
  auto f = [&](double t, double v) { return classical_potential(PotentialModel::circuit, 0.4, p, t, v); };
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::evaluate_grid(f, axis, axis, out);
    } else {
      kernels::serial::evaluate_grid(f, axis, axis, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_spmv<false>)->Arg(10)->Arg(15)->Arg(30);
BENCHMARK(BM_spmv<true>)->Arg(10)->Arg(15)->Arg(30);
BENCHMARK(BM_combine<false>)->Arg(15)->Arg(30);
BENCHMARK(BM_combine<true>)->Arg(15)->Arg(30);
BENCHMARK(BM_charge_to_phase<false>)->Arg(64);
BENCHMARK(BM_charge_to_phase<true>)->Arg(64);
BENCHMARK(BM_potential_grid<false>)->Arg(256);
BENCHMARK(BM_potential_grid<true>)->Arg(256);

BENCHMARK_MAIN();
