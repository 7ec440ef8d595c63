#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <vector>

#include "cos2q/hamiltonians.hpp"
#include "cos2q/kernels.hpp"

using namespace cos2q;

namespace {

CircuitParams params() { return CircuitParams::from_ghz(0.4, 20.0, 20.0); }

Vector wiggle(int n, double a, double b) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(std::sin(a * i + 0.3), std::cos(b * i));
  return v;
}

std::span<const cplx> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<cplx> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Threads are forced above one so the parallel path really splits work.
struct ThreadScope {
  int saved = omp_get_max_threads();
  ThreadScope() { omp_set_num_threads(4); }
  ~ThreadScope() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("parallel spmv matches the serial reference bit for bit and Eigen to rounding") {
  ThreadScope threads;
  const CircuitParams p = params();
  const TwoModeSpace s = circuit_space(p, 9);
  const OperatorMatrix h = circuit_hamiltonian(0.9, p, s);
  const auto csr = kernels::CsrView::of(h.entries());
  const Vector x = wiggle(h.dimension(), 0.31, 0.17);
  Vector a(h.dimension()), b(h.dimension());
  kernels::spmv(csr, view(x), view(a));
  kernels::serial::spmv(csr, view(x), view(b));
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const Vector ref = h.entries() * x;
  CHECK((a - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("parallel combine matches serial and the assembled family") {
  ThreadScope threads;
  const CircuitParams p = params();
  const HamiltonianFamily family(Model::circuit, p, circuit_space(p, 7));
  const AffineOperator& op = family.affine();
  std::vector<std::span<const cplx>> blocks;
  for (std::size_t k = 0; k < op.block_count(); ++k) blocks.push_back(op.block_values(k));
  for (double phi : {0.0, 0.4, 1.3, 2.9}) {
    const std::vector<double> c = family.coefficients(phi);
    std::vector<cplx> a(blocks[0].size()), b(blocks[0].size());
    kernels::combine(c, blocks, a);
    kernels::serial::combine(c, blocks, b);
    CHECK(a == b);
  }
}

TEST_CASE("grid evaluation and charge-to-phase transform agree across backends") {
  ThreadScope threads;
  const CircuitParams p = params();
  const TwoModeSpace s = circuit_space(p, 5);
  const std::vector<double> axis = periodic_axis(24);
  std::vector<double> ga(axis.size() * axis.size()), gb(ga.size());
  auto f = [&](double t, double v) { return classical_potential(PotentialModel::circuit, 0.6, p, t, v); };
  kernels::evaluate_grid(f, axis, axis, ga);
  kernels::serial::evaluate_grid(f, axis, axis, gb);
  CHECK(ga == gb);

  const Vector c = wiggle(s.dimension(), 0.7, 0.2);
  std::vector<cplx> pa(ga.size()), pb(ga.size());
  kernels::charge_to_phase(s, view(c), axis, axis, pa);
  kernels::serial::charge_to_phase(s, view(c), axis, axis, pb);
  CHECK(pa == pb);

  // direct double sum at a few points
  for (auto [i, j] : {std::pair{0, 0}, {3, 17}, {23, 5}}) {
    cplx want = 0.0;
    for (int nt = -5; nt <= 5; ++nt) {
      for (int np = -5; np <= 5; ++np) {
        want += c(s.index(nt, np)) * std::exp(cplx(0.0, nt * axis[i] + np * axis[j]));
      }
    }
    want /= two_pi;
    CHECK(std::abs(pa[i * axis.size() + j] - want) < 1e-13);
  }
}

}  // TEST_SUITE
