#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// kernels) and a serial reference (kernels::serial) with identical
// floating-point evaluation order per output element, so the two agree
// bit-for-bit; the tests and the benchmark compare them.

#include <functional>
#include <span>

#include "cos2q/charge_basis.hpp"

namespace cos2q::kernels {

/// Read-only view of a compressed row-major sparse matrix.
struct CsrView {
  int rows = 0;
  std::span<const int> row_offsets;  // rows + 1
  std::span<const int> columns;
  std::span<const cplx> values;

  static CsrView of(const SparseMatrix& m);
};

/// y = A x
void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y);

/// out[k] = sum_b coefficients[b] * block_values[b][k] over a shared pattern.
void combine(std::span<const double> coefficients, std::span<const std::span<const cplx>> block_values,
             std::span<cplx> out);

/// values[i * n_phi + j] = f(theta[i], phi[j])
void evaluate_grid(const std::function<double(double, double)>& f, std::span<const double> theta_axis,
                   std::span<const double> phi_axis, std::span<double> values);

/// psi(theta_i, phi_j) = (2 pi)^-1 sum c[n_t, n_p] e^{i n_t theta_i} e^{i n_p phi_j}
/// for a state stored in TwoModeSpace ordering.
void charge_to_phase(const TwoModeSpace& space, std::span<const cplx> coefficients,
                     std::span<const double> theta_axis, std::span<const double> phi_axis,
                     std::span<cplx> amplitudes);

namespace serial {

void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y);
void combine(std::span<const double> coefficients, std::span<const std::span<const cplx>> block_values,
             std::span<cplx> out);
void evaluate_grid(const std::function<double(double, double)>& f, std::span<const double> theta_axis,
                   std::span<const double> phi_axis, std::span<double> values);
void charge_to_phase(const TwoModeSpace& space, std::span<const cplx> coefficients,
                     std::span<const double> theta_axis, std::span<const double> phi_axis,
                     std::span<cplx> amplitudes);

}  // namespace serial

}  // namespace cos2q::kernels
