#include "cos2q/kernels.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace cos2q::kernels {

namespace {

// Real arithmetic on purpose: std::complex operator* goes through the
// NaN-recovering library routine and is several times slower.
inline cplx row_dot(const CsrView& a, int row, std::span<const cplx> x) {
  double re = 0.0, im = 0.0;
  for (int k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k) {
    const cplx v = a.values[k];
    const cplx u = x[a.columns[k]];
    re += v.real() * u.real() - v.imag() * u.imag();
    im += v.real() * u.imag() + v.imag() * u.real();
  }
  return {re, im};
}

inline cplx combine_one(std::span<const double> c, std::span<const std::span<const cplx>> blocks, std::size_t k) {
  cplx acc(0.0, 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) acc += c[b] * blocks[b][k];
  return acc;
}

// Row of phases e^{i n x} for n = -n_cut..n_cut.
std::vector<cplx> phase_row(int n_cut, double x) {
  std::vector<cplx> row(static_cast<std::size_t>(2 * n_cut + 1));
  for (int n = -n_cut; n <= n_cut; ++n) row[static_cast<std::size_t>(n + n_cut)] = std::polar(1.0, n * x);
  return row;
}

// Partial transform over the phi index: partial[a][j] = sum_b c[a,b] e^{i n_b phi_j}.
cplx phase_point(const TwoModeSpace& space, const std::vector<cplx>& partial_row, const std::vector<cplx>& theta_row,
                 std::size_t j, std::size_t n_phi_points) {
  cplx acc(0.0, 0.0);
  const int dt = space.theta.dimension();
  for (int a = 0; a < dt; ++a) {
    acc += theta_row[static_cast<std::size_t>(a)] *
           partial_row[static_cast<std::size_t>(a) * n_phi_points + j];
  }
  return acc / two_pi;
}

std::vector<cplx> partial_phi_transform(const TwoModeSpace& space, std::span<const cplx> c,
                                        std::span<const double> phi_axis) {
  const int dt = space.theta.dimension();
  const int dp = space.phi.dimension();
  std::vector<cplx> partial(static_cast<std::size_t>(dt) * phi_axis.size());
  std::vector<std::vector<cplx>> rows;
  rows.reserve(phi_axis.size());
  for (double x : phi_axis) rows.push_back(phase_row(space.phi.n_cut, x));
  for (int a = 0; a < dt; ++a) {
    for (std::size_t j = 0; j < phi_axis.size(); ++j) {
      cplx acc(0.0, 0.0);
      for (int b = 0; b < dp; ++b) acc += c[static_cast<std::size_t>(a * dp + b)] * rows[j][static_cast<std::size_t>(b)];
      partial[static_cast<std::size_t>(a) * phi_axis.size() + j] = acc;
    }
  }
  return partial;
}

}  // namespace

CsrView CsrView::of(const SparseMatrix& m) {
  assert(m.isCompressed());
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto nnz = static_cast<std::size_t>(m.nonZeros());
  return CsrView{static_cast<int>(m.rows()), {m.outerIndexPtr(), rows + 1}, {m.innerIndexPtr(), nnz},
                 {m.valuePtr(), nnz}};
}

void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y) {
#pragma omp parallel for schedule(static)
  for (int row = 0; row < a.rows; ++row) y[static_cast<std::size_t>(row)] = row_dot(a, row, x);
}

void combine(std::span<const double> coefficients, std::span<const std::span<const cplx>> block_values,
             std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = combine_one(coefficients, block_values, static_cast<std::size_t>(k));
  }
}

void evaluate_grid(const std::function<double(double, double)>& f, std::span<const double> theta_axis,
                   std::span<const double> phi_axis, std::span<double> values) {
  const auto nt = static_cast<std::ptrdiff_t>(theta_axis.size());
  const std::size_t np = phi_axis.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      values[static_cast<std::size_t>(i) * np + j] = f(theta_axis[static_cast<std::size_t>(i)], phi_axis[j]);
    }
  }
}

void charge_to_phase(const TwoModeSpace& space, std::span<const cplx> coefficients,
                     std::span<const double> theta_axis, std::span<const double> phi_axis,
                     std::span<cplx> amplitudes) {
  const std::vector<cplx> partial = partial_phi_transform(space, coefficients, phi_axis);
  const auto nt = static_cast<std::ptrdiff_t>(theta_axis.size());
  const std::size_t np = phi_axis.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nt; ++i) {
    const std::vector<cplx> theta_row = phase_row(space.theta.n_cut, theta_axis[static_cast<std::size_t>(i)]);
    for (std::size_t j = 0; j < np; ++j) {
      amplitudes[static_cast<std::size_t>(i) * np + j] = phase_point(space, partial, theta_row, j, np);
    }
  }
}

namespace serial {

void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y) {
  for (int row = 0; row < a.rows; ++row) y[static_cast<std::size_t>(row)] = row_dot(a, row, x);
}

void combine(std::span<const double> coefficients, std::span<const std::span<const cplx>> block_values,
             std::span<cplx> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = combine_one(coefficients, block_values, k);
}

void evaluate_grid(const std::function<double(double, double)>& f, std::span<const double> theta_axis,
                   std::span<const double> phi_axis, std::span<double> values) {
  for (std::size_t i = 0; i < theta_axis.size(); ++i) {
    for (std::size_t j = 0; j < phi_axis.size(); ++j) values[i * phi_axis.size() + j] = f(theta_axis[i], phi_axis[j]);
  }
}

void charge_to_phase(const TwoModeSpace& space, std::span<const cplx> coefficients,
                     std::span<const double> theta_axis, std::span<const double> phi_axis,
                     std::span<cplx> amplitudes) {
  const std::vector<cplx> partial = partial_phi_transform(space, coefficients, phi_axis);
  for (std::size_t i = 0; i < theta_axis.size(); ++i) {
    const std::vector<cplx> theta_row = phase_row(space.theta.n_cut, theta_axis[i]);
    for (std::size_t j = 0; j < phi_axis.size(); ++j) {
      amplitudes[i * phi_axis.size() + j] = phase_point(space, partial, theta_row, j, phi_axis.size());
    }
  }
}

}  // namespace serial

}  // namespace cos2q::kernels
