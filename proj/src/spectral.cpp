#include "cos2q/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cos2q/error.hpp"
#include "cos2q/kernels.hpp"

namespace cos2q {

namespace {

void fix_gauge(Eigen::Ref<Eigen::VectorXcd> v) {
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  // first index within a relative hair of the maximum, so near-ties between
  // +n and -n components resolve the same way on every platform
  Eigen::Index pick = 0;
  while (std::abs(v(pick)) < (1.0 - 1e-6) * largest) ++pick;
  v *= std::conj(v(pick)) / std::abs(v(pick));
}

// Rotates every quasi-degenerate cluster onto parity eigenstates.
void align_clusters(const OperatorMatrix& h, const OperatorMatrix& parity, double threshold, Eigen::VectorXd& energies,
                    Eigen::MatrixXcd& states) {
  const int k = static_cast<int>(energies.size());
  if (k < 2) return;
  const double scale = k >= 3 ? energies(2) - energies(0) : std::abs(energies(1) - energies(0));
  const double limit = threshold * scale;
  int begin = 0;
  while (begin < k) {
    int end = begin + 1;
    while (end < k && energies(end) - energies(end - 1) < limit) ++end;
    const int size = end - begin;
    if (size > 1) {
      Eigen::MatrixXcd block = states.middleCols(begin, size);
      Eigen::MatrixXcd p(size, size);
      for (int j = 0; j < size; ++j) {
        const Vector pj = parity.apply(block.col(j));
        for (int i = 0; i < size; ++i) p(i, j) = block.col(i).dot(pj);
      }
      p = 0.5 * (p + p.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
      block = (block * es.eigenvectors()).eval();
      std::vector<std::pair<double, int>> order;
      for (int j = 0; j < size; ++j) order.emplace_back(h.matrix_element(block.col(j), block.col(j)).real(), j);
      std::stable_sort(order.begin(), order.end());
      for (int j = 0; j < size; ++j) {
        states.col(begin + j) = block.col(order[j].second);
        energies(begin + j) = order[j].first;
      }
    }
    begin = end;
  }
}

double doublet_overlap(const SpectralResult& a, const SpectralResult& b) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) s += std::norm(a.states.col(i).dot(b.states.col(j)));
  }
  return std::sqrt(s / 2.0);
}

double spectral_asymmetry(const HamiltonianFamily& family, const OperatorMatrix& parity, int k,
                          const SpectralOptions& options) {
  const SpectralResult a = lowest_eigenpairs(family.at(pi / 4.0), k, &parity, options);
  const SpectralResult b = lowest_eigenpairs(family.at(3.0 * pi / 4.0), k, &parity, options);
  double worst = 0.0;
  for (int n = 1; n < k; ++n) {
    const double da = a.energies(n) - a.energies(0);
    const double db = b.energies(n) - b.energies(0);
    worst = std::max(worst, std::abs(da - db));
  }
  return worst;
}

}  // namespace

SpectralResult lowest_eigenpairs(const OperatorMatrix& h, int k, const OperatorMatrix* parity,
                                 const SpectralOptions& options) {
  if (!h.hermitian()) throw InvalidArgument("lowest_eigenpairs requires a Hermitian operator");
  if (k < 1 || k >= h.dimension()) throw InvalidArgument("lowest_eigenpairs: k must lie in [1, dimension)");
  const Eigenpairs pairs = options.dense ? dense_eigenpairs(h, k) : lowest_eigenpairs_auto(h, k, options.eigen);

  SpectralResult out;
  out.energies = pairs.values;
  out.states = pairs.vectors;
  if (parity != nullptr) align_clusters(h, *parity, options.degeneracy_threshold, out.energies, out.states);
  out.residuals.resize(k);
  out.parities.assign(k, 0);
  for (int n = 0; n < k; ++n) {
    fix_gauge(out.states.col(n));
    const Vector v = out.states.col(n);
    out.residuals(n) = (h.apply(v) - out.energies(n) * v).norm();
    if (parity != nullptr) {
      const double p = parity->matrix_element(v, v).real();
      if (std::abs(p) > 0.99) out.parities[n] = p > 0 ? 1 : -1;
    }
  }
  return out;
}

std::vector<double> angle_grid(double start, double stop, int points) {
  if (points < 1) throw InvalidArgument("angle grid needs at least one point");
  if (points == 1) return {start};
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = start + (stop - start) * i / (points - 1);
  grid.back() = stop;
  return grid;
}

SpectrumSweep spectrum_vs_angle(const HamiltonianFamily& family, std::span<const double> phi_grid, int k,
                                const SpectralOptions& options) {
  for (double phi : phi_grid) {
    if (!(phi >= 0.0 && phi <= pi)) throw InvalidArgument("phi grid must lie within [0, pi]");
  }
  const bool has_parity = family.space().theta.n_offset == 0.0 && family.space().phi.n_offset == 0.0;
  const OperatorMatrix parity = has_parity ? parity_operator(family.space()) : OperatorMatrix();

  SpectrumSweep sweep;
  sweep.points.resize(phi_grid.size());
  parallel_for(phi_grid.size(), [&](std::size_t i) {
    sweep.points[i] = lowest_eigenpairs(family.at(phi_grid[i]), k, has_parity ? &parity : nullptr, options);
    sweep.points[i].phi = phi_grid[i];
  });

  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    SpectralResult& cur = sweep.points[i];
    const SpectralResult& prev = sweep.points[i - 1];
    for (int n = 0; n < k; ++n) {
      const cplx ov = prev.states.col(n).dot(cur.states.col(n));
      if (std::abs(ov) < 0.5) {
        sweep.crossings.emplace_back(i, n);
        continue;
      }
      cur.states.col(n) *= std::conj(ov) / std::abs(ov);
    }
  }
  return sweep;
}

NoiseElements noise_matrix_elements(const SpectralResult& result, const TwoModeSpace& space) {
  if (result.size() < 2) throw InvalidArgument("noise_matrix_elements needs at least two states");
  const Vector s0 = result.states.col(0);
  const Vector s1 = result.states.col(1);
  const OperatorMatrix id_theta = OperatorMatrix::identity(space.theta.dimension());
  const OperatorMatrix id_phi = OperatorMatrix::identity(space.phi.dimension());

  auto mode = [&](const ModeSpec& m, bool is_theta) {
    auto embed = [&](const OperatorMatrix& op) {
      return is_theta ? two_mode_embed(op, id_phi) : two_mode_embed(id_theta, op);
    };
    const OperatorMatrix sin_op = embed(harmonic_operator(m, 1, Harmonic::sin));
    const OperatorMatrix cos_op = embed(harmonic_operator(m, 1, Harmonic::cos));
    const OperatorMatrix n_op = embed(number_operator(m));
    ModeNoise out;
    out.sin_01 = std::abs(sin_op.matrix_element(s0, s1));
    out.cos_01 = std::abs(cos_op.matrix_element(s0, s1));
    out.charge_01 = std::abs(n_op.matrix_element(s0, s1));
    out.cos_diag = std::abs(cos_op.matrix_element(s0, s0).real() - cos_op.matrix_element(s1, s1).real());
    out.charge_diag = std::abs(n_op.matrix_element(s0, s0).real() - n_op.matrix_element(s1, s1).real());
    return out;
  };
  return {mode(space.theta, true), mode(space.phi, false)};
}

double PhaseSpaceState::grid_norm() const {
  if (theta_axis.size() < 2 || phi_axis.size() < 2) return 0.0;
  const double cell = (theta_axis[1] - theta_axis[0]) * (phi_axis[1] - phi_axis[0]);
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return s * cell;
}

PhaseSpaceState to_phase_space(const Vector& state, const TwoModeSpace& space, int points) {
  if (state.size() != space.dimension()) throw InvalidArgument("state dimension does not match the mode space");
  if (points < 2) throw InvalidArgument("phase grid needs at least two points per axis");
  PhaseSpaceState out;
  out.theta_axis = periodic_axis(points);
  out.phi_axis = periodic_axis(points);
  out.amplitudes.assign(static_cast<std::size_t>(points) * points, cplx(0.0));
  kernels::charge_to_phase(space, {state.data(), static_cast<std::size_t>(state.size())}, out.theta_axis,
                           out.phi_axis, out.amplitudes);
  const double norm = out.grid_norm();
  if (norm > 0.0) {
    const double scale = 1.0 / std::sqrt(norm);
    for (cplx& a : out.amplitudes) a *= scale;
  }
  return out;
}

Eigen::MatrixXcd charge_grid(const Vector& state, const TwoModeSpace& space) {
  if (state.size() != space.dimension()) throw InvalidArgument("state dimension does not match the mode space");
  const int dt = space.theta.dimension();
  const int dp = space.phi.dimension();
  Eigen::MatrixXcd out(dt, dp);
  for (int i = 0; i < dt; ++i) {
    for (int j = 0; j < dp; ++j) out(i, j) = state(i * dp + j);
  }
  return out;
}

ModelComparison compare_models(const CircuitParams& params, const TwoModeSpace& space,
                               std::span<const double> phi_grid, int k, const SpectralOptions& options) {
  if (k < 3) throw InvalidArgument("compare_models needs k >= 3");
  const HamiltonianFamily circuit(Model::circuit, params, space);
  const HamiltonianFamily sin_sin(Model::sin_sin, params, space);
  const HamiltonianFamily sin_sin_cos(Model::sin_sin_cos, params, space);

  ModelComparison out;
  out.circuit = spectrum_vs_angle(circuit, phi_grid, k, options).points;
  out.sin_sin = spectrum_vs_angle(sin_sin, phi_grid, k, options).points;
  out.sin_sin_cos = spectrum_vs_angle(sin_sin_cos, phi_grid, k, options).points;

  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    const SpectralResult& c = out.circuit[i];
    const SpectralResult& s = out.sin_sin[i];
    const SpectralResult& sc = out.sin_sin_cos[i];
    ModelComparisonPoint p;
    p.phi = phi_grid[i];
    p.splitting_circuit = c.energies(1) - c.energies(0);
    p.gap_circuit = c.energies(2) - c.energies(0);
    p.splitting_sin = s.energies(1) - s.energies(0);
    p.gap_sin = s.energies(2) - s.energies(0);
    p.splitting_sin_cos = sc.energies(1) - sc.energies(0);
    p.gap_sin_cos = sc.energies(2) - sc.energies(0);
    for (int n = 0; n < 3; ++n) {
      p.overlap_sin[n] = std::abs(c.states.col(n).dot(s.states.col(n)));
      p.overlap_sin_cos[n] = std::abs(c.states.col(n).dot(sc.states.col(n)));
    }
    p.doublet_overlap_sin = doublet_overlap(c, s);
    p.doublet_overlap_sin_cos = doublet_overlap(c, sc);
    out.points.push_back(p);
  }

  const OperatorMatrix parity = parity_operator(space);
  out.asymmetry_circuit = spectral_asymmetry(circuit, parity, k, options);
  out.asymmetry_sin = spectral_asymmetry(sin_sin, parity, k, options);
  out.asymmetry_sin_cos = spectral_asymmetry(sin_sin_cos, parity, k, options);
  return out;
}

}  // namespace cos2q
