#pragma once

#include <span>
#include <vector>

#include "cos2q/eigensolver.hpp"
#include "cos2q/hamiltonians.hpp"

namespace cos2q {

struct SpectralOptions {
  EigenOptions eigen;
  double degeneracy_threshold = 1e-6;  // relative to omega_2 - omega_0
  bool dense = false;                  // force the dense solver
};

struct SpectralResult {
  double phi = 0.0;
  Eigen::VectorXd energies;  // ascending, angular units
  Eigen::MatrixXcd states;   // columns in the charge basis
  std::vector<int> parities;  // +1 / -1, 0 when not a parity eigenstate
  Eigen::VectorXd residuals;

  int size() const { return static_cast<int>(energies.size()); }
  Vector state(int n) const { return states.col(n); }
};

/// k lowest eigenpairs. With a parity operator, quasi-degenerate clusters
/// are rotated onto parity eigenstates and labeled. Each state is gauged so
/// its largest-magnitude amplitude is real and positive.
SpectralResult lowest_eigenpairs(const OperatorMatrix& h, int k, const OperatorMatrix* parity = nullptr,
                                 const SpectralOptions& options = {});

struct SpectrumSweep {
  std::vector<SpectralResult> points;
  /// (grid index, level) where the overlap with the previous point fell below 0.5.
  std::vector<std::pair<std::size_t, int>> crossings;
};

/// Spectra of a family over an angle grid (computed concurrently), then a
/// sequential pass that makes each state's overlap with its predecessor real
/// and positive.
SpectrumSweep spectrum_vs_angle(const HamiltonianFamily& family, std::span<const double> phi_grid, int k,
                                const SpectralOptions& options = {});

/// Uniform grid of `points` angles over [start, stop] (inclusive).
std::vector<double> angle_grid(double start, double stop, int points);

struct ModeNoise {
  double sin_01 = 0.0;     // |<0|sin x|1>|
  double charge_01 = 0.0;  // |<0|n_x|1>|
  double cos_01 = 0.0;     // |<0|cos x|1>|
  double cos_diag = 0.0;     // |<0|cos x|0> - <1|cos x|1>|
  double charge_diag = 0.0;  // |<0|n_x|0> - <1|n_x|1>|
};

struct NoiseElements {
  ModeNoise theta;
  ModeNoise phi;
};

NoiseElements noise_matrix_elements(const SpectralResult& result, const TwoModeSpace& space);

struct PhaseSpaceState {
  std::vector<double> theta_axis;
  std::vector<double> phi_axis;
  std::vector<cplx> amplitudes;  // row-major, theta index first

  double grid_norm() const;
  cplx at(std::size_t i, std::size_t j) const { return amplitudes[i * phi_axis.size() + j]; }
};

/// psi(theta, varphi) on a uniform periodic grid, normalized on the grid measure.
PhaseSpaceState to_phase_space(const Vector& state, const TwoModeSpace& space, int points);

/// Amplitudes arranged as a (2 n_cut_theta + 1) x (2 n_cut_phi + 1) matrix.
Eigen::MatrixXcd charge_grid(const Vector& state, const TwoModeSpace& space);

struct ModelComparisonPoint {
  double phi = 0.0;
  double splitting_circuit = 0.0;  // omega_1 - omega_0
  double gap_circuit = 0.0;        // omega_2 - omega_0
  double splitting_sin = 0.0;
  double gap_sin = 0.0;
  double splitting_sin_cos = 0.0;
  double gap_sin_cos = 0.0;
  std::array<double, 3> overlap_sin{};      // |<psi_n^cos|psi_n^sin>|, n = 0, 1, 2
  std::array<double, 3> overlap_sin_cos{};  // same against the cos-variant of the sin model
  double doublet_overlap_sin = 0.0;         // subspace overlap of the lowest doublets
  double doublet_overlap_sin_cos = 0.0;
};

struct ModelComparison {
  std::vector<ModelComparisonPoint> points;
  std::vector<SpectralResult> circuit;
  std::vector<SpectralResult> sin_sin;
  std::vector<SpectralResult> sin_sin_cos;
  /// max_k |(omega_k - omega_0)(pi/4) - (omega_k - omega_0)(3 pi/4)| per model.
  double asymmetry_circuit = 0.0;
  double asymmetry_sin = 0.0;
  double asymmetry_sin_cos = 0.0;
};

ModelComparison compare_models(const CircuitParams& params, const TwoModeSpace& space,
                               std::span<const double> phi_grid, int k, const SpectralOptions& options = {});

/// Runs body(i) for i in [0, n) concurrently and rethrows the first exception.
template <typename Body>
void parallel_for(std::size_t n, Body&& body);

}  // namespace cos2q

#include "cos2q/detail/parallel_for.hpp"
