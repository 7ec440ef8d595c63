#pragma once

// Time-dependent Schroedinger integration and gate fidelity.

#include <functional>
#include <span>
#include <vector>

#include "cos2q/adiabatic.hpp"
#include "cos2q/affine_operator.hpp"

namespace cos2q {

/// Fills the block coefficients of an AffineOperator at time t.
using CoefficientFunction = std::function<void(double t, std::vector<double>& coefficients)>;

struct KrylovOptions {
  int max_dimension = 40;
  double tolerance = 1e-13;  // a-posteriori error per application (propagate loosens it to fit the step budget)
};

/// exp(-i tau H) v by Lanczos, sub-stepping when the Krylov space is too small.
Vector krylov_expmv(const SparseMatrix& h, const Vector& v, double tau, const KrylovOptions& options = {});

struct PropagationOptions {
  double tolerance = 1e-2;        // step-doubling error budget per unit of the time span; a bound, realized errors are far smaller
  double initial_step = 0.0;      // ns; 0 picks 1/100 of the span
  double min_step = 1e-10;        // ns
  double norm_tolerance = 1e-8;   // allowed accumulated |norm - 1| removed by per-step renormalization
  KrylovOptions krylov;
  std::vector<double> snapshot_times;  // hit exactly
};

struct Snapshot {
  double time = 0.0;
  Vector state;
};

struct Propagation {
  Vector state;
  std::vector<Snapshot> snapshots;
  int accepted_steps = 0;
  int rejected_steps = 0;
  double norm_drift = 0.0;  // sum over steps of |norm - 1| before renormalization
};

/// Fourth-order commutator-free Magnus integration of i d/dt psi = H(t) psi
/// with H(t) = sum_b c_b(t) B_b, adaptive by step doubling.
Propagation propagate(const AffineOperator& h, const CoefficientFunction& coefficients, double t0, double t1,
                      const Vector& initial, const PropagationOptions& options = {});

/// H(phi(t)) along a schedule.
Propagation propagate(const HamiltonianFamily& family, const ControlSchedule& schedule, const Vector& initial,
                      const PropagationOptions& options = {});

struct GateOptions {
  PropagationOptions propagation;
  SpectralOptions spectral;
  int phase_samples = 129;  // odd; Simpson samples of the doublet energies along the schedule
};

struct GateSnapshot {
  double time = 0.0;
  double phi = 0.0;
  Vector even;  // evolved |0_L>
  Vector odd;   // evolved |1_L>
};

struct GateResult {
  Eigen::Matrix2cd projected_propagator;  // logical frame, global phase removed
  Eigen::Matrix2cd raw_propagator;        // lab frame, global phase removed
  double fidelity = 0.0;                  // against Z, logical frame
  double fidelity_raw = 0.0;              // against Z, lab frame
  double leakage = 0.0;
  double gate_time = 0.0;
  double dynamical_phase = 0.0;  // integral of omega_odd - omega_even
  double basis_overlap = 0.0;    // doublet subspace overlap between the initial and final logical bases
  std::vector<GateSnapshot> trajectory;
  int accepted_steps = 0;
  int rejected_steps = 0;
  double norm_drift = 0.0;
};

/// Propagates the parity-labeled doublet {even, odd} of H(phi(0)), projects
/// onto the doublet of H(phi(T)) and compares with Z. The logical frame
/// removes the dynamical phases integral omega_even dt and integral omega_odd dt.
GateResult logical_propagator(const HamiltonianFamily& family, const ControlSchedule& schedule,
                              const GateOptions& options = {}, std::span<const double> snapshot_times = {});

/// [Tr(M^dagger M) + |Tr(U^dagger M)|^2] / (d (d + 1))
double average_gate_fidelity(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& target);

/// Multiplies by a phase making M(0, 0) real and non-negative.
Eigen::MatrixXcd remove_global_phase(const Eigen::MatrixXcd& m);

}  // namespace cos2q
