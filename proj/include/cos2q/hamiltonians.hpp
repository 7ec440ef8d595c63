#pragma once

// Two-mode gate Hamiltonians in the charge basis, their classical potential
// surfaces, and the geometry of the rotating double well.
//
// All energies are angular frequencies (rad/ns). The rotation angle varphi
// ("phi" in function names) runs over [0, pi]; the second phase coordinate
// is called varphi in comments to keep the two apart.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "cos2q/affine_operator.hpp"
#include "cos2q/charge_basis.hpp"
#include "cos2q/junction.hpp"

namespace cos2q {

struct CircuitParams {
  double alpha = 0.0;
  double beta = 0.0;
  double zeta = 0.0;
  double ec_theta = 0.0;
  double ec_phi = 0.0;
  // Coupler terms of the full circuit (zero reproduces the reduced model).
  double g = 0.0;
  std::optional<double> alpha_g;  // static coupler amplitude; defaults to zeta
  double beta_g = 0.0;
  double epsilon_g = 0.0;
  double epsilon_theta = 0.0;
  double epsilon_phi = 0.0;

  void validate() const;

  /// alpha = beta = e_j, identical charging energies; inputs in GHz.
  static CircuitParams from_ghz(double ec_ghz, double ej_ghz, double zeta_ghz);
};

/// Mode pair whose charging energies match `params`, cutoff n_cut each.
TwoModeSpace circuit_space(const CircuitParams& params, int n_cut = 15);

enum class Model {
  circuit,      // cos(theta - varphi) coupler
  sin_sin,      // ideal sin(theta) sin(varphi) coupling, verbatim single-well term -alpha sin^2 sin(theta)
  sin_sin_cos,  // same, with the single-well term -alpha sin^2 cos(theta)
};

enum class AngleCoefficient { one, cos_sq, sin_sq, sin_2phi };

double angle_coefficient(AngleCoefficient kind, double phi);
double angle_coefficient_derivative(AngleCoefficient kind, double phi);

/// H(phi) = sum_b f_b(phi) B_b with fixed blocks B_b. Evaluating at a new
/// angle only recombines values on a shared sparsity pattern.
class HamiltonianFamily {
 public:
  HamiltonianFamily(Model model, const CircuitParams& params, const TwoModeSpace& space);

  OperatorMatrix at(double phi) const;
  OperatorMatrix derivative(double phi) const;
  std::vector<double> coefficients(double phi) const;
  std::vector<double> derivative_coefficients(double phi) const;

  const AffineOperator& affine() const { return affine_; }
  const TwoModeSpace& space() const { return space_; }
  const CircuitParams& params() const { return params_; }
  Model model() const { return model_; }

 private:
  Model model_;
  CircuitParams params_;
  TwoModeSpace space_;
  std::vector<AngleCoefficient> kinds_;
  AffineOperator affine_;
};

/// 4 E_C n^2 - alpha cos(theta) + beta cos(2 theta) + epsilon sin(theta)
OperatorMatrix single_qubit_hamiltonian(const ModeSpec& mode, const SquidCoeffs& coeffs);

OperatorMatrix circuit_hamiltonian(double phi, const CircuitParams& params, const TwoModeSpace& space);

OperatorMatrix ideal_sin_sin_hamiltonian(double phi, const CircuitParams& params, const TwoModeSpace& space,
                                         bool cos_variant = false);

/// g n_theta n_phi - alpha_g cos(theta - varphi) + beta_g cos(2 theta - 2 varphi) + epsilon_g sin(theta - varphi)
OperatorMatrix coupler_hamiltonian(const CircuitParams& params, const TwoModeSpace& space);

/// dH/dphi of circuit_hamiltonian.
OperatorMatrix dH_dphi(double phi, const CircuitParams& params, const TwoModeSpace& space);

/// Instantaneous distance between the two global minima, pi |sec(min(phi, |pi/2 - phi|, |pi - phi|))|.
double well_distance(double phi);

/// Squeezing corrections r(phi), s(phi) of the low-energy model.
std::pair<double, double> low_energy_corrections(double phi, const CircuitParams& params);

/// Low-energy model on 2 pi-periodic rotated coordinates Theta' = pi Theta / d,
/// Phi' = d Phi / pi (mode order Theta', Phi'):
///   4 E_C (pi/d)^2 n^2 + beta (1 - r) cos(2 Theta') + 4 E_C (d/pi)^2 n^2 - alpha (1 + s) cos(Phi')
/// with r = s = 0 when `corrected` is false.
OperatorMatrix low_energy_hamiltonian(double phi, const CircuitParams& params, const TwoModeSpace& space,
                                      bool corrected);

struct PhasePoint {
  double theta = 0.0;
  double varphi = 0.0;
};

/// Approximate global minima (the two points are +-p).
std::array<PhasePoint, 2> minima_locations(double phi);

enum class PotentialModel { beamsplitter, sin_sin, sin_sin_cos, circuit, low_energy, low_energy_corrected };

double classical_potential(PotentialModel model, double phi, const CircuitParams& params, double theta,
                           double varphi);

struct PotentialGrid {
  std::vector<double> theta_axis;
  std::vector<double> phi_axis;
  std::vector<double> values;  // row-major, theta index first

  double at(std::size_t i, std::size_t j) const { return values[i * phi_axis.size() + j]; }
};

/// Uniform axis of `points` samples over [-pi, pi).
std::vector<double> periodic_axis(int points);

PotentialGrid potential_grid(PotentialModel model, double phi, const CircuitParams& params, int points);

/// Ideal beamsplitter-rotated potential.
PotentialGrid rotated_potential_grid(double phi, const CircuitParams& params, int points);

/// Grid points attaining the global minimum within `slack` (absolute).
std::vector<PhasePoint> grid_argmin(const PotentialGrid& grid, double slack = 1e-12);

}  // namespace cos2q
