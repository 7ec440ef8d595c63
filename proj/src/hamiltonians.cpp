#include "cos2q/hamiltonians.hpp"

#include <algorithm>
#include <cmath>

#include "cos2q/error.hpp"
#include "cos2q/kernels.hpp"

namespace cos2q {

namespace {

OperatorMatrix kinetic(const ModeSpec& mode, double charging_energy) {
  const OperatorMatrix n = number_operator(mode);
  SparseMatrix sq = n.entries();
  for (int k = 0; k < sq.nonZeros(); ++k) sq.valuePtr()[k] = 4.0 * charging_energy * sq.valuePtr()[k] * sq.valuePtr()[k];
  return {std::move(sq), true};
}

OperatorMatrix on_theta(const TwoModeSpace& s, const OperatorMatrix& op) {
  return two_mode_embed(op, OperatorMatrix::identity(s.phi.dimension()));
}

OperatorMatrix on_phi(const TwoModeSpace& s, const OperatorMatrix& op) {
  return two_mode_embed(OperatorMatrix::identity(s.theta.dimension()), op);
}

// Static part shared by all models: kinetic energy, sin asymmetries and the
// coupler terms other than the varphi-dependent cos(theta - varphi).
OperatorMatrix static_block(const CircuitParams& p, const TwoModeSpace& s) {
  OperatorMatrix h = on_theta(s, kinetic(s.theta, p.ec_theta)) + on_phi(s, kinetic(s.phi, p.ec_phi));
  if (p.epsilon_theta != 0.0) h += p.epsilon_theta * on_theta(s, harmonic_operator(s.theta, 1, Harmonic::sin));
  if (p.epsilon_phi != 0.0) h += p.epsilon_phi * on_phi(s, harmonic_operator(s.phi, 1, Harmonic::sin));
  if (p.g != 0.0) h += p.g * two_mode_embed(number_operator(s.theta), number_operator(s.phi));
  if (p.beta_g != 0.0) h += p.beta_g * joint_harmonic(s, 2, 2, Harmonic::cos);
  if (p.epsilon_g != 0.0) h += p.epsilon_g * joint_harmonic(s, 1, 1, Harmonic::sin);
  return h;
}

double sec_distance_angle(double phi) {
  return std::min({std::abs(phi), std::abs(pi / 2.0 - phi), std::abs(pi - phi)});
}

}  // namespace

void CircuitParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("circuit alpha and beta must be positive");
  if (!(ec_theta > 0.0) || !(ec_phi > 0.0)) throw InvalidArgument("circuit charging energies must be positive");
  for (double v : {alpha, beta, zeta, ec_theta, ec_phi, g, beta_g, epsilon_g, epsilon_theta, epsilon_phi}) {
    if (!std::isfinite(v)) throw InvalidArgument("circuit energies must be finite");
  }
  if (alpha_g && !std::isfinite(*alpha_g)) throw InvalidArgument("circuit energies must be finite");
}

CircuitParams CircuitParams::from_ghz(double ec_ghz, double ej_ghz, double zeta_ghz) {
  CircuitParams p;
  p.alpha = angular_from_ghz(ej_ghz);
  p.beta = angular_from_ghz(ej_ghz);
  p.zeta = angular_from_ghz(zeta_ghz);
  p.ec_theta = angular_from_ghz(ec_ghz);
  p.ec_phi = angular_from_ghz(ec_ghz);
  return p;
}

TwoModeSpace circuit_space(const CircuitParams& params, int n_cut) {
  TwoModeSpace s;
  s.theta = ModeSpec{n_cut, params.ec_theta, 0.0};
  s.phi = ModeSpec{n_cut, params.ec_phi, 0.0};
  return s;
}

double angle_coefficient(AngleCoefficient kind, double phi) {
  switch (kind) {
    case AngleCoefficient::one: return 1.0;
    case AngleCoefficient::cos_sq: return std::cos(phi) * std::cos(phi);
    case AngleCoefficient::sin_sq: return std::sin(phi) * std::sin(phi);
    case AngleCoefficient::sin_2phi: return std::sin(2.0 * phi);
  }
  return 0.0;
}

double angle_coefficient_derivative(AngleCoefficient kind, double phi) {
  switch (kind) {
    case AngleCoefficient::one: return 0.0;
    case AngleCoefficient::cos_sq: return -std::sin(2.0 * phi);
    case AngleCoefficient::sin_sq: return std::sin(2.0 * phi);
    case AngleCoefficient::sin_2phi: return 2.0 * std::cos(2.0 * phi);
  }
  return 0.0;
}

HamiltonianFamily::HamiltonianFamily(Model model, const CircuitParams& params, const TwoModeSpace& space)
    : model_(model), params_(params), space_(space) {
  params_.validate();
  space_.validate();
  const TwoModeSpace& s = space_;
  const CircuitParams& p = params_;

  const OperatorMatrix double_well_theta = p.beta * on_theta(s, harmonic_operator(s.theta, 2, Harmonic::cos));
  const OperatorMatrix single_well_phi = -p.alpha * on_phi(s, harmonic_operator(s.phi, 1, Harmonic::cos));
  const OperatorMatrix double_well_phi = p.beta * on_phi(s, harmonic_operator(s.phi, 2, Harmonic::cos));

  std::vector<OperatorMatrix> blocks;
  blocks.push_back(static_block(p, s));
  blocks.push_back(double_well_theta + single_well_phi);
  switch (model) {
    case Model::circuit:
      blocks.push_back(-p.alpha * on_theta(s, harmonic_operator(s.theta, 1, Harmonic::cos)) + double_well_phi);
      blocks.push_back(-0.5 * p.zeta * joint_harmonic(s, 1, 1, Harmonic::cos));
      break;
    case Model::sin_sin:
    case Model::sin_sin_cos: {
      const Harmonic single = model == Model::sin_sin ? Harmonic::sin : Harmonic::cos;
      blocks.push_back(-p.alpha * on_theta(s, harmonic_operator(s.theta, 1, single)) + double_well_phi);
      blocks.push_back(-0.5 * p.zeta *
                       two_mode_embed(harmonic_operator(s.theta, 1, Harmonic::sin),
                                      harmonic_operator(s.phi, 1, Harmonic::sin)));
      break;
    }
  }
  kinds_ = {AngleCoefficient::one, AngleCoefficient::cos_sq, AngleCoefficient::sin_sq, AngleCoefficient::sin_2phi};
  affine_ = AffineOperator(blocks);
}

std::vector<double> HamiltonianFamily::coefficients(double phi) const {
  std::vector<double> c;
  c.reserve(kinds_.size());
  for (auto k : kinds_) c.push_back(angle_coefficient(k, phi));
  return c;
}

std::vector<double> HamiltonianFamily::derivative_coefficients(double phi) const {
  std::vector<double> c;
  c.reserve(kinds_.size());
  for (auto k : kinds_) c.push_back(angle_coefficient_derivative(k, phi));
  return c;
}

OperatorMatrix HamiltonianFamily::at(double phi) const { return affine_.assemble(coefficients(phi)); }

OperatorMatrix HamiltonianFamily::derivative(double phi) const {
  return affine_.assemble(derivative_coefficients(phi));
}

OperatorMatrix single_qubit_hamiltonian(const ModeSpec& mode, const SquidCoeffs& coeffs) {
  mode.validate();
  OperatorMatrix h = kinetic(mode, mode.charging_energy);
  h += -coeffs.alpha * harmonic_operator(mode, 1, Harmonic::cos);
  h += coeffs.beta * harmonic_operator(mode, 2, Harmonic::cos);
  if (coeffs.epsilon != 0.0) h += coeffs.epsilon * harmonic_operator(mode, 1, Harmonic::sin);
  return h;
}

OperatorMatrix circuit_hamiltonian(double phi, const CircuitParams& params, const TwoModeSpace& space) {
  return HamiltonianFamily(Model::circuit, params, space).at(phi);
}

OperatorMatrix ideal_sin_sin_hamiltonian(double phi, const CircuitParams& params, const TwoModeSpace& space,
                                         bool cos_variant) {
  return HamiltonianFamily(cos_variant ? Model::sin_sin_cos : Model::sin_sin, params, space).at(phi);
}

OperatorMatrix coupler_hamiltonian(const CircuitParams& p, const TwoModeSpace& s) {
  s.validate();
  OperatorMatrix h = OperatorMatrix::zero(s.dimension());
  if (p.g != 0.0) h += p.g * two_mode_embed(number_operator(s.theta), number_operator(s.phi));
  const double alpha_g = p.alpha_g.value_or(p.zeta);
  if (alpha_g != 0.0) h += -alpha_g * joint_harmonic(s, 1, 1, Harmonic::cos);
  if (p.beta_g != 0.0) h += p.beta_g * joint_harmonic(s, 2, 2, Harmonic::cos);
  if (p.epsilon_g != 0.0) h += p.epsilon_g * joint_harmonic(s, 1, 1, Harmonic::sin);
  return h;
}

OperatorMatrix dH_dphi(double phi, const CircuitParams& params, const TwoModeSpace& space) {
  return HamiltonianFamily(Model::circuit, params, space).derivative(phi);
}

double well_distance(double phi) { return pi * std::abs(1.0 / std::cos(sec_distance_angle(phi))); }

std::pair<double, double> low_energy_corrections(double phi, const CircuitParams& p) {
  const double d = well_distance(phi);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double base = p.zeta * std::sin(2.0 * phi) / 2.0;
  const double r = base / p.beta * std::pow(d / two_pi, 2) * (c - s) * (c - s);
  const double sc = base / p.alpha * std::pow(pi / d, 2) * (c + s) * (c + s);
  return {r, sc};
}

OperatorMatrix low_energy_hamiltonian(double phi, const CircuitParams& p, const TwoModeSpace& s, bool corrected) {
  p.validate();
  s.validate();
  const double d = well_distance(phi);
  const auto [r, sc] = corrected ? low_energy_corrections(phi, p) : std::pair<double, double>{0.0, 0.0};
  const double scale_theta = (pi / d) * (pi / d);
  const double scale_phi = (d / pi) * (d / pi);
  OperatorMatrix h = on_theta(s, kinetic(s.theta, p.ec_theta * scale_theta));
  h += p.beta * (1.0 - r) * on_theta(s, harmonic_operator(s.theta, 2, Harmonic::cos));
  h += on_phi(s, kinetic(s.phi, p.ec_phi * scale_phi));
  h += -p.alpha * (1.0 + sc) * on_phi(s, harmonic_operator(s.phi, 1, Harmonic::cos));
  return h;
}

std::array<PhasePoint, 2> minima_locations(double phi) {
  PhasePoint p;
  if (phi <= pi / 4.0) {
    p = {pi / 2.0, pi * std::tan(phi) / 2.0};
  } else if (phi < 3.0 * pi / 4.0) {
    p = {pi * std::cos(phi) / std::sin(phi) / 2.0, pi / 2.0};
  } else {
    p = {-pi / 2.0, -pi * std::tan(phi) / 2.0};
  }
  return {p, PhasePoint{-p.theta, -p.varphi}};
}

double classical_potential(PotentialModel model, double phi, const CircuitParams& p, double theta, double varphi) {
  const double c2 = std::cos(phi) * std::cos(phi);
  const double s2 = std::sin(phi) * std::sin(phi);
  const double s2p = std::sin(2.0 * phi);
  switch (model) {
    case PotentialModel::beamsplitter: {
      const double rotated_theta = std::cos(phi) * theta + std::sin(phi) * varphi;
      const double rotated_phi = std::cos(phi) * varphi - std::sin(phi) * theta;
      return p.beta * std::cos(2.0 * rotated_theta) - p.alpha * std::cos(rotated_phi);
    }
    case PotentialModel::sin_sin:
    case PotentialModel::sin_sin_cos: {
      const double single = model == PotentialModel::sin_sin ? std::sin(theta) : std::cos(theta);
      return p.beta * c2 * std::cos(2.0 * theta) - p.alpha * c2 * std::cos(varphi) + p.beta * s2 * std::cos(2.0 * varphi) -
             p.alpha * s2 * single - 0.5 * p.zeta * s2p * std::sin(theta) * std::sin(varphi);
    }
    case PotentialModel::circuit:
      return p.beta * c2 * std::cos(2.0 * theta) - p.alpha * s2 * std::cos(theta) - p.alpha * c2 * std::cos(varphi) +
             p.beta * s2 * std::cos(2.0 * varphi) - 0.5 * p.zeta * s2p * std::cos(theta - varphi) +
             p.epsilon_theta * std::sin(theta) + p.epsilon_phi * std::sin(varphi) +
             p.beta_g * std::cos(2.0 * theta - 2.0 * varphi) + p.epsilon_g * std::sin(theta - varphi);
    case PotentialModel::low_energy:
    case PotentialModel::low_energy_corrected: {
      const double d = well_distance(phi);
      const auto [r, sc] = model == PotentialModel::low_energy_corrected ? low_energy_corrections(phi, p)
                                                                         : std::pair<double, double>{0.0, 0.0};
      const double radial = std::cos(phi) * theta + std::sin(phi) * varphi;
      const double perpendicular = std::cos(phi) * varphi - std::sin(phi) * theta;
      return p.beta * (1.0 - r) * std::cos(two_pi * radial / d) - p.alpha * (1.0 + sc) * std::cos(d * perpendicular / pi);
    }
  }
  return 0.0;
}

std::vector<double> periodic_axis(int points) {
  if (points < 2) throw InvalidArgument("grid needs at least two points per axis");
  std::vector<double> axis(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) axis[static_cast<std::size_t>(i)] = -pi + two_pi * i / points;
  return axis;
}

PotentialGrid potential_grid(PotentialModel model, double phi, const CircuitParams& params, int points) {
  PotentialGrid grid;
  grid.theta_axis = periodic_axis(points);
  grid.phi_axis = grid.theta_axis;
  grid.values.resize(grid.theta_axis.size() * grid.phi_axis.size());
  kernels::evaluate_grid([&](double t, double v) { return classical_potential(model, phi, params, t, v); },
                         grid.theta_axis, grid.phi_axis, grid.values);
  return grid;
}

PotentialGrid rotated_potential_grid(double phi, const CircuitParams& params, int points) {
  return potential_grid(PotentialModel::beamsplitter, phi, params, points);
}

std::vector<PhasePoint> grid_argmin(const PotentialGrid& grid, double slack) {
  const double lowest = *std::min_element(grid.values.begin(), grid.values.end());
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.phi_axis.size(); ++j) {
      if (grid.at(i, j) <= lowest + slack) out.push_back({grid.theta_axis[i], grid.phi_axis[j]});
    }
  }
  return out;
}

}  // namespace cos2q
