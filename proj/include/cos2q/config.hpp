#pragma once

// Experiment configuration: strict JSON, energies in GHz (E/h), angles as
// multiples of pi. Converted to angular units once, here.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cos2q/hamiltonians.hpp"
#include "cos2q/junction.hpp"

namespace cos2q {

struct CircuitConfig {
  double alpha_ghz = 20.0;
  double beta_ghz = 20.0;
  double zeta_ghz = 20.0;
  double ec_theta_ghz = 0.1;
  double ec_phi_ghz = 0.1;
  double g_ghz = 0.0;
  std::optional<double> alpha_g_ghz;
  double beta_g_ghz = 0.0;
  double epsilon_g_ghz = 0.0;
  double epsilon_theta_ghz = 0.0;
  double epsilon_phi_ghz = 0.0;

  CircuitParams angular() const;
};

struct PhiGridConfig {
  double start_over_pi = 0.0;
  double stop_over_pi = 1.0;
  int points = 33;

  std::vector<double> angles() const;
};

struct SpectrumConfig {
  int levels = 6;
};

struct PotentialConfig {
  int grid_points = 128;
  std::vector<double> phi_over_pi{0.0, 0.125, 0.25, 0.375, 0.5};
  std::vector<std::string> models{"circuit", "beamsplitter", "sinsin"};
};

struct EigenstatesConfig {
  std::vector<double> phi_over_pi{0.0, 0.25, 0.5};
  int levels = 6;
  int grid_points = 64;
  std::string basis = "phase";
  std::string model = "circuit";
};

struct ScheduleConfig {
  double bound_factor = 1e-3;
  int resolution = 129;
  int m_count = 12;
  double rate_ceiling_rad_per_ns = 100.0;
  std::string file;  // read this table instead of optimizing
};

struct GateConfig {
  double tolerance = 1e-2;
  int phase_samples = 129;
  int snapshots = 0;  // evenly spaced trajectory dumps, endpoints included
  int grid_points = 64;
};

struct SweepConfig {
  std::vector<double> zeta_over_ej{0.25, 0.5, 0.75, 1.0};
  std::vector<double> ec_ghz{0.1, 0.4};
  double fidelity_threshold = 0.9995;
};

struct JunctionConfig {
  double gap_ghz = 40.0;
  std::vector<double> transmissions_1{0.9};
  std::vector<double> transmissions_2{0.9};
  double flux_over_pi = 0.0;
  int m_max = 8;
  int n_max = 200;
  std::vector<double> transmission_sweep{0.3, 0.7, 0.95, 1.0};
  int grid_points = 256;
};

struct CompareConfig {
  std::vector<double> dump_phi_over_pi{0.0, 0.25, 0.75, 1.0};
  int levels = 6;
  int grid_points = 64;
};

struct ExperimentConfig {
  CircuitConfig circuit;
  int n_cut = 15;
  PhiGridConfig phi_grid;
  SpectrumConfig spectrum;
  PotentialConfig potential;
  EigenstatesConfig eigenstates;
  ScheduleConfig schedule;
  GateConfig gate;
  SweepConfig sweep;
  JunctionConfig junction;
  CompareConfig compare;
  std::string output_dir;

  void validate() const;
  TwoModeSpace space() const { return circuit_space(circuit.angular(), n_cut); }
};

/// Throws InvalidArgument naming the offending dotted key.
ExperimentConfig parse_config(const nlohmann::json& document);
nlohmann::json to_json(const ExperimentConfig& config);

/// "a.b.c=value"; value parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& document, const std::string& assignment);

nlohmann::json load_config_document(const std::filesystem::path& path);

}  // namespace cos2q
