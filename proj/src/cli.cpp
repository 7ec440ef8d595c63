#include "cos2q/cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "cos2q/adiabatic.hpp"
#include "cos2q/config.hpp"
#include "cos2q/error.hpp"
#include "cos2q/evolution.hpp"
#include "cos2q/output.hpp"
#include "cos2q/spectral.hpp"

namespace cos2q {

using nlohmann::json;

namespace {

struct Context {
  ExperimentConfig config;
  OutputDirectory& out;
  bool verbose = false;
  std::ostream& log;

  void note(const std::string& message) const {
    if (verbose) log << "[cos2q] " << message << std::endl;
  }
};

double ghz(double omega) { return ghz_from_angular(omega); }

std::string tag(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> angles_over_pi(const std::vector<double>& fractions) {
  std::vector<double> out;
  for (double f : fractions) out.push_back(f == 1.0 ? pi : f * pi);
  return out;
}

std::vector<double> charge_axis(int n_cut) {
  std::vector<double> axis;
  for (int n = -n_cut; n <= n_cut; ++n) axis.push_back(n);
  return axis;
}

void write_state(Context& ctx, const std::string& stem, const Vector& state, const TwoModeSpace& space,
                 const std::string& basis, int grid_points) {
  std::vector<double> density, real;
  if (basis == "phase") {
    const PhaseSpaceState ps = to_phase_space(state, space, grid_points);
    for (const cplx& a : ps.amplitudes) {
      density.push_back(std::norm(a));
      real.push_back(a.real());
    }
    ctx.out.write_grid(stem + "_density.csv", ps.theta_axis, ps.phi_axis, density, "probability_density");
    ctx.out.write_grid(stem + "_real.csv", ps.theta_axis, ps.phi_axis, real, "real_amplitude");
  } else {
    const Eigen::MatrixXcd c = charge_grid(state, space);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        density.push_back(std::norm(c(i, j)));
        real.push_back(c(i, j).real());
      }
    }
    const auto nt = charge_axis(space.theta.n_cut);
    const auto np = charge_axis(space.phi.n_cut);
    ctx.out.write_grid(stem + "_density.csv", nt, np, density, "charge_probability");
    ctx.out.write_grid(stem + "_real.csv", nt, np, real, "real_amplitude");
  }
}

PotentialModel potential_model(const std::string& name) {
  static const std::map<std::string, PotentialModel> table{
      {"circuit", PotentialModel::circuit},
      {"beamsplitter", PotentialModel::beamsplitter},
      {"sinsin", PotentialModel::sin_sin},
      {"sinsin-cos", PotentialModel::sin_sin_cos},
      {"lowenergy", PotentialModel::low_energy},
      {"lowenergy-corrected", PotentialModel::low_energy_corrected}};
  return table.at(name);
}

OperatorMatrix model_hamiltonian(const std::string& model, double phi, const CircuitParams& p,
                                 const TwoModeSpace& space) {
  if (model == "circuit") return circuit_hamiltonian(phi, p, space);
  if (model == "sinsin") return ideal_sin_sin_hamiltonian(phi, p, space, false);
  if (model == "sinsin-cos") return ideal_sin_sin_hamiltonian(phi, p, space, true);
  if (model == "lowenergy") return low_energy_hamiltonian(phi, p, space, false);
  if (model == "lowenergy-corrected") return low_energy_hamiltonian(phi, p, space, true);
  throw InvalidArgument("unknown model '" + model + "'");
}

ScheduleOptions schedule_options(const ExperimentConfig& c) {
  ScheduleOptions o;
  o.bound_factor = c.schedule.bound_factor;
  o.resolution = c.schedule.resolution;
  o.m_count = c.schedule.m_count;
  o.rate_ceiling = c.schedule.rate_ceiling_rad_per_ns;
  return o;
}

GateOptions gate_options(const ExperimentConfig& c) {
  GateOptions o;
  o.propagation.tolerance = c.gate.tolerance;
  o.phase_samples = c.gate.phase_samples;
  return o;
}

std::vector<std::string> schedule_comments(const OutputDirectory& out) {
  std::vector<std::string> lines;
  for (const std::string& h : out.header_lines()) lines.push_back(h.substr(2));
  return lines;
}

void write_schedule_files(Context& ctx, const ControlSchedule& schedule) {
  const auto comments = schedule_comments(ctx.out);
  ctx.out.write_text("schedule.csv", [&](std::ostream& s) { write_schedule(s, schedule, comments); }, false);
  CsvTable samples;
  samples.columns = {"time_ns", "phi_rad", "phi_rate_rad_per_ns"};
  const int n = 401;
  for (int i = 0; i < n; ++i) {
    const double t = i == n - 1 ? schedule.total_time() : schedule.total_time() * i / (n - 1);
    samples.add_row({t, schedule.angle(t), schedule.rate(t)});
  }
  ctx.out.write_csv("schedule_samples.csv", samples);
}

ControlSchedule load_or_optimize(Context& ctx, const HamiltonianFamily& family, json* info) {
  const ExperimentConfig& c = ctx.config;
  if (!c.schedule.file.empty()) {
    std::ifstream in(c.schedule.file);
    if (!in) throw InvalidArgument("cannot open schedule file '" + c.schedule.file + "'");
    ControlSchedule s = read_schedule(in);
    if (!s.is_full_rotation()) throw InvalidArgument("schedule file must run phi from 0 to pi");
    if (info) (*info)["schedule_source"] = "file";
    return s;
  }
  ctx.note("optimizing schedule");
  const OptimizedSchedule opt = optimize_schedule(family, schedule_options(c));
  if (info) (*info)["schedule_source"] = "optimized";
  return opt.schedule;
}

void run_potential(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const CircuitParams p = c.circuit.angular();
  json index = json::array();
  for (std::size_t i = 0; i < c.potential.phi_over_pi.size(); ++i) {
    const double phi = angles_over_pi(c.potential.phi_over_pi)[i];
    for (const std::string& model : c.potential.models) {
      const PotentialGrid grid = potential_grid(potential_model(model), phi, p, c.potential.grid_points);
      std::vector<double> values;
      for (double v : grid.values) values.push_back(ghz(v));
      const std::string name = "potential_" + model + "_phi" + tag(i) + ".csv";
      ctx.out.write_grid(name, grid.theta_axis, grid.phi_axis, values, "potential_ghz");
      json minima = json::array();
      for (const PhasePoint& m : grid_argmin(grid, 1e-9 * std::abs(*std::max_element(grid.values.begin(),
                                                                                         grid.values.end())))) {
        minima.push_back({m.theta, m.varphi});
      }
      index.push_back({{"file", name}, {"model", model}, {"phi_rad", phi}, {"grid_minima", minima}});
    }
    const auto predicted = minima_locations(phi);
    index.push_back({{"phi_rad", phi},
                     {"predicted_minima", {{predicted[0].theta, predicted[0].varphi},
                                           {predicted[1].theta, predicted[1].varphi}}},
                     {"well_distance_rad", well_distance(phi)}});
  }
  ctx.out.write_json("potential.json", {{"grids", index}});
}

void run_spectrum(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HamiltonianFamily family(Model::circuit, c.circuit.angular(), c.space());
  const std::vector<double> grid = c.phi_grid.angles();
  const int k = c.spectrum.levels;
  ctx.note("diagonalizing at " + std::to_string(grid.size()) + " angles");
  const SpectrumSweep sweep = spectrum_vs_angle(family, grid, k);

  CsvTable table;
  table.columns = {"phi", "phi_over_pi"};
  for (int n = 0; n < k; ++n) table.columns.push_back("omega_" + std::to_string(n));
  table.columns.push_back("omega_01");
  for (int n = 0; n < k; ++n) table.columns.push_back("parity_" + std::to_string(n));
  table.notes = {"omega columns are E/h in GHz; omega_01 = omega_1 - omega_0"};
  double worst_residual = 0.0;
  double worst_ratio = 0.0;
  for (const SpectralResult& r : sweep.points) {
    std::vector<std::string> row{format_number(r.phi), format_number(r.phi / pi)};
    for (int n = 0; n < k; ++n) row.push_back(format_number(ghz(r.energies(n))));
    row.push_back(format_number(ghz(r.energies(1) - r.energies(0))));
    for (int n = 0; n < k; ++n) row.push_back(std::to_string(r.parities[n]));
    table.add_row(std::move(row));
    worst_residual = std::max(worst_residual, r.residuals.maxCoeff());
    if (k >= 3) worst_ratio = std::max(worst_ratio, (r.energies(1) - r.energies(0)) / (r.energies(2) - r.energies(0)));
  }
  ctx.out.write_csv("spectrum.csv", table);

  json crossings = json::array();
  for (const auto& [i, n] : sweep.crossings) crossings.push_back({{"phi_rad", grid[i]}, {"level", n}});
  json summary{{"levels", k}, {"points", grid.size()}, {"max_residual_ghz", ghz(worst_residual)},
               {"crossings", crossings}};
  if (k >= 3) summary["max_doublet_ratio"] = worst_ratio;
  ctx.out.write_json("spectrum.json", summary);
}

void run_eigenstates(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const CircuitParams p = c.circuit.angular();
  const TwoModeSpace space = c.space();
  const OperatorMatrix parity = parity_operator(space);
  const std::string& model = c.eigenstates.model;
  json index = json::array();
  const auto angles = angles_over_pi(c.eigenstates.phi_over_pi);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    ctx.note("eigenstates at phi index " + std::to_string(i));
    const SpectralResult r = lowest_eigenpairs(model_hamiltonian(model, angles[i], p, space), c.eigenstates.levels,
                                               &parity);
    json levels = json::array();
    for (int n = 0; n < r.size(); ++n) {
      const std::string stem = "eigenstate_" + model + "_phi" + tag(i) + "_n" + std::to_string(n);
      write_state(ctx, stem, r.state(n), space, c.eigenstates.basis, c.eigenstates.grid_points);
      levels.push_back({{"level", n},
                        {"omega_ghz", ghz(r.energies(n))},
                        {"parity", r.parities[n]},
                        {"residual_ghz", ghz(r.residuals(n))},
                        {"files", {stem + "_density.csv", stem + "_real.csv"}}});
    }
    index.push_back({{"phi_rad", angles[i]}, {"well_distance_rad", well_distance(angles[i])}, {"levels", levels}});
  }
  json payload{{"model", model}, {"basis", c.eigenstates.basis}, {"states", index}};
  if (model.rfind("lowenergy", 0) == 0) payload["coordinates"] = "rotated (Theta', Phi')";
  ctx.out.write_json("eigenstates.json", payload);
}

void run_matrix_elements(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const TwoModeSpace space = c.space();
  const HamiltonianFamily family(Model::circuit, c.circuit.angular(), space);
  const std::vector<double> grid = c.phi_grid.angles();
  const SpectrumSweep sweep = spectrum_vs_angle(family, grid, std::max(4, c.spectrum.levels));
  CsvTable table;
  table.columns = {"phi", "phi_over_pi"};
  for (const char* mode : {"theta", "phi"}) {
    for (const char* q : {"sin_01", "charge_01", "cos_01", "cos_diag", "charge_diag"}) {
      table.columns.push_back(std::string(mode) + "_" + q);
    }
  }
  table.notes = {"absolute values; diag columns are |<0|O|0> - <1|O|1>|"};
  double worst_charge = 0.0;
  double worst_cos = 0.0;
  for (const SpectralResult& r : sweep.points) {
    const NoiseElements e = noise_matrix_elements(r, space);
    std::vector<double> row{r.phi, r.phi / pi};
    for (const ModeNoise* m : {&e.theta, &e.phi}) {
      row.insert(row.end(), {m->sin_01, m->charge_01, m->cos_01, m->cos_diag, m->charge_diag});
      worst_charge = std::max({worst_charge, m->charge_01, m->charge_diag});
      worst_cos = std::max({worst_cos, m->cos_01, m->cos_diag});
    }
    table.add_row(row);
  }
  ctx.out.write_csv("matrix_elements.csv", table);
  ctx.out.write_json("matrix_elements.json", {{"max_charge_element", worst_charge}, {"max_cos_element", worst_cos}});
}

void run_schedule(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HamiltonianFamily family(Model::circuit, c.circuit.angular(), c.space());
  ctx.note("optimizing schedule over " + std::to_string(c.schedule.resolution) + " angles");
  const OptimizedSchedule opt = optimize_schedule(family, schedule_options(c));
  write_schedule_files(ctx, opt.schedule);
  CsvTable profile;
  profile.columns = {"phi", "local_rate_rad_per_ns", "limiting_level", "doublet_numerator_ghz",
                     "derivative_norm_ghz"};
  for (std::size_t i = 0; i < opt.phi.size(); ++i) {
    profile.add_row({format_number(opt.phi[i]), format_number(opt.local_rate[i]),
                     std::to_string(opt.limiting_level[i]), format_number(ghz(opt.doublet_numerator[i])),
                     format_number(ghz(opt.derivative_norm[i]))});
  }
  ctx.out.write_csv("schedule_profile.csv", profile);
  ctx.out.write_json("schedule.json", {{"gate_time_ns", opt.total_time},
                                       {"gate_time_times_ej", opt.total_time * c.circuit.alpha_ghz},
                                       {"nodes", opt.schedule.times().size()},
                                       {"interpolation", ControlSchedule::interpolation_name}});
}

json gate_payload(const GateResult& g, const ExperimentConfig& c) {
  return {{"gate_time_ns", g.gate_time},
          {"gate_time_times_ej", g.gate_time * c.circuit.alpha_ghz},
          {"fidelity", g.fidelity},
          {"fidelity_raw", g.fidelity_raw},
          {"leakage", g.leakage},
          {"dynamical_phase_rad", g.dynamical_phase},
          {"basis_overlap", g.basis_overlap},
          {"propagator", complex_matrix(g.projected_propagator)},
          {"propagator_raw", complex_matrix(g.raw_propagator)},
          {"accepted_steps", g.accepted_steps},
          {"rejected_steps", g.rejected_steps},
          {"norm_drift", g.norm_drift}};
}

void run_gate(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const TwoModeSpace space = c.space();
  const HamiltonianFamily family(Model::circuit, c.circuit.angular(), space);
  json info;
  const ControlSchedule schedule = load_or_optimize(ctx, family, &info);
  write_schedule_files(ctx, schedule);
  std::vector<double> stops;
  for (int i = 0; i < c.gate.snapshots; ++i) {
    stops.push_back(i == c.gate.snapshots - 1 ? schedule.total_time()
                                              : schedule.total_time() * i / (c.gate.snapshots - 1));
  }
  ctx.note("propagating over " + format_number(schedule.total_time()) + " ns");
  const GateResult g = logical_propagator(family, schedule, gate_options(c), stops);

  CsvTable traj;
  traj.columns = {"snapshot", "time_ns", "phi_rad", "even_file", "odd_file"};
  for (std::size_t i = 0; i < g.trajectory.size(); ++i) {
    const GateSnapshot& s = g.trajectory[i];
    const std::string stem = "gate_snapshot_" + tag(i);
    for (auto [state, label] : {std::pair{&s.even, "even"}, {&s.odd, "odd"}}) {
      const PhaseSpaceState ps = to_phase_space(*state, space, c.gate.grid_points);
      std::vector<double> density;
      for (const cplx& a : ps.amplitudes) density.push_back(std::norm(a));
      ctx.out.write_grid(stem + "_" + label + ".csv", ps.theta_axis, ps.phi_axis, density, "probability_density");
    }
    traj.add_row({std::to_string(i), format_number(s.time), format_number(s.phi), stem + "_even.csv",
                  stem + "_odd.csv"});
  }
  if (!g.trajectory.empty()) ctx.out.write_csv("gate_trajectory.csv", traj);
  json payload = gate_payload(g, c);
  payload.update(info);
  ctx.out.write_json("gate.json", payload);
}

void run_sweep(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  CsvTable table;
  table.columns = {"ec_ghz",   "zeta_over_ej", "zeta_ghz",     "gate_time_ns", "gate_time_times_ej",
                   "fidelity", "fidelity_raw", "leakage",      "above_threshold"};
  json curves = json::array();
  bool all_above = true;
  for (double ec : c.sweep.ec_ghz) {
    json points = json::array();
    std::vector<double> times;
    for (double ratio : c.sweep.zeta_over_ej) {
      CircuitConfig cc = c.circuit;
      cc.ec_theta_ghz = ec;
      cc.ec_phi_ghz = ec;
      cc.zeta_ghz = ratio * c.circuit.alpha_ghz;
      const CircuitParams p = cc.angular();
      const HamiltonianFamily family(Model::circuit, p, circuit_space(p, c.n_cut));
      ctx.note("sweep point ec=" + format_number(ec) + " zeta/ej=" + format_number(ratio));
      const OptimizedSchedule opt = optimize_schedule(family, schedule_options(c));
      const GateResult g = logical_propagator(family, opt.schedule, gate_options(c));
      const bool above = g.fidelity >= c.sweep.fidelity_threshold;
      all_above = all_above && above;
      times.push_back(g.gate_time);
      table.add_row({format_number(ec), format_number(ratio), format_number(cc.zeta_ghz), format_number(g.gate_time),
                     format_number(g.gate_time * c.circuit.alpha_ghz), format_number(g.fidelity),
                     format_number(g.fidelity_raw), format_number(g.leakage), above ? "1" : "0"});
      points.push_back({{"zeta_over_ej", ratio}, {"gate_time_ns", g.gate_time}, {"fidelity", g.fidelity}});
    }
    bool non_increasing = true;
    for (std::size_t i = 1; i < times.size(); ++i) non_increasing = non_increasing && times[i] <= times[i - 1];
    curves.push_back({{"ec_ghz", ec}, {"gate_time_non_increasing", non_increasing}, {"points", points}});
  }
  ctx.out.write_csv("sweep_zeta.csv", table);
  ctx.out.write_json("sweep_zeta.json", {{"curves", curves}, {"all_above_threshold", all_above}});
}

void run_junction(Context& ctx) {
  const JunctionConfig& j = ctx.config.junction;
  JunctionSpec first{j.gap_ghz, j.transmissions_1, j.m_max, j.n_max};
  JunctionSpec second{j.gap_ghz, j.transmissions_2, j.m_max, j.n_max};
  const HarmonicAmplitudes a1 = harmonic_amplitudes(first);
  const HarmonicAmplitudes a2 = harmonic_amplitudes(second);
  const double flux = j.flux_over_pi * pi;
  const SquidCoeffs squid = squid_coeffs(a1, a2, flux);

  CsvTable harmonics;
  harmonics.columns = {"m", "e_jm_1_ghz", "e_jm_2_ghz"};
  for (int m = 1; m <= j.m_max; ++m) {
    harmonics.add_row({std::to_string(m), format_number(a1[m]), format_number(a2[m])});
  }
  ctx.out.write_csv("junction_harmonics.csv", harmonics);

  CsvTable sweep;
  sweep.columns = {"transmission", "m", "e_jm_over_gap", "method"};
  CsvTable potential;
  potential.columns = {"theta"};
  std::vector<SquidCoeffs> sweep_coeffs;
  json sweep_info = json::array();
  for (double t : j.transmission_sweep) {
    JunctionSpec single{1.0, {t}, j.m_max, j.n_max};
    const HarmonicAmplitudes a = harmonic_amplitudes(single);
    for (int m = 1; m <= j.m_max; ++m) {
      sweep.add_row({format_number(t), std::to_string(m), format_number(a[m]),
                     a.method == AmplitudeMethod::series ? "series" : "quadrature"});
    }
    // identical pair at the configured flux, in units of the gap
    const SquidCoeffs sc = squid_coeffs(a, a, flux);
    sweep_coeffs.push_back(sc);
    potential.columns.push_back("u_t" + format_number(t));
    sweep_info.push_back({{"transmission", t},
                          {"e_j2_over_e_j1", a[2] / a[1]},
                          {"squid_alpha_over_gap", sc.alpha},
                          {"squid_beta_over_gap", sc.beta},
                          {"squid_epsilon_over_gap", sc.epsilon},
                          {"potential_minima", count_potential_minima(sc)},
                          {"series_converged", a.series_converged}});
  }
  potential.notes = {"u columns: -alpha cos(theta) + beta cos(2 theta) + epsilon sin(theta) over the gap, "
                     "identical single-channel pair at flux_over_pi"};
  for (int i = 0; i < j.grid_points; ++i) {
    const double theta = -pi + two_pi * i / j.grid_points;
    std::vector<double> row{theta};
    for (const SquidCoeffs& sc : sweep_coeffs) {
      row.push_back(-sc.alpha * std::cos(theta) + sc.beta * std::cos(2.0 * theta) + sc.epsilon * std::sin(theta));
    }
    potential.add_row(row);
  }
  ctx.out.write_csv("junction_transmission_sweep.csv", sweep);
  ctx.out.write_csv("junction_potential.csv", potential);
  auto method = [](const HarmonicAmplitudes& a) { return a.method == AmplitudeMethod::series ? "series" : "quadrature"; };
  ctx.out.write_json("junction.json", {{"squid_alpha_ghz", squid.alpha},
                                       {"squid_beta_ghz", squid.beta},
                                       {"squid_epsilon_ghz", squid.epsilon},
                                       {"potential_minima", count_potential_minima(squid)},
                                       {"method_1", method(a1)},
                                       {"method_2", method(a2)},
                                       {"series_converged_1", a1.series_converged},
                                       {"series_converged_2", a2.series_converged},
                                       {"transmission_sweep", sweep_info}});
}

void run_compare(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const CircuitParams p = c.circuit.angular();
  const TwoModeSpace space = c.space();
  const std::vector<double> grid = c.phi_grid.angles();
  ctx.note("comparing models at " + std::to_string(grid.size()) + " angles");
  const ModelComparison cmp = compare_models(p, space, grid, c.compare.levels);

  CsvTable table;
  table.columns = {"phi",
                   "splitting_circuit_ghz",
                   "gap_circuit_ghz",
                   "splitting_sinsin_ghz",
                   "gap_sinsin_ghz",
                   "splitting_sinsin_cos_ghz",
                   "gap_sinsin_cos_ghz",
                   "overlap_sinsin_0",
                   "overlap_sinsin_1",
                   "overlap_sinsin_2",
                   "overlap_sinsin_cos_0",
                   "overlap_sinsin_cos_1",
                   "overlap_sinsin_cos_2",
                   "doublet_overlap_sinsin",
                   "doublet_overlap_sinsin_cos"};
  for (const ModelComparisonPoint& q : cmp.points) {
    table.add_row({q.phi, ghz(q.splitting_circuit), ghz(q.gap_circuit), ghz(q.splitting_sin), ghz(q.gap_sin),
                   ghz(q.splitting_sin_cos), ghz(q.gap_sin_cos), q.overlap_sin[0], q.overlap_sin[1], q.overlap_sin[2],
                   q.overlap_sin_cos[0], q.overlap_sin_cos[1], q.overlap_sin_cos[2], q.doublet_overlap_sin,
                   q.doublet_overlap_sin_cos});
  }
  ctx.out.write_csv("compare_models.csv", table);

  const OperatorMatrix parity = parity_operator(space);
  json dumps = json::array();
  const auto angles = angles_over_pi(c.compare.dump_phi_over_pi);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (const char* model : {"circuit", "sinsin"}) {
      const SpectralResult r = lowest_eigenpairs(model_hamiltonian(model, angles[i], p, space), 3, &parity);
      for (int n = 0; n < 3; ++n) {
        for (const char* basis : {"phase", "charge"}) {
          const std::string stem =
              std::string("compare_") + model + "_phi" + tag(i) + "_n" + std::to_string(n) + "_" + basis;
          write_state(ctx, stem, r.state(n), space, basis, c.compare.grid_points);
          dumps.push_back({{"model", model}, {"phi_rad", angles[i]}, {"level", n}, {"basis", basis}, {"stem", stem}});
        }
      }
    }
  }
  ctx.out.write_json("compare_models.json", {{"asymmetry_circuit_ghz", ghz(cmp.asymmetry_circuit)},
                                             {"asymmetry_sinsin_ghz", ghz(cmp.asymmetry_sin)},
                                             {"asymmetry_sinsin_cos_ghz", ghz(cmp.asymmetry_sin_cos)},
                                             {"dumps", dumps}});
}

std::filesystem::path output_root(const std::string& flag, const ExperimentConfig& c, const std::string& command) {
  if (!flag.empty()) return flag;
  if (!c.output_dir.empty()) return c.output_dir;
  const char* env = std::getenv(output_root_variable);
  const std::filesystem::path base = env != nullptr && *env != '\0' ? env : "cos2q_out";
  return base / command;
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cos2q: cos(2 theta) qubit gate simulations"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "dotted key=value, applied in order")->take_all();
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "progress on stderr");

  const std::map<std::string, std::function<void(Context&)>> commands{
      {"potential", run_potential},     {"spectrum", run_spectrum},         {"eigenstates", run_eigenstates},
      {"matrix-elements", run_matrix_elements}, {"schedule", run_schedule}, {"gate", run_gate},
      {"sweep-zeta", run_sweep},        {"junction", run_junction},         {"compare-models", run_compare}};
  std::string basis, model;
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->fallthrough();
    if (name == "eigenstates") {
      sub->add_option("--basis", basis)->check(CLI::IsMember({"phase", "charge"}));
      sub->add_option("--model", model)
          ->check(CLI::IsMember({"circuit", "sinsin", "sinsin-cos", "lowenergy", "lowenergy-corrected"}));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(err, exit_config_error, "usage", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    json document = config_path.empty() ? json::object() : load_config_document(config_path);
    if (!basis.empty()) apply_override(document, "eigenstates.basis=\"" + basis + "\"");
    if (!model.empty()) apply_override(document, "eigenstates.model=\"" + model + "\"");
    for (const std::string& o : overrides) apply_override(document, o);
    const ExperimentConfig config = parse_config(document);
    if (threads > 0) omp_set_num_threads(threads);
    OutputDirectory directory(output_root(out_dir, config, command), command, to_json(config));
    Context ctx{config, directory, verbose, err};
    commands.at(command)(ctx);
    out << json{{"command", command}, {"output_dir", directory.root().string()}, {"files", directory.files()}}.dump()
        << "\n";
    return 0;
  } catch (const InvalidArgument& e) {
    return fail(err, exit_config_error, "config", e.what());
  } catch (const NumericalError& e) {
    return fail(err, exit_numerical_error, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(err, 1, "internal", e.what());
  }
}

}  // namespace cos2q
