#pragma once

// Rotation schedules phi(t) and non-adiabatic diagnostics along the gate path.

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cos2q/hamiltonians.hpp"
#include "cos2q/spectral.hpp"

namespace cos2q {

/// Sampled phi(t), interpolated by the monotone piecewise-cubic (PCHIP) rule.
/// Times in ns, angles in rad.
class ControlSchedule {
 public:
  ControlSchedule() = default;
  ControlSchedule(std::vector<double> times, std::vector<double> angles);

  /// phi held at a fixed value for `duration`.
  static ControlSchedule constant(double phi, double duration);
  /// phi = pi t / T.
  static ControlSchedule linear(double total_time, int points = 2);

  double total_time() const { return times_.empty() ? 0.0 : times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& node_slopes() const { return slopes_; }

  double angle(double t) const;
  double rate(double t) const;

  /// phi(0) = 0 and phi(T) = pi exactly.
  bool is_full_rotation() const;

  static constexpr const char* interpolation_name = "pchip";

 private:
  std::vector<double> times_;
  std::vector<double> angles_;
  std::vector<double> slopes_;
};

/// Fritsch-Butland slopes for monotone data (the rule ControlSchedule uses).
std::vector<double> pchip_slopes(std::span<const double> x, std::span<const double> y);

/// Two-column table (time_ns, phi_rad) with a `# interpolation=pchip` line.
/// Extra comment lines (starting with '#') are written verbatim before it.
void write_schedule(std::ostream& out, const ControlSchedule& schedule, const std::vector<std::string>& comments = {});
ControlSchedule read_schedule(std::istream& in);

struct NonadiabaticEntry {
  int n = 0;
  int m = 0;
  double gap = 0.0;        // |omega_n - omega_m|
  double numerator = 0.0;  // |<n|dH/dphi|m>|
  double amplitude = 0.0;  // numerator / gap (zero for excluded pairs)
  bool excluded = false;   // quasi-degenerate pair
};

struct NonadiabaticTable {
  double phi = 0.0;
  SpectralResult spectrum;
  double derivative_norm = 0.0;  // max absolute entry of dH/dphi
  std::vector<NonadiabaticEntry> entries;
};

NonadiabaticTable nonadiabatic_elements(const HamiltonianFamily& family, double phi, std::span<const int> n_list,
                                        int m_count, const SpectralOptions& options = {});

struct ScheduleOptions {
  double bound_factor = 1e-3;
  int resolution = 129;  // phi grid points over [0, pi]
  int m_count = 12;
  double rate_ceiling = 100.0;  // rad/ns, used where every coupling vanishes
  SpectralOptions spectral;
};

struct OptimizedSchedule {
  ControlSchedule schedule;
  std::vector<double> phi;           // grid
  std::vector<double> local_rate;    // bound-limited dphi/dt at each grid phi
  std::vector<int> limiting_level;   // m that sets the rate (-1 where capped)
  std::vector<double> doublet_numerator;  // |<0|dH/dphi|1>| (excluded pair)
  std::vector<double> derivative_norm;
  double total_time = 0.0;
};

OptimizedSchedule optimize_schedule(const HamiltonianFamily& family, const ScheduleOptions& options = {});

/// Moving-frame Hamiltonian on the k lowest instantaneous states: diagonal
/// omega_n, off-diagonal -i phidot <n|dH/dphi|m> / (omega_m - omega_n).
/// Quasi-degenerate pairs are left uncoupled.
Eigen::MatrixXcd adiabatic_frame_hamiltonian(const HamiltonianFamily& family, double phi, double phi_rate, int k,
                                             const SpectralOptions& options = {});

}  // namespace cos2q
