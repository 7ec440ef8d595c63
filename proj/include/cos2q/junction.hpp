#pragma once

// Semiconductor (nanowire) Josephson junctions: Andreev bound state energy,
// its cos(m theta) harmonics, and the SQUID potential coefficients.
//
// Energies carry the unit of `gap`; nothing here assumes angular units.

#include <vector>

namespace cos2q {

struct JunctionSpec {
  double gap = 1.0;                  // superconducting gap Delta
  std::vector<double> transmissions;  // channel transmissions T_j in [0, 1]
  int m_max = 8;                      // number of harmonics returned
  int n_max = 200;                    // initial Taylor truncation (doubled on demand)

  void validate() const;
};

enum class AmplitudeMethod { series, quadrature };

struct HarmonicAmplitudes {
  std::vector<double> values;  // E_J1 ... E_Jm_max (index 0 is m = 1)
  double offset = 0.0;         // constant term of the Fourier expansion
  AmplitudeMethod method = AmplitudeMethod::series;
  bool series_converged = true;
  int terms_used = 0;          // largest n retained by the series
  double tail_estimate = 0.0;  // relative bound on the neglected series tail

  double operator[](int m) const { return values.at(static_cast<std::size_t>(m - 1)); }
};

struct SquidCoeffs {
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
};

/// -Delta sum_j sqrt(1 - T_j sin^2(theta / 2))
double abs_energy(const JunctionSpec& junction, double theta);

/// Harmonic amplitudes E_Jm so that
///   abs_energy(theta) = offset - sum_m (-1)^{m-1} E_Jm cos(m theta).
/// Uses the transmission series per channel, doubling the truncation until
/// the tail bound drops below `relative_tolerance`; channels for which the
/// series cannot converge within `max_terms` (T_j -> 1) fall back to direct
/// quadrature of the Fourier projection and the result is flagged.
HarmonicAmplitudes harmonic_amplitudes(const JunctionSpec& junction, double relative_tolerance = 1e-12,
                                       int max_terms = 1 << 16);

/// Series only, at exactly junction.n_max terms; no fallback.
HarmonicAmplitudes harmonic_amplitudes_series(const JunctionSpec& junction, int n_terms);

/// Fourier projection by adaptive Gauss-Kronrod quadrature.
HarmonicAmplitudes harmonic_amplitudes_quadrature(const JunctionSpec& junction);

/// SQUID of two junctions threaded by external flux `flux` (radians):
///   alpha = E^1_J1 + E^2_J1 cos(flux), beta = E^1_J2 + E^2_J2 cos(2 flux),
///   epsilon = E^2_J2 sin(flux).
SquidCoeffs squid_coeffs(const HarmonicAmplitudes& first, const HarmonicAmplitudes& second, double flux);
SquidCoeffs squid_coeffs(const JunctionSpec& first, const JunctionSpec& second, double flux);

/// Number of strict local minima of -alpha cos(theta) + beta cos(2 theta)
/// (+ epsilon sin theta) on a uniform periodic grid.
int count_potential_minima(const SquidCoeffs& coeffs, int grid_points = 4096);

}  // namespace cos2q
