#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cos2q/error.hpp"
#include "cos2q/junction.hpp"

using namespace cos2q;

namespace {

constexpr double pi = std::numbers::pi;

// Fourier projection by the periodic trapezoid rule: spectrally accurate for
// smooth periodic integrands (T < 1).
double trapezoid_amplitude(const JunctionSpec& j, int m, int samples = 4096) {
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double theta = 2.0 * pi * i / samples;
    s += abs_energy(j, theta) * std::cos(m * theta);
  }
  const double a_m = 2.0 * s / samples;  // E(theta) = ... + a_m cos(m theta)
  return (m % 2 == 1 ? -1.0 : 1.0) * a_m;
}

}  // namespace

TEST_SUITE("junction") {

TEST_CASE("harmonics match trapezoid projections for partial transmission") {
  for (double t : {0.1, 0.3, 0.7, 0.95}) {
    JunctionSpec j{1.0, {t}, 6, 200};
    const HarmonicAmplitudes a = harmonic_amplitudes(j);
    for (int m = 1; m <= 6; ++m) {
      const double want = trapezoid_amplitude(j, m, 1 << 15);
      CHECK(std::abs(a[m] - want) <= 1e-8 * std::abs(a[1]));
    }
  }
}

TEST_CASE("ballistic channel reproduces 4 Delta / (pi (4 m^2 - 1))") {
  JunctionSpec j{1.0, {1.0}, 8, 200};
  const HarmonicAmplitudes a = harmonic_amplitudes(j);
  CHECK(a.method == AmplitudeMethod::quadrature);
  CHECK_FALSE(a.series_converged);
  for (int m = 1; m <= 8; ++m) CHECK(a[m] == doctest::Approx(4.0 / (pi * (4.0 * m * m - 1.0))).epsilon(1e-10));
  CHECK(a.offset == doctest::Approx(-2.0 / pi).epsilon(1e-10));
}

TEST_CASE("series and quadrature routes agree") {
  JunctionSpec j{2.5, {0.4, 0.8}, 5, 200};
  const HarmonicAmplitudes s = harmonic_amplitudes(j);
  const HarmonicAmplitudes q = harmonic_amplitudes_quadrature(j);
  CHECK(s.method == AmplitudeMethod::series);
  CHECK(s.series_converged);
  CHECK(s.offset == doctest::Approx(q.offset).epsilon(1e-11));
  for (int m = 1; m <= 5; ++m) CHECK(std::abs(s[m] - q[m]) < 1e-11 * std::abs(s[1]));
}

TEST_CASE("amplitudes scale with the gap and add over channels") {
  const HarmonicAmplitudes one = harmonic_amplitudes(JunctionSpec{1.0, {0.6}, 4, 200});
  const HarmonicAmplitudes two = harmonic_amplitudes(JunctionSpec{3.0, {0.6, 0.6}, 4, 200});
  for (int m = 1; m <= 4; ++m) CHECK(two[m] == doctest::Approx(6.0 * one[m]).epsilon(1e-12));
}

TEST_CASE("harmonic sum reconstructs the bound-state energy") {
  JunctionSpec j{1.0, {0.5}, 40, 200};
  const HarmonicAmplitudes a = harmonic_amplitudes(j);
  for (double theta : {-2.0, 0.0, 0.9, 3.1}) {
    double e = a.offset;
    for (int m = 1; m <= 40; ++m) e -= (m % 2 == 1 ? 1.0 : -1.0) * a[m] * std::cos(m * theta);
    CHECK(e == doctest::Approx(abs_energy(j, theta)).epsilon(1e-12));
  }
}

TEST_CASE("second harmonic ratio grows with transmission") {
  double previous = 0.0;
  for (double t : {0.2, 0.5, 0.8, 0.99}) {
    const HarmonicAmplitudes a = harmonic_amplitudes(JunctionSpec{1.0, {t}, 2, 200});
    CHECK(a[2] / a[1] > previous);
    previous = a[2] / a[1];
  }
  CHECK(previous < 0.2);  // at most 1/5, the ballistic ratio
}

TEST_CASE("SQUID coefficients follow the flux dependence") {
  const HarmonicAmplitudes a = harmonic_amplitudes(JunctionSpec{1.0, {0.9}, 3, 200});
  const HarmonicAmplitudes b = harmonic_amplitudes(JunctionSpec{1.0, {0.7}, 3, 200});
  for (double flux : {0.0, 0.7, pi}) {
    const SquidCoeffs c = squid_coeffs(a, b, flux);
    CHECK(c.alpha == doctest::Approx(a[1] + b[1] * std::cos(flux)));
    CHECK(c.beta == doctest::Approx(a[2] + b[2] * std::cos(2.0 * flux)));
    CHECK(c.epsilon == doctest::Approx(b[2] * std::sin(flux)));
  }
  // identical junctions at half flux cancel the first harmonic
  const SquidCoeffs half = squid_coeffs(a, a, pi);
  CHECK(std::abs(half.alpha) < 1e-15);
  CHECK(half.beta == doctest::Approx(2.0 * a[2]));
}

TEST_CASE("double well exactly when |alpha| < 4 beta") {
  CHECK(count_potential_minima({1.0, 0.3, 0.0}) == 2);  // 1 < 1.2
  CHECK(count_potential_minima({1.0, 0.2, 0.0}) == 1);  // 1 > 0.8
  CHECK(count_potential_minima({0.0, 1.0, 0.0}) == 2);
  // |alpha| < |beta| always lands in the double-well regime
  for (double r : {0.1, 0.5, 0.99}) CHECK(count_potential_minima({r, 1.0, 0.0}) == 2);
}

TEST_CASE("invalid junctions are rejected") {
  CHECK_THROWS_AS(harmonic_amplitudes(JunctionSpec{1.0, {1.2}, 4, 200}), InvalidArgument);
  CHECK_THROWS_AS(harmonic_amplitudes(JunctionSpec{-1.0, {0.5}, 4, 200}), InvalidArgument);
  CHECK_THROWS_AS(harmonic_amplitudes(JunctionSpec{1.0, {0.5}, 0, 200}), InvalidArgument);
}

}  // TEST_SUITE
