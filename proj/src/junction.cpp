#include "cos2q/junction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cos2q/error.hpp"

namespace cos2q {

namespace {

struct ChannelSeries {
  std::vector<double> amplitudes;  // per unit gap, m = 1..m_max
  double offset = 0.0;
  double tail = 0.0;  // relative tail bound
};

// Series for one channel truncated at n_terms:
//   E_Jm / Delta = sum_{n=m}^{N} 2 binom(1/2, n) binom(2n, n-m) (-1)^{n+1} T^n / 4^n
ChannelSeries channel_series(double transmission, int m_max, int n_terms) {
  ChannelSeries out;
  out.amplitudes.assign(static_cast<std::size_t>(m_max), 0.0);
  if (transmission == 0.0) return out;

  // binom(1/2, n), T^n and c(n, m) = binom(2n, n-m) / 4^n by recurrence.
  std::vector<double> half_binom(static_cast<std::size_t>(n_terms) + 1);
  std::vector<double> t_pow(static_cast<std::size_t>(n_terms) + 1);
  half_binom[0] = 1.0;
  t_pow[0] = 1.0;
  for (int n = 0; n < n_terms; ++n) {
    half_binom[static_cast<std::size_t>(n) + 1] = half_binom[static_cast<std::size_t>(n)] * (0.5 - n) / (n + 1.0);
    t_pow[static_cast<std::size_t>(n) + 1] = t_pow[static_cast<std::size_t>(n)] * transmission;
  }
  const double ratio_bound = transmission < 1.0 ? transmission / (1.0 - transmission) : INFINITY;

  for (int m = 0; m <= m_max; ++m) {
    double c = std::pow(0.25, m);
    double sum = 0.0;
    double last = 0.0;
    for (int n = std::max(m, 0); n <= n_terms; ++n) {
      const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
      if (m == 0) {
        // constant term: -sum_n binom(1/2, n) (-1)^n T^n binom(2n, n) / 4^n
        last = sign * half_binom[static_cast<std::size_t>(n)] * c * t_pow[static_cast<std::size_t>(n)];
      } else {
        last = 2.0 * half_binom[static_cast<std::size_t>(n)] * c * sign * t_pow[static_cast<std::size_t>(n)];
      }
      sum += last;
      c *= (2.0 * n + 2.0) * (2.0 * n + 1.0) / (4.0 * (n + 1.0 - m) * (n + 1.0 + m));
    }
    if (m == 0) {
      out.offset = sum;
    } else {
      out.amplitudes[static_cast<std::size_t>(m - 1)] = sum;
    }
    if (sum != 0.0) out.tail = std::max(out.tail, std::abs(last) * ratio_bound / std::abs(sum));
  }
  return out;
}

ChannelSeries channel_quadrature(double transmission, int m_max) {
  using boost::math::quadrature::gauss_kronrod;
  ChannelSeries out;
  out.amplitudes.assign(static_cast<std::size_t>(m_max), 0.0);
  if (transmission == 0.0) return out;
  constexpr double half_pi = std::numbers::pi / 2.0;
  auto energy = [transmission](double u) {  // epsilon(2u) / Delta
    const double s = std::sin(u);
    return -std::sqrt(std::max(0.0, 1.0 - transmission * s * s));
  };
  // the half-angle integrand is smooth even at T = 1, so a 61-point rule is
  // already near roundoff; a tighter tolerance only buys maximal recursion
  constexpr unsigned depth = 8;
  constexpr double tol = 1e-13;
  double error = 0.0;
  // constant term a_0 / 2 = (2 / pi) int_0^{pi/2} eps(2u) du
  out.offset = 2.0 / std::numbers::pi * gauss_kronrod<double, 61>::integrate(energy, 0.0, half_pi, depth, tol, &error);
  for (int m = 1; m <= m_max; ++m) {
    auto integrand = [&](double u) { return energy(u) * std::cos(2.0 * m * u); };
    const double a_m = 4.0 / std::numbers::pi * gauss_kronrod<double, 61>::integrate(integrand, 0.0, half_pi, depth, tol, &error);
    out.amplitudes[static_cast<std::size_t>(m - 1)] = (m % 2 == 0 ? 1.0 : -1.0) * a_m;
  }
  return out;
}

void accumulate(HarmonicAmplitudes& total, const ChannelSeries& channel, double gap) {
  for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += gap * channel.amplitudes[i];
  total.offset += gap * channel.offset;
}

}  // namespace

void JunctionSpec::validate() const {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw InvalidArgument("junction gap must be positive");
  for (double t : transmissions) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("junction transmissions must lie in [0, 1]");
  }
  if (m_max < 1) throw InvalidArgument("junction m_max must be >= 1");
  if (n_max < m_max) throw InvalidArgument("junction n_max must be >= m_max");
}

double abs_energy(const JunctionSpec& junction, double theta) {
  const double s = std::sin(theta / 2.0);
  double total = 0.0;
  for (double t : junction.transmissions) total += std::sqrt(std::max(0.0, 1.0 - t * s * s));
  return -junction.gap * total;
}

HarmonicAmplitudes harmonic_amplitudes_series(const JunctionSpec& junction, int n_terms) {
  junction.validate();
  HarmonicAmplitudes out;
  out.values.assign(static_cast<std::size_t>(junction.m_max), 0.0);
  out.terms_used = n_terms;
  for (double t : junction.transmissions) {
    const ChannelSeries s = channel_series(t, junction.m_max, n_terms);
    accumulate(out, s, junction.gap);
    out.tail_estimate = std::max(out.tail_estimate, s.tail);
  }
  out.series_converged = std::isfinite(out.tail_estimate);
  return out;
}

HarmonicAmplitudes harmonic_amplitudes_quadrature(const JunctionSpec& junction) {
  junction.validate();
  HarmonicAmplitudes out;
  out.values.assign(static_cast<std::size_t>(junction.m_max), 0.0);
  out.method = AmplitudeMethod::quadrature;
  for (double t : junction.transmissions) accumulate(out, channel_quadrature(t, junction.m_max), junction.gap);
  return out;
}

HarmonicAmplitudes harmonic_amplitudes(const JunctionSpec& junction, double relative_tolerance, int max_terms) {
  junction.validate();
  HarmonicAmplitudes out;
  out.values.assign(static_cast<std::size_t>(junction.m_max), 0.0);
  for (double t : junction.transmissions) {
    int n_terms = junction.n_max;
    ChannelSeries s = channel_series(t, junction.m_max, n_terms);
    while (!(s.tail <= relative_tolerance) && n_terms < max_terms) {
      n_terms = std::min(2 * n_terms, max_terms);
      s = channel_series(t, junction.m_max, n_terms);
    }
    out.terms_used = std::max(out.terms_used, n_terms);
    if (s.tail <= relative_tolerance) {
      accumulate(out, s, junction.gap);
      out.tail_estimate = std::max(out.tail_estimate, s.tail);
    } else {
      out.series_converged = false;
      out.method = AmplitudeMethod::quadrature;
      accumulate(out, channel_quadrature(t, junction.m_max), junction.gap);
    }
  }
  return out;
}

SquidCoeffs squid_coeffs(const HarmonicAmplitudes& first, const HarmonicAmplitudes& second, double flux) {
  if (first.values.size() < 2 || second.values.size() < 2) {
    throw InvalidArgument("squid coefficients need at least two harmonics per junction");
  }
  if (!first.series_converged && first.method != AmplitudeMethod::quadrature) {
    throw NumericalError("harmonic amplitudes of the first junction did not converge");
  }
  if (!second.series_converged && second.method != AmplitudeMethod::quadrature) {
    throw NumericalError("harmonic amplitudes of the second junction did not converge");
  }
  SquidCoeffs c;
  c.alpha = first[1] + second[1] * std::cos(flux);
  c.beta = first[2] + second[2] * std::cos(2.0 * flux);
  // sin(pi) is not exactly zero in floating point; the sweet spot is exact.
  c.epsilon = std::cos(flux) == -1.0 ? 0.0 : second[2] * std::sin(flux);
  return c;
}

SquidCoeffs squid_coeffs(const JunctionSpec& first, const JunctionSpec& second, double flux) {
  return squid_coeffs(harmonic_amplitudes(first), harmonic_amplitudes(second), flux);
}

int count_potential_minima(const SquidCoeffs& c, int grid_points) {
  std::vector<double> v(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / grid_points;
    v[static_cast<std::size_t>(i)] = -c.alpha * std::cos(theta) + c.beta * std::cos(2.0 * theta) + c.epsilon * std::sin(theta);
  }
  int count = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double prev = v[static_cast<std::size_t>((i + grid_points - 1) % grid_points)];
    const double next = v[static_cast<std::size_t>((i + 1) % grid_points)];
    const double here = v[static_cast<std::size_t>(i)];
    if (here < prev && here < next) ++count;
  }
  return count;
}

}  // namespace cos2q
