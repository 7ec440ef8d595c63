#include "cos2q/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cos2q/error.hpp"

namespace cos2q {

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

double edge_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign(s) != sign(d0)) return 0.0;
  if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return s;
}

double max_abs_entry(const OperatorMatrix& op) {
  double m = 0.0;
  const SparseMatrix& e = op.entries();
  for (int k = 0; k < e.nonZeros(); ++k) m = std::max(m, std::abs(e.valuePtr()[k]));
  return m;
}

double quasi_degenerate_limit(const SpectralResult& s, double threshold) {
  if (s.size() < 3) return 0.0;
  return threshold * (s.energies(2) - s.energies(0));
}

}  // namespace

std::vector<double> pchip_slopes(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw InvalidArgument("pchip needs at least two matching samples");
  std::vector<double> h(n - 1), d(n - 1), s(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    d[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    s[0] = s[1] = d[0];
    return s;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || sign(d[i - 1]) != sign(d[i])) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    s[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
  }
  s[0] = edge_slope(h[0], h[1], d[0], d[1]);
  s[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return s;
}

ControlSchedule::ControlSchedule(std::vector<double> times, std::vector<double> angles)
    : times_(std::move(times)), angles_(std::move(angles)) {
  if (times_.size() != angles_.size() || times_.size() < 2)
    throw InvalidArgument("schedule needs at least two (time, angle) samples");
  if (times_.front() != 0.0) throw InvalidArgument("schedule must start at t = 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(angles_[i])) throw InvalidArgument("schedule samples must be finite");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw InvalidArgument("schedule times must increase strictly");
    if (i > 0 && angles_[i] < angles_[i - 1]) throw InvalidArgument("schedule angles must be non-decreasing");
  }
  slopes_ = pchip_slopes(times_, angles_);
}

ControlSchedule ControlSchedule::constant(double phi, double duration) {
  if (!(duration > 0.0)) throw InvalidArgument("schedule duration must be positive");
  return ControlSchedule({0.0, duration}, {phi, phi});
}

ControlSchedule ControlSchedule::linear(double total_time, int points) {
  if (!(total_time > 0.0)) throw InvalidArgument("schedule duration must be positive");
  if (points < 2) throw InvalidArgument("linear schedule needs at least two points");
  std::vector<double> t(points), a(points);
  for (int i = 0; i < points; ++i) {
    t[i] = total_time * i / (points - 1);
    a[i] = pi * i / (points - 1);
  }
  t.back() = total_time;
  a.back() = pi;
  return ControlSchedule(std::move(t), std::move(a));
}

double ControlSchedule::angle(double t) const {
  if (t <= 0.0) return angles_.front();
  if (t >= times_.back()) return angles_.back();
  const std::size_t i = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin() - 1;
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * angles_[i] + (s3 - 2 * s2 + s) * h * slopes_[i] + (-2 * s3 + 3 * s2) * angles_[i + 1] +
         (s3 - s2) * h * slopes_[i + 1];
}

double ControlSchedule::rate(double t) const {
  if (t <= 0.0) return slopes_.front();
  if (t >= times_.back()) return slopes_.back();
  const std::size_t i = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin() - 1;
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * angles_[i] + (-6 * s2 + 6 * s) * angles_[i + 1]) / h +
         (3 * s2 - 4 * s + 1) * slopes_[i] + (3 * s2 - 2 * s) * slopes_[i + 1];
}

bool ControlSchedule::is_full_rotation() const {
  return !angles_.empty() && angles_.front() == 0.0 && angles_.back() == pi;
}

void write_schedule(std::ostream& out, const ControlSchedule& schedule, const std::vector<std::string>& comments) {
  for (const std::string& c : comments) out << "# " << c << '\n';
  out << "# interpolation=" << ControlSchedule::interpolation_name << '\n';
  out << "time_ns,phi_rad\n";
  char buf[64];
  for (std::size_t i = 0; i < schedule.times().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", schedule.times()[i], schedule.angles()[i]);
    out << buf;
  }
}

ControlSchedule read_schedule(std::istream& in) {
  std::string line;
  bool rule_seen = false;
  bool header_seen = false;
  std::vector<double> t, a;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# interpolation=";
      if (line.rfind(key, 0) == 0) {
        if (line.substr(key.size()) != ControlSchedule::interpolation_name)
          throw InvalidArgument("unsupported schedule interpolation '" + line.substr(key.size()) + "'");
        rule_seen = true;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "time_ns,phi_rad") throw InvalidArgument("schedule table must have columns time_ns,phi_rad");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    double ti = 0.0, ai = 0.0;
    char comma = 0;
    if (!(row >> ti >> comma >> ai) || comma != ',')
      throw InvalidArgument("malformed schedule row at line " + std::to_string(line_no));
    t.push_back(ti);
    a.push_back(ai);
  }
  if (!rule_seen) throw InvalidArgument("schedule table lacks an interpolation line");
  return ControlSchedule(std::move(t), std::move(a));
}

NonadiabaticTable nonadiabatic_elements(const HamiltonianFamily& family, double phi, std::span<const int> n_list,
                                        int m_count, const SpectralOptions& options) {
  if (m_count < 3) throw InvalidArgument("m_count must be at least 3");
  for (int n : n_list) {
    if (n < 0 || n >= m_count) throw InvalidArgument("level index outside the retained states");
  }
  const OperatorMatrix parity = parity_operator(family.space());
  NonadiabaticTable table;
  table.phi = phi;
  table.spectrum = lowest_eigenpairs(family.at(phi), m_count, &parity, options);
  table.spectrum.phi = phi;
  const OperatorMatrix dh = family.derivative(phi);
  table.derivative_norm = max_abs_entry(dh);

  const SpectralResult& s = table.spectrum;
  Eigen::MatrixXcd dh_states(s.states.rows(), m_count);
  for (int m = 0; m < m_count; ++m) dh_states.col(m) = dh.apply(s.states.col(m));
  const Eigen::MatrixXcd a = s.states.adjoint() * dh_states;
  const double limit = quasi_degenerate_limit(s, options.degeneracy_threshold);
  const double reliable = 10.0 * s.residuals.maxCoeff();

  for (int n : n_list) {
    for (int m = 0; m < m_count; ++m) {
      if (m == n) continue;
      NonadiabaticEntry e;
      e.n = n;
      e.m = m;
      e.gap = std::abs(s.energies(n) - s.energies(m));
      e.numerator = std::abs(a(n, m));
      // the logical doublet is always excluded, whatever its splitting
      e.excluded = e.gap < limit || (std::min(n, m) == 0 && std::max(n, m) == 1);
      if (!e.excluded) {
        if (e.gap < reliable) {
          std::ostringstream msg;
          msg << "gap " << e.gap << " between levels " << n << " and " << m << " at phi=" << phi
              << " is below ten solver residuals";
          throw NumericalError(msg.str());
        }
        e.amplitude = e.numerator / e.gap;
      }
      table.entries.push_back(e);
    }
  }
  return table;
}

OptimizedSchedule optimize_schedule(const HamiltonianFamily& family, const ScheduleOptions& options) {
  if (!(options.bound_factor > 0.0)) throw InvalidArgument("bound_factor must be positive");
  if (options.resolution < 64) throw InvalidArgument("schedule resolution must be at least 64 points");
  if (!(options.rate_ceiling > 0.0)) throw InvalidArgument("rate_ceiling must be positive");

  OptimizedSchedule out;
  out.phi = angle_grid(0.0, pi, options.resolution);
  const std::size_t n = out.phi.size();
  out.local_rate.assign(n, 0.0);
  out.limiting_level.assign(n, -1);
  out.doublet_numerator.assign(n, 0.0);
  out.derivative_norm.assign(n, 0.0);

  const std::array<int, 2> logical{0, 1};
  parallel_for(n, [&](std::size_t i) {
    const NonadiabaticTable table =
        nonadiabatic_elements(family, out.phi[i], logical, options.m_count, options.spectral);
    double rate = options.rate_ceiling;
    int level = -1;
    for (const NonadiabaticEntry& e : table.entries) {
      if (e.m == 0 || e.m == 1) {
        if (e.m != e.n) out.doublet_numerator[i] = std::max(out.doublet_numerator[i], e.numerator);
        continue;
      }
      if (e.excluded || e.numerator == 0.0) continue;
      const double r = options.bound_factor * e.gap * e.gap / e.numerator;
      if (r < rate) {
        rate = r;
        level = e.m;
      }
    }
    out.local_rate[i] = rate;
    out.limiting_level[i] = level;
    out.derivative_norm[i] = table.derivative_norm;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.local_rate[i] > 0.0) || !std::isfinite(out.local_rate[i])) {
      std::ostringstream msg;
      msg << "gap closure on path at phi=" << out.phi[i];
      throw NumericalError(msg.str());
    }
    if (out.doublet_numerator[i] > 1e-8 * out.derivative_norm[i]) {
      std::ostringstream msg;
      msg << "logical doublet coupled by dH/dphi at phi=" << out.phi[i] << " (|<0|dH|1>| = " << out.doublet_numerator[i]
          << ")";
      throw NumericalError(msg.str());
    }
  }

  // t(phi) by the trapezoid rule on 1/rate
  std::vector<double> dt(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    dt[i] = 0.5 * (out.phi[i + 1] - out.phi[i]) * (1.0 / out.local_rate[i] + 1.0 / out.local_rate[i + 1]);

  auto cumulative = [&] {
    std::vector<double> t(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) t[i + 1] = t[i] + dt[i];
    return t;
  };

  // The interpolant's node slopes must respect the local rate; stretch the
  // intervals around any node where they do not.
  std::vector<double> t = cumulative();
  for (int pass = 0;; ++pass) {
    if (pass == 1000) throw NumericalError("schedule slope limiting did not settle");
    const std::vector<double> s = pchip_slopes(t, out.phi);
    std::vector<double> stretch(n - 1, 1.0);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] <= out.local_rate[i]) continue;
      // a small margin so rounding cannot leave a node an ulp above its rate
      constexpr double margin = 1.0 + 1e-9;
      ok = false;
      if (i == 0 || i + 1 == n) {
        const std::size_t k = i == 0 ? 0 : n - 2;
        stretch[k] = std::max(stretch[k], margin * s[i] / out.local_rate[i]);
        continue;
      }
      const double left = (out.phi[i] - out.phi[i - 1]) / dt[i - 1];
      const double right = (out.phi[i + 1] - out.phi[i]) / dt[i];
      const double c = margin * std::max(left, right) / out.local_rate[i];
      stretch[i - 1] = std::max(stretch[i - 1], c);
      stretch[i] = std::max(stretch[i], c);
    }
    if (ok) break;
    for (std::size_t i = 0; i + 1 < n; ++i) dt[i] *= stretch[i];
    t = cumulative();
  }

  out.schedule = ControlSchedule(t, out.phi);
  out.total_time = out.schedule.total_time();
  return out;
}

Eigen::MatrixXcd adiabatic_frame_hamiltonian(const HamiltonianFamily& family, double phi, double phi_rate, int k,
                                             const SpectralOptions& options) {
  if (k < 3) throw InvalidArgument("adiabatic frame needs k >= 3");
  const OperatorMatrix parity = parity_operator(family.space());
  const SpectralResult s = lowest_eigenpairs(family.at(phi), k, &parity, options);
  const OperatorMatrix dh = family.derivative(phi);
  Eigen::MatrixXcd dh_states(s.states.rows(), k);
  for (int m = 0; m < k; ++m) dh_states.col(m) = dh.apply(s.states.col(m));
  const Eigen::MatrixXcd a = s.states.adjoint() * dh_states;
  const double limit = quasi_degenerate_limit(s, options.degeneracy_threshold);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(k, k);
  for (int n = 0; n < k; ++n) {
    h(n, n) = s.energies(n);
    for (int m = n + 1; m < k; ++m) {
      const double gap = s.energies(m) - s.energies(n);
      if (std::abs(gap) < limit) continue;
      h(n, m) = cplx(0.0, -phi_rate) * a(n, m) / gap;
      h(m, n) = std::conj(h(n, m));
    }
  }
  return h;
}

}  // namespace cos2q
