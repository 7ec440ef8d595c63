#include "cos2q/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cos2q/error.hpp"
#include "cos2q/kernels.hpp"

namespace cos2q {

namespace {

// exp(-i tau T) e_1 for the leading m x m block of a real tridiagonal T.
Eigen::VectorXcd tridiagonal_expm_e1(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int m, double tau) {
  Eigen::VectorXcd out(m);
  if (m == 1) {
    out(0) = std::exp(cplx(0.0, -tau * a(0)));
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(a.head(m), b.head(m - 1));
  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXcd coeff(m);
  for (int i = 0; i < m; ++i) coeff(i) = std::exp(cplx(0.0, -tau * es.eigenvalues()(i))) * q(0, i);
  out = q.cast<cplx>() * coeff;
  return out;
}

bool check_point(int m) { return m == 4 || m == 6 || m == 8 || m == 12 || m == 16 || m == 24 || m == 32; }

constexpr double sqrt3 = 1.7320508075688772;
constexpr double c1 = 0.5 - sqrt3 / 6.0;
constexpr double c2 = 0.5 + sqrt3 / 6.0;
constexpr double a1 = (3.0 - 2.0 * sqrt3) / 12.0;
constexpr double a2 = (3.0 + 2.0 * sqrt3) / 12.0;

class Stepper {
 public:
  Stepper(const AffineOperator& h, const CoefficientFunction& coefficients, const KrylovOptions& krylov)
      : h_(h), coefficients_(coefficients), krylov_(krylov), work_(h.pattern()) {
    f1_.resize(h.block_count());
    f2_.resize(h.block_count());
    mix_.resize(h.block_count());
  }

  Vector step(const Vector& psi, double t, double dt, double krylov_tolerance) {
    krylov_.tolerance = krylov_tolerance;
    coefficients_(t + c1 * dt, f1_);
    coefficients_(t + c2 * dt, f2_);
    check(f1_);
    check(f2_);
    for (std::size_t b = 0; b < mix_.size(); ++b) mix_[b] = a2 * f1_[b] + a1 * f2_[b];
    h_.assemble_into(mix_, work_);
    Vector out = krylov_expmv(work_, psi, dt, krylov_);
    for (std::size_t b = 0; b < mix_.size(); ++b) mix_[b] = a1 * f1_[b] + a2 * f2_[b];
    h_.assemble_into(mix_, work_);
    return krylov_expmv(work_, out, dt, krylov_);
  }

 private:
  void check(const std::vector<double>& f) const {
    if (f.size() != h_.block_count()) throw InvalidArgument("coefficient function returned the wrong block count");
  }

  const AffineOperator& h_;
  const CoefficientFunction& coefficients_;
  KrylovOptions krylov_;
  SparseMatrix work_;
  std::vector<double> f1_, f2_, mix_;
};

}  // namespace

Vector krylov_expmv(const SparseMatrix& h, const Vector& v, double tau, const KrylovOptions& options) {
  const int n = static_cast<int>(h.rows());
  if (v.size() != n) throw InvalidArgument("krylov_expmv: vector dimension mismatch");
  const int mmax = std::min(options.max_dimension, n);
  const kernels::CsrView view = kernels::CsrView::of(h);
  thread_local Eigen::MatrixXcd basis;
  if (basis.rows() != n || basis.cols() < mmax + 1) basis.resize(n, mmax + 1);
  Eigen::VectorXd alpha(mmax), beta(mmax);
  Vector x(n);
  Vector w = v;
  double remaining = tau;
  double sub = tau;
  int halvings = 0;
  while (remaining != 0.0) {
    if (std::abs(sub) > std::abs(remaining)) sub = remaining;
    const double beta0 = w.norm();
    if (beta0 == 0.0) return w;
    basis.col(0) = w / beta0;
    int m = 0;
    bool invariant = false;
    double scale = 0.0;
    Eigen::VectorXcd y;
    for (int j = 0; j < mmax; ++j) {
      kernels::spmv(view, {basis.col(j).data(), static_cast<std::size_t>(n)}, {x.data(), static_cast<std::size_t>(n)});
      alpha(j) = basis.col(j).dot(x).real();
      scale = std::max(scale, std::abs(alpha(j)));
      x -= alpha(j) * basis.col(j);
      if (j > 0) x -= beta(j - 1) * basis.col(j - 1);
      // one local reorthogonalization pass keeps the short recurrence honest
      const int lo = std::max(0, j - 1);
      x -= basis.middleCols(lo, j + 1 - lo) * (basis.middleCols(lo, j + 1 - lo).adjoint() * x);
      beta(j) = x.norm();
      m = j + 1;
      if (beta(j) <= 1e-13 * std::max(scale, 1.0)) {
        invariant = true;
        break;
      }
      basis.col(j + 1) = x / beta(j);
      if (check_point(m) || m == mmax) {
        y = tridiagonal_expm_e1(alpha, beta, m, sub);
        if (beta(j) * std::abs(y(m - 1)) <= options.tolerance) break;
      }
    }
    // shrink the sub-step until the a-posteriori estimate is met
    while (true) {
      y = tridiagonal_expm_e1(alpha, beta, m, sub);
      const double err = invariant ? 0.0 : beta(m - 1) * std::abs(y(m - 1));
      if (err <= options.tolerance) break;
      sub *= 0.5;
      if (++halvings > 200) throw NumericalError("krylov_expmv: sub-step underflow");
    }
    w = beta0 * (basis.leftCols(m) * y);
    remaining -= sub;
  }
  return w;
}

Propagation propagate(const AffineOperator& h, const CoefficientFunction& coefficients, double t0, double t1,
                      const Vector& initial, const PropagationOptions& options) {
  if (!(t1 >= t0)) throw InvalidArgument("propagation interval must have t1 >= t0");
  if (initial.size() != h.dimension()) throw InvalidArgument("initial state dimension mismatch");
  if (!h.hermitian()) throw InvalidArgument("propagation requires a Hermitian generator");
  if (!(options.tolerance > 0.0)) throw InvalidArgument("propagation tolerance must be positive");
  const double norm0 = initial.norm();
  if (std::abs(norm0 - 1.0) > 1e-10) throw InvalidArgument("initial state must be normalized");

  std::vector<double> stops;
  for (double s : options.snapshot_times) {
    if (s < t0 || s > t1) throw InvalidArgument("snapshot time outside the propagation interval");
    stops.push_back(s);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Propagation out;
  out.state = initial;
  std::size_t next = 0;
  auto record = [&](double t) {
    while (next < stops.size() && stops[next] == t) out.snapshots.push_back({stops[next++], out.state});
  };
  record(t0);
  const double span = t1 - t0;
  if (span == 0.0) return out;

  Stepper stepper(h, coefficients, options.krylov);
  double t = t0;
  double dt = options.initial_step > 0.0 ? options.initial_step : span / 100.0;
  while (t < t1) {
    const double stop = next < stops.size() ? stops[next] : t1;
    bool lands = false;
    double trial = dt;
    if (t + trial >= stop) {
      trial = stop - t;
      lands = true;
    }
    const double allowed = options.tolerance * trial / span;
    // Krylov error well inside the step budget, never stricter than requested
    const double kt = std::max(options.krylov.tolerance, 1e-3 * allowed);
    const Vector big = stepper.step(out.state, t, trial, kt);
    const Vector half = stepper.step(stepper.step(out.state, t, 0.5 * trial, kt), t + 0.5 * trial, 0.5 * trial, kt);
    const double err = (big - half).norm();
    const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(allowed / err, 0.25), 0.2, 4.0);
    if (err <= allowed) {
      // the step is unitary up to Krylov and rounding error; renormalize and
      // account for what was removed
      const double norm = half.norm();
      out.norm_drift += std::abs(norm - 1.0);
      out.state = half / norm;
      t = lands ? stop : t + trial;
      ++out.accepted_steps;
      if (out.norm_drift > options.norm_tolerance) {
        std::ostringstream msg;
        msg << "norm drift " << out.norm_drift << " exceeds tolerance at t=" << t;
        throw NumericalError(msg.str());
      }
      record(t);
      // a step clipped to land on a stop says nothing about the step size
      if (!lands || factor < 1.0) dt = trial * factor;
    } else {
      ++out.rejected_steps;
      dt = trial * factor;
    }
    if (t < t1 && dt < options.min_step) {
      std::ostringstream msg;
      msg << "step-size underflow at t=" << t << " ns";
      throw NumericalError(msg.str());
    }
  }
  return out;
}

Propagation propagate(const HamiltonianFamily& family, const ControlSchedule& schedule, const Vector& initial,
                      const PropagationOptions& options) {
  const CoefficientFunction coefficients = [&](double t, std::vector<double>& c) {
    c = family.coefficients(schedule.angle(t));
  };
  return propagate(family.affine(), coefficients, 0.0, schedule.total_time(), initial, options);
}

double average_gate_fidelity(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& target) {
  if (m.rows() != m.cols() || target.rows() != target.cols() || m.rows() != target.rows())
    throw InvalidArgument("average_gate_fidelity: matrix shapes differ");
  const double d = static_cast<double>(m.rows());
  const double tr_mm = (m.adjoint() * m).trace().real();
  const double overlap = std::norm((target.adjoint() * m).trace());
  return (tr_mm + overlap) / (d * (d + 1.0));
}

Eigen::MatrixXcd remove_global_phase(const Eigen::MatrixXcd& m) {
  const double mag = std::abs(m(0, 0));
  if (mag == 0.0) return m;
  return m * (std::conj(m(0, 0)) / mag);
}

namespace {

struct LogicalPair {
  Vector even;
  Vector odd;
  double omega_even = 0.0;
  double omega_odd = 0.0;
};

LogicalPair logical_pair(const HamiltonianFamily& family, double phi, const OperatorMatrix& parity,
                         const SpectralOptions& options) {
  const SpectralResult s = lowest_eigenpairs(family.at(phi), 4, &parity, options);
  LogicalPair out;
  int found = 0;
  for (int n = 0; n < 2; ++n) {
    if (s.parities[n] == 1) {
      out.even = s.states.col(n);
      out.omega_even = s.energies(n);
      found |= 1;
    } else if (s.parities[n] == -1) {
      out.odd = s.states.col(n);
      out.omega_odd = s.energies(n);
      found |= 2;
    }
  }
  if (found != 3) {
    std::ostringstream msg;
    msg << "lowest doublet at phi=" << phi << " is not an even/odd parity pair";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

GateResult logical_propagator(const HamiltonianFamily& family, const ControlSchedule& schedule,
                              const GateOptions& options, std::span<const double> snapshot_times) {
  if (options.phase_samples < 3 || options.phase_samples % 2 == 0)
    throw InvalidArgument("phase_samples must be odd and at least 3");
  const OperatorMatrix parity = parity_operator(family.space());
  const double total = schedule.total_time();
  const LogicalPair start = logical_pair(family, schedule.angle(0.0), parity, options.spectral);
  LogicalPair finish = logical_pair(family, schedule.angle(total), parity, options.spectral);

  // align the final basis gauge with the initial one
  for (auto [from, to] : {std::pair{&start.even, &finish.even}, std::pair{&start.odd, &finish.odd}}) {
    const cplx ov = from->dot(*to);
    if (std::abs(ov) > 0.5) *to *= std::conj(ov) / std::abs(ov);
  }
  GateResult result;
  result.gate_time = total;
  {
    double s = 0.0;
    for (const Vector* a : {&start.even, &start.odd}) {
      for (const Vector* b : {&finish.even, &finish.odd}) s += std::norm(a->dot(*b));
    }
    result.basis_overlap = std::sqrt(s / 2.0);
  }
  if (result.basis_overlap < 0.9) throw NumericalError("basis mismatch between initial and final logical doublets");

  PropagationOptions prop = options.propagation;
  prop.snapshot_times.assign(snapshot_times.begin(), snapshot_times.end());
  std::array<Propagation, 2> runs;
  const std::array<const Vector*, 2> inputs{&start.even, &start.odd};
  parallel_for(2, [&](std::size_t j) { runs[j] = propagate(family, schedule, *inputs[j], prop); });

  // dynamical phases of the instantaneous doublet, Simpson in t
  const int ns = options.phase_samples;
  std::vector<LogicalPair> samples(ns);
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t i) {
    const double t = total * static_cast<double>(i) / (ns - 1);
    samples[i] = logical_pair(family, schedule.angle(t), parity, options.spectral);
  });
  double phase_even = 0.0, phase_odd = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double w = (i == 0 || i == ns - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    phase_even += w * samples[i].omega_even;
    phase_odd += w * samples[i].omega_odd;
  }
  const double h = total / (ns - 1);
  phase_even *= h / 3.0;
  phase_odd *= h / 3.0;
  result.dynamical_phase = phase_odd - phase_even;

  Eigen::Matrix2cd m;
  const std::array<const Vector*, 2> outputs{&finish.even, &finish.odd};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m(i, j) = outputs[i]->dot(runs[j].state);
  }
  Eigen::Matrix2cd frame = m;
  frame.col(0) *= std::exp(cplx(0.0, phase_even));
  frame.col(1) *= std::exp(cplx(0.0, phase_odd));

  const Eigen::Matrix2cd z = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
  result.raw_propagator = remove_global_phase(m);
  result.projected_propagator = remove_global_phase(frame);
  result.fidelity = average_gate_fidelity(result.projected_propagator, z);
  result.fidelity_raw = average_gate_fidelity(result.raw_propagator, z);
  result.leakage = 1.0 - (m.adjoint() * m).trace().real() / 2.0;
  result.accepted_steps = runs[0].accepted_steps + runs[1].accepted_steps;
  result.rejected_steps = runs[0].rejected_steps + runs[1].rejected_steps;
  result.norm_drift = std::max(runs[0].norm_drift, runs[1].norm_drift);

  for (std::size_t k = 0; k < runs[0].snapshots.size(); ++k) {
    GateSnapshot snap;
    snap.time = runs[0].snapshots[k].time;
    snap.phi = schedule.angle(snap.time);
    snap.even = runs[0].snapshots[k].state;
    snap.odd = runs[1].snapshots[k].state;
    result.trajectory.push_back(std::move(snap));
  }
  return result;
}

}  // namespace cos2q
