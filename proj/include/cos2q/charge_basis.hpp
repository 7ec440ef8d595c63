#pragma once

// Charge-basis operators for compact phase modes.
//
// A mode with cutoff n_cut spans charge states n = -n_cut..n_cut, stored at
// index n + n_cut. Two-mode operators use the fixed ordering (theta, phi):
// index = (n_theta + n_cut_theta) * d_phi + (n_phi + n_cut_phi), i.e. the
// Kronecker product A_theta (x) A_phi. Shift operators annihilate the
// truncation boundary; there is no wraparound.

#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cos2q {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;
using Vector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Converts an energy quoted as E/h in GHz to angular frequency in rad/ns.
constexpr double angular_from_ghz(double ghz) { return two_pi * ghz; }
constexpr double ghz_from_angular(double omega) { return omega / two_pi; }

struct ModeSpec {
  int n_cut = 15;
  double charging_energy = 1.0;  // E_C, angular units
  double n_offset = 0.0;

  int dimension() const { return 2 * n_cut + 1; }
  void validate() const;
};

struct TwoModeSpace {
  ModeSpec theta;
  ModeSpec phi;

  int dimension() const { return theta.dimension() * phi.dimension(); }
  int index(int n_theta, int n_phi) const {
    return (n_theta + theta.n_cut) * phi.dimension() + (n_phi + phi.n_cut);
  }
  void validate() const {
    theta.validate();
    phi.validate();
  }
};

enum class Harmonic { cos, sin };

/// Sparse complex matrix on a charge basis. When `hermitian()` is set the
/// stored entries satisfy A == A^dagger exactly.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(SparseMatrix entries, bool hermitian);

  int dimension() const { return static_cast<int>(entries_.rows()); }
  const SparseMatrix& entries() const { return entries_; }
  bool hermitian() const { return hermitian_; }

  static OperatorMatrix identity(int dimension);
  static OperatorMatrix zero(int dimension);

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(double scale);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

  Vector apply(const Vector& x) const { return entries_ * x; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries_); }

  /// Expectation-style bilinear form <a|A|b>.
  cplx matrix_element(const Vector& a, const Vector& b) const { return a.dot(entries_ * b); }

 private:
  SparseMatrix entries_;
  bool hermitian_ = false;
};

/// max |A - A^dagger| over all entries.
double max_asymmetry(const OperatorMatrix& op);

/// max |A - B| over all entries.
double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b);

/// Commutator [A, B] as a general (non-Hermitian) operator.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

OperatorMatrix number_operator(const ModeSpec& mode);

/// cos(m theta) or sin(m theta) for 1 <= m <= 2 n_cut.
OperatorMatrix harmonic_operator(const ModeSpec& mode, int m, Harmonic kind);

/// e^{i m theta}: raises the charge by m.
OperatorMatrix shift_operator(const ModeSpec& mode, int m);

/// Kronecker product with theta first.
OperatorMatrix two_mode_embed(const OperatorMatrix& op_theta, const OperatorMatrix& op_phi);

/// cos(m_theta theta - m_phi phi) or the sine; |m| <= 2 n_cut on each mode.
OperatorMatrix joint_harmonic(const TwoModeSpace& space, int m_theta, int m_phi, Harmonic kind);

/// |n_theta, n_phi> -> |-n_theta, -n_phi>. Requires zero offset charge.
OperatorMatrix parity_operator(const TwoModeSpace& space);

/// Same for a single mode.
OperatorMatrix parity_operator(const ModeSpec& mode);

}  // namespace cos2q
