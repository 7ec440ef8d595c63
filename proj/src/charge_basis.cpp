#include "cos2q/charge_basis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cos2q/error.hpp"

namespace cos2q {

namespace {

using Triplet = Eigen::Triplet<cplx, int>;

SparseMatrix from_triplets(int dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void check_harmonic(const ModeSpec& mode, int m) {
  if (std::abs(m) > 2 * mode.n_cut) {
    throw InvalidArgument("harmonic exceeds cutoff: m=" + std::to_string(m) +
                          ", n_cut=" + std::to_string(mode.n_cut));
  }
}

}  // namespace

void ModeSpec::validate() const {
  if (n_cut < 1) throw InvalidArgument("mode n_cut must be >= 1");
  if (!(charging_energy > 0.0) || !std::isfinite(charging_energy)) {
    throw InvalidArgument("mode charging energy must be positive and finite");
  }
  if (!std::isfinite(n_offset)) throw InvalidArgument("mode offset charge must be finite");
}

OperatorMatrix::OperatorMatrix(SparseMatrix entries, bool hermitian)
    : entries_(std::move(entries)), hermitian_(hermitian) {
  entries_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(int dimension) {
  SparseMatrix m(dimension, dimension);
  m.setIdentity();
  return {std::move(m), true};
}

OperatorMatrix OperatorMatrix::zero(int dimension) { return {SparseMatrix(dimension, dimension), true}; }

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  entries_ = SparseMatrix(entries_ + other.entries_);
  entries_.makeCompressed();
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  entries_ = SparseMatrix(entries_ - other.entries_);
  entries_.makeCompressed();
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(double scale) {
  entries_ *= scale;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  SparseMatrix product = (a.entries() * b.entries()).pruned();
  return {std::move(product), false};
}

double max_asymmetry(const OperatorMatrix& op) {
  const SparseMatrix adjoint = op.entries().adjoint();
  const SparseMatrix diff = op.entries() - adjoint;
  double worst = 0.0;
  for (int k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b) {
  const SparseMatrix diff = a.entries() - b.entries();
  double worst = 0.0;
  for (int k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  SparseMatrix c = a.entries() * b.entries() - b.entries() * a.entries();
  return {std::move(c), false};
}

OperatorMatrix number_operator(const ModeSpec& mode) {
  mode.validate();
  std::vector<Triplet> t;
  for (int n = -mode.n_cut; n <= mode.n_cut; ++n) {
    const int i = n + mode.n_cut;
    t.emplace_back(i, i, cplx(n - mode.n_offset, 0.0));
  }
  return {from_triplets(mode.dimension(), t), true};
}

OperatorMatrix shift_operator(const ModeSpec& mode, int m) {
  mode.validate();
  check_harmonic(mode, m);
  const int dim = mode.dimension();
  std::vector<Triplet> t;
  for (int col = 0; col < dim; ++col) {
    const int row = col + m;
    if (row >= 0 && row < dim) t.emplace_back(row, col, cplx(1.0, 0.0));
  }
  return {from_triplets(dim, t), m == 0};
}

OperatorMatrix harmonic_operator(const ModeSpec& mode, int m, Harmonic kind) {
  mode.validate();
  if (m < 1) throw InvalidArgument("harmonic order must be >= 1");
  check_harmonic(mode, m);
  const int dim = mode.dimension();
  // cos: (S^m + S^-m)/2, sin: (S^m - S^-m)/(2i); entries +-1/2 or -+i/2.
  const cplx up = kind == Harmonic::cos ? cplx(0.5, 0.0) : cplx(0.0, -0.5);
  std::vector<Triplet> t;
  for (int row = 0; row < dim; ++row) {
    if (row - m >= 0) t.emplace_back(row, row - m, up);
    if (row + m < dim) t.emplace_back(row, row + m, std::conj(up));
  }
  return {from_triplets(dim, t), true};
}

OperatorMatrix two_mode_embed(const OperatorMatrix& op_theta, const OperatorMatrix& op_phi) {
  const SparseMatrix& a = op_theta.entries();
  const SparseMatrix& b = op_phi.entries();
  const int db = static_cast<int>(b.rows());
  const int dim = static_cast<int>(a.rows()) * db;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
  for (int ra = 0; ra < a.outerSize(); ++ra) {
    for (SparseMatrix::InnerIterator ia(a, ra); ia; ++ia) {
      for (int rb = 0; rb < b.outerSize(); ++rb) {
        for (SparseMatrix::InnerIterator ib(b, rb); ib; ++ib) {
          t.emplace_back(ra * db + rb, static_cast<int>(ia.col()) * db + static_cast<int>(ib.col()),
                         ia.value() * ib.value());
        }
      }
    }
  }
  return {from_triplets(dim, t), op_theta.hermitian() && op_phi.hermitian()};
}

OperatorMatrix joint_harmonic(const TwoModeSpace& space, int m_theta, int m_phi, Harmonic kind) {
  space.validate();
  check_harmonic(space.theta, m_theta);
  check_harmonic(space.phi, m_phi);
  // X = e^{i(m_theta theta - m_phi phi)}; cos = (X + X^dag)/2, sin = (X - X^dag)/(2i).
  const OperatorMatrix x = two_mode_embed(shift_operator(space.theta, m_theta), shift_operator(space.phi, -m_phi));
  const SparseMatrix& xe = x.entries();
  const SparseMatrix xd = xe.adjoint();
  SparseMatrix out = kind == Harmonic::cos ? SparseMatrix(0.5 * (xe + xd)) : SparseMatrix(cplx(0.0, -0.5) * (xe - xd));
  out.prune(cplx(0.0, 0.0));
  return {std::move(out), true};
}

OperatorMatrix parity_operator(const ModeSpec& mode) {
  mode.validate();
  if (mode.n_offset != 0.0) throw InvalidArgument("parity undefined at nonzero offset");
  const int dim = mode.dimension();
  std::vector<Triplet> t;
  for (int i = 0; i < dim; ++i) t.emplace_back(dim - 1 - i, i, cplx(1.0, 0.0));
  return {from_triplets(dim, t), true};
}

OperatorMatrix parity_operator(const TwoModeSpace& space) {
  return two_mode_embed(parity_operator(space.theta), parity_operator(space.phi));
}

}  // namespace cos2q
