#include "cos2q/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "cos2q/error.hpp"
#include "cos2q/kernels.hpp"

namespace cos2q {

namespace {

using ColMajorSparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using Factorization = Eigen::SimplicialLDLT<ColMajorSparse, Eigen::Lower>;

// Deterministic start vectors; independent of the standard library's
// distribution implementations.
Eigen::MatrixXcd deterministic_block(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(uniform(), uniform());
  }
  return m;
}

double row_sum_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int r = 0; r < m.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

Vector multiply(const OperatorMatrix& h, const Vector& x) {
  Vector y(x.size());
  kernels::spmv(kernels::CsrView::of(h.entries()), {x.data(), static_cast<std::size_t>(x.size())},
                {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

Eigen::MatrixXcd multiply(const OperatorMatrix& h, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd y(x.rows(), x.cols());
  for (int j = 0; j < x.cols(); ++j) y.col(j) = multiply(h, Vector(x.col(j)));
  return y;
}

// Smallest Ritz value of a short Lanczos run and its residual.
std::pair<double, double> lowest_ritz_estimate(const OperatorMatrix& h, int steps) {
  const int n = h.dimension();
  steps = std::min(steps, n);
  Eigen::MatrixXcd v(n, steps + 1);
  v.col(0) = deterministic_block(n, 1, 0x5eed0001).col(0).normalized();
  std::vector<double> a, b;
  int m = 0;
  for (int j = 0; j < steps; ++j) {
    Vector w = multiply(h, Vector(v.col(j)));
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = v.leftCols(j + 1).adjoint() * w;
      w -= v.leftCols(j + 1) * c;
      if (pass == 0) a.push_back(c(j).real());
    }
    const double beta = w.norm();
    m = j + 1;
    if (beta < 1e-12 * std::max(1.0, std::abs(a.back()))) {
      b.push_back(0.0);
      break;
    }
    b.push_back(beta);
    v.col(j + 1) = w / beta;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = a[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = b[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const double theta = es.eigenvalues()(0);
  const double residual = std::abs(b[static_cast<std::size_t>(m - 1)] * es.eigenvectors()(m - 1, 0));
  return {theta, residual};
}

ColMajorSparse shifted(const OperatorMatrix& h, double sigma) {
  ColMajorSparse a = h.entries();
  ColMajorSparse id(a.rows(), a.cols());
  id.setIdentity();
  a -= sigma * id;
  a.makeCompressed();
  return a;
}

int negative_pivots(const Factorization& f) {
  int count = 0;
  const auto d = f.vectorD();
  for (int i = 0; i < d.size(); ++i) {
    if (d(i).real() < 0.0) ++count;
  }
  return count;
}

// Orthonormalizes w against v (first `used` columns) twice, then within
// itself; columns that collapse are replaced by fresh deterministic ones.
Eigen::MatrixXcd orthonormal_block(const Eigen::MatrixXcd& v, int used, Eigen::MatrixXcd w, std::uint64_t& seed) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) w -= v.leftCols(used) * (v.leftCols(used).adjoint() * w);
    }
    bool collapsed = false;
    for (int j = 0; j < w.cols(); ++j) {
      const double before = w.col(j).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (j > 0) w.col(j) -= w.leftCols(j) * (w.leftCols(j).adjoint() * w.col(j));
        if (used > 0) w.col(j) -= v.leftCols(used) * (v.leftCols(used).adjoint() * w.col(j));
      }
      const double after = w.col(j).norm();
      if (!(after > 1e-10 * before) || after == 0.0) {
        w.col(j) = deterministic_block(static_cast<int>(w.rows()), 1, ++seed).col(0);
        collapsed = true;
        break;
      }
      w.col(j) /= after;
    }
    if (!collapsed) return w;
  }
  throw NumericalError("eigensolver could not extend the Krylov basis");
}

}  // namespace

int count_eigenvalues_below(const OperatorMatrix& h, double sigma) {
  Factorization f(shifted(h, sigma));
  if (f.info() != Eigen::Success) throw NumericalError("LDL factorization failed");
  return negative_pivots(f);
}

Eigenpairs dense_eigenpairs(const OperatorMatrix& h, int k) {
  const int n = h.dimension();
  if (k < 1 || k > n) throw InvalidArgument("requested eigenpair count out of range");
  Eigen::MatrixXcd dense = h.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  Eigenpairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  out.norm_estimate = row_sum_norm(h.entries());
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i) {
    out.residuals(i) = (dense * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
  }
  return out;
}

Eigenpairs lowest_eigenpairs_sparse(const OperatorMatrix& h, int k, const EigenOptions& options) {
  const int n = h.dimension();
  if (!h.hermitian()) throw InvalidArgument("eigensolver requires a Hermitian operator");
  if (k < 1 || k >= n) throw InvalidArgument("requested eigenpair count must satisfy 1 <= k < dimension");
  const double norm = row_sum_norm(h.entries());
  const double target = options.tolerance * std::max(norm, 1e-300);

  // Shift below the spectrum, certified by inertia.
  double sigma = 0.0;
  Factorization factor;
  if (options.shift) {
    sigma = *options.shift;
    factor.compute(shifted(h, sigma));
    if (factor.info() != Eigen::Success || negative_pivots(factor) != 0) {
      throw InvalidArgument("explicit shift does not lie below the spectrum");
    }
  } else {
    const auto [theta, residual] = lowest_ritz_estimate(h, 60);
    double margin = std::max(residual, 1e-4 * norm);
    for (int attempt = 0;; ++attempt) {
      sigma = theta - margin;
      factor.compute(shifted(h, sigma));
      if (factor.info() == Eigen::Success && negative_pivots(factor) == 0) break;
      if (attempt > 30) throw NumericalError("eigensolver could not place a shift below the spectrum");
      margin *= 4.0;
    }
  }

  const int block = std::clamp(options.block_size, 1, n);
  const int max_basis = std::min(n, options.max_basis > 0 ? options.max_basis : std::max(160, 6 * k));
  if (max_basis < k + block) throw InvalidArgument("eigensolver basis too small for the requested pairs");

  std::uint64_t seed = 0x5eed1000;
  Eigen::MatrixXcd start = deterministic_block(n, block, seed);
  Eigenpairs out;
  out.norm_estimate = norm;
  out.shift = sigma;
  Eigen::VectorXd best_residuals;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::MatrixXcd v(n, max_basis);
    Eigen::MatrixXcd hv(n, max_basis);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(max_basis, max_basis);
    int used = 0;
    Eigen::MatrixXcd next = orthonormal_block(v, 0, start, seed);
    int since_check = 0;
    while (true) {
      const int b = static_cast<int>(next.cols());
      v.middleCols(used, b) = next;
      hv.middleCols(used, b) = multiply(h, next);
      g.block(0, used, used + b, b) = v.leftCols(used + b).adjoint() * hv.middleCols(used, b);
      g.block(used, 0, b, used) = g.block(0, used, used, b).adjoint();
      used += b;
      out.basis_vectors += b;
      since_check += b;

      const bool full = used + b > max_basis;
      if ((used >= k && since_check >= 16) || full) {
        since_check = 0;
        Eigen::MatrixXcd gg = g.topLeftCorner(used, used);
        gg = 0.5 * (gg + gg.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gg);
        const Eigen::MatrixXcd y = es.eigenvectors().leftCols(k);
        const Eigen::MatrixXcd x = v.leftCols(used) * y;
        const Eigen::MatrixXcd hx = hv.leftCols(used) * y;
        Eigen::VectorXd res(k);
        for (int i = 0; i < k; ++i) res(i) = (hx.col(i) - es.eigenvalues()(i) * x.col(i)).norm();
        best_residuals = res;
        if (res.maxCoeff() <= target) {
          out.values = es.eigenvalues().head(k);
          out.vectors = x;
          for (int i = 0; i < k; ++i) out.vectors.col(i).normalize();
          out.residuals = res;
          return out;
        }
        if (full) {
          const int keep = std::min(used, k + block);
          start = v.leftCols(used) * es.eigenvectors().leftCols(keep);
          break;
        }
      }
      Eigen::MatrixXcd w = factor.solve(next);
      next = orthonormal_block(v, used, std::move(w), seed);
    }
  }
  std::ostringstream msg;
  msg << "eigensolver did not converge; target residual " << target << ", reached";
  for (int i = 0; i < best_residuals.size(); ++i) msg << ' ' << best_residuals(i);
  throw NumericalError(msg.str());
}

Eigenpairs lowest_eigenpairs_auto(const OperatorMatrix& h, int k, const EigenOptions& options) {
  if (h.dimension() <= options.dense_threshold) return dense_eigenpairs(h, k);
  return lowest_eigenpairs_sparse(h, k, options);
}

}  // namespace cos2q
