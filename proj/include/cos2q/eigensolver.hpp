#pragma once

#include <optional>

#include "cos2q/charge_basis.hpp"

namespace cos2q {

struct EigenOptions {
  double tolerance = 1e-10;  // residual bound relative to the norm estimate of H
  int block_size = 4;        // >= the largest multiplicity expected among wanted levels
  int max_basis = 0;         // 0 selects min(dim, max(160, 6k))
  int max_restarts = 40;
  std::optional<double> shift;  // explicit shift; must lie below the spectrum
  int dense_threshold = 64;     // dimensions at or below this are solved densely
};

struct Eigenpairs {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns, orthonormal
  Eigen::VectorXd residuals;  // ||H v - w v||
  double norm_estimate = 0.0;  // max absolute row sum of H
  double shift = 0.0;
  int basis_vectors = 0;  // Krylov vectors generated in total
};

/// k lowest eigenpairs of a Hermitian operator by shift-invert block Lanczos
/// (explicit restarts, full reorthogonalization, Rayleigh-Ritz on H). Throws
/// NumericalError with the residuals reached when it does not converge.
Eigenpairs lowest_eigenpairs_sparse(const OperatorMatrix& h, int k, const EigenOptions& options = {});

/// Full dense diagonalization; the k lowest pairs are returned.
Eigenpairs dense_eigenpairs(const OperatorMatrix& h, int k);

/// Dense below options.dense_threshold, sparse otherwise.
Eigenpairs lowest_eigenpairs_auto(const OperatorMatrix& h, int k, const EigenOptions& options = {});

/// Number of eigenvalues of h strictly below sigma (Sylvester inertia of an
/// LDL^H factorization of h - sigma).
int count_eigenvalues_below(const OperatorMatrix& h, double sigma);

}  // namespace cos2q
