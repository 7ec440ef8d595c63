#pragma once

#include <span>
#include <vector>

#include "cos2q/charge_basis.hpp"

namespace cos2q {

/// A fixed set of operator blocks sharing one sparsity pattern, combined
/// with real scalar coefficients: H(c) = sum_b c_b B_b. Time-dependent
/// Hamiltonians are evaluated through this type without re-sparsifying.
class AffineOperator {
 public:
  AffineOperator() = default;
  explicit AffineOperator(const std::vector<OperatorMatrix>& blocks);

  std::size_t block_count() const { return block_values_.size(); }
  int dimension() const { return static_cast<int>(pattern_.rows()); }
  bool hermitian() const { return hermitian_; }

  /// Overwrites the values of `out` (which must carry pattern()).
  void assemble_into(std::span<const double> coefficients, SparseMatrix& out) const;
  OperatorMatrix assemble(std::span<const double> coefficients) const;

  /// Union pattern with zero values.
  const SparseMatrix& pattern() const { return pattern_; }
  std::span<const cplx> block_values(std::size_t b) const { return block_values_[b]; }

 private:
  SparseMatrix pattern_;
  std::vector<std::vector<cplx>> block_values_;
  bool hermitian_ = true;
};

}  // namespace cos2q
