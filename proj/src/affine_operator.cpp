#include "cos2q/affine_operator.hpp"

#include "cos2q/error.hpp"
#include "cos2q/kernels.hpp"

namespace cos2q {

AffineOperator::AffineOperator(const std::vector<OperatorMatrix>& blocks) {
  if (blocks.empty()) throw InvalidArgument("affine operator needs at least one block");
  const int dim = blocks.front().dimension();
  SparseMatrix structure(dim, dim);
  for (const auto& b : blocks) {
    if (b.dimension() != dim) throw InvalidArgument("affine operator blocks differ in dimension");
    SparseMatrix ones = b.entries();
    for (int k = 0; k < ones.nonZeros(); ++k) ones.valuePtr()[k] = cplx(1.0, 0.0);
    structure = SparseMatrix(structure + ones);
    hermitian_ = hermitian_ && b.hermitian();
  }
  structure.makeCompressed();
  pattern_ = structure;
  for (int k = 0; k < pattern_.nonZeros(); ++k) pattern_.valuePtr()[k] = cplx(0.0, 0.0);

  const auto nnz = static_cast<std::size_t>(pattern_.nonZeros());
  for (const auto& b : blocks) {
    std::vector<cplx> aligned(nnz, cplx(0.0, 0.0));
    const SparseMatrix& e = b.entries();
    for (int row = 0; row < dim; ++row) {
      int p = pattern_.outerIndexPtr()[row];
      for (SparseMatrix::InnerIterator it(e, row); it; ++it) {
        while (pattern_.innerIndexPtr()[p] != it.col()) ++p;
        aligned[static_cast<std::size_t>(p)] = it.value();
      }
    }
    block_values_.push_back(std::move(aligned));
  }
}

void AffineOperator::assemble_into(std::span<const double> coefficients, SparseMatrix& out) const {
  if (coefficients.size() != block_values_.size()) throw InvalidArgument("coefficient count mismatch");
  std::vector<std::span<const cplx>> views(block_values_.begin(), block_values_.end());
  kernels::combine(coefficients, views, {out.valuePtr(), static_cast<std::size_t>(out.nonZeros())});
}

OperatorMatrix AffineOperator::assemble(std::span<const double> coefficients) const {
  SparseMatrix out = pattern_;
  assemble_into(coefficients, out);
  return {std::move(out), hermitian_};
}

}  // namespace cos2q
