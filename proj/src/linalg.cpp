#include "dgsl/linalg.hpp"

#include <sstream>
#include <string>

#include "dgsl/errors.hpp"

namespace dgsl {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DataError(std::string(what) + ": matrix contains NaN or Inf");
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw InvalidArgument(os.str());
  }
}

Matrix symmetrize(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

std::vector<EigPair> sym_eig_topk(const Matrix& m, Index k) {
  require_square(m, "sym_eig_topk");
  const Index n = m.rows();
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "sym_eig_topk: k=" << k << " out of range [1, " << n << "]";
    throw InvalidArgument(os.str());
  }
  require_finite(m, "sym_eig_topk");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eig_topk: eigendecomposition did not converge");
  }
  // Eigen returns eigenvalues in increasing order.
  std::vector<EigPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const Index col = n - 1 - i;
    EigPair p;
    p.value = solver.eigenvalues()(col);
    p.vector = solver.eigenvectors().col(col).normalized();
    fix_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

Matrix top_eigenvector_rows(const Matrix& m, Index k) {
  const auto pairs = sym_eig_topk(m, k);
  Matrix rows(k, m.rows());
  for (Index i = 0; i < k; ++i) {
    rows.row(i) = pairs[static_cast<std::size_t>(i)].vector.transpose();
  }
  return rows;
}

Matrix spd_solve(const Matrix& k, const Matrix& b) {
  require_square(k, "spd_solve");
  if (b.rows() != k.rows()) {
    std::ostringstream os;
    os << "spd_solve: right-hand side has " << b.rows() << " rows, expected "
       << k.rows();
    throw InvalidArgument(os.str());
  }
  Eigen::LLT<Matrix> llt(symmetrize(k));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("spd_solve: matrix is not positive definite");
  }
  return llt.solve(b);
}

}  // namespace dgsl
