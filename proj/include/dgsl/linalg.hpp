#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dgsl {

// Column-major double matrix. Data points are stored as columns (X is d x n,
// embeddings H are k x n).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct EigPair {
  double value = 0.0;
  Vector vector;  // unit 2-norm
};

// Throws DataError if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

// Throws InvalidArgument unless m is square.
void require_square(const Matrix& m, std::string_view what);

// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

/// The k largest eigenpairs of (M + M^T)/2, sorted by descending eigenvalue.
///
/// Eigenvectors are sign-normalized so that their largest-magnitude entry is
/// positive, which makes results reproducible across runs.
std::vector<EigPair> sym_eig_topk(const Matrix& m, Index k);

/// Same as sym_eig_topk but packs the eigenvectors as the rows of a k x n
/// matrix, the layout used for embeddings.
Matrix top_eigenvector_rows(const Matrix& m, Index k);

/// Solves K A = B for symmetric positive-definite K via Cholesky.
/// Throws NumericalError when the factorization fails.
Matrix spd_solve(const Matrix& k, const Matrix& b);

}  // namespace dgsl
