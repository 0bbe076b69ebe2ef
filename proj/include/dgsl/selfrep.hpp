#pragma once

#include <Eigen/Cholesky>

#include "dgsl/linalg.hpp"

namespace dgsl {

// Entrywise shrinkage thresholds for the Z-update. Entries are nonnegative.
class ThetaMatrix {
 public:
  explicit ThetaMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index size() const { return values_.rows(); }

 private:
  Matrix values_;
};

/// Closed-form minimizer of 1/2 |X - XA|^2 + lambda/2 |A - Z|^2, i.e.
/// A = (X^T X + lambda I)^{-1} (X^T X + lambda Z).
///
/// The Cholesky factor depends only on X and lambda, so one instance serves
/// every outer iteration of a fit.
class AUpdate {
 public:
  AUpdate(const Matrix& x, double lambda);

  Matrix operator()(const Matrix& z) const;

  const Matrix& gram() const { return gram_; }
  double lambda() const { return lambda_; }

 private:
  Matrix gram_;
  double lambda_;
  Eigen::LLT<Matrix> llt_;
};

Matrix update_a(const Matrix& x, const Matrix& z, double lambda);

/// Theta_ij = alpha1 |h_i - h_j|^2 / (2 lambda Tr(H L_C H^T)) + lambda_z / lambda.
///
/// With normalize set the distances use unit-length columns of H (columns
/// shorter than 1e-12 count as zero); the trace always uses the raw H.
/// Throws NumericalError when Tr(H L_C H^T) <= 1e-12.
ThetaMatrix build_theta(const Matrix& h, const Matrix& cannot, double alpha1,
                        double lambda, double lambda_z, bool normalize);

/// Soft-thresholds A by Theta and zeroes the diagonal.
Matrix update_z(const Matrix& a, const ThetaMatrix& theta);

/// 1/2 |X - XA|^2 + lambda/2 |A - Z|^2 + lambda_z |Z|_1
double selfrep_objective(const Matrix& x, const Matrix& a, const Matrix& z,
                         double lambda, double lambda_z);

struct SelfRepOptions {
  int max_iter = 30;
  double rel_tol = 1e-8;
};

/// Standalone sparse self-representation affinity: alternates the A-update
/// with a constant-threshold (lambda_z / lambda) Z-update, then returns |Z|
/// with every nonzero column scaled to a maximum of 1.
Matrix selfrep_affinity(const Matrix& x, double lambda, double lambda_z,
                        const SelfRepOptions& options = {});

// Column i becomes |z_i| / max|z_i|; zero columns stay zero.
Matrix column_max_scaled_abs(const Matrix& z);

}  // namespace dgsl
