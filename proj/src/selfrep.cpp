#include "dgsl/selfrep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgsl/errors.hpp"
#include "dgsl/graph.hpp"

namespace dgsl {

namespace {

constexpr double kDenominatorFloor = 1e-12;
constexpr double kTinyColumn = 1e-12;

}  // namespace

ThetaMatrix::ThetaMatrix(Matrix values) : values_(std::move(values)) {
  require_square(values_, "ThetaMatrix");
  require_finite(values_, "ThetaMatrix");
  if ((values_.array() < 0.0).any()) {
    throw InvalidArgument("ThetaMatrix: thresholds must be nonnegative");
  }
}

AUpdate::AUpdate(const Matrix& x, double lambda)
    : gram_(x.transpose() * x), lambda_(lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("A-update: lambda must be > 0");
  require_finite(x, "A-update");
  Matrix k = gram_;
  k.diagonal().array() += lambda;
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("A-update: X^T X + lambda I is not positive definite");
  }
}

Matrix AUpdate::operator()(const Matrix& z) const {
  if (z.rows() != gram_.rows() || z.cols() != gram_.cols()) {
    throw InvalidArgument("A-update: Z has the wrong shape");
  }
  return llt_.solve(gram_ + lambda_ * z);
}

Matrix update_a(const Matrix& x, const Matrix& z, double lambda) {
  return AUpdate(x, lambda)(z);
}

ThetaMatrix build_theta(const Matrix& h, const Matrix& cannot, double alpha1,
                        double lambda, double lambda_z, bool normalize) {
  if (!(alpha1 > 0.0) || !(lambda > 0.0) || lambda_z < 0.0) {
    throw InvalidArgument("build_theta: need alpha1 > 0, lambda > 0, lambda_z >= 0");
  }
  const double denom = trace_quadratic(h, laplacian(cannot));
  if (!(denom > kDenominatorFloor)) {
    std::ostringstream os;
    os << "cannot-link term vanished: Tr(H L_C H^T) = " << denom;
    throw NumericalError(os.str());
  }

  Matrix cols = h;
  if (normalize) {
    for (Index i = 0; i < cols.cols(); ++i) {
      const double norm = cols.col(i).norm();
      if (norm < kTinyColumn) {
        cols.col(i).setZero();
      } else {
        cols.col(i) /= norm;
      }
    }
  }
  const Index n = cols.cols();
  Matrix dist2 = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double d = (cols.col(i) - cols.col(j)).squaredNorm();
      dist2(i, j) = d;
      dist2(j, i) = d;
    }
  }

  Matrix theta = (alpha1 / (2.0 * lambda * denom)) * dist2;
  theta.array() += lambda_z / lambda;
  return ThetaMatrix(std::move(theta));
}

Matrix update_z(const Matrix& a, const ThetaMatrix& theta) {
  const Matrix& t = theta.values();
  if (a.rows() != t.rows() || a.cols() != t.cols()) {
    throw InvalidArgument("update_z: A and Theta shapes differ");
  }
  Matrix z = a.binaryExpr(t, [](double v, double thr) {
    const double mag = std::abs(v) - thr;
    if (mag <= 0.0) return 0.0;
    return v > 0.0 ? mag : -mag;
  });
  z.diagonal().setZero();
  return z;
}

double selfrep_objective(const Matrix& x, const Matrix& a, const Matrix& z,
                         double lambda, double lambda_z) {
  return 0.5 * (x - x * a).squaredNorm() + 0.5 * lambda * (a - z).squaredNorm() +
         lambda_z * z.cwiseAbs().sum();
}

Matrix column_max_scaled_abs(const Matrix& z) {
  Matrix out = z.cwiseAbs();
  for (Index c = 0; c < out.cols(); ++c) {
    const double top = out.col(c).maxCoeff();
    if (top > 0.0) out.col(c) /= top;
  }
  return out;
}

Matrix selfrep_affinity(const Matrix& x, double lambda, double lambda_z,
                        const SelfRepOptions& options) {
  if (lambda_z < 0.0) throw InvalidArgument("selfrep_affinity: lambda_z < 0");
  const Index n = x.cols();
  const AUpdate a_update(x, lambda);
  const ThetaMatrix theta(Matrix::Constant(n, n, lambda_z / lambda));

  Matrix z = Matrix::Zero(n, n);
  double previous = selfrep_objective(x, z, z, lambda, lambda_z);
  for (int it = 0; it < options.max_iter; ++it) {
    const Matrix a = a_update(z);
    z = update_z(a, theta);
    const double current = selfrep_objective(x, a, z, lambda, lambda_z);
    const double change = std::abs(previous - current);
    previous = current;
    if (change <= options.rel_tol * std::max(1.0, std::abs(current))) break;
  }
  return column_max_scaled_abs(z);
}

}  // namespace dgsl
