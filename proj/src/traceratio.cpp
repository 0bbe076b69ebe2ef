#include "dgsl/traceratio.hpp"

#include <cmath>
#include <sstream>

#include "dgsl/errors.hpp"
#include "dgsl/graph.hpp"

namespace dgsl {

namespace {

constexpr double kDenominatorFloor = 1e-12;
constexpr double kOrthonormalTol = 1e-8;

double ratio(const Matrix& h, const Matrix& b, const Matrix& e) {
  const double den = trace_quadratic(h, e);
  if (!(den > kDenominatorFloor)) {
    std::ostringstream os;
    os << "trace ratio: degenerate denominator Tr(H E H^T) = " << den;
    throw NumericalError(os.str());
  }
  return trace_quadratic(h, b) / den;
}

}  // namespace

double denominator_ridge(const Matrix& e) {
  const double n = static_cast<double>(e.rows());
  return 1e-10 * (1.0 + e.trace() / n);
}

TraceRatioResult trace_ratio_solve(const Matrix& b, const Matrix& e, Index k,
                                   const TraceRatioOptions& options,
                                   const std::optional<Matrix>& h0) {
  require_square(b, "trace_ratio_solve");
  require_square(e, "trace_ratio_solve");
  const Index n = b.rows();
  if (e.rows() != n) throw InvalidArgument("trace_ratio_solve: B and E differ in size");
  if (k < 1 || k >= n) {
    std::ostringstream os;
    os << "trace_ratio_solve: k=" << k << " must lie in [1, " << n - 1 << "]";
    throw InvalidArgument(os.str());
  }
  if (options.max_iter < 1) throw InvalidArgument("trace_ratio_solve: max_iter < 1");
  require_finite(b, "trace_ratio_solve");
  require_finite(e, "trace_ratio_solve");

  const Matrix bs = symmetrize(b);
  Matrix es = symmetrize(e);
  es.diagonal().array() += denominator_ridge(e);

  TraceRatioResult out;
  if (h0) {
    if (h0->rows() != k || h0->cols() != n) {
      throw InvalidArgument("trace_ratio_solve: initial H has the wrong shape");
    }
    const Matrix gram = *h0 * h0->transpose();
    if ((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > kOrthonormalTol) {
      throw InvalidArgument("trace_ratio_solve: initial H rows are not orthonormal");
    }
    out.h = *h0;
  } else {
    out.h = top_eigenvector_rows(bs, k);
  }

  double rho = ratio(out.h, bs, es);
  out.rho_trace.push_back(rho);
  for (int it = 0; it < options.max_iter; ++it) {
    Matrix candidate = top_eigenvector_rows(bs - rho * es, k);
    const double next = ratio(candidate, bs, es);
    ++out.iterations;
    if (next < rho) break;  // round-off at convergence; keep the better iterate
    out.h = std::move(candidate);
    out.rho_trace.push_back(next);
    const double delta = next - rho;
    rho = next;
    if (delta < options.tol) break;
  }
  // Report against the unridged E unless H sits in its nullspace.
  const double raw_den = trace_quadratic(out.h, symmetrize(e));
  out.rho = raw_den > kDenominatorFloor ? trace_quadratic(out.h, bs) / raw_den
                                        : rho;
  return out;
}

TraceRatioResult solve_h(const Matrix& z, const Matrix& w, const Matrix& must,
                         const Matrix& cannot, const EmbeddingProblem& problem,
                         const TraceRatioOptions& options,
                         const std::optional<Matrix>& h0) {
  const Matrix fused = fuse_affinity(z, w, must, problem.alpha1, problem.alpha2,
                                     problem.lambda_m, problem.normalize);
  const Matrix e = problem.normalize ? normalized_laplacian(fused) : laplacian(fused);
  return trace_ratio_solve(laplacian(cannot), e, problem.k, options, h0);
}

}  // namespace dgsl
