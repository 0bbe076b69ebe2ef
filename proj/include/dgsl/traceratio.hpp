#pragma once

#include <optional>
#include <vector>

#include "dgsl/linalg.hpp"

namespace dgsl {

struct TraceRatioOptions {
  int max_iter = 20;  // eigen-iterations per solve
  double tol = 1e-8;  // stop when |rho_{t+1} - rho_t| < tol
};

struct TraceRatioResult {
  Matrix h;  // k x n, rows orthonormal
  double rho = 0.0;
  int iterations = 0;
  // Ratios of the ridged problem, starting with the initial iterate. These are
  // the quantities the iteration increases monotonically.
  std::vector<double> rho_trace;
};

// Ridge added to the denominator matrix: 1e-10 * (1 + Tr(E)/n).
double denominator_ridge(const Matrix& e);

/// Maximizes Tr(H B H^T) / Tr(H E H^T) over row-orthonormal k x n H by
/// repeatedly taking the top-k eigenvectors of B - rho E.
///
/// E is ridged by denominator_ridge(E) to keep the ratio defined on its
/// nullspace. Without an initial iterate the top-k eigenvectors of B are
/// used. An eigen-step that would decrease rho is rejected and ends the
/// iteration. The returned rho is evaluated against the unridged E.
TraceRatioResult trace_ratio_solve(const Matrix& b, const Matrix& e, Index k,
                                   const TraceRatioOptions& options = {},
                                   const std::optional<Matrix>& h0 = std::nullopt);

struct EmbeddingProblem {
  double alpha1 = 0.0;
  double alpha2 = 1.0;
  double lambda_m = 1.0;
  Index k = 2;
  bool normalize = false;
};

/// One H-update: fuses Z, W and M into W~, takes E = L_W~ (or its normalized
/// form) and B = L_C, then runs trace_ratio_solve.
TraceRatioResult solve_h(const Matrix& z, const Matrix& w, const Matrix& must,
                         const Matrix& cannot, const EmbeddingProblem& problem,
                         const TraceRatioOptions& options = {},
                         const std::optional<Matrix>& h0 = std::nullopt);

}  // namespace dgsl
