#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dgsl/graph.hpp"
#include "dgsl/linalg.hpp"

namespace dgsl {

/// Hyperparameters of a DGSL fit. Defaults follow the settings used for most
/// benchmark datasets (lambda = 100, lambda_M = 10, alpha2/alpha1 = 0.2,
/// m = 7, l = 5, eta = 20, T = 50).
struct SolverConfig {
  double lambda = 100.0;
  double lambda_z = 1.0;
  double lambda_m = 10.0;
  double tau = 0.1;            // alpha1 = 2 tau lambda Tr(H1 L_C H1^T)
  double alpha2_ratio = 0.2;   // alpha2 = alpha2_ratio * alpha1
  Index knn_m = 7;
  Index knn_l = 5;
  Index k = 2;                 // embedding dimension = number of classes
  int eta = 20;                // trace-ratio iterations per H-update
  int max_outer = 50;          // T
  double tol_inner = 1e-8;
  double tol_outer = 1e-6;
  bool normalize = true;       // true: with normalization operations
  std::uint64_t seed = 0;      // seeds K-means and constraint sampling downstream
  std::optional<double> alpha1;  // bypasses the tau schedule when set

  // Throws InvalidArgument on the first violated invariant.
  void validate() const;
};

// Resolved weights of the penalized objective.
struct ModelWeights {
  double lambda = 100.0;
  double lambda_z = 0.0;
  double lambda_m = 10.0;
  double alpha1 = 1.0;
  double alpha2 = 0.2;
};

struct StepNorm {
  double a = 0.0;  // |A_{t+1} - A_t|_F
  double z = 0.0;  // |Z_{t+1} - Z_t|_F
};

struct FitResult {
  Matrix a;
  Matrix z;
  Matrix h;
  // objective_trace[t] is f(A, Z, H) after outer iteration t + 1;
  // step_norms[t] is the change made by that iteration.
  std::vector<double> objective_trace;
  std::vector<StepNorm> step_norms;
  std::vector<int> inner_iterations;
  int iterations_run = 0;
  ModelWeights weights;
  double seconds = 0.0;
};

/// f(A, Z, H) = 1/2|X - XA|^2 + lambda/2|A - Z|^2 + lambda_z|Z|_1
///   + [alpha1 Tr(H L_Z H^T) + alpha2 Tr(H (L_W + lambda_M L_M) H^T)] / Tr(H L_C H^T)
///
/// Throws InvalidArgument if diag(Z) != 0 or H H^T != I, NumericalError if the
/// cannot-link trace is not positive.
double eval_objective(const Matrix& a, const Matrix& z, const Matrix& h,
                      const Matrix& x, const GraphModel& graph,
                      const ModelWeights& weights);

/// alpha1 = 2 tau lambda Tr(H1 L_C H1^T).
double compute_alpha1(const Matrix& h1, const Matrix& cannot, double tau,
                      double lambda);

/// Embedding from the normalized problem with W~ = W + lambda_M M, the
/// reference point for the alpha1 schedule.
Matrix initial_embedding(const GraphModel& graph, const SolverConfig& cfg);

ModelWeights resolve_weights(const GraphModel& graph, const SolverConfig& cfg);

using IterationObserver =
    std::function<void(int iteration, const Matrix& a, const Matrix& z, const Matrix& h)>;

/// Alternating minimization: per outer iteration updates H, then A, then Z.
/// Stops after cfg.max_outer iterations or once
/// max(|dA|, |dZ|) / max(1, |Z|) < cfg.tol_outer.
FitResult fit(const Matrix& x, const GraphModel& graph, const SolverConfig& cfg,
              const IterationObserver& observer = {});

/// Builds the kNN graph and constraint matrices, then fits.
FitResult fit(const Matrix& x, const ConstraintSet& cs, const SolverConfig& cfg,
              const IterationObserver& observer = {});

/// Largest amount by which an iteration misses the quantified descent bound
/// f_{t+1} <= f_t - lambda/2 (|dA|^2 + |dZ|^2). Non-positive when it holds.
double max_descent_violation(const FitResult& result);

struct StationarityReport {
  double h_shift = 0.0;  // |P' - P|_F for projectors P = H^T H
  double a_shift = 0.0;
  double z_shift = 0.0;
};

/// Re-applies each block update once at the final iterate and reports how far
/// it moves its block. Near-zero shifts indicate a fixed point.
StationarityReport stationarity_check(const Matrix& x, const GraphModel& graph,
                                      const SolverConfig& cfg,
                                      const FitResult& result);

}  // namespace dgsl
