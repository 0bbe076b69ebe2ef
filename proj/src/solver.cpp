#include "dgsl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "dgsl/errors.hpp"
#include "dgsl/selfrep.hpp"
#include "dgsl/traceratio.hpp"

namespace dgsl {

namespace {

constexpr double kDenominatorFloor = 1e-12;
constexpr double kOrthonormalTol = 1e-8;

void check(bool ok, const char* message) {
  if (!ok) throw InvalidArgument(std::string("SolverConfig: ") + message);
}

TraceRatioOptions inner_options(const SolverConfig& cfg) {
  return TraceRatioOptions{cfg.eta, cfg.tol_inner};
}

EmbeddingProblem embedding_problem(const ModelWeights& w, const SolverConfig& cfg) {
  return EmbeddingProblem{w.alpha1, w.alpha2, w.lambda_m, cfg.k, cfg.normalize};
}

void require_graph_shape(const Matrix& x, const GraphModel& graph) {
  const Index n = x.cols();
  if (graph.w.rows() != n || graph.w.cols() != n || graph.must.rows() != n ||
      graph.must.cols() != n || graph.cannot.rows() != n || graph.cannot.cols() != n) {
    throw InvalidArgument("graph matrices do not match the number of data points");
  }
}

}  // namespace

void SolverConfig::validate() const {
  check(lambda > 0.0, "lambda must be > 0");
  check(lambda_z >= 0.0, "lambda_z must be >= 0");
  check(lambda_m > 0.0, "lambda_m must be > 0");
  check(tau > 0.0, "tau must be > 0");
  check(alpha2_ratio > 0.0, "alpha2_ratio must be > 0");
  check(knn_m >= 1, "m must be >= 1");
  check(knn_l >= 1 && knn_l <= knn_m, "l must lie in [1, m]");
  check(k >= 2, "k must be >= 2");
  check(eta >= 1, "eta must be >= 1");
  check(max_outer >= 1, "T must be >= 1");
  check(tol_inner >= 0.0 && tol_outer >= 0.0, "tolerances must be >= 0");
  check(!alpha1 || *alpha1 > 0.0, "alpha1 must be > 0");
}

double eval_objective(const Matrix& a, const Matrix& z, const Matrix& h,
                      const Matrix& x, const GraphModel& graph,
                      const ModelWeights& weights) {
  require_graph_shape(x, graph);
  const Index n = x.cols();
  if (a.rows() != n || a.cols() != n || z.rows() != n || z.cols() != n ||
      h.cols() != n) {
    throw InvalidArgument("eval_objective: dimension mismatch");
  }
  if (z.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw InvalidArgument("eval_objective: diag(Z) must be zero");
  }
  const Matrix gram = h * h.transpose();
  if ((gram - Matrix::Identity(h.rows(), h.rows())).cwiseAbs().maxCoeff() >
      kOrthonormalTol) {
    throw InvalidArgument("eval_objective: H H^T must be the identity");
  }
  const double denom = trace_quadratic(h, laplacian(graph.cannot));
  if (!(denom > kDenominatorFloor)) {
    throw NumericalError("eval_objective: Tr(H L_C H^T) is not positive");
  }
  const double smooth_z = trace_quadratic(h, laplacian(z));
  const double smooth_w =
      trace_quadratic(h, laplacian(graph.w) + weights.lambda_m * laplacian(graph.must));
  return selfrep_objective(x, a, z, weights.lambda, weights.lambda_z) +
         (weights.alpha1 * smooth_z + weights.alpha2 * smooth_w) / denom;
}

double compute_alpha1(const Matrix& h1, const Matrix& cannot, double tau,
                      double lambda) {
  if (!(tau > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("compute_alpha1: tau and lambda must be > 0");
  }
  const double tr = trace_quadratic(h1, laplacian(cannot));
  if (!(tr > 0.0)) {
    throw NumericalError("compute_alpha1: Tr(H1 L_C H1^T) is not positive");
  }
  return 2.0 * tau * lambda * tr;
}

Matrix initial_embedding(const GraphModel& graph, const SolverConfig& cfg) {
  const Index n = graph.w.rows();
  // With Z = 0 and unit alpha2 the fused affinity is exactly W + lambda_M M.
  const EmbeddingProblem problem{1.0, 1.0, cfg.lambda_m, cfg.k, true};
  return solve_h(Matrix::Zero(n, n), graph.w, graph.must, graph.cannot, problem,
                 inner_options(cfg))
      .h;
}

ModelWeights resolve_weights(const GraphModel& graph, const SolverConfig& cfg) {
  ModelWeights w;
  w.lambda = cfg.lambda;
  w.lambda_z = cfg.lambda_z;
  w.lambda_m = cfg.lambda_m;
  w.alpha1 = cfg.alpha1 ? *cfg.alpha1
                        : compute_alpha1(initial_embedding(graph, cfg), graph.cannot,
                                         cfg.tau, cfg.lambda);
  w.alpha2 = cfg.alpha2_ratio * w.alpha1;
  return w;
}

FitResult fit(const Matrix& x, const GraphModel& graph, const SolverConfig& cfg,
              const IterationObserver& observer) {
  cfg.validate();
  require_finite(x, "fit");
  require_graph_shape(x, graph);
  const Index n = x.cols();
  if (cfg.k >= n) {
    std::ostringstream os;
    os << "fit: k=" << cfg.k << " must be smaller than the number of points " << n;
    throw InvalidArgument(os.str());
  }
  const auto start = std::chrono::steady_clock::now();

  FitResult out;
  out.weights = resolve_weights(graph, cfg);
  const EmbeddingProblem problem = embedding_problem(out.weights, cfg);
  const TraceRatioOptions options = inner_options(cfg);
  const AUpdate a_update(x, cfg.lambda);

  out.a = Matrix::Zero(n, n);
  out.z = Matrix::Zero(n, n);
  std::optional<Matrix> h;
  for (int t = 1; t <= cfg.max_outer; ++t) {
    TraceRatioResult tr = solve_h(out.z, graph.w, graph.must, graph.cannot, problem,
                                  options, h);
    out.inner_iterations.push_back(tr.iterations);
    h = std::move(tr.h);

    Matrix a_next = a_update(out.z);
    const ThetaMatrix theta = build_theta(*h, graph.cannot, out.weights.alpha1,
                                          cfg.lambda, cfg.lambda_z, cfg.normalize);
    Matrix z_next = update_z(a_next, theta);

    const StepNorm step{(a_next - out.a).norm(), (z_next - out.z).norm()};
    out.a = std::move(a_next);
    out.z = std::move(z_next);
    out.step_norms.push_back(step);
    out.iterations_run = t;

    const double f = eval_objective(out.a, out.z, *h, x, graph, out.weights);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "fit: objective became non-finite at iteration " << t;
      throw NumericalError(os.str());
    }
    out.objective_trace.push_back(f);
    if (observer) observer(t, out.a, out.z, *h);

    if (std::max(step.a, step.z) / std::max(1.0, out.z.norm()) < cfg.tol_outer) break;
  }
  out.h = std::move(*h);
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

FitResult fit(const Matrix& x, const ConstraintSet& cs, const SolverConfig& cfg,
              const IterationObserver& observer) {
  cfg.validate();
  return fit(x, build_graph_model(x, cs, cfg.knn_m, cfg.knn_l), cfg, observer);
}

double max_descent_violation(const FitResult& result) {
  const double half_lambda = 0.5 * result.weights.lambda;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t < result.objective_trace.size(); ++t) {
    const auto& s = result.step_norms[t];
    const double bound = result.objective_trace[t - 1] -
                         half_lambda * (s.a * s.a + s.z * s.z);
    worst = std::max(worst, result.objective_trace[t] - bound);
  }
  return worst;
}

StationarityReport stationarity_check(const Matrix& x, const GraphModel& graph,
                                      const SolverConfig& cfg,
                                      const FitResult& result) {
  const EmbeddingProblem problem = embedding_problem(result.weights, cfg);
  const Matrix h = solve_h(result.z, graph.w, graph.must, graph.cannot, problem,
                           inner_options(cfg), result.h)
                       .h;
  StationarityReport report;
  report.h_shift = (h.transpose() * h - result.h.transpose() * result.h).norm();
  report.a_shift = (AUpdate(x, cfg.lambda)(result.z) - result.a).norm();
  const ThetaMatrix theta = build_theta(result.h, graph.cannot, result.weights.alpha1,
                                        cfg.lambda, cfg.lambda_z, cfg.normalize);
  report.z_shift = (update_z(result.a, theta) - result.z).norm();
  return report;
}

}  // namespace dgsl
