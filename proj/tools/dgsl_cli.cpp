#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dgsl/cluster_eval.hpp"
#include "dgsl/errors.hpp"
#include "dgsl/experiment.hpp"
#include "dgsl/graph.hpp"
#include "dgsl/hypergraph.hpp"
#include "dgsl/io.hpp"
#include "dgsl/selfrep.hpp"
#include "dgsl/solver.hpp"

namespace fs = std::filesystem;

namespace {

using dgsl::DataError;
using dgsl::Index;
using dgsl::InvalidArgument;
using dgsl::Matrix;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

// Options shared by fit and experiment that never sweep.
struct SolverFlags {
  double lambda = 100.0;
  double alpha1 = 0.0;  // 0 keeps the tau schedule
  Index m = 7;
  Index l = 5;
  Index k = 0;  // 0 infers the class count from the labels
  int eta = 20;
  int max_outer = 50;
  double tol_inner = 1e-8;
  double tol_outer = 1e-6;
  bool plain = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--lambda", f.lambda, "coupling weight between A and Z")->capture_default_str();
  cmd->add_option("--alpha1", f.alpha1, "fixed alpha1 (default: 2 tau lambda schedule)");
  cmd->add_option("--m", f.m, "kNN neighbours")->capture_default_str();
  cmd->add_option("--l", f.l, "neighbour rank that sets the kernel width")->capture_default_str();
  cmd->add_option("--k", f.k, "number of clusters (default: classes in --labels)");
  cmd->add_option("--eta", f.eta, "trace-ratio iterations per H-update")->capture_default_str();
  cmd->add_option("--T,--max-outer", f.max_outer, "outer iterations")->capture_default_str();
  cmd->add_option("--tol-inner", f.tol_inner, "trace-ratio stopping tolerance")->capture_default_str();
  cmd->add_option("--tol-outer", f.tol_outer, "relative step-norm stopping tolerance")
      ->capture_default_str();
  cmd->add_flag("--plain", f.plain, "skip the normalization operations");
}

dgsl::SolverConfig to_config(const SolverFlags& f, Index k) {
  dgsl::SolverConfig cfg;
  cfg.lambda = f.lambda;
  if (f.alpha1 > 0.0) cfg.alpha1 = f.alpha1;
  cfg.knn_m = f.m;
  cfg.knn_l = f.l;
  cfg.k = k;
  cfg.eta = f.eta;
  cfg.max_outer = f.max_outer;
  cfg.tol_inner = f.tol_inner;
  cfg.tol_outer = f.tol_outer;
  cfg.normalize = !f.plain;
  return cfg;
}

Index class_count(const dgsl::Labeling& labels) {
  return static_cast<Index>(std::set<int>(labels.begin(), labels.end()).size());
}

Index resolve_k(Index requested, const std::optional<dgsl::Labeling>& truth) {
  if (requested > 0) return requested;
  if (!truth) throw InvalidArgument("--k is required without --labels");
  return class_count(*truth);
}

struct ProtocolFlags {
  std::string protocol = "setting1";
  Index f = 2;
  Index n_ml = 10;
  double cl_ratio = 3.0;
  double class_fraction = 1.0;
  std::string constraints;
};

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& p, bool allow_file) {
  auto* opt = cmd->add_option("--protocol", p.protocol, "constraint protocol")
                  ->capture_default_str();
  if (allow_file) {
    opt->check(CLI::IsMember({"setting1", "setting2", "incomplete", "file"}));
    cmd->add_option("--constraints", p.constraints, "constraints file (ml i j / cl i j)");
  } else {
    opt->check(CLI::IsMember({"setting1", "setting2", "incomplete"}));
  }
  cmd->add_option("--f", p.f, "labeled points per class (setting1, incomplete)")
      ->capture_default_str();
  cmd->add_option("--n-ml", p.n_ml, "must-link pairs (setting2)")->capture_default_str();
  cmd->add_option("--cl-ratio", p.cl_ratio, "cannot-links per must-link (setting2)")
      ->capture_default_str();
  cmd->add_option("--class-fraction", p.class_fraction, "labeled class fraction (incomplete)")
      ->capture_default_str();
}

void apply_protocol(const ProtocolFlags& p, Index n, dgsl::ExperimentSpec& spec) {
  spec.protocol = dgsl::parse_protocol(p.protocol);
  spec.f = p.f;
  spec.n_ml = p.n_ml;
  spec.cl_ratio = p.cl_ratio;
  spec.class_fraction = p.class_fraction;
  if (!p.constraints.empty() && spec.protocol != dgsl::Protocol::kFile) {
    throw InvalidArgument("--constraints needs --protocol file");
  }
  if (spec.protocol == dgsl::Protocol::kFile) {
    if (p.constraints.empty()) throw InvalidArgument("--protocol file needs --constraints");
    std::ifstream in(p.constraints);
    if (!in) throw DataError("cannot open " + p.constraints);
    spec.constraints = dgsl::read_constraints(in, n);
  }
}

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

Matrix load_hypergraph_o(const std::string& path, Index n) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return dgsl::hypergraph_o(dgsl::parse_hypergraph(in, n));
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Writes to the named file, or stdout for "-" or an empty name.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  fn(out);
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string features;
  std::string labels;
  std::string out;
  std::string hyperedges;
  double gamma2 = 1.0;
  bool div255 = false;
  std::uint64_t seed = 0;
  int kmeans_restarts = 10;
  double lambda_z = 1.0;
  double tau = 0.1;
  double lambda_m = 10.0;
  double alpha2_ratio = 0.2;
  bool emit_structure = false;
  SolverFlags solver;
  ProtocolFlags protocol;
};

void add_fit(CLI::App& app, FitArgs& a) {
  auto* cmd = app.add_subcommand("fit", "fit DGSL once and write the embedding and clusters");
  cmd->add_option("--features", a.features, "features CSV, one sample per row")->required();
  cmd->add_option("--labels", a.labels, "labels file (needed to generate constraints)");
  cmd->add_option("--out", a.out, "output directory")->required();
  cmd->add_option("--hyperedges", a.hyperedges, "hyperedge file; the graph becomes W + gamma2 O");
  cmd->add_option("--gamma2", a.gamma2, "hypergraph weight")->capture_default_str();
  cmd->add_flag("--div255", a.div255, "divide features by 255");
  cmd->add_option("--seed", a.seed, "seed for constraints and K-means")->capture_default_str();
  cmd->add_option("--kmeans-restarts", a.kmeans_restarts)->capture_default_str();
  cmd->add_option("--lambda-z", a.lambda_z, "l1 weight on Z")->capture_default_str();
  cmd->add_option("--tau", a.tau, "alpha1 scale")->capture_default_str();
  cmd->add_option("--lambda-m", a.lambda_m, "must-link weight")->capture_default_str();
  cmd->add_option("--alpha2-ratio", a.alpha2_ratio, "alpha2 / alpha1")->capture_default_str();
  cmd->add_flag("--emit-structure", a.emit_structure, "write |Z| and distance CSVs");
  add_solver_flags(cmd, a.solver);
  add_protocol_flags(cmd, a.protocol, true);
}

int run_fit(const FitArgs& a) {
  const dgsl::Dataset data =
      dgsl::load_dataset(a.features, optional_path(a.labels), a.div255);
  const Index n = data.x.cols();
  dgsl::SolverConfig cfg = to_config(a.solver, resolve_k(a.solver.k, data.truth));
  cfg.lambda_z = a.lambda_z;
  cfg.tau = a.tau;
  cfg.lambda_m = a.lambda_m;
  cfg.alpha2_ratio = a.alpha2_ratio;
  cfg.seed = a.seed;
  cfg.validate();

  ProtocolFlags protocol = a.protocol;
  if (!protocol.constraints.empty()) protocol.protocol = "file";
  dgsl::ExperimentSpec spec;
  apply_protocol(protocol, n, spec);
  if (spec.protocol != dgsl::Protocol::kFile && !data.truth) {
    throw InvalidArgument("generating constraints needs --labels (or pass --constraints)");
  }
  const std::uint64_t seed = dgsl::trial_seed(a.seed, 0);
  const dgsl::ConstraintSet cs =
      spec.protocol == dgsl::Protocol::kFile ? *spec.constraints
                                             : dgsl::make_constraints(spec, *data.truth, seed);

  Matrix w = dgsl::knn_affinity(data.x, cfg.knn_m, cfg.knn_l);
  if (!a.hyperedges.empty()) {
    w = dgsl::hybrid_affinity(w, load_hypergraph_o(a.hyperedges, n), a.gamma2);
  }
  auto encoded = dgsl::encode_constraints(cs);
  const dgsl::GraphModel graph{std::move(w), std::move(encoded.must),
                               std::move(encoded.cannot)};

  const fs::path out(a.out);
  fs::create_directories(out);
  dgsl::IterationObserver observer;
  if (a.emit_structure) {
    observer = [&out](int it, const Matrix&, const Matrix& z, const Matrix& h) {
      if (it == 1) dgsl::emit_trace(z, h, out / "structure", "iter1");
    };
  }
  const dgsl::FitResult result = dgsl::fit(data.x, graph, cfg, observer);
  const dgsl::Labeling pred = dgsl::cluster_embedding(result.h, cfg.k, dgsl::kmeans_seed(seed),
                                                      a.kmeans_restarts);

  dgsl::write_matrix_csv(out / "embedding.csv", result.h.transpose());
  dgsl::write_matrix_csv(out / "z.csv", result.z);
  {
    std::ofstream trace(out / "trace.csv");
    dgsl::write_fit_trace(trace, result);
    std::ofstream clusters(out / "clusters.txt");
    dgsl::write_labels(clusters, pred);
    std::ofstream constraints(out / "constraints.txt");
    dgsl::write_constraints(constraints, cs);
  }
  if (a.emit_structure) dgsl::emit_trace(result, out / "structure");

  nlohmann::json j{{"dataset", data.name},
                   {"n", n},
                   {"d", data.x.rows()},
                   {"k", cfg.k},
                   {"iterations", result.iterations_run},
                   {"alpha1", result.weights.alpha1},
                   {"alpha2", result.weights.alpha2},
                   {"final_objective", result.objective_trace.back()},
                   {"must_links", cs.must_links().size()},
                   {"cannot_links", cs.cannot_links().size()},
                   {"seconds", result.seconds}};
  if (data.truth) {
    j["acc"] = dgsl::accuracy(pred, *data.truth);
    j["nmi"] = dgsl::nmi(pred, *data.truth);
  }
  write_json_file(out / "result.json", j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string features;
  std::string labels;
  std::string out;
  std::string hyperedges;
  double gamma2 = 1.0;
  bool div255 = false;
  std::uint64_t seed = 0;
  int trials = 20;
  int jobs = 1;
  int kmeans_restarts = 10;
  bool emit_structure = false;
  std::vector<double> lambda_z{1.0};
  std::vector<double> tau{0.1};
  std::vector<double> lambda_m{10.0};
  std::vector<double> alpha2_ratio{0.2};
  SolverFlags solver;
  ProtocolFlags protocol;
};

void add_experiment(CLI::App& app, ExperimentArgs& a) {
  auto* cmd = app.add_subcommand("experiment", "seeded multi-trial evaluation with sweeps");
  cmd->add_option("--features", a.features, "features CSV, one sample per row")->required();
  cmd->add_option("--labels", a.labels, "labels file")->required();
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--hyperedges", a.hyperedges, "hyperedge file; the graph becomes W + gamma2 O");
  cmd->add_option("--gamma2", a.gamma2, "hypergraph weight")->capture_default_str();
  cmd->add_flag("--div255", a.div255, "divide features by 255");
  cmd->add_option("--seed", a.seed, "base seed")->capture_default_str();
  cmd->add_option("--trials", a.trials)->capture_default_str();
  cmd->add_option("--jobs", a.jobs, "parallel trials (0 = hardware threads)")
      ->capture_default_str();
  cmd->add_option("--kmeans-restarts", a.kmeans_restarts)->capture_default_str();
  cmd->add_flag("--emit-structure", a.emit_structure,
                "write |Z| and distance CSVs for trial 0 at iteration 1 and at the end");
  cmd->add_option("--lambda-z", a.lambda_z, "l1 weight(s) on Z")->capture_default_str();
  cmd->add_option("--tau", a.tau, "alpha1 scale(s)")->capture_default_str();
  cmd->add_option("--lambda-m", a.lambda_m, "must-link weight(s)")->capture_default_str();
  cmd->add_option("--alpha2-ratio", a.alpha2_ratio, "alpha2 / alpha1 value(s)")
      ->capture_default_str();
  add_solver_flags(cmd, a.solver);
  add_protocol_flags(cmd, a.protocol, true);
}

std::string sweep_tag(double lz, double tau, double lm, double ratio) {
  std::ostringstream os;
  os << "lz" << lz << "_tau" << tau << "_lm" << lm << "_r" << ratio;
  return os.str();
}

int run_experiment_cmd(const ExperimentArgs& a) {
  const dgsl::Dataset data =
      dgsl::load_dataset(a.features, fs::path(a.labels), a.div255);
  const Index n = data.x.cols();
  dgsl::ExperimentSpec base;
  base.solver = to_config(a.solver, resolve_k(a.solver.k, data.truth));
  base.solver.seed = a.seed;
  apply_protocol(a.protocol, n, base);
  if (!a.hyperedges.empty()) base.hypergraph_o = load_hypergraph_o(a.hyperedges, n);
  base.gamma2 = a.gamma2;
  base.trials = a.trials;
  base.seed = a.seed;
  base.jobs = a.jobs == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                          : a.jobs;
  base.kmeans_restarts = a.kmeans_restarts;
  base.emit_structure = a.emit_structure;

  std::vector<dgsl::ExperimentSpec> grid;
  std::vector<std::string> tags;
  for (double lz : a.lambda_z) {
    for (double tau : a.tau) {
      for (double lm : a.lambda_m) {
        for (double ratio : a.alpha2_ratio) {
          dgsl::ExperimentSpec spec = base;
          spec.solver.lambda_z = lz;
          spec.solver.tau = tau;
          spec.solver.lambda_m = lm;
          spec.solver.alpha2_ratio = ratio;
          spec.validate();
          grid.push_back(std::move(spec));
          tags.push_back(sweep_tag(lz, tau, lm, ratio));
        }
      }
    }
  }
  const bool sweeping = grid.size() > 1;

  nlohmann::json sweep = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dgsl::ExperimentSpec& spec = grid[i];
    if (!a.out.empty()) spec.output_dir = sweeping ? fs::path(a.out) / tags[i] : fs::path(a.out);
    const dgsl::ExperimentSummary s = dgsl::run_experiment(spec, data);
    std::cout << std::fixed << std::setprecision(4) << tags[i] << "  ACC " << s.acc_mean
              << " +/- " << s.acc_std << "  NMI " << s.nmi_mean << " +/- " << s.nmi_std
              << '\n';
    sweep.push_back({{"tag", tags[i]},
                     {"lambda_z", spec.solver.lambda_z},
                     {"tau", spec.solver.tau},
                     {"lambda_m", spec.solver.lambda_m},
                     {"alpha2_ratio", spec.solver.alpha2_ratio},
                     {"acc_mean", s.acc_mean},
                     {"acc_std", s.acc_std},
                     {"nmi_mean", s.nmi_mean},
                     {"nmi_std", s.nmi_std}});
  }
  if (sweeping && !a.out.empty()) write_json_file(fs::path(a.out) / "sweep.json", sweep);
  return 0;
}

// ---------------------------------------------------------------------------
// gen-constraints, affinity, hypergraph, metrics

struct GenArgs {
  std::string labels;
  std::string out;
  std::uint64_t seed = 0;
  ProtocolFlags protocol;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto* cmd = app.add_subcommand("gen-constraints", "sample must-link / cannot-link pairs");
  cmd->add_option("--labels", a.labels, "labels file")->required();
  cmd->add_option("--out", a.out, "output file (default stdout)");
  cmd->add_option("--seed", a.seed)->capture_default_str();
  add_protocol_flags(cmd, a.protocol, false);
}

dgsl::Labeling load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return dgsl::read_labels(in);
}

int run_gen(const GenArgs& a) {
  const dgsl::Labeling truth = load_labels(a.labels);
  dgsl::ExperimentSpec spec;
  apply_protocol(a.protocol, static_cast<Index>(truth.size()), spec);
  const dgsl::ConstraintSet cs = dgsl::make_constraints(spec, truth, a.seed);
  with_output(a.out, [&](std::ostream& os) { dgsl::write_constraints(os, cs); });
  return 0;
}

struct AffinityArgs {
  std::string features;
  std::string method = "knn";
  std::string out;
  bool div255 = false;
  Index m = 7;
  Index l = 5;
  double lambda = 100.0;
  double lambda_z = 1.0;
  int iters = 30;
};

void add_affinity(CLI::App& app, AffinityArgs& a) {
  auto* cmd = app.add_subcommand("affinity", "export a kNN or self-representation affinity");
  cmd->add_option("--features", a.features, "features CSV, one sample per row")->required();
  cmd->add_option("--method", a.method)
      ->check(CLI::IsMember({"knn", "selfrep"}))
      ->capture_default_str();
  cmd->add_option("--out", a.out, "output CSV (default stdout)");
  cmd->add_flag("--div255", a.div255, "divide features by 255");
  cmd->add_option("--m", a.m, "kNN neighbours")->capture_default_str();
  cmd->add_option("--l", a.l, "neighbour rank that sets the kernel width")->capture_default_str();
  cmd->add_option("--lambda", a.lambda)->capture_default_str();
  cmd->add_option("--lambda-z", a.lambda_z)->capture_default_str();
  cmd->add_option("--iters", a.iters, "self-representation iterations")->capture_default_str();
}

int run_affinity(const AffinityArgs& a) {
  const dgsl::Dataset data = dgsl::load_dataset(a.features, std::nullopt, a.div255);
  Matrix s;
  if (a.method == "knn") {
    s = dgsl::knn_affinity(data.x, a.m, a.l);
  } else {
    if (a.iters < 1) throw InvalidArgument("--iters must be >= 1");
    dgsl::SelfRepOptions options;
    options.max_iter = a.iters;
    s = dgsl::selfrep_affinity(data.x, a.lambda, a.lambda_z, options);
  }
  with_output(a.out, [&](std::ostream& os) { dgsl::write_matrix_csv(os, s); });
  return 0;
}

struct HypergraphArgs {
  std::string hyperedges;
  std::string what = "o";
  std::string out;
  Index n = -1;
};

void add_hypergraph(CLI::App& app, HypergraphArgs& a) {
  auto* cmd = app.add_subcommand("hypergraph", "export O or the hypergraph Laplacian I - O");
  cmd->add_option("--hyperedges", a.hyperedges, "hyperedge file")->required();
  cmd->add_option("--matrix", a.what, "o or laplacian")
      ->check(CLI::IsMember({"o", "laplacian"}))
      ->capture_default_str();
  cmd->add_option("--n", a.n, "vertex count (default: largest index + 1)");
  cmd->add_option("--out", a.out, "output CSV (default stdout)");
}

int run_hypergraph(const HypergraphArgs& a) {
  std::ifstream in(a.hyperedges);
  if (!in) throw DataError("cannot open " + a.hyperedges);
  const dgsl::Hypergraph hg = dgsl::parse_hypergraph(in, a.n);
  const Matrix m = a.what == "o" ? dgsl::hypergraph_o(hg) : dgsl::hypergraph_laplacian(hg);
  with_output(a.out, [&](std::ostream& os) { dgsl::write_matrix_csv(os, m); });
  return 0;
}

struct MetricsArgs {
  std::string pred;
  std::string truth;
};

void add_metrics(CLI::App& app, MetricsArgs& a) {
  auto* cmd = app.add_subcommand("metrics", "ACC and NMI of a labeling against ground truth");
  cmd->add_option("--pred", a.pred, "predicted labels file")->required();
  cmd->add_option("--truth", a.truth, "ground-truth labels file")->required();
}

int run_metrics(const MetricsArgs& a) {
  const dgsl::Labeling pred = load_labels(a.pred);
  const dgsl::Labeling truth = load_labels(a.truth);
  if (pred.size() != truth.size()) {
    throw DataError("metrics: label files differ in length");
  }
  const nlohmann::json j{{"acc", dgsl::accuracy(pred, truth)}, {"nmi", dgsl::nmi(pred, truth)}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic graph structure learning for semi-supervised clustering"};
  app.set_config("--config", "", "INI-style config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  FitArgs fit_args;
  ExperimentArgs experiment_args;
  GenArgs gen_args;
  AffinityArgs affinity_args;
  HypergraphArgs hypergraph_args;
  MetricsArgs metrics_args;
  add_fit(app, fit_args);
  add_experiment(app, experiment_args);
  add_gen(app, gen_args);
  add_affinity(app, affinity_args);
  add_hypergraph(app, hypergraph_args);
  add_metrics(app, metrics_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand("fit")) return run_fit(fit_args);
    if (app.got_subcommand("experiment")) return run_experiment_cmd(experiment_args);
    if (app.got_subcommand("gen-constraints")) return run_gen(gen_args);
    if (app.got_subcommand("affinity")) return run_affinity(affinity_args);
    if (app.got_subcommand("hypergraph")) return run_hypergraph(hypergraph_args);
    if (app.got_subcommand("metrics")) return run_metrics(metrics_args);
  } catch (const dgsl::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dgsl::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const dgsl::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
