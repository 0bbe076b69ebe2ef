#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgsl/cluster_eval.hpp"
#include "dgsl/io.hpp"
#include "dgsl/solver.hpp"

namespace dgsl {

enum class Protocol { kSetting1, kSetting2, kIncomplete, kFile };

Protocol parse_protocol(const std::string& name);
std::string to_string(Protocol p);

struct ExperimentSpec {
  Protocol protocol = Protocol::kSetting1;
  Index f = 2;                  // setting1 / incomplete
  Index n_ml = 10;              // setting2
  double cl_ratio = 3.0;        // setting2
  double class_fraction = 1.0;  // incomplete
  std::optional<ConstraintSet> constraints;  // file protocol
  std::optional<Matrix> hypergraph_o;  // when set the graph is W + gamma2 O
  double gamma2 = 1.0;
  SolverConfig solver;
  int trials = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  int kmeans_restarts = 10;
  std::optional<std::filesystem::path> output_dir;
  bool emit_structure = false;  // |Z| and P at iteration 1 and final, trial 0

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double acc = 0.0;
  double nmi = 0.0;
  int iterations = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::size_t must_links = 0;
  std::size_t cannot_links = 0;
  double final_objective = 0.0;
};

struct ExperimentSummary {
  std::vector<TrialRecord> records;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
};

void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);
nlohmann::json summary_json(const ExperimentSummary& s, const ExperimentSpec& spec,
                            const Dataset& data);

/// Mean and population standard deviation over the records.
void summarize(ExperimentSummary& s);

/// Per-trial seeds for constraint sampling and K-means.
std::uint64_t trial_seed(std::uint64_t base, int trial);
std::uint64_t kmeans_seed(std::uint64_t trial_seed);

ConstraintSet make_constraints(const ExperimentSpec& spec, const Labeling& truth,
                               std::uint64_t seed);

/// Runs spec.trials seeded trials (constraints, fit, column normalization,
/// K-means, ACC/NMI) on up to spec.jobs threads. When spec.output_dir is set
/// writes summary.json, trials/trial_NNN.json, traces/trace_NNN.csv and
/// embeddings/embedding_NNN.csv.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const Dataset& data);

/// Cluster labels from an embedding: normalize columns, then K-means.
Labeling cluster_embedding(const Matrix& h, Index k, std::uint64_t seed, int restarts);

}  // namespace dgsl
