#include "dgsl/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "dgsl/errors.hpp"
#include "dgsl/hypergraph.hpp"

namespace dgsl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string numbered(const char* stem, int trial, const char* ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << trial << ext;
  return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Rethrows a trial failure with the trial index prepended, keeping its type.
[[noreturn]] void rethrow_with_trial(std::exception_ptr e, int trial) {
  const std::string prefix = "trial " + std::to_string(trial) + ": ";
  try {
    std::rethrow_exception(e);
  } catch (const InvalidArgument& ex) {
    throw InvalidArgument(prefix + ex.what());
  } catch (const DataError& ex) {
    throw DataError(prefix + ex.what());
  } catch (const NumericalError& ex) {
    throw NumericalError(prefix + ex.what());
  } catch (const std::exception& ex) {
    throw Error(prefix + ex.what());
  }
}

}  // namespace

Protocol parse_protocol(const std::string& name) {
  if (name == "setting1") return Protocol::kSetting1;
  if (name == "setting2") return Protocol::kSetting2;
  if (name == "incomplete") return Protocol::kIncomplete;
  if (name == "file") return Protocol::kFile;
  throw InvalidArgument("unknown constraint protocol '" + name + "'");
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kSetting1: return "setting1";
    case Protocol::kSetting2: return "setting2";
    case Protocol::kIncomplete: return "incomplete";
    case Protocol::kFile: return "file";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  solver.validate();
  if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (jobs < 1) throw InvalidArgument("experiment: jobs must be >= 1");
  if (kmeans_restarts < 1) throw InvalidArgument("experiment: kmeans restarts must be >= 1");
  switch (protocol) {
    case Protocol::kSetting1:
      if (f < 1) throw InvalidArgument("setting1 needs f >= 1");
      break;
    case Protocol::kSetting2:
      if (n_ml < 1 || !(cl_ratio > 0.0)) {
        throw InvalidArgument("setting2 needs n_ml >= 1 and cl_ratio > 0");
      }
      break;
    case Protocol::kIncomplete:
      if (f < 1 || !(class_fraction > 0.0) || class_fraction > 1.0) {
        throw InvalidArgument("incomplete needs f >= 1 and class_fraction in (0, 1]");
      }
      break;
    case Protocol::kFile:
      if (!constraints) throw InvalidArgument("file protocol needs a constraints file");
      break;
  }
}

void to_json(nlohmann::json& j, const TrialRecord& r) {
  j = nlohmann::json{{"trial", r.trial},
                     {"seed", r.seed},
                     {"acc", r.acc},
                     {"nmi", r.nmi},
                     {"iterations", r.iterations},
                     {"alpha1", r.alpha1},
                     {"alpha2", r.alpha2},
                     {"must_links", r.must_links},
                     {"cannot_links", r.cannot_links},
                     {"final_objective", r.final_objective}};
}

void from_json(const nlohmann::json& j, TrialRecord& r) {
  j.at("trial").get_to(r.trial);
  j.at("seed").get_to(r.seed);
  j.at("acc").get_to(r.acc);
  j.at("nmi").get_to(r.nmi);
  j.at("iterations").get_to(r.iterations);
  j.at("alpha1").get_to(r.alpha1);
  j.at("alpha2").get_to(r.alpha2);
  j.at("must_links").get_to(r.must_links);
  j.at("cannot_links").get_to(r.cannot_links);
  j.at("final_objective").get_to(r.final_objective);
}

void summarize(ExperimentSummary& s) {
  const double n = static_cast<double>(s.records.size());
  if (s.records.empty()) return;
  double acc = 0.0;
  double nm = 0.0;
  for (const auto& r : s.records) {
    acc += r.acc;
    nm += r.nmi;
  }
  s.acc_mean = acc / n;
  s.nmi_mean = nm / n;
  double acc_var = 0.0;
  double nmi_var = 0.0;
  for (const auto& r : s.records) {
    acc_var += (r.acc - s.acc_mean) * (r.acc - s.acc_mean);
    nmi_var += (r.nmi - s.nmi_mean) * (r.nmi - s.nmi_mean);
  }
  s.acc_std = std::sqrt(acc_var / n);
  s.nmi_std = std::sqrt(nmi_var / n);
}

nlohmann::json summary_json(const ExperimentSummary& s, const ExperimentSpec& spec,
                            const Dataset& data) {
  const SolverConfig& c = spec.solver;
  nlohmann::json config{{"lambda", c.lambda},
                        {"lambda_z", c.lambda_z},
                        {"lambda_m", c.lambda_m},
                        {"tau", c.tau},
                        {"alpha2_ratio", c.alpha2_ratio},
                        {"m", c.knn_m},
                        {"l", c.knn_l},
                        {"k", c.k},
                        {"eta", c.eta},
                        {"T", c.max_outer},
                        {"tol_inner", c.tol_inner},
                        {"tol_outer", c.tol_outer},
                        {"normalize", c.normalize}};
  if (spec.hypergraph_o) config["gamma2"] = spec.gamma2;
  if (c.alpha1) config["alpha1"] = *c.alpha1;
  nlohmann::json protocol{{"name", to_string(spec.protocol)}};
  switch (spec.protocol) {
    case Protocol::kSetting1: protocol["f"] = spec.f; break;
    case Protocol::kSetting2:
      protocol["n_ml"] = spec.n_ml;
      protocol["cl_ratio"] = spec.cl_ratio;
      break;
    case Protocol::kIncomplete:
      protocol["f"] = spec.f;
      protocol["class_fraction"] = spec.class_fraction;
      break;
    case Protocol::kFile: break;
  }
  return nlohmann::json{{"dataset", data.name},
                        {"n", data.x.cols()},
                        {"d", data.x.rows()},
                        {"trials", s.records.size()},
                        {"seed", spec.seed},
                        {"protocol", protocol},
                        {"solver", config},
                        {"acc_mean", s.acc_mean},
                        {"acc_std", s.acc_std},
                        {"nmi_mean", s.nmi_mean},
                        {"nmi_std", s.nmi_std},
                        {"records", s.records}};
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return splitmix64(base + static_cast<std::uint64_t>(trial));
}

std::uint64_t kmeans_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x6B6D65616E73ULL); }

ConstraintSet make_constraints(const ExperimentSpec& spec, const Labeling& truth,
                               std::uint64_t seed) {
  switch (spec.protocol) {
    case Protocol::kSetting1: return gen_constraints_setting1(truth, spec.f, seed);
    case Protocol::kSetting2:
      return gen_constraints_setting2(truth, spec.n_ml, spec.cl_ratio, seed);
    case Protocol::kIncomplete:
      return gen_constraints_incomplete(truth, spec.f, spec.class_fraction, seed);
    case Protocol::kFile: return *spec.constraints;
  }
  throw InvalidArgument("unknown protocol");
}

Labeling cluster_embedding(const Matrix& h, Index k, std::uint64_t seed, int restarts) {
  KMeansOptions options;
  options.restarts = restarts;
  return kmeans(normalize_columns(h), k, seed, options).labels;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const Dataset& data) {
  spec.validate();
  if (!data.truth) throw DataError("experiment: dataset has no labels");
  const Labeling& truth = *data.truth;
  if (static_cast<Index>(truth.size()) != data.x.cols()) {
    throw DataError("experiment: label count does not match the number of points");
  }
  if (spec.hypergraph_o && spec.hypergraph_o->rows() != data.x.cols()) {
    throw DataError("experiment: hypergraph does not match the number of points");
  }
  if (spec.constraints && spec.constraints->n() != data.x.cols()) {
    throw DataError("experiment: constraint file does not match the number of points");
  }
  Matrix knn = knn_affinity(data.x, spec.solver.knn_m, spec.solver.knn_l);
  if (spec.hypergraph_o) knn = hybrid_affinity(knn, *spec.hypergraph_o, spec.gamma2);

  struct TrialOutput {
    TrialRecord record;
    FitResult fit;
    std::optional<FitResult> first;  // iteration-1 snapshot for trial 0
  };
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(spec.trials));
  std::vector<std::exception_ptr> errors(outputs.size());

  auto run_trial = [&](int t) {
    TrialOutput& out = outputs[static_cast<std::size_t>(t)];
    const std::uint64_t seed = trial_seed(spec.seed, t);
    const ConstraintSet cs = make_constraints(spec, truth, seed);
    auto encoded = encode_constraints(cs);
    GraphModel graph{knn,
                     std::move(encoded.must), std::move(encoded.cannot)};
    IterationObserver observer;
    if (spec.emit_structure && t == 0) {
      observer = [&out](int it, const Matrix& a, const Matrix& z, const Matrix& h) {
        if (it == 1) out.first = FitResult{a, z, h, {}, {}, {}, 1, {}, 0.0};
      };
    }
    out.fit = fit(data.x, graph, spec.solver, observer);
    const Labeling pred = cluster_embedding(out.fit.h, spec.solver.k, kmeans_seed(seed),
                                            spec.kmeans_restarts);
    TrialRecord& r = out.record;
    r.trial = t;
    r.seed = seed;
    r.acc = accuracy(pred, truth);
    r.nmi = nmi(pred, truth);
    r.iterations = out.fit.iterations_run;
    r.alpha1 = out.fit.weights.alpha1;
    r.alpha2 = out.fit.weights.alpha2;
    r.must_links = cs.must_links().size();
    r.cannot_links = cs.cannot_links().size();
    r.final_objective = out.fit.objective_trace.back();
  };

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int t = next++; t < spec.trials; t = next++) {
      try {
        run_trial(t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(spec.jobs, spec.trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (errors[t]) rethrow_with_trial(errors[t], static_cast<int>(t));
  }

  ExperimentSummary summary;
  for (const auto& o : outputs) summary.records.push_back(o.record);
  summarize(summary);

  if (spec.output_dir) {
    namespace fs = std::filesystem;
    const fs::path& dir = *spec.output_dir;
    fs::create_directories(dir / "trials");
    fs::create_directories(dir / "traces");
    fs::create_directories(dir / "embeddings");
    for (const auto& o : outputs) {
      const int t = o.record.trial;
      write_json(dir / "trials" / numbered("trial", t, ".json"), o.record);
      std::ofstream trace(dir / "traces" / numbered("trace", t, ".csv"));
      if (!trace) throw DataError("cannot write trace for trial " + std::to_string(t));
      write_fit_trace(trace, o.fit);
      write_matrix_csv(dir / "embeddings" / numbered("embedding", t, ".csv"),
                       o.fit.h.transpose());
    }
    if (spec.emit_structure) {
      const auto& o = outputs.front();
      if (o.first) emit_trace(*o.first, dir / "structure", "iter1");
      emit_trace(o.fit, dir / "structure", "final");
    }
    write_json(dir / "summary.json", summary_json(summary, spec, data));
  }
  return summary;
}

}  // namespace dgsl
