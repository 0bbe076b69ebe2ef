#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "dgsl/cluster_eval.hpp"
#include "dgsl/graph.hpp"
#include "dgsl/linalg.hpp"
#include "dgsl/solver.hpp"

namespace dgsl {

struct Dataset {
  Matrix x;  // d x n, one column per sample
  std::optional<Labeling> truth;
  std::string name;
};

// Reads a CSV with one sample per row and returns it transposed (d x n).
// Errors carry the offending line number.
Matrix read_features_csv(std::istream& in, bool div255 = false);

// One integer label per line; blank lines are ignored.
Labeling read_labels(std::istream& in);

Dataset load_dataset(const std::filesystem::path& features,
                     const std::optional<std::filesystem::path>& labels,
                     bool div255 = false);

// Lines of the form "ml i j" or "cl i j"; '#' starts a comment line.
ConstraintSet read_constraints(std::istream& in, Index n);
void write_constraints(std::ostream& out, const ConstraintSet& cs);

// Full-precision CSV, one matrix row per line.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void write_labels(std::ostream& out, const Labeling& labels);

/// P_ij = | h_i/|h_i| - h_j/|h_j| | over the columns of H.
Matrix embedding_distance(const Matrix& h);

/// Writes abs_z_<tag>.csv (|Z|) and distance_<tag>.csv (P) into dir for
/// external plotting.
void emit_trace(const Matrix& z, const Matrix& h, const std::filesystem::path& dir,
                std::string_view tag);
void emit_trace(const FitResult& result, const std::filesystem::path& dir,
                std::string_view tag = "final");

/// Per-iteration CSV: iteration,objective,step_a,step_z,inner_iterations.
void write_fit_trace(std::ostream& out, const FitResult& result);

}  // namespace dgsl
