#pragma once

#include <cstdint>
#include <vector>

#include "dgsl/graph.hpp"
#include "dgsl/linalg.hpp"

namespace dgsl {

// One cluster or class id per data point.
using Labeling = std::vector<int>;

/// Scales each column to unit length; columns with norm < 1e-12 become zero.
Matrix normalize_columns(const Matrix& h);

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
};

struct KMeansResult {
  Labeling labels;
  Matrix centers;                // dim x k
  double sse = 0.0;
  std::vector<double> sse_trace;  // per Lloyd iteration of the winning restart
};

/// Lloyd's algorithm from k-means++ seeding on the columns of points; the
/// restart with the smallest within-cluster sum of squares wins.
/// Deterministic for a given seed.
KMeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Best-matching clustering accuracy (optimal cluster-to-class assignment).
double accuracy(const Labeling& pred, const Labeling& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)); 0 when either entropy is zero.
double nmi(const Labeling& pred, const Labeling& truth);

// Pairwise constraint generators. All are deterministic per seed and throw
// DataError when the request cannot be met or yields no cannot-link.

/// Picks f points per class; must-links join points of the same class,
/// cannot-links join points of different classes.
ConstraintSet gen_constraints_setting1(const Labeling& truth, Index f,
                                       std::uint64_t seed);

/// Samples n_ml same-class pairs and round(cl_ratio * n_ml) cross-class pairs
/// without replacement.
ConstraintSet gen_constraints_setting2(const Labeling& truth, Index n_ml,
                                       double cl_ratio, std::uint64_t seed);

/// Restricts setting 1 to round(class_fraction * #classes) randomly chosen
/// classes. class_fraction = 1 reproduces setting 1 exactly.
ConstraintSet gen_constraints_incomplete(const Labeling& truth, Index f,
                                         double class_fraction, std::uint64_t seed);

}  // namespace dgsl
