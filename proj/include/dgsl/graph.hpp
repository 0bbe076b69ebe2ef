#pragma once

#include <utility>
#include <vector>

#include "dgsl/linalg.hpp"

namespace dgsl {

using IndexPair = std::pair<Index, Index>;

/// Must-link and cannot-link pairs over n points.
///
/// Pairs are stored unordered as (min, max), sorted and deduplicated. The
/// constructor rejects self-pairs, out-of-range indices and any pair that is
/// both a must-link and a cannot-link.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(Index n, std::vector<IndexPair> must_links,
                std::vector<IndexPair> cannot_links);

  Index n() const { return n_; }
  const std::vector<IndexPair>& must_links() const { return must_links_; }
  const std::vector<IndexPair>& cannot_links() const { return cannot_links_; }

 private:
  Index n_ = 0;
  std::vector<IndexPair> must_links_;
  std::vector<IndexPair> cannot_links_;
};

struct ConstraintMatrices {
  Matrix must;    // M: 0/1, symmetric
  Matrix cannot;  // C: 1/n_c on each cannot-link (both triangles)
};

/// Affinity side of the model: kNN graph W plus encoded constraints.
struct GraphModel {
  Matrix w;
  Matrix must;
  Matrix cannot;
};

/// Gaussian kNN affinity. Row i holds exp(-|x_i - x_j|^2 / sigma_i^2) for the
/// m nearest neighbours j of column i (self excluded, ties broken by the
/// smaller index), where sigma_i is the distance to the l-th neighbour.
/// A zero sigma_i falls back to the smallest positive neighbour distance, or
/// 1 when every neighbour coincides with x_i.
Matrix knn_affinity(const Matrix& x, Index m, Index l);

/// Throws DataError when the cannot-link set is empty.
ConstraintMatrices encode_constraints(const ConstraintSet& cs);

GraphModel build_graph_model(const Matrix& x, const ConstraintSet& cs, Index m,
                             Index l);

/// L_S = D_S - (|S| + |S|^T)/2 with D_S the row sums of the symmetrized |S|.
Matrix laplacian(const Matrix& s);

/// D^{-1/2} L_S D^{-1/2} with D_S as in laplacian().
/// Throws DataError naming the first vertex with non-positive degree.
Matrix normalized_laplacian(const Matrix& s);

/// alpha1 |Z| + alpha2 (W + lambda_m M). With normalize set, column i of |Z|
/// is first divided by its max entry; zero columns stay zero.
Matrix fuse_affinity(const Matrix& z, const Matrix& w, const Matrix& must,
                     double alpha1, double alpha2, double lambda_m,
                     bool normalize);

/// Tr(H L H^T) without forming H L H^T.
double trace_quadratic(const Matrix& h, const Matrix& l);

}  // namespace dgsl
