#include "dgsl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "dgsl/errors.hpp"

namespace dgsl {

namespace {

std::vector<IndexPair> canonical_pairs(Index n, std::vector<IndexPair> pairs,
                                       const char* kind) {
  for (auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      std::ostringstream os;
      os << kind << " pair (" << i << ", " << j << ") out of range for n=" << n;
      throw DataError(os.str());
    }
    if (i == j) {
      std::ostringstream os;
      os << kind << " pair (" << i << ", " << j << ") links a point to itself";
      throw DataError(os.str());
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": dimension mismatch " << a.rows() << "x" << a.cols()
       << " vs " << b.rows() << "x" << b.cols();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

ConstraintSet::ConstraintSet(Index n, std::vector<IndexPair> must_links,
                             std::vector<IndexPair> cannot_links)
    : n_(n),
      must_links_(canonical_pairs(n, std::move(must_links), "must-link")),
      cannot_links_(canonical_pairs(n, std::move(cannot_links), "cannot-link")) {
  if (n < 0) throw InvalidArgument("ConstraintSet: negative point count");
  std::vector<IndexPair> both;
  std::set_intersection(must_links_.begin(), must_links_.end(),
                        cannot_links_.begin(), cannot_links_.end(),
                        std::back_inserter(both));
  if (!both.empty()) {
    std::ostringstream os;
    os << "pair (" << both.front().first << ", " << both.front().second
       << ") is both a must-link and a cannot-link";
    throw DataError(os.str());
  }
}

Matrix knn_affinity(const Matrix& x, Index m, Index l) {
  const Index n = x.cols();
  if (m < 1) throw InvalidArgument("knn_affinity: m must be at least 1");
  if (n <= m) {
    std::ostringstream os;
    os << "knn_affinity: need more than m=" << m << " points, got " << n;
    throw InvalidArgument(os.str());
  }
  if (l < 1 || l > m) {
    std::ostringstream os;
    os << "knn_affinity: l=" << l << " must lie in [1, m=" << m << "]";
    throw InvalidArgument(os.str());
  }
  require_finite(x, "knn_affinity");

  Matrix dist2(n, n);
  for (Index j = 0; j < n; ++j) {
    dist2(j, j) = 0.0;
    for (Index i = j + 1; i < n; ++i) {
      const double d = (x.col(i) - x.col(j)).squaredNorm();
      dist2(i, j) = d;
      dist2(j, i) = d;
    }
  }

  Matrix w = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    auto closer = [&](Index a, Index b) {
      const double da = dist2(i, a);
      const double db = dist2(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + m, order.end(), closer);

    double sigma2 = dist2(i, order[static_cast<std::size_t>(l - 1)]);
    if (sigma2 <= 0.0) {
      sigma2 = 1.0;
      for (Index r = 0; r < m; ++r) {
        const double d = dist2(i, order[static_cast<std::size_t>(r)]);
        if (d > 0.0) {
          sigma2 = d;
          break;
        }
      }
    }
    for (Index r = 0; r < m; ++r) {
      const Index j = order[static_cast<std::size_t>(r)];
      w(i, j) = std::exp(-dist2(i, j) / sigma2);
    }
  }
  return w;
}

ConstraintMatrices encode_constraints(const ConstraintSet& cs) {
  const auto nc = cs.cannot_links().size();
  if (nc == 0) {
    throw DataError("cannot-link set empty: trace-ratio denominator undefined");
  }
  const Index n = cs.n();
  ConstraintMatrices out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (const auto& [i, j] : cs.must_links()) {
    out.must(i, j) = 1.0;
    out.must(j, i) = 1.0;
  }
  const double weight = 1.0 / static_cast<double>(nc);
  for (const auto& [i, j] : cs.cannot_links()) {
    out.cannot(i, j) = weight;
    out.cannot(j, i) = weight;
  }
  return out;
}

GraphModel build_graph_model(const Matrix& x, const ConstraintSet& cs, Index m,
                             Index l) {
  if (cs.n() != x.cols()) {
    std::ostringstream os;
    os << "constraint set covers " << cs.n() << " points, data has "
       << x.cols();
    throw DataError(os.str());
  }
  auto encoded = encode_constraints(cs);
  return GraphModel{knn_affinity(x, m, l), std::move(encoded.must),
                    std::move(encoded.cannot)};
}

Matrix laplacian(const Matrix& s) {
  require_square(s, "laplacian");
  const Matrix a = 0.5 * (s.cwiseAbs() + s.transpose().cwiseAbs());
  Matrix l = -a;
  l.diagonal() += a.rowwise().sum();
  return l;
}

Matrix normalized_laplacian(const Matrix& s) {
  require_square(s, "normalized_laplacian");
  const Matrix a = 0.5 * (s.cwiseAbs() + s.transpose().cwiseAbs());
  const Vector degree = a.rowwise().sum();
  for (Index i = 0; i < degree.size(); ++i) {
    if (!(degree(i) > 0.0)) {
      std::ostringstream os;
      os << "normalized_laplacian: vertex " << i << " is isolated (degree 0)";
      throw DataError(os.str());
    }
  }
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Matrix l = -a;
  l.diagonal() += degree;
  Matrix out = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  return symmetrize(out);
}

Matrix fuse_affinity(const Matrix& z, const Matrix& w, const Matrix& must,
                     double alpha1, double alpha2, double lambda_m,
                     bool normalize) {
  require_square(z, "fuse_affinity");
  require_same_shape(z, w, "fuse_affinity");
  require_same_shape(z, must, "fuse_affinity");
  if (alpha1 < 0.0 || alpha2 < 0.0) {
    throw InvalidArgument("fuse_affinity: weights must be nonnegative");
  }
  Matrix abs_z = z.cwiseAbs();
  if (normalize) {
    for (Index c = 0; c < abs_z.cols(); ++c) {
      const double top = abs_z.col(c).maxCoeff();
      if (top > 0.0) abs_z.col(c) /= top;
    }
  }
  return alpha1 * abs_z + alpha2 * (w + lambda_m * must);
}

double trace_quadratic(const Matrix& h, const Matrix& l) {
  if (h.cols() != l.rows() || l.rows() != l.cols()) {
    throw InvalidArgument("trace_quadratic: dimension mismatch");
  }
  return (h * l).cwiseProduct(h).sum();
}

}  // namespace dgsl
