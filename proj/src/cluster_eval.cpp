#include "dgsl/cluster_eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dgsl/errors.hpp"

namespace dgsl {

namespace {

constexpr double kTinyColumn = 1e-12;

// Maps arbitrary ids onto 0..k-1 in increasing id order.
std::vector<int> compact(const Labeling& labels, int* num_ids) {
  std::map<int, int> ids;
  for (int v : labels) ids.emplace(v, 0);
  int next = 0;
  for (auto& [id, slot] : ids) slot = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int v : labels) out.push_back(ids.at(v));
  *num_ids = next;
  return out;
}

void require_same_length(const Labeling& pred, const Labeling& truth,
                         const char* what) {
  if (pred.size() != truth.size()) {
    std::ostringstream os;
    os << what << ": labelings differ in length (" << pred.size() << " vs "
       << truth.size() << ")";
    throw InvalidArgument(os.str());
  }
}

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method,
// potentials form). Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

struct Classes {
  std::vector<int> ids;                    // sorted distinct labels
  std::vector<std::vector<Index>> members;  // point indices per class
};

Classes group_by_class(const Labeling& truth) {
  std::map<int, std::vector<Index>> groups;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    groups[truth[i]].push_back(static_cast<Index>(i));
  }
  Classes out;
  for (auto& [id, members] : groups) {
    out.ids.push_back(id);
    out.members.push_back(std::move(members));
  }
  return out;
}

ConstraintSet setting1_on(const Classes& classes, const std::vector<std::size_t>& chosen,
                          Index n, Index f, std::mt19937_64& rng) {
  if (f < 1) throw DataError("constraint generation: f must be at least 1");
  std::vector<std::vector<Index>> picked;
  for (std::size_t c : chosen) {
    std::vector<Index> members = classes.members[c];
    if (static_cast<Index>(members.size()) < f) {
      std::ostringstream os;
      os << "constraint generation: class " << classes.ids[c] << " has "
         << members.size() << " points, fewer than f=" << f;
      throw DataError(os.str());
    }
    std::shuffle(members.begin(), members.end(), rng);
    members.resize(static_cast<std::size_t>(f));
    std::sort(members.begin(), members.end());
    picked.push_back(std::move(members));
  }
  std::vector<IndexPair> ml;
  std::vector<IndexPair> cl;
  for (std::size_t a = 0; a < picked.size(); ++a) {
    for (std::size_t i = 0; i < picked[a].size(); ++i) {
      for (std::size_t j = i + 1; j < picked[a].size(); ++j) {
        ml.emplace_back(picked[a][i], picked[a][j]);
      }
      for (std::size_t b = a + 1; b < picked.size(); ++b) {
        for (Index other : picked[b]) cl.emplace_back(picked[a][i], other);
      }
    }
  }
  if (cl.empty()) {
    throw DataError("constraint generation: no cannot-link produced (need >= 2 classes)");
  }
  return ConstraintSet(n, std::move(ml), std::move(cl));
}

// Draws `count` distinct pairs satisfying `keep` out of `available`.
std::vector<IndexPair> sample_pairs(Index n, std::uint64_t available, Index count,
                                    const std::function<bool(Index, Index)>& keep,
                                    const std::function<IndexPair(std::mt19937_64&)>& draw,
                                    std::mt19937_64& rng) {
  std::vector<IndexPair> out;
  if (count == 0) return out;
  if (static_cast<std::uint64_t>(count) * 2 > available) {
    // Dense request: enumerate and take a random prefix.
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (keep(i, j)) out.emplace_back(i, j);
      }
    }
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(static_cast<std::size_t>(count));
    return out;
  }
  std::set<IndexPair> seen;
  while (static_cast<Index>(out.size()) < count) {
    IndexPair p = draw(rng);
    if (p.first > p.second) std::swap(p.first, p.second);
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

}  // namespace

Matrix normalize_columns(const Matrix& h) {
  Matrix out = h;
  for (Index i = 0; i < out.cols(); ++i) {
    const double norm = out.col(i).norm();
    if (norm < kTinyColumn) {
      out.col(i).setZero();
    } else {
      out.col(i) /= norm;
    }
  }
  return out;
}

KMeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const Index n = points.cols();
  if (k < 1 || n < k) {
    std::ostringstream os;
    os << "kmeans: need 1 <= k <= n, got k=" << k << ", n=" << n;
    throw InvalidArgument(os.str());
  }
  if (options.restarts < 1 || options.max_iter < 1) {
    throw InvalidArgument("kmeans: restarts and max_iter must be >= 1");
  }
  require_finite(points, "kmeans");
  std::mt19937_64 rng(seed);

  auto assign = [&](const Matrix& centers, Labeling& labels) {
    double sse = 0.0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < k; ++c) {
        const double d = (points.col(i) - centers.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      sse += best_d;
    }
    return sse;
  };

  KMeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    // k-means++ seeding.
    Matrix centers(points.rows(), k);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.col(0) = points.col(pick(rng));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = (points.col(i) - centers.col(0)).squaredNorm();
    }
    for (Index c = 1; c < k; ++c) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      Index chosen;
      if (total > 0.0) {
        std::discrete_distribution<Index> weighted(d2.begin(), d2.end());
        chosen = weighted(rng);
      } else {
        chosen = pick(rng);
      }
      centers.col(c) = points.col(chosen);
      for (Index i = 0; i < n; ++i) {
        auto& d = d2[static_cast<std::size_t>(i)];
        d = std::min(d, (points.col(i) - centers.col(c)).squaredNorm());
      }
    }

    KMeansResult run;
    run.labels.assign(static_cast<std::size_t>(n), -1);
    Labeling previous;
    for (int it = 0; it < options.max_iter; ++it) {
      run.sse = assign(centers, run.labels);
      run.sse_trace.push_back(run.sse);
      if (run.labels == previous) break;
      previous = run.labels;
      Matrix sums = Matrix::Zero(points.rows(), k);
      std::vector<Index> counts(static_cast<std::size_t>(k), 0);
      for (Index i = 0; i < n; ++i) {
        const auto c = run.labels[static_cast<std::size_t>(i)];
        sums.col(c) += points.col(i);
        ++counts[static_cast<std::size_t>(c)];
      }
      for (Index c = 0; c < k; ++c) {
        // An empty cluster keeps its previous center.
        const auto cnt = counts[static_cast<std::size_t>(c)];
        if (cnt > 0) centers.col(c) = sums.col(c) / static_cast<double>(cnt);
      }
    }
    run.centers = std::move(centers);
    if (run.sse < best.sse) best = std::move(run);
  }
  return best;
}

double accuracy(const Labeling& pred, const Labeling& truth) {
  require_same_length(pred, truth, "accuracy");
  if (pred.empty()) return 1.0;
  int kp = 0;
  int kt = 0;
  const auto p = compact(pred, &kp);
  const auto t = compact(truth, &kt);
  const int size = std::max(kp, kt);
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < p.size(); ++i) cost[p[i]][t[i]] -= 1.0;
  const auto match = min_cost_assignment(cost);
  double hits = 0.0;
  for (int r = 0; r < size; ++r) hits -= cost[r][match[r]];
  return hits / static_cast<double>(pred.size());
}

double nmi(const Labeling& pred, const Labeling& truth) {
  require_same_length(pred, truth, "nmi");
  if (pred.empty()) return 0.0;
  int kp = 0;
  int kt = 0;
  const auto p = compact(pred, &kp);
  const auto t = compact(truth, &kt);
  const double n = static_cast<double>(pred.size());
  Matrix joint = Matrix::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) joint(p[i], t[i]) += 1.0;
  joint /= n;
  const Vector pp = joint.rowwise().sum();
  const Vector pt = joint.colwise().sum().transpose();

  auto entropy = [](const Vector& dist) {
    double h = 0.0;
    for (Index i = 0; i < dist.size(); ++i) {
      if (dist(i) > 0.0) h -= dist(i) * std::log(dist(i));
    }
    return h;
  };
  double mi = 0.0;
  for (Index a = 0; a < kp; ++a) {
    for (Index b = 0; b < kt; ++b) {
      const double pab = joint(a, b);
      if (pab > 0.0) mi += pab * std::log(pab / (pp(a) * pt(b)));
    }
  }
  const double hp = entropy(pp);
  const double ht = entropy(pt);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

ConstraintSet gen_constraints_setting1(const Labeling& truth, Index f,
                                       std::uint64_t seed) {
  const Classes classes = group_by_class(truth);
  std::vector<std::size_t> all(classes.ids.size());
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  return setting1_on(classes, all, static_cast<Index>(truth.size()), f, rng);
}

ConstraintSet gen_constraints_setting2(const Labeling& truth, Index n_ml,
                                       double cl_ratio, std::uint64_t seed) {
  if (n_ml < 0 || !(cl_ratio >= 0.0)) {
    throw InvalidArgument("setting 2: n_ml and cl_ratio must be nonnegative");
  }
  const Index n = static_cast<Index>(truth.size());
  const auto n_cl = static_cast<Index>(std::llround(cl_ratio * static_cast<double>(n_ml)));
  if (n_cl == 0) {
    throw DataError("setting 2: cannot-link set empty: trace-ratio denominator undefined");
  }
  const Classes classes = group_by_class(truth);
  std::uint64_t same = 0;
  std::vector<double> class_pairs;
  for (const auto& m : classes.members) {
    const auto c = static_cast<std::uint64_t>(m.size());
    same += c * (c - (c > 0 ? 1 : 0)) / 2;
    class_pairs.push_back(static_cast<double>(c * (c - (c > 0 ? 1 : 0)) / 2));
  }
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t all = un * (un - (un > 0 ? 1 : 0)) / 2;
  const std::uint64_t cross = all - same;
  if (static_cast<std::uint64_t>(n_ml) > same || static_cast<std::uint64_t>(n_cl) > cross) {
    std::ostringstream os;
    os << "setting 2: requested " << n_ml << " must-links and " << n_cl
       << " cannot-links, only " << same << " and " << cross << " available";
    throw DataError(os.str());
  }

  std::mt19937_64 rng(seed);
  auto same_class = [&](Index i, Index j) { return truth[i] == truth[j]; };
  auto draw_ml = [&](std::mt19937_64& g) {
    std::discrete_distribution<std::size_t> which(class_pairs.begin(), class_pairs.end());
    const auto& m = classes.members[which(g)];
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    std::size_t a = pick(g);
    std::size_t b = pick(g);
    while (b == a) b = pick(g);
    return IndexPair{m[a], m[b]};
  };
  auto draw_cl = [&](std::mt19937_64& g) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (;;) {
      const Index a = pick(g);
      const Index b = pick(g);
      if (truth[a] != truth[b]) return IndexPair{a, b};
    }
  };
  auto ml = n_ml > 0 ? sample_pairs(n, same, n_ml, same_class, draw_ml, rng)
                     : std::vector<IndexPair>{};
  auto cl = sample_pairs(
      n, cross, n_cl, [&](Index i, Index j) { return !same_class(i, j); }, draw_cl, rng);
  return ConstraintSet(n, std::move(ml), std::move(cl));
}

ConstraintSet gen_constraints_incomplete(const Labeling& truth, Index f,
                                         double class_fraction, std::uint64_t seed) {
  if (!(class_fraction > 0.0) || class_fraction > 1.0) {
    throw InvalidArgument("incomplete classes: class_fraction must lie in (0, 1]");
  }
  const Classes classes = group_by_class(truth);
  const auto total = classes.ids.size();
  const auto k0 = static_cast<std::size_t>(
      std::llround(class_fraction * static_cast<double>(total)));
  if (k0 < 2) {
    std::ostringstream os;
    os << "incomplete classes: fraction " << class_fraction << " of " << total
       << " classes selects " << k0 << ", need at least 2";
    throw DataError(os.str());
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen(total);
  std::iota(chosen.begin(), chosen.end(), 0);
  if (k0 < total) {
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(k0);
    std::sort(chosen.begin(), chosen.end());
  }
  return setting1_on(classes, chosen, static_cast<Index>(truth.size()), f, rng);
}

}  // namespace dgsl
