#include "dgsl/hypergraph.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dgsl/errors.hpp"
#include "test_support.hpp"

namespace dgsl {
namespace {

Hypergraph random_hypergraph(Index n, Index edges, std::mt19937_64& rng) {
  Hypergraph hg;
  hg.n_vertices = n;
  std::uniform_real_distribution<double> w(0.1, 3.0);
  for (Index v = 0; v < n; v += 2) {
    // pairs guarantee every vertex is covered
    hg.edges.push_back(v + 1 < n ? std::vector<Index>{v, v + 1} : std::vector<Index>{v});
    hg.weights.push_back(w(rng));
  }
  for (Index e = 0; e < edges; ++e) {
    std::vector<Index> members;
    for (Index v = 0; v < n; ++v) {
      if (rng() % 3 == 0) members.push_back(v);
    }
    if (members.empty()) members.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));
    hg.edges.push_back(members);
    hg.weights.push_back(w(rng));
  }
  return hg;
}

TEST(Incidence, Examples) {
  Hypergraph one{3, {{0, 1, 2}}, {1.0}};
  EXPECT_EQ(incidence(one), Matrix::Ones(3, 1));
  Hypergraph two{3, {{0, 1}, {1, 2}}, {1.0, 1.0}};
  Matrix expected(3, 2);
  expected << 1, 0, 1, 1, 0, 1;
  EXPECT_EQ(incidence(two), expected);
}

TEST(Incidence, ColumnSumsAreCardinalities) {
  std::mt19937_64 rng(1);
  const Hypergraph hg = random_hypergraph(12, 6, rng);
  const Matrix u = incidence(hg);
  for (std::size_t e = 0; e < hg.edges.size(); ++e) {
    EXPECT_EQ(u.col(static_cast<Index>(e)).sum(), static_cast<double>(hg.edges[e].size()));
  }
}

TEST(HypergraphO, SingleCompleteEdge) {
  Hypergraph hg{3, {{0, 1, 2}}, {1.0}};
  const Matrix o = hypergraph_o(hg);
  EXPECT_LT((o - Matrix::Constant(3, 3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-15);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(hypergraph_laplacian(hg)).eigenvalues();
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  EXPECT_NEAR(ev(1), 1.0, 1e-12);
  EXPECT_NEAR(ev(2), 1.0, 1e-12);
}

TEST(HypergraphO, SingletonEdge) {
  Hypergraph hg{1, {{0}}, {2.0}};
  EXPECT_NEAR(hypergraph_o(hg)(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(hypergraph_laplacian(hg)(0, 0), 0.0, 1e-15);
}

TEST(HypergraphO, UncoveredVertex) {
  Hypergraph hg{3, {{0, 1}}, {1.0}};
  try {
    hypergraph_o(hg);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("vertex 2"), std::string::npos);
  }
}

TEST(HypergraphLaplacian, PsdWithScaledConstantNullVector) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Hypergraph hg = random_hypergraph(10, 4, rng);
    const Matrix delta = hypergraph_laplacian(hg);
    EXPECT_LT((delta - delta.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(delta).eigenvalues().minCoeff(), -1e-9);
    // D_v^{1/2} 1 is annihilated (the random edges connect everything here or
    // the pair edges keep components, each of which holds the same vector)
    const Matrix u = incidence(hg);
    const Vector w = Eigen::Map<const Vector>(hg.weights.data(),
                                              static_cast<Index>(hg.weights.size()));
    const Vector dv = u * w;
    EXPECT_LT((delta * dv.cwiseSqrt()).norm(), 1e-9);
  }
}

TEST(Validate, RejectsBadHypergraphs) {
  EXPECT_THROW(validate(Hypergraph{3, {{}}, {1.0}}), DataError);
  EXPECT_THROW(validate(Hypergraph{3, {{0, 3}}, {1.0}}), DataError);
  EXPECT_THROW(validate(Hypergraph{3, {{0, 1}}, {0.0}}), DataError);
  EXPECT_THROW(validate(Hypergraph{3, {{0, 0}}, {1.0}}), DataError);
  EXPECT_THROW(validate(Hypergraph{3, {{0, 1}}, {}}), DataError);
}

TEST(ParseHypergraph, FormatWithWeightsAndComments) {
  std::istringstream in("# comment\n0 1 2\n\n2 3 w=0.5\n");
  const Hypergraph hg = parse_hypergraph(in);
  EXPECT_EQ(hg.n_vertices, 4);
  ASSERT_EQ(hg.edges.size(), 2u);
  EXPECT_EQ(hg.edges[1], (std::vector<Index>{2, 3}));
  EXPECT_EQ(hg.weights[0], 1.0);
  EXPECT_EQ(hg.weights[1], 0.5);

  std::istringstream sized("0 1\n");
  EXPECT_EQ(parse_hypergraph(sized, 5).n_vertices, 5);
  std::istringstream bad("0 x\n");
  EXPECT_THROW(parse_hypergraph(bad), DataError);
  std::istringstream too_big("0 7\n");
  EXPECT_THROW(parse_hypergraph(too_big, 5), DataError);
}

TEST(HybridAffinity, Entrywise) {
  std::mt19937_64 rng(3);
  const Matrix w = testing::random_matrix(4, 4, rng, 0.0, 1.0);
  const Matrix o = testing::random_matrix(4, 4, rng, 0.0, 1.0);
  EXPECT_EQ(hybrid_affinity(w, o, 0.0), w);
  EXPECT_EQ(hybrid_affinity(Matrix::Zero(4, 4), o, 2.0), 2.0 * o);
  EXPECT_LT((hybrid_affinity(w, o, 0.7) - (w + 0.7 * o)).norm(), 1e-15);
  EXPECT_THROW(hybrid_affinity(w, Matrix::Zero(3, 3), 1.0), InvalidArgument);
  EXPECT_THROW(hybrid_affinity(w, o, -1.0), InvalidArgument);
}

}  // namespace
}  // namespace dgsl
