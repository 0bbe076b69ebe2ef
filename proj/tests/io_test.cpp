#include "dgsl/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dgsl/errors.hpp"
#include "dgsl/solver.hpp"
#include "test_support.hpp"

namespace dgsl {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dgsl_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(ReadFeatures, TransposesRows) {
  std::istringstream in("1,2\n3,4\n5,6\n");
  const Matrix x = read_features_csv(in);
  ASSERT_EQ(x.rows(), 2);
  ASSERT_EQ(x.cols(), 3);
  EXPECT_EQ(x(0, 2), 5.0);
  EXPECT_EQ(x(1, 0), 2.0);
}

TEST(ReadFeatures, Div255) {
  std::istringstream in("255,0\n51, 102\n");
  const Matrix x = read_features_csv(in, true);
  EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(x(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(x(1, 1), 0.4);
}

TEST(ReadFeatures, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_features_csv(in);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("1,2\n3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("1,2\n3,4,\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("1,2\n\n3,abc\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("1,nan\n").find("line 1"), std::string::npos);
  EXPECT_FALSE(message("").empty());
}

TEST(ReadLabels, SkipsBlankLines) {
  std::istringstream in("0\n\n1\n 2 \n");
  EXPECT_EQ(read_labels(in), (Labeling{0, 1, 2}));
  std::istringstream bad("0\n1.5\n");
  EXPECT_THROW(read_labels(bad), DataError);
}

TEST(LoadDataset, ChecksLabelCount) {
  const fs::path dir = scratch_dir("load");
  std::ofstream(dir / "x.csv") << "1,2\n3,4\n";
  std::ofstream(dir / "y.txt") << "0\n1\n";
  std::ofstream(dir / "short.txt") << "0\n";
  const Dataset ds = load_dataset(dir / "x.csv", dir / "y.txt");
  EXPECT_EQ(ds.x.cols(), 2);
  ASSERT_TRUE(ds.truth.has_value());
  EXPECT_EQ(ds.truth->size(), 2u);
  EXPECT_THROW(load_dataset(dir / "x.csv", dir / "short.txt"), DataError);
  EXPECT_THROW(load_dataset(dir / "missing.csv", std::nullopt), DataError);
}

TEST(Constraints, RoundTrip) {
  ConstraintSet cs(6, {{0, 1}, {4, 5}}, {{1, 2}, {0, 5}});
  std::stringstream buf;
  write_constraints(buf, cs);
  const ConstraintSet back = read_constraints(buf, 6);
  EXPECT_EQ(back.must_links(), cs.must_links());
  EXPECT_EQ(back.cannot_links(), cs.cannot_links());

  std::istringstream bad("ml 0 1\nxx 1 2\n");
  EXPECT_THROW(read_constraints(bad, 6), DataError);
  std::istringstream out_of_range("cl 0 9\n");
  EXPECT_THROW(read_constraints(out_of_range, 6), DataError);
  std::istringstream comment("# header\nml 0 1\ncl 1 2\n");
  EXPECT_EQ(read_constraints(comment, 3).cannot_links().size(), 1u);
}

TEST(WriteMatrix, FullPrecisionRoundTrip) {
  std::mt19937_64 rng(1);
  const Matrix m = testing::random_matrix(3, 4, rng);
  std::stringstream buf;
  write_matrix_csv(buf, m);
  const Matrix back = read_features_csv(buf);  // rows read as samples
  EXPECT_EQ(back.transpose(), m);
}

TEST(EmbeddingDistance, Properties) {
  Matrix h(2, 3);
  h << 2.0, 0.0, 1.0, 0.0, 3.0, 0.0;
  const Matrix p = embedding_distance(h);
  EXPECT_NEAR(p(0, 1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p(0, 2), 0.0, 1e-15);
  EXPECT_EQ(p, p.transpose());
  EXPECT_EQ(p.diagonal().norm(), 0.0);
}

TEST(EmitTrace, WritesSymmetricZeroDiagonalDistance) {
  const auto blobs = testing::make_blobs(8, 2, 2, 8.0, 2);
  const ConstraintSet cs(16, {{0, 1}}, {{0, 9}, {3, 12}});
  SolverConfig cfg;
  cfg.max_outer = 3;
  const FitResult r = fit(blobs.x, cs, cfg);
  const fs::path dir = scratch_dir("emit");
  emit_trace(r, dir);
  std::ifstream pin(dir / "distance_final.csv");
  const Matrix p = read_features_csv(pin);
  EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(p.diagonal().cwiseAbs().maxCoeff(), 0.0);
  std::ifstream zin(dir / "abs_z_final.csv");
  const Matrix z = read_features_csv(zin);
  EXPECT_GE(z.minCoeff(), 0.0);
  EXPECT_EQ(z.rows(), 16);
  EXPECT_EQ(z.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(FitTrace, HeaderAndRows) {
  FitResult r;
  r.objective_trace = {3.0, 2.0};
  r.step_norms = {{1.0, 0.5}, {0.1, 0.05}};
  r.inner_iterations = {4, 2};
  r.iterations_run = 2;
  std::ostringstream out;
  write_fit_trace(out, r);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "iteration,objective,step_a,step_z,inner_iterations");
  std::getline(lines, line);
  EXPECT_EQ(line.substr(0, 4), "1,3,");
  int count = 1;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 2);
}

}  // namespace
}  // namespace dgsl
