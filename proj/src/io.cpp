#include "dgsl/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "dgsl/errors.hpp"

namespace dgsl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_at(std::string_view what, int line_no, std::string_view detail) {
  std::ostringstream os;
  os << what << " line " << line_no << ": " << detail;
  throw DataError(os.str());
}

double parse_double(const std::string& tok, int line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (tok.empty() || end != begin + tok.size() || errno == ERANGE || !std::isfinite(v)) {
    fail_at("features", line_no, "cannot parse '" + tok + "' as a finite number");
  }
  return v;
}

long long parse_integer(const std::string& tok, std::string_view what, int line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (tok.empty() || end != begin + tok.size() || errno == ERANGE) {
    fail_at(what, line_no, "cannot parse '" + tok + "' as an integer");
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

Matrix read_features_csv(std::istream& in, bool div255) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_double(trim(field), line_no));
    if (!line.empty() && trim(line).back() == ',') {
      fail_at("features", line_no, "trailing comma");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "expected " << rows.front().size() << " columns, found " << row.size();
      fail_at("features", line_no, os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("features: no data rows");
  const auto d = static_cast<Index>(rows.front().size());
  Matrix x(d, static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (Index i = 0; i < d; ++i) x(i, static_cast<Index>(j)) = rows[j][static_cast<std::size_t>(i)];
  }
  if (div255) x /= 255.0;
  return x;
}

Labeling read_labels(std::istream& in) {
  Labeling out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string tok = trim(line);
    if (tok.empty()) continue;
    const long long v = parse_integer(tok, "labels", line_no);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail_at("labels", line_no, "label out of range");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& features,
                     const std::optional<std::filesystem::path>& labels, bool div255) {
  Dataset ds;
  {
    auto in = open_input(features);
    ds.x = read_features_csv(in, div255);
  }
  ds.name = features.stem().string();
  if (labels) {
    auto in = open_input(*labels);
    ds.truth = read_labels(in);
    if (static_cast<Index>(ds.truth->size()) != ds.x.cols()) {
      std::ostringstream os;
      os << "labels file has " << ds.truth->size() << " entries, features have "
         << ds.x.cols() << " points";
      throw DataError(os.str());
    }
  }
  return ds;
}

ConstraintSet read_constraints(std::istream& in, Index n) {
  std::vector<IndexPair> ml;
  std::vector<IndexPair> cl;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream tokens(t);
    std::string kind, a, b, extra;
    if (!(tokens >> kind >> a >> b) || (tokens >> extra)) {
      fail_at("constraints", line_no, "expected '<ml|cl> i j'");
    }
    const IndexPair pair{parse_integer(a, "constraints", line_no),
                         parse_integer(b, "constraints", line_no)};
    if (kind == "ml") {
      ml.push_back(pair);
    } else if (kind == "cl") {
      cl.push_back(pair);
    } else {
      fail_at("constraints", line_no, "unknown kind '" + kind + "'");
    }
  }
  return ConstraintSet(n, std::move(ml), std::move(cl));
}

void write_constraints(std::ostream& out, const ConstraintSet& cs) {
  for (const auto& [i, j] : cs.must_links()) out << "ml " << i << ' ' << j << '\n';
  for (const auto& [i, j] : cs.cannot_links()) out << "cl " << i << ' ' << j << '\n';
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  write_matrix_csv(out, m);
}

void write_labels(std::ostream& out, const Labeling& labels) {
  for (int v : labels) out << v << '\n';
}

Matrix embedding_distance(const Matrix& h) {
  const Matrix u = normalize_columns(h);
  const Index n = u.cols();
  Matrix p = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double d = (u.col(i) - u.col(j)).norm();
      p(i, j) = d;
      p(j, i) = d;
    }
  }
  return p;
}

void emit_trace(const Matrix& z, const Matrix& h, const std::filesystem::path& dir,
                std::string_view tag) {
  std::filesystem::create_directories(dir);
  const std::string suffix = std::string(tag) + ".csv";
  write_matrix_csv(dir / ("abs_z_" + suffix), z.cwiseAbs());
  write_matrix_csv(dir / ("distance_" + suffix), embedding_distance(h));
}

void emit_trace(const FitResult& result, const std::filesystem::path& dir,
                std::string_view tag) {
  emit_trace(result.z, result.h, dir, tag);
}

void write_fit_trace(std::ostream& out, const FitResult& result) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "iteration,objective,step_a,step_z,inner_iterations\n";
  for (std::size_t t = 0; t < result.objective_trace.size(); ++t) {
    out << t + 1 << ',' << result.objective_trace[t] << ',' << result.step_norms[t].a
        << ',' << result.step_norms[t].z << ',' << result.inner_iterations[t] << '\n';
  }
}

}  // namespace dgsl
