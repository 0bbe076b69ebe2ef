#include "dgsl/hypergraph.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "dgsl/errors.hpp"

namespace dgsl {

void validate(const Hypergraph& hg) {
  if (hg.n_vertices < 0) throw DataError("hypergraph: negative vertex count");
  if (hg.weights.size() != hg.edges.size()) {
    throw DataError("hypergraph: need exactly one weight per hyperedge");
  }
  for (std::size_t e = 0; e < hg.edges.size(); ++e) {
    const auto& edge = hg.edges[e];
    if (edge.empty()) {
      std::ostringstream os;
      os << "hypergraph: hyperedge " << e << " is empty";
      throw DataError(os.str());
    }
    if (!(hg.weights[e] > 0.0)) {
      std::ostringstream os;
      os << "hypergraph: hyperedge " << e << " has non-positive weight";
      throw DataError(os.str());
    }
    std::vector<Index> sorted = edge;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      std::ostringstream os;
      os << "hypergraph: hyperedge " << e << " repeats a vertex";
      throw DataError(os.str());
    }
    if (sorted.front() < 0 || sorted.back() >= hg.n_vertices) {
      std::ostringstream os;
      os << "hypergraph: hyperedge " << e << " references a vertex outside [0, "
         << hg.n_vertices << ")";
      throw DataError(os.str());
    }
  }
}

Hypergraph parse_hypergraph(std::istream& in, Index n_vertices) {
  Hypergraph hg;
  Index max_index = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string tok;
    std::vector<Index> edge;
    double weight = 1.0;
    bool have_weight = false;
    while (tokens >> tok) {
      if (have_weight) {
        std::ostringstream os;
        os << "hypergraph line " << line_no << ": tokens after the weight";
        throw DataError(os.str());
      }
      try {
        std::size_t used = 0;
        if (tok.rfind("w=", 0) == 0) {
          weight = std::stod(tok.substr(2), &used);
          if (used != tok.size() - 2) throw std::invalid_argument(tok);
          have_weight = true;
        } else {
          const long long v = std::stoll(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
          edge.push_back(static_cast<Index>(v));
          max_index = std::max(max_index, static_cast<Index>(v));
        }
      } catch (const std::logic_error&) {
        std::ostringstream os;
        os << "hypergraph line " << line_no << ": cannot parse '" << tok << "'";
        throw DataError(os.str());
      }
    }
    if (edge.empty()) {
      std::ostringstream os;
      os << "hypergraph line " << line_no << ": hyperedge has no vertices";
      throw DataError(os.str());
    }
    hg.edges.push_back(std::move(edge));
    hg.weights.push_back(weight);
  }
  hg.n_vertices = n_vertices >= 0 ? n_vertices : max_index + 1;
  validate(hg);
  return hg;
}

Matrix incidence(const Hypergraph& hg) {
  validate(hg);
  Matrix u = Matrix::Zero(hg.n_vertices, static_cast<Index>(hg.edges.size()));
  for (std::size_t e = 0; e < hg.edges.size(); ++e) {
    for (Index v : hg.edges[e]) u(v, static_cast<Index>(e)) = 1.0;
  }
  return u;
}

Matrix hypergraph_o(const Hypergraph& hg) {
  const Matrix u = incidence(hg);
  const Vector we = Eigen::Map<const Vector>(hg.weights.data(),
                                             static_cast<Index>(hg.weights.size()));
  const Vector dv = u * we;
  for (Index v = 0; v < dv.size(); ++v) {
    if (!(dv(v) > 0.0)) {
      std::ostringstream os;
      os << "hypergraph: vertex " << v << " belongs to no hyperedge";
      throw DataError(os.str());
    }
  }
  const Vector de = u.colwise().sum().transpose();
  const Vector dv_inv_sqrt = dv.cwiseSqrt().cwiseInverse();
  const Vector edge_scale = we.cwiseQuotient(de);
  const Matrix left = dv_inv_sqrt.asDiagonal() * u;
  return symmetrize(left * edge_scale.asDiagonal() * left.transpose());
}

Matrix hypergraph_laplacian(const Hypergraph& hg) {
  const Matrix o = hypergraph_o(hg);
  return Matrix::Identity(o.rows(), o.cols()) - o;
}

Matrix hybrid_affinity(const Matrix& w, const Matrix& o, double gamma2) {
  if (w.rows() != o.rows() || w.cols() != o.cols()) {
    throw InvalidArgument("hybrid_affinity: W and O differ in shape");
  }
  if (gamma2 < 0.0) throw InvalidArgument("hybrid_affinity: gamma2 must be >= 0");
  return w + gamma2 * o;
}

}  // namespace dgsl
