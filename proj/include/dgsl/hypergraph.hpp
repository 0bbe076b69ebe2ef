#pragma once

#include <istream>
#include <vector>

#include "dgsl/linalg.hpp"

namespace dgsl {

struct Hypergraph {
  Index n_vertices = 0;
  std::vector<std::vector<Index>> edges;
  std::vector<double> weights;  // one positive weight per hyperedge
};

// Checks index ranges, nonempty edges and positive weights. Duplicate vertices
// inside an edge are rejected.
void validate(const Hypergraph& hg);

/// Reads one hyperedge per line: whitespace-separated vertex indices with an
/// optional trailing "w=<weight>" (default 1). Blank lines and lines starting
/// with '#' are skipped. n_vertices is the largest index + 1 unless given.
Hypergraph parse_hypergraph(std::istream& in, Index n_vertices = -1);

/// |V| x |E| incidence matrix U with U(v, e) = 1 iff v is in e.
Matrix incidence(const Hypergraph& hg);

/// O = Dv^{-1/2} U We De^{-1} U^T Dv^{-1/2}. Throws DataError naming the first
/// vertex that belongs to no hyperedge.
Matrix hypergraph_o(const Hypergraph& hg);

/// I - O.
Matrix hypergraph_laplacian(const Hypergraph& hg);

/// W + gamma2 O.
Matrix hybrid_affinity(const Matrix& w, const Matrix& o, double gamma2);

}  // namespace dgsl
