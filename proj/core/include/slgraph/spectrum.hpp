#ifndef SLGRAPH_SPECTRUM_HPP
#define SLGRAPH_SPECTRUM_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "slgraph/assembly.hpp"

namespace slg {

struct EigenPair {
  int index = 0;       // +1,+2,... on the positive branch, -1,-2,... on the negative
  double lambda = 0.0;
  Eigen::VectorXd vec;  // reduced coordinates, F-orthonormal
};

/// Spectrum of the pencil F u = lambda B u, split into branches:
/// positive ascending 0 < l1 <= l2 <= ..., negative descending
/// 0 > l_-1 >= l_-2 >= ... Zero is never an eigenvalue under the standing
/// positivity hypothesis.
struct SpectrumResult {
  std::vector<EigenPair> positive;
  std::vector<EigenPair> negative;
  int reduced_dimension = 0;
  std::string normalization = "F-orthonormal";

  const EigenPair& at(int branch_index) const;  // throws ValidationError on unknown index
  int positive_count() const { return static_cast<int>(positive.size()); }
  int negative_count() const { return static_cast<int>(negative.size()); }
};

/// Values-only spectrum (same branch layout), for convergence gates and
/// decoupled scans where eigenvectors are not needed.
struct SpectrumValues {
  std::vector<double> positive;  // ascending
  std::vector<double> negative;  // descending
};

/// Solves the pencil by Cholesky reduction of the form matrix to a single
/// symmetric eigenproblem (the symmetric path is structural: no nonsymmetric
/// fallback exists). Eigenvectors come back F-orthonormalized.
SpectrumResult solve_pencil(const DiscreteForm& d);

SpectrumValues solve_pencil_values(const DiscreteForm& d, bool force_dense = false);

/// Per-edge nodal samples of one eigenfunction, expanded through the
/// constraint basis.
struct EdgeSamples {
  EdgeId edge;
  std::vector<double> x;      // mesh coordinates in [0,1]
  std::vector<double> value;  // nodal values
};

std::vector<EdgeSamples> eigenfunction_values(const SpectrumResult& s,
                                              const DiscreteForm& d,
                                              int branch_index);

}  // namespace slg

#endif
