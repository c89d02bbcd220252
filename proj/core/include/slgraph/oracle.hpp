#ifndef SLGRAPH_ORACLE_HPP
#define SLGRAPH_ORACLE_HPP

#include <string>
#include <vector>

#include "slgraph/graph.hpp"

namespace slg {

/// 2x2 transfer matrix of y'' = c y over an interval: maps (y, y') at the
/// left end to the right end. det = 1 (Wronskian).
struct TransferMatrix {
  double a = 1.0, b = 0.0;  // [[a, b],
  double c = 0.0, d = 1.0;  //  [c, d]]

  TransferMatrix operator*(const TransferMatrix& rhs) const {
    return {a * rhs.a + b * rhs.c, a * rhs.b + b * rhs.d,
            c * rhs.a + d * rhs.c, c * rhs.b + d * rhs.d};
  }
  double det() const { return a * d - b * c; }
};

/// Closed-form transfer matrix for constant coefficient c over `length`:
/// hyperbolic for c > 0, trigonometric for c < 0, shear for c = 0.
TransferMatrix edge_transfer(double coeff, double length);

/// Transfer matrix of a whole edge at spectral parameter lambda, composed
/// over the potential pieces with local coefficient c = q - b*lambda.
TransferMatrix edge_transfer(const Edge& e, double lambda);

/// Determinant of the 2K x 2K endpoint system (unknowns y_i(0), y_i'(0) per
/// edge): vertex constraint rows plus natural-condition rows in the form
/// convention, rows normalized by their max magnitude to suppress the
/// hyperbolic overflow at large |lambda|. Zeros in lambda are the
/// eigenvalues.
double secular_det(const MetricGraph& g, double lambda);

struct RootScan {
  std::vector<double> roots;  // ascending
  std::vector<std::string> warnings;
};

/// Samples the secular determinant on a uniform grid over [lo, hi] and
/// bisects every sign change down to |interval| <= 1e-10 * max(1, |lambda|).
/// Cells with a near-zero minimum but no sign change are flagged as possible
/// double roots. The grid must separate the roots (caller responsibility;
/// spacing below (pi/K)^2 is a safe default on unit-edge graphs).
RootScan scan_roots(const MetricGraph& g, double lo, double hi, int grid);

}  // namespace slg

#endif
