#ifndef SLGRAPH_ASSEMBLY_HPP
#define SLGRAPH_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <utility>
#include <vector>

#include "slgraph/graph.hpp"

namespace slg {

/// P1 element matrices of one edge: stiffness = int y'phi' + q y phi with the
/// piecewise-constant q integrated exactly against the hat products, mass =
/// int y phi. Both (m+1) x (m+1) on the uniform m-cell mesh.
struct EdgeMatrices {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

EdgeMatrices assemble_edge(const Edge& e);

/// Discrete variational objects on the constraint-reduced P1 space:
/// the form matrix (F), the signed mass (B) and the unsigned mass, together
/// with the sparse constraint nullspace basis used for the congruence
/// reduction and the full-space block bookkeeping the Krein analysis needs.
struct DiscreteForm {
  Eigen::MatrixXd form;           // r x r, symmetric
  Eigen::MatrixXd signed_mass;    // r x r, symmetric, indefinite in general
  Eigen::MatrixXd unsigned_mass;  // r x r, symmetric positive definite
  Eigen::SparseMatrix<double> basis;               // N x r, columns span ker(constraints)
  Eigen::SparseMatrix<double> full_unsigned_mass;  // N x N, block diagonal per edge
  int dof_count = 0;  // r
  int full_dim = 0;   // N = sum (mesh_i + 1)
  std::vector<std::pair<int, int>> edge_slice;  // full-coordinate [lo,hi) per edge
  std::vector<int> edge_weight;                 // +-1, aligned with edge_slice
  std::vector<EdgeId> edge_id;                  // aligned with edge_slice
  EndpointMap endpoints;                        // full-coordinate endpoint dofs

  /// Expand reduced coordinates to full (broken, per-edge) nodal values.
  Eigen::VectorXd expand(const Eigen::VectorXd& u) const { return basis * u; }
  /// Full-coordinate unsigned inner product.
  double full_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(full_unsigned_mass * b);
  }
};

/// Assembles the global discrete form: per-edge blocks, f-weighted boundary
/// terms with the d-sigma sign (+f(1) at terminal, -f(0) at initial
/// endpoints), constraint collection over all vertices, and congruence
/// reduction of all three matrices by the constraint nullspace.
DiscreteForm assemble_global(const MetricGraph& g);

struct PositivityReport {
  bool positive = false;
  double rho1 = 0.0;    // smallest eigenvalue of F u = rho M u (when estimated)
  bool rho1_known = false;
  std::string message;  // empty when positive
};

/// Attempts a symmetric factorization of the form matrix; on success
/// estimates the smallest eigenvalue of the definite pencil (F, M).
PositivityReport check_positivity(const DiscreteForm& d, bool estimate_rho1 = true);

/// Cheap gate used by the solvers: throws HypothesisError
/// "L not positive definite; paper hypotheses violated" when F fails
/// the factorization probe.
void require_positive(const DiscreteForm& d);

}  // namespace slg

#endif
