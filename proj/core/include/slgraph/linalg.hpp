#ifndef SLGRAPH_LINALG_HPP
#define SLGRAPH_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <random>
#include <vector>

// Internal dense/banded linear-algebra helpers shared by the solver modules.
// Everything here operates on plain Eigen matrices; the heavy factorizations
// are delegated to LAPACK.

namespace slg {

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // empty when values-only
};

/// All eigenvalues (and optionally eigenvectors) of a dense symmetric matrix.
SymEigen sym_eigen(const Eigen::MatrixXd& a, bool with_vectors = true);

/// Generalized symmetric-definite problem a*x = mu * b*x with b positive
/// definite, reduced through the Cholesky factor b = R^T R. Eigenvalues
/// ascending; eigenvectors are b-orthonormal (X^T b X = I).
/// Throws HypothesisError when b is not positive definite.
SymEigen generalized_sym_eigen(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               bool with_vectors = true);

/// Values-only variant that reorders with Cuthill-McKee and uses the banded
/// LAPACK driver when both matrices end up with a small bandwidth (path- and
/// tree-shaped graphs do). Falls back to the dense route otherwise.
/// `force_dense` pins the dense route (used to cross-check the two paths).
Eigen::VectorXd generalized_sym_eigenvalues(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& b,
                                            bool force_dense = false);

/// Symmetric bandwidth of max(|a|, |b|) under the identity ordering.
int pencil_bandwidth(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Cuthill-McKee ordering of the union sparsity pattern of two symmetric
/// matrices. Returns the permutation p such that row p[i] of the original
/// becomes row i of the reordered matrix.
std::vector<int> cuthill_mckee(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Attempted Cholesky factorization. `ok` is false when LAPACK reports a
/// non-positive pivot or when the smallest pivot is below the scaled
/// threshold (semi-definite matrices round to tiny pivots of either sign).
struct CholeskyProbe {
  bool ok = false;
  double min_pivot_sq = 0.0;  // square of the smallest diagonal of the factor
};
CholeskyProbe spd_probe(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

/// Row-reduced echelon form with partial pivoting. Returns the pivot column
/// of each row in `pivots` (-1 for rows that reduced to zero).
struct Rref {
  Eigen::MatrixXd r;
  std::vector<int> pivots;
  int rank = 0;
};
Rref rref(Eigen::MatrixXd m, double rel_tol = 1e-12);

/// Sparse basis of the nullspace of a constraint matrix, by Gauss-Jordan
/// elimination: one column per free (non-pivot) variable, with unit entry at
/// the free variable and the back-substituted pivot entries above it.
/// Throws ValidationError when a row is linearly dependent on the others.
Eigen::SparseMatrix<double> constraint_nullspace(const Eigen::MatrixXd& constraints,
                                                 int dim);

/// Deterministic standard-normal stream: mt19937_64 (whose raw output is
/// pinned by the standard) plus a hand-rolled Box-Muller, so probe vectors do
/// not depend on libstdc++'s distribution internals.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()();
  Eigen::VectorXd vector(int n);

 private:
  double uniform();  // in (0,1)
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace slg

#endif
