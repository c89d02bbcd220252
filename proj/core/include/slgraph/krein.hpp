#ifndef SLGRAPH_KREIN_HPP
#define SLGRAPH_KREIN_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <utility>
#include <vector>

#include "slgraph/spectrum.hpp"

namespace slg {

/// Indefinite (Krein) inner product [u,v] = u^T B v in reduced coordinates.
double indefinite_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        const DiscreteForm& d);

struct ConeEntry {
  int index = 0;        // branch index
  double bracket = 0.0; // [y,y]
  char cone = '+';      // '+' for C+, '-' for C-
};

/// Tags every eigenpair by the sign of [y,y] and checks it against the sign
/// of its eigenvalue. A mismatch (or a bracket collapsing to zero) throws
/// InvariantError("cone theorem violated").
std::vector<ConeEntry> classify_cone(const SpectrumResult& s, const DiscreteForm& d);

/// S = F^{-1} B in reduced coordinates, formed explicitly through the
/// Cholesky factors. Self-adjoint in the F inner product (F*S = B).
Eigen::MatrixXd build_S(const DiscreteForm& d);

/// Spectral projections P+- (F-orthogonal projectors onto the positive /
/// negative branches, in reduced coordinates) and coordinate projections Q+-
/// (exact edge masks on the full broken space).
struct Projections {
  Eigen::MatrixXd p_plus, p_minus;               // r x r
  Eigen::SparseMatrix<double> q_plus, q_minus;   // N x N, 0/1 diagonal
};

Projections spectral_projections(const DiscreteForm& d, const SpectrumResult& s);

/// ||u||_S = sqrt(u^T F |S| u) with |S| = S(P+ - P-). Nonnegative; zero only
/// at u = 0. A radicand below -1e-12 (scaled) throws InvariantError.
double s_norm(const Eigen::VectorXd& u, const DiscreteForm& d, const SpectrumResult& s);

/// F|S| = B(P+ - P-): the Gram matrix of the S inner product.
Eigen::MatrixXd s_inner_matrix(const DiscreteForm& d, const SpectrumResult& s);

/// Relative residuals of ||Vu||^2 = ||u||_S^2 + ||Wu||^2 with
/// V = Q+P+ + Q-P-, W = Q+P- + Q-P+, full-space norms taken in the unsigned
/// mass inner product on edge-split coordinates. One entry per probe;
/// large residuals are recorded, not thrown.
std::vector<double> verify_vw_identity(const DiscreteForm& d, const SpectrumResult& s,
                                       const std::vector<Eigen::VectorXd>& probes);

/// Residual of the adjoint identity V* = P+Q+ + P-Q- (adjoint taken between
/// the S inner product on the reduced space and the unsigned inner product on
/// the full space), relative to the norm of V*.
double vw_adjoint_residual(const DiscreteForm& d, const SpectrumResult& s);

/// d_{n+1}(y_1..y_n): smallest positive eigenvalue of the pencil restricted
/// to the B-orthogonal complement of the first n positive-branch
/// eigenvectors. Throws InvariantError("positive cone empty") if the
/// restricted problem has no positive direction.
double maxmin_value(int n, const DiscreteForm& d, const SpectrumResult& s);

/// (min, max) eigenvalue of the N x N half-range Gram matrix
/// G_nm = (Q+ y_n, Q+ y_m) in the unsigned inner product, after normalizing
/// each Q+ y_n. Throws InvariantError("eigenfunction vanishes on G+") when a
/// restriction has norm below 1e-12.
std::pair<double, double> halfrange_gram(const SpectrumResult& s, const DiscreteForm& d,
                                         int truncation);

struct KreinReport {
  std::vector<ConeEntry> cone_table;
  double s_ratio_min = 0.0, s_ratio_max = 0.0;        // ||u||_S / ||u|| over probes
  double s_ratio_lower = 0.0, s_ratio_upper = 0.0;    // extremal generalized eigenvalues
  std::vector<double> vw_residuals;                   // one per probe
  std::vector<std::pair<int, double>> maxmin_gaps;    // (n+1, |d-l|/l)
  struct GramEntry {
    int truncation;
    double min_eig, max_eig;
  };
  std::vector<GramEntry> gram_spectra;
};

/// Runs the whole Krein-space verification battery with `probes` seeded
/// random probe vectors and the given Gram truncations.
KreinReport krein_analyze(const DiscreteForm& d, const SpectrumResult& s,
                          int probes, std::uint64_t seed,
                          const std::vector<int>& truncations);

}  // namespace slg

#endif
