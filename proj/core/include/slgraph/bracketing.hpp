#ifndef SLGRAPH_BRACKETING_HPP
#define SLGRAPH_BRACKETING_HPP

#include <map>
#include <vector>

#include "slgraph/spectrum.hpp"

namespace slg {

enum class DecoupledKind { Dirichlet, NonDirichlet };

/// Sign convention of the decoupled non-Dirichlet conditions. Form is the
/// authoritative one ((f u + u')(0) = 0 = (f u + u')(1)); Paper exposes the
/// y'(0) = f(0) y(0), y'(1) = f(1) y(1) variant for side-by-side comparison.
enum class NondSign { Form, Paper };

/// Per-edge decoupled spectra. `per_edge` holds each edge's *scalar*
/// eigenvalues (of -y'' + q y = sigma y with the stated end conditions);
/// `merged_positive` is the sorted multiset union over positive-weight edges
/// only, and the multiplicity table counts, per distinct scalar value, the
/// total and positive-edge contributions.
struct DecoupledSpectrum {
  DecoupledKind kind = DecoupledKind::Dirichlet;
  std::map<EdgeId, std::vector<double>> per_edge;
  std::vector<double> merged_positive;
  struct MultiplicityEntry {
    double value = 0.0;
    int total = 0;     // nu
    int positive = 0;  // nu+
  };
  std::vector<MultiplicityEntry> multiplicity;
  std::vector<EdgeId> hypothesis_violations;  // ND edges whose scalar form is not PD
};

DecoupledSpectrum decoupled_spectrum(const MetricGraph& g, DecoupledKind kind,
                                     NondSign sign = NondSign::Form);

struct BracketRow {
  int n = 0;
  double lambda_N = 0.0, lambda = 0.0, lambda_D = 0.0;
  bool pass = false;
  bool verified = true;  // false when the row's ND hypothesis was violated
  double slack_lower = 0.0, slack_upper = 0.0;  // lambda - lambda_N, lambda_D - lambda
};

struct BracketReport {
  std::vector<BracketRow> rows;
  double tol_lower = 0.0, tol_upper = 0.0;  // applied relative allowances
  bool truncated = false;  // requested n beyond the shortest decoupled list
  std::vector<EdgeId> nd_violations;
  bool all_pass() const;
};

/// Compares the coupled positive branch against the merged decoupled spectra
/// lambda_n^N <= lambda_n <= lambda_n^D on identical per-edge meshes.
/// tol < 0 selects the automatic allowance: 0 on the upper bound (nested
/// trial spaces), 0 on the lower bound when the graph is all-positive or
/// every decoupled ND edge form is positive definite, else 1e-2 relative.
BracketReport verify_bracketing(const MetricGraph& g, const SpectrumResult& s,
                                double tol = -1.0, NondSign sign = NondSign::Form);

struct AsymptoticFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // of the least-squares line
  double target = 0.0;        // pi / length(G+)
  double max_remainder = 0.0; // max |sqrt(lambda_n) - n*target|
  int n_lo = 0, n_hi = 0;
  std::vector<double> sqrt_lambda;  // per n in [n_lo, n_hi]
};

/// True when every positive-branch eigenvalue up to n_max moves by less than
/// `threshold` (relative) under a mesh doubling.
bool mesh_converged(const MetricGraph& g, int n_max, double threshold = 1e-3);

/// Least-squares line sqrt(lambda_n) ~ a n + b over the positive branch,
/// gated by the mesh-doubling convergence check (throws ValidationError
/// "mesh too coarse for requested n" when the gate fails).
AsymptoticFit asymptotic_fit(const SpectrumResult& s, const MetricGraph& g,
                             int n_lo, int n_hi);

}  // namespace slg

#endif
