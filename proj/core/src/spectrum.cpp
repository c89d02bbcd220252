#include "slgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "slgraph/linalg.hpp"

namespace slg {

const EigenPair& SpectrumResult::at(int branch_index) const {
  if (branch_index > 0 && branch_index <= positive_count())
    return positive[branch_index - 1];
  if (branch_index < 0 && -branch_index <= negative_count())
    return negative[-branch_index - 1];
  throw ValidationError("unknown branch index " + std::to_string(branch_index));
}

namespace {

// Branch split of the reduced eigenvalues mu of B u = mu F u. The pencil
// eigenvalues are lambda = 1/mu; mu near zero signals a singular signed mass
// (broken assembly, since B is invertible on the discrete space).
void check_mu(const Eigen::VectorXd& mu) {
  const double scale = mu.cwiseAbs().maxCoeff();
  for (int i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i)) <= 1e-12 * scale)
      throw InvariantError("singular signed mass");
  }
}

}  // namespace

SpectrumResult solve_pencil(const DiscreteForm& d) {
  require_positive(d);
  SpectrumResult s;
  s.reduced_dimension = d.dof_count;

  // Cholesky reduction of the form matrix: with F = R^T R the problem
  // B u = mu F u becomes the single symmetric eigenproblem
  // (R^-T B R^-1) w = mu w; dsygvd performs exactly this reduction and hands
  // back u = R^-1 w, which is F-orthonormal (u^T F u = w^T w = I).
  const SymEigen eig = generalized_sym_eigen(d.signed_mass, d.form, true);
  check_mu(eig.values);

  // mu ascending: negatives first. lambda = 1/mu maps the negative mus to the
  // descending negative branch and the positive mus (reversed) to the
  // ascending positive branch.
  for (int i = 0; i < eig.values.size(); ++i) {
    const double mu = eig.values(i);
    if (mu < 0.0) {
      EigenPair p;
      p.lambda = 1.0 / mu;
      p.index = -(static_cast<int>(s.negative.size()) + 1);
      p.vec = eig.vectors.col(i);
      s.negative.push_back(std::move(p));
    }
  }
  for (int i = static_cast<int>(eig.values.size()) - 1; i >= 0; --i) {
    const double mu = eig.values(i);
    if (mu > 0.0) {
      EigenPair p;
      p.lambda = 1.0 / mu;
      p.index = static_cast<int>(s.positive.size()) + 1;
      p.vec = eig.vectors.col(i);
      s.positive.push_back(std::move(p));
    }
  }
  return s;
}

SpectrumValues solve_pencil_values(const DiscreteForm& d, bool force_dense) {
  require_positive(d);
  const Eigen::VectorXd mu =
      generalized_sym_eigenvalues(d.signed_mass, d.form, force_dense);
  check_mu(mu);
  SpectrumValues v;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu(i) < 0.0) v.negative.push_back(1.0 / mu(i));
  }
  for (int i = static_cast<int>(mu.size()) - 1; i >= 0; --i) {
    if (mu(i) > 0.0) v.positive.push_back(1.0 / mu(i));
  }
  return v;
}

std::vector<EdgeSamples> eigenfunction_values(const SpectrumResult& s,
                                              const DiscreteForm& d,
                                              int branch_index) {
  const EigenPair& pair = s.at(branch_index);
  const Eigen::VectorXd full = d.expand(pair.vec);
  std::vector<EdgeSamples> out;
  for (std::size_t e = 0; e < d.edge_slice.size(); ++e) {
    const auto [lo, hi] = d.edge_slice[e];
    EdgeSamples samples;
    samples.edge = d.edge_id[e];
    const int m = hi - lo - 1;
    for (int k = 0; k <= m; ++k) {
      samples.x.push_back(static_cast<double>(k) / m);
      samples.value.push_back(full(lo + k));
    }
    out.push_back(std::move(samples));
  }
  return out;
}

}  // namespace slg
