#include "slgraph/krein.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <set>

#include "slgraph/linalg.hpp"

namespace slg {

double indefinite_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        const DiscreteForm& d) {
  if (u.size() != d.dof_count || v.size() != d.dof_count)
    throw std::invalid_argument("indefinite_inner: dimension mismatch");
  return u.dot(d.signed_mass * v);
}

std::vector<ConeEntry> classify_cone(const SpectrumResult& s, const DiscreteForm& d) {
  std::vector<ConeEntry> table;
  auto classify = [&](const EigenPair& p) {
    ConeEntry e;
    e.index = p.index;
    e.bracket = indefinite_inner(p.vec, p.vec, d);
    const double norm_sq = p.vec.dot(d.unsigned_mass * p.vec);
    if (std::abs(e.bracket) < 1e-10 * norm_sq)
      throw InvariantError("cone theorem violated: [y,y] not bounded away from zero");
    e.cone = e.bracket > 0.0 ? '+' : '-';
    if ((e.bracket > 0.0) != (p.lambda > 0.0))
      throw InvariantError("cone theorem violated");
    table.push_back(e);
  };
  for (const EigenPair& p : s.positive) classify(p);
  for (const EigenPair& p : s.negative) classify(p);
  return table;
}

Eigen::MatrixXd build_S(const DiscreteForm& d) {
  require_positive(d);
  Eigen::LLT<Eigen::MatrixXd> llt(d.form);
  if (llt.info() != Eigen::Success)
    throw HypothesisError("L not positive definite; paper hypotheses violated");
  Eigen::MatrixXd s = llt.solve(d.signed_mass);
  // F-self-adjointness: F*S equals the symmetric B up to solver roundoff.
  const Eigen::MatrixXd fs = d.form * s;
  const double asym = (fs - fs.transpose()).norm();
  if (asym > 1e-12 * std::max(fs.norm(), 1e-300))
    throw InvariantError("S not self-adjoint in the F inner product");
  return s;
}

Projections spectral_projections(const DiscreteForm& d, const SpectrumResult& s) {
  Projections pr;
  const int r = d.dof_count;
  Eigen::MatrixXd yp(r, s.positive_count());
  for (int i = 0; i < s.positive_count(); ++i) yp.col(i) = s.positive[i].vec;
  Eigen::MatrixXd yn(r, s.negative_count());
  for (int i = 0; i < s.negative_count(); ++i) yn.col(i) = s.negative[i].vec;
  // F-orthonormal eigenvectors make the F-orthogonal projectors Y Y^T F.
  pr.p_plus = yp * yp.transpose() * d.form;
  pr.p_minus = yn * yn.transpose() * d.form;

  std::vector<Eigen::Triplet<double>> plus, minus;
  for (std::size_t e = 0; e < d.edge_slice.size(); ++e) {
    const auto [lo, hi] = d.edge_slice[e];
    for (int i = lo; i < hi; ++i) {
      if (d.edge_weight[e] > 0)
        plus.emplace_back(i, i, 1.0);
      else
        minus.emplace_back(i, i, 1.0);
    }
  }
  pr.q_plus.resize(d.full_dim, d.full_dim);
  pr.q_minus.resize(d.full_dim, d.full_dim);
  pr.q_plus.setFromTriplets(plus.begin(), plus.end());
  pr.q_minus.setFromTriplets(minus.begin(), minus.end());
  return pr;
}

Eigen::MatrixXd s_inner_matrix(const DiscreteForm& d, const SpectrumResult& s) {
  const Projections pr = spectral_projections(d, s);
  return d.signed_mass * (pr.p_plus - pr.p_minus);
}

double s_norm(const Eigen::VectorXd& u, const DiscreteForm& d, const SpectrumResult& s) {
  if (u.size() != d.dof_count) throw std::invalid_argument("s_norm: dimension mismatch");
  const double radicand = u.dot(s_inner_matrix(d, s) * u);
  const double scale = std::max(1.0, u.dot(d.unsigned_mass * u));
  if (radicand < -1e-12 * scale)
    throw InvariantError("S-norm radicand negative beyond tolerance");
  return std::sqrt(std::max(radicand, 0.0));
}

std::vector<double> verify_vw_identity(const DiscreteForm& d, const SpectrumResult& s,
                                       const std::vector<Eigen::VectorXd>& probes) {
  const Projections pr = spectral_projections(d, s);
  const Eigen::MatrixXd sg = d.signed_mass * (pr.p_plus - pr.p_minus);
  std::vector<double> residuals;
  residuals.reserve(probes.size());
  for (const Eigen::VectorXd& u : probes) {
    if (u.size() != d.dof_count)
      throw std::invalid_argument("verify_vw_identity: dimension mismatch");
    const Eigen::VectorXd fp = d.expand(pr.p_plus * u);
    const Eigen::VectorXd fm = d.expand(pr.p_minus * u);
    const Eigen::VectorXd vu = pr.q_plus * fp + pr.q_minus * fm;
    const Eigen::VectorXd wu = pr.q_plus * fm + pr.q_minus * fp;
    const double v2 = d.full_inner(vu, vu);
    const double w2 = d.full_inner(wu, wu);
    const double s2 = u.dot(sg * u);
    if (v2 <= 0.0) {
      residuals.push_back(0.0);
      continue;
    }
    residuals.push_back(std::abs(v2 - s2 - w2) / v2);
  }
  return residuals;
}

namespace {

Eigen::SparseMatrix<double> signed_full_mass(const DiscreteForm& d) {
  Eigen::SparseMatrix<double> j(d.full_dim, d.full_dim);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t e = 0; e < d.edge_slice.size(); ++e) {
    const auto [lo, hi] = d.edge_slice[e];
    for (int i = lo; i < hi; ++i)
      trips.emplace_back(i, i, d.edge_weight[e] > 0 ? 1.0 : -1.0);
  }
  j.setFromTriplets(trips.begin(), trips.end());
  return j * d.full_unsigned_mass;
}

}  // namespace

double vw_adjoint_residual(const DiscreteForm& d, const SpectrumResult& s) {
  const Projections pr = spectral_projections(d, s);
  const Eigen::MatrixXd zd(d.basis);
  const Eigen::MatrixXd v =
      pr.q_plus * (zd * pr.p_plus) + pr.q_minus * (zd * pr.p_minus);  // N x r
  const Eigen::MatrixXd sg = d.signed_mass * (pr.p_plus - pr.p_minus);
  // Adjoint between (.,.)_S on the reduced space and the unsigned full inner
  // product: V* = (F|S|)^{-1} V^T M.
  const Eigen::MatrixXd rhs = v.transpose() * Eigen::MatrixXd(d.full_unsigned_mass);
  const Eigen::MatrixXd vstar = Eigen::LLT<Eigen::MatrixXd>(sg).solve(rhs);

  // Spectral form of P+Q+ + P-Q- with the projections extended to the full
  // space by B-orthogonal expansion.
  const Eigen::SparseMatrix<double> bf = signed_full_mass(d);
  const int r = d.dof_count;
  Eigen::MatrixXd candidate = Eigen::MatrixXd::Zero(r, d.full_dim);
  for (const EigenPair& p : s.positive) {
    const Eigen::VectorXd row = (bf * (pr.q_plus * d.expand(p.vec))) * p.lambda;
    candidate += p.vec * row.transpose();
  }
  for (const EigenPair& p : s.negative) {
    const Eigen::VectorXd row = (bf * (pr.q_minus * d.expand(p.vec))) * p.lambda;
    candidate += p.vec * row.transpose();
  }
  return (vstar - candidate).norm() / std::max(vstar.norm(), 1e-300);
}

double maxmin_value(int n, const DiscreteForm& d, const SpectrumResult& s) {
  if (n < 0 || n >= s.positive_count())
    throw ValidationError("maxmin_value: fewer than n+1 positive eigenvalues");
  const int r = d.dof_count;
  if (n == 0) {
    const Eigen::VectorXd mu = generalized_sym_eigenvalues(d.signed_mass, d.form);
    const double mu_max = mu(mu.size() - 1);
    if (mu_max <= 0.0) throw InvariantError("positive cone empty");
    return 1.0 / mu_max;
  }
  Eigen::MatrixXd constraints(n, r);
  for (int i = 0; i < n; ++i)
    constraints.row(i) = (d.signed_mass * s.positive[i].vec).transpose();
  const Eigen::SparseMatrix<double> k = constraint_nullspace(constraints, r);
  const Eigen::MatrixXd kd(k);
  const Eigen::MatrixXd fc = kd.transpose() * d.form * kd;
  const Eigen::MatrixXd bc = kd.transpose() * d.signed_mass * kd;
  const Eigen::VectorXd mu = generalized_sym_eigenvalues(bc, fc);
  const double mu_max = mu(mu.size() - 1);
  if (mu_max <= 0.0) throw InvariantError("positive cone empty");
  return 1.0 / mu_max;
}

std::pair<double, double> halfrange_gram(const SpectrumResult& s, const DiscreteForm& d,
                                         int truncation) {
  if (truncation < 1 || truncation > s.positive_count())
    throw ValidationError("halfrange_gram: truncation exceeds positive branch");
  const Projections pr = spectral_projections(d, s);
  Eigen::MatrixXd w(d.full_dim, truncation);
  for (int i = 0; i < truncation; ++i) {
    Eigen::VectorXd qi = pr.q_plus * d.expand(s.positive[i].vec);
    const double norm = std::sqrt(d.full_inner(qi, qi));
    if (norm < 1e-12) throw InvariantError("eigenfunction vanishes on G+");
    w.col(i) = qi / norm;
  }
  const Eigen::MatrixXd gram = w.transpose() * d.full_unsigned_mass * w;
  const SymEigen eig = sym_eigen(gram, false);
  return {eig.values(0), eig.values(eig.values.size() - 1)};
}

KreinReport krein_analyze(const DiscreteForm& d, const SpectrumResult& s,
                          int probes, std::uint64_t seed,
                          const std::vector<int>& truncations) {
  KreinReport rep;
  rep.cone_table = classify_cone(s, d);

  const Eigen::MatrixXd sg = s_inner_matrix(d, s);
  const SymEigen extremal = generalized_sym_eigen(sg, d.unsigned_mass, false);
  rep.s_ratio_lower = std::sqrt(std::max(extremal.values(0), 0.0));
  rep.s_ratio_upper = std::sqrt(std::max(extremal.values(extremal.values.size() - 1), 0.0));

  NormalSampler sampler(seed);
  std::vector<Eigen::VectorXd> probe_vecs;
  probe_vecs.reserve(probes);
  for (int i = 0; i < probes; ++i) probe_vecs.push_back(sampler.vector(d.dof_count));

  rep.s_ratio_min = 0.0;
  rep.s_ratio_max = 0.0;
  bool first = true;
  for (const Eigen::VectorXd& u : probe_vecs) {
    const double s2 = std::max(u.dot(sg * u), 0.0);
    const double m2 = u.dot(d.unsigned_mass * u);
    if (m2 <= 0.0) continue;
    const double ratio = std::sqrt(s2 / m2);
    if (first) {
      rep.s_ratio_min = rep.s_ratio_max = ratio;
      first = false;
    } else {
      rep.s_ratio_min = std::min(rep.s_ratio_min, ratio);
      rep.s_ratio_max = std::max(rep.s_ratio_max, ratio);
    }
  }

  rep.vw_residuals = verify_vw_identity(d, s, probe_vecs);

  const int max_n = std::min(5, s.positive_count() - 1);
  for (int n = 0; n <= max_n; ++n) {
    const double dval = maxmin_value(n, d, s);
    const double lam = s.positive[n].lambda;
    rep.maxmin_gaps.emplace_back(n + 1, std::abs(dval - lam) / lam);
  }

  for (int t : truncations) {
    if (t < 1 || t > s.positive_count()) continue;
    const auto [lo, hi] = halfrange_gram(s, d, t);
    rep.gram_spectra.push_back({t, lo, hi});
  }
  return rep;
}

}  // namespace slg
