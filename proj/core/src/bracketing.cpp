#include "slgraph/bracketing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slgraph/linalg.hpp"

namespace slg {

namespace {

// Single-edge graph carrying the edge's own q and mesh, with the stated
// decoupled end conditions. The non-Dirichlet f values come from the parent
// graph's co-normal data; endpoints at Dirichlet or Kirchhoff vertices get 0.
MetricGraph decoupled_edge_graph(const MetricGraph& g, const Edge& e,
                                 DecoupledKind kind, NondSign sign) {
  MetricGraph one;
  Edge copy = e;
  copy.weight = +1;  // scalar problem -y'' + q y = sigma y
  one.edges.push_back(copy);
  one.vertices.push_back(e.start);
  if (e.end != e.start) one.vertices.push_back(e.end);

  if (kind == DecoupledKind::Dirichlet) {
    for (const VertexId& v : one.vertices)
      one.conditions[v] = VertexCondition::dirichlet();
    return one;
  }
  const double flip = sign == NondSign::Paper ? -1.0 : 1.0;
  const double f0 = flip * g.conditions.at(e.start).f_at({e.id, 0});
  const double f1 = flip * g.conditions.at(e.end).f_at({e.id, 1});
  std::map<VertexId, std::map<EndpointRef, double>> per_vertex;
  per_vertex[e.start][{e.id, 0}] = f0;
  per_vertex[e.end][{e.id, 1}] = f1;
  for (const VertexId& v : one.vertices)
    one.conditions[v] = VertexCondition::robin(per_vertex[v]);
  return one;
}

}  // namespace

DecoupledSpectrum decoupled_spectrum(const MetricGraph& g, DecoupledKind kind,
                                     NondSign sign) {
  require_valid(g);
  DecoupledSpectrum out;
  out.kind = kind;

  std::vector<std::pair<double, int>> all;  // (sigma, weight)
  for (const Edge& e : g.edges) {
    const MetricGraph one = decoupled_edge_graph(g, e, kind, sign);
    const DiscreteForm d = assemble_global(one);
    if (!spd_probe(d.form).ok) out.hypothesis_violations.push_back(e.id);
    const Eigen::VectorXd sigma = generalized_sym_eigenvalues(d.form, d.unsigned_mass);
    std::vector<double> list(sigma.data(), sigma.data() + sigma.size());
    for (double v : list) all.emplace_back(v, e.weight);
    if (e.weight > 0)
      out.merged_positive.insert(out.merged_positive.end(), list.begin(), list.end());
    out.per_edge[e.id] = std::move(list);
  }
  std::sort(out.merged_positive.begin(), out.merged_positive.end());

  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    DecoupledSpectrum::MultiplicityEntry entry;
    entry.value = all[i].first;
    std::size_t j = i;
    const double tol = 1e-8 * std::max(1.0, std::abs(entry.value));
    while (j < all.size() && all[j].first - entry.value <= tol) {
      ++entry.total;
      if (all[j].second > 0) ++entry.positive;
      ++j;
    }
    out.multiplicity.push_back(entry);
    i = j;
  }
  return out;
}

bool BracketReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BracketRow& r) { return r.pass; });
}

BracketReport verify_bracketing(const MetricGraph& g, const SpectrumResult& s,
                                double tol, NondSign sign) {
  require_valid(g);
  const ValidationReport vr = validate_graph(g);
  int full_dim = 0;
  for (const Edge& e : g.edges) full_dim += e.mesh + 1;
  if (full_dim - vr.constraint_rows != s.reduced_dimension)
    throw ValidationError("non-nested discretizations");

  const DecoupledSpectrum nd =
      decoupled_spectrum(g, DecoupledKind::NonDirichlet, sign);
  const DecoupledSpectrum dir = decoupled_spectrum(g, DecoupledKind::Dirichlet, sign);

  BracketReport rep;
  rep.nd_violations = nd.hypothesis_violations;
  if (tol >= 0.0) {
    rep.tol_lower = rep.tol_upper = tol;
  } else {
    rep.tol_upper = 0.0;
    rep.tol_lower =
        (g.all_positive() || nd.hypothesis_violations.empty()) ? 0.0 : 1e-2;
  }

  const int count = std::min({s.positive_count(),
                              static_cast<int>(nd.merged_positive.size()),
                              static_cast<int>(dir.merged_positive.size())});
  rep.truncated = s.positive_count() > count;
  const bool verified = nd.hypothesis_violations.empty();
  for (int n = 1; n <= count; ++n) {
    BracketRow row;
    row.n = n;
    row.lambda_N = nd.merged_positive[n - 1];
    row.lambda = s.positive[n - 1].lambda;
    row.lambda_D = dir.merged_positive[n - 1];
    row.slack_lower = row.lambda - row.lambda_N;
    row.slack_upper = row.lambda_D - row.lambda;
    const double scale = std::max(1.0, std::abs(row.lambda));
    const double round_slack = 1e-11 * scale;  // two eigensolves' worth of roundoff
    row.pass = row.lambda_N <= row.lambda + rep.tol_lower * scale + round_slack &&
               row.lambda <= row.lambda_D + rep.tol_upper * scale + round_slack;
    row.verified = verified;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

std::vector<double> positive_values(const MetricGraph& g) {
  return solve_pencil_values(assemble_global(g)).positive;
}

bool converged(const std::vector<double>& base, const std::vector<double>& fine,
               int n_max, double threshold) {
  if (static_cast<int>(base.size()) < n_max || static_cast<int>(fine.size()) < n_max)
    return false;
  for (int n = 0; n < n_max; ++n) {
    const double denom = std::max(std::abs(base[n]), 1e-300);
    if (std::abs(base[n] - fine[n]) / denom >= threshold) return false;
  }
  return true;
}

}  // namespace

bool mesh_converged(const MetricGraph& g, int n_max, double threshold) {
  return converged(positive_values(g), positive_values(g.refined(2)), n_max, threshold);
}

AsymptoticFit asymptotic_fit(const SpectrumResult& s, const MetricGraph& g,
                             int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo)
    throw ValidationError("asymptotic_fit: bad n range");
  if (s.positive_count() < n_hi)
    throw ValidationError("mesh too coarse for requested n");
  if (g.positive_edge_count() == 0)
    throw ValidationError("asymptotic_fit: graph has no positive edges");

  std::vector<double> base;
  base.reserve(s.positive_count());
  for (const EigenPair& p : s.positive) base.push_back(p.lambda);
  if (!converged(base, positive_values(g.refined(2)), n_hi, 1e-3))
    throw ValidationError("mesh too coarse for requested n");

  AsymptoticFit fit;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.target = std::numbers::pi / g.positive_edge_count();

  // Least squares for sqrt(lambda_n) ~ a n + b.
  double sn = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double y = std::sqrt(base[n - 1]);
    fit.sqrt_lambda.push_back(y);
    sn += 1;
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
  }
  const double det = sn * sxx - sx * sx;
  fit.slope = (sn * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double y = fit.sqrt_lambda[n - n_lo];
    fit.max_residual =
        std::max(fit.max_residual, std::abs(y - (fit.slope * n + fit.intercept)));
    fit.max_remainder = std::max(fit.max_remainder, std::abs(y - n * fit.target));
  }
  return fit;
}

}  // namespace slg
