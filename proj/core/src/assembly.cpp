#include "slgraph/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "slgraph/linalg.hpp"

namespace slg {

namespace {

// Exact integrals of hat-function products against a constant over a piece
// [s,t] of the mesh cell [a0, a0+h]. L is the hat falling on the cell, R the
// one rising.
struct CellOverlap {
  double ll, lr, rr;
};

CellOverlap hat_products(double a0, double h, double s, double t) {
  const double b0 = a0 + h;
  const double h2 = h * h;
  CellOverlap o;
  o.ll = (std::pow(b0 - s, 3) - std::pow(b0 - t, 3)) / (3.0 * h2);
  o.rr = (std::pow(t - a0, 3) - std::pow(s - a0, 3)) / (3.0 * h2);
  auto lr_anti = [&](double x) {
    const double u = x - a0;
    return (h * u * u / 2.0 - u * u * u / 3.0) / h2;
  };
  o.lr = lr_anti(t) - lr_anti(s);
  return o;
}

}  // namespace

EdgeMatrices assemble_edge(const Edge& e) {
  const int m = e.mesh;
  const double h = 1.0 / m;
  EdgeMatrices out;
  out.stiffness = Eigen::MatrixXd::Zero(m + 1, m + 1);
  out.mass = Eigen::MatrixXd::Zero(m + 1, m + 1);

  const auto& bp = e.potential.breakpoints();
  const auto& qv = e.potential.values();

  for (int k = 0; k < m; ++k) {
    const double a0 = k * h;
    const double b0 = (k + 1) * h;
    // Derivative term: (1/h) [[1,-1],[-1,1]].
    out.stiffness(k, k) += 1.0 / h;
    out.stiffness(k + 1, k + 1) += 1.0 / h;
    out.stiffness(k, k + 1) -= 1.0 / h;
    out.stiffness(k + 1, k) -= 1.0 / h;
    // Mass term: (h/6) [[2,1],[1,2]].
    out.mass(k, k) += h / 3.0;
    out.mass(k + 1, k + 1) += h / 3.0;
    out.mass(k, k + 1) += h / 6.0;
    out.mass(k + 1, k) += h / 6.0;
    // Potential term, integrated exactly piece by piece; q breakpoints need
    // not align with mesh nodes.
    for (std::size_t p = 0; p < qv.size(); ++p) {
      const double s = std::max(a0, bp[p]);
      const double t = std::min(b0, bp[p + 1]);
      if (t <= s) continue;
      const CellOverlap o = hat_products(a0, h, s, t);
      out.stiffness(k, k) += qv[p] * o.ll;
      out.stiffness(k + 1, k + 1) += qv[p] * o.rr;
      out.stiffness(k, k + 1) += qv[p] * o.lr;
      out.stiffness(k + 1, k) += qv[p] * o.lr;
    }
  }
  return out;
}

namespace {

// Dirichlet-like rows of every vertex, over the full broken dof space.
Eigen::MatrixXd collect_constraints(const MetricGraph& g, const EndpointMap& emap,
                                    int full_dim) {
  std::vector<Eigen::VectorXd> rows;
  for (const VertexId& v : g.vertices) {
    const VertexCondition& cond = g.conditions.at(v);
    const std::vector<EndpointRef> inc = g.incident(v);
    switch (cond.kind) {
      case ConditionKind::Dirichlet:
        for (const EndpointRef& p : inc) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(full_dim);
          row(emap.dof(p.edge, p.end)) = 1.0;
          rows.push_back(std::move(row));
        }
        break;
      case ConditionKind::Kirchhoff:
        for (std::size_t k = 1; k < inc.size(); ++k) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(full_dim);
          row(emap.dof(inc[0].edge, inc[0].end)) = 1.0;
          row(emap.dof(inc[k].edge, inc[k].end)) = -1.0;
          rows.push_back(std::move(row));
        }
        break;
      case ConditionKind::Robin:
        break;
      case ConditionKind::Custom:
        for (const auto& coeffs : cond.rows) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(full_dim);
          for (std::size_t j = 0; j < inc.size(); ++j)
            row(emap.dof(inc[j].edge, inc[j].end)) = coeffs[j];
          rows.push_back(std::move(row));
        }
        break;
    }
  }
  Eigen::MatrixXd a(static_cast<int>(rows.size()), full_dim);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<int>(i)) = rows[i];
  return a;
}

}  // namespace

DiscreteForm assemble_global(const MetricGraph& g) {
  require_valid(g);

  DiscreteForm d;
  d.endpoints = build_endpoint_map(g);

  int offset = 0;
  std::vector<Eigen::Triplet<double>> f_trips, b_trips, m_trips;
  for (const Edge& e : g.edges) {
    const EdgeMatrices em = assemble_edge(e);
    const int n = e.mesh + 1;
    const double sign = e.weight > 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (em.stiffness(i, j) != 0.0)
          f_trips.emplace_back(offset + i, offset + j, em.stiffness(i, j));
        if (em.mass(i, j) != 0.0) {
          b_trips.emplace_back(offset + i, offset + j, sign * em.mass(i, j));
          m_trips.emplace_back(offset + i, offset + j, em.mass(i, j));
        }
      }
    }
    d.edge_slice.emplace_back(offset, offset + n);
    d.edge_weight.push_back(e.weight);
    d.edge_id.push_back(e.id);
    offset += n;
  }
  d.full_dim = offset;

  // Boundary term of the form: +f(1) x(1)y(1) at terminal endpoints,
  // -f(0) x(0)y(0) at initial endpoints.
  for (const VertexId& v : g.vertices) {
    const VertexCondition& cond = g.conditions.at(v);
    for (const EndpointRef& p : g.incident(v)) {
      const double fv = cond.f_at(p);
      if (fv != 0.0) {
        const int dof = d.endpoints.dof(p.edge, p.end);
        f_trips.emplace_back(dof, dof, dsigma_sign(p.end) * fv);
      }
    }
  }

  Eigen::SparseMatrix<double> f_full(d.full_dim, d.full_dim);
  Eigen::SparseMatrix<double> b_full(d.full_dim, d.full_dim);
  f_full.setFromTriplets(f_trips.begin(), f_trips.end());
  b_full.setFromTriplets(b_trips.begin(), b_trips.end());
  d.full_unsigned_mass.resize(d.full_dim, d.full_dim);
  d.full_unsigned_mass.setFromTriplets(m_trips.begin(), m_trips.end());

  const Eigen::MatrixXd constraints = collect_constraints(g, d.endpoints, d.full_dim);
  d.basis = constraint_nullspace(constraints, d.full_dim);
  d.dof_count = static_cast<int>(d.basis.cols());

  const auto reduce = [&](const Eigen::SparseMatrix<double>& a) -> Eigen::MatrixXd {
    Eigen::SparseMatrix<double> t = a * d.basis;
    return Eigen::MatrixXd(d.basis.transpose() * t);
  };
  d.form = reduce(f_full);
  d.signed_mass = reduce(b_full);
  d.unsigned_mass = reduce(d.full_unsigned_mass);
  return d;
}

PositivityReport check_positivity(const DiscreteForm& d, bool estimate_rho1) {
  PositivityReport rep;
  const CholeskyProbe probe = spd_probe(d.form);
  if (!probe.ok) {
    rep.positive = false;
    rep.message = "L not positive definite; paper hypotheses violated";
    return rep;
  }
  rep.positive = true;
  if (estimate_rho1) {
    const Eigen::VectorXd rho = generalized_sym_eigenvalues(d.form, d.unsigned_mass);
    rep.rho1 = rho(0);
    rep.rho1_known = true;
  }
  return rep;
}

void require_positive(const DiscreteForm& d) {
  if (!spd_probe(d.form).ok)
    throw HypothesisError("L not positive definite; paper hypotheses violated");
}

}  // namespace slg
