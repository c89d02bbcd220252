#include "slgraph/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "slgraph/linalg.hpp"

namespace slg {

TransferMatrix edge_transfer(double coeff, double length) {
  if (coeff > 0.0) {
    const double w = std::sqrt(coeff);
    const double ch = std::cosh(w * length);
    const double sh = std::sinh(w * length);
    return {ch, sh / w, w * sh, ch};
  }
  if (coeff < 0.0) {
    const double w = std::sqrt(-coeff);
    const double co = std::cos(w * length);
    const double si = std::sin(w * length);
    return {co, si / w, -w * si, co};
  }
  return {1.0, length, 0.0, 1.0};
}

TransferMatrix edge_transfer(const Edge& e, double lambda) {
  const auto& bp = e.potential.breakpoints();
  const auto& qv = e.potential.values();
  const double b = e.weight > 0 ? 1.0 : -1.0;
  TransferMatrix t;  // identity
  for (std::size_t p = 0; p < qv.size(); ++p) {
    const double len = bp[p + 1] - bp[p];
    t = edge_transfer(qv[p] - b * lambda, len) * t;
  }
  return t;
}

namespace {

// Linear functional of the shooting unknowns (y_e(0), y_e'(0))_e at one
// endpoint: the value and derivative rows of the composed transfer matrix.
struct EndpointFunctionals {
  Eigen::RowVectorXd value;
  Eigen::RowVectorXd deriv;
};

EndpointFunctionals endpoint_functionals(std::size_t edge_idx, int end,
                                         const TransferMatrix& t, int dim) {
  EndpointFunctionals f;
  f.value = Eigen::RowVectorXd::Zero(dim);
  f.deriv = Eigen::RowVectorXd::Zero(dim);
  const int col = static_cast<int>(2 * edge_idx);
  if (end == 0) {
    f.value(col) = 1.0;
    f.deriv(col + 1) = 1.0;
  } else {
    f.value(col) = t.a;
    f.value(col + 1) = t.b;
    f.deriv(col) = t.c;
    f.deriv(col + 1) = t.d;
  }
  return f;
}

}  // namespace

double secular_det(const MetricGraph& g, double lambda) {
  require_valid(g);
  const int k = g.edge_count();
  const int dim = 2 * k;

  std::vector<TransferMatrix> transfer(k);
  for (int e = 0; e < k; ++e) transfer[e] = edge_transfer(g.edges[e], lambda);

  auto edge_index = [&](const EdgeId& id) -> std::size_t {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (g.edges[e].id == id) return e;
    }
    throw ValidationError("unknown edge id '" + id + "'");
  };

  Eigen::MatrixXd sys(dim, dim);
  int row = 0;
  for (const VertexId& v : g.vertices) {
    const VertexCondition& cond = g.conditions.at(v);
    const std::vector<EndpointRef> inc = g.incident(v);
    const int deg = static_cast<int>(inc.size());

    std::vector<EndpointFunctionals> fn;
    fn.reserve(deg);
    for (const EndpointRef& p : inc) {
      const std::size_t e = edge_index(p.edge);
      fn.push_back(endpoint_functionals(e, p.end, transfer[e], dim));
    }

    // Dirichlet-like rows over endpoint values, as a local matrix for the
    // kernel and as global functional rows.
    Eigen::MatrixXd local;
    switch (cond.kind) {
      case ConditionKind::Dirichlet:
        local = Eigen::MatrixXd::Identity(deg, deg);
        break;
      case ConditionKind::Kirchhoff:
        local = Eigen::MatrixXd::Zero(deg - 1, deg);
        for (int r2 = 0; r2 < deg - 1; ++r2) {
          local(r2, 0) = 1.0;
          local(r2, r2 + 1) = -1.0;
        }
        break;
      case ConditionKind::Robin:
        local = Eigen::MatrixXd::Zero(0, deg);
        break;
      case ConditionKind::Custom:
        local = Eigen::MatrixXd::Zero(static_cast<int>(cond.rows.size()), deg);
        for (std::size_t i = 0; i < cond.rows.size(); ++i)
          for (int j = 0; j < deg; ++j) local(static_cast<int>(i), j) = cond.rows[i][j];
        break;
    }
    for (int i = 0; i < local.rows(); ++i) {
      Eigen::RowVectorXd r2 = Eigen::RowVectorXd::Zero(dim);
      for (int j = 0; j < deg; ++j) {
        if (local(i, j) != 0.0) r2 += local(i, j) * fn[j].value;
      }
      sys.row(row++) = r2;
    }

    // Natural conditions: d-sigma-weighted (f u + u') orthogonal to the
    // kernel of the local constraint rows.
    const int rank = static_cast<int>(local.rows());
    if (rank < deg) {
      const Eigen::MatrixXd kernel(constraint_nullspace(local, deg));
      for (int c = 0; c < kernel.cols(); ++c) {
        Eigen::RowVectorXd r2 = Eigen::RowVectorXd::Zero(dim);
        for (int j = 0; j < deg; ++j) {
          const double coef = kernel(j, c);
          if (coef == 0.0) continue;
          const double sgn = dsigma_sign(inc[j].end);
          const double fv = cond.f_at(inc[j]);
          r2 += coef * sgn * (fv * fn[j].value + fn[j].deriv);
        }
        sys.row(row++) = r2;
      }
    }
  }
  if (row != dim) throw InvariantError("secular system row count mismatch");

  // Per-row normalization keeps the determinant sign pattern while taming the
  // hyperbolic growth at large |lambda|.
  for (int i = 0; i < dim; ++i) {
    const double m = sys.row(i).cwiseAbs().maxCoeff();
    if (m > 0.0) sys.row(i) /= m;
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(sys).determinant();
}

RootScan scan_roots(const MetricGraph& g, double lo, double hi, int grid) {
  if (!(lo < hi) || grid < 2) throw ValidationError("scan_roots: bad window or grid");
  RootScan out;
  std::vector<double> x(grid + 1), f(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    x[i] = lo + (hi - lo) * i / grid;
    f[i] = secular_det(g, x[i]);
  }
  double max_abs = 0.0;
  for (double v : f) max_abs = std::max(max_abs, std::abs(v));

  auto bisect = [&](double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (b - a <= 1e-10 * std::max(1.0, std::abs(mid))) return mid;
      const double fm = secular_det(g, mid);
      if (fm == 0.0) return mid;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  for (int i = 0; i < grid; ++i) {
    if (f[i] == 0.0) {
      out.roots.push_back(x[i]);
      continue;
    }
    if (f[i + 1] != 0.0 && (f[i] < 0.0) != (f[i + 1] < 0.0)) {
      out.roots.push_back(bisect(x[i], x[i + 1], f[i]));
    }
  }
  if (f[grid] == 0.0) out.roots.push_back(x[grid]);

  for (int i = 1; i < grid; ++i) {
    const bool local_min =
        std::abs(f[i]) < std::abs(f[i - 1]) && std::abs(f[i]) < std::abs(f[i + 1]);
    const bool same_sign =
        (f[i - 1] < 0.0) == (f[i] < 0.0) && (f[i] < 0.0) == (f[i + 1] < 0.0);
    if (local_min && same_sign && std::abs(f[i]) <= 1e-6 * max_abs) {
      out.warnings.push_back("possible double root or tangency near lambda = " +
                             std::to_string(x[i]) + "; refine grid");
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

}  // namespace slg
