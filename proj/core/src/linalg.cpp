#include "slgraph/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "slgraph/graph.hpp"

namespace slg {

namespace {

void check_lapack_info(lapack_int info, int n) {
  if (info == 0) return;
  if (info > n) {
    throw HypothesisError("L not positive definite; paper hypotheses violated");
  }
  if (info > 0) throw InvariantError("symmetric eigensolver failed to converge");
  throw InvariantError("bad argument passed to LAPACK");
}

}  // namespace

SymEigen sym_eigen(const Eigen::MatrixXd& a, bool with_vectors) {
  const int n = static_cast<int>(a.rows());
  SymEigen res;
  res.values.resize(n);
  if (n == 0) return res;
  Eigen::MatrixXd work = a;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', n,
                                   work.data(), n, res.values.data());
  if (info > 0) throw InvariantError("symmetric eigensolver failed to converge");
  if (info < 0) throw InvariantError("bad argument passed to LAPACK");
  if (with_vectors) res.vectors = std::move(work);
  return res;
}

SymEigen generalized_sym_eigen(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               bool with_vectors) {
  const int n = static_cast<int>(a.rows());
  SymEigen res;
  res.values.resize(n);
  if (n == 0) return res;
  Eigen::MatrixXd aw = a;
  Eigen::MatrixXd bw = b;
  lapack_int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, with_vectors ? 'V' : 'N', 'L', n,
                                   aw.data(), n, bw.data(), n, res.values.data());
  check_lapack_info(info, n);
  if (with_vectors) res.vectors = std::move(aw);
  return res;
}

int pencil_bandwidth(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a.rows());
  int bw = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = n - 1; i > j + bw; --i) {
      if (a(i, j) != 0.0 || b(i, j) != 0.0) {
        bw = i - j;
        break;
      }
    }
  }
  return bw;
}

std::vector<int> cuthill_mckee(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      if (a(i, j) != 0.0 || b(i, j) != 0.0) {
        adj[j].push_back(i);
        adj[i].push_back(j);
      }
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end(),
              [&](int x, int y) { return adj[x].size() != adj[y].size()
                                             ? adj[x].size() < adj[y].size()
                                             : x < y; });
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  for (;;) {
    int start = -1;
    for (int i = 0; i < n; ++i) {
      if (!seen[i] && (start < 0 || adj[i].size() < adj[start].size())) start = i;
    }
    if (start < 0) break;
    std::queue<int> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          q.push(w);
        }
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

// Lower-triangle banded storage, column-major: AB(i - j, j) = A(i, j).
Eigen::MatrixXd to_banded_lower(const Eigen::MatrixXd& a, int bw) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(bw + 1, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i <= std::min(n - 1, j + bw); ++i) ab(i - j, j) = a(i, j);
  }
  return ab;
}

Eigen::VectorXd banded_generalized_values(const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& b, int bw) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd ab = to_banded_lower(a, bw);
  Eigen::MatrixXd bb = to_banded_lower(b, bw);
  Eigen::VectorXd w(n);
  double zdummy = 0.0;
  lapack_int info = LAPACKE_dsbgvd(LAPACK_COL_MAJOR, 'N', 'L', n, bw, bw, ab.data(),
                                   bw + 1, bb.data(), bw + 1, w.data(), &zdummy, 1);
  check_lapack_info(info, n);
  return w;
}

constexpr int kBandLimit = 16;

}  // namespace

Eigen::VectorXd generalized_sym_eigenvalues(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& b,
                                            bool force_dense) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {};
  if (!force_dense) {
    int bw = pencil_bandwidth(a, b);
    if (bw <= kBandLimit) return banded_generalized_values(a, b, bw);
    std::vector<int> p = cuthill_mckee(a, b);
    Eigen::VectorXi pi(n);
    for (int i = 0; i < n; ++i) pi(i) = p[i];
    Eigen::MatrixXd ap(n, n), bp(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        ap(i, j) = a(pi(i), pi(j));
        bp(i, j) = b(pi(i), pi(j));
      }
    }
    bw = pencil_bandwidth(ap, bp);
    if (bw <= kBandLimit) return banded_generalized_values(ap, bp, bw);
  }
  return generalized_sym_eigen(a, b, /*with_vectors=*/false).values;
}

CholeskyProbe spd_probe(const Eigen::MatrixXd& a, double rel_tol) {
  const int n = static_cast<int>(a.rows());
  CholeskyProbe probe;
  if (n == 0) {
    probe.ok = true;
    return probe;
  }
  double max_diag = a.diagonal().maxCoeff();
  if (max_diag <= 0.0) return probe;
  Eigen::MatrixXd work = a;
  lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, work.data(), n);
  if (info != 0) return probe;
  double min_pivot = work.diagonal().minCoeff();
  probe.min_pivot_sq = min_pivot * min_pivot;
  probe.ok = probe.min_pivot_sq > rel_tol * max_diag;
  return probe;
}

Rref rref(Eigen::MatrixXd m, double rel_tol) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  const double tol = rel_tol * std::max(scale, 1e-300);
  Rref out;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = -1;
    double best = tol;
    for (int i = row; i < rows; ++i) {
      if (std::abs(m(i, col)) > best) {
        best = std::abs(m(i, col));
        piv = i;
      }
    }
    if (piv < 0) continue;
    m.row(piv).swap(m.row(row));
    m.row(row) /= m(row, col);
    for (int i = 0; i < rows; ++i) {
      if (i != row && m(i, col) != 0.0) m.row(i) -= m(i, col) * m.row(row);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.rank = row;
  out.r = std::move(m);
  return out;
}

Eigen::SparseMatrix<double> constraint_nullspace(const Eigen::MatrixXd& constraints,
                                                 int dim) {
  const int j = static_cast<int>(constraints.rows());
  std::vector<Eigen::Triplet<double>> trips;
  if (j == 0) {
    Eigen::SparseMatrix<double> id(dim, dim);
    id.setIdentity();
    return id;
  }
  Rref red = rref(constraints);
  if (red.rank < j) throw ValidationError("constraints not independent");
  std::vector<bool> is_pivot(dim, false);
  for (int p : red.pivots) is_pivot[p] = true;
  int free_count = dim - red.rank;
  if (free_count == 0) throw ValidationError("over-constrained graph");
  Eigen::SparseMatrix<double> z(dim, free_count);
  int col = 0;
  for (int f = 0; f < dim; ++f) {
    if (is_pivot[f]) continue;
    trips.emplace_back(f, col, 1.0);
    for (int k = 0; k < red.rank; ++k) {
      double coef = red.r(k, f);
      if (coef != 0.0) trips.emplace_back(red.pivots[k], col, -coef);
    }
    ++col;
  }
  z.setFromTriplets(trips.begin(), trips.end());
  return z;
}

double NormalSampler::uniform() {
  return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSampler::operator()() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

Eigen::VectorXd NormalSampler::vector(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = (*this)();
  return v;
}

}  // namespace slg
