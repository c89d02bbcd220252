#include "slgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "slgraph/linalg.hpp"

namespace slg {

double PiecewisePotential::operator()(double x) const {
  // Right-continuous: value of the subinterval [b_k, b_{k+1}) containing x.
  std::size_t k = 0;
  while (k + 1 < values_.size() && x >= breakpoints_[k + 1]) ++k;
  return values_[k];
}

bool PiecewisePotential::valid(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
    return fail("potential needs ascending breakpoints with one value per subinterval");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    return fail("potential breakpoints must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1]))
      return fail("potential breakpoints must be strictly ascending");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) return fail("potential values must be finite");
  }
  return true;
}

PiecewisePotential PiecewisePotential::reflected() const {
  std::vector<double> bp(breakpoints_.size());
  for (std::size_t i = 0; i < breakpoints_.size(); ++i)
    bp[i] = 1.0 - breakpoints_[breakpoints_.size() - 1 - i];
  bp.front() = 0.0;
  bp.back() = 1.0;
  std::vector<double> vals(values_.rbegin(), values_.rend());
  return {std::move(bp), std::move(vals)};
}

const Edge* MetricGraph::find_edge(const EdgeId& id) const {
  for (const Edge& e : edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const Edge& MetricGraph::edge_at(const EdgeId& id) const {
  const Edge* e = find_edge(id);
  if (!e) throw ValidationError("unknown edge id '" + id + "'");
  return *e;
}

std::vector<EndpointRef> MetricGraph::incident(const VertexId& v) const {
  std::vector<EndpointRef> out;
  for (const Edge& e : edges) {
    if (e.start == v) out.push_back({e.id, 0});
    if (e.end == v) out.push_back({e.id, 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

int MetricGraph::positive_edge_count() const {
  int n = 0;
  for (const Edge& e : edges) n += e.weight > 0 ? 1 : 0;
  return n;
}

MetricGraph MetricGraph::refined(int factor) const {
  MetricGraph g = *this;
  for (Edge& e : g.edges) e.mesh *= factor;
  return g;
}

MetricGraph MetricGraph::with_mesh(int mesh) const {
  MetricGraph g = *this;
  for (Edge& e : g.edges) e.mesh = mesh;
  return g;
}

MetricGraph MetricGraph::negated() const {
  MetricGraph g = *this;
  for (Edge& e : g.edges) e.weight = -e.weight;
  return g;
}

MetricGraph reverse_edge(const MetricGraph& g, const EdgeId& id) {
  MetricGraph out = g;
  Edge* target = nullptr;
  for (Edge& e : out.edges) {
    if (e.id == id) target = &e;
  }
  if (!target) throw ValidationError("unknown edge id '" + id + "'");
  std::swap(target->start, target->end);
  target->potential = target->potential.reflected();
  for (auto& [v, cond] : out.conditions) {
    std::map<EndpointRef, double> f;
    for (const auto& [p, val] : cond.f) {
      EndpointRef q = p;
      if (q.edge == id) q.end = 1 - q.end;
      f[q] = val;
    }
    cond.f = std::move(f);
    if (cond.kind == ConditionKind::Custom && !cond.rows.empty()) {
      // Custom row columns follow the canonical incident order, which changes
      // when the endpoint flips; permute columns accordingly.
      std::vector<EndpointRef> before = g.incident(v);
      std::vector<EndpointRef> after_ref = before;
      for (EndpointRef& p : after_ref) {
        if (p.edge == id) p.end = 1 - p.end;
      }
      std::vector<EndpointRef> after_sorted = after_ref;
      std::sort(after_sorted.begin(), after_sorted.end());
      std::vector<std::size_t> perm(before.size());
      for (std::size_t c = 0; c < after_sorted.size(); ++c) {
        for (std::size_t k = 0; k < after_ref.size(); ++k) {
          if (after_ref[k] == after_sorted[c]) perm[c] = k;
        }
      }
      for (auto& row : cond.rows) {
        std::vector<double> permuted(row.size());
        for (std::size_t c = 0; c < row.size() && c < perm.size(); ++c)
          permuted[c] = row[perm[c]];
        row = std::move(permuted);
      }
    }
  }
  return out;
}

ValidationReport validate_graph(const MetricGraph& g) {
  ValidationReport rep;
  rep.edge_count = g.edge_count();
  rep.positive_edges = g.positive_edge_count();
  auto flag = [&](const std::string& msg) { rep.violations.push_back(msg); };

  if (g.edges.empty()) flag("graph has no edges (K >= 1 required)");

  std::set<EdgeId> edge_ids;
  std::set<VertexId> vertex_set(g.vertices.begin(), g.vertices.end());
  if (vertex_set.size() != g.vertices.size()) flag("duplicate vertex ids");

  for (const Edge& e : g.edges) {
    if (!edge_ids.insert(e.id).second) flag("duplicate edge id '" + e.id + "'");
    if (e.weight != 1 && e.weight != -1)
      flag("edge '" + e.id + "': weight must be +1 or -1");
    if (e.mesh < 2) flag("edge '" + e.id + "': mesh_count must be >= 2");
    std::string why;
    if (!e.potential.valid(&why)) flag("edge '" + e.id + "': " + why);
    for (const VertexId* v : {&e.start, &e.end}) {
      if (!vertex_set.count(*v))
        flag("edge '" + e.id + "' references unknown vertex '" + *v + "'");
    }
  }

  int total_rows = 0;
  for (const VertexId& v : g.vertices) {
    auto it = g.conditions.find(v);
    if (it == g.conditions.end()) {
      flag("vertex '" + v + "' carries no condition");
      continue;
    }
    const VertexCondition& cond = it->second;
    const int deg = g.degree(v);
    if (deg == 0) {
      flag("vertex '" + v + "' is isolated");
      continue;
    }
    const std::vector<EndpointRef> inc = g.incident(v);
    int rows = 0;
    switch (cond.kind) {
      case ConditionKind::Dirichlet:
        rows = deg;
        break;
      case ConditionKind::Kirchhoff:
        rows = deg - 1;
        break;
      case ConditionKind::Robin:
        rows = 0;
        break;
      case ConditionKind::Custom: {
        rows = static_cast<int>(cond.rows.size());
        if (rows > deg)
          flag("vertex '" + v + "': condition count exceeds degree");
        bool shape_ok = true;
        for (const auto& row : cond.rows) {
          if (static_cast<int>(row.size()) != deg) {
            flag("vertex '" + v + "': custom row length differs from degree");
            shape_ok = false;
          }
        }
        if (shape_ok && rows > 0 && rows <= deg) {
          Eigen::MatrixXd m(rows, deg);
          for (int i = 0; i < rows; ++i)
            for (int j = 0; j < deg; ++j) m(i, j) = cond.rows[i][j];
          if (rref(m).rank < rows)
            flag("vertex '" + v + "': custom rows are not linearly independent");
        }
        break;
      }
    }
    for (const auto& [p, fv] : cond.f) {
      if (std::find(inc.begin(), inc.end(), p) == inc.end())
        flag("vertex '" + v + "': f value on non-incident endpoint '" + p.edge + ":" +
             std::to_string(p.end) + "'");
      if (!std::isfinite(fv)) flag("vertex '" + v + "': f value not finite");
    }
    total_rows += rows;
  }
  for (const auto& [v, cond] : g.conditions) {
    (void)cond;
    if (!vertex_set.count(v)) flag("condition on unknown vertex '" + v + "'");
  }

  rep.constraint_rows = total_rows;
  if (total_rows > 2 * rep.edge_count)
    flag("total Dirichlet-like rows exceed 2K");
  rep.ok = rep.violations.empty();
  return rep;
}

void require_valid(const MetricGraph& g) {
  ValidationReport rep = validate_graph(g);
  if (rep.ok) return;
  std::ostringstream msg;
  msg << "invalid graph:";
  for (const std::string& v : rep.violations) msg << "\n  - " << v;
  throw ValidationError(msg.str());
}

EndpointMap build_endpoint_map(const MetricGraph& g) {
  EndpointMap map;
  int offset = 0;
  for (const Edge& e : g.edges) {
    map.entries.push_back({e.id, 0, offset, dsigma_sign(0)});
    map.entries.push_back({e.id, 1, offset + e.mesh, dsigma_sign(1)});
    offset += e.mesh + 1;
  }
  return map;
}

int EndpointMap::dof(const EdgeId& edge, int end) const {
  for (const Entry& e : entries) {
    if (e.edge == edge && e.end == end) return e.dof;
  }
  throw ValidationError("unknown endpoint '" + edge + ":" + std::to_string(end) + "'");
}

}  // namespace slg
