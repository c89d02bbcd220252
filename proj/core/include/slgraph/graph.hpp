#ifndef SLGRAPH_GRAPH_HPP
#define SLGRAPH_GRAPH_HPP

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace slg {

/// Structural problem in the input: malformed graph, bad constraints, bad file.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The problem falls outside the standing hypotheses (the form operator is
/// not positive definite). Distinct from a defect: the input is legal, the
/// theory just does not apply to it.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A gated internal identity failed; signals a defect, not a bad input.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VertexId = std::string;
using EdgeId = std::string;

/// Piecewise-constant potential on [0,1], right-continuous at breakpoints.
class PiecewisePotential {
 public:
  PiecewisePotential() : breakpoints_{0.0, 1.0}, values_{0.0} {}
  explicit PiecewisePotential(double constant) : breakpoints_{0.0, 1.0}, values_{constant} {}
  PiecewisePotential(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t piece_count() const { return values_.size(); }
  bool valid(std::string* why = nullptr) const;

  /// q(1-x): the potential seen after reversing the edge orientation.
  PiecewisePotential reflected() const;

 private:
  std::vector<double> breakpoints_;  // ascending, first 0, last 1
  std::vector<double> values_;       // one per subinterval
};

/// One edge endpoint: (edge, end) with end 0 the initial and 1 the terminal
/// point of the unit parametrization.
struct EndpointRef {
  EdgeId edge;
  int end = 0;
  auto operator<=>(const EndpointRef&) const = default;
};

/// d-sigma sign of an endpoint: +1 at the terminal point, -1 at the initial.
inline int dsigma_sign(int end) { return end == 1 ? +1 : -1; }

enum class ConditionKind { Dirichlet, Kirchhoff, Robin, Custom };

/// Vertex condition in co-normal shape: Dirichlet-like constraint rows over
/// the incident endpoint *values* plus an endpoint function f that generates
/// the natural conditions through the form. Custom rows are indexed by the
/// vertex's canonical incident-endpoint order (sorted by edge id, then end).
struct VertexCondition {
  ConditionKind kind = ConditionKind::Kirchhoff;
  std::map<EndpointRef, double> f;          // Robin/Custom; absent entries are 0
  std::vector<std::vector<double>> rows;    // Custom only

  static VertexCondition dirichlet() { return {ConditionKind::Dirichlet, {}, {}}; }
  static VertexCondition kirchhoff() { return {ConditionKind::Kirchhoff, {}, {}}; }
  static VertexCondition robin(std::map<EndpointRef, double> f_values) {
    return {ConditionKind::Robin, std::move(f_values), {}};
  }
  static VertexCondition custom(std::vector<std::vector<double>> rows,
                                std::map<EndpointRef, double> f_values = {}) {
    return {ConditionKind::Custom, std::move(f_values), std::move(rows)};
  }

  /// f value at an endpoint (0 when not listed or not applicable).
  double f_at(const EndpointRef& p) const {
    auto it = f.find(p);
    return it == f.end() ? 0.0 : it->second;
  }
};

struct Edge {
  EdgeId id;
  VertexId start;  // endpoint 0
  VertexId end;    // endpoint 1
  int weight = +1;  // +1 or -1
  PiecewisePotential potential;
  int mesh = 16;  // uniform subintervals, >= 2
};

/// Finite metric graph with unit edges, +-1 weights and co-normal vertex
/// conditions. Immutable by convention after construction.
struct MetricGraph {
  std::vector<Edge> edges;
  std::vector<VertexId> vertices;
  std::map<VertexId, VertexCondition> conditions;

  const Edge* find_edge(const EdgeId& id) const;
  const Edge& edge_at(const EdgeId& id) const;  // throws ValidationError
  /// Incident endpoints of a vertex in canonical order (edge id, then end).
  std::vector<EndpointRef> incident(const VertexId& v) const;
  int degree(const VertexId& v) const { return static_cast<int>(incident(v).size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int positive_edge_count() const;
  bool all_positive() const { return positive_edge_count() == edge_count(); }

  /// Copy with every edge mesh multiplied by `factor` (convergence gates).
  MetricGraph refined(int factor) const;
  /// Copy with every edge mesh set to `mesh` (CLI override).
  MetricGraph with_mesh(int mesh) const;
  /// Copy with all weights negated (the formal lambda -> -lambda swap).
  MetricGraph negated() const;
};

/// Reverses one edge's orientation, reflecting its potential and rewriting
/// the endpoint references in the incident vertex conditions. The assembled
/// spectrum is invariant under this transform.
MetricGraph reverse_edge(const MetricGraph& g, const EdgeId& id);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> violations;
  int edge_count = 0;       // K
  int positive_edges = 0;   // n
  int constraint_rows = 0;  // J, total Dirichlet-like rows
};

/// Checks every structural invariant; reports all violations, repairs none.
ValidationReport validate_graph(const MetricGraph& g);

/// Throws ValidationError listing every violation when the graph is invalid.
void require_valid(const MetricGraph& g);

/// Map from the 2K edge endpoints to global degrees of freedom of the
/// unconstrained broken FEM space, with the d-sigma sign attached.
/// Endpoints at a shared vertex map to distinct dofs; continuity lives in
/// constraint rows, never in dof identification.
struct EndpointMap {
  struct Entry {
    EdgeId edge;
    int end = 0;
    int dof = 0;
    int sign = 0;
  };
  std::vector<Entry> entries;  // 2K entries, edge-major, end 0 before end 1

  int dof(const EdgeId& edge, int end) const;  // throws ValidationError
};

EndpointMap build_endpoint_map(const MetricGraph& g);

}  // namespace slg

#endif
