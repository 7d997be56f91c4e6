#pragma once
// Strongly connected weighted digraphs, stationary distributions, and the
// set of transition matrices conforming to a graph pattern with a minimum
// edge probability.

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace patrol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Edge {
  int u = 0;  // tail
  int v = 0;  // head
  int w = 1;  // travel time, integer units >= 1
};

namespace detail {

// Forward reachability of every node from every node, checked with two
// iterative depth-first sweeps (forward and reverse).
inline bool strongly_connected(int n, const std::vector<std::vector<int>>& fwd,
                               const std::vector<std::vector<int>>& rev) {
  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(rev);
}

}  // namespace detail

class WeightedDigraph {
 public:
  WeightedDigraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw std::invalid_argument("graph: node count must be positive");
    weight_ = Eigen::MatrixXi::Zero(n_, n_);
    out_edges_.assign(n_, {});
    std::vector<std::vector<int>> fwd(n_), rev(n_);
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
        throw std::invalid_argument("graph: edge endpoint out of range");
      if (e.w < 1) throw std::invalid_argument("graph: travel times must be >= 1");
      if (weight_(e.u, e.v) != 0)
        throw std::invalid_argument("graph: duplicate edge (" + std::to_string(e.u) + "," +
                                    std::to_string(e.v) + ")");
      weight_(e.u, e.v) = e.w;
      out_edges_[e.u].push_back(e);
      fwd[e.u].push_back(e.v);
      rev[e.v].push_back(e.u);
      w_max_ = std::max(w_max_, e.w);
    }
    if (!detail::strongly_connected(n_, fwd, rev))
      throw std::invalid_argument("graph: not strongly connected");
  }

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& out_edges(int u) const { return out_edges_[u]; }
  bool has_edge(int u, int v) const { return weight_(u, v) != 0; }
  int weight(int u, int v) const { return weight_(u, v); }
  const Eigen::MatrixXi& weight_matrix() const { return weight_; }
  int max_travel_time() const { return w_max_; }

  int max_out_degree() const {
    int d = 0;
    for (const auto& row : out_edges_) d = std::max<int>(d, static_cast<int>(row.size()));
    return d;
  }

  int weight_gcd() const {
    int g = 0;
    for (const Edge& e : edges_) g = std::gcd(g, e.w);
    return g;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Edge>> out_edges_;
  Eigen::MatrixXi weight_;
  int w_max_ = 0;
};

// Divides all travel times by their gcd. Returns the factor removed (1 when
// the weights were already coprime). Scaling every travel time by a common
// factor only relabels the time axis, so chains on the normalized graph are
// equivalent.
inline WeightedDigraph normalize_weights(const WeightedDigraph& g, int* factor = nullptr) {
  int gcd = g.weight_gcd();
  if (factor) *factor = gcd;
  if (gcd <= 1) return g;
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) e.w /= gcd;
  return WeightedDigraph(g.node_count(), std::move(edges));
}

class StationaryDistribution {
 public:
  explicit StationaryDistribution(Vector pi) : pi_(std::move(pi)) {
    if (pi_.size() < 1) throw std::invalid_argument("pi: empty distribution");
    if ((pi_.array() <= 0.0).any())
      throw std::invalid_argument("pi: all entries must be positive");
    double s = pi_.sum();
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("pi: entries must sum to 1 within 1e-12, got sum " +
                                  std::to_string(s));
    pi_ /= s;  // renormalize exactly for file round-trip stability
  }

  const Vector& vec() const { return pi_; }
  int size() const { return static_cast<int>(pi_.size()); }
  double operator[](int i) const { return pi_[i]; }
  double min() const { return pi_.minCoeff(); }

 private:
  Vector pi_;
};

// The feasible set: row-stochastic matrices matching the graph pattern,
// with stationary distribution pi and edge entries >= eps.
struct FeasibleSetSpec {
  FeasibleSetSpec(WeightedDigraph g, StationaryDistribution dist, double min_edge_prob = 0.0)
      : graph(std::move(g)), pi(std::move(dist)), eps(min_edge_prob) {
    if (pi.size() != graph.node_count())
      throw std::invalid_argument("feasible set: pi dimension mismatch");
    if (eps < 0.0) throw std::invalid_argument("feasible set: eps must be >= 0");
    if (eps * graph.max_out_degree() > 1.0 + 1e-15)
      throw std::invalid_argument("feasible set: eps * max out-degree > 1, set is empty");
  }

  WeightedDigraph graph;
  StationaryDistribution pi;
  double eps = 0.0;
};

struct TransitionMatrix {
  TransitionMatrix() = default;
  explicit TransitionMatrix(Matrix m) : p(std::move(m)) {}
  Matrix p;

  int size() const { return static_cast<int>(p.rows()); }
};

// One violated constraint family with its worst residual.
struct ConstraintViolation {
  std::string family;  // "pattern" | "row_sums" | "stationarity" | "eps_bounds"
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintViolation> violations;
  // Worst residual per family, recorded even when within tolerance.
  double pattern_residual = 0.0;
  double row_sum_residual = 0.0;
  double stationarity_residual = 0.0;
  double eps_residual = 0.0;

  bool ok() const { return violations.empty(); }
  double max_residual() const {
    return std::max({pattern_residual, row_sum_residual, stationarity_residual, eps_residual});
  }
};

// Checks a candidate matrix against the feasible-set constraints. An empty
// report means feasible within the stated tolerances.
inline ValidationReport validate_chain(const TransitionMatrix& P, const FeasibleSetSpec& spec) {
  const int n = spec.graph.node_count();
  if (P.p.rows() != n || P.p.cols() != n)
    throw std::invalid_argument("validate_chain: dimension mismatch");

  ValidationReport rep;
  double worst_pattern = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!spec.graph.has_edge(i, j)) worst_pattern = std::max(worst_pattern, std::abs(P.p(i, j)));
  rep.pattern_residual = worst_pattern;
  if (worst_pattern > 1e-12)
    rep.violations.push_back({"pattern", worst_pattern, "nonzero entries off the edge pattern"});

  double worst_row = (P.p.rowwise().sum().array() - 1.0).abs().maxCoeff();
  rep.row_sum_residual = worst_row;
  if (worst_row > 1e-9)
    rep.violations.push_back({"row_sums", worst_row, "row sums deviate from 1"});

  Vector pi = spec.pi.vec();
  double worst_stat = (P.p.transpose() * pi - pi).cwiseAbs().maxCoeff();
  rep.stationarity_residual = worst_stat;
  if (worst_stat > 1e-9)
    rep.violations.push_back({"stationarity", worst_stat, "pi^T P != pi^T"});

  double worst_eps = 0.0;
  for (const Edge& e : spec.graph.edges())
    worst_eps = std::max(worst_eps, spec.eps - P.p(e.u, e.v));
  rep.eps_residual = std::max(0.0, worst_eps);
  if (worst_eps > 1e-9)
    rep.violations.push_back({"eps_bounds", worst_eps, "edge probabilities below eps"});

  return rep;
}

}  // namespace patrol
