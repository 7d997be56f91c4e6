#pragma once
// Exhaustive path enumeration for first-hitting-time distributions on small
// instances. Ground truth for the recursive dynamics; deliberately shares no
// code with HittingStepper.

#include "patrol/graph.hpp"
#include "patrol/hitting.hpp"

namespace patrol {

// P(T_{from,to} = k) for k = 1..K by walking every path from `from` that
// avoids `to` until its final arrival, tracking accumulated travel time.
inline Vector enumerate_hitting_distribution(const TransitionMatrix& P, const WeightedDigraph& g,
                                             int from, int to, int K) {
  const int n = g.node_count();
  if (n > 6 || K > 12)
    throw std::invalid_argument("enumerate_hitting_distribution: instance too large (n <= 6, K <= 12)");
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw std::invalid_argument("enumerate_hitting_distribution: node out of range");
  if (K < 1) throw std::invalid_argument("enumerate_hitting_distribution: horizon must be >= 1");

  Vector out = Vector::Zero(K);
  auto dfs = [&](auto&& self, int u, int elapsed, double prob) -> void {
    for (const Edge& e : g.out_edges(u)) {
      const int t = elapsed + e.w;
      if (t > K) continue;
      const double pr = prob * P.p(u, e.v);
      if (pr == 0.0) continue;
      if (e.v == to)
        out[t - 1] += pr;
      else
        self(self, e.v, t, pr);
    }
  };
  dfs(dfs, from, 0, 1.0);
  return out;
}

inline ReturnTimeDistribution oracle_return_distribution(const TransitionMatrix& P,
                                                         const WeightedDigraph& g, int node,
                                                         int K) {
  ReturnTimeDistribution dist;
  dist.node = node;
  dist.probs = enumerate_hitting_distribution(P, g, node, node, K);
  double tail = 1.0 - dist.probs.sum();
  dist.tail_mass = std::max(tail, 0.0);
  return dist;
}

}  // namespace patrol
