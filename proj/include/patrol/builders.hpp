#pragma once
// Built-in benchmark graphs: ring, grid, complete, and the 12-location
// San Francisco patrol map with by-car travel times quantized to minutes.

#include "patrol/graph.hpp"

#include <array>
#include <utility>

namespace patrol {

struct GraphWithDistribution {
  WeightedDigraph graph;
  StationaryDistribution pi;
};

// Bidirected unit-weight cycle with self-loops. For the 8-node benchmark the
// distribution alternates [1/12, 1/6, ...]; other sizes get the uniform
// distribution. The self-loops are part of the feasible pattern: an even
// cycle without them is bipartite, which pins the per-parity mass to 1/2 and
// makes non-balanced distributions like the 8-node one unreachable.
inline GraphWithDistribution ring_graph(int n) {
  if (n < 3) throw std::invalid_argument("ring_graph: need n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    edges.push_back({i, (i + 1) % n, 1});
    edges.push_back({(i + 1) % n, i, 1});
    edges.push_back({i, i, 1});
  }
  Vector pi(n);
  if (n == 8) {
    for (int i = 0; i < n; ++i) pi[i] = (i % 2 == 0) ? 1.0 / 12.0 : 1.0 / 6.0;
  } else {
    pi.setConstant(1.0 / n);
  }
  return {WeightedDigraph(n, std::move(edges)), StationaryDistribution(pi)};
}

// Bidirected unit-weight 4-neighbor grid with self-loops, distribution
// proportional to node degree in the patrol pattern (self-loop included,
// so a 4x4 corner carries 3/64). Node index is row-major. This is the
// distribution the uniform stay-or-move walk leaves invariant, and its
// entropy-rate optimum reproduces the benchmark value exactly.
inline GraphWithDistribution grid_graph(int rows, int cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid_graph: need rows, cols >= 2");
  const int n = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.push_back({id(r, c), id(r, c + 1), 1});
        edges.push_back({id(r, c + 1), id(r, c), 1});
      }
      if (r + 1 < rows) {
        edges.push_back({id(r, c), id(r + 1, c), 1});
        edges.push_back({id(r + 1, c), id(r, c), 1});
      }
    }
  for (int v = 0; v < n; ++v) edges.push_back({v, v, 1});
  Vector degree = Vector::Zero(n);
  for (const Edge& e : edges) degree[e.u] += 1.0;
  Vector pi = degree / degree.sum();
  return {WeightedDigraph(n, std::move(edges)), StationaryDistribution(pi)};
}

// Complete digraph including self-loops, unit weights, uniform distribution.
inline GraphWithDistribution complete_graph(int n) {
  if (n < 2) throw std::invalid_argument("complete_graph: need n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges.push_back({i, j, 1});
  return {WeightedDigraph(n, std::move(edges)),
          StationaryDistribution(Vector::Constant(n, 1.0 / n))};
}

// 12-node complete digraph over the SF locations A..L. Travel times are
// pairwise by-car times in minutes (self-loop = 1); the visit frequency is
// proportional to recorded crime counts, total 866.
inline GraphWithDistribution sf_crime_map() {
  constexpr int n = 12;
  // clang-format off
  static constexpr std::array<std::array<int, n>, n> w = {{
      {1, 3, 3, 5, 4, 6, 3, 5, 7, 4, 6, 6},
      {3, 1, 5, 4, 2, 4, 4, 5, 5, 3, 5, 5},
      {3, 5, 1, 7, 6, 8, 3, 4, 9, 4, 8, 7},
      {6, 4, 7, 1, 5, 6, 4, 7, 5, 6, 6, 7},
      {4, 3, 6, 5, 1, 3, 5, 5, 6, 3, 4, 4},
      {6, 4, 8, 5, 3, 1, 6, 7, 3, 6, 2, 3},
      {2, 5, 3, 5, 6, 7, 1, 5, 7, 5, 7, 8},
      {3, 5, 2, 7, 6, 7, 3, 1, 9, 3, 7, 5},
      {8, 6, 9, 4, 6, 4, 6, 9, 1, 8, 5, 7},
      {4, 3, 4, 6, 3, 5, 5, 3, 7, 1, 5, 3},
      {6, 4, 8, 6, 4, 2, 6, 6, 4, 5, 1, 3},
      {6, 4, 6, 6, 3, 3, 6, 4, 5, 3, 2, 1},
  }};
  // clang-format on
  static constexpr std::array<int, n> crimes = {133, 90, 89, 87, 83, 83, 74, 64, 48, 43, 38, 34};

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges.push_back({i, j, w[i][j]});
  Vector pi(n);
  for (int i = 0; i < n; ++i) pi[i] = static_cast<double>(crimes[i]) / 866.0;
  return {WeightedDigraph(n, std::move(edges)), StationaryDistribution(pi)};
}

enum class GraphKind { ring, grid, complete, sf_crime_map };

struct GraphParams {
  int n = 0;     // ring / complete size
  int rows = 0;  // grid
  int cols = 0;
};

inline GraphWithDistribution build_graph(GraphKind kind, const GraphParams& params = {}) {
  switch (kind) {
    case GraphKind::ring: return ring_graph(params.n);
    case GraphKind::grid: return grid_graph(params.rows, params.cols);
    case GraphKind::complete: return complete_graph(params.n);
    case GraphKind::sf_crime_map: return sf_crime_map();
  }
  throw std::invalid_argument("build_graph: unknown kind");
}

}  // namespace patrol
