#pragma once
// File formats. Graph JSON: {"n": int, "edges": [{"u","v","w"}...], "pi": [...]}.
// Chain JSON: {"n": int, "p": [row-major reals]}. Both UTF-8.

#include "patrol/graph.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace patrol {

struct LoadedGraph {
  WeightedDigraph graph;
  StationaryDistribution pi;
  bool weights_normalized = false;  // true when a common travel-time factor was removed
  int removed_factor = 1;
};

inline nlohmann::json graph_to_json(const WeightedDigraph& g, const StationaryDistribution& pi) {
  nlohmann::json j;
  j["n"] = g.node_count();
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}});
  j["pi"] = std::vector<double>(pi.vec().data(), pi.vec().data() + pi.size());
  return j;
}

inline LoadedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("edges") || !j.contains("pi"))
    throw std::invalid_argument("graph file: missing required field (n, edges, pi)");
  int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& je : j.at("edges"))
    edges.push_back({je.at("u").get<int>(), je.at("v").get<int>(), je.at("w").get<int>()});
  std::vector<double> pv = j.at("pi").get<std::vector<double>>();
  if (static_cast<int>(pv.size()) != n)
    throw std::invalid_argument("graph file: pi length does not match n");
  Vector pi = Eigen::Map<const Vector>(pv.data(), static_cast<long>(pv.size()));

  WeightedDigraph raw(n, std::move(edges));
  int factor = 1;
  WeightedDigraph normalized = normalize_weights(raw, &factor);
  LoadedGraph out{std::move(normalized), StationaryDistribution(pi), factor > 1, factor};
  return out;
}

inline LoadedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("graph file parse error: " + std::string(e.what()));
  }
  return graph_from_json(j);
}

inline void save_graph(const std::string& path, const WeightedDigraph& g,
                       const StationaryDistribution& pi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << graph_to_json(g, pi).dump(2) << "\n";
}

inline nlohmann::json chain_to_json(const TransitionMatrix& P) {
  nlohmann::json j;
  const int n = P.size();
  j["n"] = n;
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) flat.push_back(P.p(i, k));
  j["p"] = flat;
  return j;
}

inline TransitionMatrix chain_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("p"))
    throw std::invalid_argument("chain file: missing required field (n, p)");
  int n = j.at("n").get<int>();
  std::vector<double> flat = j.at("p").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != n * n)
    throw std::invalid_argument("chain file: p length does not match n*n");
  Matrix P(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) P(i, k) = flat[static_cast<size_t>(i) * n + k];
  return TransitionMatrix(P);
}

inline TransitionMatrix load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("chain file parse error: " + std::string(e.what()));
  }
  return chain_from_json(j);
}

inline void save_chain(const std::string& path, const TransitionMatrix& P) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write chain file: " + path);
  out << chain_to_json(P).dump(2) << "\n";
}

}  // namespace patrol
