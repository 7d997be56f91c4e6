#pragma once
// Rational intruder model. The intruder attacks node i after observing the
// walker absent for s time units; capture happens when the walker returns
// within the attack window (s, s + tau]. The intruder picks the s in
// [0, S_i] minimizing the conditional window probability, where the
// patience bound S_i is the smallest time whose exceedance probability
// drops below the impatience threshold delta.

#include "patrol/graph.hpp"
#include "patrol/hitting.hpp"
#include "patrol/metrics.hpp"
#include "patrol/rng.hpp"


namespace patrol {

struct IntruderParams {
  int tau = 1;         // attack duration, time units
  double delta = 0.1;  // degree of impatience

  IntruderParams(int attack_duration, double impatience)
      : tau(attack_duration), delta(impatience) {
    if (tau < 1) throw std::invalid_argument("intruder: tau must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("intruder: delta must lie in (0,1)");
  }
};

struct NodeAttackPlan {
  int node = 0;
  int patience_bound = 0;          // S_i
  int attack_time = 0;             // s_i
  double capture_probability = 0;  // minimized window probability
};

struct AttackPlan {
  std::vector<NodeAttackPlan> nodes;
};

struct CaptureReport {
  AttackPlan plan;
  double total = 0.0;  // sum_i pi_i capture_i
};

// Minimal S >= 1 with P(T_ii >= S) <= delta. Fails when the distribution's
// horizon cannot certify the bound.
inline int patience_bound(const ReturnTimeDistribution& dist, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("patience_bound: delta must lie in (0,1)");
  double exceed = 1.0;  // P(T >= S) at S = 1
  for (int S = 1; S <= dist.horizon() + 1; ++S) {
    if (exceed <= delta) return S;
    if (S <= dist.horizon()) exceed -= dist.probs[S - 1];
  }
  if (dist.tail_mass <= delta) return dist.horizon() + 1;
  throw std::runtime_error("patience_bound: horizon too short to certify delta");
}

namespace detail {

// Diagonal of the hitting series up to the horizon, per node: row i holds
// P(T_ii = 1..H).
inline Matrix return_diagonals(const TransitionMatrix& P, const WeightedDigraph& g, int H) {
  const int n = g.node_count();
  Matrix probs(n, H);
  HittingStepper stepper(P, g);
  for (int k = 1; k <= H; ++k) {
    const Matrix& F = stepper.advance();
    for (int i = 0; i < n; ++i) probs(i, k - 1) = F(i, i);
  }
  return probs;
}

inline NodeAttackPlan plan_for_node(const Eigen::RowVectorXd& probs, int node, int S, int tau) {
  // cum[s] = P(T <= s)
  Vector cum(probs.size() + 1);
  cum[0] = 0.0;
  for (int k = 1; k <= probs.size(); ++k) cum[k] = cum[k - 1] + probs[k - 1];

  NodeAttackPlan plan;
  plan.node = node;
  plan.patience_bound = S;
  double best = std::numeric_limits<double>::infinity();
  int best_s = -1;
  for (int s = 0; s <= S; ++s) {
    const double survive = 1.0 - cum[s];  // P(T > s)
    if (survive <= 1e-12) continue;       // cannot condition on a null event
    const double window =
        std::max(0.0, cum[std::min<int>(s + tau, static_cast<int>(probs.size()))] - cum[s]);
    const double value = window / survive;
    if (value < best - 1e-15) {
      best = value;
      best_s = s;
    }
  }
  if (best_s < 0)
    throw std::runtime_error("attack_plan: no admissible attack time at node " +
                             std::to_string(node));
  plan.attack_time = best_s;
  plan.capture_probability = std::min(1.0, std::max(0.0, best));
  return plan;
}

}  // namespace detail

inline AttackPlan attack_plan(const TransitionMatrix& P, const WeightedDigraph& g,
                              const StationaryDistribution& pi, const IntruderParams& params) {
  const int n = g.node_count();
  // Horizon N_delta certifies P(T >= N_delta + 1) <= delta, so every S_i is
  // found within the first pass.
  const int H1 = duration_for_accuracy(params.delta, pi, g) + 1;
  Matrix probs = detail::return_diagonals(P, g, H1);

  std::vector<int> S(static_cast<size_t>(n));
  int maxS = 0;
  for (int i = 0; i < n; ++i) {
    ReturnTimeDistribution dist;
    dist.node = i;
    dist.probs = probs.row(i).transpose();
    dist.tail_mass = std::max(0.0, 1.0 - dist.probs.sum());
    S[static_cast<size_t>(i)] = patience_bound(dist, params.delta);
    maxS = std::max(maxS, S[static_cast<size_t>(i)]);
  }

  const int H = maxS + params.tau + 1;
  if (H > H1) probs = detail::return_diagonals(P, g, H);

  AttackPlan plan;
  plan.nodes.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    plan.nodes.push_back(detail::plan_for_node(probs.row(i), i, S[static_cast<size_t>(i)], params.tau));
  return plan;
}

inline CaptureReport capture_probability(const TransitionMatrix& P, const WeightedDigraph& g,
                                         const StationaryDistribution& pi,
                                         const IntruderParams& params) {
  CaptureReport report;
  report.plan = attack_plan(P, g, pi, params);
  report.total = 0.0;
  for (const NodeAttackPlan& node : report.plan.nodes)
    report.total += pi[node.node] * node.capture_probability;
  return report;
}

// Capture probability across a range of attack durations; the patience
// bounds are tau-independent, so the series is computed once.
inline std::vector<std::pair<int, double>> capture_curve(const TransitionMatrix& P,
                                                         const WeightedDigraph& g,
                                                         const StationaryDistribution& pi,
                                                         double delta,
                                                         const std::vector<int>& tau_range) {
  if (tau_range.empty()) throw std::invalid_argument("capture_curve: empty tau range");
  int tau_max = 1;
  for (int tau : tau_range) {
    if (tau < 1) throw std::invalid_argument("capture_curve: tau must be >= 1");
    tau_max = std::max(tau_max, tau);
  }

  const int n = g.node_count();
  const int H1 = duration_for_accuracy(delta, pi, g) + 1;
  Matrix probs = detail::return_diagonals(P, g, H1);
  std::vector<int> S(static_cast<size_t>(n));
  int maxS = 0;
  for (int i = 0; i < n; ++i) {
    ReturnTimeDistribution dist;
    dist.node = i;
    dist.probs = probs.row(i).transpose();
    dist.tail_mass = std::max(0.0, 1.0 - dist.probs.sum());
    S[static_cast<size_t>(i)] = patience_bound(dist, delta);
    maxS = std::max(maxS, S[static_cast<size_t>(i)]);
  }
  const int H = maxS + tau_max + 1;
  if (H > H1) probs = detail::return_diagonals(P, g, H);

  std::vector<std::pair<int, double>> curve;
  curve.reserve(tau_range.size());
  for (int tau : tau_range) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      NodeAttackPlan node = detail::plan_for_node(probs.row(i), i, S[static_cast<size_t>(i)], tau);
      total += pi[i] * node.capture_probability;
    }
    curve.push_back({tau, total});
  }
  return curve;
}

inline std::string capture_curve_csv(const std::vector<std::pair<int, double>>& curve) {
  std::ostringstream out;
  out << "tau,total\n";
  char buf[64];
  for (const auto& [tau, total] : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g", total);
    out << tau << "," << buf << "\n";
  }
  return out.str();
}

struct SimulationResult {
  double rate = 0.0;
  double ci_half_width = 0.0;  // 95% normal approximation
  int trials = 0;

  bool contains(double value) const {
    return value >= rate - ci_half_width && value <= rate + ci_half_width;
  }
};

// Monte Carlo replay of the intruder policy. Trials use counter-based
// substreams, so the result is independent of evaluation order.
inline SimulationResult simulate_capture(const TransitionMatrix& P, const WeightedDigraph& g,
                                         const StationaryDistribution& pi,
                                         const IntruderParams& params, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("simulate_capture: trials must be >= 1");
  const AttackPlan plan = attack_plan(P, g, pi, params);
  const int n = g.node_count();

  // Per-row sampling tables.
  std::vector<std::vector<double>> cum(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u) {
    double acc = 0.0;
    for (const Edge& e : g.out_edges(u)) {
      acc += std::max(0.0, P.p(u, e.v));
      cum[static_cast<size_t>(u)].push_back(acc);
    }
  }

  long long captures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(trial));
    // attacked node ~ pi
    double r = rng.next_double();
    int node = n - 1;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += pi[i];
      if (r < acc) {
        node = i;
        break;
      }
    }
    const NodeAttackPlan& node_plan = plan.nodes[static_cast<size_t>(node)];

    // Draw return excursions until one outlasts the attack time.
    bool captured = false;
    for (long long guard = 0; guard < 100000000LL; ++guard) {
      long long T = 0;
      int u = node;
      do {
        const auto& row_cum = cum[static_cast<size_t>(u)];
        const double total = row_cum.back();
        double draw = rng.next_double() * total;
        size_t idx = 0;
        while (idx + 1 < row_cum.size() && draw >= row_cum[idx]) ++idx;
        const Edge& e = g.out_edges(u)[idx];
        T += e.w;
        u = e.v;
      } while (u != node);
      if (T > node_plan.attack_time) {
        captured = T <= node_plan.attack_time + params.tau;
        break;
      }
    }
    if (captured) ++captures;
  }

  SimulationResult result;
  result.trials = trials;
  result.rate = static_cast<double>(captures) / trials;
  result.ci_half_width = 1.96 * std::sqrt(result.rate * (1.0 - result.rate) / trials);
  return result;
}

inline nlohmann::json attack_plan_to_json(const AttackPlan& plan) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const NodeAttackPlan& node : plan.nodes)
    nodes.push_back({{"node", node.node},
                     {"S", node.patience_bound},
                     {"s", node.attack_time},
                     {"capture", node.capture_probability}});
  return nlohmann::json{{"nodes", nodes}};
}

}  // namespace patrol
