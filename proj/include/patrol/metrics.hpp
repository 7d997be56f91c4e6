#pragma once
// Scalar functionals of a chain: return-time entropy (truncated, conditional,
// and estimated to a certified tolerance), entropy rate, expected return
// times, weighted Kemeny constant, closed forms and bounds. Natural
// logarithms throughout; 0 log 0 = 0 at the evaluation layer.

#include "patrol/graph.hpp"
#include "patrol/hitting.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace patrol {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Duration N_eta = ceil(w_max / (eta * pi_min)) - 1. Markov's inequality then
// guarantees per-node tail mass P(T_ii >= N_eta + 1) <= eta.
inline int duration_for_accuracy(double eta, double pi_min, int w_max) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("duration_for_accuracy: eta must lie in (0,1)");
  if (!(pi_min > 0.0 && pi_min <= 1.0))
    throw std::invalid_argument("duration_for_accuracy: pi_min must lie in (0,1]");
  if (w_max < 1) throw std::invalid_argument("duration_for_accuracy: w_max must be >= 1");
  double raw = std::ceil(static_cast<double>(w_max) / (eta * pi_min)) - 1.0;
  return static_cast<int>(raw);
}

inline int duration_for_accuracy(double eta, const StationaryDistribution& pi,
                                 const WeightedDigraph& g) {
  return duration_for_accuracy(eta, pi.min(), g.max_travel_time());
}

// -sum_i pi_i sum_{k<=N} F_k(i,i) log F_k(i,i), explicit horizon.
inline double truncated_return_entropy_at(const TransitionMatrix& P, const WeightedDigraph& g,
                                          const StationaryDistribution& pi, int N) {
  if (N < 1) throw std::invalid_argument("truncated_return_entropy: horizon must be >= 1");
  HittingStepper stepper(P, g);
  const int n = g.node_count();
  double J = 0.0;
  for (int k = 1; k <= N; ++k) {
    const Matrix& F = stepper.advance();
    for (int i = 0; i < n; ++i) J -= pi[i] * xlogx(F(i, i));
  }
  return J;
}

inline double truncated_return_entropy(const TransitionMatrix& P, const WeightedDigraph& g,
                                       const StationaryDistribution& pi, double eta) {
  return truncated_return_entropy_at(P, g, pi, duration_for_accuracy(eta, pi, g));
}

// Entropy of the per-node distributions renormalized on {T <= N_eta}.
inline double conditional_return_entropy(const TransitionMatrix& P, const WeightedDigraph& g,
                                         const StationaryDistribution& pi, double eta) {
  const int N = duration_for_accuracy(eta, pi, g);
  const int n = g.node_count();
  HittingStepper stepper(P, g);
  Vector H = Vector::Zero(n);  // per-node truncated entropy
  Vector M = Vector::Zero(n);  // per-node truncated mass
  for (int k = 1; k <= N; ++k) {
    const Matrix& F = stepper.advance();
    for (int i = 0; i < n; ++i) {
      H[i] -= xlogx(F(i, i));
      M[i] += F(i, i);
    }
  }
  double J = 0.0;
  for (int i = 0; i < n; ++i) {
    if (M[i] <= 0.0)
      throw std::runtime_error("conditional_return_entropy: zero truncated mass at node " +
                               std::to_string(i) + " (eta too large)");
    J += pi[i] * (H[i] / M[i] + std::log(M[i]));
  }
  return J;
}

// Entropy contribution of indices k >= m under the envelope F_k <= c*lam^k,
// computed in log space so that deep tails underflow to 0 instead of NaN.
// Valid when c*lam^m <= 1/e (log_c + m log lam <= -1), where -x log x is
// still increasing; returns +inf when that premise fails.
inline double envelope_entropy_tail(double log_c, double lam, double m) {
  const double log_lam = std::log(lam);
  const double t = log_c + m * log_lam;  // log(c * lam^m)
  if (t > -1.0) return std::numeric_limits<double>::infinity();
  return -std::exp(t) * (t / (1.0 - lam) + lam * log_lam / ((1.0 - lam) * (1.0 - lam)));
}

inline double geometric_entropy_tail(double c, double lam, double m) {
  return envelope_entropy_tail(std::log(c), lam, m);
}

struct EntropyEstimate {
  double value = 0.0;     // truncated sum at the stopping horizon
  double bound = 0.0;     // certified remaining entropy mass
  int horizon = 0;
  double lambda = 0.0;    // spectral radius of the augmented dynamics
  double c_fit = 0.0;     // fitted envelope constant
};

// Runs the return-time series until the geometric tail certificate built
// from rho(Psi) and the observed diagonal envelope bounds the remaining
// entropy by tol. min_horizon forces at least that many terms.
inline EntropyEstimate return_entropy_estimate(const TransitionMatrix& P, const WeightedDigraph& g,
                                               const StationaryDistribution& pi, double tol,
                                               int min_horizon = 0, int max_horizon = 4000000) {
  if (!(tol > 0.0)) throw std::invalid_argument("return_entropy_estimate: tol must be > 0");
  const double lambda = augmented_spectral_radius(P, g);
  if (lambda >= 1.0 - 1e-12)
    throw std::runtime_error("return_entropy_estimate: spectral radius >= 1, chain not feasible");

  const int n = g.node_count();
  const int w_max = g.max_travel_time();
  // rho(Psi) = 0 means the companion operator is nilpotent: the series is
  // identically zero once the impulses have flushed through the state.
  const int nilpotent_cutoff = w_max * (1 + n * n) + 1;

  HittingStepper stepper(P, g);
  EntropyEstimate est;
  est.lambda = lambda;
  double log_c = -std::numeric_limits<double>::infinity();
  const double log_lambda = lambda > 0.0 ? std::log(lambda) : 0.0;

  for (int k = 1; k <= max_horizon; ++k) {
    const Matrix& F = stepper.advance();
    double maxdiag = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = F(i, i);
      est.value -= pi[i] * xlogx(f);
      maxdiag = std::max(maxdiag, f);
    }
    // fit the envelope constant; skip the denormal flatline near the
    // underflow floor, which no longer reflects the true decay rate
    if (lambda > 0.0 && maxdiag > 1e-300)
      log_c = std::max(log_c, std::log(maxdiag) - k * log_lambda);

    if (k < std::max(min_horizon, 1)) continue;

    if (lambda <= 1e-14) {
      if (k >= nilpotent_cutoff) {
        est.bound = 0.0;
        est.horizon = k;
        est.c_fit = 0.0;
        return est;
      }
      continue;
    }
    if (!std::isfinite(log_c)) continue;  // nothing observed yet
    const double bound = envelope_entropy_tail(log_c, lambda, static_cast<double>(k) + 1.0);
    if (bound <= tol) {
      est.bound = bound;
      est.horizon = k;
      est.c_fit = std::exp(log_c);
      return est;
    }
  }
  throw std::runtime_error("return_entropy_estimate: horizon budget exhausted before certification");
}

// Certified bound on the entropy mass beyond horizon K for this chain.
inline double entropy_tail_bound(const TransitionMatrix& P, const WeightedDigraph& g, int K) {
  const double lambda = augmented_spectral_radius(P, g);
  if (lambda >= 1.0 - 1e-12)
    throw std::runtime_error("entropy_tail_bound: spectral radius >= 1");
  const int n = g.node_count();
  if (lambda <= 1e-14) {
    const int cutoff = g.max_travel_time() * (1 + n * n) + 1;
    if (K >= cutoff) return 0.0;  // nilpotent dynamics already flushed
    throw std::runtime_error("entropy_tail_bound: horizon too short for the nilpotent cutoff");
  }
  HittingStepper stepper(P, g);
  double log_c = -std::numeric_limits<double>::infinity();
  const double log_lambda = std::log(lambda);
  for (int k = 1; k <= K; ++k) {
    const Matrix& F = stepper.advance();
    double maxdiag = 0.0;
    for (int i = 0; i < n; ++i) maxdiag = std::max(maxdiag, F(i, i));
    if (maxdiag > 1e-300) log_c = std::max(log_c, std::log(maxdiag) - k * log_lambda);
  }
  if (!std::isfinite(log_c)) return 0.0;  // no diagonal mass observed at all
  const double bound = envelope_entropy_tail(log_c, lambda, static_cast<double>(K) + 1.0);
  if (!std::isfinite(bound))
    throw std::runtime_error("entropy_tail_bound: horizon too short for the envelope certificate");
  return bound;
}

// -sum_i pi_i sum_j p_ij log p_ij.
inline double entropy_rate(const TransitionMatrix& P, const StationaryDistribution& pi) {
  const int n = P.size();
  if (pi.size() != n) throw std::invalid_argument("entropy_rate: dimension mismatch");
  double residual = (P.p.transpose() * pi.vec() - pi.vec()).cwiseAbs().maxCoeff();
  if (residual > 1e-6)
    throw std::invalid_argument("entropy_rate: pi is not stationary for P (residual " +
                                std::to_string(residual) + ")");
  double H = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H -= pi[i] * xlogx(P.p(i, j));
  return H;
}

// E[T_ii] = pi^T (P o W) 1 / pi_i.
inline Vector expected_return_times(const TransitionMatrix& P, const WeightedDigraph& g,
                                    const StationaryDistribution& pi) {
  double weighted_step = 0.0;
  for (const Edge& e : g.edges()) weighted_step += pi[e.u] * P.p(e.u, e.v) * e.w;
  Vector out(pi.size());
  for (int i = 0; i < pi.size(); ++i) out[i] = weighted_step / pi[i];
  return out;
}

// Upper bound on the return time entropy for unit travel times, from the
// maximum-entropy distribution with mean 1/pi_i.
inline double max_entropy_upper_bound(const StationaryDistribution& pi) {
  double bound = 0.0;
  for (int i = 0; i < pi.size(); ++i) bound -= xlogx(pi[i]) + xlogx(1.0 - pi[i]);
  return bound;
}

// Entropy of the geometric distribution with mean mu >= 1.
inline double geometric_entropy(double mu) {
  if (mu < 1.0) throw std::invalid_argument("geometric_entropy: mean must be >= 1");
  if (mu == 1.0) return 0.0;
  return mu * std::log(mu) - (mu - 1.0) * std::log(mu - 1.0);
}

// pi-weighted mean one-hop travel time, pi^T (P o W) 1.
inline double expected_step_time(const TransitionMatrix& P, const WeightedDigraph& g,
                                 const StationaryDistribution& pi) {
  double s = 0.0;
  for (const Edge& e : g.edges()) s += pi[e.u] * P.p(e.u, e.v) * e.w;
  return s;
}

// Weighted Kemeny constant, diagonal excluded:
//   K = sum_i pi_i sum_{j != i} pi_j E[T_ij].
// For unit weights this matches the eigenvalue identity sum_{j>=2} 1/(1-lambda_j).
inline double kemeny_constant(const TransitionMatrix& P, const WeightedDigraph& g,
                              const StationaryDistribution& pi) {
  Matrix M = mean_first_passage(P, g);
  const int n = g.node_count();
  double K = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) K += pi[i] * pi[j] * M(i, j);
  return K;
}

// Diagonal-included variant, K + pi^T (P o W) 1. The published benchmark
// tables use this convention (for unit weights it sits exactly one above
// the eigenvalue identity).
inline double kemeny_with_return(const TransitionMatrix& P, const WeightedDigraph& g,
                                 const StationaryDistribution& pi) {
  return kemeny_constant(P, g, pi) + expected_step_time(P, g, pi);
}

// Entropy of the random return trajectory of node i: H_rate / pi_i.
inline double trajectory_entropy(const TransitionMatrix& P, const StationaryDistribution& pi,
                                 int node) {
  if (node < 0 || node >= pi.size())
    throw std::invalid_argument("trajectory_entropy: node out of range");
  return entropy_rate(P, pi) / pi[node];
}

// Closed form for the 2-node complete graph with unit weights.
inline double two_node_return_entropy(double p11, double p22, const StationaryDistribution& pi) {
  if (pi.size() != 2) throw std::invalid_argument("two_node_return_entropy: pi must have size 2");
  if (p11 < 0.0 || p11 > 1.0 || p22 < 0.0 || p22 > 1.0)
    throw std::invalid_argument("two_node_return_entropy: probabilities out of [0,1]");
  const double p12 = 1.0 - p11, p21 = 1.0 - p22;
  if (std::abs(pi[0] * p12 - pi[1] * p21) > 1e-9)
    throw std::invalid_argument("two_node_return_entropy: pi is not stationary for these entries");
  return -2.0 * (pi[0] * xlogx(p11) + pi[1] * xlogx(p22) + pi[0] * xlogx(p12) +
                 pi[1] * xlogx(p21));
}

// Closed form for P = (a-b) I + b 11^T on the complete graph, uniform pi.
inline double complete_symmetric_return_entropy(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("complete_symmetric_return_entropy: need n >= 2");
  if (a < 0.0 || b <= 0.0 || std::abs(a + (n - 1) * b - 1.0) > 1e-9)
    throw std::invalid_argument(
        "complete_symmetric_return_entropy: need a >= 0, b > 0, a + (n-1) b = 1");
  const double m = static_cast<double>(n - 1);
  return -xlogx(a) - m * b * std::log(m * b * b) - m * xlogx(1.0 - b);
}

struct ChainMetrics {
  double J = 0.0;        // return-time entropy estimate
  double J_trunc = 0.0;  // truncated at N_eta
  double J_cond = 0.0;   // conditional on T <= N_eta
  double H_rate = 0.0;
  double kemeny = 0.0;
  Vector expected_returns;
  double eta = 0.0;
  int N_eta = 0;
};

inline nlohmann::json chain_metrics_to_json(const ChainMetrics& m) {
  nlohmann::json j;
  j["J"] = m.J;
  j["J_trunc"] = m.J_trunc;
  j["J_cond"] = m.J_cond;
  j["H_rate"] = m.H_rate;
  j["kemeny"] = m.kemeny;
  j["expected_returns"] =
      std::vector<double>(m.expected_returns.data(), m.expected_returns.data() + m.expected_returns.size());
  j["eta"] = m.eta;
  j["N_eta"] = m.N_eta;
  return j;
}

}  // namespace patrol
