#pragma once
// Multi-start projected-gradient maximization over the feasible set, with
// three objectives: truncated return-time entropy (analytic gradient via the
// sensitivity recursion), entropy rate (analytic gradient), and the weighted
// Kemeny constant (minimized; central-difference gradient).

#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/metrics.hpp"
#include "patrol/projection.hpp"

#include <future>
#include <thread>

namespace patrol {

enum class Objective { return_entropy, entropy_rate, min_kemeny };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::return_entropy: return "return-entropy";
    case Objective::entropy_rate: return "entropy-rate";
    case Objective::min_kemeny: return "min-kemeny";
  }
  return "?";
}

struct OptimizerConfig {
  double eta = 0.1;                  // truncation accuracy during optimization
  int max_iters = 500;
  double step0 = 1.0;
  double backtrack_shrink = 0.5;
  double sufficient_increase = 1e-4;
  double tol = 1e-7;                 // relative gain over the stop window
  int tol_window = 10;
  int starts = 5;
  std::uint64_t seed = 0;
  int threads = 0;                   // 0 = hardware concurrency
};

struct OptimizeResult {
  TransitionMatrix chain;
  double objective = 0.0;            // value of the selected objective (kemeny reported positive)
  std::vector<double> trace;         // accepted internal objective values, nondecreasing
  bool converged = false;
  int start_index = 0;
  double max_feasibility_residual = 0.0;
  std::uint64_t seed = 0;
};

struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Internal objective is always maximized; min_kemeny is negated here.
struct ObjectiveFns {
  std::function<double(const TransitionMatrix&)> value;
  std::function<Matrix(const TransitionMatrix&)> gradient;
};

inline Matrix kemeny_fd_gradient(const TransitionMatrix& P, const WeightedDigraph& g,
                                 const StationaryDistribution& pi, double h = 1e-6) {
  const int n = g.node_count();
  const double f0 = kemeny_with_return(P, g, pi);
  Matrix out = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const double p = P.p(e.u, e.v);
    double hi = std::min(p + h, 1.0);
    double lo = std::max(p - h, 0.0);
    TransitionMatrix Q = P;
    double f_hi, f_lo;
    // near-reducible perturbations can make a passage-time solve singular;
    // fall back to a one-sided difference for that edge
    try {
      Q.p(e.u, e.v) = hi;
      f_hi = kemeny_with_return(Q, g, pi);
    } catch (const std::runtime_error&) {
      f_hi = f0;
      hi = p;
    }
    try {
      Q.p(e.u, e.v) = lo;
      f_lo = kemeny_with_return(Q, g, pi);
    } catch (const std::runtime_error&) {
      f_lo = f0;
      lo = p;
    }
    out(e.u, e.v) = (hi > lo) ? (f_hi - f_lo) / (hi - lo) : 0.0;
  }
  return out;
}

inline ObjectiveFns make_objective(Objective kind, const FeasibleSetSpec& spec, double eta) {
  const WeightedDigraph& g = spec.graph;
  const StationaryDistribution& pi = spec.pi;
  switch (kind) {
    case Objective::return_entropy: {
      const int N = duration_for_accuracy(eta, pi, g);
      return {[&g, &pi, N](const TransitionMatrix& P) {
                return truncated_return_entropy_at(P, g, pi, N);
              },
              [&g, &pi, N](const TransitionMatrix& P) { return entropy_gradient_at(P, g, pi, N); }};
    }
    case Objective::entropy_rate: {
      return {[&g, &pi](const TransitionMatrix& P) {
                double H = 0.0;
                for (const Edge& e : g.edges()) H -= pi[e.u] * xlogx(P.p(e.u, e.v));
                return H;
              },
              [&g, &pi](const TransitionMatrix& P) {
                const int n = g.node_count();
                Matrix grad = Matrix::Zero(n, n);
                for (const Edge& e : g.edges()) {
                  const double p = std::max(P.p(e.u, e.v), 1e-12);
                  grad(e.u, e.v) = -pi[e.u] * (1.0 + std::log(p));
                }
                return grad;
              }};
    }
    case Objective::min_kemeny: {
      // minimized in the diagonal-included convention the benchmark tables
      // use; on unit-weight graphs the two conventions share the minimizer.
      // Candidates whose passage-time system is singular (reducible limit)
      // evaluate to -inf and get rejected by the line search.
      return {[&g, &pi](const TransitionMatrix& P) {
                try {
                  return -kemeny_with_return(P, g, pi);
                } catch (const std::runtime_error&) {
                  return -std::numeric_limits<double>::infinity();
                }
              },
              [&g, &pi](const TransitionMatrix& P) {
                return (-kemeny_fd_gradient(P, g, pi)).eval();
              }};
    }
  }
  throw std::invalid_argument("unknown objective");
}

struct StartOutcome {
  TransitionMatrix chain;
  double objective = 0.0;
  std::vector<double> trace;
  bool converged = false;
  double max_residual = 0.0;
  bool usable = false;
};

inline StartOutcome run_single_start(const ObjectiveFns& fns, const FeasibleSetSpec& spec,
                                     const FeasibleProjector& projector,
                                     const OptimizerConfig& cfg, std::uint64_t start_seed) {
  StartOutcome out;
  TransitionMatrix P = random_feasible_chain(spec, start_seed);
  double f = fns.value(P);
  out.trace.push_back(f);
  out.max_residual = validate_chain(P, spec).max_residual();

  double alpha = cfg.step0;
  bool stationary = false;
  for (int iter = 0; iter < cfg.max_iters && !stationary; ++iter) {
    Matrix grad;
    try {
      grad = fns.gradient(P);
    } catch (const std::runtime_error&) {
      break;  // gradient unavailable here; keep the best point so far
    }
    alpha = std::min(cfg.step0, alpha * 2.0);  // warm start from the last accepted step
    bool accepted = false;
    while (alpha > 1e-14) {
      TransitionMatrix cand;
      try {
        cand = projector.project(P.p + alpha * grad);
      } catch (const std::runtime_error&) {
        alpha *= cfg.backtrack_shrink;  // projection gave up on this far-out trial point
        continue;
      }
      const double fc = fns.value(cand);
      const double along = (grad.array() * (cand.p - P.p).array()).sum();
      if (fc >= f + cfg.sufficient_increase * along && fc >= f) {
        stationary = (cand.p - P.p).cwiseAbs().maxCoeff() < 1e-14;
        P = std::move(cand);
        f = fc;
        accepted = true;
        out.max_residual = std::max(out.max_residual, validate_chain(P, spec).max_residual());
        break;
      }
      alpha *= cfg.backtrack_shrink;
    }
    if (!accepted) {
      out.converged = true;  // no feasible ascent step left
      break;
    }
    out.trace.push_back(f);
    const int w = cfg.tol_window;
    if (static_cast<int>(out.trace.size()) > w) {
      const double past = out.trace[out.trace.size() - static_cast<size_t>(w) - 1];
      if (f - past < cfg.tol * std::max(1.0, std::abs(f))) {
        out.converged = true;
        break;
      }
    }
  }
  out.chain = std::move(P);
  out.objective = f;
  out.usable = true;
  return out;
}

}  // namespace detail

inline OptimizeResult optimize_chain(Objective kind, const FeasibleSetSpec& spec,
                                     const OptimizerConfig& cfg = {}) {
  if (cfg.starts < 1) throw std::invalid_argument("optimize_chain: need at least one start");
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
    throw std::invalid_argument("optimize_chain: eta must lie in (0,1)");
  const detail::ObjectiveFns fns = detail::make_objective(kind, spec, cfg.eta);
  const FeasibleProjector projector(spec);

  std::vector<detail::StartOutcome> outcomes(static_cast<size_t>(cfg.starts));
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.starts);

  for (int base = 0; base < cfg.starts; base += threads) {
    const int batch = std::min(threads, cfg.starts - base);
    std::vector<std::future<detail::StartOutcome>> futures;
    futures.reserve(static_cast<size_t>(batch));
    for (int s = 0; s < batch; ++s) {
      const int start = base + s;
      futures.push_back(std::async(std::launch::async, [&, start]() {
        try {
          return detail::run_single_start(
              fns, spec, projector, cfg,
              substream(cfg.seed, static_cast<std::uint64_t>(start)).next_u64());
        } catch (const std::exception&) {
          return detail::StartOutcome{};  // failed start; the others still count
        }
      }));
    }
    for (int s = 0; s < batch; ++s) outcomes[static_cast<size_t>(base + s)] = futures[static_cast<size_t>(s)].get();
  }

  int best = -1;
  for (int s = 0; s < cfg.starts; ++s) {
    if (!outcomes[static_cast<size_t>(s)].usable) continue;
    if (best < 0 || outcomes[static_cast<size_t>(s)].objective > outcomes[static_cast<size_t>(best)].objective)
      best = s;
  }
  if (best < 0) throw OptimizationError("optimize_chain: no start produced a feasible chain");

  detail::StartOutcome& won = outcomes[static_cast<size_t>(best)];
  OptimizeResult result;
  result.chain = std::move(won.chain);
  result.trace = std::move(won.trace);
  result.converged = won.converged;
  result.start_index = best;
  result.max_feasibility_residual = won.max_residual;
  result.seed = cfg.seed;
  result.objective = (kind == Objective::min_kemeny) ? -won.objective : won.objective;
  return result;
}

// One-call aggregation of the chain metrics at evaluation accuracy eta_eval.
inline ChainMetrics evaluate_all(const TransitionMatrix& chain, const FeasibleSetSpec& spec,
                                 double eta_eval = 0.01) {
  const WeightedDigraph& g = spec.graph;
  const StationaryDistribution& pi = spec.pi;
  ChainMetrics out;
  out.eta = eta_eval;
  out.N_eta = duration_for_accuracy(eta_eval, pi, g);
  out.J_trunc = truncated_return_entropy_at(chain, g, pi, out.N_eta);
  out.J_cond = conditional_return_entropy(chain, g, pi, eta_eval);
  out.J = return_entropy_estimate(chain, g, pi, 1e-6, out.N_eta).value;
  out.H_rate = entropy_rate(chain, pi);
  out.kemeny = kemeny_constant(chain, g, pi);
  out.expected_returns = expected_return_times(chain, g, pi);
  return out;
}

}  // namespace patrol
