#pragma once
// Sensitivities of the hitting-time series with respect to the transition
// probabilities, and the exact gradient of the truncated return-time entropy.
//
// For each edge e = (u,v) the block S_k^e = dF_k / dp_uv obeys the same
// delayed coupling as F itself plus two inputs:
//
//   S_k^e(i,j) = [i=u, j=v, k=w_uv]                    (impulse)
//              + [i=u, j!=v] F_{k-w_uv}(v,j)           (coefficient term)
//              + sum_{h != j} p_ih S^e_{k-w_ih}(h,j).
//
// All m blocks are advanced jointly as one n x (m*n) row-major matrix so the
// coupling step runs as long contiguous axpys; only the m nonzero columns of
// the full n^2 x n^2 sensitivity ever exist.

#include "patrol/graph.hpp"
#include "patrol/hitting.hpp"
#include "patrol/metrics.hpp"

#include <vector>

namespace patrol {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Joint evolution of F_k and the stacked sensitivity blocks.
class SensitivityStepper {
 public:
  SensitivityStepper(const TransitionMatrix& P, const WeightedDigraph& g)
      : P_(&P.p), g_(&g), fstep_(P, g), n_(g.node_count()),
        m_(g.edge_count()), w_max_(g.max_travel_time()), slots_(w_max_ + 1), k_(0) {
    stacked_.assign(static_cast<size_t>(slots_), RowMatrix::Zero(n_, m_ * n_));
    f_mirror_.assign(static_cast<size_t>(slots_), RowMatrix::Zero(n_, n_));
    scratch_ = RowMatrix::Zero(n_, m_ * n_);
  }

  void advance() {
    const int k = k_ + 1;
    // Delayed coupling over all blocks at once.
    scratch_.setZero();
    for (int i = 0; i < n_; ++i) {
      for (const Edge& e : g_->out_edges(i)) {
        if (k - e.w < 1) continue;
        const double p = (*P_)(i, e.v);
        if (p == 0.0) continue;
        const RowMatrix& S = stacked_[static_cast<size_t>((k - e.w) % slots_)];
        scratch_.row(i) += p * S.row(e.v);
        for (int t = 0; t < m_; ++t) {
          const int col = t * n_ + e.v;
          scratch_(i, col) -= p * S(e.v, col);
        }
      }
    }
    // Per-edge inputs.
    for (int t = 0; t < m_; ++t) {
      const Edge& e = g_->edges()[static_cast<size_t>(t)];
      if (k - e.w >= 1) {
        const RowMatrix& F = f_mirror_[static_cast<size_t>((k - e.w) % slots_)];
        scratch_.row(e.u).segment(t * n_, n_) += F.row(e.v);
        scratch_(e.u, t * n_ + e.v) -= F(e.v, e.v);
      }
      if (k == e.w) scratch_(e.u, t * n_ + e.v) += 1.0;
    }
    stacked_[static_cast<size_t>(k % slots_)].swap(scratch_);
    f_mirror_[static_cast<size_t>(k % slots_)] = fstep_.advance();
    k_ = k;
  }

  int step() const { return k_; }
  const RowMatrix& hitting_matrix() const { return f_mirror_[static_cast<size_t>(k_ % slots_)]; }

  // Stacked S_{k - d}, d in [0, w_max]. Block t sits in columns [t n, (t+1) n).
  const RowMatrix& sensitivities(int d = 0) const {
    return stacked_[static_cast<size_t>((k_ - d) % slots_)];
  }

  // dF_k(a,b)/dp_e for block index t of edge e.
  double sensitivity(int t, int a, int b, int d = 0) const {
    return sensitivities(d)(a, t * n_ + b);
  }

 private:
  const Matrix* P_;
  const WeightedDigraph* g_;
  HittingStepper fstep_;
  int n_, m_, w_max_, slots_, k_;
  std::vector<RowMatrix> stacked_;
  std::vector<RowMatrix> f_mirror_;
  RowMatrix scratch_;
};

// The last w_max sensitivity blocks, exposed for inspection and debugging.
struct GradientSeries {
  int horizon = 0;
  int n = 0;
  std::vector<Edge> edges;
  std::vector<RowMatrix> window;  // window[d] = stacked blocks of G_{horizon - d}

  // Assembles the full n^2 x n^2 matrix G_{horizon - d} (column-major vec
  // convention), with all non-edge columns zero.
  Matrix dense(int d = 0) const {
    const int n2 = n * n;
    Matrix G = Matrix::Zero(n2, n2);
    const RowMatrix& S = window.at(static_cast<size_t>(d));
    for (int t = 0; t < static_cast<int>(edges.size()); ++t) {
      const Edge& e = edges[static_cast<size_t>(t)];
      const int col = e.v * n + e.u;
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) G(b * n + a, col) = S(a, t * n + b);
    }
    return G;
  }
};

inline GradientSeries gradient_series(const TransitionMatrix& P, const WeightedDigraph& g, int K) {
  if (K < 1) throw std::invalid_argument("gradient_series: horizon must be >= 1");
  SensitivityStepper stepper(P, g);
  for (int k = 1; k <= K; ++k) stepper.advance();
  GradientSeries series;
  series.horizon = K;
  series.n = g.node_count();
  series.edges = g.edges();
  const int w_max = g.max_travel_time();
  for (int d = 0; d < w_max; ++d) {
    if (K - d >= 1)
      series.window.push_back(stepper.sensitivities(d));
    else
      series.window.push_back(RowMatrix::Zero(g.node_count(), g.edge_count() * g.node_count()));
  }
  return series;
}

// Debug dump: the window blocks, row-major per edge.
inline nlohmann::json gradient_series_to_json(const GradientSeries& s) {
  nlohmann::json j;
  j["horizon"] = s.horizon;
  j["n"] = s.n;
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : s.edges) j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}});
  j["window"] = nlohmann::json::array();
  for (const RowMatrix& S : s.window) {
    std::vector<double> flat(S.data(), S.data() + S.size());
    j["window"].push_back(flat);
  }
  return j;
}

// d(F log F)/dF with the case split at F = 0.
inline double entropy_term_derivative(double f) { return f > 0.0 ? 1.0 + std::log(f) : 0.0; }

// Gradient of the truncated return-time entropy at an explicit horizon,
// reshaped to n x n and masked to the edge pattern.
inline Matrix entropy_gradient_at(const TransitionMatrix& P, const WeightedDigraph& g,
                                  const StationaryDistribution& pi, int N) {
  if (N < 1) throw std::invalid_argument("entropy_gradient_at: horizon must be >= 1");
  const int n = g.node_count();
  const int m = g.edge_count();
  SensitivityStepper stepper(P, g);
  Vector grad = Vector::Zero(m);
  for (int k = 1; k <= N; ++k) {
    stepper.advance();
    const RowMatrix& F = stepper.hitting_matrix();
    const RowMatrix& S = stepper.sensitivities();
    for (int i = 0; i < n; ++i) {
      const double weight = pi[i] * entropy_term_derivative(F(i, i));
      if (weight == 0.0) continue;
      for (int t = 0; t < m; ++t) grad[t] -= weight * S(i, t * n + i);
    }
  }
  Matrix out = Matrix::Zero(n, n);
  for (int t = 0; t < m; ++t) {
    const Edge& e = g.edges()[static_cast<size_t>(t)];
    out(e.u, e.v) = grad[t];
  }
  return out;
}

inline Matrix truncated_entropy_gradient(const TransitionMatrix& P, const WeightedDigraph& g,
                                         const StationaryDistribution& pi, double eta) {
  return entropy_gradient_at(P, g, pi, duration_for_accuracy(eta, pi, g));
}

// Central-difference oracle for the same gradient. Each edge entry is
// perturbed independently (no renormalization), clamped to [0,1].
inline Matrix finite_difference_gradient_at(const TransitionMatrix& P, const WeightedDigraph& g,
                                            const StationaryDistribution& pi, int N,
                                            double h = 1e-6) {
  if (h < 1e-8 || h > 1e-4)
    throw std::invalid_argument("finite_difference_gradient: step must lie in [1e-8, 1e-4]");
  const int n = g.node_count();
  Matrix out = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const double p = P.p(e.u, e.v);
    const double hi = std::min(p + h, 1.0);
    const double lo = std::max(p - h, 0.0);
    TransitionMatrix Q = P;
    Q.p(e.u, e.v) = hi;
    const double f_hi = truncated_return_entropy_at(Q, g, pi, N);
    Q.p(e.u, e.v) = lo;
    const double f_lo = truncated_return_entropy_at(Q, g, pi, N);
    out(e.u, e.v) = (f_hi - f_lo) / (hi - lo);
  }
  return out;
}

inline Matrix finite_difference_gradient(const TransitionMatrix& P, const WeightedDigraph& g,
                                         const StationaryDistribution& pi, double eta,
                                         double h = 1e-6) {
  return finite_difference_gradient_at(P, g, pi, duration_for_accuracy(eta, pi, g), h);
}

}  // namespace patrol
