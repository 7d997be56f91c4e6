#pragma once
// First-hitting-time probability dynamics. F_k(i,j) = P(T_ij = k) obeys a
// delayed linear recursion driven by impulses at the travel times:
//
//   F_k(i,j) = p_ij [k == w_ij] + sum_{h != j} p_ih F_{k - w_ih}(h, j)
//
// with F_k = 0 for k <= 0. Everything here works off a ring buffer of the
// last w_max matrices; the block-companion form of the same dynamics is
// materialized only for spectral diagnostics.

#include "patrol/graph.hpp"
#include "patrol/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace patrol {

// Shared kernel: out(i,.) += p_ih * [delayed-by-w_ih matrix].row(h), with the
// h-th column term removed (the walk stops on first arrival).
template <class DelayedLookup>
inline void delayed_coupling_into(Matrix& out, const Matrix& P, const WeightedDigraph& g,
                                  DelayedLookup&& delayed) {
  const int n = g.node_count();
  for (int i = 0; i < n; ++i) {
    for (const Edge& e : g.out_edges(i)) {
      const Matrix* D = delayed(e.w);
      if (D == nullptr) continue;
      const double p = P(i, e.v);
      if (p == 0.0) continue;
      out.row(i) += p * D->row(e.v);
      out(i, e.v) -= p * (*D)(e.v, e.v);
    }
  }
}

// Incremental evaluation of F_1, F_2, ... over a ring buffer of the last
// w_max + 1 matrices.
class HittingStepper {
 public:
  HittingStepper(const TransitionMatrix& P, const WeightedDigraph& g)
      : P_(&P.p), g_(&g), n_(g.node_count()), w_max_(g.max_travel_time()),
        slots_(w_max_ + 1), k_(0) {
    if (P.p.rows() != n_ || P.p.cols() != n_)
      throw std::invalid_argument("hitting: transition matrix dimension mismatch");
    buffer_.assign(static_cast<size_t>(slots_), Matrix::Zero(n_, n_));
    scratch_ = Matrix::Zero(n_, n_);
  }

  // Advances to F_{k+1} and returns it.
  const Matrix& advance() {
    const int k = k_ + 1;
    scratch_.setZero();
    delayed_coupling_into(scratch_, *P_, *g_, [&](int w) -> const Matrix* {
      return (k - w >= 1) ? &buffer_[static_cast<size_t>((k - w) % slots_)] : nullptr;
    });
    if (k <= w_max_)
      for (const Edge& e : g_->edges())
        if (e.w == k) scratch_(e.u, e.v) += (*P_)(e.u, e.v);
    Matrix& slot = buffer_[static_cast<size_t>(k % slots_)];
    slot.swap(scratch_);
    k_ = k;
    return slot;
  }

  int step() const { return k_; }
  const Matrix& current() const { return buffer_[static_cast<size_t>(k_ % slots_)]; }

 private:
  const Matrix* P_;
  const WeightedDigraph* g_;
  int n_, w_max_, slots_, k_;
  std::vector<Matrix> buffer_;
  Matrix scratch_;
};

struct HittingSeries {
  int horizon = 0;
  std::vector<Matrix> F;  // F[k-1] holds F_k

  const Matrix& at(int k) const { return F.at(static_cast<size_t>(k - 1)); }
};

inline HittingSeries hitting_series(const TransitionMatrix& P, const WeightedDigraph& g, int K) {
  if (K < 1) throw std::invalid_argument("hitting_series: horizon must be >= 1");
  HittingStepper stepper(P, g);
  HittingSeries series;
  series.horizon = K;
  series.F.reserve(static_cast<size_t>(K));
  for (int k = 1; k <= K; ++k) series.F.push_back(stepper.advance());
  return series;
}

struct ReturnTimeDistribution {
  int node = 0;
  Vector probs;            // probs[k-1] = P(T_ii = k)
  double tail_mass = 0.0;  // 1 - sum(probs)

  int horizon() const { return static_cast<int>(probs.size()); }
};

inline ReturnTimeDistribution return_time_distribution(const TransitionMatrix& P,
                                                       const WeightedDigraph& g, int node, int K) {
  if (node < 0 || node >= g.node_count())
    throw std::invalid_argument("return_time_distribution: node out of range");
  if (K < 1) throw std::invalid_argument("return_time_distribution: horizon must be >= 1");
  HittingStepper stepper(P, g);
  ReturnTimeDistribution dist;
  dist.node = node;
  dist.probs.resize(K);
  for (int k = 1; k <= K; ++k) dist.probs[k - 1] = stepper.advance()(node, node);
  double tail = 1.0 - dist.probs.sum();
  if (tail < -1e-12)
    throw std::runtime_error("return_time_distribution: probability mass exceeds 1");
  dist.tail_mass = std::max(tail, 0.0);
  return dist;
}

inline std::string to_csv(const ReturnTimeDistribution& dist) {
  std::ostringstream out;
  out << "k,prob\n";
  char buf[64];
  for (int k = 1; k <= dist.horizon(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", dist.probs[k - 1]);
    out << k << "," << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.17g", dist.tail_mass);
  out << "tail," << buf << "\n";
  return out.str();
}

// --- spectral diagnostics -------------------------------------------------

// Power iteration on a nonnegative operator. Nilpotent operators (an exact
// zero iterate; no cancellation can occur with nonnegative entries) are
// detected in an unshifted warm-up pass. The main pass adds a positive
// diagonal shift so the Perron root dominates even for periodic patterns.
// Defective dominant eigenvalues make plain power iteration converge only
// algebraically; callers that can materialize the operator supply a dense
// eigensolve fallback for that case.
template <class ApplyFn>
inline double nonnegative_spectral_radius(
    ApplyFn&& apply, int dim, const std::function<Matrix()>& materialize = nullptr,
    double tol = 1e-12, int max_iters = 10000, std::uint64_t seed = 20240103) {
  constexpr double shift = 0.5;
  SplitMix64 rng(seed);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = 0.5 + rng.next_double();
  v /= v.norm();
  for (int it = 0; it <= dim; ++it) {
    Vector w = apply(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply(v) + shift * v;
    const double next = w.norm();
    w /= next;
    if (std::abs(next - lambda) <= tol * std::max(1.0, next)) return next - shift;
    lambda = next;
    v.swap(w);
  }
  if (materialize) {
    Matrix A = materialize();
    return Eigen::EigenSolver<Matrix>(A).eigenvalues().cwiseAbs().maxCoeff();
  }
  throw std::runtime_error("power iteration did not converge within iteration budget");
}

// max_i rho(P E_i): the i-th block zeroes column i, modelling absorption at
// the target. Strictly below 1 for irreducible row-stochastic P.
inline double substochastic_spectral_radius(const TransitionMatrix& P, double tol = 1e-12,
                                            int max_iters = 10000) {
  const int n = P.size();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    auto apply = [&](const Vector& x) -> Vector {
      Vector masked = x;
      masked[i] = 0.0;
      return P.p * masked;
    };
    auto materialize = [&]() {
      Matrix A = P.p;
      A.col(i).setZero();
      return A;
    };
    worst = std::max(worst, nonnegative_spectral_radius(apply, n, materialize, tol, max_iters));
  }
  return worst;
}

// Block-companion form of the delayed dynamics.
struct AugmentedSystem {
  std::vector<Matrix> phi;  // Phi_1..Phi_{w_max}, each n^2 x n^2
  Matrix psi;               // materialized only when small enough

  bool psi_materialized() const { return psi.size() > 0; }
};

inline AugmentedSystem build_augmented_system(const TransitionMatrix& P, const WeightedDigraph& g,
                                              int max_psi_dim = 4096) {
  const int n = g.node_count();
  const int w_max = g.max_travel_time();
  const int n2 = n * n;
  AugmentedSystem sys;
  sys.phi.assign(static_cast<size_t>(w_max), Matrix::Zero(n2, n2));
  // vec is column-major: index J*n + a <-> entry (a, J).
  for (const Edge& e : g.edges()) {
    Matrix& phi = sys.phi[static_cast<size_t>(e.w - 1)];
    const double p = P.p(e.u, e.v);
    for (int J = 0; J < n; ++J)
      if (J != e.v) phi(J * n + e.u, J * n + e.v) += p;
  }
  const int dim = w_max * n2;
  if (dim <= max_psi_dim) {
    sys.psi = Matrix::Zero(dim, dim);
    for (int h = 0; h < w_max; ++h) sys.psi.block(0, h * n2, n2, n2) = sys.phi[h];
    for (int h = 1; h < w_max; ++h)
      sys.psi.block(h * n2, (h - 1) * n2, n2, n2) = Matrix::Identity(n2, n2);
  }
  return sys;
}

// rho(Psi) for the block-companion operator, applied matrix-free.
inline double augmented_spectral_radius(const TransitionMatrix& P, const WeightedDigraph& g,
                                        double tol = 1e-12, int max_iters = 10000) {
  const int n = g.node_count();
  const int w_max = g.max_travel_time();
  const int n2 = n * n;
  const int dim = w_max * n2;
  std::vector<Matrix> blocks(static_cast<size_t>(w_max));
  Matrix top(n, n);
  auto apply = [&](const Vector& x) -> Vector {
    for (int h = 0; h < w_max; ++h)
      blocks[static_cast<size_t>(h)] =
          Eigen::Map<const Matrix>(x.data() + h * n2, n, n);  // block h ~ delay h+1
    top.setZero();
    delayed_coupling_into(top, P.p, g,
                          [&](int w) -> const Matrix* { return &blocks[static_cast<size_t>(w - 1)]; });
    Vector y(dim);
    Eigen::Map<Matrix>(y.data(), n, n) = top;
    for (int h = 1; h < w_max; ++h)
      y.segment(h * n2, n2) = x.segment((h - 1) * n2, n2);
    return y;
  };
  std::function<Matrix()> materialize;
  if (dim <= 4096)
    materialize = [&P, &g]() { return build_augmented_system(P, g).psi; };
  return nonnegative_spectral_radius(apply, dim, materialize, tol, max_iters);
}

// Expected first hitting times. Per target j, E[T_.j] solves
// (I - P E_j) x = r with r_i = sum_h p_ih w_ih.
inline Matrix mean_first_passage(const TransitionMatrix& P, const WeightedDigraph& g) {
  const int n = g.node_count();
  Vector r = Vector::Zero(n);
  for (const Edge& e : g.edges()) r[e.u] += P.p(e.u, e.v) * e.w;
  Matrix M(n, n);
  Matrix I = Matrix::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    Matrix A = P.p;
    A.col(j).setZero();
    Eigen::FullPivLU<Matrix> lu(I - A);
    if (!lu.isInvertible())
      throw std::runtime_error("mean_first_passage: singular system for target " +
                               std::to_string(j));
    Vector x = lu.solve(r);
    // every passage takes at least one time unit; anything else means the
    // solve degenerated near a reducible chain
    if (!x.allFinite() || x.minCoeff() < 0.5)
      throw std::runtime_error("mean_first_passage: ill-conditioned system for target " +
                               std::to_string(j));
    M.col(j) = x;
  }
  return M;
}

}  // namespace patrol
