#pragma once
// Euclidean projection onto the feasible set. The pattern zeros make the
// free variables exactly the edge entries; the remaining constraints split
// into an affine part (row sums, stationarity) projected in closed form via
// a pseudo-inverse factored once per spec, and a box part (entries >= eps).
// Dykstra's alternating scheme combines the two.

#include "patrol/graph.hpp"
#include "patrol/rng.hpp"

#include <sstream>

namespace patrol {

class FeasibleProjector {
 public:
  explicit FeasibleProjector(const FeasibleSetSpec& spec)
      : edges_(spec.graph.edges()), eps_(spec.eps), n_(spec.graph.node_count()),
        m_(spec.graph.edge_count()) {
    // Row-sum constraints plus stationarity for all but the last node; that
    // last one is implied by the others.
    const int rows = 2 * n_ - 1;
    Matrix C = Matrix::Zero(rows, m_);
    Vector d = Vector::Zero(rows);
    const Vector& pi = spec.pi.vec();
    for (int t = 0; t < m_; ++t) {
      const Edge& e = edges_[static_cast<size_t>(t)];
      C(e.u, t) = 1.0;
      if (e.v < n_ - 1) C(n_ + e.v, t) = pi[e.u];
    }
    d.head(n_).setOnes();
    for (int v = 0; v + 1 < n_; ++v) d[n_ + v] = pi[v];
    C_ = C;
    d_ = d;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(C);
    pinv_ = cod.pseudoInverse();
  }

  int variable_count() const { return m_; }

  Vector to_variables(const Matrix& Q) const {
    Vector x(m_);
    for (int t = 0; t < m_; ++t) {
      const Edge& e = edges_[static_cast<size_t>(t)];
      x[t] = Q(e.u, e.v);
    }
    return x;
  }

  Matrix to_matrix(const Vector& x) const {
    Matrix P = Matrix::Zero(n_, n_);
    for (int t = 0; t < m_; ++t) {
      const Edge& e = edges_[static_cast<size_t>(t)];
      P(e.u, e.v) = x[t];
    }
    return P;
  }

  Vector affine_project(const Vector& x) const { return x - pinv_ * (C_ * x - d_); }

  Vector box_project(const Vector& x) const { return x.cwiseMax(eps_); }

  // Euclidean projection of Q onto the feasible set (off-pattern entries of
  // Q are ignored; they project to zero). Stops only when the iterate both
  // stalls and satisfies the affine constraints; the max-norm change alone
  // can dip below tol long before far-out points have been pulled in.
  TransitionMatrix project(const Matrix& Q, double tol = 1e-10, int max_rounds = 20000) const {
    if (Q.rows() != n_ || Q.cols() != n_)
      throw std::invalid_argument("project_feasible: dimension mismatch");
    Vector x = to_variables(Q);
    Vector p = Vector::Zero(m_);
    Vector q = Vector::Zero(m_);
    double residual = 0.0;
    for (int round = 0; round < max_rounds; ++round) {
      Vector y = affine_project(x + p);
      p = x + p - y;
      Vector xn = box_project(y + q);
      q = y + q - xn;
      const double change = (xn - x).cwiseAbs().maxCoeff();
      x = xn;
      if (round > 0 && change < tol) {
        residual = (C_ * x - d_).cwiseAbs().maxCoeff();
        if (residual < 1e-9) return TransitionMatrix(to_matrix(x));
      }
    }
    residual = (C_ * x - d_).cwiseAbs().maxCoeff();
    std::ostringstream msg;
    msg << "project_feasible: Dykstra did not converge in " << max_rounds
        << " rounds (affine residual " << residual
        << "); the feasible set may be empty or degenerate";
    throw std::runtime_error(msg.str());
  }

  const Matrix& constraint_matrix() const { return C_; }
  const Vector& constraint_rhs() const { return d_; }
  double eps() const { return eps_; }

 private:
  std::vector<Edge> edges_;
  double eps_;
  int n_, m_;
  Matrix C_;
  Vector d_;
  Matrix pinv_;
};

inline TransitionMatrix project_feasible(const Matrix& Q, const FeasibleSetSpec& spec) {
  return FeasibleProjector(spec).project(Q);
}

// Projection of a uniformly random masked matrix; deterministic in seed.
inline TransitionMatrix random_feasible_chain(const FeasibleSetSpec& spec, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int n = spec.graph.node_count();
  Matrix Q = Matrix::Zero(n, n);
  for (const Edge& e : spec.graph.edges()) Q(e.u, e.v) = rng.next_double();
  return project_feasible(Q, spec);
}

}  // namespace patrol
