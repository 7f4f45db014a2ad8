#pragma once

// Test-only reference computations. Nothing here calls the solvers it is
// used to check; the LASS oracle enumerates support patterns and certifies
// KKT points directly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lass/types.hpp"

namespace lass::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  Index index(Index lo, Index hi) {  // inclusive
    return std::uniform_int_distribution<Index>(lo, hi)(engine_);
  }

  VectorXd normal_vector(Index n, double scale = 1.0) {
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal(0.0, scale);
    return v;
  }
  MatrixXd uniform_matrix(Index rows, Index cols, double lo = 0.0, double hi = 1.0) {
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }
  // Symmetric, positive off-diagonal, zero diagonal.
  MatrixXd affinities(Index n, double lo = 0.05, double hi = 1.0) {
    MatrixXd W = MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) W(i, j) = W(j, i) = uniform(lo, hi);
    return W;
  }
  // Rows drawn uniformly-ish on the simplex (normalised exponentials).
  MatrixXd row_stochastic(Index rows, Index cols) {
    MatrixXd Z(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) Z(i, j) = -std::log(uniform(1e-12, 1.0));
      Z.row(i) /= Z.row(i).sum();
    }
    return Z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline MatrixXd laplacian_of(const MatrixXd& W) {
  MatrixXd L = -W;
  L.diagonal() += W.rowwise().sum();
  return L;
}

struct QpSolution {
  MatrixXd Z;
  double objective = std::numeric_limits<double>::infinity();
};

// Global minimiser of lambda tr(Z^T L Z) - tr(B^T Z) over row-stochastic Z.
// Enumerates every combination of nonempty row supports, solves the KKT
// equations restricted to that pattern and returns the first point that is
// primal and dual feasible (any KKT point of a convex QP is optimal).
inline std::optional<QpSolution> lass_qp_oracle(const MatrixXd& L, const MatrixXd& B, double lambda) {
  const Index n = B.rows();
  const Index k = B.cols();
  const std::uint32_t patterns_per_row = (std::uint32_t{1} << k) - 1;
  std::vector<std::uint32_t> support(static_cast<std::size_t>(n), 1);
  const double tol = 1e-9;

  while (true) {
    // Unknowns: z_nk on the support (row-major), then one multiplier per row.
    std::vector<std::pair<Index, Index>> vars;
    Eigen::MatrixXi slot = Eigen::MatrixXi::Constant(n, k, -1);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < k; ++c)
        if (support[static_cast<std::size_t>(r)] & (1u << c)) {
          slot(r, c) = static_cast<int>(vars.size());
          vars.emplace_back(r, c);
        }
    const Index nv = static_cast<Index>(vars.size());
    const Index size = nv + n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    // Stationarity: 2 lambda sum_m L_rm z_mc - b_rc - mu_r = 0 on the support.
    for (Index e = 0; e < nv; ++e) {
      const auto [r, c] = vars[static_cast<std::size_t>(e)];
      for (Index m = 0; m < n; ++m)
        if (slot(m, c) >= 0) A(e, slot(m, c)) += 2.0 * lambda * L(r, m);
      A(e, nv + r) = -1.0;
      rhs(e) = B(r, c);
    }
    // Row sums.
    for (Index e = 0; e < nv; ++e) A(nv + vars[static_cast<std::size_t>(e)].first, e) = 1.0;
    rhs.tail(n).setOnes();

    const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    const bool solved = sol.allFinite() && (A * sol - rhs).lpNorm<Eigen::Infinity>() <= tol;
    if (solved && (sol.head(nv).array() >= -tol).all()) {
      MatrixXd Z = MatrixXd::Zero(n, k);
      for (Index e = 0; e < nv; ++e) {
        const auto [r, c] = vars[static_cast<std::size_t>(e)];
        Z(r, c) = std::max(sol(e), 0.0);
      }
      const MatrixXd grad = 2.0 * lambda * (L * Z) - B;
      bool dual = true;
      for (Index r = 0; r < n && dual; ++r)
        for (Index c = 0; c < k; ++c)
          if (slot(r, c) < 0 && grad(r, c) - sol(nv + r) < -tol) dual = false;
      if (dual) {
        QpSolution out;
        out.objective = lambda * Z.cwiseProduct(L * Z).sum() - B.cwiseProduct(Z).sum();
        out.Z = Z;
        return out;
      }
    }

    // Next pattern (mixed-radix counter over rows).
    Index r = 0;
    while (r < n && support[static_cast<std::size_t>(r)] == patterns_per_row) {
      support[static_cast<std::size_t>(r)] = 1;
      ++r;
    }
    if (r == n) return std::nullopt;
    ++support[static_cast<std::size_t>(r)];
  }
}

// Minimiser of 0.5 ||z - target||^2 over the grid {(s, 1 - s) : s = i * step}.
inline VectorXd grid_search_simplex2(const VectorXd& target, double step = 1e-3) {
  const auto count = static_cast<Index>(std::llround(1.0 / step));
  VectorXd best(2);
  double best_value = std::numeric_limits<double>::infinity();
  for (Index i = 0; i <= count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(count);
    const double value = 0.5 * (std::pow(s - target(0), 2) + std::pow(1.0 - s - target(1), 2));
    if (value < best_value) {
      best_value = value;
      best << s, 1.0 - s;
    }
  }
  return best;
}

// Central-difference directional derivative of f at Z along E.
template <class F>
double central_difference(F&& f, const MatrixXd& Z, const MatrixXd& E, double h) {
  return (f(Z + h * E) - f(Z - h * E)) / (2.0 * h);
}

}  // namespace lass::testing
