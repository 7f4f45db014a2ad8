#pragma once

// Laplacian assignment (LASS) training problem
//
//   min_Z  lambda * tr(Z^T L Z) - tr(B^T Z)   s.t.  Z 1 = 1,  Z >= 0,
//
// solved by gradient projection. The feasible set separates over rows, so each
// projection step is one simplex projection per row (project_rows).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lass/batch.hpp"
#include "lass/errors.hpp"
#include "lass/types.hpp"

namespace lass {

template <class Scalar>
struct SolverConfig {
  Scalar lambda_reg = Scalar(1);
  Index max_iter = 10000;
  Scalar grad_tol = Scalar(1e-7);
  bool accelerated = false;
  std::optional<Scalar> step_size;
  // Called with (iteration, Z) after every accepted iterate.
  std::function<void(Index, const Matrix<Scalar>&)> on_iterate;

  void validate() const {
    if (!(lambda_reg >= Scalar(0)) || !std::isfinite(static_cast<double>(lambda_reg))) {
      throw InvalidArgument("lambda_reg must be finite and nonnegative");
    }
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
    if (!(grad_tol > Scalar(0))) throw InvalidArgument("grad_tol must be positive");
    if (step_size && !(*step_size > Scalar(0))) throw InvalidArgument("step_size must be positive");
  }
};

template <class Scalar>
struct SolveTrace {
  // Objective at Z0 followed by the objective after every accepted iterate.
  std::vector<Scalar> objective_per_iter;
  Index iterations = 0;
  bool converged = false;
  Scalar final_projected_gradient_norm = Scalar(0);
  // Step length in use when the solver stopped (after any halvings).
  Scalar step_size = Scalar(0);
};

template <class Scalar>
struct LassSolution {
  Matrix<Scalar> Z;
  SolveTrace<Scalar> trace;
};

namespace detail {

template <class DL, class DZ, class DB>
void check_lass_shapes(const Eigen::MatrixBase<DL>& L, const Eigen::MatrixBase<DZ>& Z,
                       const Eigen::MatrixBase<DB>& B, const char* where) {
  if (L.rows() != L.cols() || L.rows() != Z.rows() || Z.rows() != B.rows() ||
      Z.cols() != B.cols()) {
    throw DimensionMismatch(std::string(where) + ": L " + shape_string(L.rows(), L.cols()) +
                            ", Z " + shape_string(Z.rows(), Z.cols()) + ", B " +
                            shape_string(B.rows(), B.cols()));
  }
}

}  // namespace detail

// True when every row is nonnegative and sums to 1 within `tol`.
template <class Derived>
bool is_row_stochastic(const Eigen::MatrixBase<Derived>& Z,
                       typename Derived::Scalar tol = typename Derived::Scalar(1e-8)) {
  using Scalar = typename Derived::Scalar;
  if (Z.rows() < 1 || Z.cols() < 1 || !Z.allFinite()) return false;
  if ((Z.array() < Scalar(0)).any()) return false;
  return ((Z.rowwise().sum().array() - Scalar(1)).abs() <= tol).all();
}

template <class DZ, class DL, class DB>
typename DZ::Scalar lass_objective(const Eigen::MatrixBase<DZ>& Z, const Eigen::MatrixBase<DL>& L,
                                   const Eigen::MatrixBase<DB>& B, typename DZ::Scalar lambda_reg) {
  detail::check_lass_shapes(L, Z, B, "lass_objective");
  return lambda_reg * Z.cwiseProduct(L * Z).sum() - B.cwiseProduct(Z).sum();
}

// 2 lambda L Z - B; L is symmetric.
template <class DZ, class DL, class DB>
Matrix<typename DZ::Scalar> lass_gradient(const Eigen::MatrixBase<DZ>& Z,
                                          const Eigen::MatrixBase<DL>& L,
                                          const Eigen::MatrixBase<DB>& B,
                                          typename DZ::Scalar lambda_reg) {
  using Scalar = typename DZ::Scalar;
  detail::check_lass_shapes(L, Z, B, "lass_gradient");
  Matrix<Scalar> grad = (Scalar(2) * lambda_reg) * (L * Z);
  grad -= B;
  return grad;
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration, started
// from a fixed non-constant vector so the result is deterministic.
template <class Derived>
typename Derived::Scalar laplacian_max_eigenvalue(const Eigen::MatrixBase<Derived>& L,
                                                  Index max_iter = 50,
                                                  typename Derived::Scalar tol =
                                                      typename Derived::Scalar(1e-8)) {
  using Scalar = typename Derived::Scalar;
  const Index n = L.rows();
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v(i) = std::cos(Scalar(1.7) * static_cast<Scalar>(i) + Scalar(0.3));
  v.normalize();
  Scalar estimate = v.dot(L * v);
  for (Index it = 0; it < max_iter; ++it) {
    Vector<Scalar> w = L * v;
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    v = w / norm;
    const Scalar next = v.dot(L * v);
    const bool done = std::abs(next - estimate) <= tol * std::max(Scalar(1), std::abs(next));
    estimate = next;
    if (done) break;
  }
  return std::max(estimate, Scalar(0));
}

// 1 / (2 lambda lambda_max(L)), the inverse Lipschitz constant of the gradient.
// A linear objective (lambda = 0 or L = 0) has no curvature; a unit step is used.
template <class DL, class Scalar>
Scalar lass_step_size(const Eigen::MatrixBase<DL>& L, const SolverConfig<Scalar>& cfg) {
  if (cfg.step_size) return *cfg.step_size;
  const Scalar lipschitz = Scalar(2) * cfg.lambda_reg * laplacian_max_eigenvalue(L);
  return lipschitz > Scalar(0) ? Scalar(1) / lipschitz : Scalar(1);
}

// ||Z - P(Z - step * grad)||_F / step. Zero exactly at KKT points of the QP.
template <class DZ, class DL, class DB>
typename DZ::Scalar natural_residual(const Eigen::MatrixBase<DZ>& Z, const Eigen::MatrixBase<DL>& L,
                                     const Eigen::MatrixBase<DB>& B,
                                     typename DZ::Scalar lambda_reg, typename DZ::Scalar step) {
  using Scalar = typename DZ::Scalar;
  const Matrix<Scalar> moved = Z - step * lass_gradient(Z, L, B, lambda_reg);
  return (Z - project_rows(moved)).norm() / step;
}

template <class DZ, class DL, class DB, class Scalar>
Scalar projected_gradient_norm(const Eigen::MatrixBase<DZ>& Z, const Eigen::MatrixBase<DL>& L,
                               const Eigen::MatrixBase<DB>& B, const SolverConfig<Scalar>& cfg) {
  cfg.validate();
  detail::check_lass_shapes(L, Z, B, "projected_gradient_norm");
  if (!is_row_stochastic(Z)) throw InvalidArgument("projected_gradient_norm: Z is not feasible");
  return natural_residual(Z, L, B, cfg.lambda_reg, lass_step_size(L, cfg));
}

template <class Scalar>
Matrix<Scalar> uniform_assignments(Index rows, Index clusters) {
  return Matrix<Scalar>::Constant(rows, clusters, Scalar(1) / static_cast<Scalar>(clusters));
}

// Gradient projection with a fixed step, halved whenever a step would raise
// the objective. The accelerated variant extrapolates with Nesterov momentum
// and restarts from a plain step whenever the extrapolated iterate is worse,
// so in both modes the recorded objective never increases.
template <class Scalar, class DL, class DB>
LassSolution<Scalar> solve_lass(const Matrix<Scalar>& Z0, const Eigen::MatrixBase<DL>& L,
                                const Eigen::MatrixBase<DB>& B, const SolverConfig<Scalar>& cfg) {
  cfg.validate();
  detail::check_lass_shapes(L, Z0, B, "solve_lass");
  if (!is_row_stochastic(Z0)) {
    throw InvalidArgument("solve_lass: initial assignments are not row-stochastic");
  }
  const Scalar lambda = cfg.lambda_reg;
  const Matrix<Scalar> Lm = L;
  const Matrix<Scalar> Bm = B;
  auto objective = [&](const Matrix<Scalar>& Z) { return lass_objective(Z, Lm, Bm, lambda); };
  auto step_from = [&](const Matrix<Scalar>& Z, Scalar step) {
    const Matrix<Scalar> moved = Z - step * lass_gradient(Z, Lm, Bm, lambda);
    return project_rows(moved);
  };
  auto increased = [](Scalar next, Scalar current) {
    return next > current + Scalar(1e-14) * std::max(Scalar(1), std::abs(current));
  };
  constexpr int kMaxHalvings = 40;

  LassSolution<Scalar> out;
  SolveTrace<Scalar>& trace = out.trace;
  Scalar step = lass_step_size(Lm, cfg);
  Matrix<Scalar> Z = Z0;
  Matrix<Scalar> Z_prev = Z0;
  Scalar f = objective(Z);
  Scalar momentum = Scalar(1);
  trace.objective_per_iter.push_back(f);

  Scalar residual = natural_residual(Z, Lm, Bm, lambda, step);
  if (residual <= cfg.grad_tol) {
    trace.converged = true;
  } else {
    for (Index it = 1; it <= cfg.max_iter; ++it) {
      Matrix<Scalar> candidate;
      Scalar f_candidate;
      Scalar next_momentum = Scalar(1);
      bool plain = true;
      if (cfg.accelerated) {
        next_momentum = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * momentum * momentum)) / Scalar(2);
        const Scalar beta = (momentum - Scalar(1)) / next_momentum;
        const Matrix<Scalar> extrapolated = Z + beta * (Z - Z_prev);
        candidate = step_from(extrapolated, step);
        f_candidate = objective(candidate);
        plain = increased(f_candidate, f);
        if (plain) next_momentum = Scalar(1);
      }
      if (plain) {
        candidate = step_from(Z, step);
        f_candidate = objective(candidate);
        int halvings = 0;
        while (increased(f_candidate, f) && halvings < kMaxHalvings) {
          step /= Scalar(2);
          candidate = step_from(Z, step);
          f_candidate = objective(candidate);
          ++halvings;
        }
        if (increased(f_candidate, f)) break;  // stalled at roundoff level
      }
      Z_prev = std::move(Z);
      Z = std::move(candidate);
      f = f_candidate;
      momentum = next_momentum;
      trace.objective_per_iter.push_back(f);
      trace.iterations = it;
      if (cfg.on_iterate) cfg.on_iterate(it, Z);
      residual = natural_residual(Z, Lm, Bm, lambda, step);
      if (residual <= cfg.grad_tol) {
        trace.converged = true;
        break;
      }
    }
  }
  trace.final_projected_gradient_norm = residual;
  trace.step_size = step;
  out.Z = std::move(Z);
  return out;
}

}  // namespace lass
