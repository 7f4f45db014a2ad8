#pragma once

// Euclidean projection onto the scaled probability simplex
//
//   min_x 0.5 * ||x - y||^2   s.t.  sum(x) = a,  x >= 0.
//
// The solution always has the form x_i = max(y_i + lambda, 0) for a scalar
// shift lambda chosen so that the thresholded entries sum to a. The routines
// below differ only in how lambda is found:
//
//   project_sort             sort descending, scan all D prefix tests
//   project_sort_early_exit  same scan, stops at the first failing test
//   project_bisection        bisection on the monotone map lambda -> sum(x)
//   project_michelot         alternating projection with shrinking support
//   brute_force_oracle       enumerate every support set (D <= 16)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lass/errors.hpp"
#include "lass/types.hpp"

namespace lass {

template <class Scalar>
struct SimplexSpec {
  Index dimension = 1;
  Scalar scale = Scalar(1);

  void validate() const {
    if (dimension < 1) {
      throw InvalidArgument("simplex dimension must be >= 1, got " + std::to_string(dimension));
    }
    if (!(scale > Scalar(0)) || !std::isfinite(static_cast<double>(scale))) {
      throw InvalidArgument("simplex scale must be a finite positive number");
    }
  }
};

template <class Scalar>
SimplexSpec<Scalar> simplex(Index dimension, Scalar scale = Scalar(1)) {
  return SimplexSpec<Scalar>{dimension, scale};
}

template <class Scalar>
struct ProjectionReport {
  Vector<Scalar> x;
  // Number of strictly positive components of x.
  Index rho = 0;
  // Shift such that x = max(y + lambda, 0).
  Scalar lambda = Scalar(0);
  Mask active;
  // Passes (Michelot) or bisection steps; 0 for the sort-based routines.
  Index iterations = 0;
};

// Worst violation of each KKT condition; stationarity is measured with the
// inequality multipliers reconstructed as beta_i = x_i - y_i - lambda.
template <class Scalar>
struct KktReport {
  Scalar stationarity_residual = Scalar(0);
  Scalar primal_feasibility_violation = Scalar(0);
  Scalar dual_feasibility_violation = Scalar(0);
  Scalar complementarity_residual = Scalar(0);

  Scalar max_residual() const {
    return std::max({stationarity_residual, primal_feasibility_violation,
                     dual_feasibility_violation, complementarity_residual});
  }
};

// Absolute tolerance for feasibility / KKT assertions: 1e-9 scaled by the
// magnitude of the problem data.
template <class Derived>
typename Derived::Scalar kkt_tolerance(const Eigen::MatrixBase<Derived>& y,
                                       typename Derived::Scalar scale) {
  using Scalar = typename Derived::Scalar;
  const Scalar ymax = y.size() > 0 ? y.cwiseAbs().maxCoeff() : Scalar(0);
  return Scalar(1e-9) * std::max({Scalar(1), scale, ymax});
}

namespace detail {

template <class Derived>
void validate_projection_input(const Eigen::MatrixBase<Derived>& y,
                               const SimplexSpec<typename Derived::Scalar>& spec) {
  spec.validate();
  if (y.cols() != 1 && y.rows() != 1) {
    throw DimensionMismatch("projection input must be a vector, got " +
                            shape_string(y.rows(), y.cols()));
  }
  if (y.size() != spec.dimension) {
    throw DimensionMismatch("projection input has length " + std::to_string(y.size()) +
                            " but the simplex has dimension " + std::to_string(spec.dimension));
  }
  for (Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(static_cast<double>(y(i)))) {
      throw NonFiniteInput("non-finite projection input at index " + std::to_string(i), {}, i);
    }
  }
}

template <class Derived, class Scalar = typename Derived::Scalar>
ProjectionReport<Scalar> threshold_at(const Eigen::MatrixBase<Derived>& y, Scalar lambda, Index rho) {
  ProjectionReport<Scalar> report;
  report.x.resize(y.size());
  for (Index i = 0; i < y.size(); ++i) report.x(i) = std::max(y(i) + lambda, Scalar(0));
  report.active = report.x.array() > Scalar(0);
  report.rho = rho;
  report.lambda = lambda;
  return report;
}

template <class Scalar>
ProjectionReport<Scalar> project_single(const Vector<Scalar>& y, Scalar scale) {
  ProjectionReport<Scalar> report;
  report.x = Vector<Scalar>::Constant(1, scale);
  report.rho = 1;
  report.lambda = scale - y(0);
  report.active = Mask::Constant(1, true);
  return report;
}

template <class Derived>
Vector<typename Derived::Scalar> as_column(const Eigen::MatrixBase<Derived>& y) {
  Vector<typename Derived::Scalar> v(y.size());
  for (Index i = 0; i < y.size(); ++i) v(i) = y(i);
  return v;
}

}  // namespace detail

// Sort-based projection. Sorts y descending into u, takes rho as the largest
// j with u_j + (a - sum_{i<=j} u_i) / j > 0 and lambda = (a - sum_{i<=rho} u_i) / rho.
template <class Derived>
ProjectionReport<typename Derived::Scalar> project_sort(
    const Eigen::MatrixBase<Derived>& y, const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  detail::validate_projection_input(y, spec);
  const Index dim = y.size();
  const Scalar a = spec.scale;
  if (dim == 1) return detail::project_single(detail::as_column(y), a);

  std::vector<Scalar> u(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) u[static_cast<std::size_t>(i)] = y(i);
  std::sort(u.begin(), u.end(), std::greater<Scalar>());

  // The j = 1 test equals a > 0 in exact arithmetic, so rho >= 1 always.
  Index rho = 1;
  Scalar prefix = Scalar(0);
  Scalar prefix_at_rho = u[0];
  for (Index j = 1; j <= dim; ++j) {
    prefix += u[j - 1];
    const Scalar test = u[j - 1] + (a - prefix) / static_cast<Scalar>(j);
    if (test > Scalar(0)) {
      rho = j;
      prefix_at_rho = prefix;
    }
  }
  const Scalar lambda = (a - prefix_at_rho) / static_cast<Scalar>(rho);
  return detail::threshold_at(y, lambda, rho);
}

template <class Derived>
ProjectionReport<typename Derived::Scalar> project_sort(const Eigen::MatrixBase<Derived>& y) {
  return project_sort(y, simplex<typename Derived::Scalar>(y.size()));
}

// Same contract as project_sort. The candidate lambda_j = (a - sum_{i<=j} u_i) / j
// is accepted as soon as u_{j+1} + lambda_j <= 0. Sorted values are drawn lazily
// from a max-heap, so only the rho + 1 largest entries are ever ordered.
template <class Derived>
ProjectionReport<typename Derived::Scalar> project_sort_early_exit(
    const Eigen::MatrixBase<Derived>& y, const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  detail::validate_projection_input(y, spec);
  const Vector<Scalar> values = detail::as_column(y);
  const Index dim = values.size();
  const Scalar a = spec.scale;
  if (dim == 1) return detail::project_single(values, a);

  std::vector<Scalar> heap(values.data(), values.data() + dim);
  std::make_heap(heap.begin(), heap.end());
  auto pop_max = [&heap]() {
    std::pop_heap(heap.begin(), heap.end());
    const Scalar top = heap.back();
    heap.pop_back();
    return top;
  };

  Index j = 1;
  Scalar prefix = pop_max();
  while (j < dim) {
    const Scalar next = pop_max();
    const Scalar lambda_j = (a - prefix) / static_cast<Scalar>(j);
    if (next + lambda_j <= Scalar(0)) break;
    prefix += next;
    ++j;
  }
  const Scalar lambda = (a - prefix) / static_cast<Scalar>(j);
  return detail::threshold_at(values, lambda, j);
}

// Solves sum_i max(y_i + lambda, 0) = a for lambda by bisection. The bracket
// [a/D - max y, a/D - min y] always contains the root: at the left end every
// entry is at most a/D, at the right end every entry is at least a/D.
template <class Derived>
ProjectionReport<typename Derived::Scalar> project_bisection(
    const Eigen::MatrixBase<Derived>& y, const SimplexSpec<typename Derived::Scalar>& spec,
    typename Derived::Scalar tol) {
  using Scalar = typename Derived::Scalar;
  if (!(tol > Scalar(0))) throw InvalidArgument("bisection tolerance must be positive");
  detail::validate_projection_input(y, spec);
  const Vector<Scalar> values = detail::as_column(y);
  const Index dim = values.size();
  const Scalar a = spec.scale;

  auto pile = [&values](Scalar lambda) {
    return (values.array() + lambda).max(Scalar(0)).sum();
  };

  const Scalar base = a / static_cast<Scalar>(dim);
  Scalar lo = base - values.maxCoeff();
  Scalar hi = base - values.minCoeff();
  const Scalar slack = kkt_tolerance(values, a) * static_cast<Scalar>(dim);
  if (pile(lo) > a + slack || pile(hi) < a - slack) {
    throw std::logic_error("project_bisection: invalid initial bracket");
  }

  Index steps = 0;
  while (hi - lo > tol && steps < 4096) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (pile(mid) < a) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++steps;
  }
  const Scalar lambda = lo + (hi - lo) / Scalar(2);
  auto report = detail::threshold_at(values, lambda, 0);
  report.rho = report.active.count();
  report.iterations = steps;
  return report;
}

// Michelot's finite algorithm: project onto the hyperplane sum(x) = a restricted
// to the current support, drop every coordinate that came out negative, repeat.
// lambda grows monotonically, so dropped coordinates never return and the loop
// ends after at most D passes.
template <class Derived>
ProjectionReport<typename Derived::Scalar> project_michelot(
    const Eigen::MatrixBase<Derived>& y, const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  detail::validate_projection_input(y, spec);
  const Vector<Scalar> values = detail::as_column(y);
  const Index dim = values.size();
  const Scalar a = spec.scale;

  std::vector<Index> support(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) support[static_cast<std::size_t>(i)] = i;

  Scalar lambda = Scalar(0);
  Index passes = 0;
  while (true) {
    ++passes;
    Scalar total = Scalar(0);
    for (Index i : support) total += values(i);
    lambda = (a - total) / static_cast<Scalar>(support.size());
    const auto kept = std::remove_if(support.begin(), support.end(),
                                     [&](Index i) { return values(i) + lambda < Scalar(0); });
    if (kept == support.end()) break;
    support.erase(kept, support.end());
  }

  ProjectionReport<Scalar> report;
  report.x = Vector<Scalar>::Zero(dim);
  for (Index i : support) report.x(i) = std::max(values(i) + lambda, Scalar(0));
  report.active = report.x.array() > Scalar(0);
  report.rho = report.active.count();
  report.lambda = lambda;
  report.iterations = passes;
  return report;
}

template <class DerivedY, class Scalar>
KktReport<Scalar> kkt_check(const Eigen::MatrixBase<DerivedY>& y,
                            const ProjectionReport<Scalar>& report,
                            const SimplexSpec<Scalar>& spec) {
  if (report.x.size() != y.size()) {
    throw DimensionMismatch("kkt_check: x has length " + std::to_string(report.x.size()) +
                            ", y has length " + std::to_string(y.size()));
  }
  const Index dim = y.size();
  KktReport<Scalar> out;
  Scalar sum = Scalar(0);
  for (Index i = 0; i < dim; ++i) {
    const Scalar xi = report.x(i);
    const Scalar yi = static_cast<Scalar>(y(i));
    const Scalar beta = xi - yi - report.lambda;
    sum += xi;
    out.stationarity_residual =
        std::max(out.stationarity_residual, std::abs(xi - yi - report.lambda - beta));
    out.primal_feasibility_violation = std::max(out.primal_feasibility_violation, -xi);
    out.dual_feasibility_violation = std::max(out.dual_feasibility_violation, -beta);
    out.complementarity_residual = std::max(out.complementarity_residual, std::abs(xi * beta));
  }
  out.primal_feasibility_violation =
      std::max(out.primal_feasibility_violation, std::abs(sum - spec.scale));
  return out;
}

// Exhaustive reference solution: tries every nonempty support S, solves the
// equality-constrained problem on S and keeps the KKT point closest to y.
// Exponential in D, restricted to D <= 16.
template <class Derived>
Vector<typename Derived::Scalar> brute_force_oracle(
    const Eigen::MatrixBase<Derived>& y, const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  constexpr Index kMaxDimension = 16;
  detail::validate_projection_input(y, spec);
  const Index dim = y.size();
  if (dim > kMaxDimension) {
    throw InvalidArgument("brute_force_oracle: dimension " + std::to_string(dim) +
                          " exceeds the limit of " + std::to_string(kMaxDimension));
  }
  const Vector<Scalar> values = detail::as_column(y);
  const Scalar a = spec.scale;
  const Scalar tol = Scalar(1e-12) * std::max({Scalar(1), a, values.cwiseAbs().maxCoeff()});

  Vector<Scalar> best;
  Scalar best_distance = std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> fallback;
  Scalar fallback_distance = std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> candidate(dim);

  const std::uint32_t last = (std::uint32_t{1} << dim) - 1;
  for (std::uint32_t mask = 1; mask <= last; ++mask) {
    Scalar total = Scalar(0);
    Index count = 0;
    for (Index i = 0; i < dim; ++i) {
      if (mask & (std::uint32_t{1} << i)) {
        total += values(i);
        ++count;
      }
    }
    const Scalar shift = (a - total) / static_cast<Scalar>(count);
    bool primal = true;
    bool dual = true;
    for (Index i = 0; i < dim; ++i) {
      const Scalar shifted = values(i) + shift;
      if (mask & (std::uint32_t{1} << i)) {
        if (shifted < -tol) primal = false;
        candidate(i) = std::max(shifted, Scalar(0));
      } else {
        if (shifted > tol) dual = false;
        candidate(i) = Scalar(0);
      }
    }
    if (!primal) continue;
    const Scalar distance = (candidate - values).squaredNorm();
    if (dual && distance < best_distance) {
      best_distance = distance;
      best = candidate;
    }
    if (distance < fallback_distance) {
      fallback_distance = distance;
      fallback = candidate;
    }
  }
  // Roundoff can in principle reject every exact KKT point; the closest
  // feasible candidate is then the minimiser.
  return best.size() == dim ? best : fallback;
}

}  // namespace lass
