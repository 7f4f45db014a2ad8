#pragma once

// Laplacian K-modes clustering
//
//   min_{Z,C}  (lambda/2) sum_{m,n} w_mn ||z_m - z_n||^2 - sum_{n,k} z_nk G(||(x_n - c_k)/sigma||^2)
//
// over row-stochastic Z, by alternating a LASS solve in Z (C fixed) with a
// mean-shift update of the modes C (Z fixed). New points are assigned by
// projecting zbar + gamma g onto the simplex with the training Z and C frozen.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lass/errors.hpp"
#include "lass/graph.hpp"
#include "lass/lass_solver.hpp"
#include "lass/projection.hpp"
#include "lass/types.hpp"

namespace lass {

// G(t) = exp(-t/2): G(||(x - c)/sigma||^2) is the Gaussian kernel of width sigma.
template <class Scalar>
Scalar kernel_value(Scalar t) {
  if (!(t >= Scalar(0))) throw InvalidArgument("kernel argument must be nonnegative");
  return std::exp(-t / Scalar(2));
}

// b_nk = G(||x_n - c_k||^2 / sigma^2).
template <class DX, class DC>
Matrix<typename DX::Scalar> similarity_matrix(const Eigen::MatrixBase<DX>& points,
                                              const Eigen::MatrixBase<DC>& modes,
                                              typename DX::Scalar sigma) {
  using Scalar = typename DX::Scalar;
  if (!(sigma > Scalar(0))) throw InvalidArgument("sigma must be positive");
  if (points.cols() != modes.cols()) {
    throw DimensionMismatch("similarity_matrix: points have " + std::to_string(points.cols()) +
                            " columns, modes have " + std::to_string(modes.cols()));
  }
  const Scalar inv_var = Scalar(1) / (sigma * sigma);
  Matrix<Scalar> B(points.rows(), modes.rows());
  for (Index n = 0; n < points.rows(); ++n) {
    for (Index k = 0; k < modes.rows(); ++k) {
      B(n, k) = kernel_value((points.row(n) - modes.row(k)).squaredNorm() * inv_var);
    }
  }
  return B;
}

template <class Scalar>
struct GraphConfig {
  Scalar bandwidth = Scalar(1);
  std::optional<Index> knn;
};

template <class Scalar>
struct ClusterModel {
  Matrix<Scalar> modes;  // K x D
  Scalar sigma = Scalar(1);
  Scalar lambda_reg = Scalar(1);
  Matrix<Scalar> Z;  // N x K training assignments
  GraphConfig<Scalar> graph_config;
  AffinityGraph<Scalar> graph;
  Matrix<Scalar> data;  // N x D training points

  Index clusters() const { return modes.rows(); }
  Index dimension() const { return data.cols(); }
  Index size() const { return data.rows(); }

  void validate() const {
    if (!(sigma > Scalar(0))) throw InvalidArgument("model sigma must be positive");
    if (!(lambda_reg >= Scalar(0))) throw InvalidArgument("model lambda_reg must be nonnegative");
    if (modes.cols() != data.cols() || Z.rows() != data.rows() || Z.cols() != modes.rows() ||
        graph.size() != data.rows()) {
      throw DimensionMismatch("cluster model components have inconsistent shapes");
    }
    if (!is_row_stochastic(Z)) throw InvalidArgument("model assignments are not row-stochastic");
  }
};

// K-modes objective with the pairwise smoothness penalty.
template <class Scalar>
Scalar kmodes_objective(const ClusterModel<Scalar>& model) {
  model.validate();
  const Matrix<Scalar> B = similarity_matrix(model.data, model.modes, model.sigma);
  return model.lambda_reg * pairwise_smoothness(model.graph.W, model.Z) - B.cwiseProduct(model.Z).sum();
}

// Weighted Gaussian mean shift, `steps` iterations per mode:
//   c <- sum_n q_n x_n / sum_n q_n,   q_n = z_nk exp(-||x_n - c||^2 / (2 sigma^2)).
// Each step does not decrease sum_n z_nk G(||(x_n - c_k)/sigma||^2). A cluster
// with total responsibility below 1e-12, or whose kernel weights all underflow,
// keeps its current mode.
template <class DX, class DZ, class DC>
Matrix<typename DX::Scalar> update_modes(const Eigen::MatrixBase<DX>& points,
                                         const Eigen::MatrixBase<DZ>& Z,
                                         const Eigen::MatrixBase<DC>& modes,
                                         typename DX::Scalar sigma, Index steps) {
  using Scalar = typename DX::Scalar;
  if (steps < 1) throw InvalidArgument("mode update needs steps >= 1");
  if (!(sigma > Scalar(0))) throw InvalidArgument("sigma must be positive");
  if (Z.rows() != points.rows() || Z.cols() != modes.rows() || modes.cols() != points.cols()) {
    throw DimensionMismatch("update_modes: inconsistent shapes");
  }
  constexpr Scalar kEmptyCluster = Scalar(1e-12);
  const Scalar inv_two_var = Scalar(1) / (Scalar(2) * sigma * sigma);
  Matrix<Scalar> out = modes;
  Vector<Scalar> weights(points.rows());
  for (Index k = 0; k < modes.rows(); ++k) {
    if (Z.col(k).sum() < kEmptyCluster) continue;
    for (Index s = 0; s < steps; ++s) {
      for (Index n = 0; n < points.rows(); ++n) {
        weights(n) = Z(n, k) * std::exp(-(points.row(n) - out.row(k)).squaredNorm() * inv_two_var);
      }
      const Scalar total = weights.sum();
      if (!(total > Scalar(0))) break;
      out.row(k) = (weights.transpose() * points) / total;
    }
  }
  return out;
}

template <class Scalar>
Matrix<Scalar> update_modes(const ClusterModel<Scalar>& model, Index steps) {
  return update_modes(model.data, model.Z, model.modes, model.sigma, steps);
}

// Maximin seeding: the first mode is the data point picked by `seed`, each
// further mode is the point farthest from those already chosen.
template <class Derived>
Matrix<typename Derived::Scalar> initial_modes(const Eigen::MatrixBase<Derived>& points,
                                               Index clusters, std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  const Index n = points.rows();
  if (clusters < 1 || clusters > n) {
    throw InvalidArgument("number of clusters must lie in [1, N]");
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> chosen{static_cast<Index>(rng() % static_cast<std::uint64_t>(n))};
  Vector<Scalar> nearest(n);
  for (Index i = 0; i < n; ++i) nearest(i) = (points.row(i) - points.row(chosen[0])).squaredNorm();
  while (static_cast<Index>(chosen.size()) < clusters) {
    Index far = 0;
    nearest.maxCoeff(&far);
    chosen.push_back(far);
    for (Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), (points.row(i) - points.row(far)).squaredNorm());
    }
  }
  Matrix<Scalar> modes(clusters, points.cols());
  for (Index k = 0; k < clusters; ++k) modes.row(k) = points.row(chosen[static_cast<std::size_t>(k)]);
  return modes;
}

template <class Scalar>
struct FitConfig {
  Index clusters = 2;
  Scalar sigma = Scalar(1);
  Scalar lambda_reg = Scalar(1);
  GraphConfig<Scalar> graph;
  // lambda_reg inside is overwritten by the field above.
  SolverConfig<Scalar> solver;
  Index outer_iters = 50;
  Index mode_steps = 10;
  // Outer loop stops once the objective decreases by less than this.
  Scalar objective_tol = Scalar(1e-8);
  std::uint64_t seed = 0;
  std::optional<Matrix<Scalar>> initial_modes;

  void validate() const {
    if (clusters < 1) throw InvalidArgument("K must be >= 1");
    if (!(sigma > Scalar(0))) throw InvalidArgument("sigma must be positive");
    if (!(lambda_reg > Scalar(0))) throw InvalidArgument("lambda_reg must be positive");
    if (outer_iters < 1) throw InvalidArgument("outer_iters must be >= 1");
    if (mode_steps < 1) throw InvalidArgument("mode_steps must be >= 1");
  }
};

template <class Scalar>
struct FitResult {
  ClusterModel<Scalar> model;
  // Objective at the initial (Z, C), then after each outer iteration.
  std::vector<Scalar> objective_trace;
  Index outer_iterations = 0;
  Index inner_iterations = 0;
  // Every Z-step met the solver's residual tolerance.
  bool converged = true;
};

template <class Derived>
FitResult<typename Derived::Scalar> fit(const Eigen::MatrixBase<Derived>& points,
                                        const FitConfig<typename Derived::Scalar>& cfg) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  if (cfg.clusters > points.rows()) throw InvalidArgument("K exceeds the number of points");

  FitResult<Scalar> result;
  ClusterModel<Scalar>& model = result.model;
  model.data = points;
  model.sigma = cfg.sigma;
  model.lambda_reg = cfg.lambda_reg;
  model.graph_config = cfg.graph;
  model.graph = gaussian_affinities(model.data, cfg.graph.bandwidth, cfg.graph.knn);
  if (cfg.initial_modes) {
    if (cfg.initial_modes->rows() != cfg.clusters || cfg.initial_modes->cols() != points.cols()) {
      throw DimensionMismatch("initial modes must be K x D");
    }
    model.modes = *cfg.initial_modes;
  } else {
    model.modes = initial_modes(model.data, cfg.clusters, cfg.seed);
  }
  model.Z = uniform_assignments<Scalar>(points.rows(), cfg.clusters);

  SolverConfig<Scalar> solver = cfg.solver;
  solver.lambda_reg = cfg.lambda_reg;
  // One step length for every Z-step: it depends on L only.
  solver.step_size = lass_step_size(model.graph.L, solver);

  Scalar current = kmodes_objective(model);
  result.objective_trace.push_back(current);
  for (Index outer = 1; outer <= cfg.outer_iters; ++outer) {
    const Matrix<Scalar> B = similarity_matrix(model.data, model.modes, model.sigma);
    LassSolution<Scalar> z_step = solve_lass(model.Z, model.graph.L, B, solver);
    result.inner_iterations += z_step.trace.iterations;
    result.converged = result.converged && z_step.trace.converged;
    model.Z = std::move(z_step.Z);
    model.modes = update_modes(model, cfg.mode_steps);

    const Scalar next = kmodes_objective(model);
    result.objective_trace.push_back(next);
    result.outer_iterations = outer;
    const bool stalled = current - next < cfg.objective_tol;
    current = next;
    if (stalled) break;
  }
  return result;
}

template <class Scalar>
struct OosQuery {
  Vector<Scalar> w;  // affinities to the N training points
  Vector<Scalar> g;  // kernel values to the K modes
};

// Affinities of a new point x, built with the training graph bandwidth and the
// model's sigma.
template <class Scalar, class Derived>
OosQuery<Scalar> make_query(const ClusterModel<Scalar>& model, const Eigen::MatrixBase<Derived>& point) {
  if (point.size() != model.dimension()) {
    throw DimensionMismatch("query point has dimension " + std::to_string(point.size()) +
                            ", model expects " + std::to_string(model.dimension()));
  }
  const Vector<Scalar> x = point.derived().template cast<Scalar>().reshaped();
  if (!x.allFinite()) throw NonFiniteInput("query point contains non-finite values");
  const Scalar h = model.graph_config.bandwidth;
  OosQuery<Scalar> query;
  query.w.resize(model.size());
  for (Index n = 0; n < model.size(); ++n) {
    query.w(n) = std::exp(-(model.data.row(n).transpose() - x).squaredNorm() / (Scalar(2) * h * h));
  }
  query.g = similarity_matrix(x.transpose(), model.modes, model.sigma).row(0).transpose();
  return query;
}

template <class Scalar>
struct OosTarget {
  Vector<Scalar> zbar;  // Z^T w / (w^T 1)
  Scalar gamma = Scalar(0);  // 1 / (2 lambda sum(w))
  Vector<Scalar> point;  // zbar + gamma g, the vector to project
};

// The new point's terms in the objective are
//   lambda sum_n w_n ||z - z_n||^2 - g^T z
//   = lambda sum(w) ||z - zbar||^2 - g^T z + const
//   = lambda sum(w) ||z - (zbar + gamma g)||^2 + const,  gamma = 1 / (2 lambda sum(w)).
template <class Scalar>
OosTarget<Scalar> oos_target(const ClusterModel<Scalar>& model, const OosQuery<Scalar>& query) {
  if (query.w.size() != model.size() || query.g.size() != model.clusters()) {
    throw DimensionMismatch("out-of-sample query has w of length " + std::to_string(query.w.size()) +
                            " and g of length " + std::to_string(query.g.size()) + ", model is " +
                            std::to_string(model.size()) + " points x " +
                            std::to_string(model.clusters()) + " clusters");
  }
  if (!query.w.allFinite() || !query.g.allFinite()) {
    throw NonFiniteInput("out-of-sample query contains non-finite values");
  }
  if ((query.w.array() < Scalar(0)).any()) throw InvalidArgument("affinities w must be nonnegative");
  if (!(model.lambda_reg > Scalar(0))) {
    throw InvalidArgument("out-of-sample mapping needs lambda_reg > 0");
  }
  const Scalar total = query.w.sum();
  if (!(total > Scalar(0))) {
    throw ZeroAffinity("query affinities to the training set sum to zero");
  }
  OosTarget<Scalar> target;
  target.zbar = model.Z.transpose() * query.w / total;
  target.gamma = Scalar(1) / (Scalar(2) * model.lambda_reg * total);
  target.point = target.zbar + target.gamma * query.g;
  return target;
}

template <class Scalar>
ProjectionReport<Scalar> out_of_sample_report(const ClusterModel<Scalar>& model,
                                              const OosQuery<Scalar>& query) {
  const OosTarget<Scalar> target = oos_target(model, query);
  return project_sort(target.point, simplex<Scalar>(model.clusters()));
}

template <class Scalar>
Vector<Scalar> out_of_sample(const ClusterModel<Scalar>& model, const OosQuery<Scalar>& query) {
  return out_of_sample_report(model, query).x;
}

}  // namespace lass
