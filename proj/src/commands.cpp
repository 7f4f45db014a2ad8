#include "lass/commands.hpp"

#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lass/batch.hpp"
#include "lass/csv.hpp"
#include "lass/kmodes.hpp"
#include "lass/model_io.hpp"
#include "lass/projection.hpp"

namespace lass::cli {

namespace {

using nlohmann::json;

std::string format_rows(const MatrixXd& rows, OutputFormat format) {
  if (format == OutputFormat::csv) return io::format_csv(rows);
  json doc = json::array();
  for (Index n = 0; n < rows.rows(); ++n) {
    json row = json::array();
    for (Index k = 0; k < rows.cols(); ++k) row.push_back(rows(n, k));
    doc.push_back(std::move(row));
  }
  return doc.dump() + "\n";
}

void emit(const std::filesystem::path& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

// Maps library exceptions onto the exit-code taxonomy.
int guarded(std::ostream& err, const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NonFiniteInput& e) {
    err << "lass " << command << ": " << e.what() << "\n";
    return kNonFinite;
  } catch (const ZeroAffinity& e) {
    err << "lass " << command << ": " << e.what()
        << " (query too far from the training data; try a larger bandwidth)\n";
    return kZeroAffinity;
  } catch (const Error& e) {
    err << "lass " << command << ": " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace

int cmd_project(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, "project", [&] {
    const MatrixXd Y = io::read_csv(cfg.input, cfg.skip_header);
    const auto spec = simplex<double>(Y.cols(), cfg.a);
    const auto reports = project_rows_report(Y, spec);
    MatrixXd X(Y.rows(), Y.cols());
    for (Index n = 0; n < Y.rows(); ++n) X.row(n) = reports[static_cast<std::size_t>(n)].x.transpose();
    emit(cfg.output, format_rows(X, cfg.format), out);
    if (!cfg.report.empty()) {
      std::string lines;
      for (Index n = 0; n < Y.rows(); ++n) {
        const auto& r = reports[static_cast<std::size_t>(n)];
        lines += json{{"row", n}, {"rho", r.rho}, {"lambda", r.lambda}}.dump() + "\n";
      }
      io::write_text(cfg.report, lines);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_cluster(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, "cluster", [&] {
    const MatrixXd data = io::read_csv(cfg.input, cfg.skip_header);
    FitConfig<double> fit_cfg;
    fit_cfg.clusters = cfg.clusters;
    fit_cfg.sigma = cfg.sigma;
    fit_cfg.lambda_reg = cfg.lambda_reg;
    fit_cfg.graph.bandwidth = cfg.bandwidth;
    fit_cfg.graph.knn = cfg.knn;
    fit_cfg.solver.max_iter = cfg.max_iter;
    fit_cfg.solver.grad_tol = cfg.tol.value_or(1e-7);
    fit_cfg.solver.accelerated = cfg.accelerated;
    fit_cfg.outer_iters = cfg.outer_iters;
    fit_cfg.mode_steps = cfg.mode_steps;
    fit_cfg.seed = cfg.seed;

    const auto start = std::chrono::steady_clock::now();
    const FitResult<double> result = fit(data, fit_cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    emit(cfg.output, io::dump_model(result.model), out);
    if (!cfg.report.empty()) {
      json report{{"objective_trace", result.objective_trace},
                  {"outer_iterations", result.outer_iterations},
                  {"inner_iterations", result.inner_iterations},
                  {"converged", result.converged},
                  {"wall_time_seconds", seconds}};
      io::write_text(cfg.report, report.dump(2) + "\n");
    }
    if (!result.converged) {
      err << "lass cluster: a Z-step did not reach the residual tolerance within " << cfg.max_iter
          << " iterations; model written but flagged\n";
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_assign(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, "assign", [&] {
    const ClusterModel<double> model = io::load_model(cfg.model);
    const MatrixXd queries = io::read_csv(cfg.input, cfg.skip_header);
    if (queries.cols() != model.dimension()) {
      throw DimensionMismatch("queries have " + std::to_string(queries.cols()) +
                              " columns, the model was trained on " +
                              std::to_string(model.dimension()));
    }
    MatrixXd Z(queries.rows(), model.clusters());
    for (Index n = 0; n < queries.rows(); ++n) {
      const auto query = make_query(model, queries.row(n));
      try {
        Z.row(n) = out_of_sample(model, query).transpose();
      } catch (const ZeroAffinity&) {
        throw ZeroAffinity("query row " + std::to_string(n + 1) +
                           ": affinities to every training point underflow to zero");
      }
    }
    emit(cfg.output, format_rows(Z, cfg.format), out);
    return static_cast<int>(kOk);
  });
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, "check", [&] {
    const MatrixXd Y = io::read_csv(cfg.input, cfg.skip_header);
    const MatrixXd X = io::read_csv(cfg.projected, cfg.skip_header);
    if (Y.rows() != X.rows() || Y.cols() != X.cols()) {
      throw DimensionMismatch("y rows are " + detail::shape_string(Y.rows(), Y.cols()) +
                              ", x rows are " + detail::shape_string(X.rows(), X.cols()));
    }
    const double tol = cfg.tol.value_or(1e-9);
    const auto spec = simplex<double>(Y.cols(), cfg.a);
    spec.validate();

    KktReport<double> worst;
    Index worst_row = 0;
    double worst_value = -1.0;
    for (Index n = 0; n < Y.rows(); ++n) {
      ProjectionReport<double> pair;
      pair.x = X.row(n).transpose();
      pair.active = pair.x.array() > 0.0;
      pair.rho = pair.active.count();
      // lambda from the support: x_i = y_i + lambda wherever x_i > 0.
      double shift = 0.0;
      for (Index i = 0; i < Y.cols(); ++i) {
        if (pair.active(i)) shift += X(n, i) - Y(n, i);
      }
      pair.lambda = pair.rho > 0 ? shift / static_cast<double>(pair.rho) : 0.0;
      const auto kkt = kkt_check(Y.row(n).transpose(), pair, spec);
      worst.stationarity_residual = std::max(worst.stationarity_residual, kkt.stationarity_residual);
      worst.primal_feasibility_violation =
          std::max(worst.primal_feasibility_violation, kkt.primal_feasibility_violation);
      worst.dual_feasibility_violation =
          std::max(worst.dual_feasibility_violation, kkt.dual_feasibility_violation);
      worst.complementarity_residual =
          std::max(worst.complementarity_residual, kkt.complementarity_residual);
      if (kkt.max_residual() > worst_value) {
        worst_value = kkt.max_residual();
        worst_row = n;
      }
    }
    const bool pass = worst.max_residual() <= tol;
    std::ostringstream text;
    text << "rows " << Y.rows() << "\n"
         << "stationarity " << io::format_number(worst.stationarity_residual) << "\n"
         << "primal " << io::format_number(worst.primal_feasibility_violation) << "\n"
         << "dual " << io::format_number(worst.dual_feasibility_violation) << "\n"
         << "complementarity " << io::format_number(worst.complementarity_residual) << "\n"
         << "worst_row " << worst_row + 1 << "\n"
         << "tol " << io::format_number(tol) << "\n"
         << (pass ? "PASS" : "FAIL") << "\n";
    out << text.str();
    return static_cast<int>(pass ? kOk : kCheckFailed);
  });
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.subcommand) {
    case Subcommand::project:
      return cmd_project(cfg, out, err);
    case Subcommand::cluster:
      return cmd_cluster(cfg, out, err);
    case Subcommand::assign:
      return cmd_assign(cfg, out, err);
    case Subcommand::check:
      return cmd_check(cfg, out, err);
  }
  return kBadInput;
}

}  // namespace lass::cli
