#pragma once

// Implementations behind the `lass` command-line tool. Each command reads its
// inputs from files, writes results to the configured output (stdout when the
// path is empty) and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "lass/types.hpp"

namespace lass::cli {

enum class Subcommand { project, cluster, assign, check };
enum class OutputFormat { csv, json };

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kNonFinite = 3,
  kNotConverged = 4,
  kZeroAffinity = 5,
};

struct RunConfig {
  Subcommand subcommand = Subcommand::project;
  std::filesystem::path input;      // matrix to project, dataset, queries, or y rows
  std::filesystem::path output;     // empty: stdout
  std::filesystem::path model;      // assign: model JSON
  std::filesystem::path projected;  // check: x rows paired with the input rows
  std::filesystem::path report;     // project: JSON lines; cluster: run report
  bool skip_header = false;
  OutputFormat format = OutputFormat::csv;

  double a = 1.0;
  Index clusters = 2;
  double sigma = 1.0;
  double lambda_reg = 1.0;
  double bandwidth = 1.0;
  std::optional<Index> knn;
  Index max_iter = 10000;
  // check: KKT tolerance (default 1e-9); cluster: solver residual tolerance (default 1e-7).
  std::optional<double> tol;
  std::uint64_t seed = 0;
  Index outer_iters = 50;
  Index mode_steps = 10;
  bool accelerated = false;
};

int cmd_project(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_cluster(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_assign(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace lass::cli
