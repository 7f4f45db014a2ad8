// lass: simplex projection and Laplacian K-modes clustering from the shell.
//
//   lass project --input Y.csv [--output X.csv] [--a 1] [--report rows.jsonl]
//   lass cluster --input data.csv --k 2 --sigma 0.5 --lambda 0.1 --bandwidth 0.5 --output model.json
//   lass assign  --model model.json --input queries.csv [--output Z.csv]
//   lass check   --input Y.csv --projected X.csv [--tol 1e-9]

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "lass/commands.hpp"

int main(int argc, char** argv) {
  using lass::cli::OutputFormat;
  using lass::cli::RunConfig;
  using lass::cli::Subcommand;

  CLI::App app{"Euclidean projection onto the probability simplex and Laplacian K-modes clustering"};
  app.require_subcommand(1);

  RunConfig cfg;
  lass::Index knn = 0;
  double tol = 0.0;
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv},
                                                   {"json", OutputFormat::json}};

  auto add_io = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("-i,--input", cfg.input, input_help)->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", cfg.output, "Output file (default: stdout)");
    sub->add_flag("--skip-header", cfg.skip_header, "Ignore the first non-blank CSV line");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format: csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  auto* project = app.add_subcommand("project", "Project each CSV row onto the simplex");
  add_io(project, "N x D matrix, one vector per row");
  add_format(project);
  project->add_option("--a", cfg.a, "Simplex scale: rows are projected onto sum(x) = a")
      ->check(CLI::PositiveNumber);
  project->add_option("--report", cfg.report, "Write per-row {row, rho, lambda} JSON lines here");

  auto* cluster = app.add_subcommand("cluster", "Fit Laplacian K-modes on a CSV dataset");
  add_io(cluster, "N x D dataset, one point per row");
  cluster->add_option("-k,--k", cfg.clusters, "Number of clusters")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--sigma", cfg.sigma, "Kernel bandwidth of the cluster modes")
      ->required()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--lambda,--lambda-reg", cfg.lambda_reg, "Laplacian smoothing weight")
      ->required()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--bandwidth", cfg.bandwidth, "Gaussian affinity bandwidth of the graph")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* knn_opt = cluster->add_option("--knn", knn, "Keep only k-nearest-neighbour edges")
                      ->check(CLI::PositiveNumber);
  cluster->add_option("--max-iter", cfg.max_iter, "Iteration cap of each Z-step")
      ->check(CLI::PositiveNumber);
  auto* cluster_tol = cluster->add_option("--tol", tol, "Z-step residual tolerance (default 1e-7)")
                          ->check(CLI::PositiveNumber);
  cluster->add_option("--seed", cfg.seed, "Seed for mode initialisation");
  cluster->add_option("--outer-iters", cfg.outer_iters, "Alternations between Z and C")
      ->check(CLI::PositiveNumber);
  cluster->add_option("--mode-steps", cfg.mode_steps, "Mean-shift steps per C-step")
      ->check(CLI::PositiveNumber);
  cluster->add_flag("--accelerated", cfg.accelerated, "Use momentum in the Z-step");
  cluster->add_option("--report", cfg.report, "Write the run report (objective trace, timings) here");

  auto* assign = app.add_subcommand("assign", "Assign new points with a trained model");
  add_io(assign, "Query points, one per row");
  add_format(assign);
  assign->add_option("-m,--model", cfg.model, "Model JSON written by 'cluster'")
      ->required()
      ->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "Verify KKT conditions of projected rows");
  add_io(check, "Original rows y");
  check->add_option("-x,--projected", cfg.projected, "Projected rows x, paired with --input")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--a", cfg.a, "Simplex scale")->check(CLI::PositiveNumber);
  auto* check_tol = check->add_option("--tol", tol, "Largest admissible residual (default 1e-9)")
                        ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(lass::cli::kBadInput);
  }

  if (project->parsed()) cfg.subcommand = Subcommand::project;
  if (cluster->parsed()) cfg.subcommand = Subcommand::cluster;
  if (assign->parsed()) cfg.subcommand = Subcommand::assign;
  if (check->parsed()) cfg.subcommand = Subcommand::check;
  if (knn_opt->count() > 0) cfg.knn = knn;
  if (cluster_tol->count() > 0 || check_tol->count() > 0) cfg.tol = tol;

  return lass::cli::run(cfg, std::cout, std::cerr);
}
