// Batch driver: solve, convergence, quadcheck, complexity. Results go to a
// CSV file (or stdout); progress goes to stderr.
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fraclap/experiments.hpp"

namespace {

void add_common(CLI::App& cmd, fraclap::ExperimentConfig& config, std::string& out) {
  cmd.add_option("--s", config.s, "fractional order s in (0, 1)")->capture_default_str();
  cmd.add_option("--sigma", config.sigma, "geometric grading factor in (0, 1)")
      ->capture_default_str();
  cmd.add_option("--out", out, "CSV output path (default: stdout)");
  cmd.add_option("--seed", config.seed, "seed for randomized draws")->capture_default_str();
  cmd.add_flag("--deterministic", config.deterministic,
               "report wall_ms as 0 so reruns are byte-identical");
}

void add_levels(CLI::App& cmd, fraclap::ExperimentConfig& config) {
  cmd.add_option("--lmin", config.lmin, "first number of layers L")->capture_default_str();
  cmd.add_option("--lmax", config.lmax, "last number of layers L")->capture_default_str();
  cmd.add_option("--threads", config.threads, "assembly worker threads")->capture_default_str();
}

void add_orders(CLI::App& cmd, fraclap::ExperimentConfig& config) {
  cmd.add_option("--lambda", config.lambda, "n = floor(lambda * p)")->capture_default_str();
  cmd.add_option("--n", config.n, "explicit quadrature order (overrides --lambda)");
  cmd.add_option("--m-factor", config.m_factor, "reference order m = factor * p")
      ->capture_default_str();
  cmd.add_option("--f", config.f, "right-hand side")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, fraclap::RightHandSide>{{"one", fraclap::RightHandSide::One},
                                                        {"exp", fraclap::RightHandSide::Exp}},
          CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hp-FEM for the integral fractional Laplacian on (-1, 1)"};
  app.require_subcommand(1);
  fraclap::ExperimentConfig config;
  std::string out;

  auto* solve = app.add_subcommand("solve", "solve on geometric_mesh(lmax, sigma), sample u_h");
  add_common(*solve, config, out);
  add_orders(*solve, config);
  solve->add_option("--lmax", config.lmax, "number of layers L")->capture_default_str();
  solve->add_flag("--naive", config.naive, "use the per-basis-pair assembly");

  auto* convergence = app.add_subcommand("convergence", "error estimators over a range of L");
  add_common(*convergence, config, out);
  add_levels(*convergence, config);
  add_orders(*convergence, config);
  convergence->add_flag("--naive", config.naive, "use the per-basis-pair assembly");

  auto* quadcheck = app.add_subcommand("quadcheck", "elementwise quadrature error versus n");
  add_common(*quadcheck, config, out);
  quadcheck->add_option("--nmin", config.nmin, "smallest order")->capture_default_str();
  quadcheck->add_option("--nmax", config.nmax, "largest order")->capture_default_str();
  quadcheck->add_option("--n-ref", config.n_ref, "reference order")->capture_default_str();

  auto* complexity = app.add_subcommand("complexity", "operation counts with p = n = L");
  add_common(*complexity, config, out);
  add_levels(*complexity, config);
  complexity->add_option("--n", config.n, "explicit quadrature order (default p)");
  complexity->add_flag("--naive", config.naive, "count the per-basis-pair assembly");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    config.command = fraclap::Command::Solve;
  } else if (quadcheck->parsed()) {
    config.command = fraclap::Command::Quadcheck;
  } else if (complexity->parsed()) {
    config.command = fraclap::Command::Complexity;
  } else {
    config.command = fraclap::Command::Convergence;
  }

  try {
    const fraclap::CsvTable table = fraclap::run(config, &std::cerr);
    if (out.empty()) {
      fraclap::write_csv(table, std::cout);
    } else {
      std::ofstream file(out);
      if (!file) {
        std::cerr << "error: cannot open " << out << '\n';
        return 2;
      }
      fraclap::write_csv(table, file);
      if (!file) {
        std::cerr << "error: failed writing " << out << '\n';
        return 2;
      }
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
