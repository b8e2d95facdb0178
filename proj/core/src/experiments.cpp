#include "fraclap/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

void ExperimentConfig::validate() const {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("s must lie in (0, 1)");
  }
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0, 1)");
  }
  if (!(lambda >= 1.0)) {
    throw std::invalid_argument("lambda must be at least 1");
  }
  if (n && *n < 1) {
    throw std::invalid_argument("n must be positive");
  }
  if (m_factor < 1) {
    throw std::invalid_argument("m-factor must be positive");
  }
  if (lmin < 1) {
    throw std::invalid_argument("lmin must be at least 1");
  }
  if (threads < 1) {
    throw std::invalid_argument("threads must be positive");
  }
  if (nmin < 1 || n_ref < 1) {
    throw std::invalid_argument("quadrature orders must be positive");
  }
}

int ExperimentConfig::quad_order(int p) const {
  if (n) {
    return *n;
  }
  // Guard against 1.2 * 5 landing just below 6.
  return std::max(1, static_cast<int>(std::floor(lambda * p + 1e-9)));
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.16e", value);
  return buffer;
}

void write_csv(const CsvTable& table, std::ostream& out) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) {
    line(row);
  }
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope fit needs two or more matching points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

using Clock = std::chrono::steady_clock;

std::function<double(double)> rhs(RightHandSide f) {
  if (f == RightHandSide::Exp) {
    return [](double x) { return std::exp(x); };
  }
  return [](double) { return 1.0; };
}

std::string wall_ms(const ExperimentConfig& config, Clock::time_point start) {
  if (config.deterministic) {
    return "0";
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start);
  return format_number(elapsed.count());
}

std::string cell(const ErrorReport& report) {
  return report.value ? format_number(*report.value) : "FAIL";
}

void note(std::ostream* progress, const std::string& text) {
  if (progress != nullptr) {
    *progress << text << '\n' << std::flush;
  }
}

AssemblyOptions options_for(const ExperimentConfig& config) {
  return AssemblyOptions{config.naive ? AssemblyMode::Naive : AssemblyMode::Blockwise,
                         config.threads};
}

}  // namespace

CsvTable run_convergence(const ExperimentConfig& config, std::ostream* progress) {
  config.validate();
  CsvTable table{{"L", "p", "n", "m", "N", "err_m1", "err_m2", "err_m3", "energy_m",
                  "kernel_evals", "wall_ms"},
                 {}};
  const FracParams params(config.s);
  const auto f = rhs(config.f);
  const bool exact_known = config.f == RightHandSide::One;
  const double a_exact = exact_known ? exact_energy(params) : 0.0;
  const AssemblyOptions options = options_for(config);

  for (int layers = config.lmin; layers <= config.lmax; ++layers) {
    const auto start = Clock::now();
    const int p = layers;
    const int n = config.quad_order(p);
    const int m = config.m_factor * p;
    const Space space(geometric_mesh(layers, config.sigma), p);
    note(progress, "convergence: L=" + std::to_string(layers) + " N=" +
                       std::to_string(space.dimension()) + " n=" + std::to_string(n) +
                       " m=" + std::to_string(m));

    std::vector<std::string> row{std::to_string(layers), std::to_string(p), std::to_string(n),
                                 std::to_string(m), std::to_string(space.dimension())};
    OpCounter counter;
    const StiffnessMatrix a_n = assemble_stiffness(space, params, n, &counter, options);
    const StiffnessMatrix a_m = assemble_stiffness(space, params, m, nullptr, options);
    std::string e1 = "FAIL";
    std::string e2 = "FAIL";
    std::string e3 = "FAIL";
    std::string energy_m = "FAIL";
    try {
      const DiscreteSolution sol_n = cholesky_solve(a_n, assemble_load(space, f, n));
      energy_m = format_number(energy(a_m, sol_n.coeffs, sol_n.coeffs));
      if (exact_known) {
        e1 = cell(error_method1(a_n, sol_n, a_exact));
        e2 = cell(error_method2(a_m, sol_n, a_exact));
        const DiscreteSolution sol_m = cholesky_solve(a_m, assemble_load(space, f, m));
        e3 = cell(error_method3(a_m, sol_n, sol_m, a_exact));
      } else {
        e1 = e2 = e3 = "NA";
      }
    } catch (const NotPositiveDefinite& err) {
      note(progress, std::string("  solve failed: ") + err.what());
    }
    row.insert(row.end(), {e1, e2, e3, energy_m, std::to_string(counter.kernel_evals),
                           wall_ms(config, start)});
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable run_quadcheck(const ExperimentConfig& config, std::ostream* progress) {
  config.validate();
  CsvTable table{{"case", "sigma", "n", "abs_error"}, {}};
  const FracParams params(config.s);
  const Mesh1D mesh = geometric_mesh(2, config.sigma);

  // Integrated Legendre polynomials of P_5 on T and of P_7 on T'.
  std::vector<double> v_on(9, 0.0);
  std::vector<double> w_on(9, 0.0);
  const std::vector<double> off(9, 0.0);
  v_on[6] = 1.0;
  w_on[8] = 1.0;
  const PairLocals v{v_on, off};
  const PairLocals w{off, w_on};

  const struct {
    const char* name;
    int second;
  } cases[] = {{"adjacent", 1}, {"separated", 2}};
  for (const auto& c : cases) {
    const Element& t = mesh.element(0);
    const Element& t2 = mesh.element(c.second);
    note(progress, std::string("quadcheck: ") + c.name + " sigma=" + format_number(config.sigma));
    const double reference = pair_quadrature(t, t2, v, w, config.n_ref, params);
    for (int n = config.nmin; n <= config.nmax; ++n) {
      const double error = std::fabs(pair_quadrature(t, t2, v, w, n, params) - reference);
      table.rows.push_back(
          {c.name, format_number(config.sigma), std::to_string(n), format_number(error)});
    }
  }
  return table;
}

CsvTable run_complexity(const ExperimentConfig& config, std::ostream* progress) {
  config.validate();
  CsvTable table{{"L", "N", "kernel_evals", "multiply_adds", "wall_ms"}, {}};
  const FracParams params(config.s);
  const AssemblyOptions options = options_for(config);
  std::vector<double> layers_used;
  std::vector<double> kernel_counts;
  std::vector<double> madd_counts;
  for (int layers = config.lmin; layers <= config.lmax; layers += 1) {
    const auto start = Clock::now();
    const int p = layers;
    const int n = config.n ? *config.n : p;
    const Space space(geometric_mesh(layers, config.sigma), p);
    note(progress, "complexity: L=" + std::to_string(layers) + " N=" +
                       std::to_string(space.dimension()) + (config.naive ? " naive" : ""));
    OpCounter counter;
    const StiffnessMatrix matrix = assemble_stiffness(space, params, n, &counter, options);
    (void)matrix;
    table.rows.push_back({std::to_string(layers), std::to_string(space.dimension()),
                          std::to_string(counter.kernel_evals),
                          std::to_string(counter.multiply_adds), wall_ms(config, start)});
    layers_used.push_back(layers);
    kernel_counts.push_back(static_cast<double>(counter.kernel_evals));
    madd_counts.push_back(static_cast<double>(counter.multiply_adds));
  }
  if (layers_used.size() >= 2) {
    table.rows.push_back({"slope", "", format_number(loglog_slope(layers_used, kernel_counts)),
                          format_number(loglog_slope(layers_used, madd_counts)), ""});
  }
  return table;
}

CsvTable run_solve(const ExperimentConfig& config, std::ostream* progress) {
  config.validate();
  CsvTable table{{"x", "u_h", "u_exact"}, {}};
  const FracParams params(config.s);
  const int layers = config.lmax;
  const int p = layers;
  const int n = config.quad_order(p);
  const Space space(geometric_mesh(layers, config.sigma), p);
  note(progress, "solve: L=" + std::to_string(layers) + " N=" + std::to_string(space.dimension()) +
                     " n=" + std::to_string(n));
  const StiffnessMatrix matrix =
      assemble_stiffness(space, params, n, nullptr, options_for(config));
  const DiscreteSolution sol = cholesky_solve(matrix, assemble_load(space, rhs(config.f), n));
  constexpr int points = 401;
  for (int i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * i / (points - 1);
    const std::string exact =
        config.f == RightHandSide::One ? format_number(exact_solution(params, x)) : "NA";
    table.rows.push_back(
        {format_number(x), format_number(evaluate_solution(space, sol.coeffs, x)), exact});
  }
  return table;
}

CsvTable run(const ExperimentConfig& config, std::ostream* progress) {
  switch (config.command) {
    case Command::Solve:
      return run_solve(config, progress);
    case Command::Quadcheck:
      return run_quadcheck(config, progress);
    case Command::Complexity:
      return run_complexity(config, progress);
    case Command::Convergence:
      break;
  }
  return run_convergence(config, progress);
}

}  // namespace fraclap
