#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fraclap {

enum class Command { Solve, Convergence, Quadcheck, Complexity };
enum class RightHandSide { One, Exp };

struct ExperimentConfig {
  Command command = Command::Convergence;
  double s = 0.5;
  double sigma = 0.25;
  int lmin = 1;
  int lmax = 6;
  /// n = floor(lambda * p) unless `n` is given.
  double lambda = 1.2;
  std::optional<int> n;
  /// Reference order m = m_factor * p.
  int m_factor = 6;
  RightHandSide f = RightHandSide::One;
  std::uint64_t seed = 20240917;
  /// Reports wall_ms as 0 so repeated runs produce identical bytes.
  bool deterministic = false;
  bool naive = false;
  int threads = 1;
  /// quadcheck sweep and its reference order.
  int nmin = 5;
  int nmax = 30;
  int n_ref = 50;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
  [[nodiscard]] int quad_order(int p) const;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits, scientific.
[[nodiscard]] std::string format_number(double value);
void write_csv(const CsvTable& table, std::ostream& out);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Columns: L,p,n,m,N,err_m1,err_m2,err_m3,energy_m,kernel_evals,wall_ms.
/// Error columns hold FAIL for a negative radicand or a failed solve and NA
/// when no exact energy is known.
[[nodiscard]] CsvTable run_convergence(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Columns: case,sigma,n,abs_error against order n_ref on the first two
/// elements (adjacent) and elements 0 and 2 (separated) of geometric_mesh(2, sigma).
[[nodiscard]] CsvTable run_quadcheck(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Columns: L,N,kernel_evals,multiply_adds,wall_ms with p = n = L, followed
/// by a `slope` row holding log-log fits when two or more L were run.
[[nodiscard]] CsvTable run_complexity(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Columns: x,u_h,u_exact for L = lmax on an even grid of 401 points.
[[nodiscard]] CsvTable run_solve(const ExperimentConfig& config, std::ostream* progress = nullptr);

[[nodiscard]] CsvTable run(const ExperimentConfig& config, std::ostream* progress = nullptr);

}  // namespace fraclap
