#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclap/assembly.hpp"

namespace fraclap {

/// Thrown when Cholesky meets a nonpositive pivot. For an assembled matrix
/// this points at too few quadrature points (n < p + 1) or a broken assembly.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(int pivot, double value);

  [[nodiscard]] int pivot() const noexcept { return pivot_; }
  [[nodiscard]] double value() const noexcept { return value_; }

 private:
  int pivot_;
  double value_;
};

/// Coefficient vector x of u = sum_i x_i phi_i and the order it was assembled with.
struct DiscreteSolution {
  std::vector<double> coeffs;
  int quad_order = 0;
};

/// Lower-triangular factor L with A = L L^T, stored row-major.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const StiffnessMatrix& matrix);

  [[nodiscard]] int dimension() const noexcept { return n_; }
  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

 private:
  int n_;
  std::vector<double> lower_;
};

[[nodiscard]] DiscreteSolution cholesky_solve(const StiffnessMatrix& matrix, const LoadVector& load);

/// x^T A y.
[[nodiscard]] double energy(const StiffnessMatrix& matrix, std::span<const double> x,
                            std::span<const double> y);

/// Pointwise value of sum_i x_i phi_i.
[[nodiscard]] double evaluate_solution(const Space& space, std::span<const double> coeffs, double x);

}  // namespace fraclap
