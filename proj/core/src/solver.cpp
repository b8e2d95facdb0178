#include "fraclap/solver.hpp"

#include <algorithm>
#include <cmath>

#include "fraclap/polynomials.hpp"

namespace fraclap {

NotPositiveDefinite::NotPositiveDefinite(int pivot, double value)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                         " is " + std::to_string(value)),
      pivot_(pivot),
      value_(value) {}

CholeskyFactor::CholeskyFactor(const StiffnessMatrix& matrix)
    : n_(matrix.dimension()),
      lower_(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0) {
  const auto n = static_cast<std::size_t>(n_);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return lower_[i * n + j]; };
  for (std::size_t j = 0; j < n; ++j) {
    double diag = matrix(static_cast<int>(j), static_cast<int>(j));
    for (std::size_t k = 0; k < j; ++k) {
      diag -= at(j, k) * at(j, k);
    }
    if (!(diag > 0.0)) {
      throw NotPositiveDefinite(static_cast<int>(j), diag);
    }
    const double pivot = std::sqrt(diag);
    at(j, j) = pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = matrix(static_cast<int>(i), static_cast<int>(j));
      for (std::size_t k = 0; k < j; ++k) {
        sum -= at(i, k) * at(j, k);
      }
      at(i, j) = sum / pivot;
    }
  }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> rhs) const {
  if (rhs.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("right-hand side has wrong length");
  }
  const auto n = static_cast<std::size_t>(n_);
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      x[i] -= lower_[i * n + k] * x[k];
    }
    x[i] /= lower_[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) {
      x[i] -= lower_[k * n + i] * x[k];
    }
    x[i] /= lower_[i * n + i];
  }
  return x;
}

DiscreteSolution cholesky_solve(const StiffnessMatrix& matrix, const LoadVector& load) {
  if (load.size() != matrix.dimension()) {
    throw std::invalid_argument("load vector and matrix dimensions differ");
  }
  const CholeskyFactor factor(matrix);
  return DiscreteSolution{factor.solve(load.entries), matrix.quad_order()};
}

double energy(const StiffnessMatrix& matrix, std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<std::size_t>(matrix.dimension());
  if (x.size() != n || y.size() != n) {
    throw std::invalid_argument("energy: vector length does not match matrix dimension");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = matrix.row(static_cast<int>(i));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += row[j] * y[j];
    }
    total += x[i] * sum;
  }
  return total;
}

double evaluate_solution(const Space& space, std::span<const double> coeffs, double x) {
  if (coeffs.size() != static_cast<std::size_t>(space.dimension())) {
    throw std::invalid_argument("coefficient vector does not match the space");
  }
  if (x <= -1.0 || x >= 1.0) {
    return 0.0;
  }
  const auto& elements = space.mesh().elements();
  const auto it = std::find_if(elements.begin(), elements.end(),
                               [x](const Element& e) { return x <= e.x_right; });
  const Element& element = *it;
  const int p = space.degree();
  std::vector<double> psi(static_cast<std::size_t>(p + 1));
  shape_values(p, (x - element.x_left) / element.h(), psi);
  double value = 0.0;
  for (int k = 0; k <= p; ++k) {
    const int g = space.global_index(element.index, k);
    if (g >= 0) {
      value += coeffs[static_cast<std::size_t>(g)] * psi[static_cast<std::size_t>(k)];
    }
  }
  return value;
}

}  // namespace fraclap
