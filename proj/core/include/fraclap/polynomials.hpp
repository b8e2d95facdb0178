#pragma once

#include <span>
#include <vector>

namespace fraclap {

/// [P_0(t), ..., P_{k_max}(t)] by the three-term recurrence.
[[nodiscard]] std::vector<double> legendre_values(int k_max, double t);

/// Integrated Legendre bubble on the reference element (0, 1):
/// phi_i(s) = integral of P_{i-1} over (-1, -1 + 2s) = (P_i(t) - P_{i-2}(t)) / (2i - 1),
/// t = -1 + 2s. Requires i >= 2.
[[nodiscard]] double integrated_legendre(int i, double s_hat);

// Local reference basis of degree p, ordered [1 - s, s, phi_2, ..., phi_p].
// A local polynomial is a coefficient vector of length p + 1 in this basis.

/// Values of the p + 1 reference shape functions at s_hat, written to `out`.
void shape_values(int p, double s_hat, std::span<double> out);

/// Divided differences psi_k[a, b] = (psi_k(a) - psi_k(b)) / (a - b) of the
/// reference shape functions, written to `out`. Evaluated by a recurrence that
/// never divides by a - b, so a == b yields the derivative.
void shape_divided_differences(int p, double a, double b, std::span<double> out);

/// Value of the local polynomial with the given coefficients.
[[nodiscard]] double evaluate_local(std::span<const double> coeffs, double s_hat);

/// Divided difference (v(a) - v(b)) / (a - b) of a local polynomial.
[[nodiscard]] double divided_difference_local(std::span<const double> coeffs, double a, double b);

/// Reference shape functions tabulated at a set of points.
struct ShapeTable {
  int p = 0;
  std::vector<double> points;
  std::vector<double> values;  // row-major (p + 1) x points.size()

  [[nodiscard]] int num_points() const noexcept { return static_cast<int>(points.size()); }
  [[nodiscard]] double operator()(int k, int q) const {
    return values[static_cast<std::size_t>(k) * points.size() + static_cast<std::size_t>(q)];
  }
  [[nodiscard]] std::span<const double> row(int k) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(k) * points.size(),
                                                   points.size());
  }
};

[[nodiscard]] ShapeTable shape_table(int p, std::span<const double> points);

}  // namespace fraclap
