#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace fraclap {

struct LegendreWeight {
  friend bool operator==(const LegendreWeight&, const LegendreWeight&) = default;
};

/// Weight (1 - x)^alpha x^beta on (0, 1).
struct JacobiWeight {
  double alpha = 0.0;
  double beta = 0.0;
  friend bool operator==(const JacobiWeight&, const JacobiWeight&) = default;
};

using RuleKind = std::variant<LegendreWeight, JacobiWeight>;

/// An n-point Gauss rule on the reference element (0, 1). Nodes are strictly
/// increasing and interior, weights are positive and sum to the zeroth moment
/// of the weight function.
class QuadratureRule {
 public:
  QuadratureRule(RuleKind kind, std::vector<double> nodes, std::vector<double> weights);

  [[nodiscard]] const RuleKind& kind() const noexcept { return kind_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

 private:
  RuleKind kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Gauss-Legendre rule with n points on (0, 1). Exact up to degree 2n - 1.
[[nodiscard]] QuadratureRule gauss_legendre(int n);

/// Gauss-Jacobi rule for the weight (1 - x)^alpha x^beta on (0, 1).
/// Requires alpha, beta > -1.
[[nodiscard]] QuadratureRule gauss_jacobi(int n, double alpha, double beta);

/// Integral of (1 - x)^alpha x^beta over (0, 1), the Beta function B(beta+1, alpha+1).
[[nodiscard]] double jacobi_zeroth_moment(double alpha, double beta);

/// Shared immutable rules. Construction is serialised; returned references
/// stay valid for the lifetime of the program.
[[nodiscard]] const QuadratureRule& cached_gauss_legendre(int n);
[[nodiscard]] const QuadratureRule& cached_gauss_jacobi(int n, double alpha, double beta);

template <class F>
[[nodiscard]] double apply(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    sum += rule.weight(i) * f(rule.node(i));
  }
  return sum;
}

/// Tensor-product rule: sum_i sum_j w_i w_j f(x_i, y_j), inner sum over y.
template <class F>
[[nodiscard]] double apply_tensor(const QuadratureRule& rule_x, const QuadratureRule& rule_y,
                                  F&& f) {
  double sum = 0.0;
  for (int i = 0; i < rule_x.size(); ++i) {
    const double x = rule_x.node(i);
    double inner = 0.0;
    for (int j = 0; j < rule_y.size(); ++j) {
      inner += rule_y.weight(j) * f(x, rule_y.node(j));
    }
    sum += rule_x.weight(i) * inner;
  }
  return sum;
}

namespace detail {

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. On return `diagonal` holds the eigenvalues (ascending)
/// and `first_components` the first component of each normalised eigenvector.
void symmetric_tridiagonal_eigen(std::vector<double>& diagonal,
                                 std::vector<double> off_diagonal,
                                 std::vector<double>& first_components);

}  // namespace detail

}  // namespace fraclap
