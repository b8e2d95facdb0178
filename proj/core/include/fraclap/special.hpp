#pragma once

namespace fraclap {

/// Fractional order s of the operator (-Delta)^s, validated to lie in (0, 1).
class FracParams {
 public:
  explicit FracParams(double s);

  [[nodiscard]] double s() const noexcept { return s_; }

 private:
  double s_;
};

/// Gamma function for real arguments. Throws std::domain_error at the poles
/// 0, -1, -2, ...
[[nodiscard]] double gamma(double x);

/// Normalisation constant of the integral fractional Laplacian,
/// C(s) = -2^{2s} Gamma(s + 1/2) / (sqrt(pi) Gamma(-s)). Always positive.
[[nodiscard]] double kernel_constant(FracParams params);

/// Solution of (-Delta)^s u = 1 on (-1, 1) with u = 0 outside:
/// u(x) = 2^{-2s} sqrt(pi) / (Gamma(s + 1/2) Gamma(1 + s)) (1 - x^2)^s.
/// Throws std::domain_error for |x| > 1.
[[nodiscard]] double exact_solution(FracParams params, double x);

/// Energy a(u, u) of the f = 1 solution. Equal to the integral of u over
/// (-1, 1), i.e. 2^{-2s} pi / (Gamma(s + 1/2) Gamma(s + 3/2)).
[[nodiscard]] double exact_energy(FracParams params);

}  // namespace fraclap
