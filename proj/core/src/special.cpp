#include "fraclap/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fraclap {

namespace {

// Lanczos approximation, g = 7, nine terms.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  // Valid for x >= 0.5.
  const double z = x - 1.0;
  double series = kLanczosCoeffs[0];
  for (std::size_t k = 1; k < kLanczosCoeffs.size(); ++k) {
    series += kLanczosCoeffs[k] / (z + static_cast<double>(k));
  }
  const double t = z + kLanczosG + 0.5;
  // Split the power to delay overflow for large arguments.
  const double half_power = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_power * (half_power * std::exp(-t)) * series;
}

}  // namespace

FracParams::FracParams(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("fractional order must lie in (0, 1), got " + std::to_string(s));
  }
}

double gamma(double x) {
  if (x <= 0.0 && x == std::nearbyint(x)) {
    throw std::domain_error("gamma: pole at nonpositive integer " + std::to_string(x));
  }
  if (x == std::nearbyint(x) && x <= 21.0) {
    double factorial = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) {
      factorial *= static_cast<double>(k);
    }
    return factorial;
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  return lanczos_gamma(x);
}

double kernel_constant(FracParams params) {
  const double s = params.s();
  return -std::pow(2.0, 2.0 * s) * gamma(s + 0.5) / (std::sqrt(std::numbers::pi) * gamma(-s));
}

double exact_solution(FracParams params, double x) {
  if (!(std::abs(x) <= 1.0)) {
    throw std::domain_error("exact_solution: |x| must not exceed 1");
  }
  const double s = params.s();
  const double prefactor =
      std::pow(2.0, -2.0 * s) * std::sqrt(std::numbers::pi) / (gamma(s + 0.5) * gamma(1.0 + s));
  // (1 - x)(1 + x) keeps u(x) == u(-x) bit for bit.
  return prefactor * std::pow((1.0 - x) * (1.0 + x), s);
}

double exact_energy(FracParams params) {
  const double s = params.s();
  return std::pow(2.0, -2.0 * s) * std::numbers::pi / (gamma(s + 0.5) * gamma(s + 1.5));
}

}  // namespace fraclap
