#include "fraclap/polynomials.hpp"

#include <stdexcept>
#include <string>

namespace fraclap {

namespace {

void check_degree(int p, std::size_t out_size) {
  if (p < 1) {
    throw std::invalid_argument("local degree must be at least 1, got " + std::to_string(p));
  }
  if (out_size < static_cast<std::size_t>(p + 1)) {
    throw std::invalid_argument("output span shorter than p + 1");
  }
}

}  // namespace

std::vector<double> legendre_values(int k_max, double t) {
  if (k_max < 0) {
    throw std::invalid_argument("legendre_values: k_max must be nonnegative");
  }
  std::vector<double> values(static_cast<std::size_t>(k_max + 1));
  values[0] = 1.0;
  if (k_max >= 1) {
    values[1] = t;
  }
  for (int k = 1; k < k_max; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    values[ku + 1] = ((2.0 * k + 1.0) * t * values[ku] - k * values[ku - 1]) / (k + 1.0);
  }
  return values;
}

double integrated_legendre(int i, double s_hat) {
  if (i < 2) {
    throw std::invalid_argument("integrated_legendre: index must be >= 2, got " + std::to_string(i));
  }
  const auto legendre = legendre_values(i, -1.0 + 2.0 * s_hat);
  const auto iu = static_cast<std::size_t>(i);
  return (legendre[iu] - legendre[iu - 2]) / (2.0 * i - 1.0);
}

void shape_values(int p, double s_hat, std::span<double> out) {
  check_degree(p, out.size());
  out[0] = 1.0 - s_hat;
  out[1] = s_hat;
  if (p < 2) {
    return;
  }
  const double t = -1.0 + 2.0 * s_hat;
  double prev = 1.0;  // P_{k-1}
  double curr = t;    // P_k
  double prev_prev = 0.0;
  for (int k = 1; k < p; ++k) {
    const double next = ((2.0 * k + 1.0) * t * curr - k * prev) / (k + 1.0);
    prev_prev = prev;
    prev = curr;
    curr = next;
    // curr = P_{k+1}, prev_prev = P_{k-1}.
    out[static_cast<std::size_t>(k + 1)] = (curr - prev_prev) / (2.0 * (k + 1) - 1.0);
  }
}

void shape_divided_differences(int p, double a, double b, std::span<double> out) {
  check_degree(p, out.size());
  out[0] = -1.0;
  out[1] = 1.0;
  if (p < 2) {
    return;
  }
  // With ta = -1 + 2a, tb = -1 + 2b and D_k = P_k[ta, tb], the product rule
  // (t P_k)[ta, tb] = ta D_k + P_k(tb) turns the Legendre recurrence into one
  // for D_k. Chain rule gives psi_k[a, b] = 2 (D_k - D_{k-2}) / (2k - 1).
  const double ta = -1.0 + 2.0 * a;
  const double tb = -1.0 + 2.0 * b;
  double pb_prev = 1.0;  // P_{k-1}(tb)
  double pb = tb;        // P_k(tb)
  double d_prev = 0.0;   // D_{k-1}
  double d = 1.0;        // D_k
  double d_prev_prev = 0.0;
  for (int k = 1; k < p; ++k) {
    const double d_next = ((2.0 * k + 1.0) * (ta * d + pb) - k * d_prev) / (k + 1.0);
    const double pb_next = ((2.0 * k + 1.0) * tb * pb - k * pb_prev) / (k + 1.0);
    d_prev_prev = d_prev;
    d_prev = d;
    d = d_next;
    pb_prev = pb;
    pb = pb_next;
    out[static_cast<std::size_t>(k + 1)] = 2.0 * (d - d_prev_prev) / (2.0 * (k + 1) - 1.0);
  }
}

double evaluate_local(std::span<const double> coeffs, double s_hat) {
  const int p = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> psi(coeffs.size());
  shape_values(p, s_hat, psi);
  double value = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    value += coeffs[k] * psi[k];
  }
  return value;
}

double divided_difference_local(std::span<const double> coeffs, double a, double b) {
  const int p = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> psi(coeffs.size());
  shape_divided_differences(p, a, b, psi);
  double value = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    value += coeffs[k] * psi[k];
  }
  return value;
}

ShapeTable shape_table(int p, std::span<const double> points) {
  ShapeTable table;
  table.p = p;
  table.points.assign(points.begin(), points.end());
  table.values.resize(static_cast<std::size_t>(p + 1) * points.size());
  std::vector<double> psi(static_cast<std::size_t>(p + 1));
  for (std::size_t q = 0; q < points.size(); ++q) {
    shape_values(p, points[q], psi);
    for (std::size_t k = 0; k < psi.size(); ++k) {
      table.values[k * points.size() + q] = psi[k];
    }
  }
  return table;
}

}  // namespace fraclap
