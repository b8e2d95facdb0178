#include "fraclap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "fraclap/special.hpp"

namespace fraclap {

namespace {

constexpr double kEigenTolerance = 1e-15;
constexpr int kMaxSweepsPerEigenvalue = 60;

// Three-term recurrence of the monic Jacobi polynomials for (1-x)^alpha x^beta on
// (0, 1), written as the symmetric Jacobi matrix of Golub and Welsch. The
// coefficients are the standard [-1, 1] ones mapped by x = (1 + t) / 2.
QuadratureRule golub_welsch(RuleKind kind, int n, double alpha, double beta) {
  if (n < 1) {
    throw std::invalid_argument("quadrature rule needs n >= 1, got " + std::to_string(n));
  }
  const double a = alpha;
  const double b = beta;
  const double ab = a + b;
  std::vector<double> diagonal(static_cast<std::size_t>(n));
  std::vector<double> off_diagonal(static_cast<std::size_t>(n - 1));
  for (int k = 0; k < n; ++k) {
    double t_diag = 0.0;
    if (k == 0) {
      t_diag = (b - a) / (ab + 2.0);
    } else {
      const double m = 2.0 * k + ab;
      t_diag = (b * b - a * a) / (m * (m + 2.0));
    }
    diagonal[static_cast<std::size_t>(k)] = 0.5 * (1.0 + t_diag);
  }
  for (int k = 1; k < n; ++k) {
    double t_off_sq = 0.0;
    if (k == 1) {
      // (k + a + b) / (2k + a + b - 1) cancels for k = 1.
      t_off_sq = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double m = 2.0 * k + ab;
      t_off_sq = 4.0 * k * (k + a) * (k + b) * (k + ab) / (m * m * (m + 1.0) * (m - 1.0));
    }
    off_diagonal[static_cast<std::size_t>(k - 1)] = 0.5 * std::sqrt(t_off_sq);
  }

  std::vector<double> first_components;
  detail::symmetric_tridiagonal_eigen(diagonal, std::move(off_diagonal), first_components);

  const double moment = jacobi_zeroth_moment(alpha, beta);
  std::vector<double> weights(diagonal.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = moment * first_components[i] * first_components[i];
  }
  return QuadratureRule(kind, std::move(diagonal), std::move(weights));
}

}  // namespace

QuadratureRule::QuadratureRule(RuleKind kind, std::vector<double> nodes,
                               std::vector<double> weights)
    : kind_(kind), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw std::invalid_argument("quadrature rule: nodes and weights must be nonempty and match");
  }
}

double jacobi_zeroth_moment(double alpha, double beta) {
  return gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(alpha + beta + 2.0);
}

QuadratureRule gauss_legendre(int n) { return golub_welsch(LegendreWeight{}, n, 0.0, 0.0); }

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  }
  return golub_welsch(JacobiWeight{alpha, beta}, n, alpha, beta);
}

namespace {

struct RuleRegistry {
  std::mutex mutex;
  std::map<int, std::unique_ptr<const QuadratureRule>> legendre;
  std::map<std::tuple<int, double, double>, std::unique_ptr<const QuadratureRule>> jacobi;
};

RuleRegistry& registry() {
  static RuleRegistry instance;
  return instance;
}

}  // namespace

const QuadratureRule& cached_gauss_legendre(int n) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  auto& slot = reg.legendre[n];
  if (!slot) {
    slot = std::make_unique<const QuadratureRule>(gauss_legendre(n));
  }
  return *slot;
}

const QuadratureRule& cached_gauss_jacobi(int n, double alpha, double beta) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  auto& slot = reg.jacobi[{n, alpha, beta}];
  if (!slot) {
    slot = std::make_unique<const QuadratureRule>(gauss_jacobi(n, alpha, beta));
  }
  return *slot;
}

namespace detail {

void symmetric_tridiagonal_eigen(std::vector<double>& d, std::vector<double> e,
                                 std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  e.resize(d.size(), 0.0);
  // Only the first row of the eigenvector matrix is needed; rotations act on
  // rows independently so tracking that row alone is exact.
  z.assign(d.size(), 0.0);
  z[0] = 1.0;
  auto at = [](std::vector<double>& v, int i) -> double& { return v[static_cast<std::size_t>(i)]; };

  for (int l = 0; l < n; ++l) {
    int sweeps = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(at(d, m)) + std::abs(at(d, m + 1));
        if (std::abs(at(e, m)) <= kEigenTolerance * dd) {
          break;
        }
      }
      if (m == l) {
        break;
      }
      if (++sweeps > kMaxSweepsPerEigenvalue) {
        throw std::runtime_error("tridiagonal eigen-solve did not converge");
      }
      // Wilkinson shift from the leading 2x2 block.
      double g = (at(d, l + 1) - at(d, l)) / (2.0 * at(e, l));
      double r = std::hypot(g, 1.0);
      g = at(d, m) - at(d, l) + at(e, l) / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      int i = m - 1;
      bool deflated = false;
      for (; i >= l; --i) {
        const double f = s * at(e, i);
        const double b = c * at(e, i);
        r = std::hypot(f, g);
        at(e, i + 1) = r;
        if (r == 0.0) {
          at(d, i + 1) -= p;
          at(e, m) = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = at(d, i + 1) - p;
        r = (at(d, i) - g) * s + 2.0 * c * b;
        p = s * r;
        at(d, i + 1) = g + p;
        g = c * r - b;
        const double zf = at(z, i + 1);
        at(z, i + 1) = s * at(z, i) + c * zf;
        at(z, i) = c * at(z, i) - s * zf;
      }
      if (deflated) {
        continue;
      }
      at(d, l) -= p;
      at(e, l) = g;
      at(e, m) = 0.0;
    } while (m != l);
  }

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  std::vector<double> sorted_d(d.size());
  std::vector<double> sorted_z(d.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted_d[k] = d[order[k]];
    sorted_z[k] = z[order[k]];
  }
  d = std::move(sorted_d);
  z = std::move(sorted_z);
}

}  // namespace detail

}  // namespace fraclap
