#include "fraclap/error.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/quadrature.hpp"

namespace fraclap {

namespace {

using Real = long double;
using Poly = std::vector<Real>;  // monomial coefficients in s_hat

struct Sample {
  Real value = 0.0L;
  Real magnitude = 0.0L;  // same rule applied to |integrand|
};

// Local reference-basis coefficients to monomials, built from the Bonnet
// recurrence in s_hat directly.
Poly to_monomial(std::span<const double> coeffs) {
  const std::size_t p = coeffs.size() - 1;
  std::vector<Poly> legendre;
  legendre.push_back(Poly{1.0L});
  legendre.push_back(Poly{-1.0L, 2.0L});
  for (std::size_t k = 1; k + 1 <= p; ++k) {
    Poly next(k + 2, 0.0L);
    const Poly& pk = legendre[k];
    const Poly& pm = legendre[k - 1];
    const auto kk = static_cast<Real>(k);
    for (std::size_t j = 0; j < pk.size(); ++j) {
      next[j] -= (2 * kk + 1) * pk[j];
      next[j + 1] += 2 * (2 * kk + 1) * pk[j];
    }
    for (std::size_t j = 0; j < pm.size(); ++j) {
      next[j] -= kk * pm[j];
    }
    for (Real& c : next) {
      c /= kk + 1;
    }
    legendre.push_back(std::move(next));
  }
  Poly result(p + 1, 0.0L);
  result[0] += coeffs[0];
  result[1] -= coeffs[0];
  result[1] += coeffs[1];
  for (std::size_t i = 2; i <= p; ++i) {
    const Real scale = static_cast<Real>(coeffs[i]) / static_cast<Real>(2 * i - 1);
    for (std::size_t j = 0; j < legendre[i].size(); ++j) {
      result[j] += scale * legendre[i][j];
    }
    for (std::size_t j = 0; j < legendre[i - 2].size(); ++j) {
      result[j] -= scale * legendre[i - 2][j];
    }
  }
  return result;
}

Real evaluate(const Poly& c, Real x) {
  Real value = 0.0L;
  for (std::size_t k = c.size(); k-- > 0;) {
    value = value * x + c[k];
  }
  return value;
}

// c[a, b] via synthetic division by (x - b), evaluated at a.
Real divided_difference(const Poly& c, Real a, Real b) {
  Real value = 0.0L;
  Real q = 0.0L;
  for (std::size_t k = c.size(); k-- > 1;) {
    q = c[k] + b * q;
    value = value * a + q;
  }
  return value;
}

double escalate(const std::function<Sample(int)>& rule_of_order, double tol, const char* what) {
  if (!(tol >= 1e-12)) {
    throw std::invalid_argument("reference tolerance must be at least 1e-12");
  }
  constexpr int first_order = 8;
  constexpr int last_order = 256;
  Sample previous = rule_of_order(first_order);
  for (int n = 2 * first_order; n <= last_order; n *= 2) {
    const Sample current = rule_of_order(n);
    const Real change = std::fabs(current.value - previous.value);
    const Real floor = 64.0L * std::numeric_limits<double>::epsilon() * current.magnitude;
    if (change <= static_cast<Real>(tol) * std::fabs(current.value) || change <= floor) {
      return static_cast<double>(current.value);
    }
    previous = current;
  }
  throw OracleFailure(std::string("reference integral did not converge by order 256: ") + what);
}

Sample identical_sample(const Element& t, const Poly& v, const Poly& w, double s, int n) {
  const auto& rx = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
  const auto& ry = cached_gauss_jacobi(n, 1.0 - 2.0 * s, 0.0);
  Sample out;
  for (int i = 0; i < n; ++i) {
    const Real x = rx.node(i);
    for (int j = 0; j < n; ++j) {
      const Real y = ry.node(j);
      const Real f = divided_difference(v, x, x * y) * divided_difference(w, x, x * y);
      const Real weight = static_cast<Real>(rx.weight(i)) * ry.weight(j);
      out.value += weight * f;
      out.magnitude += weight * std::fabs(f);
    }
  }
  const Real scale = 2.0L * std::pow(static_cast<Real>(t.h()), static_cast<Real>(1.0 - 2.0 * s));
  out.value *= scale;
  out.magnitude *= scale;
  return out;
}

struct PolyPair {
  Poly left;
  Poly right;
};

Sample adjacent_sample(const Element& tl, const Element& tr, const PolyPair& v, const PolyPair& w,
                       double s, int n) {
  const auto& gl = cached_gauss_legendre(n);
  const auto& gj = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
  const Real hl = tl.h();
  const Real hr = tr.h();
  const Real exponent = -(1.0L + 2.0L * static_cast<Real>(s));
  const Real jump_v = evaluate(v.left, 1.0L) - evaluate(v.right, 0.0L);
  const Real jump_w = evaluate(w.left, 1.0L) - evaluate(w.right, 0.0L);
  Sample out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      {
        const Real x = gj.node(i);
        const Real y = gl.node(j);
        const Real dv = -divided_difference(v.left, 1.0L - x, 1.0L) -
                        y * divided_difference(v.right, x * y, 0.0L) + jump_v / x;
        const Real dw = -divided_difference(w.left, 1.0L - x, 1.0L) -
                        y * divided_difference(w.right, x * y, 0.0L) + jump_w / x;
        const Real weight = static_cast<Real>(gj.weight(i)) * gl.weight(j) *
                            std::pow(hl + y * hr, exponent);
        out.value += weight * dv * dw;
        out.magnitude += weight * std::fabs(dv * dw);
      }
      {
        const Real x = gl.node(i);
        const Real y = gj.node(j);
        const Real dv = -x * divided_difference(v.left, 1.0L - x * y, 1.0L) -
                        divided_difference(v.right, y, 0.0L) + jump_v / y;
        const Real dw = -x * divided_difference(w.left, 1.0L - x * y, 1.0L) -
                        divided_difference(w.right, y, 0.0L) + jump_w / y;
        const Real weight = static_cast<Real>(gl.weight(i)) * gj.weight(j) *
                            std::pow(x * hl + hr, exponent);
        out.value += weight * dv * dw;
        out.magnitude += weight * std::fabs(dv * dw);
      }
    }
  }
  out.value *= hl * hr;
  out.magnitude *= hl * hr;
  return out;
}

Sample separated_sample(const Element& tl, const Element& tr, const PolyPair& v, const PolyPair& w,
                        double s, int n) {
  const auto& gl = cached_gauss_legendre(n);
  const Real hl = tl.h();
  const Real hr = tr.h();
  const Real dist = static_cast<Real>(tr.x_left) - static_cast<Real>(tl.x_right);
  const Real exponent = -(1.0L + 2.0L * static_cast<Real>(s));
  Sample out;
  for (int i = 0; i < n; ++i) {
    const Real x = gl.node(i);
    const Real vx = evaluate(v.left, x);
    const Real wx = evaluate(w.left, x);
    for (int j = 0; j < n; ++j) {
      const Real y = gl.node(j);
      const Real f = (vx - evaluate(v.right, y)) * (wx - evaluate(w.right, y));
      const Real weight = static_cast<Real>(gl.weight(i)) * gl.weight(j) *
                          std::pow((1.0L - x) * hl + dist + y * hr, exponent);
      out.value += weight * f;
      out.magnitude += weight * std::fabs(f);
    }
  }
  out.value *= hl * hr;
  out.magnitude *= hl * hr;
  return out;
}

Sample complement_sample(const Element& t, const Poly& v, const Poly& w, double s, int n) {
  const Real h = t.h();
  const Real two_s = 2.0L * static_cast<Real>(s);
  Sample out;
  auto add = [&](Real weight, Real f) {
    out.value += weight * f;
    out.magnitude += weight * std::fabs(f);
  };
  if (t.at_left_boundary) {
    const auto& gj = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
    const Real v0 = evaluate(v, 0.0L);
    const Real w0 = evaluate(w, 0.0L);
    for (int i = 0; i < n; ++i) {
      const Real x = gj.node(i);
      const Real vq = divided_difference(v, x, 0.0L) + v0 / x;
      const Real wq = divided_difference(w, x, 0.0L) + w0 / x;
      add(static_cast<Real>(gj.weight(i)) * std::pow(h, -two_s), vq * wq);
    }
  } else {
    const auto& gl = cached_gauss_legendre(n);
    const Real dist = static_cast<Real>(t.x_left) + 1.0L;
    for (int i = 0; i < n; ++i) {
      const Real x = gl.node(i);
      add(static_cast<Real>(gl.weight(i)) * std::pow(dist + x * h, -two_s),
          evaluate(v, x) * evaluate(w, x));
    }
  }
  if (t.at_right_boundary) {
    const auto& gj = cached_gauss_jacobi(n, 2.0 - 2.0 * s, 0.0);
    const Real v1 = evaluate(v, 1.0L);
    const Real w1 = evaluate(w, 1.0L);
    for (int i = 0; i < n; ++i) {
      const Real x = gj.node(i);
      const Real vq = -divided_difference(v, x, 1.0L) + v1 / (1.0L - x);
      const Real wq = -divided_difference(w, x, 1.0L) + w1 / (1.0L - x);
      add(static_cast<Real>(gj.weight(i)) * std::pow(h, -two_s), vq * wq);
    }
  } else {
    const auto& gl = cached_gauss_legendre(n);
    const Real dist = 1.0L - static_cast<Real>(t.x_right);
    for (int i = 0; i < n; ++i) {
      const Real x = gl.node(i);
      add(static_cast<Real>(gl.weight(i)) * std::pow(dist + (1.0L - x) * h, -two_s),
          evaluate(v, x) * evaluate(w, x));
    }
  }
  out.value *= h / two_s;
  out.magnitude *= h / two_s;
  return out;
}

void require_local(std::span<const double> coeffs) {
  if (coeffs.size() < 2) {
    throw std::invalid_argument("local coefficient vectors need at least the two hat entries");
  }
}

ErrorReport report(ErrorMethod method, double radicand, double extra = 0.0) {
  ErrorReport out;
  out.method = method;
  out.radicand = radicand;
  if (radicand >= 0.0) {
    out.value = std::sqrt(radicand) + extra;
  }
  return out;
}

void require_match(const StiffnessMatrix& matrix, const DiscreteSolution& sol) {
  if (sol.coeffs.size() != static_cast<std::size_t>(matrix.dimension())) {
    throw std::invalid_argument("solution and matrix belong to different spaces");
  }
}

}  // namespace

double reference_pair_integral(const Element& first, const Element& second, PairLocals v,
                               PairLocals w, FracParams params, double tol) {
  const double s = params.s();
  const PairClass cls = pair_class(first, second);
  require_local(v.first);
  require_local(w.first);
  if (cls == PairClass::Identical) {
    const Poly pv = to_monomial(v.first);
    const Poly pw = to_monomial(w.first);
    return escalate([&](int n) { return identical_sample(first, pv, pw, s, n); }, tol,
                    "identical pair");
  }
  require_local(v.second);
  require_local(w.second);
  // Put the left element first.
  const bool swap = second.x_left < first.x_left;
  const Element& tl = swap ? second : first;
  const Element& tr = swap ? first : second;
  const PolyPair pv{to_monomial(swap ? v.second : v.first), to_monomial(swap ? v.first : v.second)};
  const PolyPair pw{to_monomial(swap ? w.second : w.first), to_monomial(swap ? w.first : w.second)};
  if (cls == PairClass::Separated) {
    return escalate([&](int n) { return separated_sample(tl, tr, pv, pw, s, n); }, tol,
                    "separated pair");
  }
  return escalate([&](int n) { return adjacent_sample(tl, tr, pv, pw, s, n); }, tol,
                  "adjacent pair");
}

double reference_pair_integral(const Element& element, ComplementMarker, std::span<const double> v,
                               std::span<const double> w, FracParams params, double tol) {
  require_local(v);
  require_local(w);
  const Poly pv = to_monomial(v);
  const Poly pw = to_monomial(w);
  return escalate([&](int n) { return complement_sample(element, pv, pw, params.s(), n); }, tol,
                  "exterior term");
}

const char* to_string(ErrorMethod method) noexcept {
  switch (method) {
    case ErrorMethod::M1:
      return "M1";
    case ErrorMethod::M2:
      return "M2";
    case ErrorMethod::M3:
      return "M3";
  }
  return "?";
}

ErrorReport error_method1(const StiffnessMatrix& matrix_n, const DiscreteSolution& sol,
                          double a_exact) {
  require_match(matrix_n, sol);
  return report(ErrorMethod::M1, a_exact - energy(matrix_n, sol.coeffs, sol.coeffs));
}

ErrorReport error_method2(const StiffnessMatrix& matrix_m, const DiscreteSolution& sol,
                          double a_exact) {
  require_match(matrix_m, sol);
  return report(ErrorMethod::M2, a_exact - energy(matrix_m, sol.coeffs, sol.coeffs));
}

ErrorReport error_method3(const StiffnessMatrix& matrix_m, const DiscreteSolution& sol_n,
                          const DiscreteSolution& sol_ref, double a_exact) {
  require_match(matrix_m, sol_n);
  require_match(matrix_m, sol_ref);
  std::vector<double> delta(sol_n.coeffs.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = sol_ref.coeffs[i] - sol_n.coeffs[i];
  }
  // A_m is positive definite; clamp roundoff below zero.
  const double implementation = std::sqrt(std::max(0.0, energy(matrix_m, delta, delta)));
  return report(ErrorMethod::M3, a_exact - energy(matrix_m, sol_ref.coeffs, sol_ref.coeffs),
                implementation);
}

ErrorReport error_method1(const Space& space, const DiscreteSolution& sol, double a_exact,
                          FracParams params, int n) {
  return error_method1(assemble_stiffness(space, params, n), sol, a_exact);
}

ErrorReport error_method2(const Space& space, const DiscreteSolution& sol, double a_exact,
                          FracParams params, int m) {
  return error_method2(assemble_stiffness(space, params, m), sol, a_exact);
}

ErrorReport error_method3(const Space& space, const DiscreteSolution& sol_n,
                          const DiscreteSolution& sol_ref, double a_exact, FracParams params,
                          int m) {
  return error_method3(assemble_stiffness(space, params, m), sol_n, sol_ref, a_exact);
}

double pair_quadrature(const Element& first, const Element& second, PairLocals v, PairLocals w,
                       int n, FracParams params, OpCounter* counter) {
  switch (pair_class(first, second)) {
    case PairClass::Identical:
      return q_identical(first, v.first, w.first, n, params, counter);
    case PairClass::Separated:
      return q_separated(first, second, v, w, n, params, counter);
    default:
      return q_adjacent(first, second, v, w, n, params, counter);
  }
}

double elementwise_quadrature_error(const Element& first, const Element& second, PairLocals v,
                                    PairLocals w, FracParams params, int n, int n_ref) {
  return std::fabs(pair_quadrature(first, second, v, w, n, params) -
                   pair_quadrature(first, second, v, w, n_ref, params));
}

}  // namespace fraclap
