#pragma once

#include <optional>
#include <span>
#include <stdexcept>

#include "fraclap/assembly.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

/// The reference integral did not settle before the order cap.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// High-accuracy value of I_{T,T'}(v, w), normalised like the q_* functions
/// (no C(s)/2 factor). Uses its own monomial-basis evaluation in long double
/// and doubles the quadrature order from 8 until two successive values agree
/// to `tol` relative, or to a roundoff floor. Throws OracleFailure past 256.
[[nodiscard]] double reference_pair_integral(const Element& first, const Element& second,
                                             PairLocals v, PairLocals w, FracParams params,
                                             double tol = 1e-12);

/// Same for the exterior term I_{T,Omega^c}(v, w).
[[nodiscard]] double reference_pair_integral(const Element& element, ComplementMarker,
                                             std::span<const double> v,
                                             std::span<const double> w, FracParams params,
                                             double tol = 1e-12);

enum class ErrorMethod { M1, M2, M3 };

[[nodiscard]] const char* to_string(ErrorMethod method) noexcept;

/// `value` is empty exactly when the radicand is negative: the discrete
/// energy overshoots the exact one and no error can be reported.
struct ErrorReport {
  ErrorMethod method = ErrorMethod::M1;
  std::optional<double> value;
  double radicand = 0.0;
};

/// sqrt(a(u,u) - a_n(u_n, u_n)) with the matrix the solution was computed from.
[[nodiscard]] ErrorReport error_method1(const StiffnessMatrix& matrix_n,
                                        const DiscreteSolution& sol, double a_exact);

/// sqrt(a(u,u) - a_m(u_n, u_n)) with a matrix of higher order m.
[[nodiscard]] ErrorReport error_method2(const StiffnessMatrix& matrix_m,
                                        const DiscreteSolution& sol, double a_exact);

/// sqrt(a(u,u) - a_m(u_m, u_m)) + sqrt(a_m(u_m - u_n, u_m - u_n)).
[[nodiscard]] ErrorReport error_method3(const StiffnessMatrix& matrix_m,
                                        const DiscreteSolution& sol_n,
                                        const DiscreteSolution& sol_ref, double a_exact);

/// Convenience forms that assemble the needed matrix first.
[[nodiscard]] ErrorReport error_method1(const Space& space, const DiscreteSolution& sol,
                                        double a_exact, FracParams params, int n);
[[nodiscard]] ErrorReport error_method2(const Space& space, const DiscreteSolution& sol,
                                        double a_exact, FracParams params, int m);
[[nodiscard]] ErrorReport error_method3(const Space& space, const DiscreteSolution& sol_n,
                                        const DiscreteSolution& sol_ref, double a_exact,
                                        FracParams params, int m);

/// Production quadrature for one element pair, dispatched on the pair class.
[[nodiscard]] double pair_quadrature(const Element& first, const Element& second, PairLocals v,
                                     PairLocals w, int n, FracParams params,
                                     OpCounter* counter = nullptr);

/// |Q^n - Q^{n_ref}| for one element pair.
[[nodiscard]] double elementwise_quadrature_error(const Element& first, const Element& second,
                                                  PairLocals v, PairLocals w, FracParams params,
                                                  int n, int n_ref);

}  // namespace fraclap
