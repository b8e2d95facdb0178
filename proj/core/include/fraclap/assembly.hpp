#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fraclap/mesh.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

/// Work counters for one assembly. `multiply_adds` counts every multiply-add
/// the assembly performs: shape-function recurrences, coefficient dot
/// products, weight products and accumulations into quadrature sums.
struct OpCounter {
  std::uint64_t kernel_evals = 0;
  std::uint64_t multiply_adds = 0;

  OpCounter& operator+=(const OpCounter& other) noexcept {
    kernel_evals += other.kernel_evals;
    multiply_adds += other.multiply_adds;
    return *this;
  }
};

/// Dense symmetric Galerkin matrix A_ij = a_n(phi_j, phi_i). Entry (i, j) and
/// (j, i) are the same stored value written twice.
class StiffnessMatrix {
 public:
  StiffnessMatrix(int dimension, int quad_order, double s);

  [[nodiscard]] int dimension() const noexcept { return n_; }
  [[nodiscard]] int quad_order() const noexcept { return quad_order_; }
  [[nodiscard]] double s() const noexcept { return s_; }

  [[nodiscard]] double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(j)];
  }
  [[nodiscard]] std::span<const double> row(int i) const {
    return std::span<const double>(entries_).subspan(
        static_cast<std::size_t>(i) * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_));
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return entries_; }

  /// Writes value to (i, j) and (j, i).
  void set_symmetric(int i, int j, double value);

 private:
  int n_;
  int quad_order_;
  double s_;
  std::vector<double> entries_;
};

struct LoadVector {
  std::vector<double> entries;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(entries.size()); }
};

/// Restriction of one function to an element pair: local coefficients on the
/// first and on the second element.
struct PairLocals {
  std::span<const double> first;
  std::span<const double> second;
};

/// Q^n_{T,T}(v, w): Duffy-transformed Gauss-Jacobi rule in both variables.
/// The difference quotient is evaluated as a divided difference, so no
/// division by x - xy ever happens.
[[nodiscard]] double q_identical(const Element& element, std::span<const double> v,
                                 std::span<const double> w, int n, FracParams params,
                                 OpCounter* counter = nullptr);

/// Q^n_{T,T'}(v, w) for neighbouring elements. If `second` is the left
/// neighbour the roles are swapped internally. A jump of v across the shared
/// node enters as an explicit remainder term; the exact integral is finite
/// with a jump only for s < 1/2.
[[nodiscard]] double q_adjacent(const Element& first, const Element& second, PairLocals v,
                                PairLocals w, int n, FracParams params,
                                OpCounter* counter = nullptr);

/// Q^n_{T,T'}(v, w) for elements with positive distance: tensor Gauss-Legendre.
[[nodiscard]] double q_separated(const Element& first, const Element& second, PairLocals v,
                                 PairLocals w, int n, FracParams params,
                                 OpCounter* counter = nullptr);

/// Q^n_{T,Omega^c}(v, w), the exterior contribution with the inner integral
/// done in closed form. Sides touching the boundary use Gauss-Jacobi.
[[nodiscard]] double q_complement(const Element& element, std::span<const double> v,
                                  std::span<const double> w, int n, FracParams params,
                                  OpCounter* counter = nullptr);

/// b_i = sum_T h_T GL_n(phi_i f) element by element.
[[nodiscard]] LoadVector assemble_load(const Space& space, const std::function<double(double)>& f,
                                       int n);

enum class AssemblyMode {
  /// Element-pair blocks with kernel matrices reused across basis functions.
  Blockwise,
  /// One quadrature evaluation per pair of global basis functions.
  Naive,
};

struct AssemblyOptions {
  AssemblyMode mode = AssemblyMode::Blockwise;
  /// Worker threads for the blockwise mode. The result does not depend on it.
  int threads = 1;
};

/// Galerkin matrix of the quadrature-approximated bilinear form a_n.
[[nodiscard]] StiffnessMatrix assemble_stiffness(const Space& space, FracParams params, int n,
                                                 OpCounter* counter = nullptr,
                                                 AssemblyOptions options = {});

}  // namespace fraclap
