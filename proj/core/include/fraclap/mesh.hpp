#pragma once

#include <span>
#include <variant>
#include <vector>

namespace fraclap {

/// Element T = (x_left, x_right) of a mesh of (-1, 1). Node indices identify
/// neighbours; coordinates are never compared for adjacency.
struct Element {
  int index = 0;
  int left_node = 0;
  int right_node = 1;
  double x_left = -1.0;
  double x_right = 1.0;
  bool at_left_boundary = false;   // left node is -1
  bool at_right_boundary = false;  // right node is 1

  [[nodiscard]] double h() const noexcept { return x_right - x_left; }
};

class Mesh1D {
 public:
  /// Nodes must be strictly increasing from -1 to 1 with at least one element.
  explicit Mesh1D(std::vector<double> nodes);

  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<Element>& elements() const noexcept { return elements_; }
  [[nodiscard]] const Element& element(int i) const { return elements_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] int num_elements() const noexcept { return static_cast<int>(elements_.size()); }
  [[nodiscard]] int num_nodes() const noexcept { return static_cast<int>(nodes_.size()); }

 private:
  std::vector<double> nodes_;
  std::vector<Element> elements_;
};

/// Uniform mesh of (-1, 1) with `num_elements` elements.
[[nodiscard]] Mesh1D uniform_mesh(int num_elements);

/// Geometric mesh with L layers of refinement towards both endpoints and
/// grading factor sigma: 2L + 2 elements, nodes
/// -1, -1 + sigma^L, ..., -1 + sigma, 0, 1 - sigma, ..., 1 - sigma^L, 1.
[[nodiscard]] Mesh1D geometric_mesh(int layers, double sigma);

/// Largest gamma with gamma h_i <= h_j for all neighbouring elements.
[[nodiscard]] double shape_regularity(const Mesh1D& mesh);

/// Affine element map F_T(s) = x_left + s h_T.
[[nodiscard]] double element_map(const Element& element, double s_hat) noexcept;

struct Hat {
  int node = 0;
  friend bool operator==(const Hat&, const Hat&) = default;
};

struct Bubble {
  int element = 0;
  int degree = 2;
  friend bool operator==(const Bubble&, const Bubble&) = default;
};

using BasisFunction = std::variant<Hat, Bubble>;

/// S^{p,1}_0 on a mesh: hats at interior nodes followed by element bubbles,
/// element-major, degree-minor.
class Space {
 public:
  Space(Mesh1D mesh, int p);

  [[nodiscard]] const Mesh1D& mesh() const noexcept { return mesh_; }
  [[nodiscard]] int degree() const noexcept { return p_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(basis_.size()); }
  [[nodiscard]] const std::vector<BasisFunction>& basis() const noexcept { return basis_; }

  /// Global index of local shape function k (0 = left hat, 1 = right hat,
  /// k >= 2 = bubble of degree k) on an element, or -1 if the local function
  /// belongs to a boundary node and is not a degree of freedom.
  [[nodiscard]] int global_index(int element, int local) const;

  /// Elements on which basis function i is nonzero (one or two, ascending).
  [[nodiscard]] std::vector<int> support(int i) const;

  /// Coefficient vector (length p + 1) of basis function i restricted to an element.
  [[nodiscard]] std::vector<double> local_coefficients(int i, int element) const;

 private:
  Mesh1D mesh_;
  int p_;
  std::vector<BasisFunction> basis_;
  std::vector<int> local_to_global_;  // num_elements x (p + 1)
};

[[nodiscard]] Space build_space(Mesh1D mesh, int p);

/// Marker for the exterior Omega^c = R \ [-1, 1].
struct ComplementMarker {};

enum class PairClass { Identical, AdjacentLeftRight, AdjacentRightLeft, Separated, Complement };

/// AdjacentLeftRight: `first` is the left neighbour of `second`.
[[nodiscard]] PairClass pair_class(const Element& first, const Element& second) noexcept;
[[nodiscard]] PairClass pair_class(const Element& first, ComplementMarker) noexcept;

/// Gap between two separated elements, from their facing node coordinates.
[[nodiscard]] double element_distance(const Element& first, const Element& second) noexcept;

}  // namespace fraclap
