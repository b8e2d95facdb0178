#include "fraclap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclap {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("mesh needs at least two nodes");
  }
  if (nodes_.front() != -1.0 || nodes_.back() != 1.0) {
    throw std::invalid_argument("mesh must span exactly (-1, 1)");
  }
  const int m = static_cast<int>(nodes_.size()) - 1;
  elements_.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double left = nodes_[static_cast<std::size_t>(i)];
    const double right = nodes_[static_cast<std::size_t>(i + 1)];
    if (!(right > left)) {
      throw std::invalid_argument("mesh nodes must be strictly increasing (element " +
                                  std::to_string(i) + ")");
    }
    elements_.push_back(Element{i, i, i + 1, left, right, i == 0, i + 1 == m});
  }
}

Mesh1D uniform_mesh(int num_elements) {
  if (num_elements < 1) {
    throw std::invalid_argument("uniform_mesh: need at least one element");
  }
  std::vector<double> nodes(static_cast<std::size_t>(num_elements + 1));
  for (int i = 0; i <= num_elements; ++i) {
    nodes[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / num_elements;
  }
  nodes.back() = 1.0;
  return Mesh1D(std::move(nodes));
}

Mesh1D geometric_mesh(int layers, double sigma) {
  if (layers < 1) {
    throw std::invalid_argument("geometric_mesh: need at least one layer");
  }
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("geometric_mesh: grading factor must lie in (0, 1)");
  }
  const int l = layers;
  std::vector<double> nodes(static_cast<std::size_t>(2 * l + 3));
  nodes[0] = -1.0;
  for (int i = 1; i <= l; ++i) {
    nodes[static_cast<std::size_t>(i)] = -1.0 + std::pow(sigma, l - i + 1);
  }
  for (int i = l; i <= 2 * l; ++i) {
    nodes[static_cast<std::size_t>(i + 1)] = 1.0 - std::pow(sigma, i - l);
  }
  nodes[static_cast<std::size_t>(2 * l + 2)] = 1.0;
  return Mesh1D(std::move(nodes));
}

double shape_regularity(const Mesh1D& mesh) {
  double gamma = 1.0;
  const auto& elements = mesh.elements();
  for (std::size_t i = 0; i + 1 < elements.size(); ++i) {
    const double hl = elements[i].h();
    const double hr = elements[i + 1].h();
    gamma = std::min(gamma, std::min(hl / hr, hr / hl));
  }
  return gamma;
}

double element_map(const Element& element, double s_hat) noexcept {
  return element.x_left + s_hat * element.h();
}

Space::Space(Mesh1D mesh, int p) : mesh_(std::move(mesh)), p_(p) {
  if (p < 1) {
    throw std::invalid_argument("polynomial degree must be at least 1");
  }
  const int m = mesh_.num_elements();
  const auto width = static_cast<std::size_t>(p + 1);
  local_to_global_.assign(static_cast<std::size_t>(m) * width, -1);
  for (int node = 1; node < m; ++node) {
    const int idx = static_cast<int>(basis_.size());
    basis_.push_back(Hat{node});
    local_to_global_[static_cast<std::size_t>(node - 1) * width + 1] = idx;
    local_to_global_[static_cast<std::size_t>(node) * width + 0] = idx;
  }
  for (int e = 0; e < m; ++e) {
    for (int k = 2; k <= p; ++k) {
      local_to_global_[static_cast<std::size_t>(e) * width + static_cast<std::size_t>(k)] =
          static_cast<int>(basis_.size());
      basis_.push_back(Bubble{e, k});
    }
  }
}

int Space::global_index(int element, int local) const {
  return local_to_global_.at(static_cast<std::size_t>(element) * static_cast<std::size_t>(p_ + 1) +
                             static_cast<std::size_t>(local));
}

std::vector<int> Space::support(int i) const {
  const auto& f = basis_.at(static_cast<std::size_t>(i));
  if (const auto* hat = std::get_if<Hat>(&f)) {
    return {hat->node - 1, hat->node};
  }
  return {std::get<Bubble>(f).element};
}

std::vector<double> Space::local_coefficients(int i, int element) const {
  std::vector<double> coeffs(static_cast<std::size_t>(p_ + 1), 0.0);
  for (int k = 0; k <= p_; ++k) {
    if (global_index(element, k) == i) {
      coeffs[static_cast<std::size_t>(k)] = 1.0;
    }
  }
  return coeffs;
}

Space build_space(Mesh1D mesh, int p) { return Space(std::move(mesh), p); }

PairClass pair_class(const Element& first, const Element& second) noexcept {
  if (first.index == second.index) {
    return PairClass::Identical;
  }
  if (first.right_node == second.left_node) {
    return PairClass::AdjacentLeftRight;
  }
  if (first.left_node == second.right_node) {
    return PairClass::AdjacentRightLeft;
  }
  return PairClass::Separated;
}

PairClass pair_class(const Element&, ComplementMarker) noexcept { return PairClass::Complement; }

double element_distance(const Element& first, const Element& second) noexcept {
  return first.x_right <= second.x_left ? second.x_left - first.x_right
                                        : first.x_left - second.x_right;
}

}  // namespace fraclap
