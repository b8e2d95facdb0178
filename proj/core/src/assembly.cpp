#include "fraclap/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "fraclap/polynomials.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

StiffnessMatrix::StiffnessMatrix(int dimension, int quad_order, double s)
    : n_(dimension),
      quad_order_(quad_order),
      s_(s),
      entries_(static_cast<std::size_t>(dimension) * static_cast<std::size_t>(dimension), 0.0) {
  if (dimension < 0) {
    throw std::invalid_argument("stiffness matrix dimension must be nonnegative");
  }
}

void StiffnessMatrix::set_symmetric(int i, int j, double value) {
  const auto n = static_cast<std::size_t>(n_);
  entries_[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = value;
  entries_[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)] = value;
}

namespace {

void check_order(int n) {
  if (n < 1) {
    throw std::invalid_argument("quadrature order must be at least 1, got " + std::to_string(n));
  }
}

void check_local(std::span<const double> coeffs) {
  if (coeffs.size() < 2) {
    throw std::invalid_argument("local coefficient vectors need at least the two hat entries");
  }
}

int common_degree(std::span<const double> a, std::span<const double> b) {
  return static_cast<int>(std::max(a.size(), b.size())) - 1;
}

double dot(std::span<const double> coeffs, const std::vector<double>& psi) {
  double value = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    value += coeffs[k] * psi[k];
  }
  return value;
}

std::uint64_t width(int p) { return static_cast<std::uint64_t>(p + 1); }

void count(OpCounter* counter, std::uint64_t kernel_evals, std::uint64_t multiply_adds) {
  if (counter != nullptr) {
    counter->kernel_evals += kernel_evals;
    counter->multiply_adds += multiply_adds;
  }
}

// Local polynomials take the value coeffs[0] at s = 0 and coeffs[1] at s = 1.
double value_at_zero(std::span<const double> coeffs) { return coeffs[0]; }
double value_at_one(std::span<const double> coeffs) { return coeffs[1]; }

}  // namespace

double q_identical(const Element& element, std::span<const double> v, std::span<const double> w,
                   int n, FracParams params, OpCounter* counter) {
  check_order(n);
  check_local(v);
  check_local(w);
  const double s = params.s();
  const auto& rule_x = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
  const auto& rule_y = cached_gauss_jacobi(n, 1.0 - 2.0 * s, 0.0);
  const int p = common_degree(v, w);
  std::vector<double> psi(static_cast<std::size_t>(p + 1));

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rule_x.node(i);
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      shape_divided_differences(p, x, x * rule_y.node(j), psi);
      inner += rule_y.weight(j) * dot(v, psi) * dot(w, psi);
    }
    sum += rule_x.weight(i) * inner;
  }
  const auto nn = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  count(counter, 0, nn * (width(p) + v.size() + w.size() + 1) + static_cast<std::uint64_t>(n));
  return 2.0 * std::pow(element.h(), 1.0 - 2.0 * s) * sum;
}

double q_adjacent(const Element& first, const Element& second, PairLocals v, PairLocals w, int n,
                  FracParams params, OpCounter* counter) {
  const PairClass cls = pair_class(first, second);
  if (cls == PairClass::AdjacentRightLeft) {
    return q_adjacent(second, first, PairLocals{v.second, v.first},
                      PairLocals{w.second, w.first}, n, params, counter);
  }
  if (cls != PairClass::AdjacentLeftRight) {
    throw std::invalid_argument("q_adjacent: elements do not share a node");
  }
  check_order(n);
  check_local(v.first);
  check_local(v.second);
  check_local(w.first);
  check_local(w.second);

  const double s = params.s();
  const double exponent = -(1.0 + 2.0 * s);
  const double h_left = first.h();
  const double h_right = second.h();
  const auto& gl = cached_gauss_legendre(n);
  const auto& gj = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
  const int p = std::max(common_degree(v.first, w.first), common_degree(v.second, w.second));
  std::vector<double> psi_left(static_cast<std::size_t>(p + 1));
  std::vector<double> psi_right(static_cast<std::size_t>(p + 1));

  // Zero for conforming inputs; otherwise the quotient keeps its 1/x remainder.
  const double jump_v = value_at_one(v.first) - value_at_zero(v.second);
  const double jump_w = value_at_one(w.first) - value_at_zero(w.second);

  // (v_T(1 - x) - v_T'(xy)) / x = -v_T[1 - x, 1] - y v_T'[xy, 0] + jump / x
  double first_term = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = gj.node(i);
    shape_divided_differences(p, 1.0 - x, 1.0, psi_left);
    const double dv_left = dot(v.first, psi_left);
    const double dw_left = dot(w.first, psi_left);
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      const double y = gl.node(j);
      shape_divided_differences(p, x * y, 0.0, psi_right);
      const double dv = -dv_left - y * dot(v.second, psi_right) + jump_v / x;
      const double dw = -dw_left - y * dot(w.second, psi_right) + jump_w / x;
      const double kernel = std::pow(h_left + y * h_right, exponent);
      inner += gl.weight(j) * kernel * dv * dw;
    }
    first_term += gj.weight(i) * inner;
  }

  // (v_T(1 - xy) - v_T'(y)) / y = -x v_T[1 - xy, 1] - v_T'[y, 0] + jump / y
  double second_term = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = gl.node(i);
    const double kernel = std::pow(x * h_left + h_right, exponent);
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      const double y = gj.node(j);
      shape_divided_differences(p, 1.0 - x * y, 1.0, psi_left);
      shape_divided_differences(p, y, 0.0, psi_right);
      const double dv = -x * dot(v.first, psi_left) - dot(v.second, psi_right) + jump_v / y;
      const double dw = -x * dot(w.first, psi_left) - dot(w.second, psi_right) + jump_w / y;
      inner += gj.weight(j) * kernel * dv * dw;
    }
    second_term += gl.weight(i) * inner;
  }

  const auto nu = static_cast<std::uint64_t>(n);
  const std::uint64_t left_dots = v.first.size() + w.first.size();
  const std::uint64_t right_dots = v.second.size() + w.second.size();
  const std::uint64_t first_cost =
      nu * (width(p) + left_dots + 1) + nu * nu * (width(p) + right_dots + 1);
  const std::uint64_t second_cost = nu * nu * (2 * width(p) + left_dots + right_dots + 1) + nu;
  count(counter, nu + nu * nu, first_cost + second_cost);
  return h_left * h_right * (first_term + second_term);
}

double q_separated(const Element& first, const Element& second, PairLocals v, PairLocals w, int n,
                   FracParams params, OpCounter* counter) {
  if (pair_class(first, second) != PairClass::Separated) {
    throw std::invalid_argument("q_separated: elements touch");
  }
  if (second.x_left < first.x_left) {
    return q_separated(second, first, PairLocals{v.second, v.first},
                       PairLocals{w.second, w.first}, n, params, counter);
  }
  check_order(n);
  check_local(v.first);
  check_local(v.second);
  check_local(w.first);
  check_local(w.second);

  const double exponent = -(1.0 + 2.0 * params.s());
  const double h_first = first.h();
  const double h_second = second.h();
  const double dist = element_distance(first, second);
  const auto& gl = cached_gauss_legendre(n);
  const int p = std::max(common_degree(v.first, w.first), common_degree(v.second, w.second));
  std::vector<double> psi(static_cast<std::size_t>(p + 1));

  const auto nu = static_cast<std::size_t>(n);
  std::vector<double> v_first(nu), w_first(nu), v_second(nu), w_second(nu);
  for (std::size_t q = 0; q < nu; ++q) {
    shape_values(p, gl.node(static_cast<int>(q)), psi);
    v_first[q] = dot(v.first, psi);
    w_first[q] = dot(w.first, psi);
    v_second[q] = dot(v.second, psi);
    w_second[q] = dot(w.second, psi);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    const double x = gl.node(static_cast<int>(i));
    double inner = 0.0;
    for (std::size_t j = 0; j < nu; ++j) {
      const double y = gl.node(static_cast<int>(j));
      const double kernel = std::pow((1.0 - x) * h_first + dist + y * h_second, exponent);
      inner += gl.weight(static_cast<int>(j)) * kernel * (v_first[i] - v_second[j]) *
               (w_first[i] - w_second[j]);
    }
    sum += gl.weight(static_cast<int>(i)) * inner;
  }
  const auto nn = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  const std::uint64_t dots = v.first.size() + w.first.size() + v.second.size() + w.second.size();
  count(counter, nn, static_cast<std::uint64_t>(n) * (width(p) + dots + 1) + nn);
  return h_first * h_second * sum;
}

double q_complement(const Element& element, std::span<const double> v, std::span<const double> w,
                    int n, FracParams params, OpCounter* counter) {
  check_order(n);
  check_local(v);
  check_local(w);
  const double s = params.s();
  const double h = element.h();
  const int p = common_degree(v, w);
  std::vector<double> psi(static_cast<std::size_t>(p + 1));
  std::uint64_t kernel_evals = 0;

  // Left exterior (-inf, -1).
  double left = 0.0;
  if (element.at_left_boundary) {
    // v(x) / x = v[x, 0] + v(0) / x
    const auto& gj = cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * s);
    for (int i = 0; i < n; ++i) {
      const double x = gj.node(i);
      shape_divided_differences(p, x, 0.0, psi);
      const double vq = dot(v, psi) + value_at_zero(v) / x;
      const double wq = dot(w, psi) + value_at_zero(w) / x;
      left += gj.weight(i) * vq * wq;
    }
    left *= std::pow(h, -2.0 * s);
  } else {
    const auto& gl = cached_gauss_legendre(n);
    const double dist = element.x_left + 1.0;
    for (int i = 0; i < n; ++i) {
      const double x = gl.node(i);
      shape_values(p, x, psi);
      left += gl.weight(i) * dot(v, psi) * dot(w, psi) * std::pow(dist + x * h, -2.0 * s);
    }
    kernel_evals += static_cast<std::uint64_t>(n);
  }

  // Right exterior (1, inf).
  double right = 0.0;
  if (element.at_right_boundary) {
    // v(x) / (1 - x) = -v[x, 1] + v(1) / (1 - x)
    const auto& gj = cached_gauss_jacobi(n, 2.0 - 2.0 * s, 0.0);
    for (int i = 0; i < n; ++i) {
      const double x = gj.node(i);
      shape_divided_differences(p, x, 1.0, psi);
      const double vq = -dot(v, psi) + value_at_one(v) / (1.0 - x);
      const double wq = -dot(w, psi) + value_at_one(w) / (1.0 - x);
      right += gj.weight(i) * vq * wq;
    }
    right *= std::pow(h, -2.0 * s);
  } else {
    const auto& gl = cached_gauss_legendre(n);
    const double dist = 1.0 - element.x_right;
    for (int i = 0; i < n; ++i) {
      const double x = gl.node(i);
      shape_values(p, x, psi);
      right += gl.weight(i) * dot(v, psi) * dot(w, psi) * std::pow(dist + (1.0 - x) * h, -2.0 * s);
    }
    kernel_evals += static_cast<std::uint64_t>(n);
  }

  count(counter, kernel_evals,
        2 * static_cast<std::uint64_t>(n) * (width(p) + v.size() + w.size() + 1));
  return h / (2.0 * s) * (left + right);
}

LoadVector assemble_load(const Space& space, const std::function<double(double)>& f, int n) {
  check_order(n);
  const int p = space.degree();
  const auto& gl = cached_gauss_legendre(n);
  const ShapeTable table = shape_table(p, gl.nodes());
  LoadVector load{std::vector<double>(static_cast<std::size_t>(space.dimension()), 0.0)};
  std::vector<double> weighted_f(static_cast<std::size_t>(n));
  for (const Element& element : space.mesh().elements()) {
    for (int q = 0; q < n; ++q) {
      weighted_f[static_cast<std::size_t>(q)] = gl.weight(q) * f(element_map(element, gl.node(q)));
    }
    for (int k = 0; k <= p; ++k) {
      const int g = space.global_index(element.index, k);
      if (g < 0) {
        continue;
      }
      double sum = 0.0;
      for (int q = 0; q < n; ++q) {
        sum += weighted_f[static_cast<std::size_t>(q)] * table(k, q);
      }
      load.entries[static_cast<std::size_t>(g)] += element.h() * sum;
    }
  }
  return load;
}

namespace {

// Upper-triangle contribution (i <= j) to the unscaled sum of pair terms.
struct Contribution {
  int i;
  int j;
  double value;
};

void push_symmetric(std::vector<Contribution>& out, int a, int b, double value) {
  out.push_back(Contribution{std::min(a, b), std::max(a, b), value});
}

// Dense (rows x cols) table.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Element-pair assembly with all reference-element evaluations tabulated once.
class BlockwiseAssembler {
 public:
  BlockwiseAssembler(const Space& space, FracParams params, int n)
      : space_(space),
        s_(params.s()),
        exponent_(-(1.0 + 2.0 * params.s())),
        p_(space.degree()),
        n_(static_cast<std::size_t>(n)),
        gl_(cached_gauss_legendre(n)),
        gj_(cached_gauss_jacobi(n, 0.0, 2.0 - 2.0 * params.s())),
        gj_duffy_(cached_gauss_jacobi(n, 1.0 - 2.0 * params.s(), 0.0)),
        gj_right_(cached_gauss_jacobi(n, 2.0 - 2.0 * params.s(), 0.0)) {
    tabulate();
  }

  [[nodiscard]] const OpCounter& precompute_cost() const noexcept { return precompute_cost_; }

  // All pair terms (T, T') with T' >= T plus the exterior term of T.
  void row(int t, std::vector<Contribution>& out, OpCounter& counter) const {
    const int m = space_.mesh().num_elements();
    identical(t, out);
    for (int u = t + 1; u < m; ++u) {
      if (u == t + 1) {
        adjacent(t, u, out, counter);
      } else {
        separated(t, u, out, counter);
      }
    }
    complement(t, out, counter);
  }

 private:
  [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(p_ + 1); }

  void tabulate() {
    const std::size_t w = width();
    const std::size_t nn = n_ * n_;
    std::vector<double> psi(w);
    auto recur = [&] { precompute_cost_.multiply_adds += w; };

    // Identical pairs: element-independent Gram matrix of psi[x, xy].
    Table duffy(w, nn);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double x = gj_.node(static_cast<int>(i));
        recur(); shape_divided_differences(p_, x, x * gj_duffy_.node(static_cast<int>(j)), psi);
        for (std::size_t k = 0; k < w; ++k) {
          duffy(k, i * n_ + j) = psi[k];
        }
      }
    }
    identical_gram_ = Table(w, w);
    for (std::size_t a = 0; a < w; ++a) {
      for (std::size_t b = a; b < w; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          double inner = 0.0;
          for (std::size_t j = 0; j < n_; ++j) {
            inner += gj_duffy_.weight(static_cast<int>(j)) * duffy(a, i * n_ + j) *
                     duffy(b, i * n_ + j);
          }
          sum += gj_.weight(static_cast<int>(i)) * inner;
        }
        identical_gram_(a, b) = sum;
        identical_gram_(b, a) = sum;
        precompute_cost_.multiply_adds += nn;
      }
    }

    // Adjacent pairs, composite points on the reference square.
    adj1_left_ = Table(w, n_);
    adj1_right_ = Table(w, nn);
    adj2_left_ = Table(w, nn);
    adj2_right_ = Table(w, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double xj = gj_.node(static_cast<int>(i));
      recur(); shape_divided_differences(p_, 1.0 - xj, 1.0, psi);
      for (std::size_t k = 0; k < w; ++k) {
        adj1_left_(k, i) = psi[k];
      }
      recur(); shape_divided_differences(p_, xj, 0.0, psi);
      for (std::size_t k = 0; k < w; ++k) {
        adj2_right_(k, i) = psi[k];
      }
      for (std::size_t j = 0; j < n_; ++j) {
        const double xg = gl_.node(static_cast<int>(j));
        recur(); shape_divided_differences(p_, xj * xg, 0.0, psi);
        for (std::size_t k = 0; k < w; ++k) {
          adj1_right_(k, i * n_ + j) = psi[k];
        }
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = gl_.node(static_cast<int>(i));
      for (std::size_t j = 0; j < n_; ++j) {
        recur(); shape_divided_differences(p_, 1.0 - x * gj_.node(static_cast<int>(j)), 1.0, psi);
        for (std::size_t k = 0; k < w; ++k) {
          adj2_left_(k, i * n_ + j) = psi[k];
        }
      }
    }

    // Plain and weighted shape values at Gauss-Legendre nodes.
    const ShapeTable values = shape_table(p_, gl_.nodes());
    precompute_cost_.multiply_adds += w * n_ * 2;
    gl_values_ = Table(w, n_);
    gl_weighted_ = Table(w, n_);
    for (std::size_t k = 0; k < w; ++k) {
      for (std::size_t q = 0; q < n_; ++q) {
        gl_values_(k, q) = values(static_cast<int>(k), static_cast<int>(q));
        gl_weighted_(k, q) = gl_.weight(static_cast<int>(q)) * gl_values_(k, q);
      }
    }

    // Boundary quotients psi(x) / x and psi(x) / (1 - x) for functions that
    // vanish at the boundary node.
    boundary_left_ = Table(w, n_);
    boundary_right_ = Table(w, n_);
    for (std::size_t q = 0; q < n_; ++q) {
      recur(); shape_divided_differences(p_, gj_.node(static_cast<int>(q)), 0.0, psi);
      for (std::size_t k = 0; k < w; ++k) {
        boundary_left_(k, q) = psi[k];
      }
      recur(); shape_divided_differences(p_, gj_right_.node(static_cast<int>(q)), 1.0, psi);
      for (std::size_t k = 0; k < w; ++k) {
        boundary_right_(k, q) = -psi[k];
      }
    }
  }

  // Local shape functions of an element that are degrees of freedom.
  [[nodiscard]] std::vector<int> active(int t) const {
    std::vector<int> locals;
    for (int k = 0; k <= p_; ++k) {
      if (space_.global_index(t, k) >= 0) {
        locals.push_back(k);
      }
    }
    return locals;
  }

  void identical(int t, std::vector<Contribution>& out) const {
    const Element& element = space_.mesh().element(t);
    const double scale = 2.0 * std::pow(element.h(), 1.0 - 2.0 * s_);
    const auto locals = active(t);
    for (std::size_t a = 0; a < locals.size(); ++a) {
      for (std::size_t b = a; b < locals.size(); ++b) {
        const auto ka = static_cast<std::size_t>(locals[a]);
        const auto kb = static_cast<std::size_t>(locals[b]);
        push_symmetric(out, space_.global_index(t, locals[a]), space_.global_index(t, locals[b]),
                       scale * identical_gram_(ka, kb));
      }
    }
  }

  struct PairFunction {
    int global;
    int on_left;   // local index on the left element, or -1
    int on_right;  // local index on the right element, or -1
  };

  void adjacent(int t, int u, std::vector<Contribution>& out, OpCounter& counter) const {
    const Element& left = space_.mesh().element(t);
    const Element& right = space_.mesh().element(u);
    const double h_left = left.h();
    const double h_right = right.h();

    // Global functions restricted to the pair; each is continuous across the
    // shared node, so the difference quotients carry no remainder.
    std::vector<PairFunction> functions;
    for (int k : active(t)) {
      functions.push_back(PairFunction{space_.global_index(t, k), k, -1});
    }
    for (int k : active(u)) {
      const int g = space_.global_index(u, k);
      auto it = std::find_if(functions.begin(), functions.end(),
                             [g](const PairFunction& f) { return f.global == g; });
      if (it != functions.end()) {
        it->on_right = k;
      } else {
        functions.push_back(PairFunction{g, -1, k});
      }
    }

    const std::size_t nn = n_ * n_;
    const std::size_t count = functions.size();
    Table first(count, nn);
    Table second(count, nn);
    for (std::size_t f = 0; f < count; ++f) {
      const int kl = functions[f].on_left;
      const int kr = functions[f].on_right;
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          const double y_gl = gl_.node(static_cast<int>(j));
          const double x_gl = gl_.node(static_cast<int>(i));
          double d1 = 0.0;
          double d2 = 0.0;
          if (kl >= 0) {
            d1 -= adj1_left_(static_cast<std::size_t>(kl), i);
            d2 -= x_gl * adj2_left_(static_cast<std::size_t>(kl), i * n_ + j);
          }
          if (kr >= 0) {
            d1 -= y_gl * adj1_right_(static_cast<std::size_t>(kr), i * n_ + j);
            d2 -= adj2_right_(static_cast<std::size_t>(kr), j);
          }
          first(f, i * n_ + j) = d1;
          second(f, i * n_ + j) = d2;
        }
      }
      counter.multiply_adds += 2 * nn * (static_cast<std::size_t>(kl >= 0) + static_cast<std::size_t>(kr >= 0));
    }

    // Weights times kernel; the kernel depends on one variable per term.
    std::vector<double> w1(nn);
    std::vector<double> w2(nn);
    for (std::size_t j = 0; j < n_; ++j) {
      const double y = gl_.node(static_cast<int>(j));
      const double kernel1 = std::pow(h_left + y * h_right, exponent_);
      const double x = gl_.node(static_cast<int>(j));
      const double kernel2 = std::pow(x * h_left + h_right, exponent_);
      for (std::size_t i = 0; i < n_; ++i) {
        w1[i * n_ + j] = gj_.weight(static_cast<int>(i)) * gl_.weight(static_cast<int>(j)) * kernel1;
        w2[j * n_ + i] = gl_.weight(static_cast<int>(j)) * gj_.weight(static_cast<int>(i)) * kernel2;
      }
    }
    counter.kernel_evals += 2 * n_;
    counter.multiply_adds += 4 * nn;

    // Both orderings (T, T') and (T', T) give the same value.
    const double scale = 2.0 * h_left * h_right;
    for (std::size_t f = 0; f < count; ++f) {
      for (std::size_t g = f; g < count; ++g) {
        double sum = 0.0;
        for (std::size_t q = 0; q < nn; ++q) {
          sum += w1[q] * first(f, q) * first(g, q) + w2[q] * second(f, q) * second(g, q);
        }
        push_symmetric(out, functions[f].global, functions[g].global, scale * sum);
        counter.multiply_adds += 2 * nn;
      }
    }
  }

  void separated(int t, int u, std::vector<Contribution>& out, OpCounter& counter) const {
    const Element& left = space_.mesh().element(t);
    const Element& right = space_.mesh().element(u);
    const double h_left = left.h();
    const double h_right = right.h();
    const double dist = element_distance(left, right);

    Table kernel(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = gl_.node(static_cast<int>(i));
      for (std::size_t j = 0; j < n_; ++j) {
        const double y = gl_.node(static_cast<int>(j));
        kernel(i, j) = std::pow((1.0 - x) * h_left + dist + y * h_right, exponent_);
      }
    }
    counter.kernel_evals += n_ * n_;

    // Row and column sums feed the blocks where both functions live on the
    // same element of the pair.
    std::vector<double> row_sum(n_, 0.0);
    std::vector<double> col_sum(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        row_sum[i] += gl_.weight(static_cast<int>(j)) * kernel(i, j);
        col_sum[j] += gl_.weight(static_cast<int>(i)) * kernel(i, j);
      }
    }
    counter.multiply_adds += 2 * n_ * n_;

    const double scale = 2.0 * h_left * h_right;
    const auto on_left = active(t);
    const auto on_right = active(u);

    auto same_element_block = [&](int element, const std::vector<int>& locals,
                                  const std::vector<double>& sums) {
      for (std::size_t a = 0; a < locals.size(); ++a) {
        for (std::size_t b = a; b < locals.size(); ++b) {
          const auto ka = static_cast<std::size_t>(locals[a]);
          const auto kb = static_cast<std::size_t>(locals[b]);
          double sum = 0.0;
          for (std::size_t q = 0; q < n_; ++q) {
            sum += gl_weighted_(ka, q) * gl_values_(kb, q) * sums[q];
          }
          push_symmetric(out, space_.global_index(element, locals[a]),
                         space_.global_index(element, locals[b]), scale * sum);
          counter.multiply_adds += n_;
        }
      }
    };
    same_element_block(t, on_left, row_sum);
    same_element_block(u, on_right, col_sum);

    // Cross block: M = (w_i phi(x_i))^T K once per left function, then one
    // dot product per right function.
    std::vector<double> projected(n_);
    for (int kl : on_left) {
      const auto ka = static_cast<std::size_t>(kl);
      std::fill(projected.begin(), projected.end(), 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        const double wv = gl_weighted_(ka, i);
        for (std::size_t j = 0; j < n_; ++j) {
          projected[j] += wv * kernel(i, j);
        }
      }
      counter.multiply_adds += n_ * n_;
      for (int kr : on_right) {
        const auto kb = static_cast<std::size_t>(kr);
        double sum = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          sum += projected[j] * gl_weighted_(kb, j);
        }
        push_symmetric(out, space_.global_index(t, kl), space_.global_index(u, kr), -scale * sum);
        counter.multiply_adds += n_;
      }
    }
  }

  void complement(int t, std::vector<Contribution>& out, OpCounter& counter) const {
    const Element& element = space_.mesh().element(t);
    const double h = element.h();
    const auto locals = active(t);
    const double h_power = std::pow(h, -2.0 * s_);

    std::vector<double> left_kernel;
    std::vector<double> right_kernel;
    if (!element.at_left_boundary) {
      left_kernel.resize(n_);
      const double dist = element.x_left + 1.0;
      for (std::size_t q = 0; q < n_; ++q) {
        left_kernel[q] = std::pow(dist + gl_.node(static_cast<int>(q)) * h, -2.0 * s_);
      }
      counter.kernel_evals += n_;
    }
    if (!element.at_right_boundary) {
      right_kernel.resize(n_);
      const double dist = 1.0 - element.x_right;
      for (std::size_t q = 0; q < n_; ++q) {
        right_kernel[q] = std::pow(dist + (1.0 - gl_.node(static_cast<int>(q))) * h, -2.0 * s_);
      }
      counter.kernel_evals += n_;
    }

    // Exterior terms enter the form twice.
    const double scale = 2.0 * h / (2.0 * s_);
    for (std::size_t a = 0; a < locals.size(); ++a) {
      for (std::size_t b = a; b < locals.size(); ++b) {
        const auto ka = static_cast<std::size_t>(locals[a]);
        const auto kb = static_cast<std::size_t>(locals[b]);
        double left = 0.0;
        double right = 0.0;
        if (element.at_left_boundary) {
          for (std::size_t q = 0; q < n_; ++q) {
            left += gj_.weight(static_cast<int>(q)) * boundary_left_(ka, q) * boundary_left_(kb, q);
          }
          left *= h_power;
        } else {
          for (std::size_t q = 0; q < n_; ++q) {
            left += gl_weighted_(ka, q) * gl_values_(kb, q) * left_kernel[q];
          }
        }
        if (element.at_right_boundary) {
          for (std::size_t q = 0; q < n_; ++q) {
            right += gj_right_.weight(static_cast<int>(q)) * boundary_right_(ka, q) *
                     boundary_right_(kb, q);
          }
          right *= h_power;
        } else {
          for (std::size_t q = 0; q < n_; ++q) {
            right += gl_weighted_(ka, q) * gl_values_(kb, q) * right_kernel[q];
          }
        }
        push_symmetric(out, space_.global_index(t, locals[a]), space_.global_index(t, locals[b]),
                       scale * (left + right));
        counter.multiply_adds += 2 * n_;
      }
    }
  }

  const Space& space_;
  double s_;
  double exponent_;
  int p_;
  std::size_t n_;
  const QuadratureRule& gl_;
  const QuadratureRule& gj_;        // (1 - x)^0 x^{2-2s}
  const QuadratureRule& gj_duffy_;  // (1 - y)^{1-2s}
  const QuadratureRule& gj_right_;  // (1 - x)^{2-2s}
  OpCounter precompute_cost_;

  Table identical_gram_;
  Table adj1_left_;   // psi[1 - x, 1], x Gauss-Jacobi
  Table adj1_right_;  // psi[xy, 0], x Gauss-Jacobi, y Gauss-Legendre
  Table adj2_left_;   // psi[1 - xy, 1], x Gauss-Legendre, y Gauss-Jacobi
  Table adj2_right_;  // psi[y, 0], y Gauss-Jacobi
  Table gl_values_;
  Table gl_weighted_;
  Table boundary_left_;
  Table boundary_right_;
};

StiffnessMatrix finish(const Space& space, FracParams params, int n,
                       const std::vector<double>& upper_sum) {
  const int dim = space.dimension();
  StiffnessMatrix matrix(dim, n, params.s());
  const double prefactor = 0.5 * kernel_constant(params);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      matrix.set_symmetric(
          i, j, prefactor * upper_sum[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                                      static_cast<std::size_t>(j)]);
    }
  }
  return matrix;
}

StiffnessMatrix assemble_blockwise(const Space& space, FracParams params, int n,
                                   OpCounter* counter, int threads) {
  const int dim = space.dimension();
  const int m = space.mesh().num_elements();
  const BlockwiseAssembler assembler(space, params, n);

  std::vector<std::vector<Contribution>> rows(static_cast<std::size_t>(m));
  std::vector<OpCounter> row_counts(static_cast<std::size_t>(m));
  auto work = [&](int worker, int stride) {
    for (int t = worker; t < m; t += stride) {
      assembler.row(t, rows[static_cast<std::size_t>(t)], row_counts[static_cast<std::size_t>(t)]);
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, m));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work, w, workers);
    }
  }

  // Fixed-order reduction: results do not depend on the worker count.
  std::vector<double> upper(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
  OpCounter total = assembler.precompute_cost();
  for (int t = 0; t < m; ++t) {
    for (const Contribution& c : rows[static_cast<std::size_t>(t)]) {
      upper[static_cast<std::size_t>(c.i) * static_cast<std::size_t>(dim) +
            static_cast<std::size_t>(c.j)] += c.value;
    }
    total += row_counts[static_cast<std::size_t>(t)];
  }
  if (counter != nullptr) {
    *counter += total;
  }
  return finish(space, params, n, upper);
}

bool contains(const std::vector<int>& values, int x) {
  return std::find(values.begin(), values.end(), x) != values.end();
}

StiffnessMatrix assemble_naive(const Space& space, FracParams params, int n, OpCounter* counter) {
  const int dim = space.dimension();
  const int m = space.mesh().num_elements();
  const auto& mesh = space.mesh();
  std::vector<double> upper(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
  std::vector<double> zero(static_cast<std::size_t>(space.degree() + 1), 0.0);

  std::vector<std::vector<int>> supports(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    supports[static_cast<std::size_t>(i)] = space.support(i);
  }
  auto local = [&](int i, int e) { return space.local_coefficients(i, e); };

  for (int i = 0; i < dim; ++i) {
    const auto& supp_i = supports[static_cast<std::size_t>(i)];
    for (int j = i; j < dim; ++j) {
      const auto& supp_j = supports[static_cast<std::size_t>(j)];
      std::vector<int> both = supp_i;
      for (int e : supp_j) {
        if (!contains(both, e)) {
          both.push_back(e);
        }
      }
      std::sort(both.begin(), both.end());

      double sum = 0.0;
      for (int a : both) {
        for (int b = 0; b < m; ++b) {
          if (b < a && contains(both, b)) {
            continue;  // unordered pair already visited
          }
          const bool touches_i = contains(supp_i, a) || contains(supp_i, b);
          const bool touches_j = contains(supp_j, a) || contains(supp_j, b);
          if (!touches_i || !touches_j) {
            continue;
          }
          const auto vi_a = local(i, a);
          const auto vj_a = local(j, a);
          const Element& ta = mesh.element(a);
          if (a == b) {
            sum += q_identical(ta, vi_a, vj_a, n, params, counter);
            continue;
          }
          const auto vi_b = local(i, b);
          const auto vj_b = local(j, b);
          const Element& tb = mesh.element(b);
          const PairLocals v{vi_a, vi_b};
          const PairLocals w{vj_a, vj_b};
          const double q = pair_class(ta, tb) == PairClass::Separated
                               ? q_separated(ta, tb, v, w, n, params, counter)
                               : q_adjacent(ta, tb, v, w, n, params, counter);
          sum += 2.0 * q;
        }
      }
      for (int e : supp_i) {
        if (contains(supp_j, e)) {
          sum += 2.0 * q_complement(mesh.element(e), local(i, e), local(j, e), n, params, counter);
        }
      }
      upper[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
            static_cast<std::size_t>(j)] = sum;
    }
  }
  return finish(space, params, n, upper);
}

}  // namespace

StiffnessMatrix assemble_stiffness(const Space& space, FracParams params, int n,
                                   OpCounter* counter, AssemblyOptions options) {
  check_order(n);
  if (options.mode == AssemblyMode::Naive) {
    return assemble_naive(space, params, n, counter);
  }
  return assemble_blockwise(space, params, n, counter, options.threads);
}

}  // namespace fraclap
