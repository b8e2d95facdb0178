#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"
#include "fraclap/mesh.hpp"
#include "test_support.hpp"

using fraclap::FracParams;
using fraclap::PairLocals;
using fraclap::testing::relative_error;

namespace {

using Vec = std::vector<double>;

// Random local pair that is continuous across the shared node of T (left) and T' (right).
std::pair<Vec, Vec> conforming_pair(std::mt19937_64& rng, int p) {
  Vec left = fraclap::testing::random_vector(rng, static_cast<std::size_t>(p + 1));
  Vec right = fraclap::testing::random_vector(rng, static_cast<std::size_t>(p + 1));
  right[0] = left[1];
  return {left, right};
}

}  // namespace

TEST(QIdentical, LinearClosedForm) {
  const auto mesh = fraclap::uniform_mesh(2);  // h = 1
  const Vec v{0.0, 1.0};
  EXPECT_NEAR(fraclap::q_identical(mesh.element(0), v, v, 1, FracParams(0.5)), 1.0, 1e-15);
  for (double s : {0.2, 0.65}) {
    const double expected = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    EXPECT_LE(relative_error(fraclap::q_identical(mesh.element(0), v, v, 1, FracParams(s)), expected),
              1e-14);
  }
  // Slope b and size h: 2 b^2 h^{1-2s} / ((2 - 2s)(3 - 2s)).
  const auto fine = fraclap::uniform_mesh(8);
  const Vec steep{0.5, -1.5};
  const double s = 0.3;
  const double expected = 2.0 * 4.0 * std::pow(0.25, 1.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
  EXPECT_LE(relative_error(fraclap::q_identical(fine.element(3), steep, steep, 2, FracParams(s)),
                           expected),
            1e-14);
}

TEST(QIdentical, ConstantsGiveZero) {
  const auto mesh = fraclap::uniform_mesh(3);
  const Vec c{2.0, 2.0, 0.0, 0.0};
  EXPECT_NEAR(fraclap::q_identical(mesh.element(1), c, c, 4, FracParams(0.4)), 0.0, 1e-15);
}

TEST(QIdentical, ExactForPolynomialsWithNEqualP) {
  auto rng = fraclap::testing::make_rng(3);
  const auto mesh = fraclap::geometric_mesh(2, 0.3);
  const FracParams params(0.3);
  for (int p = 1; p <= 5; ++p) {
    const Vec v = fraclap::testing::random_vector(rng, static_cast<std::size_t>(p + 1));
    const Vec w = fraclap::testing::random_vector(rng, static_cast<std::size_t>(p + 1));
    const auto& t = mesh.element(1);
    const double reference = fraclap::reference_pair_integral(t, t, PairLocals{v, v},
                                                              PairLocals{w, w}, params);
    EXPECT_LE(relative_error(fraclap::q_identical(t, v, w, p, params), reference), 1e-10)
        << "p = " << p;
  }
}

TEST(QAdjacent, SharedHatReferenceValue) {
  const auto mesh = fraclap::uniform_mesh(4);
  const auto& t = mesh.element(1);   // (-0.5, 0)
  const auto& t2 = mesh.element(2);  // (0, 0.5)
  const Vec rising{0.0, 1.0};
  const Vec falling{1.0, 0.0};
  const PairLocals hat{rising, falling};
  const FracParams params(0.5);
  // Direct singular integral, 40-digit reference.
  const double exact = 0.22741127776021876233;
  EXPECT_LE(relative_error(fraclap::q_adjacent(t, t2, hat, hat, 24, params), exact), 1e-12);
  // Order of the pair does not matter.
  const PairLocals swapped{falling, rising};
  EXPECT_LE(relative_error(fraclap::q_adjacent(t2, t, swapped, swapped, 24, params), exact), 1e-12);
  // Q^n >= a / 4 holds already at n = 2.
  EXPECT_GE(fraclap::q_adjacent(t, t2, hat, hat, 2, params), std::pow(2.0, -2.0) * exact);
}

TEST(QAdjacent, ZeroLocalsGiveZero) {
  const auto mesh = fraclap::uniform_mesh(4);
  const Vec zero(4, 0.0);
  const Vec some{0.0, 0.0, 1.0, -0.5};
  EXPECT_EQ(fraclap::q_adjacent(mesh.element(0), mesh.element(1), PairLocals{zero, zero},
                                PairLocals{some, zero}, 5, FracParams(0.5)),
            0.0);
  EXPECT_THROW((void)fraclap::q_adjacent(mesh.element(0), mesh.element(2), PairLocals{zero, zero},
                                         PairLocals{zero, zero}, 5, FracParams(0.5)),
               std::invalid_argument);
}

TEST(QAdjacent, HatsOnlyOnOneSideMatchOracle) {
  // v is a hat plus bubble on the left element, w a hat plus bubble on the
  // right one; both are continuous across the shared node.
  const auto mesh = fraclap::geometric_mesh(2, 0.5);
  const FracParams params(0.75);
  const Vec v_left{0.0, 1.0, 0.2, 0.0};
  const Vec v_right{1.0, 0.0, 0.0, 0.0};
  const Vec w_left{0.0, -0.4, 0.0, 0.0};
  const Vec w_right{-0.4, 0.5, 0.0, 0.7};
  const PairLocals pv{v_left, v_right};
  const PairLocals pw{w_left, w_right};
  const auto& t = mesh.element(2);
  const auto& t2 = mesh.element(3);
  const double reference = fraclap::reference_pair_integral(t, t2, pv, pw, params);
  EXPECT_LE(relative_error(fraclap::q_adjacent(t, t2, pv, pw, 30, params), reference), 1e-10);
}

TEST(QSeparated, ConstantsLogForm) {
  const auto mesh = fraclap::uniform_mesh(4);
  const Vec one{1.0, 1.0};
  const Vec zero{0.0, 0.0};
  const PairLocals v{one, zero};
  const double exact = std::log(9.0 / 8.0);
  EXPECT_LE(relative_error(fraclap::q_separated(mesh.element(0), mesh.element(3), v, v, 8,
                                                FracParams(0.5)),
                           exact),
            1e-10);
  EXPECT_LE(relative_error(fraclap::q_separated(mesh.element(0), mesh.element(3), v, v, 20,
                                                FracParams(0.5)),
                           exact),
            1e-14);
  EXPECT_EQ(fraclap::q_separated(mesh.element(0), mesh.element(3), PairLocals{zero, zero},
                                 PairLocals{zero, zero}, 8, FracParams(0.5)),
            0.0);
  EXPECT_THROW((void)fraclap::q_separated(mesh.element(0), mesh.element(1), v, v, 8, FracParams(0.5)),
               std::invalid_argument);
}

TEST(QSeparated, OrderOfPairIrrelevant) {
  auto rng = fraclap::testing::make_rng(5);
  const auto mesh = fraclap::geometric_mesh(3, 0.25);
  const Vec a = fraclap::testing::random_vector(rng, 4);
  const Vec b = fraclap::testing::random_vector(rng, 4);
  const Vec c = fraclap::testing::random_vector(rng, 4);
  const Vec d = fraclap::testing::random_vector(rng, 4);
  const FracParams params(0.4);
  const double forward = fraclap::q_separated(mesh.element(1), mesh.element(5), PairLocals{a, b},
                                              PairLocals{c, d}, 9, params);
  const double backward = fraclap::q_separated(mesh.element(5), mesh.element(1), PairLocals{b, a},
                                               PairLocals{d, c}, 9, params);
  EXPECT_DOUBLE_EQ(forward, backward);
}

TEST(QComplement, LeftBoundaryHat) {
  const auto mesh = fraclap::uniform_mesh(8);
  const auto& t = mesh.element(0);  // (-1, -0.75)
  const Vec hat{0.0, 1.0};
  const FracParams params(0.5);
  const double h = t.h();
  // Right side for s = 1/2: h int_0^1 x^2 / (b - h x) dx with b = 1.75 + h.
  const double b = 2.0;
  const double right_side =
      h * (-1.0 / (2.0 * h) - b / (h * h) - b * b * std::log((b - h) / b) / (h * h * h));
  const double expected = 0.5 + right_side;
  const double value = fraclap::q_complement(t, hat, hat, 12, params);
  EXPECT_LE(relative_error(value, expected), 1e-12);
  const double oracle =
      fraclap::reference_pair_integral(t, fraclap::ComplementMarker{}, hat, hat, params);
  EXPECT_LE(relative_error(value, oracle), 1e-10);
}

TEST(QComplement, InteriorBubbleMatchesOracle) {
  const auto mesh = fraclap::uniform_mesh(5);
  const Vec bubble{0.0, 0.0, 1.0};
  const FracParams params(0.25);
  const double value = fraclap::q_complement(mesh.element(2), bubble, bubble, 10, params);
  const double oracle = fraclap::reference_pair_integral(mesh.element(2), fraclap::ComplementMarker{},
                                                         bubble, bubble, params);
  EXPECT_LE(relative_error(value, oracle), 1e-9);
  EXPECT_EQ(fraclap::q_complement(mesh.element(2), Vec{0, 0, 0}, bubble, 10, params), 0.0);
}

TEST(QuadratureProperties, Nonnegative) {
  auto rng = fraclap::testing::make_rng(7);
  const auto mesh = fraclap::geometric_mesh(3, 0.2);
  const FracParams params(0.6);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 6;
    const int n = 1 + trial % 9;
    const auto [left, right] = conforming_pair(rng, p);
    const PairLocals u{left, right};
    EXPECT_GE(fraclap::q_identical(mesh.element(2), left, left, n, params), 0.0);
    EXPECT_GE(fraclap::q_adjacent(mesh.element(2), mesh.element(3), u, u, n, params), 0.0);
    EXPECT_GE(fraclap::q_separated(mesh.element(1), mesh.element(4), u, u, n, params), 0.0);
    Vec boundary = left;
    boundary[0] = 0.0;
    EXPECT_GE(fraclap::q_complement(mesh.element(0), boundary, boundary, n, params), 0.0);
    EXPECT_GE(fraclap::q_complement(mesh.element(3), left, left, n, params), 0.0);
  }
}

TEST(QuadratureProperties, LowerBounds) {
  auto rng = fraclap::testing::make_rng(11);
  const auto mesh = fraclap::geometric_mesh(3, 0.25);
  for (double s : {0.25, 0.75}) {
    const FracParams params(s);
    for (int p = 1; p <= 4; ++p) {
      const auto [left, right] = conforming_pair(rng, p);
      const PairLocals u{left, right};
      const auto& t = mesh.element(1);
      const auto& t2 = mesh.element(2);
      const double ref_adj = fraclap::reference_pair_integral(t, t2, u, u, params);
      const double factor_adj = std::pow(1.0 + t2.h() / t.h(), -(1.0 + 2.0 * s));
      EXPECT_GE(fraclap::q_adjacent(t, t2, u, u, p + 1, params), factor_adj * ref_adj - 1e-12);

      const auto& far = mesh.element(4);
      const double dist = fraclap::element_distance(t, far);
      const double ref_sep = fraclap::reference_pair_integral(t, far, u, u, params);
      const double factor_sep = std::pow(dist / (t.h() + dist + far.h()), 1.0 + 2.0 * s);
      EXPECT_GE(fraclap::q_separated(t, far, u, u, p + 1, params), factor_sep * ref_sep - 1e-12);
    }
  }
}

TEST(QuadratureProperties, ConvergeToOracle) {
  auto rng = fraclap::testing::make_rng(13);
  const auto mesh = fraclap::geometric_mesh(2, 0.4);
  const FracParams params(0.35);
  const Vec v1 = fraclap::testing::random_vector(rng, 5);
  const Vec v2 = fraclap::testing::random_vector(rng, 5);
  const Vec w1 = fraclap::testing::random_vector(rng, 5);
  const Vec w2 = fraclap::testing::random_vector(rng, 5);
  for (int second : {1, 3}) {
    // Continuous across the shared node when the elements touch.
    Vec v2c = v2;
    Vec w2c = w2;
    if (second == 1) {
      v2c[0] = v1[1];
      w2c[0] = w1[1];
    }
    const PairLocals v{v1, v2c};
    const PairLocals w{w1, w2c};
    const auto& t = mesh.element(0);
    const auto& t2 = mesh.element(second);
    const double reference = fraclap::reference_pair_integral(t, t2, v, w, params);
    double previous = INFINITY;
    for (int n = 8; n <= 24; n += 4) {
      const double err = std::fabs(fraclap::pair_quadrature(t, t2, v, w, n, params) - reference);
      EXPECT_LE(err, previous + 1e-14);
      previous = err;
    }
    EXPECT_LE(previous, 1e-10 * std::fabs(reference));
  }
}

TEST(QuadratureArguments, Rejected) {
  const auto mesh = fraclap::uniform_mesh(2);
  const Vec v{0.0, 1.0};
  const Vec tiny{1.0};
  EXPECT_THROW((void)fraclap::q_identical(mesh.element(0), v, v, 0, FracParams(0.5)),
               std::invalid_argument);
  EXPECT_THROW((void)fraclap::q_identical(mesh.element(0), tiny, v, 2, FracParams(0.5)),
               std::invalid_argument);
}

TEST(Load, ConstantRightHandSide) {
  const auto space = fraclap::build_space(fraclap::geometric_mesh(2, 0.5), 3);
  const auto load = fraclap::assemble_load(space, [](double) { return 1.0; }, 3);
  const auto& mesh = space.mesh();
  for (int i = 0; i < space.dimension(); ++i) {
    const auto& f = space.basis()[static_cast<std::size_t>(i)];
    const double b = load.entries[static_cast<std::size_t>(i)];
    if (const auto* hat = std::get_if<fraclap::Hat>(&f)) {
      const double expected =
          0.5 * (mesh.element(hat->node - 1).h() + mesh.element(hat->node).h());
      EXPECT_NEAR(b, expected, 1e-15);
    } else {
      const auto& bubble = std::get<fraclap::Bubble>(f);
      const double expected = bubble.degree == 2 ? -mesh.element(bubble.element).h() / 3.0 : 0.0;
      EXPECT_NEAR(b, expected, 1e-15);
    }
  }
}

TEST(Stiffness, SymmetricAndMatchesNaive) {
  const FracParams params(0.5);
  for (int layers : {1, 2, 3}) {
    for (int p : {1, 2, 4}) {
      const auto space = fraclap::build_space(fraclap::geometric_mesh(layers, 0.3), p);
      const int n = p + 1;
      const auto fast = fraclap::assemble_stiffness(space, params, n);
      const auto slow = fraclap::assemble_stiffness(space, params, n, nullptr,
                                                    {fraclap::AssemblyMode::Naive, 1});
      double scale = 0.0;
      for (double a : fast.data()) {
        scale = std::max(scale, std::fabs(a));
      }
      for (int i = 0; i < space.dimension(); ++i) {
        for (int j = 0; j < space.dimension(); ++j) {
          EXPECT_EQ(fast(i, j), fast(j, i));
          EXPECT_NEAR(fast(i, j), slow(i, j), 1e-13 * scale) << i << "," << j;
        }
      }
    }
  }
}

TEST(Stiffness, SingleHatOnTwoElements) {
  const auto space = fraclap::build_space(fraclap::uniform_mesh(2), 1);
  const FracParams params(0.5);
  const auto a = fraclap::assemble_stiffness(space, params, 4);
  ASSERT_EQ(a.dimension(), 1);
  const auto& t0 = space.mesh().element(0);
  const auto& t1 = space.mesh().element(1);
  const Vec rising{0.0, 1.0};
  const Vec falling{1.0, 0.0};
  const PairLocals hat{rising, falling};
  const double sum = fraclap::q_identical(t0, rising, rising, 4, params) +
                     fraclap::q_identical(t1, falling, falling, 4, params) +
                     2.0 * fraclap::q_adjacent(t0, t1, hat, hat, 4, params) +
                     2.0 * fraclap::q_complement(t0, rising, rising, 4, params) +
                     2.0 * fraclap::q_complement(t1, falling, falling, 4, params);
  EXPECT_NEAR(a(0, 0), 0.5 * fraclap::kernel_constant(params) * sum, 1e-13);
}

TEST(Stiffness, ThreadCountDoesNotChangeBits) {
  const auto space = fraclap::build_space(fraclap::geometric_mesh(4, 0.25), 4);
  const FracParams params(0.75);
  fraclap::OpCounter one_count;
  fraclap::OpCounter many_count;
  const auto one = fraclap::assemble_stiffness(space, params, 5, &one_count);
  const auto many = fraclap::assemble_stiffness(space, params, 5, &many_count,
                                                {fraclap::AssemblyMode::Blockwise, 4});
  ASSERT_EQ(one.data().size(), many.data().size());
  EXPECT_TRUE(std::equal(one.data().begin(), one.data().end(), many.data().begin()));
  EXPECT_EQ(one_count.kernel_evals, many_count.kernel_evals);
  EXPECT_EQ(one_count.multiply_adds, many_count.multiply_adds);
}

TEST(Stiffness, BlockwiseDoesLessWork) {
  const auto space = fraclap::build_space(fraclap::geometric_mesh(4, 0.25), 4);
  const FracParams params(0.5);
  fraclap::OpCounter fast;
  fraclap::OpCounter slow;
  (void)fraclap::assemble_stiffness(space, params, 4, &fast);
  (void)fraclap::assemble_stiffness(space, params, 4, &slow, {fraclap::AssemblyMode::Naive, 1});
  EXPECT_GT(fast.multiply_adds, 0U);
  EXPECT_LT(fast.multiply_adds, slow.multiply_adds);
  EXPECT_LT(fast.kernel_evals, slow.kernel_evals);
}
