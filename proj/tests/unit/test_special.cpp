#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fraclap/special.hpp"
#include "test_support.hpp"

using fraclap::FracParams;
using fraclap::testing::relative_error;

TEST(Gamma, KnownValues) {
  EXPECT_DOUBLE_EQ(fraclap::gamma(1.0), 1.0);
  EXPECT_NEAR(fraclap::gamma(0.5), 1.7724538509055159, 1e-15);
  // -2 sqrt(pi), 40-digit reference
  EXPECT_LE(relative_error(fraclap::gamma(-0.5), -3.5449077018110320546), 1e-14);
  EXPECT_DOUBLE_EQ(fraclap::gamma(5.0), 24.0);
}

TEST(Gamma, MatchesBoostOnGrid) {
  for (double x = -2.0; x <= 10.0; x += 0.0137) {
    if (std::fabs(x - std::round(x)) < 1e-3 && x <= 0.5) {
      continue;  // too close to a pole
    }
    EXPECT_LE(relative_error(fraclap::gamma(x), boost::math::tgamma(x)), 1e-13) << "x = " << x;
  }
}

TEST(Gamma, PolesThrow) {
  EXPECT_THROW((void)fraclap::gamma(0.0), std::domain_error);
  EXPECT_THROW((void)fraclap::gamma(-1.0), std::domain_error);
  EXPECT_THROW((void)fraclap::gamma(-2.0), std::domain_error);
}

TEST(FracParams, RejectsOutOfRange) {
  EXPECT_THROW(FracParams(0.0), std::invalid_argument);
  EXPECT_THROW(FracParams(1.0), std::invalid_argument);
  EXPECT_THROW(FracParams(-0.3), std::invalid_argument);
  EXPECT_NO_THROW(FracParams(0.5));
}

TEST(KernelConstant, FrozenValues) {
  EXPECT_NEAR(fraclap::kernel_constant(FracParams(0.5)), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_LE(relative_error(fraclap::kernel_constant(FracParams(0.25)), 0.19947114020071633897),
            1e-13);
  EXPECT_LE(relative_error(fraclap::kernel_constant(FracParams(0.75)), 0.29920671030107450845),
            1e-13);
}

TEST(KernelConstant, PositiveOnGrid) {
  for (int k = 1; k <= 19; ++k) {
    EXPECT_GT(fraclap::kernel_constant(FracParams(k / 20.0)), 0.0);
  }
}

TEST(ExactSolution, Values) {
  const FracParams half(0.5);
  EXPECT_NEAR(fraclap::exact_solution(half, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(fraclap::exact_solution(half, 0.6), 0.8, 1e-15);
  EXPECT_EQ(fraclap::exact_solution(FracParams(0.3), 1.0), 0.0);
  EXPECT_EQ(fraclap::exact_solution(FracParams(0.3), -1.0), 0.0);
  EXPECT_THROW((void)fraclap::exact_solution(half, 1.0001), std::domain_error);
}

TEST(ExactSolution, SymmetricBitwise) {
  const FracParams params(0.37);
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    EXPECT_EQ(fraclap::exact_solution(params, x), fraclap::exact_solution(params, -x));
  }
}

TEST(ExactEnergy, FrozenValues) {
  EXPECT_NEAR(fraclap::exact_energy(FracParams(0.5)), std::numbers::pi / 2.0, 1e-15);
  EXPECT_LE(relative_error(fraclap::exact_energy(FracParams(0.25)), 1.9724500794590925949), 1e-13);
  EXPECT_LE(relative_error(fraclap::exact_energy(FracParams(0.75)), 1.0815651841076555664), 1e-13);
}

TEST(ExactEnergy, AgreesWithIntegralOfSolution) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double s : {0.25, 0.5, 0.75}) {
    const FracParams params(s);
    const double integral = integrator.integrate(
        [&](double x) { return fraclap::exact_solution(params, x); }, -1.0, 1.0);
    EXPECT_LE(relative_error(fraclap::exact_energy(params), integral), 1e-10) << "s = " << s;
  }
}
