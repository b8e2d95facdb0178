#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/experiments.hpp"

namespace {

std::string to_csv(const fraclap::CsvTable& table) {
  std::ostringstream out;
  fraclap::write_csv(table, out);
  return out.str();
}

}  // namespace

TEST(Csv, NumberFormat) {
  EXPECT_EQ(fraclap::format_number(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(fraclap::format_number(0.0), "0.0000000000000000e+00");
  EXPECT_EQ(std::stod(fraclap::format_number(M_PI)), M_PI);
}

TEST(Csv, Layout) {
  const fraclap::CsvTable table{{"a", "b"}, {{"1", "2"}, {"3", "FAIL"}}};
  EXPECT_EQ(to_csv(table), "a,b\n1,2\n3,FAIL\n");
}

TEST(Slope, PowerLaw) {
  const std::vector<double> x{2.0, 4.0, 8.0, 16.0};
  std::vector<double> y;
  for (double v : x) {
    y.push_back(3.0 * std::pow(v, 4.5));
  }
  EXPECT_NEAR(fraclap::loglog_slope(x, y), 4.5, 1e-12);
  EXPECT_THROW((void)fraclap::loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}),
               std::invalid_argument);
}

TEST(Config, Validation) {
  fraclap::ExperimentConfig config;
  EXPECT_NO_THROW(config.validate());
  config.s = 1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.s = 0.5;
  config.lambda = 0.9;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.lambda = 1.2;
  EXPECT_EQ(config.quad_order(5), 6);
  EXPECT_EQ(config.quad_order(10), 12);
  config.n = 7;
  EXPECT_EQ(config.quad_order(10), 7);
}

TEST(Convergence, SchemaAndDecay) {
  fraclap::ExperimentConfig config;
  config.s = 0.5;
  config.sigma = 0.25;
  config.lmin = 1;
  config.lmax = 3;
  config.deterministic = true;
  const auto table = fraclap::run_convergence(config);
  EXPECT_EQ(table.header,
            (std::vector<std::string>{"L", "p", "n", "m", "N", "err_m1", "err_m2", "err_m3",
                                      "energy_m", "kernel_evals", "wall_ms"}));
  ASSERT_EQ(table.rows.size(), 3U);
  double previous = INFINITY;
  for (const auto& row : table.rows) {
    ASSERT_EQ(row.size(), table.header.size());
    EXPECT_EQ(row.back(), "0");
    const double e3 = std::stod(row[7]);
    EXPECT_LT(e3, previous);
    previous = e3;
    for (int c : {5, 6}) {
      EXPECT_TRUE(row[static_cast<std::size_t>(c)] == "FAIL" ||
                  std::stod(row[static_cast<std::size_t>(c)]) >= 0.0);
    }
  }
}

TEST(Convergence, EmptyRangeGivesHeaderOnly) {
  fraclap::ExperimentConfig config;
  config.lmin = 4;
  config.lmax = 3;
  EXPECT_EQ(to_csv(fraclap::run_convergence(config)),
            "L,p,n,m,N,err_m1,err_m2,err_m3,energy_m,kernel_evals,wall_ms\n");
}

TEST(Convergence, DeterministicRunsAreIdentical) {
  fraclap::ExperimentConfig config;
  config.s = 0.3;
  config.lmin = 2;
  config.lmax = 4;
  config.deterministic = true;
  const std::string first = to_csv(fraclap::run_convergence(config));
  config.threads = 3;
  EXPECT_EQ(first, to_csv(fraclap::run_convergence(config)));
}

TEST(Convergence, OtherRightHandSideHasNoErrors) {
  fraclap::ExperimentConfig config;
  config.lmin = 2;
  config.lmax = 2;
  config.f = fraclap::RightHandSide::Exp;
  const auto table = fraclap::run_convergence(config);
  ASSERT_EQ(table.rows.size(), 1U);
  EXPECT_EQ(table.rows[0][5], "NA");
  EXPECT_EQ(table.rows[0][7], "NA");
  EXPECT_GT(std::stod(table.rows[0][8]), 0.0);
}

TEST(Quadcheck, RowsAndReferenceRow) {
  fraclap::ExperimentConfig config;
  config.sigma = 0.5;
  config.nmin = 48;
  config.nmax = 50;
  const auto table = fraclap::run_quadcheck(config);
  EXPECT_EQ(table.header, (std::vector<std::string>{"case", "sigma", "n", "abs_error"}));
  ASSERT_EQ(table.rows.size(), 6U);
  EXPECT_EQ(table.rows[0][0], "adjacent");
  EXPECT_EQ(table.rows[3][0], "separated");
  EXPECT_EQ(std::stod(table.rows[2][3]), 0.0);
  EXPECT_EQ(std::stod(table.rows[5][3]), 0.0);
}

TEST(Complexity, SlopeRowOnlyWithSeveralLevels) {
  fraclap::ExperimentConfig config;
  config.lmin = 2;
  config.lmax = 2;
  config.deterministic = true;
  auto table = fraclap::run_complexity(config);
  EXPECT_EQ(table.header,
            (std::vector<std::string>{"L", "N", "kernel_evals", "multiply_adds", "wall_ms"}));
  ASSERT_EQ(table.rows.size(), 1U);
  config.lmax = 4;
  table = fraclap::run_complexity(config);
  ASSERT_EQ(table.rows.size(), 4U);
  EXPECT_EQ(table.rows.back()[0], "slope");
  EXPECT_GT(std::stod(table.rows.back()[3]), 0.0);
}

TEST(Solve, SamplesAgreeWithExactSolution) {
  fraclap::ExperimentConfig config;
  config.s = 0.5;
  config.lmax = 6;
  const auto table = fraclap::run_solve(config);
  EXPECT_EQ(table.header, (std::vector<std::string>{"x", "u_h", "u_exact"}));
  ASSERT_EQ(table.rows.size(), 401U);
  double worst = 0.0;
  for (const auto& row : table.rows) {
    worst = std::max(worst, std::fabs(std::stod(row[1]) - std::stod(row[2])));
  }
  EXPECT_LT(worst, 1e-3);
  EXPECT_EQ(std::stod(table.rows.front()[1]), 0.0);
}
