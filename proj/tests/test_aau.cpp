#include <gtest/gtest.h>

#include <sstream>

#include "semiband/aau.hpp"
#include "semiband/oracle/pair_partition.hpp"
#include "support/oracles.hpp"

using namespace semiband;

TEST(Aau, WignerSinglesVanish) {
  const auto rep = verify_aau(wigner_moment_oracle(WignerDist::standard_normal), "wigner", 0.5, {3, 5}, 3);
  for (const auto& row : rep.rows) {
    if (row.bound != AauBound::aau1) continue;
    if (std::count(row.delta.begin(), row.delta.end(), 1) > 0) EXPECT_EQ(row.empirical_constant, 0.0);
  }
  EXPECT_TRUE(rep.aau2_nonincreasing);
  EXPECT_TRUE(rep.aau3_nonincreasing);
}

TEST(Aau, GaussianSingleFactorRows) {
  const auto rep = verify_aau(gaussian_equicorrelated_oracle(0.5), "gaussian", 0.5, {4}, 1);
  for (const auto& row : rep.rows) {
    if (row.delta == std::vector<int>{2} && row.bound == AauBound::aau2) EXPECT_EQ(row.empirical_constant, 0.0);
    if (row.delta == std::vector<int>{4}) {
      EXPECT_NEAR(row.moment, 3.0, 1e-15);
      if (row.bound == AauBound::aau3) EXPECT_EQ(row.empirical_constant, 0.0);
    }
  }
}

TEST(Aau, GaussianMatchesConditionalFactorForm) {
  for (double alpha : {0.3, 0.5, 1.0}) {
    const auto rep = verify_aau(gaussian_equicorrelated_oracle(alpha), "gaussian", alpha, {4, 8, 16}, 4);
    int checked = 0;
    for (const auto& row : rep.rows) {
      const double c = covariance_bound(triangle_size(row.n), alpha);
      const double bound = std::pow(4.0, alpha) * static_cast<double>(oracle::count_pair_partitions(2 * row.l)) /
                           std::pow(static_cast<double>(row.n), 4 * alpha);
      if (row.bound == AauBound::aau2) {
        const double ref = testsupport::equicorrelated_square_product(c, row.l) - 1.0;
        EXPECT_NEAR(row.empirical_constant, std::abs(ref), 1e-13);
        EXPECT_LE(row.empirical_constant, bound);
        ++checked;
      }
      if (row.bound == AauBound::aau3) {
        const double ref = testsupport::equicorrelated_fourth_times_squares(c, row.l) - 3.0;
        EXPECT_NEAR(row.empirical_constant, std::abs(ref), 1e-13);
        ++checked;
      }
    }
    EXPECT_EQ(checked, 3 * 4 * 2);
    EXPECT_TRUE(rep.aau2_nonincreasing);
    EXPECT_TRUE(rep.aau3_nonincreasing);
  }
}

TEST(Aau, CurieWeissPairs) {
  const auto rep = verify_aau(curie_weiss_moment_oracle(0.5), "curie_weiss", 0.5, {4, 8}, 2);
  for (const auto& row : rep.rows)
    if (row.bound == AauBound::aau1 && row.delta == std::vector<int>{1, 1}) {
      const auto nn = static_cast<std::int64_t>(row.n) * row.n;
      EXPECT_NEAR(row.moment, cw_product_moment(0.5, nn, 2), 1e-15);
      EXPECT_NEAR(row.empirical_constant, row.moment * row.n, 1e-15);
    }
}

TEST(Aau, DistinctPairsAndPattern) {
  EXPECT_EQ(distinct_pairs(3, 4), (std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {0, 2}, {1, 1}}));
  EXPECT_EQ(delta_pattern({1, 2, 4}), "1-2-4");
}

TEST(Aau, CsvColumns) {
  const auto rep = verify_aau(wigner_moment_oracle(WignerDist::rademacher), "wigner", 1.0, {2}, 1);
  std::ostringstream out;
  write_aau_csv(rep, out);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "scheme,alpha,n,l,delta_pattern,moment,bound_kind,empirical_constant");
  EXPECT_NE(text.find("wigner,1,2,1,2,1,AAU2,0"), std::string::npos);
}
