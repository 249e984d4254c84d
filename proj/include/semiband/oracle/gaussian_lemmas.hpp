#pragma once

// Exact checks of the Wick-sum bounds for equicorrelated Gaussian schemes at
// the extremal correlation c = Delta_n^(-alpha), Delta_n = n(n+1)/2:
//   decay          |sum_pi prod Sigma| <= #P(|delta|) / (n/sqrt2)^(alpha * #{delta_i = 1})
//   second moment  |E[Y_1^2 ... Y_z^2] - 1|        <= #P(2z)   / (n/sqrt2)^(4 alpha)
//   fourth moment  |E[Y_1^4 Y_2^2 ... Y_z^2] - 3|  <= #P(2z+2) / (n/sqrt2)^(4 alpha)

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semiband/aau.hpp"
#include "semiband/ensembles.hpp"
#include "semiband/oracle/pair_partition.hpp"

namespace semiband::oracle {

struct GaussianLemmaRow {
  std::string lemma;  // "decay", "second_moment", "fourth_moment"
  double alpha = 0.0;
  int n = 0;
  std::vector<int> delta;
  double off_diagonal = 0.0;
  double lhs = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct GaussianLemmaReport {
  std::vector<GaussianLemmaRow> rows;
  bool constants_exact_at_zero = true;
  std::uint64_t violations = 0;

  bool ok() const noexcept { return violations == 0 && constants_exact_at_zero; }
};

namespace detail {

// Index list with delta_r copies of r, evaluated against an l x l
// equicorrelated covariance.
inline double equicorrelated_wick(const std::vector<int>& delta, double c) {
  std::vector<int> idx;
  for (std::size_t r = 0; r < delta.size(); ++r)
    for (int p = 0; p < delta[r]; ++p) idx.push_back(static_cast<int>(r));
  return wick_mixed_moment(equicorrelated_matrix(static_cast<std::int64_t>(delta.size()), c), idx);
}

inline void for_each_composition(int total, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> parts;
  std::function<void(int)> rec = [&](int remaining) {
    if (remaining == 0) {
      visit(parts);
      return;
    }
    for (int p = 1; p <= remaining; ++p) {
      parts.push_back(p);
      rec(remaining - p);
      parts.pop_back();
    }
  };
  rec(total);
}

}  // namespace detail

inline GaussianLemmaReport verify_gaussian_lemmas(double alpha, const std::vector<int>& n_values,
                                                  const std::vector<int>& z_values, int max_pattern_size = 12) {
  GaussianLemmaReport report;
  auto add = [&](std::string lemma, int n, std::vector<int> delta, double c, double lhs, double bound) {
    const bool ok = lhs <= bound;
    if (!ok) ++report.violations;
    report.rows.push_back({std::move(lemma), alpha, n, std::move(delta), c, lhs, bound, ok});
  };

  for (int n : n_values) {
    const std::int64_t dim = triangle_size(n);
    const double c = covariance_bound(dim, alpha);
    const double scale = static_cast<double>(n) / std::sqrt(2.0);

    for (int total = 2; total <= max_pattern_size; total += 2) {
      detail::for_each_composition(total, [&](const std::vector<int>& delta) {
        if (static_cast<std::int64_t>(delta.size()) > dim) return;
        const auto ones = std::count(delta.begin(), delta.end(), 1);
        const double lhs = std::abs(detail::equicorrelated_wick(delta, c));
        const double bound = static_cast<double>(count_pair_partitions(total)) /
                             std::pow(scale, alpha * static_cast<double>(ones));
        add("decay", n, delta, c, lhs, bound);
      });
    }

    for (int z : z_values) {
      if (z > dim) continue;
      const double denom = std::pow(scale, 4.0 * alpha);
      std::vector<int> squares(static_cast<std::size_t>(z), 2);
      add("second_moment", n, squares, c, std::abs(detail::equicorrelated_wick(squares, c) - 1.0),
          static_cast<double>(count_pair_partitions(2 * z)) / denom);
      std::vector<int> fourth(static_cast<std::size_t>(z), 2);
      fourth.front() = 4;
      add("fourth_moment", n, fourth, c, std::abs(detail::equicorrelated_wick(fourth, c) - 3.0),
          static_cast<double>(count_pair_partitions(2 * z + 2)) / denom);

      // Uncorrelated limit: the diagonal pairings alone give exactly 1 and 3.
      if (detail::equicorrelated_wick(squares, 0.0) != 1.0 || detail::equicorrelated_wick(fourth, 0.0) != 3.0)
        report.constants_exact_at_zero = false;
    }
  }
  return report;
}

}  // namespace semiband::oracle
