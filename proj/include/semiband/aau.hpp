#pragma once

// Measures the constants implied by the alpha-almost-uncorrelated conditions
// (AAU1 decay, AAU2 second moments, AAU3 fourth moments) from exact mixed
// moments over small instances.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "semiband/ensembles.hpp"
#include "semiband/harness/csv.hpp"
#include "semiband/scheme_sample.hpp"

namespace semiband {

enum class AauBound { aau1, aau2, aau3 };

inline std::string_view to_string(AauBound b) {
  switch (b) {
    case AauBound::aau1: return "AAU1";
    case AauBound::aau2: return "AAU2";
    case AauBound::aau3: return "AAU3";
  }
  return "?";
}

struct AauRow {
  int n = 0;
  int l = 0;
  std::vector<int> delta;
  std::vector<PairPower> pairs;
  double moment = 0.0;
  AauBound bound = AauBound::aau1;
  double empirical_constant = 0.0;
};

struct AauReport {
  std::string scheme;
  double alpha = 0.0;
  std::vector<AauRow> rows;
  bool aau2_nonincreasing = true;
  bool aau3_nonincreasing = true;
};

inline std::string delta_pattern(const std::vector<int>& delta) {
  std::string s;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(delta[i]);
  }
  return s;
}

/// The first l positions of the closed upper triangle in row-major order;
/// pairwise fundamentally different by construction.
inline std::vector<std::pair<int, int>> distinct_pairs(int n, int l) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n && static_cast<int>(out.size()) < l; ++i)
    for (int j = i; j < n && static_cast<int>(out.size()) < l; ++j) out.emplace_back(i, j);
  return out;
}

inline AauReport verify_aau(const EntryMomentOracle& oracle, std::string scheme, double alpha,
                            const std::vector<int>& n_values, int max_l) {
  AauReport report{std::move(scheme), alpha, {}, true, true};
  static constexpr int kExponents[] = {1, 2, 4};
  for (int n : n_values) {
    for (int l = 1; l <= max_l; ++l) {
      if (triangle_size(n) < l) break;
      const auto pairs = distinct_pairs(n, l);
      std::vector<int> digits(static_cast<std::size_t>(l), 0);
      while (true) {
        std::vector<int> delta(digits.size());
        std::vector<PairPower> factors;
        for (int r = 0; r < l; ++r) {
          delta[static_cast<std::size_t>(r)] = kExponents[digits[static_cast<std::size_t>(r)]];
          factors.push_back({pairs[static_cast<std::size_t>(r)].first, pairs[static_cast<std::size_t>(r)].second,
                             delta[static_cast<std::size_t>(r)]});
        }
        const double moment = oracle(n, factors);
        const auto singles = std::count(delta.begin(), delta.end(), 1);
        report.rows.push_back({n, l, delta, factors, moment, AauBound::aau1,
                               std::abs(moment) * std::pow(static_cast<double>(n), alpha * static_cast<double>(singles))});
        if (std::all_of(delta.begin(), delta.end(), [](int d) { return d == 2; }))
          report.rows.push_back({n, l, delta, factors, moment, AauBound::aau2, std::abs(moment - 1.0)});
        if (delta.front() == 4 && std::all_of(delta.begin() + 1, delta.end(), [](int d) { return d == 2; })) {
          const PairPower lead{factors.front()};
          const double fourth = oracle(n, std::span<const PairPower>(&lead, 1));
          report.rows.push_back({n, l, delta, factors, moment, AauBound::aau3, std::abs(moment - fourth)});
        }
        int pos = 0;
        while (pos < l && ++digits[static_cast<std::size_t>(pos)] == 3) digits[static_cast<std::size_t>(pos++)] = 0;
        if (pos == l) break;
      }
    }
  }

  // Trend check: per (kind, pattern) the deviation must not grow with n.
  std::map<std::tuple<int, std::vector<int>>, std::vector<std::pair<int, double>>> series;
  for (const auto& row : report.rows)
    if (row.bound != AauBound::aau1) series[{static_cast<int>(row.bound), row.delta}].emplace_back(row.n, row.empirical_constant);
  for (auto& [key, values] : series) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i].second > values[i - 1].second + 1e-15) {
        if (std::get<0>(key) == static_cast<int>(AauBound::aau2)) report.aau2_nonincreasing = false;
        else report.aau3_nonincreasing = false;
      }
    }
  }
  return report;
}

inline void write_aau_csv(const AauReport& report, std::ostream& out) {
  harness::CsvWriter csv(out, {"scheme", "alpha", "n", "l", "delta_pattern", "moment", "bound_kind", "empirical_constant"});
  for (const auto& row : report.rows)
    csv.row(report.scheme, report.alpha, row.n, row.l, delta_pattern(row.delta), row.moment, to_string(row.bound),
            row.empirical_constant);
}

}  // namespace semiband
