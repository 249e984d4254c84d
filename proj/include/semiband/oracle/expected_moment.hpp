#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "semiband/bandmatrix.hpp"
#include "semiband/ensembles.hpp"
#include "semiband/oracle/tuple_graph.hpp"

namespace semiband::oracle {

inline constexpr double kMaxExhaustiveTuples = 1e7;

/// Groups the cyclic factors a(t_1,t_2) ... a(t_k,t_1) by unordered pair.
inline std::vector<PairPower> factor_pattern(std::span<const int> t) {
  std::map<Edge, int> mult;
  const std::size_t k = t.size();
  for (std::size_t i = 0; i < k; ++i) ++mult[make_edge(t[i], t[(i + 1) % k])];
  std::vector<PairPower> out;
  out.reserve(mult.size());
  for (const auto& [e, m] : mult) out.push_back({e.first, e.second, m});
  return out;
}

/// E of the k-th ESD moment, (1 / (n b^{k/2})) * sum over relevant tuples of
/// E[a(t_1,t_2) ... a(t_k,t_1)], with each expectation supplied by `oracle`.
inline double exact_expected_moment(const EntryMomentOracle& oracle, int n, int k, const BandSpec& spec) {
  if (spec.n() != n) throw std::invalid_argument("exact_expected_moment: spec dimension mismatch");
  if (k < 1) throw std::invalid_argument("exact_expected_moment: k must be positive");
  if (std::pow(static_cast<double>(n), k) > kMaxExhaustiveTuples)
    throw std::invalid_argument("exact_expected_moment: n^k exceeds the exhaustive range");
  double total = 0.0;
  for_each_tuple(n, k, [&](std::span<const int> t) {
    if (!is_relevant_tuple(t, spec)) return;
    const auto pattern = factor_pattern(t);
    total += oracle(n, pattern);
  });
  return total / (static_cast<double>(n) * std::pow(static_cast<double>(spec.b()), 0.5 * k));
}

}  // namespace semiband::oracle
