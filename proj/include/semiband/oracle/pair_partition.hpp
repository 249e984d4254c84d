#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace semiband::oracle {

/// A partition of {0, ..., 2m-1} into unordered pairs; each block stored
/// with first < second, blocks ordered by their first element.
struct PairPartition {
  std::vector<std::pair<int, int>> blocks;
};

/// (k-1)!! for even k, the number of pair partitions of a k-set; 0 for odd k.
constexpr std::uint64_t count_pair_partitions(int k) {
  if (k < 0 || k % 2 != 0) return 0;
  std::uint64_t result = 1;
  for (int j = k - 1; j > 1; j -= 2) result *= static_cast<std::uint64_t>(j);
  return result;
}

namespace detail {

inline void pair_partitions_rec(std::vector<int>& open, std::vector<std::pair<int, int>>& blocks,
                                const std::function<void(const PairPartition&)>& visit) {
  if (open.empty()) {
    visit(PairPartition{blocks});
    return;
  }
  const int first = open.front();
  for (std::size_t p = 1; p < open.size(); ++p) {
    const int partner = open[p];
    std::vector<int> rest;
    rest.reserve(open.size() - 2);
    for (std::size_t q = 1; q < open.size(); ++q)
      if (q != p) rest.push_back(open[q]);
    blocks.emplace_back(first, partner);
    pair_partitions_rec(rest, blocks, visit);
    blocks.pop_back();
  }
}

}  // namespace detail

/// Visits every pair partition of {0, ..., m2-1} without materializing the list.
inline void for_each_pair_partition(int m2, const std::function<void(const PairPartition&)>& visit) {
  if (m2 < 0 || m2 % 2 != 0) throw std::invalid_argument("pair partitions need an even ground set size");
  std::vector<int> open(static_cast<std::size_t>(m2));
  for (int i = 0; i < m2; ++i) open[static_cast<std::size_t>(i)] = i;
  std::vector<std::pair<int, int>> blocks;
  detail::pair_partitions_rec(open, blocks, visit);
}

inline constexpr int kMaxPairPartitionSize = 16;

/// All pair partitions of {0, ..., m2-1}; m2 must be even and at most 16.
inline std::vector<PairPartition> enumerate_pair_partitions(int m2) {
  if (m2 < 0 || m2 % 2 != 0) throw std::invalid_argument("pair partitions need an even ground set size");
  if (m2 > kMaxPairPartitionSize) throw std::invalid_argument("pair partition enumeration capped at 16 elements");
  std::vector<PairPartition> out;
  out.reserve(count_pair_partitions(m2));
  for_each_pair_partition(m2, [&](const PairPartition& p) { out.push_back(p); });
  return out;
}

namespace detail {

// Hafnian-style recursion: pair the first open slot with every other one.
inline double wick_rec(const Eigen::MatrixXd& cov, std::vector<int>& idx, int count) {
  if (count == 0) return 1.0;
  const int a = idx[static_cast<std::size_t>(count - 1)];
  double total = 0.0;
  for (int p = 0; p < count - 1; ++p) {
    const double weight = cov(a, idx[static_cast<std::size_t>(p)]);
    if (weight == 0.0) continue;
    std::swap(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(count - 2)]);
    total += weight * wick_rec(cov, idx, count - 2);
    std::swap(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(count - 2)]);
  }
  return total;
}

}  // namespace detail

/// E[Y_{i(1)} ... Y_{i(k)}] for Y ~ N(0, cov) by the Wick/Isserlis pair sum.
/// Indices are 0-based rows of `cov`; k is capped at 16.
inline double wick_mixed_moment(const Eigen::MatrixXd& cov, std::span<const int> indices) {
  const int k = static_cast<int>(indices.size());
  if (k > kMaxPairPartitionSize) throw std::invalid_argument("wick_mixed_moment: at most 16 factors");
  for (int i : indices)
    if (i < 0 || i >= cov.rows()) throw std::out_of_range("wick_mixed_moment: index outside covariance");
  if (k % 2 != 0) return 0.0;
  std::vector<int> idx(indices.begin(), indices.end());
  return detail::wick_rec(cov, idx, k);
}

}  // namespace semiband::oracle
