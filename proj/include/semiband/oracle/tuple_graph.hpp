#pragma once

// The multigraph of a closed walk t_1 -> t_2 -> ... -> t_k -> t_1: vertices
// are the distinct labels, edge e_i joins {t_i, t_{i+1}} (cyclically).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "semiband/bandmatrix.hpp"

namespace semiband::oracle {

using Tuple = std::vector<int>;

/// Unordered vertex pair with first <= second; first == second is a loop.
struct Edge {
  int first = 0;
  int second = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
  bool is_loop() const noexcept { return first == second; }
};

inline Edge make_edge(int a, int b) { return a <= b ? Edge{a, b} : Edge{b, a}; }

struct TupleGraph {
  Tuple tuple;
  std::map<Edge, int> multiplicity;  // distinct edge -> how many e_i map to it
  std::vector<int> profile;          // profile[l - 1] = number of distinct l-fold edges
  int loop_count = 0;
  int vertex_count = 0;

  int k() const noexcept { return static_cast<int>(tuple.size()); }

  int distinct_edges() const noexcept { return static_cast<int>(multiplicity.size()); }

  bool has_odd_edge() const {
    return std::any_of(multiplicity.begin(), multiplicity.end(), [](const auto& e) { return e.second % 2 != 0; });
  }
};

inline TupleGraph tuple_graph(std::span<const int> t) {
  if (t.empty()) throw std::invalid_argument("tuple_graph: empty tuple");
  TupleGraph g;
  g.tuple.assign(t.begin(), t.end());
  const std::size_t k = t.size();
  for (std::size_t i = 0; i < k; ++i) ++g.multiplicity[make_edge(t[i], t[(i + 1) % k])];
  g.profile.assign(k, 0);
  for (const auto& [edge, mult] : g.multiplicity) {
    ++g.profile[static_cast<std::size_t>(mult - 1)];
    if (edge.is_loop()) ++g.loop_count;
  }
  Tuple labels(t.begin(), t.end());
  std::sort(labels.begin(), labels.end());
  g.vertex_count = static_cast<int>(std::unique(labels.begin(), labels.end()) - labels.begin());
  return g;
}

/// Every cyclically consecutive pair (t_i, t_{i+1}) is b-relevant.
inline bool is_relevant_tuple(std::span<const int> t, const BandSpec& spec) {
  for (int v : t)
    if (v < 0 || v >= spec.n()) throw std::out_of_range("is_relevant_tuple: label outside [0, n)");
  const std::size_t k = t.size();
  for (std::size_t i = 0; i < k; ++i)
    if (!is_relevant(t[i], t[(i + 1) % k], spec)) return false;
  return true;
}

/// Streams every tuple of [0, n)^k in lexicographic order (odometer), with the
/// leading coordinate restricted to [lead_begin, lead_end).
inline void for_each_tuple(int n, int k, int lead_begin, int lead_end,
                           const std::function<void(std::span<const int>)>& visit) {
  if (n < 1 || k < 1) throw std::invalid_argument("for_each_tuple: n and k must be positive");
  lead_end = std::min(lead_end, n);
  if (lead_begin >= lead_end) return;
  Tuple t(static_cast<std::size_t>(k), 0);
  t[0] = lead_begin;
  while (true) {
    visit(t);
    int pos = k - 1;
    while (pos > 0 && ++t[static_cast<std::size_t>(pos)] == n) t[static_cast<std::size_t>(pos--)] = 0;
    if (pos == 0 && ++t[0] == lead_end) return;
  }
}

inline void for_each_tuple(int n, int k, const std::function<void(std::span<const int>)>& visit) {
  for_each_tuple(n, k, 0, n, visit);
}

/// Rotation of `t` that starts at position `start`.
inline Tuple rotate_to(std::span<const int> t, std::size_t start) {
  Tuple out(t.begin(), t.end());
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
  return out;
}

/// Joins two closed walks with a common vertex into one walk of length
/// |t| + |t'|: both are rotated to start at the smallest shared label (earliest
/// occurrence) and concatenated, so u first traverses every edge of t and then
/// every edge of t'.
inline Tuple superpose(std::span<const int> t, std::span<const int> t_prime) {
  int shared = -1;
  for (int v : t)
    if (std::find(t_prime.begin(), t_prime.end(), v) != t_prime.end() && (shared < 0 || v < shared)) shared = v;
  if (shared < 0) throw std::invalid_argument("superpose: tuples share no vertex");
  const auto pos = static_cast<std::size_t>(std::find(t.begin(), t.end(), shared) - t.begin());
  const auto pos_prime = static_cast<std::size_t>(std::find(t_prime.begin(), t_prime.end(), shared) - t_prime.begin());
  Tuple u = rotate_to(t, pos);
  const Tuple tail = rotate_to(t_prime, pos_prime);
  u.insert(u.end(), tail.begin(), tail.end());
  return u;
}

/// Relabels vertices 1, 2, 3, ... in order of first occurrence.
inline Tuple standard_coloring(std::span<const int> t) {
  std::map<int, int> color;
  Tuple out;
  out.reserve(t.size());
  for (int v : t) {
    auto [it, inserted] = color.try_emplace(v, static_cast<int>(color.size()) + 1);
    out.push_back(it->second);
  }
  return out;
}

struct DyckCheck {
  bool ok = false;
  std::vector<int> steps;  // +1 on the first traversal of an edge, -1 on the second
};

/// Succeeds when t has k/2 + 1 vertices and only proper double edges and the
/// walk's first/second-traversal sequence is a Dyck path.
inline DyckCheck dyck_check(std::span<const int> t) {
  DyckCheck result;
  const int k = static_cast<int>(t.size());
  if (k == 0 || k % 2 != 0) return result;
  const TupleGraph g = tuple_graph(t);
  if (g.loop_count != 0 || g.vertex_count != k / 2 + 1) return result;
  if (!std::all_of(g.multiplicity.begin(), g.multiplicity.end(), [](const auto& e) { return e.second == 2; }))
    return result;
  std::map<Edge, int> seen;
  int height = 0;
  bool nonnegative = true;
  for (int i = 0; i < k; ++i) {
    const Edge e = make_edge(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % k)]);
    const int step = seen[e]++ == 0 ? 1 : -1;
    result.steps.push_back(step);
    height += step;
    nonnegative = nonnegative && height >= 0;
  }
  result.ok = nonnegative && height == 0;
  return result;
}

/// Number of standard-form colorings of length k with only proper double
/// edges and k/2 + 1 colors (restricted growth strings filtered by dyck_check).
inline std::uint64_t count_dyck_colorings(int k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("count_dyck_colorings: k must be even and positive");
  std::uint64_t count = 0;
  Tuple f(static_cast<std::size_t>(k), 1);
  std::function<void(int, int)> rec = [&](int pos, int max_color) {
    if (pos == k) {
      if (max_color == k / 2 + 1 && dyck_check(f).ok) ++count;
      return;
    }
    for (int c = 1; c <= std::min(max_color + 1, k / 2 + 1); ++c) {
      f[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, std::max(max_color, c));
    }
  };
  rec(1, 1);
  return count;
}

}  // namespace semiband::oracle
