#pragma once

// Exhaustive validators for the counting lemmas behind the moment method:
// vertex bounds per tuple, tuple-count and equivalence-class bounds, and the
// paired-tuple bounds used for the variance of moments. Every check streams
// tuples and reports violations; a correct implementation of the lemmas must
// produce none.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semiband/bandmatrix.hpp"
#include "semiband/oracle/tuple_graph.hpp"

namespace semiband::oracle {

struct Violation {
  std::string check;
  Tuple t;
  Tuple t_prime;
  std::string detail;
};

struct LemmaReport {
  std::uint64_t checks = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;  // first few only

  static constexpr std::size_t kKeep = 32;

  bool ok() const noexcept { return violation_count == 0; }

  void expect(bool holds, std::string check, const Tuple& t, const Tuple& t_prime, const std::string& detail) {
    ++checks;
    if (holds) return;
    ++violation_count;
    if (violations.size() < kKeep) violations.push_back({std::move(check), t, t_prime, detail});
  }

  void merge(const LemmaReport& other) {
    checks += other.checks;
    violation_count += other.violation_count;
    for (const auto& v : other.violations)
      if (violations.size() < kKeep) violations.push_back(v);
  }
};

namespace detail {

inline long double ipow(long double base, int e) { return std::pow(base, static_cast<long double>(e)); }

inline std::string describe(long double lhs, long double rhs) {
  std::ostringstream os;
  os << lhs << " > " << rhs;
  return os.str();
}

inline int profile_sum(const std::vector<int>& profile) { return std::accumulate(profile.begin(), profile.end(), 0); }

inline bool has_odd(const std::vector<int>& profile) {
  for (std::size_t l = 0; l < profile.size(); l += 2)
    if (profile[l] != 0) return true;
  return false;
}

}  // namespace detail

/// #V <= 1 + sum(kappa) - loops for every tuple, and #V <= sum(kappa) when an
/// odd edge exists. Scans all of [0, n)^k.
inline LemmaReport verify_vertex_bounds(int n, int k) {
  LemmaReport report;
  for_each_tuple(n, k, [&](std::span<const int> t) {
    const TupleGraph g = tuple_graph(t);
    const int edges = g.distinct_edges();
    const Tuple tuple(t.begin(), t.end());
    report.expect(g.vertex_count <= 1 + edges - g.loop_count, "vertex bound", tuple, {},
                  detail::describe(g.vertex_count, 1 + edges - g.loop_count));
    if (g.has_odd_edge())
      report.expect(g.vertex_count <= edges, "vertex bound with odd edge", tuple, {},
                    detail::describe(g.vertex_count, edges));
  });
  return report;
}

/// The bounds hold for every tuple, relevant or not, so the band only fixes n.
inline LemmaReport verify_vertex_bounds(int n, int k, const BandSpec& spec) {
  if (spec.n() != n) throw std::invalid_argument("verify_vertex_bounds: spec dimension mismatch");
  return verify_vertex_bounds(n, k);
}

struct ClassInfo {
  std::uint64_t size = 0;
  Tuple representative;
};

/// Relevant tuples grouped by profile (the equivalence relation keys on kappa only).
struct EquivalenceClassTable {
  int n = 0;
  int k = 0;
  int b = 0;
  std::uint64_t total = 0;
  std::map<std::vector<int>, ClassInfo> classes;
};

inline EquivalenceClassTable build_class_table(int k, const BandSpec& spec) {
  EquivalenceClassTable table{spec.n(), k, spec.b(), 0, {}};
  for_each_tuple(spec.n(), k, [&](std::span<const int> t) {
    if (!is_relevant_tuple(t, spec)) return;
    auto& info = table.classes[tuple_graph(t).profile];
    if (info.size++ == 0) info.representative.assign(t.begin(), t.end());
    ++table.total;
  });
  return table;
}

struct CountBoundsResult {
  LemmaReport report;
  EquivalenceClassTable table;
  std::vector<std::uint64_t> at_most_vertices;  // [l - 1] = #{relevant t : #V <= l}
};

/// Relevant-tuple counts by vertex number, the number of classes, and class sizes.
inline CountBoundsResult verify_count_bounds(int n, int k, const BandSpec& spec) {
  if (spec.n() != n) throw std::invalid_argument("verify_count_bounds: spec dimension mismatch");
  CountBoundsResult res;
  res.table = build_class_table(k, spec);
  res.at_most_vertices.assign(static_cast<std::size_t>(k), 0);
  for_each_tuple(n, k, [&](std::span<const int> t) {
    if (!is_relevant_tuple(t, spec)) return;
    const int v = tuple_graph(t).vertex_count;
    for (int l = v; l <= k; ++l) ++res.at_most_vertices[static_cast<std::size_t>(l - 1)];
  });

  const long double kk = detail::ipow(k, k);
  const long double nb = n;
  const long double b = spec.b();
  for (int l = 1; l <= k; ++l) {
    const long double bound = kk * nb * detail::ipow(b, l - 1);
    const auto count = static_cast<long double>(res.at_most_vertices[static_cast<std::size_t>(l - 1)]);
    res.report.expect(count <= bound, "tuples with at most l vertices (l=" + std::to_string(l) + ")", {}, {},
                      detail::describe(count, bound));
  }
  const auto classes = static_cast<long double>(res.table.classes.size());
  res.report.expect(classes <= detail::ipow(k + 1, k), "number of classes", {}, {},
                    detail::describe(classes, detail::ipow(k + 1, k)));
  for (const auto& [profile, info] : res.table.classes) {
    const int edges = detail::profile_sum(profile);
    const auto size = static_cast<long double>(info.size);
    const long double bound = kk * nb * detail::ipow(b, edges);
    res.report.expect(size <= bound, "class size", info.representative, {}, detail::describe(size, bound));
    if (detail::has_odd(profile)) {
      const long double odd_bound = kk * nb * detail::ipow(b, edges - 1);
      res.report.expect(size <= odd_bound, "class size with odd edge", info.representative, {},
                        detail::describe(size, odd_bound));
    }
  }
  return res;
}

/// Counts for one ordered pair of equivalence classes (s, s').
struct ClassPairCounts {
  std::uint64_t total = 0;
  std::uint64_t disjoint = 0;
  std::uint64_t common = 0;
  std::vector<std::uint64_t> common_by_shared;  // [l - 1] = pairs sharing exactly l edges
};

struct PairBoundsResult {
  LemmaReport report;
  std::map<std::pair<std::vector<int>, std::vector<int>>, ClassPairCounts> pairs;
};

/// Paired-tuple checks over all relevant (t, t'): the vertex bounds for pairs
/// with a common edge, the superposition construction, the T^c / T^c_l count
/// bounds, and the partition T = T^d + T^c = T^d + sum_l T^c_l.
inline PairBoundsResult verify_pair_bounds(int n, int k, const BandSpec& spec) {
  if (spec.n() != n) throw std::invalid_argument("verify_pair_bounds: spec dimension mismatch");
  struct Entry {
    TupleGraph graph;
    std::set<int> vertices;
  };
  std::vector<Entry> relevant;
  for_each_tuple(n, k, [&](std::span<const int> t) {
    if (!is_relevant_tuple(t, spec)) return;
    relevant.push_back({tuple_graph(t), std::set<int>(t.begin(), t.end())});
  });

  PairBoundsResult res;
  for (const auto& a : relevant) {
    for (const auto& c : relevant) {
      auto& counts = res.pairs[{a.graph.profile, c.graph.profile}];
      if (counts.common_by_shared.empty()) counts.common_by_shared.assign(static_cast<std::size_t>(k), 0);
      ++counts.total;
      int shared = 0;
      for (const auto& [edge, mult] : a.graph.multiplicity) shared += c.graph.multiplicity.count(edge) ? 1 : 0;
      if (shared == 0) {
        ++counts.disjoint;
        continue;
      }
      ++counts.common;
      ++counts.common_by_shared[static_cast<std::size_t>(shared - 1)];

      std::set<int> uni = a.vertices;
      uni.insert(c.vertices.begin(), c.vertices.end());
      const int union_size = static_cast<int>(uni.size());
      const bool odd = a.graph.has_odd_edge() || c.graph.has_odd_edge();
      if (!odd) {
        res.report.expect(union_size <= k, "pair vertex bound, even edges", a.graph.tuple, c.graph.tuple,
                          detail::describe(union_size, k));
      } else {
        const int bound = a.graph.distinct_edges() + c.graph.distinct_edges() - shared;
        res.report.expect(union_size <= bound, "pair vertex bound, odd edge", a.graph.tuple, c.graph.tuple,
                          detail::describe(union_size, bound));
      }

      const Tuple u = superpose(a.graph.tuple, c.graph.tuple);
      const TupleGraph gu = tuple_graph(u);
      bool edges_add = gu.multiplicity.size() <= a.graph.multiplicity.size() + c.graph.multiplicity.size();
      for (const auto& [edge, mult] : gu.multiplicity) {
        const auto in_a = a.graph.multiplicity.find(edge);
        const auto in_c = c.graph.multiplicity.find(edge);
        const int expected = (in_a != a.graph.multiplicity.end() ? in_a->second : 0) +
                             (in_c != c.graph.multiplicity.end() ? in_c->second : 0);
        edges_add = edges_add && expected == mult;
      }
      res.report.expect(static_cast<int>(u.size()) == 2 * k && gu.vertex_count == union_size && edges_add &&
                            is_relevant_tuple(u, spec),
                        "superposition", a.graph.tuple, c.graph.tuple, "superposed walk malformed");
    }
  }

  const long double kk = static_cast<long double>(k) * k * detail::ipow(2.0L * k, 2 * k);
  const long double nb = n;
  const long double b = spec.b();
  std::map<std::vector<int>, std::uint64_t> class_size;
  for (const auto& e : relevant) ++class_size[e.graph.profile];
  for (const auto& [key, counts] : res.pairs) {
    const auto& [s, s_prime] = key;
    const Tuple rep = {};
    res.report.expect(counts.total == class_size[s] * class_size[s_prime] && counts.disjoint + counts.common == counts.total,
                      "T = T^d + T^c", rep, rep, "partition sizes disagree");
    const auto by_shared = std::accumulate(counts.common_by_shared.begin(), counts.common_by_shared.end(), std::uint64_t{0});
    res.report.expect(by_shared == counts.common, "T^c = sum_l T^c_l", rep, rep, "partition sizes disagree");

    const int edges = detail::profile_sum(s) + detail::profile_sum(s_prime);
    const bool odd = detail::has_odd(s) || detail::has_odd(s_prime);
    const auto common = static_cast<long double>(counts.common);
    if (!odd) {
      const long double bound = kk * nb * detail::ipow(b, k - 1);
      res.report.expect(common <= bound, "T^c bound, even edges", rep, rep, detail::describe(common, bound));
    } else {
      const long double bound = kk * nb * detail::ipow(b, edges - 2);
      res.report.expect(common <= bound, "T^c bound, odd edge", rep, rep, detail::describe(common, bound));
      for (int l = 1; l <= k; ++l) {
        const auto cl = static_cast<long double>(counts.common_by_shared[static_cast<std::size_t>(l - 1)]);
        const long double lb = kk * nb * detail::ipow(b, edges - l - 1);
        res.report.expect(cl <= lb, "T^c_l bound (l=" + std::to_string(l) + ")", rep, rep, detail::describe(cl, lb));
      }
    }
  }
  return res;
}

}  // namespace semiband::oracle
