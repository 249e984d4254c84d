#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace semiband {

enum class SchemeKind { curie_weiss, gaussian, wigner };

enum class WignerDist { rademacher, standard_normal };

inline std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::curie_weiss: return "curie_weiss";
    case SchemeKind::gaussian: return "gaussian";
    case SchemeKind::wigner: return "wigner";
  }
  return "unknown";
}

inline std::string_view to_string(WignerDist dist) {
  return dist == WignerDist::rademacher ? "rademacher" : "standard_normal";
}

inline SchemeKind parse_scheme_kind(std::string_view s) {
  if (s == "curie_weiss" || s == "curie-weiss" || s == "cw") return SchemeKind::curie_weiss;
  if (s == "gaussian") return SchemeKind::gaussian;
  if (s == "wigner") return SchemeKind::wigner;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

inline WignerDist parse_wigner_dist(std::string_view s) {
  if (s == "rademacher") return WignerDist::rademacher;
  if (s == "standard_normal" || s == "normal") return WignerDist::standard_normal;
  throw std::invalid_argument("unknown wigner distribution '" + std::string(s) + "'");
}

struct CurieWeissSchemeInfo {
  double beta;
};
struct GaussianSchemeInfo {
  double alpha;
  double off_diagonal;  // NaN for explicit covariances
};
struct WignerSchemeInfo {
  WignerDist dist;
};

using SchemeInfo = std::variant<CurieWeissSchemeInfo, GaussianSchemeInfo, WignerSchemeInfo>;

/// A realized symmetric n x n array of raw (unscaled) entries.
struct SchemeSample {
  int n = 0;
  Eigen::MatrixXd entries;
  SchemeKind kind = SchemeKind::wigner;
  std::uint64_t seed = 0;
  SchemeInfo params = WignerSchemeInfo{WignerDist::rademacher};
};

/// Number of entries in the closed upper triangle of an n x n matrix.
constexpr std::int64_t triangle_size(std::int64_t n) { return n * (n + 1) / 2; }

/// Row-major position of (i, j) in the closed upper triangle, 0-based,
/// mirrored for i > j so that the index depends only on {i, j}.
constexpr std::int64_t triangle_index(std::int64_t n, std::int64_t i, std::int64_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace semiband
