#pragma once

// Periodic band structure: b cyclic diagonals around the main diagonal, with
// indices identified modulo n. Indices are 0-based throughout.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semiband/scheme_sample.hpp"

namespace semiband {

/// Dimension n and bandwidth b with b = n, or b < n and b odd.
class BandSpec {
 public:
  BandSpec(int n, int b) : n_(n), b_(b) {
    if (n < 1) throw std::invalid_argument("BandSpec: n must be positive");
    if (b < 1 || b > n) throw std::invalid_argument("BandSpec: bandwidth must lie in [1, n]");
    if (b < n && b % 2 == 0)
      throw std::invalid_argument("BandSpec: bandwidth " + std::to_string(b) + " below n=" + std::to_string(n) +
                                  " must be odd");
  }

  static BandSpec full(int n) { return BandSpec(n, n); }

  int n() const noexcept { return n_; }
  int b() const noexcept { return b_; }
  bool is_full() const noexcept { return b_ == n_; }

  friend bool operator==(const BandSpec&, const BandSpec&) = default;

 private:
  int n_;
  int b_;
};

/// Every admissible bandwidth for dimension n, ascending.
inline std::vector<int> valid_bandwidths(int n) {
  std::vector<int> out;
  for (int b = 1; b < n; b += 2) out.push_back(b);
  out.push_back(n);
  return out;
}

inline bool is_relevant(int i, int j, const BandSpec& spec) {
  const int n = spec.n();
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("is_relevant: index outside [0, n)");
  if (spec.is_full()) return true;
  const int half = (spec.b() - 1) / 2;
  const int d = std::abs(i - j);
  return d <= half || d >= n - half;
}

inline std::int64_t count_relevant(const BandSpec& spec) {
  return static_cast<std::int64_t>(spec.n()) * spec.b();
}

/// Copy of `m` with zeros at non-relevant positions.
inline Eigen::MatrixXd apply_band_mask(const Eigen::MatrixXd& m, const BandSpec& spec) {
  if (m.rows() != spec.n() || m.cols() != spec.n()) throw std::invalid_argument("apply_band_mask: dimension mismatch");
  if (spec.is_full()) return m;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const int n = spec.n();
  const int half = (spec.b() - 1) / 2;
  for (int i = 0; i < n; ++i)
    for (int off = -half; off <= half; ++off) {
      const int j = ((i + off) % n + n) % n;
      out(i, j) = m(i, j);
    }
  return out;
}

inline Eigen::MatrixXd apply_band_mask(const SchemeSample& sample, const BandSpec& spec) {
  if (sample.n != spec.n()) throw std::invalid_argument("apply_band_mask: dimension mismatch");
  return apply_band_mask(sample.entries, spec);
}

/// X = (masked a) / sqrt(b).
struct ScaledBandMatrix {
  BandSpec spec;
  Eigen::MatrixXd values;
  bool scale_applied = false;
};

inline ScaledBandMatrix build_X(const SchemeSample& sample, const BandSpec& spec) {
  Eigen::MatrixXd masked = apply_band_mask(sample, spec);
  masked /= std::sqrt(static_cast<double>(spec.b()));
  return ScaledBandMatrix{spec, std::move(masked), true};
}

}  // namespace semiband
