#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "semiband/errors.hpp"

namespace semiband {

/// Sorted (ascending) eigenvalues of a symmetric matrix.
struct SpectralSample {
  int n = 0;
  std::vector<double> eigenvalues;
};

struct EigenDecomposition {
  SpectralSample spectrum;
  Eigen::MatrixXd vectors;  // columns match spectrum.eigenvalues
};

namespace detail {

inline void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) throw std::invalid_argument("eigenvalues: matrix not symmetric");
}

// Householder tridiagonalization followed by implicit symmetric QR; Eigen
// caps the QR phase at 30 * n iterations and reports NoConvergence past it.
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const Eigen::MatrixXd& m, int options) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, options);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
  return solver;
}

}  // namespace detail

inline SpectralSample eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return {};
  const auto solver = detail::solve(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  SpectralSample s{static_cast<int>(m.rows()), std::vector<double>(ev.data(), ev.data() + ev.size())};
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

inline EigenDecomposition eigen_decompose(const Eigen::MatrixXd& m) {
  const auto solver = detail::solve(m, Eigen::ComputeEigenvectors);
  const auto& ev = solver.eigenvalues();
  // Eigen already returns eigenvalues in increasing order.
  return {{static_cast<int>(m.rows()), std::vector<double>(ev.data(), ev.data() + ev.size())}, solver.eigenvectors()};
}

/// (1/n) sum lambda_i^k, the k-th moment of the empirical spectral distribution.
inline double esd_moment(const SpectralSample& s, int k) {
  if (k < 0) throw std::invalid_argument("esd_moment: k must be non-negative");
  if (s.eigenvalues.empty()) throw std::invalid_argument("esd_moment: empty spectrum");
  double total = 0.0;
  for (double lambda : s.eigenvalues) {
    double p = 1.0;
    for (int r = 0; r < k; ++r) p *= lambda;
    total += p;
  }
  return total / static_cast<double>(s.eigenvalues.size());
}

inline constexpr int kMaxCatalanIndex = 30;

inline std::uint64_t catalan(int m) {
  if (m < 0) throw std::invalid_argument("catalan: m must be non-negative");
  if (m > kMaxCatalanIndex) throw std::overflow_error("catalan: index beyond 30");
  std::uint64_t c = 1;
  for (int j = 0; j < m; ++j) c = c * 2 * static_cast<std::uint64_t>(2 * j + 1) / static_cast<std::uint64_t>(j + 2);
  return c;
}

/// Moments of the semicircle law: Catalan(k/2) for even k, 0 for odd k.
inline double semicircle_moment(int k) {
  if (k < 0) throw std::invalid_argument("semicircle_moment: k must be non-negative");
  return k % 2 == 0 ? static_cast<double>(catalan(k / 2)) : 0.0;
}

inline double semicircle_density(double x) {
  if (x <= -2.0 || x >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(x / 2.0) / std::numbers::pi;
}

/// Inverse of semicircle_cdf on [0, 1] by bisection.
inline double semicircle_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("semicircle_quantile: p outside [0, 1]");
  double lo = -2.0;
  double hi = 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (semicircle_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// sup_x |F_n(x) - F(x)| against the semicircle cdf F; F_n is the ESD step cdf.
inline double kolmogorov_distance(const SpectralSample& s) {
  if (s.eigenvalues.empty()) throw std::invalid_argument("kolmogorov_distance: empty spectrum");
  const double n = static_cast<double>(s.eigenvalues.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    const double f = semicircle_cdf(s.eigenvalues[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i + 1) / n), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

}  // namespace semiband
