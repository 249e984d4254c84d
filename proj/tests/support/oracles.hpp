#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's own combinatorics.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "semiband/bandmatrix.hpp"

namespace testsupport {

inline double double_factorial_odd(int m) {  // (m-1)!! for even m, 1 for m = 0
  double r = 1.0;
  for (int j = m - 1; j > 1; j -= 2) r *= j;
  return r;
}

inline double binom(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

/// Laplace expansion along the first row.
inline double cofactor_determinant(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double det = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, jj = 0; j < n; ++j)
        if (j != c) minor(i - 1, jj++) = m(i, j);
    det += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * cofactor_determinant(minor);
  }
  return det;
}

/// E[tr(X^k) / n] for a Rademacher scheme, averaging over all 2^(n(n+1)/2)
/// sign assignments of the closed upper triangle.
inline double rademacher_enumeration_moment(int n, int k, const semiband::BandSpec& spec) {
  const int entries = n * (n + 1) / 2;
  const std::uint64_t total = std::uint64_t{1} << entries;
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Eigen::MatrixXd a(n, n);
    int bit = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++bit) a(i, j) = a(j, i) = ((mask >> bit) & 1U) ? 1.0 : -1.0;
    Eigen::MatrixXd x = semiband::apply_band_mask(a, spec) / std::sqrt(static_cast<double>(spec.b()));
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    for (int r = 0; r < k; ++r) p = p * x;
    sum += p.trace() / n;
  }
  return sum / static_cast<double>(total);
}

/// Curie-Weiss(beta, N) expectation of f over all 2^N configurations.
inline double curie_weiss_enumerate(double beta, int N, const std::function<double(const std::vector<int>&)>& f) {
  double z = 0.0;
  double acc = 0.0;
  std::vector<int> y(static_cast<std::size_t>(N));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
    int s = 0;
    for (int i = 0; i < N; ++i) {
      y[static_cast<std::size_t>(i)] = ((mask >> i) & 1U) ? 1 : -1;
      s += y[static_cast<std::size_t>(i)];
    }
    const double w = std::exp(beta * s * s / (2.0 * N));
    z += w;
    acc += w * f(y);
  }
  return acc / z;
}

/// Polynomial in g^2 (coefficient j multiplies g^{2j}) averaged over g ~ N(0,1).
inline double gaussian_average(const std::vector<double>& coeffs) {
  double r = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) r += coeffs[j] * double_factorial_odd(static_cast<int>(2 * j));
  return r;
}

inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Equicorrelated Y_r = sqrt(1-c) Z_r + sqrt(c) G with c >= 0. Conditional on
// G = g: E[Y^2 | g] = (1-c) + c g^2 and E[Y^4 | g] = 3(1-c)^2 + 6(1-c)c g^2 + c^2 g^4.

/// E[Y_1^2 ... Y_l^2] for distinct coordinates.
inline double equicorrelated_square_product(double c, int l) {
  std::vector<double> p{1.0};
  for (int r = 0; r < l; ++r) p = poly_mul(p, {1.0 - c, c});
  return gaussian_average(p);
}

/// E[Y_1^4 Y_2^2 ... Y_l^2] for distinct coordinates.
inline double equicorrelated_fourth_times_squares(double c, int l) {
  std::vector<double> p{3.0 * (1.0 - c) * (1.0 - c), 6.0 * (1.0 - c) * c, c * c};
  for (int r = 1; r < l; ++r) p = poly_mul(p, {1.0 - c, c});
  return gaussian_average(p);
}

/// Adaptive double-exponential quadrature.
template <typename F>
double integrate(F f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b);
}

}  // namespace testsupport
