#pragma once

// Triangular-scheme samplers (Curie-Weiss, correlated Gaussian, Wigner) and
// exact entry-moment oracles for each of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "semiband/errors.hpp"
#include "semiband/oracle/pair_partition.hpp"
#include "semiband/rng.hpp"
#include "semiband/scheme_sample.hpp"

namespace semiband {

// ---------------------------------------------------------------------------
// Curie-Weiss
// ---------------------------------------------------------------------------

struct CurieWeissParams {
  double beta = 1.0;
  std::int64_t num_spins = 1;

  void validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("Curie-Weiss: beta must be positive");
    if (num_spins < 1) throw std::invalid_argument("Curie-Weiss: need at least one spin");
  }
};

/// Law of the total spin S of N Curie-Weiss spins. prob[i] is P(S = -N + 2i).
struct MagnetizationPmf {
  std::int64_t num_spins = 0;
  std::vector<double> prob;

  std::int64_t magnetization(std::size_t i) const { return -num_spins + 2 * static_cast<std::int64_t>(i); }
  double probability_of(std::int64_t s) const {
    if (s < -num_spins || s > num_spins || (s + num_spins) % 2 != 0) return 0.0;
    return prob[static_cast<std::size_t>((s + num_spins) / 2)];
  }
};

/// p(S = N - 2j) proportional to binom(N, j) exp(beta (N - 2j)^2 / (2N)),
/// evaluated in log space with the maximum subtracted before exponentiation.
inline MagnetizationPmf magnetization_pmf(double beta, std::int64_t num_spins) {
  CurieWeissParams{beta, num_spins}.validate();
  const auto n = num_spins;
  const double nd = static_cast<double>(n);
  std::vector<double> logw(static_cast<std::size_t>(n + 1));
  const double lg_n = std::lgamma(nd + 1.0);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i <= n; ++i) {
    const double id = static_cast<double>(i);
    const double s = static_cast<double>(-n + 2 * i);
    const double lw = lg_n - std::lgamma(id + 1.0) - std::lgamma(nd - id + 1.0) + beta * s * s / (2.0 * nd);
    logw[static_cast<std::size_t>(i)] = lw;
    max_log = std::max(max_log, lw);
  }
  MagnetizationPmf pmf{n, std::vector<double>(logw.size())};
  double total = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    pmf.prob[i] = std::exp(logw[i] - max_log);
    total += pmf.prob[i];
  }
  for (double& p : pmf.prob) p /= total;
  return pmf;
}

namespace detail {

struct MagnetizationTable {
  MagnetizationPmf pmf;
  std::vector<double> cdf;
};

// Read-mostly cache of (beta, N) -> pmf and cdf; safe for concurrent readers.
class MagnetizationCache {
 public:
  std::shared_ptr<const MagnetizationTable> get(double beta, std::int64_t num_spins) {
    const Key key{beta, num_spins};
    {
      std::shared_lock lock(mutex_);
      if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    }
    auto table = std::make_shared<MagnetizationTable>();
    table->pmf = magnetization_pmf(beta, num_spins);
    table->cdf.resize(table->pmf.prob.size());
    std::partial_sum(table->pmf.prob.begin(), table->pmf.prob.end(), table->cdf.begin());
    table->cdf.back() = 1.0;
    std::unique_lock lock(mutex_);
    if (tables_.size() > 64) tables_.clear();
    return tables_.try_emplace(key, std::move(table)).first->second;
  }

 private:
  using Key = std::pair<double, std::int64_t>;
  std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const MagnetizationTable>> tables_;
};

inline MagnetizationCache& magnetization_cache() {
  static MagnetizationCache cache;
  return cache;
}

}  // namespace detail

/// Exact Curie-Weiss(beta, N) sample: draw the magnetization from its law, then
/// place the (N + S) / 2 up-spins uniformly at random.
inline std::vector<std::int8_t> sample_curie_weiss(const CurieWeissParams& params, Rng& rng) {
  params.validate();
  const auto table = detail::magnetization_cache().get(params.beta, params.num_spins);
  const double u = rng.uniform();
  const auto it = std::upper_bound(table->cdf.begin(), table->cdf.end(), u);
  const auto idx = static_cast<std::int64_t>(std::min<std::size_t>(
      static_cast<std::size_t>(it - table->cdf.begin()), table->cdf.size() - 1));
  // idx is the number of up-spins: S = -N + 2 idx.
  std::vector<std::int8_t> spins(static_cast<std::size_t>(params.num_spins), std::int8_t{-1});
  std::fill_n(spins.begin(), idx, std::int8_t{1});
  std::shuffle(spins.begin(), spins.end(), rng.engine());
  return spins;
}

/// n^2 Curie-Weiss(beta, n^2) spins laid out row-major as an n x n grid and
/// symmetrized from the closed upper triangle.
inline SchemeSample curie_weiss_scheme(double beta, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("curie_weiss_scheme: n must be positive");
  const auto nn = static_cast<std::int64_t>(n);
  const auto spins = sample_curie_weiss({beta, nn * nn}, rng);
  SchemeSample out;
  out.n = n;
  out.kind = SchemeKind::curie_weiss;
  out.seed = rng.seed();
  out.params = CurieWeissSchemeInfo{beta};
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = spins[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  return out;
}

/// E[Y_1 ... Y_m] for m distinct Curie-Weiss(beta, N) spins.
///
/// Given the magnetization S, the product of m spins drawn without replacement
/// has mean K_m(S) / binom(N, m) with K_m the Krawtchouk polynomial. The
/// normalized values obey k_0 = 1, k_1 = S / N and
///   k_{j+1} = (S k_j - j k_{j-1}) / (N - j).
inline double cw_product_moment(double beta, std::int64_t num_spins, std::int64_t m) {
  CurieWeissParams{beta, num_spins}.validate();
  if (m < 0) throw std::invalid_argument("cw_product_moment: m must be non-negative");
  if (m > num_spins) throw std::invalid_argument("cw_product_moment: m exceeds the number of spins");
  if (m == 0) return 1.0;
  const auto table = detail::magnetization_cache().get(beta, num_spins);
  const double nd = static_cast<double>(num_spins);
  double total = 0.0;
  for (std::size_t i = 0; i < table->pmf.prob.size(); ++i) {
    const double p = table->pmf.prob[i];
    if (p == 0.0) continue;
    const double s = static_cast<double>(table->pmf.magnetization(i));
    double prev = 1.0;
    double cur = s / nd;
    for (std::int64_t j = 1; j < m; ++j) {
      const double next = (s * cur - static_cast<double>(j) * prev) / (nd - static_cast<double>(j));
      prev = cur;
      cur = next;
    }
    total += p * cur;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Correlated Gaussian
// ---------------------------------------------------------------------------

/// All off-diagonal covariances equal to `off_diagonal`.
struct Equicorrelated {
  double off_diagonal = 0.0;
};

struct ExplicitCovariance {
  Eigen::MatrixXd matrix;
};

using CovSpec = std::variant<Equicorrelated, ExplicitCovariance>;

/// Dense factorization is only offered up to this covariance dimension.
inline constexpr std::int64_t kMaxExplicitCovarianceDim = 4096;

struct GaussianSchemeParams {
  double alpha = 0.5;
  int n = 1;
  CovSpec cov = Equicorrelated{0.0};
};

/// Largest admissible off-diagonal modulus dim^(-alpha).
inline double covariance_bound(std::int64_t dim, double alpha) {
  return std::pow(static_cast<double>(dim), -alpha);
}

/// Equicorrelated covariance with the maximal admissible correlation dim^(-alpha).
inline Equicorrelated worst_case_equicorrelated(int n, double alpha) {
  return Equicorrelated{covariance_bound(triangle_size(n), alpha)};
}

inline Eigen::MatrixXd equicorrelated_matrix(std::int64_t dim, double c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, c);
  m.diagonal().setOnes();
  return m;
}

namespace detail {

inline bool within_bound(double value, double bound) { return std::abs(value) <= bound * (1.0 + 1e-12); }

inline Eigen::LLT<Eigen::MatrixXd> factor_or_throw(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalFailure("covariance not positive definite");
  return llt;
}

}  // namespace detail

/// Checks unit diagonal, |off-diagonal| <= dim^(-alpha) and positive definiteness.
/// Throws std::invalid_argument for structural violations and NumericalFailure
/// when the symmetric factorization fails.
inline void validate_covariance(const CovSpec& cov, std::int64_t dim, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("covariance: alpha must be positive");
  const double bound = covariance_bound(dim, alpha);
  if (const auto* eq = std::get_if<Equicorrelated>(&cov)) {
    const double c = eq->off_diagonal;
    if (!(c > -1.0 && c < 1.0)) throw std::invalid_argument("covariance: off-diagonal must lie in (-1, 1)");
    if (dim > 1 && !detail::within_bound(c, bound))
      throw std::invalid_argument("covariance: off-diagonal exceeds dim^(-alpha)");
    if (dim > 1 && !(c > -1.0 / static_cast<double>(dim - 1)))
      throw NumericalFailure("covariance not positive definite");
    return;
  }
  const auto& m = std::get<ExplicitCovariance>(cov).matrix;
  if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("covariance: dimension mismatch");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (m(i, i) != 1.0) throw std::invalid_argument("covariance: diagonal must be 1");
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) throw std::invalid_argument("covariance: not symmetric");
      if (!detail::within_bound(m(i, j), bound))
        throw std::invalid_argument("covariance: off-diagonal exceeds dim^(-alpha)");
    }
  }
  detail::factor_or_throw(m);
}

/// Fills the closed upper triangle row-major with Y ~ N(0, Sigma) and mirrors it.
inline SchemeSample gaussian_scheme(const GaussianSchemeParams& params, Rng& rng) {
  if (params.n < 1) throw std::invalid_argument("gaussian_scheme: n must be positive");
  const std::int64_t dim = triangle_size(params.n);
  validate_covariance(params.cov, dim, params.alpha);

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(dim);
  double recorded_c = std::numeric_limits<double>::quiet_NaN();
  const auto* eq = std::get_if<Equicorrelated>(&params.cov);
  if (eq != nullptr && eq->off_diagonal >= 0.0) {
    const double c = eq->off_diagonal;
    recorded_c = c;
    const double shared = std::sqrt(c) * normal(rng.engine());
    const double own = std::sqrt(1.0 - c);
    for (std::int64_t i = 0; i < dim; ++i) y(i) = own * normal(rng.engine()) + shared;
  } else {
    if (dim > kMaxExplicitCovarianceDim)
      throw std::invalid_argument("gaussian_scheme: dense factorization limited to dimension 4096");
    Eigen::MatrixXd sigma;
    if (eq != nullptr) {
      recorded_c = eq->off_diagonal;
      sigma = equicorrelated_matrix(dim, eq->off_diagonal);
    } else {
      sigma = std::get<ExplicitCovariance>(params.cov).matrix;
    }
    const auto llt = detail::factor_or_throw(sigma);
    Eigen::VectorXd z(dim);
    for (std::int64_t i = 0; i < dim; ++i) z(i) = normal(rng.engine());
    y = llt.matrixL() * z;
  }

  SchemeSample out;
  out.n = params.n;
  out.kind = SchemeKind::gaussian;
  out.seed = rng.seed();
  out.params = GaussianSchemeInfo{params.alpha, recorded_c};
  out.entries.resize(params.n, params.n);
  for (int i = 0; i < params.n; ++i)
    for (int j = i; j < params.n; ++j) {
      const double v = y(triangle_index(params.n, i, j));
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Wigner
// ---------------------------------------------------------------------------

inline SchemeSample wigner_scheme(WignerDist dist, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("wigner_scheme: n must be positive");
  SchemeSample out;
  out.n = n;
  out.kind = SchemeKind::wigner;
  out.seed = rng.seed();
  out.params = WignerSchemeInfo{dist};
  out.entries.resize(n, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = dist == WignerDist::rademacher ? (coin(rng.engine()) ? 1.0 : -1.0) : normal(rng.engine());
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Exact entry-moment oracles
// ---------------------------------------------------------------------------

/// An entry a_n(i, j) raised to `power`; indices 0-based.
struct PairPower {
  int i = 0;
  int j = 0;
  int power = 1;
};

/// E[prod a_n(i_r, j_r)^{power_r}] for fundamentally different pairs {i_r, j_r}.
using EntryMomentOracle = std::function<double(int n, std::span<const PairPower>)>;

inline EntryMomentOracle curie_weiss_moment_oracle(double beta) {
  return [beta](int n, std::span<const PairPower> factors) {
    // +-1 entries: only the parity of each exponent matters.
    std::int64_t odd = 0;
    for (const auto& f : factors) odd += f.power % 2;
    const auto nn = static_cast<std::int64_t>(n);
    return cw_product_moment(beta, nn * nn, odd);
  };
}

inline double wigner_entry_moment(WignerDist dist, int power) {
  if (power % 2 != 0) return 0.0;
  if (dist == WignerDist::rademacher) return 1.0;
  return static_cast<double>(oracle::count_pair_partitions(power));
}

inline EntryMomentOracle wigner_moment_oracle(WignerDist dist) {
  return [dist](int, std::span<const PairPower> factors) {
    double prod = 1.0;
    for (const auto& f : factors) prod *= wigner_entry_moment(dist, f.power);
    return prod;
  };
}

/// Wick evaluation through the row-major triangle map. `cov_for_n` supplies the
/// covariance spec for dimension n (covariance dimension n(n+1)/2).
inline EntryMomentOracle gaussian_moment_oracle(std::function<CovSpec(int n)> cov_for_n) {
  return [cov_for_n = std::move(cov_for_n)](int n, std::span<const PairPower> factors) {
    const CovSpec cov = cov_for_n(n);
    std::vector<std::int64_t> cov_index;
    std::vector<int> indices;
    for (std::size_t r = 0; r < factors.size(); ++r) {
      cov_index.push_back(triangle_index(n, factors[r].i, factors[r].j));
      for (int p = 0; p < factors[r].power; ++p) indices.push_back(static_cast<int>(r));
    }
    const auto l = static_cast<Eigen::Index>(factors.size());
    Eigen::MatrixXd local(l, l);
    for (Eigen::Index a = 0; a < l; ++a)
      for (Eigen::Index b = 0; b < l; ++b) {
        if (a == b) {
          local(a, b) = 1.0;
        } else if (const auto* eq = std::get_if<Equicorrelated>(&cov)) {
          local(a, b) = cov_index[static_cast<std::size_t>(a)] == cov_index[static_cast<std::size_t>(b)] ? 1.0 : eq->off_diagonal;
        } else {
          local(a, b) = std::get<ExplicitCovariance>(cov).matrix(cov_index[static_cast<std::size_t>(a)],
                                                                cov_index[static_cast<std::size_t>(b)]);
        }
      }
    return oracle::wick_mixed_moment(local, indices);
  };
}

/// Gaussian oracle for the worst-case equicorrelated family c = Delta_n^(-alpha).
inline EntryMomentOracle gaussian_equicorrelated_oracle(double alpha) {
  return gaussian_moment_oracle([alpha](int n) -> CovSpec { return worst_case_equicorrelated(n, alpha); });
}

}  // namespace semiband
