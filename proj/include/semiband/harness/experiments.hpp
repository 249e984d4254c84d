#pragma once

// Experiment drivers behind the CLI: convergence and variance studies,
// exact-vs-Monte-Carlo comparison, the lemma suite and single samples. Each
// driver writes CSVs plus a JSON manifest into the configured directory.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "semiband/aau.hpp"
#include "semiband/bandmatrix.hpp"
#include "semiband/errors.hpp"
#include "semiband/harness/config.hpp"
#include "semiband/harness/csv.hpp"
#include "semiband/harness/manifest.hpp"
#include "semiband/harness/parallel.hpp"
#include "semiband/oracle/expected_moment.hpp"
#include "semiband/oracle/gaussian_lemmas.hpp"
#include "semiband/oracle/lemmas.hpp"
#include "semiband/oracle/tuple_graph.hpp"
#include "semiband/rng.hpp"
#include "semiband/spectra.hpp"

namespace semiband::harness {

namespace fs = std::filesystem;

/// A replica that threw; carries the derived seed so the run can be replayed.
class ReplicaFailure : public std::runtime_error {
 public:
  ReplicaFailure(const std::string& what, std::uint64_t seed, bool numerical)
      : std::runtime_error(what), seed_(seed), numerical_(numerical) {}
  std::uint64_t seed() const noexcept { return seed_; }
  bool numerical() const noexcept { return numerical_; }

 private:
  std::uint64_t seed_;
  bool numerical_;
};

struct MeanStderr {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance, NaN for one value
  double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  const double m = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  if (xs.size() < 2) {
    out.variance = std::numeric_limits<double>::quiet_NaN();
    out.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.variance = ss / (m - 1.0);
  out.stderr_ = std::sqrt(out.variance / m);
  return out;
}

namespace detail {

inline fs::path output_dir(const ExperimentConfig& cfg) {
  fs::path dir = cfg.out_dir.empty() ? fs::path("out") : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

struct ReplicaResult {
  std::vector<double> moments;  // aligned with cfg.moments
  double kolmogorov = 0.0;
  double seconds = 0.0;
  std::vector<double> eigenvalues;
};

inline ReplicaResult run_replica(const ExperimentConfig& cfg, const BandSpec& spec, std::uint64_t seed, bool keep) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  const SchemeSample sample = sample_scheme(cfg.scheme, spec.n(), rng);
  const ScaledBandMatrix x = build_X(sample, spec);
  SpectralSample s = eigenvalues(x.values);
  ReplicaResult r;
  for (int k : cfg.moments) r.moments.push_back(esd_moment(s, k));
  r.kolmogorov = kolmogorov_distance(s);
  if (keep) r.eigenvalues = std::move(s.eigenvalues);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Runs all replicas of every size; replica seeds use the global index
/// size_index * R + r.
inline std::vector<std::vector<ReplicaResult>> run_replicas(const ExperimentConfig& cfg, RunManifest& manifest,
                                                            bool keep_eigenvalues, const fs::path& manifest_path) {
  const auto sizes = cfg.sizes();
  std::vector<std::vector<ReplicaResult>> results(sizes.size());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const auto& spec = sizes[si];
    const auto R = static_cast<std::size_t>(cfg.replicas);
    std::vector<std::uint64_t> seeds(R);
    for (std::size_t r = 0; r < R; ++r) {
      seeds[r] = derive_seed(cfg.seed, si * R + r);
      manifest.add_seed({spec.n(), spec.b(), static_cast<int>(r), seeds[r]});
    }
    results[si].resize(R);
    try {
      parallel_for(R, cfg.threads, [&](std::size_t r) {
        try {
          results[si][r] = run_replica(cfg, spec, seeds[r], keep_eigenvalues);
        } catch (const NumericalFailure& e) {
          throw ReplicaFailure(e.what(), seeds[r], true);
        } catch (const std::exception& e) {
          throw ReplicaFailure(e.what(), seeds[r], false);
        }
      });
    } catch (const ReplicaFailure& f) {
      manifest.extra()["failure"] = {{"n", spec.n()}, {"b", spec.b()}, {"seed", f.seed()}, {"message", f.what()}};
      manifest.write(manifest_path);
      throw;
    }
  }
  return results;
}

}  // namespace detail

struct SummaryRow {
  int n = 0;
  int b = 0;
  std::string statistic;  // "m<k>" or "kolmogorov"
  int replicas = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double reference = 0.0;
  double abs_deviation = 0.0;
};

struct ConvergenceResult {
  std::vector<SummaryRow> summary;
  fs::path dir;
  std::vector<std::string> files;

  const SummaryRow& find(int n, const std::string& statistic) const {
    for (const auto& row : summary)
      if (row.n == n && row.statistic == statistic) return row;
    throw std::out_of_range("no summary row for n=" + std::to_string(n) + " " + statistic);
  }
};

/// Samples every (n, b) R times; records ESD moments and the Kolmogorov
/// distance per replica and per-size means with standard errors.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg, const std::string& command = "converge") {
  cfg.validate();
  const auto dir = detail::output_dir(cfg);
  const auto manifest_path = dir / "convergence_manifest.json";
  RunManifest manifest(command, cfg);
  const auto sizes = cfg.sizes();
  const auto results = detail::run_replicas(cfg, manifest, cfg.save_eigenvalues, manifest_path);

  ConvergenceResult out;
  out.dir = dir;
  {
    auto f = detail::open_out(dir / "convergence.csv");
    CsvWriter csv(f, {"n", "b", "replica", "k", "moment", "kolmogorov"});
    for (std::size_t si = 0; si < sizes.size(); ++si)
      for (std::size_t r = 0; r < results[si].size(); ++r)
        for (std::size_t ki = 0; ki < cfg.moments.size(); ++ki)
          csv.row(sizes[si].n(), sizes[si].b(), r, cfg.moments[ki], results[si][r].moments[ki], results[si][r].kolmogorov);
  }
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int R = cfg.replicas;
    for (std::size_t ki = 0; ki < cfg.moments.size(); ++ki) {
      std::vector<double> xs;
      for (const auto& rr : results[si]) xs.push_back(rr.moments[ki]);
      const auto ms = mean_stderr(xs);
      const double ref = semicircle_moment(cfg.moments[ki]);
      out.summary.push_back({sizes[si].n(), sizes[si].b(), "m" + std::to_string(cfg.moments[ki]), R, ms.mean, ms.stderr_,
                             ref, std::abs(ms.mean - ref)});
    }
    std::vector<double> ks;
    for (const auto& rr : results[si]) ks.push_back(rr.kolmogorov);
    const auto ms = mean_stderr(ks);
    out.summary.push_back({sizes[si].n(), sizes[si].b(), "kolmogorov", R, ms.mean, ms.stderr_, 0.0, ms.mean});
  }
  {
    auto f = detail::open_out(dir / "convergence_summary.csv");
    CsvWriter csv(f, {"n", "b", "statistic", "replicas", "mean", "stderr", "reference", "abs_deviation"});
    for (const auto& s : out.summary) csv.row(s.n, s.b, s.statistic, s.replicas, s.mean, s.stderr_, s.reference, s.abs_deviation);
  }
  {
    auto f = detail::open_out(dir / "convergence_timing.csv");
    CsvWriter csv(f, {"n", "b", "replica", "seconds"});
    for (std::size_t si = 0; si < sizes.size(); ++si)
      for (std::size_t r = 0; r < results[si].size(); ++r) csv.row(sizes[si].n(), sizes[si].b(), r, results[si][r].seconds);
  }
  out.files = {"convergence.csv", "convergence_summary.csv", "convergence_timing.csv"};
  if (cfg.save_eigenvalues) {
    auto f = detail::open_out(dir / "eigenvalues.csv");
    CsvWriter csv(f, {"n", "b", "replica", "eigenvalue"});
    for (std::size_t si = 0; si < sizes.size(); ++si)
      for (std::size_t r = 0; r < results[si].size(); ++r)
        for (double ev : results[si][r].eigenvalues) csv.row(sizes[si].n(), sizes[si].b(), r, ev);
    out.files.push_back("eigenvalues.csv");
  }
  for (const auto& name : out.files) manifest.add_output(dir / name);
  manifest.write(manifest_path);
  return out;
}

struct VarianceRow {
  int n = 0;
  int b = 0;
  int k = 0;
  int replicas = 0;
  double mean = 0.0;
  double variance = 0.0;
};

struct VarianceFit {
  int k = 0;
  int points = 0;
  double slope = 0.0;
  double slope_stderr = 0.0;  // NaN with fewer than three points
  double intercept = 0.0;
  bool strictly_decreasing = false;
  bool slope_below_minus_one = false;
};

/// Least squares of ln(variance) on ln(n), skipping non-positive variances.
inline VarianceFit fit_loglog(int k, const std::vector<std::pair<int, double>>& points) {
  VarianceFit fit;
  fit.k = k;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [n, v] : points) {
    if (!(v > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(v));
  }
  fit.points = static_cast<int>(xs.size());
  fit.strictly_decreasing = points.size() >= 2;
  for (std::size_t i = 1; i < points.size(); ++i)
    fit.strictly_decreasing = fit.strictly_decreasing && points[i].second < points[i - 1].second;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() < 2) {
    fit.slope = fit.slope_stderr = fit.intercept = nan;
    return fit;
  }
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (xs.size() >= 3) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += e * e;
    }
    fit.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
  } else {
    fit.slope_stderr = nan;
  }
  fit.slope_below_minus_one = fit.slope < -1.0;
  return fit;
}

struct VarianceResult {
  std::vector<VarianceRow> rows;
  std::vector<VarianceFit> fits;
  std::vector<std::string> warnings;
  fs::path dir;
};

/// Sample variance of each ESD moment across replicas, per size, with a
/// log-log slope of variance against n for every k.
inline VarianceResult run_variance_study(const ExperimentConfig& cfg, const std::string& command = "variance") {
  cfg.validate();
  if (cfg.replicas < 2) throw std::invalid_argument("variance undefined for a single replica");
  VarianceResult out;
  if (cfg.replicas < 100)
    out.warnings.push_back("replicas = " + std::to_string(cfg.replicas) + " is below the recommended 100");
  const auto dir = detail::output_dir(cfg);
  out.dir = dir;
  const auto manifest_path = dir / "variance_manifest.json";
  RunManifest manifest(command, cfg);
  const auto sizes = cfg.sizes();
  const auto results = detail::run_replicas(cfg, manifest, false, manifest_path);

  for (std::size_t ki = 0; ki < cfg.moments.size(); ++ki) {
    std::vector<std::pair<int, double>> series;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      std::vector<double> xs;
      for (const auto& rr : results[si]) xs.push_back(rr.moments[ki]);
      const auto ms = mean_stderr(xs);
      out.rows.push_back({sizes[si].n(), sizes[si].b(), cfg.moments[ki], cfg.replicas, ms.mean, ms.variance});
      series.emplace_back(sizes[si].n(), ms.variance);
    }
    out.fits.push_back(fit_loglog(cfg.moments[ki], series));
  }
  {
    auto f = detail::open_out(dir / "variance.csv");
    CsvWriter csv(f, {"n", "b", "k", "replicas", "mean", "variance"});
    for (const auto& r : out.rows) csv.row(r.n, r.b, r.k, r.replicas, r.mean, r.variance);
  }
  {
    auto f = detail::open_out(dir / "variance_fit.csv");
    CsvWriter csv(f, {"k", "points", "slope", "slope_stderr", "intercept", "strictly_decreasing", "slope_below_minus_one"});
    for (const auto& fit : out.fits)
      csv.row(fit.k, fit.points, fit.slope, fit.slope_stderr, fit.intercept, fit.strictly_decreasing ? "true" : "false",
              fit.slope_below_minus_one ? "true" : "false");
  }
  manifest.add_output(dir / "variance.csv");
  manifest.add_output(dir / "variance_fit.csv");
  manifest.write(manifest_path);
  return out;
}

inline constexpr double kOracleFlagSe = 4.0;

struct OracleComparisonRow {
  int n = 0;
  int b = 0;
  int k = 0;
  double exact = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double z = 0.0;
  bool flagged = false;
};

struct OracleComparisonResult {
  std::vector<OracleComparisonRow> rows;
  int flagged = 0;
  fs::path dir;
};

inline int oracle_size_limit(const SchemeConfig& scheme) {
  if (scheme.kind == SchemeKind::wigner && scheme.dist == WignerDist::rademacher) return 6;
  return 4;
}

/// Exact expected ESD moments from the tuple sum against Monte Carlo means.
inline OracleComparisonResult run_oracle_comparison(const ExperimentConfig& cfg,
                                                    const std::string& command = "oracle-compare") {
  cfg.validate();
  const int limit = oracle_size_limit(cfg.scheme);
  for (const auto& spec : cfg.sizes())
    if (spec.n() > limit)
      throw std::invalid_argument("oracle comparison limited to n <= " + std::to_string(limit) + " for this scheme");
  const auto dir = detail::output_dir(cfg);
  const auto manifest_path = dir / "oracle_comparison_manifest.json";
  RunManifest manifest(command, cfg);
  const auto sizes = cfg.sizes();
  const auto results = detail::run_replicas(cfg, manifest, false, manifest_path);
  const auto oracle = scheme_moment_oracle(cfg.scheme);

  OracleComparisonResult out;
  out.dir = dir;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    for (std::size_t ki = 0; ki < cfg.moments.size(); ++ki) {
      const int k = cfg.moments[ki];
      const double exact = oracle::exact_expected_moment(oracle, sizes[si].n(), k, sizes[si]);
      std::vector<double> xs;
      for (const auto& rr : results[si]) xs.push_back(rr.moments[ki]);
      const auto ms = mean_stderr(xs);
      const double diff = ms.mean - exact;
      double z = 0.0;
      if (ms.stderr_ > 0.0) z = diff / ms.stderr_;
      else if (std::abs(diff) > 1e-8 * std::max(1.0, std::abs(exact))) z = std::numeric_limits<double>::infinity();
      const bool flagged = !(std::abs(z) <= kOracleFlagSe);
      out.flagged += flagged ? 1 : 0;
      out.rows.push_back({sizes[si].n(), sizes[si].b(), k, exact, ms.mean, ms.stderr_, z, flagged});
    }
  }
  {
    auto f = detail::open_out(dir / "oracle_comparison.csv");
    CsvWriter csv(f, {"n", "b", "k", "exact", "mc_mean", "mc_stderr", "z", "flagged"});
    for (const auto& r : out.rows) csv.row(r.n, r.b, r.k, r.exact, r.mc_mean, r.mc_stderr, r.z, r.flagged ? "true" : "false");
  }
  manifest.add_output(dir / "oracle_comparison.csv");
  manifest.write(manifest_path);
  return out;
}

struct LemmaSuiteConfig {
  int max_n_single = 5;
  int max_k_single = 6;
  int max_n_pair = 4;
  int max_k_pair = 4;
  std::vector<double> gaussian_alphas{0.3, 0.5, 0.75};
  std::vector<int> gaussian_n{4, 8, 16};
  std::vector<int> gaussian_z{1, 2, 3};
  int max_dyck_k = 8;
  int threads = 1;
};

struct LemmaSuiteRow {
  std::string group;  // vertex_bounds, count_bounds, pair_bounds
  int n = 0;
  int k = 0;
  int b = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
};

struct LemmaSuiteResult {
  std::vector<LemmaSuiteRow> rows;
  std::vector<oracle::Violation> violations;
  std::vector<oracle::GaussianLemmaReport> gaussian;
  std::vector<std::pair<int, std::uint64_t>> dyck;  // (k, count)
  bool dyck_ok = true;
  std::uint64_t total_violations = 0;

  bool ok() const noexcept { return total_violations == 0 && dyck_ok; }
};

/// Exhaustive combinatorial checks over every (n, k, b) in range, the
/// Gaussian moment bounds, and the Dyck coloring counts.
inline LemmaSuiteResult run_lemma_suite(const LemmaSuiteConfig& cfg) {
  struct Job {
    std::string group;
    int n, k, b;
  };
  std::vector<Job> jobs;
  for (int n = 1; n <= cfg.max_n_single; ++n)
    for (int k = 1; k <= cfg.max_k_single; ++k)
      for (int b : valid_bandwidths(n)) {
        jobs.push_back({"vertex_bounds", n, k, b});
        jobs.push_back({"count_bounds", n, k, b});
      }
  for (int n = 1; n <= cfg.max_n_pair; ++n)
    for (int k = 1; k <= cfg.max_k_pair; ++k)
      for (int b : valid_bandwidths(n)) jobs.push_back({"pair_bounds", n, k, b});

  std::vector<oracle::LemmaReport> reports(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto& j = jobs[i];
    const BandSpec spec(j.n, j.b);
    if (j.group == "vertex_bounds") reports[i] = oracle::verify_vertex_bounds(j.n, j.k, spec);
    else if (j.group == "count_bounds") reports[i] = oracle::verify_count_bounds(j.n, j.k, spec).report;
    else reports[i] = oracle::verify_pair_bounds(j.n, j.k, spec).report;
  });

  LemmaSuiteResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.rows.push_back({jobs[i].group, jobs[i].n, jobs[i].k, jobs[i].b, reports[i].checks, reports[i].violation_count});
    out.total_violations += reports[i].violation_count;
    for (const auto& v : reports[i].violations)
      if (out.violations.size() < oracle::LemmaReport::kKeep) out.violations.push_back(v);
  }
  for (double alpha : cfg.gaussian_alphas) {
    out.gaussian.push_back(oracle::verify_gaussian_lemmas(alpha, cfg.gaussian_n, cfg.gaussian_z));
    out.total_violations += out.gaussian.back().violations + (out.gaussian.back().constants_exact_at_zero ? 0 : 1);
  }
  for (int k = 2; k <= cfg.max_dyck_k; k += 2) {
    const auto count = oracle::count_dyck_colorings(k);
    out.dyck.emplace_back(k, count);
    out.dyck_ok = out.dyck_ok && count == catalan(k / 2);
  }
  return out;
}

inline std::string tuple_text(const oracle::Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + std::to_string(t[i]);
  return s + ")";
}

inline void write_lemma_suite(const LemmaSuiteResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto f = detail::open_out(dir / "lemma_suite.csv");
    CsvWriter csv(f, {"check", "n", "k", "b", "checks", "violations"});
    for (const auto& r : res.rows) csv.row(r.group, r.n, r.k, r.b, r.checks, r.violations);
  }
  {
    auto f = detail::open_out(dir / "gaussian_lemmas.csv");
    CsvWriter csv(f, {"lemma", "alpha", "n", "delta_pattern", "off_diagonal", "lhs", "bound", "ok"});
    for (const auto& rep : res.gaussian)
      for (const auto& r : rep.rows)
        csv.row(r.lemma, r.alpha, r.n, delta_pattern(r.delta), r.off_diagonal, r.lhs, r.bound, r.ok ? "true" : "false");
  }
  {
    auto f = detail::open_out(dir / "dyck_counts.csv");
    CsvWriter csv(f, {"k", "colorings", "catalan"});
    for (const auto& [k, c] : res.dyck) csv.row(k, c, catalan(k / 2));
  }
  if (!res.violations.empty()) {
    auto f = detail::open_out(dir / "lemma_violations.csv");
    CsvWriter csv(f, {"check", "t", "t_prime", "detail"});
    for (const auto& v : res.violations) csv.row(v.check, tuple_text(v.t), tuple_text(v.t_prime), v.detail);
  }
}

/// One raw sample and its scaled band matrix: entries of X on and above the
/// diagonal inside the band, plus the sorted spectrum.
inline void run_sample(const ExperimentConfig& cfg, const std::string& command = "sample") {
  cfg.validate();
  const auto dir = detail::output_dir(cfg);
  RunManifest manifest(command, cfg);
  auto fe = detail::open_out(dir / "sample_entries.csv");
  auto fv = detail::open_out(dir / "sample_eigenvalues.csv");
  CsvWriter entries(fe, {"n", "b", "i", "j", "a", "x"});
  CsvWriter values(fv, {"n", "b", "index", "eigenvalue"});
  const auto sizes = cfg.sizes();
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const auto& spec = sizes[si];
    const auto seed = derive_seed(cfg.seed, si);
    manifest.add_seed({spec.n(), spec.b(), 0, seed});
    Rng rng(seed);
    const auto sample = sample_scheme(cfg.scheme, spec.n(), rng);
    const auto x = build_X(sample, spec);
    for (int i = 0; i < spec.n(); ++i)
      for (int j = i; j < spec.n(); ++j)
        if (is_relevant(i, j, spec)) entries.row(spec.n(), spec.b(), i, j, sample.entries(i, j), x.values(i, j));
    const auto s = eigenvalues(x.values);
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) values.row(spec.n(), spec.b(), i, s.eigenvalues[i]);
  }
  fe.close();
  fv.close();
  manifest.add_output(dir / "sample_entries.csv");
  manifest.add_output(dir / "sample_eigenvalues.csv");
  manifest.write(dir / "sample_manifest.json");
}

}  // namespace semiband::harness
