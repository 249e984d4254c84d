#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semiband/harness/config.hpp"
#include "semiband/harness/csv.hpp"
#include "semiband/harness/experiments.hpp"
#include "semiband/harness/manifest.hpp"
#include "semiband/harness/parallel.hpp"
#include "semiband/harness/plot_data.hpp"
#include "support/oracles.hpp"

using namespace semiband;
using namespace semiband::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("semiband_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.scheme.kind = SchemeKind::wigner;
  cfg.n_values = {20, 40};
  cfg.replicas = 6;
  cfg.seed = 42;
  cfg.out_dir = dir.string();
  return cfg;
}

}  // namespace

TEST(Csv, FormatAndParse) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-10), "-2.5e-10");
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b", "c"});
  csv.row(1, 0.25, "x");
  EXPECT_EQ(out.str(), "a,b,c\n1,0.25,x\n");
  EXPECT_THROW(csv.row(1, 2), std::logic_error);

  const auto dir = scratch("csv");
  std::ofstream(dir / "t.csv") << out.str();
  const auto table = read_csv((dir / "t.csv").string());
  EXPECT_EQ(table.rows.at(0).at(table.column("b")), "0.25");
  EXPECT_THROW(table.column("missing"), std::invalid_argument);
}

TEST(Config, ParseAndOverride) {
  const auto file = parse_config_text(
      "# comment\nscheme = curie_weiss\nbeta = 1.0\nreplicas = 7\nmoments = 2, 4\n[size]\nn = 10\nb = 5\n[size]\nn = 12\nb = 12\n");
  const auto cfg = make_config(file, {{"replicas", "3"}, {"seed", "9"}});
  EXPECT_EQ(cfg.scheme.kind, SchemeKind::curie_weiss);
  EXPECT_EQ(cfg.scheme.beta, 1.0);
  EXPECT_EQ(cfg.replicas, 3);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.moments, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg.rule, BandwidthRule::explicit_sizes);
  const auto sizes = cfg.sizes();
  ASSERT_EQ(sizes.size(), 2u);
  EXPECT_EQ(sizes[0], BandSpec(10, 5));
  EXPECT_EQ(cfg.echo().at("sizes"), "10x5;12x12");
  EXPECT_EQ(cfg.source_text, file.text);
}

TEST(Config, Errors) {
  EXPECT_THROW(make_config(parse_config_text("colour = red\n")), std::invalid_argument);
  EXPECT_THROW(make_config(parse_config_text("replicas = many\n")), std::invalid_argument);
  EXPECT_THROW(parse_config_text("[other]\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("just text\n"), std::invalid_argument);
  auto cfg = make_config(parse_config_text("n_values = 10\nreplicas = 0\n"));
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = make_config(parse_config_text("n_values = 10\nmoments = 11\n"));
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = make_config(parse_config_text("n_values = 10\nbandwidth_rule = fixed\nbandwidth = 4\n"));
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = make_config(parse_config_text("replicas = 2\n"));
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Config, PowerBandwidthRule) {
  EXPECT_EQ(power_bandwidth(200, 0.6), 23);   // 200^0.6 = 23.9
  EXPECT_EQ(power_bandwidth(800, 0.6), 55);   // 55.1
  EXPECT_EQ(power_bandwidth(3200, 0.6), 125); // 126.7 -> 126 -> 125
  EXPECT_EQ(power_bandwidth(100, 0.5), 9);    // 10 -> 9
  EXPECT_EQ(power_bandwidth(5, 1.0), 5);
  EXPECT_EQ(power_bandwidth(3, 0.1), 1);
  for (int n = 1; n < 300; ++n)
    for (double g : {0.2, 0.5, 0.6, 0.9}) EXPECT_NO_THROW(BandSpec(n, power_bandwidth(n, g)));
}

TEST(Manifest, Fnv1a) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
}

TEST(Parallel, IndexOrderAndErrors) {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Convergence, WritesFilesAndManifest) {
  const auto dir = scratch("conv");
  auto cfg = small_config(dir);
  cfg.save_eigenvalues = true;
  const auto res = run_convergence(cfg);
  for (const auto* name : {"convergence.csv", "convergence_summary.csv", "convergence_timing.csv", "eigenvalues.csv"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  EXPECT_TRUE(verify_manifest(dir / "convergence_manifest.json"));
  const auto doc = nlohmann::json::parse(read_file(dir / "convergence_manifest.json"));
  EXPECT_EQ(doc["rng"], std::string(kRngName));
  EXPECT_EQ(doc["replica_seeds"].size(), 12u);
  EXPECT_EQ(doc["replica_seeds"][7]["seed"].get<std::uint64_t>(), derive_seed(42, 7));
  const auto table = read_csv((dir / "convergence.csv").string());
  EXPECT_EQ(table.header, (std::vector<std::string>{"n", "b", "replica", "k", "moment", "kolmogorov"}));
  EXPECT_EQ(table.rows.size(), 2u * 6u * 4u);
  const auto& m2 = res.find(40, "m2");
  EXPECT_LT(m2.abs_deviation, 5 * m2.stderr_ + 0.05);
  EXPECT_GT(res.find(20, "kolmogorov").mean, 0.0);
}

TEST(Convergence, ByteIdenticalAcrossRunsAndThreads) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto cfg = small_config(a);
  cfg.scheme.kind = SchemeKind::curie_weiss;
  run_convergence(cfg);
  cfg.out_dir = b.string();
  cfg.threads = 3;
  run_convergence(cfg);
  for (const auto* name : {"convergence.csv", "convergence_summary.csv"})
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
}

TEST(Convergence, ReplicaFailureRecordsSeed) {
  const auto dir = scratch("fail");
  auto cfg = small_config(dir);
  cfg.scheme.kind = SchemeKind::gaussian;
  cfg.scheme.alpha = 0.01;
  cfg.scheme.correlation = -0.6;  // below -1/(dim-1) for n = 2
  cfg.n_values = {2};
  try {
    run_convergence(cfg);
    FAIL() << "expected failure";
  } catch (const ReplicaFailure& e) {
    EXPECT_TRUE(e.numerical());
    EXPECT_EQ(e.seed(), derive_seed(42, 0));
  }
  const auto doc = nlohmann::json::parse(read_file(dir / "convergence_manifest.json"));
  EXPECT_EQ(doc["extra"]["failure"]["seed"].get<std::uint64_t>(), derive_seed(42, 0));
}

TEST(Variance, RejectsSingleReplica) {
  auto cfg = small_config(scratch("var1"));
  cfg.replicas = 1;
  try {
    run_variance_study(cfg);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("variance undefined"), std::string::npos);
  }
}

TEST(Variance, FitAndWarning) {
  const auto dir = scratch("var");
  auto cfg = small_config(dir);
  cfg.n_values = {16, 32, 64};
  cfg.replicas = 30;
  const auto res = run_variance_study(cfg);
  EXPECT_EQ(res.warnings.size(), 1u);
  EXPECT_EQ(res.rows.size(), 3u * 4u);
  EXPECT_EQ(res.fits.size(), 4u);
  EXPECT_TRUE(verify_manifest(dir / "variance_manifest.json"));
  const auto fit = fit_loglog(2, {{10, 1.0}, {100, 0.01}, {1000, 1e-4}});
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-12);
  EXPECT_TRUE(fit.strictly_decreasing);
  EXPECT_TRUE(fit.slope_below_minus_one);
}

TEST(OracleComparison, RademacherFourByFour) {
  const auto dir = scratch("oracle");
  ExperimentConfig cfg;
  cfg.scheme.kind = SchemeKind::wigner;
  cfg.scheme.dist = WignerDist::rademacher;
  cfg.n_values = {4};
  cfg.replicas = 4000;
  cfg.out_dir = dir.string();
  const auto res = run_oracle_comparison(cfg);
  EXPECT_EQ(res.flagged, 0);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_NEAR(res.rows[3].exact, testsupport::rademacher_enumeration_moment(4, 4, BandSpec::full(4)), 1e-12);
  EXPECT_EQ(res.rows[0].exact, 0.0);
  EXPECT_TRUE(fs::exists(dir / "oracle_comparison.csv"));
}

TEST(OracleComparison, IdentityGaussian) {
  ExperimentConfig cfg;
  cfg.scheme.kind = SchemeKind::gaussian;
  cfg.scheme.correlation = 0.0;
  cfg.n_values = {3};
  cfg.moments = {1, 2};
  cfg.replicas = 2000;
  cfg.out_dir = scratch("oracle_g").string();
  const auto res = run_oracle_comparison(cfg);
  EXPECT_EQ(res.flagged, 0);
  EXPECT_NEAR(res.rows[1].exact, 1.0, 1e-15);
  EXPECT_EQ(res.rows[0].exact, 0.0);  // (1/(n sqrt n)) * sum of zero means
}

TEST(OracleComparison, RejectsOversized) {
  ExperimentConfig cfg;
  cfg.scheme.kind = SchemeKind::curie_weiss;
  cfg.n_values = {5};
  cfg.out_dir = scratch("oracle_big").string();
  EXPECT_THROW(run_oracle_comparison(cfg), std::invalid_argument);
  cfg.scheme.kind = SchemeKind::wigner;
  cfg.scheme.dist = WignerDist::rademacher;
  cfg.n_values = {7};
  EXPECT_THROW(run_oracle_comparison(cfg), std::invalid_argument);
}

TEST(LemmaSuite, SmallRangeHasNoViolations) {
  LemmaSuiteConfig cfg;
  cfg.max_n_single = 4;
  cfg.max_k_single = 4;
  cfg.max_n_pair = 3;
  cfg.max_k_pair = 3;
  cfg.gaussian_n = {4};
  cfg.threads = 2;
  const auto res = run_lemma_suite(cfg);
  EXPECT_TRUE(res.ok());
  EXPECT_EQ(res.dyck.size(), 4u);
  const auto dir = scratch("lemmas");
  write_lemma_suite(res, dir);
  EXPECT_TRUE(fs::exists(dir / "lemma_suite.csv"));
  EXPECT_FALSE(fs::exists(dir / "lemma_violations.csv"));
}

TEST(PlotData, Histogram) {
  const auto bins = esd_histogram({-1.0, 0.0, 0.01, 3.0});
  ASSERT_EQ(bins.size(), 50u);
  EXPECT_NEAR(bins.front().center, -2.45, 1e-12);
  EXPECT_NEAR(bins[25].empirical, 2.0 / (4 * 0.1), 1e-12);
  EXPECT_NEAR(bins[25].semicircle, semicircle_density(0.05), 1e-15);
}

TEST(PlotData, FromHarnessCsvs) {
  const auto dir = scratch("plot");
  auto cfg = small_config(dir);
  cfg.save_eigenvalues = true;
  run_convergence(cfg);
  cfg.replicas = 5;
  run_variance_study(cfg);
  emit_plot_data((dir / "eigenvalues.csv").string(), PlotKind::esd_histogram, (dir / "h.dat").string());
  emit_plot_data((dir / "convergence_summary.csv").string(), PlotKind::moment_vs_n, (dir / "m.dat").string(), 4);
  emit_plot_data((dir / "variance.csv").string(), PlotKind::variance_loglog, (dir / "v.dat").string(), 2);
  auto lines = [](const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  };
  EXPECT_EQ(lines(dir / "h.dat").size(), 51u);
  const auto m = lines(dir / "m.dat");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[1].substr(0, 3), "20 ");
  EXPECT_EQ(m[1].substr(m[1].rfind(' ') + 1), "2");
  EXPECT_EQ(lines(dir / "v.dat").size(), 3u);
  EXPECT_THROW(emit_plot_data((dir / "variance.csv").string(), PlotKind::esd_histogram, (dir / "x.dat").string()),
               std::invalid_argument);
}
