// semiband command line: sampling, convergence and variance studies, oracle
// comparisons, lemma verification, AAU tables and plot data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semiband/aau.hpp"
#include "semiband/errors.hpp"
#include "semiband/harness/config.hpp"
#include "semiband/harness/experiments.hpp"
#include "semiband/harness/plot_data.hpp"

namespace {

using namespace semiband;
using namespace semiband::harness;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitViolation = 3;

struct GlobalFlags {
  std::string config;
  std::string seed;
  std::string out_dir;
  std::string threads;
};

// Experiment keys exposed as --<key with '-' for '_'>.
const std::vector<std::string> kExperimentKeys = {
    "scheme", "beta", "alpha", "dist", "correlation", "bandwidth_rule", "gamma", "bandwidth",
    "n_values", "replicas", "moments", "save_eigenvalues"};

std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

void add_experiment_options(CLI::App* sub, std::map<std::string, std::string>& store) {
  for (const auto& key : kExperimentKeys) sub->add_option(flag_name(key), store[key], "overrides config key '" + key + "'");
}

ExperimentConfig resolve(const GlobalFlags& g, const CLI::App& app, const CLI::App* sub,
                         const std::map<std::string, std::string>& store) {
  ConfigFile file;
  if (!g.config.empty()) file = load_config_file(g.config);
  KeyValues overrides;
  for (const auto& key : kExperimentKeys)
    if (sub->count(flag_name(key)) > 0) overrides[key] = store.at(key);
  if (app.count("--seed") > 0) overrides["seed"] = g.seed;
  if (app.count("--out-dir") > 0) overrides["out_dir"] = g.out_dir;
  if (app.count("--threads") > 0) overrides["threads"] = g.threads;
  return make_config(file, overrides);
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic random band matrices with dependent entries"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "key = value config file");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads");

  std::map<std::string, std::string> store;
  auto* sample = app.add_subcommand("sample", "draw one matrix per size and write entries and spectrum");
  auto* converge = app.add_subcommand("converge", "ESD moments and Kolmogorov distance over replicas");
  auto* variance = app.add_subcommand("variance", "variance decay of ESD moments");
  auto* compare = app.add_subcommand("oracle-compare", "exact expected moments against Monte Carlo");
  for (auto* sub : {sample, converge, variance, compare}) add_experiment_options(sub, store);

  auto* lemmas = app.add_subcommand("verify-lemmas", "exhaustive counting-lemma and Gaussian bound checks");
  LemmaSuiteConfig lemma_cfg;
  lemmas->add_option("--max-n", lemma_cfg.max_n_single, "largest n for single-tuple scans");
  lemmas->add_option("--max-k", lemma_cfg.max_k_single, "largest k for single-tuple scans");
  lemmas->add_option("--max-n-pair", lemma_cfg.max_n_pair, "largest n for paired scans");
  lemmas->add_option("--max-k-pair", lemma_cfg.max_k_pair, "largest k for paired scans");

  auto* aau = app.add_subcommand("verify-aau", "empirical AAU constants from the exact moment oracles");
  std::string aau_scheme = "curie_weiss";
  double aau_alpha = 0.5;
  double aau_beta = 0.5;
  std::string aau_dist = "standard_normal";
  std::vector<int> aau_n{4, 8, 16, 32};
  int aau_max_l = 3;
  aau->add_option("--scheme", aau_scheme, "curie_weiss | gaussian | wigner");
  aau->add_option("--alpha", aau_alpha, "decay exponent");
  aau->add_option("--beta", aau_beta, "Curie-Weiss inverse temperature");
  aau->add_option("--dist", aau_dist, "Wigner entry law");
  aau->add_option("--n-values", aau_n, "matrix dimensions")->delimiter(',');
  aau->add_option("--max-l", aau_max_l, "largest number of distinct pairs");

  auto* plot = app.add_subcommand("plot-data", "whitespace-separated plot data from a harness CSV");
  std::string plot_input;
  std::string plot_kind;
  std::string plot_output;
  int plot_k = 2;
  plot->add_option("--input", plot_input, "source CSV")->required();
  plot->add_option("--kind", plot_kind, "esd_histogram | moment_vs_n | variance_loglog")->required();
  plot->add_option("--output", plot_output, "output file (default: <input>.<kind>.dat)");
  plot->add_option("--k", plot_k, "moment order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  const std::string cmd = command_line(argc, argv);
  try {
    if (sample->parsed()) {
      run_sample(resolve(g, app, sample, store), cmd);
    } else if (converge->parsed()) {
      const auto res = run_convergence(resolve(g, app, converge, store), cmd);
      for (const auto& s : res.summary)
        std::cout << "n=" << s.n << " b=" << s.b << ' ' << s.statistic << " mean=" << format_double(s.mean)
                  << " stderr=" << format_double(s.stderr_) << '\n';
      std::cout << "wrote " << res.dir.string() << '\n';
    } else if (variance->parsed()) {
      const auto res = run_variance_study(resolve(g, app, variance, store), cmd);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : res.fits)
        std::cout << "k=" << f.k << " slope=" << format_double(f.slope) << " se=" << format_double(f.slope_stderr)
                  << " decreasing=" << (f.strictly_decreasing ? "yes" : "no") << '\n';
    } else if (compare->parsed()) {
      const auto res = run_oracle_comparison(resolve(g, app, compare, store), cmd);
      for (const auto& r : res.rows)
        std::cout << "n=" << r.n << " b=" << r.b << " k=" << r.k << " exact=" << format_double(r.exact)
                  << " mc=" << format_double(r.mc_mean) << " z=" << format_double(r.z) << (r.flagged ? " FLAGGED" : "")
                  << '\n';
      if (res.flagged > 0) return kExitViolation;
    } else if (lemmas->parsed()) {
      if (app.count("--threads") > 0) lemma_cfg.threads = std::stoi(g.threads);
      const auto res = run_lemma_suite(lemma_cfg);
      const std::filesystem::path dir = g.out_dir.empty() ? "out" : g.out_dir;
      write_lemma_suite(res, dir);
      std::uint64_t checks = 0;
      for (const auto& r : res.rows) checks += r.checks;
      std::cout << "checks=" << checks << " violations=" << res.total_violations
                << " dyck=" << (res.dyck_ok ? "ok" : "mismatch") << '\n';
      for (const auto& v : res.violations)
        std::cout << "  " << v.check << ' ' << tuple_text(v.t) << ' ' << tuple_text(v.t_prime) << ' ' << v.detail << '\n';
      if (!res.ok()) return kExitViolation;
    } else if (aau->parsed()) {
      const auto kind = parse_scheme_kind(aau_scheme);
      EntryMomentOracle oracle;
      if (kind == SchemeKind::curie_weiss) oracle = curie_weiss_moment_oracle(aau_beta);
      else if (kind == SchemeKind::gaussian) oracle = gaussian_equicorrelated_oracle(aau_alpha);
      else oracle = wigner_moment_oracle(parse_wigner_dist(aau_dist));
      const auto report = verify_aau(oracle, aau_scheme, aau_alpha, aau_n, aau_max_l);
      const std::filesystem::path dir = g.out_dir.empty() ? "out" : g.out_dir;
      std::filesystem::create_directories(dir);
      std::ofstream out(dir / "aau.csv", std::ios::binary);
      write_aau_csv(report, out);
      std::cout << "rows=" << report.rows.size() << " aau2_nonincreasing=" << report.aau2_nonincreasing
                << " aau3_nonincreasing=" << report.aau3_nonincreasing << '\n';
      if (!report.aau2_nonincreasing || !report.aau3_nonincreasing) return kExitViolation;
    } else if (plot->parsed()) {
      if (plot_output.empty()) plot_output = plot_input + "." + plot_kind + ".dat";
      emit_plot_data(plot_input, parse_plot_kind(plot_kind), plot_output, plot_k);
      std::cout << "wrote " << plot_output << '\n';
    }
  } catch (const ReplicaFailure& e) {
    std::cerr << "replica failed (seed " << e.seed() << "): " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
