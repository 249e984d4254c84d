#pragma once

// Experiment configuration. A config file is flat `key = value` text with
// '#' comments plus repeated `[size]` blocks (each with `n` and `b`) that
// list explicit (n, b) pairs. Command-line flags are applied on top of the
// file through the same key names.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semiband/bandmatrix.hpp"
#include "semiband/ensembles.hpp"
#include "semiband/harness/csv.hpp"
#include "semiband/scheme_sample.hpp"

namespace semiband::harness {

using KeyValues = std::map<std::string, std::string>;

struct ConfigFile {
  KeyValues values;
  std::vector<KeyValues> sizes;
  std::string text;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto s = trim(text);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("config: cannot parse '" + s + "' for key '" + key + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config: cannot parse '" + s + "' as boolean for key '" + key + "'");
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += format_double(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cfg;
  cfg.text = text;
  std::istringstream in(text);
  std::string line;
  KeyValues* target = &cfg.values;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[size]") throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown section " + line);
      cfg.sizes.emplace_back();
      target = &cfg.sizes.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    (*target)[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return cfg;
}

inline ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

enum class BandwidthRule { full, power, fixed, explicit_sizes };

inline std::string_view to_string(BandwidthRule r) {
  switch (r) {
    case BandwidthRule::full: return "full";
    case BandwidthRule::power: return "power";
    case BandwidthRule::fixed: return "fixed";
    case BandwidthRule::explicit_sizes: return "explicit";
  }
  return "?";
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::wigner;
  double beta = 0.5;
  double alpha = 1.0;
  WignerDist dist = WignerDist::standard_normal;
  std::optional<double> correlation;  // Gaussian only; default is Delta_n^(-alpha)
};

/// Largest admissible bandwidth not above floor(n^gamma): odd below n, or n itself.
inline int power_bandwidth(int n, double gamma) {
  const double raw = std::exp(gamma * std::log(static_cast<double>(n)));
  auto b = static_cast<int>(std::floor(raw + 1e-9));
  if (b >= n) return n;
  if (b < 1) return 1;
  return b % 2 == 0 ? b - 1 : b;
}

struct ExperimentConfig {
  SchemeConfig scheme;
  BandwidthRule rule = BandwidthRule::full;
  double gamma = 0.5;
  int fixed_bandwidth = 1;
  std::vector<int> n_values;
  std::vector<std::pair<int, int>> explicit_sizes;
  int replicas = 20;
  std::vector<int> moments{1, 2, 3, 4};
  std::uint64_t seed = 1;
  std::string out_dir;
  int threads = 1;
  bool save_eigenvalues = false;
  std::string source_text;  // raw config file, echoed into manifests

  std::vector<BandSpec> sizes() const {
    std::vector<BandSpec> out;
    if (rule == BandwidthRule::explicit_sizes) {
      for (const auto& [n, b] : explicit_sizes) out.emplace_back(n, b);
      return out;
    }
    for (int n : n_values) {
      switch (rule) {
        case BandwidthRule::full: out.push_back(BandSpec::full(n)); break;
        case BandwidthRule::power: out.emplace_back(n, power_bandwidth(n, gamma)); break;
        case BandwidthRule::fixed: out.emplace_back(n, std::min(fixed_bandwidth, n)); break;
        case BandwidthRule::explicit_sizes: break;
      }
    }
    return out;
  }

  void validate() const {
    if (replicas < 1) throw std::invalid_argument("config: replicas must be at least 1");
    if (moments.empty()) throw std::invalid_argument("config: moment list is empty");
    for (int k : moments)
      if (k < 1 || k > 10) throw std::invalid_argument("config: moment orders must lie in 1..10");
    if (threads < 1) throw std::invalid_argument("config: threads must be at least 1");
    if (sizes().empty()) throw std::invalid_argument("config: no matrix sizes given");
    if (scheme.kind == SchemeKind::curie_weiss && !(scheme.beta > 0.0)) throw std::invalid_argument("config: beta must be positive");
    if (scheme.kind == SchemeKind::gaussian && !(scheme.alpha > 0.0)) throw std::invalid_argument("config: alpha must be positive");
  }

  /// Canonical key/value echo of every resolved setting.
  KeyValues echo() const {
    KeyValues kv;
    kv["scheme"] = std::string(to_string(scheme.kind));
    kv["beta"] = format_double(scheme.beta);
    kv["alpha"] = format_double(scheme.alpha);
    kv["dist"] = std::string(to_string(scheme.dist));
    kv["correlation"] = scheme.correlation ? format_double(*scheme.correlation) : "worst_case";
    kv["bandwidth_rule"] = std::string(to_string(rule));
    kv["gamma"] = format_double(gamma);
    kv["bandwidth"] = std::to_string(fixed_bandwidth);
    kv["n_values"] = detail::join(n_values);
    kv["replicas"] = std::to_string(replicas);
    kv["moments"] = detail::join(moments);
    kv["seed"] = std::to_string(seed);
    kv["out_dir"] = out_dir;
    kv["threads"] = std::to_string(threads);
    kv["save_eigenvalues"] = save_eigenvalues ? "true" : "false";
    std::string sz;
    for (const auto& s : sizes()) sz += (sz.empty() ? "" : ";") + std::to_string(s.n()) + "x" + std::to_string(s.b());
    kv["sizes"] = sz;
    return kv;
  }
};

/// Applies `key = value` settings on top of `cfg`; unknown keys are rejected.
inline void apply_settings(ExperimentConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "scheme") cfg.scheme.kind = parse_scheme_kind(detail::trim(value));
    else if (key == "beta") cfg.scheme.beta = detail::parse_number<double>(key, value);
    else if (key == "alpha") cfg.scheme.alpha = detail::parse_number<double>(key, value);
    else if (key == "dist") cfg.scheme.dist = parse_wigner_dist(detail::trim(value));
    else if (key == "correlation") {
      if (detail::trim(value) == "worst_case") cfg.scheme.correlation.reset();
      else cfg.scheme.correlation = detail::parse_number<double>(key, value);
    } else if (key == "bandwidth_rule") {
      const auto v = detail::trim(value);
      if (v == "full") cfg.rule = BandwidthRule::full;
      else if (v == "power") cfg.rule = BandwidthRule::power;
      else if (v == "fixed") cfg.rule = BandwidthRule::fixed;
      else if (v == "explicit") cfg.rule = BandwidthRule::explicit_sizes;
      else throw std::invalid_argument("config: unknown bandwidth_rule '" + v + "'");
    } else if (key == "gamma") cfg.gamma = detail::parse_number<double>(key, value);
    else if (key == "bandwidth") cfg.fixed_bandwidth = detail::parse_number<int>(key, value);
    else if (key == "n_values") cfg.n_values = detail::parse_list<int>(key, value);
    else if (key == "replicas") cfg.replicas = detail::parse_number<int>(key, value);
    else if (key == "moments") cfg.moments = detail::parse_list<int>(key, value);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(key, value);
    else if (key == "out_dir") cfg.out_dir = detail::trim(value);
    else if (key == "threads") cfg.threads = detail::parse_number<int>(key, value);
    else if (key == "save_eigenvalues") cfg.save_eigenvalues = detail::parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

inline ExperimentConfig make_config(const ConfigFile& file, const KeyValues& overrides = {}) {
  ExperimentConfig cfg;
  cfg.source_text = file.text;
  apply_settings(cfg, file.values);
  for (const auto& block : file.sizes) {
    const auto n = block.find("n");
    const auto b = block.find("b");
    if (n == block.end() || b == block.end()) throw std::invalid_argument("config: [size] block needs n and b");
    cfg.explicit_sizes.emplace_back(detail::parse_number<int>("n", n->second), detail::parse_number<int>("b", b->second));
  }
  if (!cfg.explicit_sizes.empty() && !file.values.count("bandwidth_rule")) cfg.rule = BandwidthRule::explicit_sizes;
  apply_settings(cfg, overrides);
  return cfg;
}

/// Draws one raw scheme sample of dimension n.
inline SchemeSample sample_scheme(const SchemeConfig& scheme, int n, Rng& rng) {
  switch (scheme.kind) {
    case SchemeKind::curie_weiss: return curie_weiss_scheme(scheme.beta, n, rng);
    case SchemeKind::wigner: return wigner_scheme(scheme.dist, n, rng);
    case SchemeKind::gaussian: {
      const CovSpec cov = scheme.correlation ? CovSpec{Equicorrelated{*scheme.correlation}}
                                             : CovSpec{worst_case_equicorrelated(n, scheme.alpha)};
      return gaussian_scheme({scheme.alpha, n, cov}, rng);
    }
  }
  throw std::logic_error("sample_scheme: unknown scheme");
}

/// Exact entry-moment oracle matching `sample_scheme`.
inline EntryMomentOracle scheme_moment_oracle(const SchemeConfig& scheme) {
  switch (scheme.kind) {
    case SchemeKind::curie_weiss: return curie_weiss_moment_oracle(scheme.beta);
    case SchemeKind::wigner: return wigner_moment_oracle(scheme.dist);
    case SchemeKind::gaussian: {
      const auto alpha = scheme.alpha;
      const auto corr = scheme.correlation;
      return gaussian_moment_oracle([alpha, corr](int n) -> CovSpec {
        return corr ? CovSpec{Equicorrelated{*corr}} : CovSpec{worst_case_equicorrelated(n, alpha)};
      });
    }
  }
  throw std::logic_error("scheme_moment_oracle: unknown scheme");
}

}  // namespace semiband::harness
