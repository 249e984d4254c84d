#pragma once

// Run manifests: a JSON sidecar recording the configuration, the random
// stream, derived seeds and a checksum of every file a run wrote.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiband/harness/config.hpp"
#include "semiband/rng.hpp"

namespace semiband::harness {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a over a byte string, rendered as 16 hex digits.
inline std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct ReplicaSeed {
  int n = 0;
  int b = 0;
  int replica = 0;
  std::uint64_t seed = 0;
};

class RunManifest {
 public:
  RunManifest(std::string command, const ExperimentConfig& cfg) : started_(utc_timestamp()) {
    doc_["tool"] = "semiband";
    doc_["version"] = std::string(kVersion);
    doc_["command"] = std::move(command);
    doc_["rng"] = std::string(kRngName);
    doc_["seed_derivation"] = std::string(kSeedMixName);
    doc_["master_seed"] = cfg.seed;
    doc_["config"] = cfg.echo();
    doc_["config_file"] = cfg.source_text;
  }

  nlohmann::json& extra() { return doc_["extra"]; }

  void add_seed(const ReplicaSeed& s) {
    doc_["replica_seeds"].push_back({{"n", s.n}, {"b", s.b}, {"replica", s.replica}, {"seed", s.seed}});
  }

  void add_output(const std::filesystem::path& file) {
    const auto bytes = read_file(file);
    doc_["outputs"].push_back(
        {{"file", file.filename().string()}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64_hex(bytes)}});
  }

  void write(const std::filesystem::path& path) {
    doc_["started_at"] = started_;
    doc_["finished_at"] = utc_timestamp();
    std::ofstream out(path, std::ios::binary);
    out << doc_.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
  }

  const nlohmann::json& json() const { return doc_; }

 private:
  std::string started_;
  nlohmann::json doc_;
};

/// Re-reads every listed output and compares sizes and checksums.
inline bool verify_manifest(const std::filesystem::path& manifest_path) {
  const auto doc = nlohmann::json::parse(read_file(manifest_path));
  const auto dir = manifest_path.parent_path();
  if (!doc.contains("outputs")) return false;
  for (const auto& out : doc["outputs"]) {
    const auto bytes = read_file(dir / out["file"].get<std::string>());
    if (bytes.size() != out["bytes"].get<std::size_t>() || fnv1a64_hex(bytes) != out["fnv1a64"].get<std::string>())
      return false;
  }
  return true;
}

}  // namespace semiband::harness
