#pragma once

// Whitespace-separated plot data derived from harness CSVs. The first line is
// a '#'-prefixed column header.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "semiband/harness/csv.hpp"
#include "semiband/spectra.hpp"

namespace semiband::harness {

enum class PlotKind { esd_histogram, moment_vs_n, variance_loglog };

inline PlotKind parse_plot_kind(const std::string& s) {
  if (s == "esd_histogram") return PlotKind::esd_histogram;
  if (s == "moment_vs_n") return PlotKind::moment_vs_n;
  if (s == "variance_loglog") return PlotKind::variance_loglog;
  throw std::invalid_argument("unknown plot kind '" + s + "'");
}

inline constexpr int kHistogramBins = 50;
inline constexpr double kHistogramLo = -2.5;
inline constexpr double kHistogramHi = 2.5;

struct HistogramBin {
  double center = 0.0;
  double empirical = 0.0;  // density: count / (total * width)
  double semicircle = 0.0;
};

inline std::vector<HistogramBin> esd_histogram(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("esd_histogram: no eigenvalues");
  const double width = (kHistogramHi - kHistogramLo) / kHistogramBins;
  std::vector<double> counts(kHistogramBins, 0.0);
  for (double v : values) {
    if (v < kHistogramLo || v >= kHistogramHi) continue;
    auto bin = static_cast<int>((v - kHistogramLo) / width);
    counts[static_cast<std::size_t>(std::min(bin, kHistogramBins - 1))] += 1.0;
  }
  std::vector<HistogramBin> out;
  const double total = static_cast<double>(values.size());
  for (int i = 0; i < kHistogramBins; ++i) {
    const double c = kHistogramLo + (i + 0.5) * width;
    out.push_back({c, counts[static_cast<std::size_t>(i)] / (total * width), semicircle_density(c)});
  }
  return out;
}

namespace detail {

inline double cell_double(const std::string& s) { return std::stod(s); }

}  // namespace detail

/// Reads `csv_path` and writes plot data to `out_path`. `k` selects the moment
/// order for moment_vs_n and variance_loglog.
inline void emit_plot_data(const std::string& csv_path, PlotKind kind, const std::string& out_path, int k = 2) {
  const CsvTable table = read_csv(csv_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  switch (kind) {
    case PlotKind::esd_histogram: {
      const auto col = table.column("eigenvalue");
      std::vector<double> values;
      for (const auto& row : table.rows) values.push_back(detail::cell_double(row[col]));
      out << "# center empirical semicircle\n";
      for (const auto& bin : esd_histogram(values))
        out << format_double(bin.center) << ' ' << format_double(bin.empirical) << ' ' << format_double(bin.semicircle) << '\n';
      break;
    }
    case PlotKind::moment_vs_n: {
      const auto cn = table.column("n");
      const auto cs = table.column("statistic");
      const auto cm = table.column("mean");
      const auto ce = table.column("stderr");
      const std::string stat = "m" + std::to_string(k);
      out << "# n mean stderr reference\n";
      for (const auto& row : table.rows)
        if (row[cs] == stat)
          out << row[cn] << ' ' << row[cm] << ' ' << row[ce] << ' ' << format_double(semicircle_moment(k)) << '\n';
      break;
    }
    case PlotKind::variance_loglog: {
      const auto cn = table.column("n");
      const auto ck = table.column("k");
      const auto cv = table.column("variance");
      out << "# ln_n ln_variance\n";
      for (const auto& row : table.rows) {
        if (std::stoi(row[ck]) != k) continue;
        const double v = detail::cell_double(row[cv]);
        if (!(v > 0.0)) continue;
        out << format_double(std::log(detail::cell_double(row[cn]))) << ' ' << format_double(std::log(v)) << '\n';
      }
      break;
    }
  }
  if (!out) throw std::runtime_error("write failed for '" + out_path + "'");
}

}  // namespace semiband::harness
