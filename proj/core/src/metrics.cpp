#include "lense/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "lense/errors.hpp"

namespace lense {

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr r;
  if (values.empty()) return r;
  const auto n = static_cast<double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double pruned_fraction(std::size_t kept, std::size_t total) {
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(kept) / static_cast<double>(total);
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols{"graph", "problem", "method", "budget", "ratio",
                                             "stderr", "P_V",     "P_E",    "runtime_s", "seed"};
  return cols;
}

void write_metrics_header(std::ostream& out) {
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  std::ostringstream s;
  s << std::setprecision(10);
  s << r.graph << ',' << r.problem << ',' << r.method << ',' << r.budget << ',' << r.ratio << ',' << r.std_error << ','
    << r.p_v << ',' << r.p_e << ',' << r.runtime_s << ',' << r.seed << '\n';
  out << s.str();
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  write_metrics_header(out);
  for (const MetricsRow& r : rows) write_metrics_row(out, r);
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing metrics header");
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != metrics_columns().size()) throw ParseError(lineno, "expected 10 metrics columns");
    try {
      rows.push_back({f[0], f[1], f[2], std::stoull(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6]),
                      std::stod(f[7]), std::stod(f[8]), std::stoull(f[9])});
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "malformed metrics value");
    }
  }
  return rows;
}

}  // namespace lense
