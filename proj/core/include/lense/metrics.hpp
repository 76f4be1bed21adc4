#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lense/graph.hpp"

namespace lense {

/// One evaluation row, shared by the agent and every baseline.
struct MetricsRow {
  std::string graph;
  std::string problem;
  std::string method;
  std::size_t budget = 0;
  double ratio = 0.0;
  double std_error = 0.0;
  double p_v = 0.0;  // fraction of vertices pruned
  double p_e = 0.0;  // fraction of edges pruned
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
};

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (sample sd / sqrt(n)); zero error for n < 2.
MeanStderr mean_stderr(std::span<const double> values);

double median(std::vector<double> values);

/// 1 - kept / total.
double pruned_fraction(std::size_t kept, std::size_t total);

const std::vector<std::string>& metrics_columns();
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

}  // namespace lense
