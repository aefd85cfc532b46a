#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "redecide/metrics.hpp"

namespace redecide {

// One evaluation cell, flattened for serialization. `task_label` is
// "<kind>" for plain evaluations and "<kind>@<axis>=<value>" for sweep rows,
// which is how the plot command recovers the sweep axis from a CSV alone.
struct ReportRow {
  std::string policy;
  std::string task_label;
  std::string config_hash;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  std::optional<double> sweep_value;
};

// CSV columns: policy,task,config-hash,seed,episodes,tsr,tsr_ci_lo,
// tsr_ci_hi,tns,pc_recip. Undefined tns / pc_recip serialize as empty
// fields. Formatting is fixed, so identical rows give identical bytes.
std::string report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(const std::string& csv);

// JSON mirror with the full config echo (tns: null when undefined).
std::string report_json(const std::vector<ReportRow>& rows,
                        const std::string& config_echo);

// FNV-1a 64-bit, hex-encoded; used for the config-hash column.
std::string hash_hex(const std::string& text);

// Shortest exact-roundtrip float formatting shared by the report writers.
std::string format_double(double v);

}  // namespace redecide
