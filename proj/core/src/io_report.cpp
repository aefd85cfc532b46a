#include "redecide/io/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "redecide/errors.hpp"

namespace redecide {

std::string format_double(double v) {
  // Shortest representation that parses back to the same double, so CSV
  // consumers (including the plot command) reconstruct values exactly.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "policy,task,config-hash,seed,episodes,tsr,tsr_ci_lo,tsr_ci_hi,tns,pc_recip\n";
  for (const auto& row : rows) {
    out += row.policy + "," + row.task_label + "," + row.config_hash + "," +
           std::to_string(row.seed) + "," + std::to_string(row.metrics.episodes) +
           "," + format_double(row.metrics.tsr) + "," +
           format_double(row.metrics.tsr_ci.lo) + "," +
           format_double(row.metrics.tsr_ci.hi) + ",";
    if (row.metrics.tns.has_value()) out += format_double(*row.metrics.tns);
    out += ",";
    if (row.metrics.pc_recip.has_value()) out += format_double(*row.metrics.pc_recip);
    out += "\n";
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("report csv: empty file");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    while (fields.size() < 10) fields.push_back("");
    if (fields.size() != 10) throw IoError("report csv: malformed row: " + line);
    ReportRow row;
    row.policy = fields[0];
    row.task_label = fields[1];
    row.config_hash = fields[2];
    row.seed = std::stoull(fields[3]);
    row.metrics.episodes = std::stoull(fields[4]);
    row.metrics.tsr = std::stod(fields[5]);
    row.metrics.tsr_ci.lo = std::stod(fields[6]);
    row.metrics.tsr_ci.hi = std::stod(fields[7]);
    if (!fields[8].empty()) row.metrics.tns = std::stod(fields[8]);
    if (!fields[9].empty()) row.metrics.pc_recip = std::stod(fields[9]);
    const auto at = row.task_label.find('@');
    if (at != std::string::npos) {
      const auto eq = row.task_label.find('=', at);
      if (eq != std::string::npos) {
        row.sweep_value = std::stod(row.task_label.substr(eq + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_json(const std::vector<ReportRow>& rows,
                        const std::string& config_echo) {
  nlohmann::json doc;
  doc["config"] = config_echo;
  auto& out_rows = doc["rows"];
  out_rows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j;
    j["policy"] = row.policy;
    j["task"] = row.task_label;
    j["config_hash"] = row.config_hash;
    j["seed"] = row.seed;
    j["episodes"] = row.metrics.episodes;
    j["successes"] = row.metrics.successes;
    j["tsr"] = row.metrics.tsr;
    j["tsr_ci"] = {row.metrics.tsr_ci.lo, row.metrics.tsr_ci.hi};
    if (row.metrics.tns.has_value()) {
      j["tns"] = *row.metrics.tns;
    } else {
      j["tns"] = nullptr;
    }
    if (row.metrics.pc_recip.has_value()) {
      j["pc_recip"] = *row.metrics.pc_recip;
    } else {
      j["pc_recip"] = nullptr;
    }
    if (row.sweep_value.has_value()) j["sweep_value"] = *row.sweep_value;
    out_rows.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace redecide
