#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace redecide {

// Plain-text structured key-value config:
//
//   # comment
//   [section]
//   key = value
//
// Values are kept verbatim (trimmed), so the canonical echo reproduces what
// the author wrote. Unknown keys are rejected against a per-command schema
// via require_known, naming the offending key.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  // Comma-separated list value.
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);
  void erase(const std::string& section, const std::string& key);

  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

  // Canonical serialization: sections and keys in sorted order.
  std::string echo() const;

  // Throws ConfigError naming the first key not present in `allowed`
  // (entries are "section.key").
  void require_known(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace redecide
