#include "redecide/io/kv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "redecide/errors.hpp"

namespace redecide {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("malformed section header at line " +
                          std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("empty key at line " + std::to_string(lineno));
    }
    if (section.empty()) {
      throw ConfigError("key outside any [section] at line " + std::to_string(lineno));
    }
    if (!cfg.sections_[section].emplace(key, value).second) {
      throw ConfigError("duplicate key '" + section + "." + key + "'");
    }
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

std::string KeyValueConfig::get(const std::string& section,
                                const std::string& key) const {
  auto s = sections_.find(section);
  if (s != sections_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw ConfigError("missing config key '" + section + "." + key + "'");
}

std::string KeyValueConfig::get_or(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double KeyValueConfig::get_double(const std::string& section,
                                  const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + section + "." + key +
                      "' is not a number: " + v);
  }
}

double KeyValueConfig::get_double_or(const std::string& section,
                                     const std::string& key,
                                     double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& section,
                                      const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const std::uint64_t u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + section + "." + key +
                      "' is not an unsigned integer: " + v);
  }
}

std::uint64_t KeyValueConfig::get_u64_or(const std::string& section,
                                         const std::string& key,
                                         std::uint64_t fallback) const {
  return has(section, key) ? get_u64(section, key) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& section,
                                 const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + section + "." + key +
                    "' is not a boolean: " + v);
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& section,
                                                  const std::string& key) const {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(get(section, key));
  while (std::getline(in, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    out.push_back(item.substr(begin, end - begin + 1));
  }
  if (out.empty()) {
    throw ConfigError("config key '" + section + "." + key + "' is an empty list");
  }
  return out;
}

void KeyValueConfig::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  sections_[section][key] = value;
}

void KeyValueConfig::erase(const std::string& section, const std::string& key) {
  auto s = sections_.find(section);
  if (s == sections_.end()) return;
  s->second.erase(key);
  if (s->second.empty()) sections_.erase(s);
}

std::vector<std::string> KeyValueConfig::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, keys] : sections_) out.push_back(name);
  return out;
}

std::vector<std::string> KeyValueConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = sections_.find(section);
  if (s == sections_.end()) return out;
  for (const auto& [key, value] : s->second) out.push_back(key);
  return out;
}

std::string KeyValueConfig::echo() const {
  std::string out;
  bool first = true;
  for (const auto& [name, keys] : sections_) {
    if (!first) out += "\n";
    first = false;
    out += "[" + name + "]\n";
    for (const auto& [key, value] : keys) {
      out += key + " = " + value + "\n";
    }
  }
  return out;
}

void KeyValueConfig::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [section, keys] : sections_) {
    for (const auto& [key, value] : keys) {
      const std::string qualified = section + "." + key;
      if (std::find(allowed.begin(), allowed.end(), qualified) == allowed.end()) {
        throw ConfigError("unknown config key: " + qualified);
      }
    }
  }
}

}  // namespace redecide
