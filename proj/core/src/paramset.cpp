#include "redecide/paramset.hpp"

#include "redecide/errors.hpp"

namespace redecide {

void ParamSet::add(const std::string& name, Array value, bool trainable) {
  auto [it, inserted] = entries_.emplace(name, Entry{std::move(value), trainable});
  if (!inserted) throw ArgumentError("duplicate parameter name: " + name);
}

bool ParamSet::has(const std::string& name) const {
  return entries_.count(name) != 0;
}

const ParamSet::Entry& ParamSet::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ArgumentError("unknown parameter: " + name);
  return it->second;
}

Array& ParamSet::at(const std::string& name) {
  return const_cast<Entry&>(entry(name)).value;
}

const Array& ParamSet::at(const std::string& name) const {
  return entry(name).value;
}

bool ParamSet::trainable(const std::string& name) const {
  return entry(name).trainable;
}

void ParamSet::set_trainable(const std::string& name, bool trainable) {
  const_cast<Entry&>(entry(name)).trainable = trainable;
}

void ParamSet::freeze_all() {
  for (auto& [name, e] : entries_) e.trainable = false;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

}  // namespace redecide
