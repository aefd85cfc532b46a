#pragma once

#include <map>
#include <string>
#include <vector>

#include "redecide/array.hpp"

namespace redecide {

// Named parameter bundle. Names are unique; iteration follows sorted name
// order, which serialization and optimizer slot lookup rely on. A parameter
// marked frozen (trainable == false) is never modified by an optimizer step.
class ParamSet {
 public:
  struct Entry {
    Array value;
    bool trainable = true;
  };

  void add(const std::string& name, Array value, bool trainable = true);
  bool has(const std::string& name) const;
  Array& at(const std::string& name);
  const Array& at(const std::string& name) const;
  bool trainable(const std::string& name) const;
  void set_trainable(const std::string& name, bool trainable);
  void freeze_all();

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::vector<std::string> names() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  const Entry& entry(const std::string& name) const;
  std::map<std::string, Entry> entries_;
};

}  // namespace redecide
