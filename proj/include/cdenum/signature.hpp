#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdenum/common.hpp"

namespace cdenum {

/**
 * Relational signature: a list of relation names with fixed arities.
 * Relation order is declaration order and is part of every deterministic
 * serialization downstream.
 */
class Signature {
 public:
  Signature() = default;

  // Pre (checked): name unused, arity >= 1.
  int add_relation(const std::string& name, int arity) {
    if (by_name_.count(name) != 0) {
      throw InputError("relation '" + name + "' declared twice");
    }
    if (arity < 1) {
      throw InputError("relation '" + name + "' must have arity >= 1");
    }
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    arities_.push_back(arity);
    by_name_.emplace(name, id);
    return id;
  }

  int relation_count() const { return static_cast<int>(names_.size()); }
  const std::string& name(int rel) const { return names_.at(rel); }
  int arity(int rel) const { return arities_.at(rel); }

  std::optional<int> find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> names_;
  std::vector<int> arities_;
  std::unordered_map<std::string, int> by_name_;
};

}  // namespace cdenum
