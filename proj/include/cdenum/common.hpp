#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdenum {

// Dense element index into a structure's domain. Domain order (declaration
// order in the input) doubles as the linear order used for all lexicographic
// comparisons.
using Element = std::uint32_t;

// Index of a realized neighborhood type inside a TypeRegistry. Ids are only
// meaningful within the registry/index that produced them.
using TypeId = std::uint32_t;

// One answer tuple, components in head (output variable) order.
using Tuple = std::vector<Element>;

/** Base class for all errors raised by the library. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Query text could not be parsed; position is a 0-based byte offset. */
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/** A facts document is malformed (unknown ids, arity mismatch, ...). */
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/** A run configuration violates a precondition (degree bound, radius, ...). */
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/** An internal invariant was violated; indicates a bug, not bad input. */
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& msg) : Error(msg) {}
};

// Abstract work counters for the precomputation phase. Counted units are
// cheap primitive probes (adjacency scans, distance lookups, block
// comparisons, evaluator node visits), so the totals are deterministic and
// machine independent.
struct PrecomputeStats {
  std::uint64_t gaifman_steps = 0;    // edge insertions while building the graph
  std::uint64_t distance_steps = 0;   // BFS relaxations over all sources
  std::uint64_t type_steps = 0;       // canonical-order search visits
  std::uint64_t relevance_steps = 0;  // witness probes + evaluator visits

  std::uint64_t total() const {
    return gaifman_steps + distance_steps + type_steps + relevance_steps;
  }
};

// Zero-padded decimal rendering. Cursor state snapshots use fixed-width
// fields so the serialized size depends only on the plan shape, never on
// the magnitude of the values stored.
inline std::string fixed_width(std::uint64_t v, int width = 12) {
  std::string digits = std::to_string(v);
  if (static_cast<int>(digits.size()) > width) {
    throw InvariantError("fixed_width: value does not fit in " +
                         std::to_string(width) + " digits");
  }
  return std::string(width - digits.size(), '0') + digits;
}

}  // namespace cdenum
