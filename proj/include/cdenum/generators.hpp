#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/**
 * Structure families over one binary relation E, used by the bench command
 * and by tests that need predictable shapes at any size. All generators are
 * deterministic for a given (n, seed) and respect a Gaifman degree of at
 * most 3 (paths/cycles stay at 2).
 */

namespace detail {

inline std::string facts_header(std::size_t n) {
  std::string out = "rel E 2\n";
  for (std::size_t i = 1; i <= n; ++i) out += "node v" + std::to_string(i) + "\n";
  return out;
}

inline void edge(std::string& out, std::size_t a, std::size_t b) {
  out += "fact E v" + std::to_string(a) + " v" + std::to_string(b) + "\n";
}

}  // namespace detail

inline Structure make_path(std::size_t n) {
  if (n < 1) throw ConfigError("path needs at least one element");
  std::string doc = detail::facts_header(n);
  for (std::size_t i = 1; i < n; ++i) detail::edge(doc, i, i + 1);
  return load_structure_text(doc);
}

inline Structure make_cycle(std::size_t n) {
  if (n < 3) throw ConfigError("cycle needs at least three elements");
  std::string doc = detail::facts_header(n);
  for (std::size_t i = 1; i < n; ++i) detail::edge(doc, i, i + 1);
  detail::edge(doc, n, 1);
  return load_structure_text(doc);
}

// Two parallel paths of n/2 elements with rungs between them; interior
// elements have degree 3 and, away from the ends, identical surroundings,
// which keeps the number of distinct ball types flat as n grows.
inline Structure make_ladder(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw ConfigError("ladder needs an even size of at least 4");
  const std::size_t len = n / 2;
  std::string doc = detail::facts_header(n);
  // Elements 1..len form one rail, len+1..2*len the other.
  for (std::size_t i = 1; i < len; ++i) {
    detail::edge(doc, i, i + 1);
    detail::edge(doc, len + i, len + i + 1);
  }
  for (std::size_t i = 1; i <= len; ++i) detail::edge(doc, i, len + i);
  return load_structure_text(doc);
}

// A cycle with random chords, degree capped at `max_degree`.
inline Structure make_random(std::size_t n, std::uint64_t seed,
                             std::uint32_t max_degree = 3) {
  if (n < 3) throw ConfigError("random family needs at least three elements");
  if (max_degree < 2) throw ConfigError("random family needs degree at least 2");
  std::string doc = detail::facts_header(n);
  std::vector<std::uint32_t> degree(n + 1, 2);
  std::set<std::pair<std::size_t, std::size_t>> present;
  for (std::size_t i = 1; i < n; ++i) {
    detail::edge(doc, i, i + 1);
    present.insert({i, i + 1});
  }
  detail::edge(doc, n, 1);
  present.insert({1, n});
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < 2 * n; ++attempt) {
    std::size_t a = rng() % n + 1;
    std::size_t b = rng() % n + 1;
    if (a == b) continue;
    std::pair<std::size_t, std::size_t> key{std::min(a, b), std::max(a, b)};
    if (present.count(key)) continue;
    if (degree[a] >= max_degree || degree[b] >= max_degree) continue;
    detail::edge(doc, a, b);
    present.insert(key);
    ++degree[a];
    ++degree[b];
  }
  return load_structure_text(doc);
}

inline Structure make_family(const std::string& family, std::size_t n,
                             std::uint64_t seed, std::uint32_t max_degree = 3) {
  if (family == "path") return make_path(n);
  if (family == "cycle") return make_cycle(n);
  if (family == "ladder") return make_ladder(n);
  if (family == "random") return make_random(n, seed, max_degree);
  throw ConfigError("unknown structure family: " + family);
}

}  // namespace cdenum
