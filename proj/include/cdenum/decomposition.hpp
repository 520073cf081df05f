#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/distance.hpp"
#include "cdenum/evaluator.hpp"
#include "cdenum/formula.hpp"
#include "cdenum/gaifman.hpp"
#include "cdenum/neighborhood.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/**
 * One cluster of head positions evaluated around a shared center. The first
 * head position holds the center; every further position is recovered from
 * the center's canonical ball order via `positions` (position_seq[i] locates
 * head_positions[i + 1]).
 */
struct PlanClass {
  std::vector<int> head_positions;          // ascending, indices into the head
  std::vector<std::uint32_t> position_seq;  // canonical positions for the rest

  int center_head() const { return head_positions.front(); }
  std::size_t arity() const { return head_positions.size(); }
};

/** A set partition of the head positions, classes ordered by their centers. */
struct RPartition {
  std::vector<PlanClass> classes;
};

/**
 * One partition together with the type sequences (one type per class) that
 * survive the relevance search: assigning class centers with those types and
 * pairwise-remote balls is guaranteed to satisfy the query.
 */
struct PlanEntry {
  RPartition partition;
  std::vector<std::vector<TypeId>> sequences;  // each of length classes.size()
};

struct DecompositionPlan {
  explicit DecompositionPlan(Formula q) : query(std::move(q)) {}

  Formula query;
  std::uint64_t radius = 0;       // locality radius r
  std::uint64_t type_radius = 0;  // ball radius used for types and distances
  bool radius_overridden = false;
  std::vector<PlanEntry> entries;
  PrecomputeStats stats;
};

/**
 * All ways to split the k head positions into clusters, refined by the
 * position sequences the realized types can support. Classes are emitted
 * in restricted-growth order, so they are automatically sorted by their
 * smallest (center) head position. Position-sequence entries range over
 * [0, max realized ball size); sequences that overflow every realized type
 * are filtered later by the relevance search, which re-checks sizes.
 */
inline std::vector<RPartition> enumerate_partitions(const Formula& f,
                                                    const TypeIndex& tix) {
  const int k = static_cast<int>(f.arity());
  if (k < 1) throw ConfigError("decomposition requires at least one free variable");
  const std::uint32_t max_pos = tix.max_type_size();

  std::vector<RPartition> out;
  std::vector<int> label(k, 0);

  auto emit = [&]() {
    int classes = 1 + *std::max_element(label.begin(), label.end());
    RPartition p;
    p.classes.resize(classes);
    for (int i = 0; i < k; ++i) {
      p.classes[label[i]].head_positions.push_back(i);
    }
    // Per class, run an odometer over the position sequences of its
    // non-center members; the product across classes is flattened by
    // recursing class by class.
    std::vector<std::vector<std::uint32_t>> chosen(classes);
    auto rec = [&](auto&& self, int c) -> void {
      if (c == classes) {
        RPartition q = p;
        for (int i = 0; i < classes; ++i) q.classes[i].position_seq = chosen[i];
        out.push_back(std::move(q));
        return;
      }
      std::size_t members = p.classes[c].arity() - 1;
      if (members == 0) {
        chosen[c].clear();
        self(self, c + 1);
        return;
      }
      if (max_pos == 0) return;  // no realized ball can host members
      std::vector<std::uint32_t> seq(members, 0);
      while (true) {
        chosen[c] = seq;
        self(self, c + 1);
        std::size_t i = members;
        while (i > 0 && seq[i - 1] + 1 == max_pos) seq[--i] = 0;
        if (i == 0) break;
        ++seq[i - 1];
      }
    };
    rec(rec, 0);
  };

  // Restricted-growth strings over k positions.
  auto grow = [&](auto&& self, int i, int max_used) -> void {
    if (i == k) {
      emit();
      return;
    }
    for (int l = 0; l <= max_used + 1; ++l) {
      label[i] = l;
      self(self, i + 1, std::max(max_used, l));
    }
  };
  grow(grow, 1, 0);
  return out;
}

/**
 * Test whether a tuple matches a partition's shape exactly:
 *  (a) within each class, every member is the element the center's canonical
 *      order stores at the class's position sequence;
 *  (b) members of distinct classes are pairwise farther than 2r, i.e. the
 *      classes' radius-r balls are disjoint;
 *  (c) within each class, the members' radius-r balls form one connected
 *      chain under pairwise distance <= 2r.
 * Every answer tuple matches exactly one (partition, shape) this way, which
 * is what makes the enumeration phase duplicate-free across streams.
 */
inline bool div_holds(std::span<const Element> t, const RPartition& p,
                      const DistanceIndex& ix, const TypeIndex& tix,
                      std::uint64_t r, std::uint64_t* steps = nullptr) {
  const std::size_t m = p.classes.size();
  std::size_t k = 0;
  for (const PlanClass& c : p.classes) k += c.arity();
  if (k != t.size()) throw InvariantError("div_holds: tuple arity mismatch");
  if (k >= 2 && ix.depth() < 2 * r) {
    throw ConfigError("div_holds needs distance depth >= 2r");
  }
  auto bump = [&](std::uint64_t n = 1) {
    if (steps) *steps += n;
  };

  std::vector<std::vector<Element>> values(m);
  for (std::size_t c = 0; c < m; ++c) {
    const PlanClass& cls = p.classes[c];
    Element center = t[cls.center_head()];
    auto resolved = tix.apply_position_sequence(center, cls.position_seq);
    bump();
    if (!resolved.has_value()) return false;
    for (std::size_t i = 0; i < cls.arity(); ++i) {
      if ((*resolved)[i] != t[cls.head_positions[i]]) return false;
    }
    values[c] = std::move(*resolved);
  }

  auto within = [&](Element a, Element b) {
    bump();
    auto d = ix.distance(a, b);
    return d.has_value() && *d <= 2 * r;
  };

  // (c) connectivity of each class's distinct members under <= 2r.
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<Element> distinct = values[c];
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= 1) continue;
    std::vector<char> reached(distinct.size(), 0);
    std::vector<std::size_t> queue{0};
    reached[0] = 1;
    while (!queue.empty()) {
      std::size_t u = queue.back();
      queue.pop_back();
      for (std::size_t v = 0; v < distinct.size(); ++v) {
        if (!reached[v] && within(distinct[u], distinct[v])) {
          reached[v] = 1;
          queue.push_back(v);
        }
      }
    }
    for (char x : reached) {
      if (!x) return false;
    }
  }

  // (b) pairwise remoteness across classes.
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      for (Element u : values[a]) {
        for (Element v : values[b]) {
          if (within(u, v)) return false;
        }
      }
    }
  }
  return true;
}

namespace detail {

// Check conditions (b)/(c) of div_holds for class c against classes
// 0..c-1 whose member values are already fixed. Shared by the relevance
// search and the enumeration streams.
inline bool class_div_ok(const std::vector<std::vector<Element>>& values,
                         std::size_t c, const DistanceIndex& ix, std::uint64_t r,
                         std::uint64_t* steps) {
  auto within = [&](Element a, Element b) {
    if (steps) ++*steps;
    auto d = ix.distance(a, b);
    return d.has_value() && *d <= 2 * r;
  };
  std::vector<Element> distinct = values[c];
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() > 1) {
    std::vector<char> reached(distinct.size(), 0);
    std::vector<std::size_t> queue{0};
    reached[0] = 1;
    while (!queue.empty()) {
      std::size_t u = queue.back();
      queue.pop_back();
      for (std::size_t v = 0; v < distinct.size(); ++v) {
        if (!reached[v] && within(distinct[u], distinct[v])) {
          reached[v] = 1;
          queue.push_back(v);
        }
      }
    }
    for (char x : reached) {
      if (!x) return false;
    }
  }
  for (std::size_t b = 0; b < c; ++b) {
    for (Element u : values[b]) {
      for (Element v : values[c]) {
        if (within(u, v)) return false;
      }
    }
  }
  return true;
}

inline void scatter(const RPartition& p,
                    const std::vector<std::vector<Element>>& values, Tuple& t) {
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    const PlanClass& cls = p.classes[c];
    for (std::size_t i = 0; i < cls.arity(); ++i) {
      t[cls.head_positions[i]] = values[c][i];
    }
  }
}

}  // namespace detail

/**
 * Type sequences worth streaming for one partition: those whose shape-
 * matching tuples satisfy the query. When the query is insensitive to
 * anything beyond distance r of an answer — guaranteed for the derived
 * radius, promised by the caller for an overridden one — its value is
 * uniform across every tuple matching one (partition, type sequence)
 * shape, so the first match found decides the whole sequence.
 */
inline std::vector<std::vector<TypeId>> relevant_sequences(
    const RPartition& p, const Formula& f, const Structure& s,
    const DistanceIndex& ix, const TypeIndex& tix, std::uint64_t r,
    std::uint64_t* steps = nullptr) {
  const std::size_t m = p.classes.size();
  std::size_t k = 0;
  for (const PlanClass& c : p.classes) k += c.arity();
  if (k != static_cast<std::size_t>(f.arity())) {
    throw InvariantError("relevant_sequences: arity mismatch");
  }

  // Candidate types per class: the ball must be large enough to resolve
  // every position the class dereferences.
  std::vector<std::vector<TypeId>> cands(m);
  for (std::size_t c = 0; c < m; ++c) {
    std::uint32_t need = 0;
    for (std::uint32_t pos : p.classes[c].position_seq) {
      need = std::max(need, pos + 1);
    }
    for (TypeId id = 0; id < tix.type_count(); ++id) {
      if (tix.registry().type(id).size >= need) cands[c].push_back(id);
    }
    if (cands[c].empty()) return {};
  }

  std::vector<std::vector<TypeId>> out;
  std::vector<std::size_t> pick(m, 0);
  std::vector<std::vector<Element>> values(m);
  Tuple t(k);

  // Search centers for classes c.. given fixed classes 0..c-1. Returns 0
  // while no shape-matching tuple has been found, otherwise +1/-1 as the
  // first one found satisfies/violates the query.
  auto search = [&](auto&& self, std::size_t c) -> int {
    if (c == m) {
      detail::scatter(p, values, t);
      return evaluate_tuple(s, f, t, steps) ? 1 : -1;
    }
    const PlanClass& cls = p.classes[c];
    for (Element center : tix.bucket(cands[c][pick[c]])) {
      if (steps) ++*steps;
      auto resolved = tix.apply_position_sequence(center, cls.position_seq);
      if (!resolved.has_value()) {
        throw InvariantError("relevant_sequences: position outside candidate type");
      }
      values[c] = std::move(*resolved);
      if (!detail::class_div_ok(values, c, ix, r, steps)) continue;
      int verdict = self(self, c + 1);
      if (verdict != 0) return verdict;
    }
    return 0;
  };

  // Odometer over candidate type vectors, last class fastest; emitted in
  // ascending lexicographic type order.
  while (true) {
    if (search(search, 0) == 1) {
      std::vector<TypeId> seq(m);
      for (std::size_t c = 0; c < m; ++c) seq[c] = cands[c][pick[c]];
      out.push_back(std::move(seq));
    }
    std::size_t i = m;
    while (i > 0 && pick[i - 1] + 1 == cands[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
    ++pick[i - 1];
  }
  return out;
}

/** Everything the enumeration phase needs, with shared indexes kept alive. */
struct Prepared {
  GaifmanGraph gaifman;
  DistanceIndex distances;
  TypeIndex types;
  DecompositionPlan plan;
};

inline std::uint64_t type_radius_for(std::uint64_t r, std::size_t k) {
  // Chained classes can relate elements up to r*(2k-1) apart, so type balls
  // and the distance index must reach that far for the relevance search and
  // remoteness tests to be exact.
  const std::uint64_t factor = 2 * static_cast<std::uint64_t>(k) - 1;
  if (r > std::numeric_limits<std::uint32_t>::max() / factor) {
    throw ConfigError(
        "locality radius too large for index construction; pass an explicit "
        "radius suited to the query");
  }
  return r * factor;
}

inline Prepared prepare(const Formula& f, const Structure& s,
                        std::optional<std::uint64_t> radius_override = std::nullopt,
                        CanonBudget budget = {}) {
  if (f.arity() < 1) {
    throw ConfigError("enumeration requires at least one free variable");
  }
  LocalityRadius lr = locality_radius(f, radius_override);
  const std::uint64_t rho = type_radius_for(lr.r, f.arity());

  DecompositionPlan plan(f);
  plan.radius = lr.r;
  plan.type_radius = rho;
  plan.radius_overridden = lr.overridden;

  GaifmanGraph gaifman = GaifmanGraph::build(s, &plan.stats.gaifman_steps);
  DistanceIndex distances = DistanceIndex::build(
      gaifman, static_cast<std::uint32_t>(rho), &plan.stats.distance_steps);
  TypeIndex types = TypeIndex::build(s, distances, static_cast<std::uint32_t>(rho),
                                     budget, &plan.stats.type_steps);

  for (RPartition& p : enumerate_partitions(f, types)) {
    auto seqs = relevant_sequences(p, f, s, distances, types, lr.r,
                                   &plan.stats.relevance_steps);
    if (!seqs.empty()) {
      plan.entries.push_back(PlanEntry{std::move(p), std::move(seqs)});
    }
  }
  return Prepared{std::move(gaifman), std::move(distances), std::move(types),
                  std::move(plan)};
}

inline DecompositionPlan build_plan(
    const Formula& f, const Structure& s,
    std::optional<std::uint64_t> radius_override = std::nullopt,
    CanonBudget budget = {}) {
  return prepare(f, s, radius_override, budget).plan;
}

/** Deterministic text rendering of a plan for inspection and golden tests. */
inline std::string dump_plan(const DecompositionPlan& plan) {
  std::string out = "query: " + plan.query.pretty() + "\n";
  out += "head:";
  for (int v : plan.query.head()) out += " " + plan.query.var_name(v);
  out += "\n";
  out += "radius: " + std::to_string(plan.radius) +
         (plan.radius_overridden ? " (overridden)" : " (derived)") + "\n";
  out += "type radius: " + std::to_string(plan.type_radius) + "\n";
  out += "entries: " + std::to_string(plan.entries.size()) + "\n";
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const PlanEntry& e = plan.entries[i];
    out += "entry " + std::to_string(i) + ":";
    for (const PlanClass& c : e.partition.classes) {
      out += " {";
      for (std::size_t j = 0; j < c.head_positions.size(); ++j) {
        if (j) out += ' ';
        out += plan.query.var_name(plan.query.head()[c.head_positions[j]]);
      }
      out += " | F=";
      for (std::size_t j = 0; j < c.position_seq.size(); ++j) {
        if (j) out += ',';
        out += std::to_string(c.position_seq[j]);
      }
      out += "}";
    }
    out += " sequences:";
    for (const auto& seq : e.sequences) {
      out += " (";
      for (std::size_t j = 0; j < seq.size(); ++j) {
        if (j) out += ',';
        out += std::to_string(seq[j]);
      }
      out += ")";
    }
    out += "\n";
  }
  return out;
}

}  // namespace cdenum
