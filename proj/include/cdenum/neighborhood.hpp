#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/distance.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/**
 * A ball around one or more distinguished centers, as a substructure: the
 * elements within the radius plus every fact that lies entirely inside.
 * Elements keep their parent identities and are sorted by domain order;
 * center_dist[i] is the distance from elements[i] to the nearest center.
 */
struct Neighborhood {
  std::vector<Element> elements;
  std::vector<std::uint32_t> center_dist;
  Tuple centers;
  std::vector<std::vector<Tuple>> facts;  // per relation, parent-id tuples
};

inline Neighborhood extract_neighborhood(const Structure& s,
                                         const DistanceIndex& ix,
                                         std::span<const Element> centers,
                                         std::uint32_t radius) {
  Neighborhood n;
  n.centers.assign(centers.begin(), centers.end());
  n.elements = ix.ball_of(centers, radius);
  n.center_dist.reserve(n.elements.size());
  for (Element e : n.elements) {
    auto d = ix.tuple_distance(centers, e);
    if (!d.has_value()) throw InvariantError("extract_neighborhood: stray element");
    n.center_dist.push_back(*d);
  }
  auto inside = [&](Element e) {
    return std::binary_search(n.elements.begin(), n.elements.end(), e);
  };
  // Collect facts via the incidence lists of the ball's elements; a fact
  // belongs to the substructure iff all its components are inside.
  std::vector<std::pair<int, std::uint32_t>> rows;
  for (Element e : n.elements) {
    for (const auto& ref : s.incident(e)) rows.push_back(ref);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  n.facts.assign(s.sig().relation_count(), {});
  for (const auto& [rel, row] : rows) {
    std::span<const Element> tuple = s.facts(rel).row(row);
    bool all_in = true;
    for (Element e : tuple) {
      if (!inside(e)) {
        all_in = false;
        break;
      }
    }
    if (all_in) n.facts[rel].emplace_back(tuple.begin(), tuple.end());
  }
  return n;
}

/**
 * Abstract (identity-free) form of a single-center neighborhood: the ball
 * rewritten onto positions 0..size-1 of its canonical order. Two
 * neighborhoods get the same encoding iff some center-preserving
 * isomorphism maps one onto the other.
 */
struct CanonicalType {
  TypeId id = 0;
  std::uint32_t radius = 0;
  std::uint32_t size = 0;
  std::vector<std::uint32_t> layer_sizes;          // per distance from center
  std::vector<std::vector<Tuple>> facts;           // per relation, position tuples
  std::string encoding;
};

// Search limits for the canonical-order computation. The search keeps every
// prefix that still achieves the minimal encoding, so highly symmetric balls
// can branch; rather than risk silent blowups the registry gives up loudly.
struct CanonBudget {
  std::size_t frontier_cap = 4096;
  std::uint64_t work_cap = 50'000'000;
};

/**
 * Dictionary of realized neighborhood types at one fixed radius. Type ids
 * are handed out in first-seen order, so they are stable for one structure
 * but carry no meaning across structures.
 *
 * Canonical orders: positions are filled distance layer by distance layer
 * (nearest first), and inside the search every order that achieves the
 * lexicographically least "block" sequence is kept. The block of position
 * j lists the facts whose latest component sits at j, so the encoding of
 * any smaller ball around the same center is literally a prefix of the
 * full encoding; truncating a canonical order to an inner ball therefore
 * yields that ball's canonical order.
 */
class TypeRegistry {
 public:
  explicit TypeRegistry(std::uint32_t radius, CanonBudget budget = {})
      : radius_(radius), budget_(budget) {}

  std::uint32_t radius() const { return radius_; }
  std::size_t type_count() const { return types_.size(); }
  const CanonicalType& type(TypeId id) const { return types_.at(id); }

  // Canonicalize a single-center neighborhood: returns its type id plus
  // the canonical order as parent elements (position -> element). The
  // order is an isomorphism from the stored representative onto the ball.
  std::pair<TypeId, std::vector<Element>> canonicalize(
      const Neighborhood& n, std::uint64_t* steps = nullptr) {
    if (n.centers.size() != 1) {
      throw InvariantError("canonicalize: exactly one center required");
    }
    const std::size_t sz = n.elements.size();

    // Local ids 0..sz-1 in domain order; layers by distance from center.
    std::uint32_t max_d = 0;
    for (std::uint32_t d : n.center_dist) max_d = std::max(max_d, d);
    std::vector<std::vector<int>> layers(max_d + 1);
    for (std::size_t i = 0; i < sz; ++i) {
      layers[n.center_dist[i]].push_back(static_cast<int>(i));
    }
    if (layers[0].size() != 1) {
      throw InvariantError("canonicalize: center layer must be a singleton");
    }

    // Facts rewritten to local ids, with a per-local-id incidence list.
    std::vector<std::pair<int, Tuple>> local_facts;  // (relation, local ids)
    for (int rel = 0; rel < static_cast<int>(n.facts.size()); ++rel) {
      for (const Tuple& f : n.facts[rel]) {
        Tuple loc;
        loc.reserve(f.size());
        for (Element e : f) loc.push_back(local_id(n, e));
        local_facts.emplace_back(rel, std::move(loc));
      }
    }
    std::vector<std::vector<int>> incident(sz);
    for (int fi = 0; fi < static_cast<int>(local_facts.size()); ++fi) {
      Tuple seen = local_facts[fi].second;
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (Element loc : seen) incident[loc].push_back(fi);
    }

    // Frontier search, position by position.
    struct Prefix {
      std::vector<int> order;   // position -> local id
      std::vector<int> pos_of;  // local id -> position or -1
    };
    Prefix seed;
    seed.pos_of.assign(sz, -1);
    std::vector<Prefix> frontier{std::move(seed)};
    std::vector<std::string> blocks;
    std::uint64_t work = 0;

    for (const std::vector<int>& layer : layers) {
      // Unplaced elements of the current layer, per frontier entry, shrink
      // one position at a time.
      for (std::size_t slot = 0; slot < layer.size(); ++slot) {
        int j = static_cast<int>(blocks.size());
        std::string best_block;
        bool have_best = false;
        std::vector<Prefix> next;
        for (const Prefix& p : frontier) {
          for (int cand : layer) {
            if (p.pos_of[cand] != -1) continue;
            if (++work > budget_.work_cap) {
              throw ConfigError(
                  "canonical-order search budget exceeded; reduce the radius");
            }
            std::string block =
                block_of(local_facts, incident, p, cand, j, n.center_dist[cand]);
            int cmp = have_best ? block.compare(best_block) : -1;
            if (cmp > 0) continue;
            if (cmp < 0) {
              best_block = block;
              have_best = true;
              next.clear();
            }
            Prefix q = p;
            q.order.push_back(cand);
            q.pos_of[cand] = j;
            next.push_back(std::move(q));
            if (next.size() > budget_.frontier_cap) {
              throw ConfigError(
                  "canonical-order frontier budget exceeded; reduce the radius");
            }
          }
        }
        blocks.push_back(std::move(best_block));
        frontier = std::move(next);
      }
    }
    if (steps) *steps += work;

    // Assemble the encoding by joining the blocks. Each block already
    // carries its element's distance from the center, so the layer profile
    // is part of the sequence; the encoding of the same center at a smaller
    // radius is then a literal prefix of this one.
    std::string enc;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (b) enc += '\n';
      enc += blocks[b];
    }

    const std::vector<int>& order = frontier.front().order;
    const std::vector<int>& pos_of = frontier.front().pos_of;

    auto it = by_encoding_.find(enc);
    TypeId id;
    if (it != by_encoding_.end()) {
      id = it->second;
    } else {
      id = static_cast<TypeId>(types_.size());
      CanonicalType t;
      t.id = id;
      t.radius = radius_;
      t.size = static_cast<std::uint32_t>(sz);
      for (const auto& layer : layers) {
        t.layer_sizes.push_back(static_cast<std::uint32_t>(layer.size()));
      }
      t.facts.assign(n.facts.size(), {});
      for (const auto& [rel, loc] : local_facts) {
        Tuple positions;
        positions.reserve(loc.size());
        for (Element l : loc) positions.push_back(static_cast<Element>(pos_of[l]));
        t.facts[rel].push_back(std::move(positions));
      }
      for (auto& rf : t.facts) std::sort(rf.begin(), rf.end());
      t.encoding = enc;
      by_encoding_.emplace(std::move(enc), id);
      types_.push_back(std::move(t));
    }

    std::vector<Element> parent_order;
    parent_order.reserve(sz);
    for (int loc : order) parent_order.push_back(n.elements[loc]);
    return {id, std::move(parent_order)};
  }

 private:
  static Element local_id(const Neighborhood& n, Element e) {
    auto it = std::lower_bound(n.elements.begin(), n.elements.end(), e);
    if (it == n.elements.end() || *it != e) {
      throw InvariantError("canonicalize: fact component outside the ball");
    }
    return static_cast<Element>(it - n.elements.begin());
  }

  // Serialized record of placing `cand` at position j: the element's
  // distance from the center, then the facts completed by the placement
  // (those whose components are now all placed). Facts are rendered over
  // positions only, sorted, so the result is identity-free.
  static std::string block_of(const std::vector<std::pair<int, Tuple>>& local_facts,
                              const std::vector<std::vector<int>>& incident,
                              const auto& prefix, int cand, int j,
                              std::uint32_t dist) {
    std::vector<std::pair<int, Tuple>> done;
    for (int fi : incident[cand]) {
      const auto& [rel, loc] = local_facts[fi];
      bool complete = true;
      Tuple positions;
      positions.reserve(loc.size());
      for (Element l : loc) {
        int p = (static_cast<int>(l) == cand) ? j : prefix.pos_of[l];
        if (p == -1) {
          complete = false;
          break;
        }
        positions.push_back(static_cast<Element>(p));
      }
      if (complete) done.emplace_back(rel, std::move(positions));
    }
    std::sort(done.begin(), done.end());
    std::string out = std::to_string(dist) + ";";
    for (const auto& [rel, positions] : done) {
      out += std::to_string(rel);
      out += ':';
      for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(positions[i]);
      }
      out += ';';
    }
    return out;
  }

  std::uint32_t radius_;
  CanonBudget budget_;
  std::unordered_map<std::string, TypeId> by_encoding_;
  std::vector<CanonicalType> types_;
};

/**
 * Per-element type information for a whole structure at one radius:
 * the type id of every element's ball, the canonical order of that ball
 * (position pointers; position 0 is the element itself), and per type the
 * domain-ordered bucket of elements realizing it.
 */
class TypeIndex {
 public:
  static TypeIndex build(const Structure& s, const DistanceIndex& ix,
                         std::uint32_t radius, CanonBudget budget = {},
                         std::uint64_t* steps = nullptr) {
    if (radius > ix.depth()) {
      throw ConfigError("type radius exceeds distance index depth");
    }
    TypeIndex t(radius, budget);
    t.type_of_.reserve(s.size());
    t.pointers_.reserve(s.size());
    for (Element e = 0; e < s.size(); ++e) {
      Tuple center{e};
      Neighborhood n = extract_neighborhood(s, ix, center, radius);
      auto [id, order] = t.registry_.canonicalize(n, steps);
      t.type_of_.push_back(id);
      t.pointers_.push_back(std::move(order));
      if (t.buckets_.size() <= id) t.buckets_.resize(id + 1);
      t.buckets_[id].push_back(e);  // ascending since e ascends
      if (steps) *steps += n.elements.size();
    }
    return t;
  }

  std::uint32_t radius() const { return registry_.radius(); }
  const TypeRegistry& registry() const { return registry_; }

  TypeId type_of(Element e) const { return type_of_.at(e); }

  // Canonical order of e's ball; pointers(e)[0] == e.
  std::span<const Element> pointers(Element e) const { return pointers_.at(e); }

  std::span<const Element> bucket(TypeId id) const { return buckets_.at(id); }
  std::size_t type_count() const { return registry_.type_count(); }

  std::uint32_t max_type_size() const {
    std::uint32_t m = 0;
    for (TypeId id = 0; id < registry_.type_count(); ++id) {
      m = std::max(m, registry_.type(id).size);
    }
    return m;
  }

  // Resolve a position sequence against e's canonical order: returns
  // (e, order[positions[0]], order[positions[1]], ...) or nothing when a
  // position falls outside the ball.
  std::optional<Tuple> apply_position_sequence(
      Element e, std::span<const std::uint32_t> positions) const {
    std::span<const Element> order = pointers(e);
    Tuple out;
    out.reserve(positions.size() + 1);
    out.push_back(e);
    for (std::uint32_t p : positions) {
      if (p >= order.size()) return std::nullopt;
      out.push_back(order[p]);
    }
    return out;
  }

  // Deterministic text rendering for inspection and golden tests.
  std::string dump(const Structure& s) const {
    std::string out = "types: " + std::to_string(registry_.type_count()) + "\n";
    for (TypeId id = 0; id < registry_.type_count(); ++id) {
      const CanonicalType& t = registry_.type(id);
      out += "type " + std::to_string(id) + " size " + std::to_string(t.size) +
             " layers ";
      for (std::size_t i = 0; i < t.layer_sizes.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(t.layer_sizes[i]);
      }
      out += " facts ";
      bool first = true;
      for (int rel = 0; rel < static_cast<int>(t.facts.size()); ++rel) {
        for (const Tuple& f : t.facts[rel]) {
          if (!first) out += ' ';
          first = false;
          out += s.sig().name(rel) + "(";
          for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(f[i]);
          }
          out += ")";
        }
      }
      out += "\n";
    }
    for (TypeId id = 0; id < buckets_.size(); ++id) {
      out += "bucket " + std::to_string(id) + ":";
      for (Element e : buckets_[id]) out += " " + s.name(e);
      out += "\n";
    }
    for (Element e = 0; e < type_of_.size(); ++e) {
      out += "elem " + s.name(e) + " type " + std::to_string(type_of_[e]) + " order";
      for (Element o : pointers_[e]) out += " " + s.name(o);
      out += "\n";
    }
    return out;
  }

 private:
  TypeIndex(std::uint32_t radius, CanonBudget budget) : registry_(radius, budget) {}

  TypeRegistry registry_;
  std::vector<TypeId> type_of_;
  std::vector<std::vector<Element>> pointers_;
  std::vector<std::vector<Element>> buckets_;
};

}  // namespace cdenum
