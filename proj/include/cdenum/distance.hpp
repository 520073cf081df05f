#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/gaifman.hpp"

namespace cdenum {

/**
 * Truncated-ball index: for every element, all elements within `depth`
 * hops together with their exact distances. Built by one bounded BFS per
 * element, so total work is linear in the domain for a fixed depth and
 * degree bound. Distances beyond the depth are simply absent.
 */
class DistanceIndex {
 public:
  static DistanceIndex build(const GaifmanGraph& g, std::uint32_t depth,
                             std::uint64_t* steps = nullptr) {
    DistanceIndex ix;
    ix.depth_ = depth;
    std::size_t n = g.size();
    ix.ball_.assign(n, {});
    ix.dist_.assign(n, {});

    // Version-stamped scratch arrays give O(1) reset per source.
    std::vector<std::uint32_t> seen_at(n, 0);
    std::vector<std::uint32_t> dist(n, 0);
    std::vector<Element> queue;
    std::uint64_t work = 0;

    for (Element src = 0; src < n; ++src) {
      std::uint32_t stamp = src + 1;
      queue.clear();
      queue.push_back(src);
      seen_at[src] = stamp;
      dist[src] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        Element u = queue[head];
        if (dist[u] == depth) continue;
        for (Element v : g.neighbors(u)) {
          ++work;
          if (seen_at[v] == stamp) continue;
          seen_at[v] = stamp;
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
      std::sort(queue.begin(), queue.end());
      ix.ball_[src] = queue;
      ix.dist_[src].reserve(queue.size());
      for (Element v : queue) ix.dist_[src].push_back(dist[v]);
      work += queue.size();
    }
    if (steps) *steps += work;
    return ix;
  }

  std::uint32_t depth() const { return depth_; }

  // Exact distance, or absent when the elements are more than `depth` apart.
  std::optional<std::uint32_t> distance(Element a, Element b) const {
    const auto& ball = ball_.at(a);
    auto it = std::lower_bound(ball.begin(), ball.end(), b);
    if (it == ball.end() || *it != b) return std::nullopt;
    return dist_[a][static_cast<std::size_t>(it - ball.begin())];
  }

  // Every element within `depth` of a, sorted by domain order.
  std::span<const Element> ball_elements(Element a) const { return ball_.at(a); }
  std::span<const std::uint32_t> ball_distances(Element a) const { return dist_.at(a); }

  // Elements at exactly distance `i` from a, sorted by domain order.
  std::vector<Element> layer(Element a, std::uint32_t i) const {
    require_depth(i);
    std::vector<Element> out;
    const auto& ball = ball_.at(a);
    for (std::size_t j = 0; j < ball.size(); ++j) {
      if (dist_[a][j] == i) out.push_back(ball[j]);
    }
    return out;
  }

  // Ball of one element truncated to radius l <= depth.
  std::vector<Element> ball_of(Element a, std::uint32_t l) const {
    require_depth(l);
    std::vector<Element> out;
    const auto& ball = ball_.at(a);
    for (std::size_t j = 0; j < ball.size(); ++j) {
      if (dist_[a][j] <= l) out.push_back(ball[j]);
    }
    return out;
  }

  // Ball of a tuple: union of the component balls, sorted by domain order.
  std::vector<Element> ball_of(std::span<const Element> tuple, std::uint32_t l) const {
    require_depth(l);
    std::vector<Element> out;
    for (Element a : tuple) {
      std::vector<Element> one = ball_of(a, l);
      std::vector<Element> merged;
      merged.reserve(out.size() + one.size());
      std::merge(out.begin(), out.end(), one.begin(), one.end(),
                 std::back_inserter(merged));
      out = std::move(merged);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Distance from an element to the nearest tuple component, if within depth.
  std::optional<std::uint32_t> tuple_distance(std::span<const Element> tuple,
                                              Element b) const {
    std::optional<std::uint32_t> best;
    for (Element a : tuple) {
      auto d = distance(a, b);
      if (d.has_value() && (!best.has_value() || *d < *best)) best = d;
    }
    return best;
  }

 private:
  void require_depth(std::uint32_t l) const {
    if (l > depth_) {
      throw ConfigError("radius " + std::to_string(l) +
                        " exceeds distance index depth " + std::to_string(depth_));
    }
  }

  std::uint32_t depth_ = 0;
  std::vector<std::vector<Element>> ball_;
  std::vector<std::vector<std::uint32_t>> dist_;
};

}  // namespace cdenum
