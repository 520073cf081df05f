#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/**
 * Co-occurrence graph of a structure: two distinct elements are adjacent
 * iff some fact mentions both. No self loops. Adjacency lists are sorted
 * by domain order.
 */
class GaifmanGraph {
 public:
  static GaifmanGraph build(const Structure& s, std::uint64_t* steps = nullptr) {
    GaifmanGraph g;
    g.adj_.assign(s.size(), {});
    std::uint64_t work = 0;
    for (int r = 0; r < s.sig().relation_count(); ++r) {
      const FactTable& t = s.facts(r);
      for (std::size_t i = 0; i < t.rows(); ++i) {
        std::span<const Element> row = t.row(i);
        for (std::size_t a = 0; a < row.size(); ++a) {
          for (std::size_t b = a + 1; b < row.size(); ++b) {
            if (row[a] == row[b]) continue;
            g.adj_[row[a]].push_back(row[b]);
            g.adj_[row[b]].push_back(row[a]);
            ++work;
          }
        }
      }
    }
    for (auto& n : g.adj_) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
      work += n.size();
    }
    for (const auto& n : g.adj_) {
      g.max_degree_ = std::max(g.max_degree_, n.size());
    }
    if (steps) *steps += work;
    return g;
  }

  std::size_t size() const { return adj_.size(); }
  std::span<const Element> neighbors(Element e) const { return adj_.at(e); }
  std::size_t max_degree() const { return max_degree_; }

  bool adjacent(Element a, Element b) const {
    const auto& n = adj_.at(a);
    return std::binary_search(n.begin(), n.end(), b);
  }

 private:
  std::vector<std::vector<Element>> adj_;
  std::size_t max_degree_ = 0;
};

// True iff every element touches at most `d` others.
inline bool check_degree_bound(const GaifmanGraph& g, std::size_t d) {
  return g.max_degree() <= d;
}

}  // namespace cdenum
