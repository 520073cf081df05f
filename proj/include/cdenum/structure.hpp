#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <sstream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/signature.hpp"

namespace cdenum {

/**
 * All facts of one relation, stored row-major over a flat array. Rows are
 * deduplicated and kept sorted lexicographically once the table is sealed.
 */
class FactTable {
 public:
  explicit FactTable(int arity) : arity_(arity) {}

  int arity() const { return arity_; }
  std::size_t rows() const { return data_.size() / arity_; }

  std::span<const Element> row(std::size_t i) const {
    return {data_.data() + i * arity_, static_cast<std::size_t>(arity_)};
  }

  void add(std::span<const Element> tuple) {
    if (static_cast<int>(tuple.size()) != arity_) {
      throw InvariantError("FactTable::add: arity mismatch");
    }
    data_.insert(data_.end(), tuple.begin(), tuple.end());
    sealed_ = false;
  }

  // Sort rows and drop duplicates. Must run before lookups.
  void seal() {
    std::size_t n = rows();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return row_less(a, b);
    });
    std::vector<Element> sorted;
    sorted.reserve(data_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!sorted.empty() &&
          std::equal(sorted.end() - arity_, sorted.end(),
                     data_.begin() + order[i] * arity_)) {
        continue;  // duplicate fact
      }
      auto r = row(order[i]);
      sorted.insert(sorted.end(), r.begin(), r.end());
    }
    data_ = std::move(sorted);
    sealed_ = true;
  }

  bool contains(std::span<const Element> tuple) const {
    if (!sealed_) throw InvariantError("FactTable::contains before seal");
    std::size_t lo = 0, hi = rows();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto r = row(mid);
      if (std::lexicographical_compare(r.begin(), r.end(), tuple.begin(), tuple.end())) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo < rows() && std::equal(tuple.begin(), tuple.end(), row(lo).begin());
  }

 private:
  bool row_less(std::size_t a, std::size_t b) const {
    auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  }

  int arity_;
  std::vector<Element> data_;
  bool sealed_ = true;  // empty table is trivially sealed
};

/**
 * A finite relational structure. The domain is the list of declared
 * elements; declaration order defines the linear order used everywhere.
 * Also keeps, per element, the list of facts it occurs in (needed to
 * induce neighborhood substructures quickly).
 */
class Structure {
 public:
  explicit Structure(Signature sig)
      : sig_(std::move(sig)) {
    for (int r = 0; r < sig_.relation_count(); ++r) {
      facts_.emplace_back(sig_.arity(r));
    }
  }

  const Signature& sig() const { return sig_; }
  std::size_t size() const { return names_.size(); }

  Element add_element(const std::string& id) {
    if (index_.count(id) != 0) {
      throw InputError("element '" + id + "' declared twice");
    }
    Element e = static_cast<Element>(names_.size());
    names_.push_back(id);
    index_.emplace(id, e);
    return e;
  }

  const std::string& name(Element e) const { return names_.at(e); }

  Element element(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw InputError("unknown element '" + id + "'");
    }
    return it->second;
  }

  void add_fact(int rel, std::span<const Element> tuple) {
    facts_.at(rel).add(tuple);
    sealed_ = false;
  }

  // Seals every fact table and builds the per-element incidence lists.
  void seal() {
    incident_.assign(size(), {});
    for (int r = 0; r < sig_.relation_count(); ++r) {
      facts_[r].seal();
      for (std::size_t i = 0; i < facts_[r].rows(); ++i) {
        Element last = ~Element{0};
        for (Element e : facts_[r].row(i)) {
          if (e != last) incident_[e].emplace_back(r, static_cast<std::uint32_t>(i));
          last = e;
        }
      }
    }
    // Repeated components only dodge duplicates above when adjacent; make
    // the incidence lists properly unique.
    for (auto& v : incident_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    sealed_ = true;
  }

  bool sealed() const { return sealed_; }
  const FactTable& facts(int rel) const { return facts_.at(rel); }

  // Facts the element occurs in, as (relation, row) pairs.
  const std::vector<std::pair<int, std::uint32_t>>& incident(Element e) const {
    if (!sealed_) throw InvariantError("Structure::incident before seal");
    return incident_.at(e);
  }

 private:
  Signature sig_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Element> index_;
  std::vector<FactTable> facts_;
  std::vector<std::vector<std::pair<int, std::uint32_t>>> incident_;
  bool sealed_ = true;
};

// Loads the line-oriented facts format:
//
//   rel NAME ARITY        declare a relation
//   node ID               declare an element; order defines the domain order
//   fact NAME ID...       one fact; relation and elements must be declared
//
// '#' starts a comment; blank lines are ignored. Element ids are opaque
// tokens. Duplicate facts collapse silently; duplicate declarations are
// errors.
inline Structure load_structure(std::istream& in) {
  Signature sig;
  std::vector<std::string> nodes;
  std::vector<std::size_t> node_lines;
  struct PendingFact {
    std::string rel;
    std::vector<std::string> ids;
    std::size_t line;
  };
  std::vector<PendingFact> pending;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    auto bad = [&](const std::string& msg) -> InputError {
      return InputError("line " + std::to_string(line_no) + ": " + msg);
    };
    if (kw == "rel") {
      std::string name;
      int arity;
      if (!(ls >> name >> arity)) throw bad("expected: rel NAME ARITY");
      try {
        sig.add_relation(name, arity);
      } catch (const InputError& e) {
        throw bad(e.what());
      }
    } else if (kw == "node") {
      std::string id;
      if (!(ls >> id)) throw bad("expected: node ID");
      nodes.push_back(id);
      node_lines.push_back(line_no);
    } else if (kw == "fact") {
      PendingFact f;
      f.line = line_no;
      if (!(ls >> f.rel)) throw bad("expected: fact NAME ID...");
      std::string id;
      while (ls >> id) f.ids.push_back(id);
      pending.push_back(std::move(f));
    } else {
      throw bad("unknown directive '" + kw + "'");
    }
    std::string extra;
    if (ls >> extra) throw bad("trailing tokens");
  }

  Structure s(sig);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      s.add_element(nodes[i]);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(node_lines[i]) + ": " + e.what());
    }
  }
  for (const PendingFact& f : pending) {
    auto rel = sig.find(f.rel);
    if (!rel.has_value()) {
      throw InputError("line " + std::to_string(f.line) + ": unknown relation '" +
                       f.rel + "'");
    }
    if (static_cast<int>(f.ids.size()) != sig.arity(*rel)) {
      throw InputError("line " + std::to_string(f.line) + ": relation '" + f.rel +
                       "' expects " + std::to_string(sig.arity(*rel)) +
                       " elements, got " + std::to_string(f.ids.size()));
    }
    std::vector<Element> tuple;
    tuple.reserve(f.ids.size());
    for (const std::string& id : f.ids) {
      try {
        tuple.push_back(s.element(id));
      } catch (const InputError&) {
        throw InputError("line " + std::to_string(f.line) +
                         ": fact references undeclared element '" + id + "'");
      }
    }
    s.add_fact(*rel, tuple);
  }
  s.seal();
  return s;
}

inline Structure load_structure_text(const std::string& text) {
  std::istringstream in(text);
  return load_structure(in);
}

}  // namespace cdenum
