#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/signature.hpp"

namespace cdenum {

enum class NodeKind { Atom, Equal, Not, And, Or, Exists, Forall };

// One node of a first-order formula over a fixed signature. Variables are
// interned: nodes store indices into the owning Formula's name table.
struct Node {
  NodeKind kind;
  int relation = -1;       // Atom: relation index in the signature
  std::vector<int> vars;   // Atom: argument variables; Equal: {lhs, rhs}
  int bound = -1;          // Exists/Forall: the bound variable
  std::unique_ptr<Node> left;   // Not/Exists/Forall child; And/Or lhs
  std::unique_ptr<Node> right;  // And/Or rhs

  std::unique_ptr<Node> clone() const {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->relation = relation;
    n->vars = vars;
    n->bound = bound;
    if (left) n->left = left->clone();
    if (right) n->right = right->clone();
    return n;
  }
};

/**
 * An immutable parsed query. Keeps its own copy of the signature, the
 * variable name table, and the head: the free variables in output order
 * (first free occurrence in the query text unless reordered).
 */
class Formula {
 public:
  Formula(Signature sig, std::unique_ptr<Node> root,
          std::vector<std::string> var_names, std::vector<int> free_vars)
      : sig_(std::move(sig)),
        root_(std::move(root)),
        var_names_(std::move(var_names)),
        free_vars_(std::move(free_vars)),
        size_(node_count(*root_)) {}

  Formula(const Formula& o)
      : sig_(o.sig_),
        root_(o.root_->clone()),
        var_names_(o.var_names_),
        free_vars_(o.free_vars_),
        size_(o.size_) {}
  Formula& operator=(const Formula& o) {
    if (this != &o) {
      sig_ = o.sig_;
      root_ = o.root_->clone();
      var_names_ = o.var_names_;
      free_vars_ = o.free_vars_;
      size_ = o.size_;
    }
    return *this;
  }
  Formula(Formula&&) = default;
  Formula& operator=(Formula&&) = default;

  const Signature& sig() const { return sig_; }
  const Node& root() const { return *root_; }

  // Number of connectives, quantifiers and atomic subformulas. Variable
  // occurrences do not count.
  int size() const { return size_; }

  // Head width: number of free variables.
  int arity() const { return static_cast<int>(free_vars_.size()); }

  const std::vector<int>& head() const { return free_vars_; }
  const std::string& var_name(int v) const { return var_names_.at(v); }
  int var_count() const { return static_cast<int>(var_names_.size()); }

  std::vector<std::string> free_variables() const {
    std::vector<std::string> out;
    out.reserve(free_vars_.size());
    for (int v : free_vars_) out.push_back(var_names_[v]);
    return out;
  }

  // Returns a copy whose head lists the same free variables in the given
  // order. Throws ConfigError unless `order` is a permutation of the free
  // variable names.
  Formula with_head(const std::vector<std::string>& order) const {
    if (order.size() != free_vars_.size()) {
      throw ConfigError("head override must list every free variable exactly once");
    }
    std::vector<int> picked;
    picked.reserve(order.size());
    for (const std::string& name : order) {
      auto match = std::find_if(free_vars_.begin(), free_vars_.end(),
                                [&](int v) { return var_names_[v] == name; });
      if (match == free_vars_.end()) {
        throw ConfigError("head override names '" + name +
                          "', which is not a free variable");
      }
      if (std::count(picked.begin(), picked.end(), *match) != 0) {
        throw ConfigError("head override repeats variable '" + name + "'");
      }
      picked.push_back(*match);
    }
    Formula f(*this);
    f.free_vars_ = std::move(picked);
    return f;
  }

  // Canonical text form; reparsing it yields an identical formula.
  std::string pretty() const { return print(*root_); }

 private:
  static int node_count(const Node& n) {
    int c = 1;
    if (n.left) c += node_count(*n.left);
    if (n.right) c += node_count(*n.right);
    return c;
  }

  std::string print(const Node& n) const {
    switch (n.kind) {
      case NodeKind::Atom: {
        std::string s = sig_.name(n.relation) + "(";
        for (std::size_t i = 0; i < n.vars.size(); ++i) {
          if (i) s += ", ";
          s += var_names_[n.vars[i]];
        }
        return s + ")";
      }
      case NodeKind::Equal:
        return var_names_[n.vars[0]] + " = " + var_names_[n.vars[1]];
      case NodeKind::Not:
        // Equalities need the parentheses back to reparse as !(a = b).
        if (n.left->kind == NodeKind::Atom || n.left->kind == NodeKind::Not) {
          return "!" + print(*n.left);
        }
        if (n.left->kind == NodeKind::Equal) {
          return "!(" + print(*n.left) + ")";
        }
        if (n.left->kind == NodeKind::Exists || n.left->kind == NodeKind::Forall) {
          return "!" + print(*n.left);
        }
        return "!(" + print(*n.left) + ")";
      case NodeKind::And:
        return "(" + print(*n.left) + " & " + print(*n.right) + ")";
      case NodeKind::Or:
        return "(" + print(*n.left) + " | " + print(*n.right) + ")";
      case NodeKind::Exists:
        return "exists " + var_names_[n.bound] + " (" + print(*n.left) + ")";
      case NodeKind::Forall:
        return "forall " + var_names_[n.bound] + " (" + print(*n.left) + ")";
    }
    throw InvariantError("print: unknown node kind");
  }

  Signature sig_;
  std::unique_ptr<Node> root_;
  std::vector<std::string> var_names_;
  std::vector<int> free_vars_;
  int size_;
};

// Locality radius attached to a query: either derived from the query size
// or supplied explicitly. Overridden radii make the whole pipeline exact
// only for queries that are themselves r-local, and are flagged as such.
struct LocalityRadius {
  std::uint64_t r = 0;
  bool overridden = false;
};

// Derived radius is 2^size. The caller can override it; without an
// override a query too large for 64-bit radii is rejected.
inline LocalityRadius locality_radius(const Formula& f,
                                      std::optional<std::uint64_t> override_r =
                                          std::nullopt) {
  if (override_r.has_value()) {
    if (*override_r == 0) {
      throw ConfigError("radius override must be positive");
    }
    return LocalityRadius{*override_r, true};
  }
  int s = f.size();
  if (s >= 63) {
    throw ConfigError(
        "derived locality radius 2^" + std::to_string(s) +
        " overflows; pass an explicit radius override for this query");
  }
  return LocalityRadius{std::uint64_t{1} << s, false};
}

}  // namespace cdenum
