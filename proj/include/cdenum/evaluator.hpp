#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/formula.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/** Partial map from formula variables to elements. */
class Assignment {
 public:
  explicit Assignment(int var_count) : slots_(var_count) {}

  void bind(int var, Element e) { slots_.at(var) = e; }
  void unbind(int var) { slots_.at(var).reset(); }

  Element get(int var) const {
    const auto& s = slots_.at(var);
    if (!s.has_value()) {
      throw InvariantError("evaluate: unbound variable referenced");
    }
    return *s;
  }

 private:
  std::vector<std::optional<Element>> slots_;
};

namespace detail {

inline bool eval_node(const Structure& s, const Formula& f, const Node& n,
                      Assignment& asg, std::uint64_t* steps) {
  if (steps) ++*steps;
  switch (n.kind) {
    case NodeKind::Atom: {
      Tuple t;
      t.reserve(n.vars.size());
      for (int v : n.vars) t.push_back(asg.get(v));
      return s.facts(n.relation).contains(t);
    }
    case NodeKind::Equal:
      return asg.get(n.vars[0]) == asg.get(n.vars[1]);
    case NodeKind::Not:
      return !eval_node(s, f, *n.left, asg, steps);
    case NodeKind::And:
      return eval_node(s, f, *n.left, asg, steps) &&
             eval_node(s, f, *n.right, asg, steps);
    case NodeKind::Or:
      return eval_node(s, f, *n.left, asg, steps) ||
             eval_node(s, f, *n.right, asg, steps);
    case NodeKind::Exists:
      for (Element e = 0; e < s.size(); ++e) {
        asg.bind(n.bound, e);
        if (eval_node(s, f, *n.left, asg, steps)) {
          asg.unbind(n.bound);
          return true;
        }
      }
      asg.unbind(n.bound);
      return false;
    case NodeKind::Forall:
      for (Element e = 0; e < s.size(); ++e) {
        asg.bind(n.bound, e);
        if (!eval_node(s, f, *n.left, asg, steps)) {
          asg.unbind(n.bound);
          return false;
        }
      }
      asg.unbind(n.bound);
      return true;
  }
  throw InvariantError("evaluate: unknown node kind");
}

}  // namespace detail

// Direct recursive evaluation. The assignment must bind every free
// variable of f; quantifiers sweep the whole domain.
inline bool evaluate(const Structure& s, const Formula& f, Assignment& asg,
                     std::uint64_t* steps = nullptr) {
  return detail::eval_node(s, f, f.root(), asg, steps);
}

// Convenience: evaluate with the head bound to `t` (components in head order).
inline bool evaluate_tuple(const Structure& s, const Formula& f, const Tuple& t,
                           std::uint64_t* steps = nullptr) {
  if (static_cast<int>(t.size()) != f.arity()) {
    throw InvariantError("evaluate_tuple: tuple width != head width");
  }
  Assignment asg(f.var_count());
  for (std::size_t i = 0; i < t.size(); ++i) asg.bind(f.head()[i], t[i]);
  return evaluate(s, f, asg, steps);
}

// Reference answer set: tries every tuple of domain elements in
// lexicographic order and keeps those satisfying f. For sentences the
// result is [()] when the sentence holds and [] otherwise. Exponential in
// the head width; meant as an oracle and for small inputs only.
inline std::vector<Tuple> brute_enumerate(const Structure& s, const Formula& f,
                                          std::uint64_t* steps = nullptr) {
  int k = f.arity();
  std::vector<Tuple> out;
  if (k == 0) {
    Assignment asg(f.var_count());
    if (evaluate(s, f, asg, steps)) out.push_back({});
    return out;
  }
  if (s.size() == 0) return out;
  Tuple t(k, 0);
  while (true) {
    if (evaluate_tuple(s, f, t, steps)) out.push_back(t);
    int i = k - 1;
    while (i >= 0 && t[i] + 1 == s.size()) {
      t[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[i];
  }
  return out;
}

}  // namespace cdenum
