#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cdenum/evaluator.hpp"
#include "cdenum/parser.hpp"
#include "cdenum/structure.hpp"
#include "support/oracles.hpp"

using namespace cdenum;

namespace {

// Directed 4-path a -> b -> c -> d with b, c colored.
Structure path4() {
  return load_structure_text(
      "rel E 2\nrel C 1\n"
      "node a\nnode b\nnode c\nnode d\n"
      "fact E a b\nfact E b c\nfact E c d\n"
      "fact C b\nfact C c\n");
}

bool holds(const Structure& s, const std::string& text, const Tuple& t) {
  Formula f = parse_formula(text, s.sig());
  return evaluate_tuple(s, f, t);
}

}  // namespace

TEST_CASE("atoms, equality, and connectives") {
  Structure s = path4();
  CHECK(holds(s, "E(x, y)", {0, 1}));
  CHECK_FALSE(holds(s, "E(x, y)", {1, 0}));
  CHECK(holds(s, "!E(x, y)", {1, 0}));
  CHECK(holds(s, "C(x)", {1}));
  CHECK_FALSE(holds(s, "C(x)", {0}));
  CHECK(holds(s, "(E(x, y) & C(y))", {0, 1}));
  CHECK_FALSE(holds(s, "(E(x, y) & C(y))", {2, 3}));
  CHECK(holds(s, "(E(x, y) | C(y))", {2, 3}));
  CHECK(holds(s, "(x = y)", {2, 2}));
  CHECK_FALSE(holds(s, "(x = y)", {2, 3}));
}

TEST_CASE("quantifiers sweep the whole domain") {
  Structure s = path4();
  // Some successor exists.
  CHECK(holds(s, "exists z (E(x, z))", {0}));
  // d has no successor.
  CHECK_FALSE(holds(s, "exists z (E(x, z))", {3}));
  // Every colored element is adjacent from x? Only true for a (b colored,
  // a->b) ... c is colored too and a is not adjacent to c, so false.
  CHECK_FALSE(holds(s, "forall z ((C(z) & E(x, z)))", {0}));
  CHECK(holds(s, "forall z ((E(x, z) | !E(x, z)))", {0}));
  // Nested alternation.
  Formula f = parse_formula("forall z (exists w ((E(z, w) | E(w, z))))", s.sig());
  Assignment asg(f.var_count());
  CHECK(evaluate(s, f, asg));
}

TEST_CASE("sentences evaluate without bindings") {
  Structure s = path4();
  Formula t = parse_formula("exists x (C(x))", s.sig());
  Assignment a1(t.var_count());
  CHECK(evaluate(s, t, a1));
  Formula u = parse_formula("forall x (C(x))", s.sig());
  Assignment a2(u.var_count());
  CHECK_FALSE(evaluate(s, u, a2));
}

TEST_CASE("direct enumeration is sorted, complete, and duplicate-free") {
  Structure s = path4();
  Formula f = parse_formula("E(x, y)", s.sig());
  std::vector<Tuple> got = brute_enumerate(s, f);
  std::vector<Tuple> want{{0, 1}, {1, 2}, {2, 3}};
  CHECK(got == want);

  // All pairs, including repeats of the same element.
  Formula g = parse_formula("(x = x & y = y)", s.sig());
  CHECK(brute_enumerate(s, g).size() == 16);

  // Repeated variables in an atom.
  Structure loop = load_structure_text("rel E 2\nnode a\nnode b\nfact E b b\n");
  Formula h = parse_formula("E(x, x)", loop.sig());
  CHECK(brute_enumerate(loop, h) == std::vector<Tuple>{{1}});
}

TEST_CASE("sentence enumeration yields one empty tuple when true") {
  Structure s = path4();
  Formula t = parse_formula("exists x (C(x))", s.sig());
  CHECK(brute_enumerate(s, t) == std::vector<Tuple>{{}});
  Formula u = parse_formula("forall x (C(x))", s.sig());
  CHECK(brute_enumerate(s, u).empty());
}

TEST_CASE("enumeration order is lexicographic on random inputs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Structure s = oracle::random_structure(8, 3, 100 + trial);
    std::string text = oracle::random_qf_query(s.sig(), 2, rng);
    Formula f = parse_formula(text, s.sig());
    std::vector<Tuple> got = brute_enumerate(s, f);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
    for (const Tuple& t : got) {
      CHECK(evaluate_tuple(s, f, t));
    }
  }
}

TEST_CASE("unbound variable access is rejected") {
  Assignment asg(2);
  asg.bind(0, 7);
  CHECK(asg.get(0) == 7);
  CHECK_THROWS_AS(asg.get(1), InvariantError);
  asg.unbind(0);
  CHECK_THROWS_AS(asg.get(0), InvariantError);
}

TEST_CASE("quantifier and connective dualities") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Structure s = oracle::random_structure(8, 3, seed + 300);
    std::mt19937_64 rng(seed);

    // forall is the dual of exists.
    const char* bodies[] = {"E(q1, z)", "(E(z, q1) | C(z))",
                            "(E(q1, z) & !C(z))"};
    for (const char* body : bodies) {
      Formula whole = parse_formula(std::string("forall z (") + body + ")",
                                    s.sig());
      Formula dual = parse_formula(std::string("!exists z (!(") + body + "))",
                                   s.sig());
      CHECK(brute_enumerate(s, whole) == brute_enumerate(s, dual));
    }

    // De Morgan over random quantifier-free operands.
    std::string a = oracle::random_qf_query(s.sig(), 2, rng);
    std::string b = oracle::random_qf_query(s.sig(), 2, rng);
    Formula neg_conj = parse_formula("!(" + a + " & " + b + ")", s.sig());
    Formula disj_neg = parse_formula("(!" + a + " | !" + b + ")", s.sig());
    CHECK(brute_enumerate(s, neg_conj) == brute_enumerate(s, disj_neg));
  }
}
