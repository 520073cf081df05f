#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "cdenum/distance.hpp"
#include "cdenum/gaifman.hpp"
#include "cdenum/structure.hpp"
#include "support/oracles.hpp"

using namespace cdenum;

TEST_CASE("facts document loading") {
  Structure s = load_structure_text(
      "# a small directed path with a color\n"
      "rel E 2\n"
      "rel C 1\n"
      "node a\n"
      "node b\n"
      "node c\n"
      "fact E a b\n"
      "fact E b c\n"
      "fact C b\n");
  CHECK(s.size() == 3);
  CHECK(s.name(0) == "a");
  CHECK(s.element("c") == 2);
  CHECK(s.facts(0).rows() == 2);
  CHECK(s.facts(1).rows() == 1);
  Tuple ab{0, 1};
  CHECK(s.facts(0).contains(ab));
  Tuple ba{1, 0};
  CHECK_FALSE(s.facts(0).contains(ba));
}

TEST_CASE("loader errors carry line numbers") {
  auto expect_error = [](const std::string& doc, const std::string& fragment) {
    try {
      load_structure_text(doc);
      FAIL("expected InputError for: " << doc);
    } catch (const InputError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(fragment));
    }
  };
  expect_error("rel E 2\nnode a\nfact E a\n", "line 3");          // arity mismatch
  expect_error("rel E 2\nnode a\nfact E a b\n", "undeclared element");
  expect_error("rel E 2\nnode a\nnode a\n", "declared twice");
  expect_error("node a\nfact F a\n", "unknown relation");
  expect_error("rel E 2\nrel E 2\n", "line 2");
  expect_error("rel E two\n", "line 1");
  expect_error("rel E 2\nnode a\nfact E a a extra\n", "line 3");  // trailing token
  expect_error("bogus something\n", "line 1");
}

TEST_CASE("duplicate facts collapse") {
  Structure s = load_structure_text(
      "rel E 2\nnode a\nnode b\nfact E a b\nfact E a b\n");
  CHECK(s.facts(0).rows() == 1);
}

TEST_CASE("self loops do not create graph edges") {
  Structure s = load_structure_text("rel E 2\nnode a\nnode b\nfact E a a\n");
  GaifmanGraph g = GaifmanGraph::build(s);
  CHECK(g.neighbors(0).empty());
  CHECK(g.max_degree() == 0);
}

TEST_CASE("co-occurrence graph matches a direct scan") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Structure s = oracle::random_structure(14, 3, seed, /*ternary=*/true);
    GaifmanGraph g = GaifmanGraph::build(s);
    auto expected = oracle::adjacency(s);
    std::size_t max_deg = 0;
    for (Element e = 0; e < s.size(); ++e) {
      std::vector<Element> got(g.neighbors(e).begin(), g.neighbors(e).end());
      std::vector<Element> want(expected[e].begin(), expected[e].end());
      REQUIRE(got == want);
      max_deg = std::max(max_deg, want.size());
      for (Element o = 0; o < s.size(); ++o) {
        CHECK(g.adjacent(e, o) == (expected[e].count(o) > 0));
      }
    }
    CHECK(g.max_degree() == max_deg);
    CHECK(check_degree_bound(g, 3));
  }
}

TEST_CASE("ternary facts link all component pairs") {
  Structure s = load_structure_text(
      "rel T 3\nnode a\nnode b\nnode c\nfact T a b c\n");
  GaifmanGraph g = GaifmanGraph::build(s);
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(1, 2));
  CHECK(g.adjacent(0, 2));
  CHECK(g.max_degree() == 2);
}

TEST_CASE("truncated distances match breadth-first search") {
  for (std::uint64_t seed = 20; seed <= 26; ++seed) {
    Structure s = oracle::random_structure(16, 3, seed);
    GaifmanGraph g = GaifmanGraph::build(s);
    for (std::uint32_t depth : {0u, 1u, 2u, 3u, 7u}) {
      DistanceIndex ix = DistanceIndex::build(g, depth);
      CHECK(ix.depth() == depth);
      for (Element a = 0; a < s.size(); ++a) {
        auto want = oracle::distances_from(s, a);
        for (Element b = 0; b < s.size(); ++b) {
          auto got = ix.distance(a, b);
          if (want[b].has_value() && *want[b] <= depth) {
            REQUIRE(got.has_value());
            CHECK(*got == *want[b]);
          } else {
            CHECK_FALSE(got.has_value());
          }
        }
      }
    }
  }
}

TEST_CASE("balls and layers are domain-ordered and consistent") {
  Structure s = oracle::random_structure(15, 3, 99);
  GaifmanGraph g = GaifmanGraph::build(s);
  DistanceIndex ix = DistanceIndex::build(g, 4);
  for (Element a = 0; a < s.size(); ++a) {
    auto ball = ix.ball_elements(a);
    auto dist = ix.ball_distances(a);
    REQUIRE(ball.size() == dist.size());
    CHECK(std::is_sorted(ball.begin(), ball.end()));
    for (std::size_t i = 0; i < ball.size(); ++i) {
      CHECK(ix.distance(a, ball[i]) == dist[i]);
    }
    for (std::uint32_t l = 0; l <= 4; ++l) {
      for (Element e : ix.layer(a, l)) {
        CHECK(ix.distance(a, e) == l);
      }
      auto b = ix.ball_of(a, l);
      CHECK(std::is_sorted(b.begin(), b.end()));
      for (Element e : b) {
        CHECK(*ix.distance(a, e) <= l);
      }
    }
  }
  CHECK_THROWS_AS(ix.layer(0, 5), ConfigError);
}

TEST_CASE("tuple distance is the component minimum") {
  Structure s = oracle::random_structure(12, 3, 7);
  GaifmanGraph g = GaifmanGraph::build(s);
  DistanceIndex ix = DistanceIndex::build(g, 5);
  Tuple t{0, 5};
  for (Element b = 0; b < s.size(); ++b) {
    auto d0 = ix.distance(0, b);
    auto d1 = ix.distance(5, b);
    auto got = ix.tuple_distance(t, b);
    std::optional<std::uint32_t> want;
    if (d0 && d1) {
      want = std::min(*d0, *d1);
    } else if (d0) {
      want = d0;
    } else {
      want = d1;
    }
    CHECK(got == want);
  }
  // The tuple ball is the union of the component balls.
  auto both = ix.ball_of(t, 3);
  auto b0 = ix.ball_of(Element{0}, 3);
  auto b1 = ix.ball_of(Element{5}, 3);
  std::set<Element> want(b0.begin(), b0.end());
  want.insert(b1.begin(), b1.end());
  CHECK(both == std::vector<Element>(want.begin(), want.end()));
}

TEST_CASE("ball growth respects the degree bound") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Structure s = oracle::random_structure(30, 3, seed + 60, seed % 2 == 1);
    GaifmanGraph g = GaifmanGraph::build(s);
    DistanceIndex ix = DistanceIndex::build(g, 4);
    for (Element a = 0; a < s.size(); ++a) {
      std::vector<Element> prev;
      for (std::uint32_t l = 0; l <= 4; ++l) {
        std::vector<Element> ball = ix.ball_of(a, l);
        std::uint64_t cap = l + 1;
        for (std::uint32_t i = 0; i < l; ++i) cap *= 3;
        CHECK(ball.size() <= cap);  // within d^l * (l+1) for degree 3
        CHECK(std::includes(ball.begin(), ball.end(), prev.begin(), prev.end()));
        prev = std::move(ball);
      }
    }
  }
}
