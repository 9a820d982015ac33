#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccdig/pccd.hpp"
#include "oracles.hpp"

using namespace ccdig;

namespace {

PointSet line(std::initializer_list<double> xs) {
  PointSet out;
  for (double x : xs) out.push_back(Point{x});
  return out;
}

}  // namespace

TEST_CASE("pccd_radius examples") {
  const auto targets = line({0.0, 0.4});
  const auto nontargets = line({1.0});
  CHECK(pccd_radius(0, targets, nontargets, 1.0) == 1.0);
  CHECK(pccd_radius(0, targets, nontargets, 0.5) == doctest::Approx(0.7).epsilon(1e-15));

  const auto single = line({0.0});
  CHECK(pccd_radius(0, single, nontargets, 0.5) == 0.5);
}

TEST_CASE("pccd_radius errors and degenerate cases") {
  const auto targets = line({0.0, 0.4});
  CHECK_THROWS_AS(pccd_radius(0, targets, PointSet{}, 0.5), DataError);
  CHECK_THROWS_AS(pccd_radius(0, targets, line({1.0}), 0.0), ParameterError);
  CHECK_THROWS_AS(pccd_radius(0, targets, line({1.0}), 1.5), ParameterError);
  CHECK_THROWS_AS(pccd_radius(0, targets, line({1.0}), std::nan("")), ParameterError);

  SUBCASE("coincident non-target gives radius 0") {
    CHECK(pccd_radius(0, targets, line({0.0, 3.0}), 0.5) == 0.0);
  }
  SUBCASE("targets beyond the nearest non-target are ignored for l(x)") {
    // l(0) = 0.4 (0.9 is beyond u = 0.5)
    const double r = pccd_radius(0, line({0.0, 0.4, 0.9}), line({0.5}), 0.5);
    CHECK(r == doctest::Approx(0.45));
  }
  SUBCASE("machine-epsilon tau stays strictly above d(x, l(x))") {
    const double eps = std::numeric_limits<double>::epsilon();
    const auto t = line({0.0, 0.9});
    const double r = pccd_radius(0, t, line({1.0}), eps);
    CHECK(r > 0.9);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("build_pccd_digraph") {
  SUBCASE("hand-evaluated instance") {
    const auto targets = line({0.0, 0.1, 5.0});
    const auto radii = pccd_radii(targets, line({1.0}), 1.0);
    CHECK(radii[0] == 1.0);
    CHECK(radii[1] == doctest::Approx(0.9));
    CHECK(radii[2] == 4.0);
    const auto g = build_pccd_digraph(targets, radii);
    CHECK(g.arc_count() == 2);
    CHECK(g.has_arc(0, 1));
    CHECK(g.has_arc(1, 0));
  }
  SUBCASE("single vertex") {
    const auto g = build_pccd_digraph(line({2.0}), std::vector<double>{10.0});
    CHECK(g.size() == 1);
    CHECK(g.arc_count() == 0);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(build_pccd_digraph(line({0.0, 1.0}), std::vector<double>{1.0}), DataError);
  }
}

TEST_CASE("greedy_dominating_set") {
  SUBCASE("complete digraph") {
    Digraph g(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) g.add_arc(i, j);
    CHECK(greedy_dominating_set(g).size() == 1);
  }
  SUBCASE("no arcs") {
    const Digraph g(4);
    CHECK(greedy_dominating_set(g) == std::vector<std::size_t>{0, 1, 2, 3});
  }
  SUBCASE("star matches exhaustive minimum") {
    Digraph g(4);
    g.add_arc(0, 1);
    g.add_arc(0, 2);
    g.add_arc(0, 3);
    CHECK(greedy_dominating_set(g) == std::vector<std::size_t>{0});
    CHECK(oracle::exact_mds_size(g) == 1);
  }
  SUBCASE("empty digraph") { CHECK(greedy_dominating_set(Digraph(0)).empty()); }
  SUBCASE("ties resolve to the lowest index") {
    Digraph g(4);
    g.add_arc(2, 3);
    g.add_arc(1, 0);
    CHECK(greedy_dominating_set(g) == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("dominated vertices cannot be picked later") {
    // 0 -> {1, 2, 3}, 1 -> {4, 5}: after 0 is picked, 1 is gone so 4 and 5
    // must dominate themselves.
    Digraph g(6);
    for (std::size_t v : {1, 2, 3}) g.add_arc(0, v);
    g.add_arc(1, 4);
    g.add_arc(1, 5);
    CHECK(greedy_dominating_set(g) == std::vector<std::size_t>{0, 4, 5});
  }
}

TEST_CASE("greedy set dominates random digraphs") {
  oracle::Rng rng(11);
  std::bernoulli_distribution arc(0.2);
  for (int t = 0; t < 200; ++t) {
    Digraph g(1 + t % 30);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j)
        if (arc(rng)) g.add_arc(i, j);
    const auto s = greedy_dominating_set(g);
    CHECK(is_dominating(g, s));
    std::vector<std::size_t> sorted(s);
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("pccd_cover") {
  SUBCASE("hand trace with lowest-index tie-break") {
    const auto cover = pccd_cover(line({0.0, 0.1}), line({1.0}), 1.0);
    REQUIRE(cover.balls.size() == 1);
    CHECK(cover.balls[0].center_index == 0);
    CHECK(cover.balls[0].radius == 1.0);
    CHECK(cover.balls[0].kind == BallKind::open);
    CHECK_FALSE(cover.balls[0].score.has_value());
    CHECK(cover.is_pure);
    CHECK(cover.is_proper);
  }
  SUBCASE("empty classes") {
    CHECK_THROWS_AS(pccd_cover(PointSet{}, line({1.0}), 1.0), DataError);
    CHECK_THROWS_AS(pccd_cover(line({1.0}), PointSet{}, 1.0), DataError);
  }
  SUBCASE("duplicate point across classes") {
    const auto cover = pccd_cover(line({0.0, 0.2}), line({0.0, 1.0}), 0.5);
    CHECK(cover.is_pure);
    CHECK(cover.is_proper);
    bool zero_ball = false;
    for (const auto& b : cover.balls) zero_ball |= (b.center_index == 0 && b.radius == 0.0);
    CHECK(zero_ball);
  }
}

TEST_CASE("pure cover properties on random instances") {
  oracle::Rng rng(2024);
  std::uniform_int_distribution<std::size_t> size(3, 40);
  const std::vector<double> taus{1e-4, 0.1, 0.5, 1.0, std::numeric_limits<double>::epsilon()};
  for (int t = 0; t < 60; ++t) {
    const std::size_t d = 1 + t % 4;
    const auto x = oracle::mixed_points(rng, size(rng), d, 0.0);
    const auto y = oracle::mixed_points(rng, size(rng), d, 0.4);
    std::optional<Digraph> reference;
    std::vector<std::size_t> reference_set;
    for (double tau : taus) {
      const auto radii = pccd_radii(x, y, tau);
      const auto g = build_pccd_digraph(x, radii);
      if (!reference) {
        reference = g;
        reference_set = greedy_dominating_set(g);
      }
      // Arc set and greedy picks do not depend on tau.
      CHECK(g == *reference);
      CHECK(greedy_dominating_set(g) == reference_set);

      const auto cover = pccd_cover(x, y, tau);
      CHECK(cover.is_pure);
      CHECK(cover.is_proper);
      for (const auto& b : cover.balls) {
        for (const auto& p : y) CHECK(oracle::euclid(b.center, p) >= b.radius);
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        bool ok = false;
        for (const auto& b : cover.balls) {
          ok |= b.center_index == i || oracle::euclid(b.center, x[i]) < b.radius;
        }
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("pccd_radius is nondecreasing in tau") {
  oracle::Rng rng(8);
  for (int t = 0; t < 40; ++t) {
    const auto x = oracle::uniform_points(rng, 15, 2, 0.0, 1.0);
    const auto y = oracle::uniform_points(rng, 15, 2, 0.2, 1.2);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double prev = 0.0;
      for (int k = 1; k <= 20; ++k) {
        const double r = pccd_radius(i, x, y, k / 20.0);
        CHECK(r >= prev);
        prev = r;
      }
    }
  }
}

TEST_CASE("greedy size is within (1 + ln n) of the exact minimum") {
  oracle::Rng rng(77);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + t % 3;
    const auto x = oracle::uniform_points(rng, size(rng), d, 0.0, 1.0);
    const auto y = oracle::uniform_points(rng, size(rng), d, 0.3, 1.3);
    const auto g = build_pccd_digraph(x, pccd_radii(x, y, 1.0));
    const auto greedy = greedy_dominating_set(g).size();
    const auto exact = oracle::exact_mds_size(g);
    CHECK(exact <= greedy);
    CHECK(static_cast<double>(greedy) <=
          (1.0 + std::log(static_cast<double>(x.size()))) * static_cast<double>(exact));
  }
}

TEST_CASE("scaling coordinates scales radii and keeps the structure") {
  oracle::Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 1 + t % 3;
    const auto x = oracle::uniform_points(rng, 25, d, 0.0, 1.0);
    const auto y = oracle::uniform_points(rng, 20, d, 0.3, 0.7);
    const auto base = pccd_cover(x, y, 0.3);
    for (double c : {0.25, 1e-3, 1e3}) {
      const auto sx = oracle::scaled(x, c);
      const auto sy = oracle::scaled(y, c);
      const auto cover = pccd_cover(sx, sy, 0.3);
      CHECK(build_pccd_digraph(sx, pccd_radii(sx, sy, 0.3)) ==
            build_pccd_digraph(x, pccd_radii(x, y, 0.3)));
      REQUIRE(cover.balls.size() == base.balls.size());
      for (std::size_t b = 0; b < cover.balls.size(); ++b) {
        CHECK(cover.balls[b].center_index == base.balls[b].center_index);
        CHECK(cover.balls[b].radius == doctest::Approx(c * base.balls[b].radius).epsilon(1e-12));
      }
    }
  }
}
