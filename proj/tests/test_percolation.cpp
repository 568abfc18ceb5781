#include <gtest/gtest.h>

#include <set>

#include "dynfpp/percolation.hpp"
#include "dynfpp/rng.hpp"
#include "oracles.hpp"

using namespace dynfpp;

namespace {

Configuration random_config(const Region& r, std::uint64_t seed, double p = 0.5) { return open_config(make_labels(r, seed), p); }

// vertex-disjoint crossings of Ann(m,n) by `ok` vertices, by unit-capacity flow
int oracle_disjoint(const std::function<bool(Vertex)>& ok, int m, int n) {
  std::vector<Vertex> vs;
  for (auto v : oracle::rect_vertices(-n, n, -n, n))
    if (oracle::norm(v) > m && ok(v)) vs.push_back(v);
  oracle::Graph g(vs);
  int N = g.size(), s = 2 * N, t = s + 1;
  oracle::Flow f(2 * N + 2);
  for (int i = 0; i < N; ++i) {
    Vertex v = g.verts[std::size_t(i)];
    f.add(2 * i, 2 * i + 1, 1);
    for (int j : g.nb[std::size_t(i)]) f.add(2 * i + 1, 2 * j, 1);
    bool inner = false;
    for (auto st : oracle::kSteps) inner |= oracle::norm(v + st) <= m;
    if (inner) f.add(s, 2 * i, 1);
    if (oracle::norm(v) == n) f.add(2 * i + 1, t, 1);
  }
  return int(f.run(s, t));
}

}  // namespace

TEST(Crossing, DualityAndOracleOn33x33) {
  Rect q{0, 32, 0, 32};
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto cfg = random_config(Region::rect(q), s);
    bool open_lr = has_crossing(cfg, q, Direction::LR, Color::Open);
    bool closed_tb = has_crossing(cfg, q, Direction::TB, Color::Closed);
    EXPECT_NE(open_lr, closed_tb) << "seed " << s;
    EXPECT_EQ(open_lr, oracle::crossing(0, 32, 0, 32, [&](Vertex v) { return cfg.is_open(v); }, true));
    EXPECT_EQ(closed_tb, oracle::crossing(0, 32, 0, 32, [&](Vertex v) { return !cfg.is_open(v); }, false));
  }
}

TEST(Crossing, SubRectangleAndBounds) {
  auto cfg = make_config(Region::box(3), [](Vertex v) { return v.y == 1; });
  EXPECT_TRUE(has_crossing(cfg, Rect{-3, 3, -3, 3}, Direction::LR, Color::Open));
  EXPECT_FALSE(has_crossing(cfg, Rect{-3, 3, -3, 3}, Direction::TB, Color::Open));
  EXPECT_FALSE(has_crossing(cfg, Rect{-3, 3, -3, 0}, Direction::LR, Color::Open));
  EXPECT_THROW(has_crossing(cfg, Rect{-4, 3, -3, 3}, Direction::LR, Color::Open), std::invalid_argument);
}

TEST(Crossing, ExhaustiveSmallRhombusIsHalf) {
  Rect q{0, 2, 0, 2};
  int hits = 0;
  for (int mask = 0; mask < 512; ++mask) {
    auto cfg = make_config(Region::rect(q), [&](Vertex v) { return (mask >> (v.x * 3 + v.y)) & 1; });
    hits += has_crossing(cfg, q, Direction::LR, Color::Open);
  }
  EXPECT_EQ(hits, 256);
}

TEST(Circuit, InnermostIsValidOpenAndInnermost) {
  int found = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    int m = int(s % 3), n = m + 2 + int(s % 5);
    auto cfg = random_config(Region::box(n), s, 0.7);
    auto c = innermost_open_circuit(cfg, m, n);
    bool closed_arm = oracle::crossing_cluster_count([&](Vertex v) { return !cfg.is_open(v); }, m, n) > 0;
    EXPECT_EQ(c.has_value(), !closed_arm) << "seed " << s;
    if (!c) continue;
    ++found;
    EXPECT_TRUE(is_valid_circuit(c->vertices));
    int r = 0;
    for (auto v : c->vertices) {
      EXPECT_TRUE(cfg.is_open(v));
      EXPECT_GT(linf(v), m);
      EXPECT_LE(linf(v), n);
      r = std::max(r, linf(v));
    }
    EXPECT_TRUE(oracle::surrounds(c->vertices, {0, 0}, n + 1));
    for (int k = 0; k <= m; ++k)
      for (auto v : box_ring(k)) EXPECT_TRUE(c->surrounds(v));
    if (r - 1 > m) EXPECT_FALSE(innermost_open_circuit(cfg, m, r - 1).has_value());
    auto again = innermost_open_circuit(cfg, m, r);
    ASSERT_TRUE(again.has_value());
    EXPECT_EQ(std::set<Vertex>(again->vertices.begin(), again->vertices.end()),
              std::set<Vertex>(c->vertices.begin(), c->vertices.end()));
  }
  EXPECT_GT(found, 50);
}

TEST(Circuit, AllOpenGivesFirstRing) {
  auto cfg = make_config(Region::box(4), [](Vertex) { return true; });
  auto c = innermost_open_circuit(cfg, 1, 4);
  ASSERT_TRUE(c);
  EXPECT_EQ(std::set<Vertex>(c->vertices.begin(), c->vertices.end()).size(), c->vertices.size());
  for (auto v : c->vertices) EXPECT_EQ(linf(v), 2);
  EXPECT_FALSE(innermost_open_circuit(make_config(Region::box(4), [](Vertex) { return false; }), 1, 4));
}

TEST(Arms, OneArmExhaustiveFromOrigin) {
  int hits = 0;
  for (int mask = 0; mask < 64; ++mask) {
    auto nb = neighbors({0, 0});
    auto cfg = make_config(Region::box(1), [&](Vertex v) {
      for (int i = 0; i < 6; ++i)
        if (nb[std::size_t(i)] == v) return bool((mask >> i) & 1);
      return false;
    });
    hits += has_arms(cfg, 0, 1, ArmSpec::parse("open1"));
  }
  EXPECT_EQ(hits, 63);
}

TEST(Arms, MatchOraclesOnRandomConfigurations) {
  for (std::uint64_t s = 0; s < 400; ++s) {
    int n = 2 + int(s % 6), m = int(s % 3) % n;
    double p = 0.4 + 0.05 * double(s % 5);
    auto cfg = random_config(Region::box(n), s * 7 + 1, p);
    auto open = [&](Vertex v) { return cfg.is_open(v); };
    auto closed = [&](Vertex v) { return !cfg.is_open(v); };
    int oc = oracle::crossing_cluster_count(open, m, n), cc = oracle::crossing_cluster_count(closed, m, n);
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("open1")), oc > 0);
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("closed1")), cc > 0);
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("poly2")), oc > 0 && cc > 0);
    // alternating four arms: both colours split into at least two crossing clusters
    bool alt = has_arms(cfg, m, n, ArmSpec::parse("alt4"));
    EXPECT_EQ(alt, oc >= 2) << "seed " << s;
    EXPECT_EQ(alt, cc >= 2) << "seed " << s;
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("mono2")), oracle_disjoint(open, m, n) >= 2);
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("mono4")), oracle_disjoint(open, m, n) >= 4);
    auto upper = [&](Vertex v) { return cfg.is_open(v) && v.y >= 0; };
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("open1h")), oracle::crossing_cluster_count(upper, m, n) > 0);
    EXPECT_EQ(has_arms(cfg, m, n, ArmSpec::parse("mono2h")), oracle_disjoint(upper, m, n) >= 2);
  }
}

TEST(Arms, MonotoneInP) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto lab = make_labels(Region::box(12), s);
    bool prev = false;
    for (double p = 0.3; p <= 0.71; p += 0.05) {
      bool now = has_arms(open_config(lab, p), 0, 12, ArmSpec::parse("open1"));
      EXPECT_TRUE(!prev || now);
      prev = now;
    }
  }
}

TEST(Arms, SpecParsing) {
  EXPECT_EQ(ArmSpec::parse("alt4").colors.size(), 4u);
  EXPECT_TRUE(ArmSpec::parse("ococ").alternating());
  EXPECT_TRUE(ArmSpec::parse("o,o").monochromatic());
  EXPECT_EQ(ArmSpec::parse("open1h").sector, Sector::UpperHalf);
  EXPECT_THROW(ArmSpec::parse("ooc"), std::invalid_argument);
  EXPECT_THROW(ArmSpec::parse("oocc"), std::invalid_argument);
  EXPECT_THROW(ArmSpec::parse("alt4h"), std::invalid_argument);
  EXPECT_THROW(ArmSpec::parse("x"), std::invalid_argument);
  EXPECT_THROW(has_arms(random_config(Region::box(3), 1), 3, 3, ArmSpec::parse("open1")), std::invalid_argument);
  EXPECT_THROW(has_arms(random_config(Region::box(3), 1), 0, 4, ArmSpec::parse("open1")), std::invalid_argument);
}

TEST(Arms, AllOpenAndAllClosed) {
  auto all = make_config(Region::box(6), [](Vertex) { return true; });
  auto none = make_config(Region::box(6), [](Vertex) { return false; });
  EXPECT_TRUE(has_arms(all, 0, 6, ArmSpec::parse("open1")));
  EXPECT_TRUE(has_arms(all, 1, 6, ArmSpec::parse("mono4")));
  EXPECT_FALSE(has_arms(all, 1, 6, ArmSpec::parse("alt4")));
  EXPECT_FALSE(has_arms(none, 0, 6, ArmSpec::parse("open1")));
  EXPECT_TRUE(has_arms(none, 0, 6, ArmSpec::parse("closed1")));
}
