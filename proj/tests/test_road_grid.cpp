#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include "bpfsim/road_grid.hpp"

using namespace bpfsim;

TEST_CASE("default-sized grid geometry") {
  RoadGrid g{4, 4, 625.0};
  CHECK(g.width_m() == Catch::Approx(2500.0));
  CHECK(g.height_m() == Catch::Approx(2500.0));
  CHECK(g.intersection_count() == 25);
  // 5 horizontal streets of 2500 m + 5 vertical streets of 2500 m
  CHECK(g.total_road_length_m() == Catch::Approx(25000.0));
}

TEST_CASE("single-block grid geometry") {
  RoadGrid g{1, 1, 1000.0};
  CHECK(g.intersection_count() == 4);
  CHECK(g.total_road_length_m() == Catch::Approx(4000.0));
  CHECK(g.intersection(1, 1) == Vec2{1000.0, 1000.0});
  CHECK_THROWS_AS(g.intersection(2, 0), std::out_of_range);
}

TEST_CASE("asymmetric grid road length") {
  RoadGrid g{2, 3, 100.0};
  // 4 horizontal streets of 200 m + 3 vertical streets of 300 m
  CHECK(g.total_road_length_m() == Catch::Approx(4 * 200.0 + 3 * 300.0));
  CHECK(g.intersection_count() == 12);
}

TEST_CASE("on_road accepts street points and rejects interior points") {
  RoadGrid g{4, 4, 625.0};
  CHECK(g.on_road({0.0, 0.0}));
  CHECK(g.on_road({300.0, 625.0}));    // on a horizontal street
  CHECK(g.on_road({1250.0, 99.0}));    // on a vertical street
  CHECK(g.on_road({2500.0, 2500.0}));  // far corner
  CHECK_FALSE(g.on_road({300.0, 300.0}));   // mid-block
  CHECK_FALSE(g.on_road({-1.0, 0.0}));      // outside extents
  CHECK_FALSE(g.on_road({2500.1, 625.0}));  // outside extents
}

TEST_CASE("at_intersection identifies crossing points only") {
  RoadGrid g{4, 4, 625.0};
  CHECK(g.at_intersection({625.0, 1250.0}));
  CHECK(g.at_intersection({0.0, 0.0}));
  CHECK_FALSE(g.at_intersection({300.0, 625.0}));
  CHECK_FALSE(g.at_intersection({300.0, 300.0}));
}

TEST_CASE("snap moves points onto the nearest street") {
  RoadGrid g{4, 4, 625.0};
  // nearer to the y=625 gridline than x=0/x=625
  const Vec2 s1 = g.snap({300.0, 600.0});
  CHECK(g.on_road(s1));
  CHECK(s1 == Vec2{300.0, 625.0});
  // already on a road: unchanged
  CHECK(g.snap({1250.0, 99.0}) == Vec2{1250.0, 99.0});
  // outside the extents: clamped in
  const Vec2 s2 = g.snap({-50.0, 3000.0});
  CHECK(g.on_road(s2));
  CHECK(s2.x == Catch::Approx(0.0));
  CHECK(s2.y == Catch::Approx(2500.0));
  // exact block center snaps deterministically onto a road
  CHECK(g.on_road(g.snap({312.5, 312.5})));
}

TEST_CASE("degenerate constructions are rejected") {
  CHECK_THROWS(RoadGrid(0, 4, 625.0));
  CHECK_THROWS(RoadGrid(4, 0, 625.0));
  CHECK_THROWS(RoadGrid(4, 4, 0.0));
  CHECK_THROWS(RoadGrid(4, 4, -1.0));
}
