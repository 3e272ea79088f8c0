#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bpfsim/mobility.hpp"
#include "bpfsim/rng.hpp"
#include "bpfsim/road_grid.hpp"

using namespace bpfsim;

namespace {

const RoadGrid kGrid{4, 4, 625.0};

// +1 left turn, -1 right turn, 0 straight (relative to the arrival heading)
int turn_sign(Heading before, Heading after) {
  const Vec2 b = unit(before);
  const Vec2 a = unit(after);
  const double z = b.x * a.y - b.y * a.x;
  if (z > 0) return 1;
  if (z < 0) return -1;
  return 0;
}

}  // namespace

TEST_CASE("speed draws are uniform over the configured band") {
  Mobility m(kGrid, 2, {1250, 1250}, SpeedModel{}, 99, 0);
  RngStream rng(7, 0, "speed-check");
  const int n = 1'000'000;
  double sum = 0, lo = 1e9, hi = -1e9;
  for (int i = 0; i < n; ++i) {
    const double s = m.draw_speed(rng);
    sum += s;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  CHECK(sum / n == Catch::Approx(14.0).margin(0.2));
  CHECK(lo >= 3.0);
  CHECK(hi <= 25.0);
  CHECK(lo < 3.1);   // the band edges are actually reached
  CHECK(hi > 24.9);
}

TEST_CASE("interior intersections split straight/left/right evenly") {
  Mobility m(kGrid, 2, {1250, 1250}, SpeedModel{}, 424242, 0);
  const std::uint32_t id = 0;
  const double tol = 1e-6;
  long counts[3] = {0, 0, 0};  // right, straight, left
  long observed = 0;
  for (long step = 0; step < 1'500'000 && observed < 100'000; ++step) {
    const Heading before = m.heading_of(id);
    const SimTime arr = m.next_arrival_us(id);
    const Vec2 at = m.position_at(id, arr);  // advances exactly one leg
    const Heading after = m.heading_of(id);
    REQUIRE(kGrid.at_intersection(at));
    const bool interior = at.x > tol && at.x < kGrid.width_m() - tol && at.y > tol &&
                          at.y < kGrid.height_m() - tol;
    if (!interior) continue;
    ++counts[turn_sign(before, after) + 1];
    ++observed;
  }
  REQUIRE(observed == 100'000);
  const double expect = observed / 3.0;
  double chi2 = 0;
  for (long c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 99.9th percentile of chi-squared with 2 degrees of freedom
  CHECK(chi2 < 13.815510557964274);
}

TEST_CASE("boundary arrivals turn along the boundary street") {
  Mobility m(kGrid, 2, {1250, 1250}, SpeedModel{}, 5, 0);
  // arriving at a non-corner boundary intersection moving -x: only +/-y remain
  auto opts = m.permitted({0.0, 625.0}, Heading::MinusX);
  REQUIRE(opts.size() == 2);
  CHECK(std::count(opts.begin(), opts.end(), Heading::PlusY) == 1);
  CHECK(std::count(opts.begin(), opts.end(), Heading::MinusY) == 1);
  // corner: a single in-grid non-reversing choice survives
  opts = m.permitted({0.0, 0.0}, Heading::MinusY);
  REQUIRE(opts.size() == 1);
  CHECK(opts[0] == Heading::PlusX);
  // interior: everything but the U-turn
  opts = m.permitted({625.0, 625.0}, Heading::PlusX);
  REQUIRE(opts.size() == 3);
  CHECK(std::count(opts.begin(), opts.end(), Heading::MinusX) == 0);
}

TEST_CASE("vehicles stay on the street grid forever") {
  Mobility m(kGrid, 6, {1250, 1250}, SpeedModel{}, 31337, 2);
  for (std::uint32_t id = 0; id < 5; ++id) {
    for (SimTime t = 0; t <= 2000 * kMicrosPerSecond; t += 1'370'000) {
      const Vec2 p = m.position_at(id, t);
      INFO("node " << id << " at t=" << t);
      CHECK(kGrid.on_road(p));
    }
  }
}

TEST_CASE("single-block grid keeps a vehicle inside the square") {
  RoadGrid small{1, 1, 1000.0};
  Mobility m(small, 2, {500, 0}, SpeedModel{}, 17, 0);
  for (SimTime t = 0; t <= 5000 * kMicrosPerSecond; t += 333'333) {
    const Vec2 p = m.position_at(0, t);
    CHECK(small.on_road(p));
  }
}

TEST_CASE("the sink never moves") {
  Mobility m(kGrid, 10, {1250.0, 1250.0}, SpeedModel{}, 8, 1);
  const auto sink = m.sink_id();
  CHECK(sink == 9);
  CHECK(m.is_static(sink));
  CHECK(m.speed_of(sink) == 0.0);
  const Vec2 p0 = m.position_at(sink, 0);
  CHECK(p0 == Vec2{1250.0, 1250.0});
  CHECK(m.position_at(sink, 500 * kMicrosPerSecond) == p0);
}

TEST_CASE("an off-road sink request snaps onto the grid") {
  Mobility m(kGrid, 2, {1240.0, 1111.0}, SpeedModel{}, 8, 1);
  const Vec2 p = m.position_at(m.sink_id(), 0);
  CHECK(kGrid.on_road(p));
  CHECK(p == Vec2{1250.0, 1111.0});  // x snapped to the nearest vertical street
}

TEST_CASE("trajectories are invariant to the query pattern") {
  const int n = 8;
  Mobility sparse(kGrid, n, {1250, 1250}, SpeedModel{}, 2024, 3);
  Mobility dense(kGrid, n, {1250, 1250}, SpeedModel{}, 2024, 3);
  // dense: every node, every second; sparse: only node 3 at a few times
  std::vector<Vec2> dense_at_node3;
  for (SimTime t = 0; t <= 100 * kMicrosPerSecond; t += kMicrosPerSecond) {
    for (std::uint32_t id = 0; id < n; ++id) {
      const Vec2 p = dense.position_at(id, t);
      if (id == 3) dense_at_node3.push_back(p);
    }
  }
  for (SimTime t = 0, i = 0; t <= 100 * kMicrosPerSecond; t += kMicrosPerSecond, ++i) {
    const Vec2 p = sparse.position_at(3, t);
    CHECK(p.x == dense_at_node3[i].x);
    CHECK(p.y == dense_at_node3[i].y);
  }
}

TEST_CASE("initial placements are uniform over the roads") {
  const int n = 10'001;
  Mobility m(kGrid, n, {1250, 1250}, SpeedModel{}, 777, 0);
  int horizontal = 0;
  const double tol = 1e-9;
  for (std::uint32_t id = 0; id + 1 < n; ++id) {
    const Vec2 p = m.position_at(id, 0);
    REQUIRE(kGrid.on_road(p));
    // count nodes lying on a horizontal street (y on a gridline)
    if (std::abs(std::remainder(p.y, kGrid.block_m())) < tol) ++horizontal;
  }
  // half the road length is horizontal, so about half the nodes land there;
  // intersection points count as horizontal here, a O(1e-3) bias at most
  CHECK(static_cast<double>(horizontal) / (n - 1) == Catch::Approx(0.5).margin(0.03));
}

TEST_CASE("explicit placements can be frozen or mobile") {
  const std::vector<Vec2> pos{{100, 0}, {300, 625}, {1250, 1250}};
  Mobility frozen(kGrid, pos, SpeedModel{}, 1, 0, /*static_nodes=*/true);
  CHECK(frozen.node_count() == 3);
  for (std::uint32_t id = 0; id < 3; ++id) {
    CHECK(frozen.is_static(id));
    CHECK(frozen.position_at(id, 60 * kMicrosPerSecond) == pos[id]);
  }
  Mobility moving(kGrid, pos, SpeedModel{}, 1, 0, /*static_nodes=*/false);
  CHECK_FALSE(moving.is_static(0));
  CHECK(moving.is_static(2));  // the sink stays put regardless
  CHECK(moving.position_at(0, 30 * kMicrosPerSecond) != pos[0]);
}

TEST_CASE("mid-leg motion is linear at the drawn speed") {
  const std::vector<Vec2> pos{{300, 625}, {1250, 1250}};
  Mobility m(kGrid, pos, SpeedModel{}, 42, 0, /*static_nodes=*/false);
  CHECK(m.heading_of(0) == Heading::PlusX);  // mid-block on a horizontal street
  const double v = m.speed_of(0);
  CHECK(v >= 3.0);
  CHECK(v <= 25.0);
  REQUIRE(m.next_arrival_us(0) > kMicrosPerSecond);  // leg lasts well past 1 s
  const Vec2 p = m.position_at(0, kMicrosPerSecond);
  CHECK(p.y == 625.0);
  CHECK(p.x - 300.0 == Catch::Approx(v).epsilon(1e-12));
  // and the leg ends exactly on the next intersection
  const SimTime arr = m.next_arrival_us(0);
  const Vec2 end = m.position_at(0, arr);
  CHECK(kGrid.at_intersection(end));
}

TEST_CASE("off-grid explicit placement is rejected") {
  const std::vector<Vec2> pos{{300, 300}, {1250, 1250}};
  CHECK_THROWS(Mobility(kGrid, pos, SpeedModel{}, 1, 0));
}
