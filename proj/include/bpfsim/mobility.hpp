#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpfsim/rng.hpp"
#include "bpfsim/road_grid.hpp"
#include "bpfsim/sim_time.hpp"
#include "bpfsim/vec2.hpp"

namespace bpfsim {

enum class Heading : std::uint8_t { PlusX, MinusX, PlusY, MinusY };

inline Heading reverse(Heading h) {
  switch (h) {
    case Heading::PlusX: return Heading::MinusX;
    case Heading::MinusX: return Heading::PlusX;
    case Heading::PlusY: return Heading::MinusY;
    default: return Heading::PlusY;
  }
}

inline Vec2 unit(Heading h) {
  switch (h) {
    case Heading::PlusX: return {1, 0};
    case Heading::MinusX: return {-1, 0};
    case Heading::PlusY: return {0, 1};
    default: return {0, -1};
  }
}

struct VehicleState {
  std::uint32_t id = 0;
  Vec2 pos{0, 0};
  Heading heading = Heading::PlusX;
  double speed_mps = 0;  // 0 for static nodes
};

struct SpeedModel {
  double min_mps = 3.0;
  double max_mps = 25.0;  // uniform law; mean (min+max)/2 = 14
};

// Manhattan-grid random waypointless mobility: vehicles drive street segments
// at constant speed, redrawing direction (uniform over permitted, no U-turn)
// and speed at every intersection. Positions are evaluated analytically and
// lazily per vehicle, so lookups at arbitrary (non-decreasing) times are exact
// without fixed-interval ticks. Each vehicle owns a named RNG substream, which
// keeps its trajectory invariant to when other nodes happen to query it.
class Mobility {
 public:
  // Random placement: ids 0..n-2 are vehicles uniform over total road length
  // with uniform along-street heading; id n-1 is the static sink.
  Mobility(const RoadGrid& grid, int n, Vec2 sink_pos, SpeedModel speeds,
           std::uint64_t master_seed, std::uint32_t run_index, bool static_nodes = false)
      : grid_(grid), speeds_(speeds), master_seed_(master_seed), run_index_(run_index) {
    if (n < 1) throw std::invalid_argument("need at least the sink node");
    RngStream place(master_seed, run_index, "placement");
    legs_.reserve(n);
    for (int i = 0; i + 1 < n; ++i) {
      auto [pos, heading] = random_street_point(place);
      add_node(pos, heading, static_nodes);
    }
    add_node(grid.snap(sink_pos), Heading::PlusX, /*is_static=*/true);
  }

  // Explicit placement (test topologies): node i at positions[i], last is the
  // sink. All nodes static unless static_nodes is false.
  Mobility(const RoadGrid& grid, const std::vector<Vec2>& positions, SpeedModel speeds,
           std::uint64_t master_seed, std::uint32_t run_index, bool static_nodes = true)
      : grid_(grid), speeds_(speeds), master_seed_(master_seed), run_index_(run_index) {
    if (positions.empty()) throw std::invalid_argument("need at least the sink node");
    legs_.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!grid.on_road(positions[i]))
        throw std::invalid_argument("node position off the street grid");
      const bool is_static = static_nodes || i + 1 == positions.size();
      add_node(positions[i], initial_heading_for(positions[i]), is_static);
    }
  }

  int node_count() const { return static_cast<int>(legs_.size()); }
  std::uint32_t sink_id() const { return static_cast<std::uint32_t>(legs_.size() - 1); }

  Vec2 position_at(std::uint32_t id, SimTime t) {
    Leg& leg = legs_[id];
    if (leg.is_static) return leg.from;
    while (t >= leg.arrive_us) advance_leg(id);
    const double dt = seconds(t - leg.start_us);
    Vec2 p{leg.from.x + leg.dir.x * leg.speed * dt, leg.from.y + leg.dir.y * leg.speed * dt};
    // arrival times are rounded up to whole microseconds, so clamp the last
    // sliver of a leg to the intersection rather than overshooting it
    if (leg.dir.x > 0) p.x = std::min(p.x, leg.to.x);
    if (leg.dir.x < 0) p.x = std::max(p.x, leg.to.x);
    if (leg.dir.y > 0) p.y = std::min(p.y, leg.to.y);
    if (leg.dir.y < 0) p.y = std::max(p.y, leg.to.y);
    return p;
  }

  VehicleState state_at(std::uint32_t id, SimTime t) {
    const Vec2 p = position_at(id, t);
    const Leg& leg = legs_[id];
    return {id, p, leg.heading, leg.is_static ? 0.0 : leg.speed};
  }

  // current-leg introspection (tracing, tests)
  SimTime next_arrival_us(std::uint32_t id) const { return legs_[id].arrive_us; }
  Heading heading_of(std::uint32_t id) const { return legs_[id].heading; }
  double speed_of(std::uint32_t id) const { return legs_[id].is_static ? 0.0 : legs_[id].speed; }
  bool is_static(std::uint32_t id) const { return legs_[id].is_static; }

  // permitted next directions on arrival: no U-turn, never off the grid
  std::vector<Heading> permitted(Vec2 at, Heading arrival) const {
    std::vector<Heading> out;
    const double tol = 1e-6;
    for (Heading h : {Heading::PlusX, Heading::MinusX, Heading::PlusY, Heading::MinusY}) {
      if (h == reverse(arrival)) continue;
      const Vec2 d = unit(h);
      if (d.x > 0 && at.x >= grid_.width_m() - tol) continue;
      if (d.x < 0 && at.x <= tol) continue;
      if (d.y > 0 && at.y >= grid_.height_m() - tol) continue;
      if (d.y < 0 && at.y <= tol) continue;
      out.push_back(h);
    }
    if (out.empty()) out.push_back(reverse(arrival));  // dead end: U-turn allowed
    return out;
  }

  double draw_speed(RngStream& rng) const { return rng.uniform(speeds_.min_mps, speeds_.max_mps); }

 private:
  struct Leg {
    Vec2 from{0, 0};
    Vec2 to{0, 0};
    Vec2 dir{0, 0};
    Heading heading = Heading::PlusX;
    double speed = 0;
    SimTime start_us = 0;
    SimTime arrive_us = 0;
    bool is_static = false;
    RngStream rng{0, 0, ""};
  };

  void add_node(Vec2 pos, Heading heading, bool is_static) {
    const auto id = static_cast<std::uint32_t>(legs_.size());
    Leg leg;
    leg.from = pos;
    leg.heading = heading;
    leg.is_static = is_static;
    leg.rng = RngStream(master_seed_, run_index_, "mobility." + std::to_string(id));
    if (!is_static) {
      leg.speed = draw_speed(leg.rng);
      set_leg_target(leg, pos, heading, 0);
    }
    legs_.push_back(std::move(leg));
  }

  // next intersection strictly ahead along heading; flips the heading first if
  // it points off the grid (can happen for a boundary placement draw)
  void set_leg_target(Leg& leg, Vec2 from, Heading heading, SimTime start_us) {
    const double tol = 1e-6;
    Vec2 d = unit(heading);
    if ((d.x > 0 && from.x >= grid_.width_m() - tol) || (d.x < 0 && from.x <= tol) ||
        (d.y > 0 && from.y >= grid_.height_m() - tol) || (d.y < 0 && from.y <= tol)) {
      heading = reverse(heading);
      d = unit(heading);
    }
    Vec2 to = from;
    const double b = grid_.block_m();
    if (d.x != 0) {
      const double k = std::floor(from.x / b + tol);
      to.x = (d.x > 0 ? (k + 1) * b : (std::ceil(from.x / b - tol) - 1) * b);
    } else {
      const double k = std::floor(from.y / b + tol);
      to.y = (d.y > 0 ? (k + 1) * b : (std::ceil(from.y / b - tol) - 1) * b);
    }
    leg.from = from;
    leg.to = to;
    leg.dir = d;
    leg.heading = heading;
    leg.start_us = start_us;
    leg.arrive_us = start_us + us_ceil_from_seconds(distance(from, to) / leg.speed);
  }

  void advance_leg(std::uint32_t id) {
    Leg& leg = legs_[id];
    const Vec2 at = leg.to;
    const auto choices = permitted(at, leg.heading);
    const Heading next = choices[leg.rng.uniform_int(choices.size())];
    leg.speed = draw_speed(leg.rng);
    set_leg_target(leg, at, next, leg.arrive_us);
  }

  std::pair<Vec2, Heading> random_street_point(RngStream& rng) const {
    // streets enumerated horizontals first; a uniform draw over total length
    // is uniform over every street point
    const double w = grid_.width_m();
    const double h = grid_.height_m();
    const double horiz_total = (grid_.blocks_y() + 1) * w;
    double s = rng.uniform01() * grid_.total_road_length_m();
    Vec2 pos;
    bool horizontal;
    if (s < horiz_total) {
      const int j = std::min(static_cast<int>(s / w), grid_.blocks_y());
      pos = {s - j * w, j * grid_.block_m()};
      horizontal = true;
    } else {
      s -= horiz_total;
      const int i = std::min(static_cast<int>(s / h), grid_.blocks_x());
      pos = {i * grid_.block_m(), s - i * h};
      horizontal = false;
    }
    const bool positive = rng.bernoulli(0.5);
    Heading heading = horizontal ? (positive ? Heading::PlusX : Heading::MinusX)
                                 : (positive ? Heading::PlusY : Heading::MinusY);
    return {pos, heading};
  }

  Heading initial_heading_for(const Vec2& p) const {
    // explicit placements don't carry a heading; pick one along the street
    const double tol = 1e-6;
    const double rx = std::remainder(p.x, grid_.block_m());
    if (std::abs(rx) > tol) return Heading::PlusX;  // mid-block on a horizontal street
    return Heading::PlusY;
  }

  RoadGrid grid_;
  SpeedModel speeds_;
  std::uint64_t master_seed_;
  std::uint32_t run_index_;
  std::vector<Leg> legs_;
};

}  // namespace bpfsim
