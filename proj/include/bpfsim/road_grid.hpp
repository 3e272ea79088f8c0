#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bpfsim/vec2.hpp"

namespace bpfsim {

// Manhattan grid of two-way streets. blocks_x * blocks_y city blocks, so
// (blocks_x + 1) north-south and (blocks_y + 1) east-west streets crossing at
// right angles with the given spacing. Positions snap to street centrelines.
class RoadGrid {
 public:
  RoadGrid(int blocks_x, int blocks_y, double block_m)
      : blocks_x_(blocks_x), blocks_y_(blocks_y), block_m_(block_m) {
    if (blocks_x < 1 || blocks_y < 1) throw std::invalid_argument("grid needs at least 1x1 blocks");
    if (block_m <= 0) throw std::invalid_argument("grid.block_m must be > 0");
  }

  int blocks_x() const { return blocks_x_; }
  int blocks_y() const { return blocks_y_; }
  double block_m() const { return block_m_; }
  double width_m() const { return blocks_x_ * block_m_; }
  double height_m() const { return blocks_y_ * block_m_; }

  int intersection_count() const { return (blocks_x_ + 1) * (blocks_y_ + 1); }

  Vec2 intersection(int ix, int iy) const {
    if (ix < 0 || ix > blocks_x_ || iy < 0 || iy > blocks_y_)
      throw std::out_of_range("intersection index outside grid");
    return {ix * block_m_, iy * block_m_};
  }

  // total drivable street length: each horizontal street spans width, each
  // vertical street spans height
  double total_road_length_m() const {
    return (blocks_y_ + 1) * width_m() + (blocks_x_ + 1) * height_m();
  }

  bool on_road(const Vec2& p, double tol = 1e-6) const {
    if (p.x < -tol || p.x > width_m() + tol) return false;
    if (p.y < -tol || p.y > height_m() + tol) return false;
    return on_gridline(p.x, tol) || on_gridline(p.y, tol);
  }

  bool at_intersection(const Vec2& p, double tol = 1e-6) const {
    return on_gridline(p.x, tol) && on_gridline(p.y, tol);
  }

  // nearest street point, used to legalize configured positions like the sink
  Vec2 snap(const Vec2& p) const {
    const double cx = clamp_axis(p.x, width_m());
    const double cy = clamp_axis(p.y, height_m());
    const double gx = nearest_gridline(cx);
    const double gy = nearest_gridline(cy);
    // snapping the closer coordinate perturbs the position least
    if (std::abs(gx - cx) <= std::abs(gy - cy)) return {gx, cy};
    return {cx, gy};
  }

 private:
  bool on_gridline(double v, double tol) const {
    const double r = std::remainder(v, block_m_);
    return std::abs(r) <= tol;
  }

  static double clamp_axis(double v, double extent) {
    if (v < 0) return 0;
    if (v > extent) return extent;
    return v;
  }

  double nearest_gridline(double v) const {
    const double k = std::round(v / block_m_);
    return k * block_m_;
  }

  int blocks_x_;
  int blocks_y_;
  double block_m_;
};

}  // namespace bpfsim
