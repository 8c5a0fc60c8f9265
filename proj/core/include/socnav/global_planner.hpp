#pragma once

#include "socnav/geometry.hpp"
#include "socnav/grid_map.hpp"

#include <cstdint>
#include <vector>

namespace socnav {

/// Occupancy inflated by the robot footprint.
class PlanningGrid {
 public:
  PlanningGrid() = default;
  PlanningGrid(int width, int height, double resolution, std::vector<std::uint8_t> blocked);

  /// Blocks every cell whose clearance is below `radius`.
  static PlanningGrid inflate(const GridMap& map, const DistanceMap& dmap, double radius);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  bool blocked(int x, int y) const {
    return x < 0 || y < 0 || x >= width_ || y >= height_ ||
           blocked_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  CellIndex cell_of(const Vec2& p) const;
  Vec2 cell_center(const CellIndex& c) const {
    return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_};
  }
  /// Samples the segment every quarter cell.
  bool line_free(const Vec2& a, const Vec2& b) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.25;
  std::vector<std::uint8_t> blocked_;
};

/// Clearance used for inflation and collision checks alike: interpolated
/// center distance less half a cell.
double static_clearance(const DistanceMap& dmap, const Vec2& p);

/// Integer move costs: a straight step is kStraightCost units.
inline constexpr std::int64_t kStraightCost = 1'000'000;
inline constexpr std::int64_t kDiagonalCost = 1'414'214;

struct GridPath {
  std::vector<CellIndex> cells;
  std::int64_t cost = 0;  // in move-cost units
  double length_m(double resolution) const {
    return static_cast<double>(cost) / kStraightCost * resolution;
  }
};

/// 8-connected A*; diagonal moves may not cut blocked corners. The start
/// cell may itself be blocked. Throws NoPath.
GridPath astar(const PlanningGrid& grid, CellIndex start, CellIndex goal);

enum class PathSource : std::uint8_t { Global, Intermediate };

struct Path {
  std::vector<Pose2> poses;
  PathSource source = PathSource::Global;

  bool empty() const { return poses.empty(); }
  double length() const;
};

/// A* followed by line-of-sight shortcutting and resampling at one cell
/// spacing. The path starts at `start` and ends at `goal`.
Path plan_global(const PlanningGrid& grid, const Vec2& start, const Vec2& goal);

/// Resamples a polyline at `spacing` (endpoints kept) with headings along
/// the segments.
Path resample(const std::vector<Vec2>& points, double spacing, PathSource source);

}  // namespace socnav
