#pragma once

#include "socnav/geometry.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socnav {

/// Cell occupancy with a furniture/semantic tag. Anything but Free blocks.
enum class CellTag : std::uint8_t {
  Free = 0,
  Wall,
  Tree,
  Table,
  Chair,
  Shelf,
  Rack,
  Separator,
  Obstacle,  // static obstacles spawned by task modes
};

inline constexpr int kCellTagCount = 9;

std::string_view tag_name(CellTag t);
std::optional<CellTag> tag_from_name(std::string_view name);

struct CellIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Inclusive rectangle of cells.
struct CellRect {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool empty() const { return x1 < x0 || y1 < y0; }
  bool contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool overlaps(const CellRect& o) const {
    return !(o.x0 > x1 || o.x1 < x0 || o.y0 > y1 || o.y1 < y0);
  }
  CellRect inflated(int r) const { return {x0 - r, y0 - r, x1 + r, y1 + r}; }
  static CellRect centered(int cx, int cy, int radius) {
    return {cx - radius, cy - radius, cx + radius, cy + radius};
  }
  friend bool operator==(const CellRect&, const CellRect&) = default;
};

/// How a map came to be; regenerating from it reproduces the grid exactly.
struct Provenance {
  std::string algorithm;                 // empty for hand-made maps
  std::map<std::string, double> params;  // sorted, so serialization is stable
  std::uint64_t seed = 0;
};

/// Row-major occupancy grid. Cell (x, y) spans
/// [x*res, (x+1)*res) x [y*res, (y+1)*res) in meters.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, double resolution,
          CellTag fill = CellTag::Free);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double width_m() const { return width_ * resolution_; }
  double height_m() const { return height_ * resolution_; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(const Vec2& p) const {
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() < width_m() &&
           p.y() < height_m();
  }

  CellTag at(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, CellTag t) { cells_[index(x, y)] = t; }
  void fill(const CellRect& r, CellTag t);

  /// Out-of-bounds cells count as occupied.
  bool occupied(int x, int y) const {
    return !in_bounds(x, y) || at(x, y) != CellTag::Free;
  }
  bool occupied_at(const Vec2& p) const;

  CellIndex cell_of(const Vec2& p) const;
  Vec2 cell_center(int x, int y) const {
    return {(x + 0.5) * resolution_, (y + 0.5) * resolution_};
  }

  std::span<const CellTag> cells() const { return cells_; }
  std::size_t occupied_count() const;

  Provenance provenance;

  /// Hash over dimensions, resolution and cells (not provenance).
  std::uint64_t content_hash() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.resolution_ == b.resolution_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.25;
  std::vector<CellTag> cells_;
};

/// Per-cell Euclidean distance (meters) from a cell center to the nearest
/// occupied cell center.
class DistanceMap {
 public:
  DistanceMap() = default;
  DistanceMap(int width, int height, double resolution,
              std::vector<double> squared_cells);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  /// Squared distance in cell units; exact integer (or +inf with no
  /// obstacles).
  double squared_cells(int x, int y) const {
    return sq_[static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int x, int y) const {
    return dist_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Bilinear interpolation between cell centers, clamped at the edges.
  double interpolate(const Vec2& p) const;

  /// Central-difference gradient of the interpolated field, one cell step.
  /// Clamped to unit norm; zero where undefined.
  Vec2 gradient(const Vec2& p) const;

  std::span<const double> values() const { return dist_; }

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.25;
  std::vector<double> sq_;
  std::vector<double> dist_;
};

/// Exact Euclidean distance transform (separable lower-envelope algorithm).
DistanceMap distance_transform(const GridMap& map);

struct ConnectivityReport {
  bool connected = false;
  int components = 0;
  double largest_fraction = 0.0;
};

/// 4-connected flood fill over free cells.
ConnectivityReport validate_connectivity(const GridMap& map);

/// 4-connected component labels over cells where `passable` holds; -1 for
/// blocked cells. Returns the number of components.
int label_components(int width, int height,
                     const std::function<bool(int, int)>& passable,
                     std::vector<int>& labels);

}  // namespace socnav
