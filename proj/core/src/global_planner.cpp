#include "socnav/global_planner.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace socnav {

PlanningGrid::PlanningGrid(int width, int height, double resolution,
                           std::vector<std::uint8_t> blocked)
    : width_(width), height_(height), resolution_(resolution), blocked_(std::move(blocked)) {}

double static_clearance(const DistanceMap& dmap, const Vec2& p) {
  return dmap.interpolate(p) - 0.5 * dmap.resolution();
}

PlanningGrid PlanningGrid::inflate(const GridMap& map, const DistanceMap& dmap,
                                   double radius) {
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(map.width()) * map.height(), 0);
  const double half = 0.5 * map.resolution();
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const bool b = map.occupied(x, y) || dmap.at(x, y) - half < radius;
      blocked[static_cast<std::size_t>(y) * map.width() + x] = b ? 1 : 0;
    }
  }
  return PlanningGrid(map.width(), map.height(), map.resolution(), std::move(blocked));
}

CellIndex PlanningGrid::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)),
          static_cast<int>(std::floor(p.y() / resolution_))};
}

bool PlanningGrid::line_free(const Vec2& a, const Vec2& b) const {
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / (0.25 * resolution_))));
  for (int i = 0; i <= n; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    const auto c = cell_of(p);
    if (blocked(c.x, c.y)) return false;
  }
  return true;
}

GridPath astar(const PlanningGrid& grid, CellIndex start, CellIndex goal) {
  const int w = grid.width(), h = grid.height();
  auto inside = [&](CellIndex c) { return c.x >= 0 && c.y >= 0 && c.x < w && c.y < h; };
  if (!inside(start) || !inside(goal)) throw NoPath("start or goal outside the map");
  if (grid.blocked(goal.x, goal.y)) throw NoPath("goal cell is blocked");

  const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  const auto heuristic = [&](int x, int y) {
    const double dx = x - goal.x, dy = y - goal.y;
    return static_cast<std::int64_t>(std::floor(static_cast<double>(kStraightCost) *
                                                std::sqrt(dx * dx + dy * dy)));
  };
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> g(static_cast<std::size_t>(w) * h, kInf);
  std::vector<int> parent(g.size(), -1);
  std::vector<std::uint8_t> closed(g.size(), 0);

  struct Node {
    std::int64_t f, h;
    std::uint64_t order;
    int x, y;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.order > b.order;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::uint64_t order = 0;
  g[idx(start.x, start.y)] = 0;
  open.push({heuristic(start.x, start.y), heuristic(start.x, start.y), order++, start.x, start.y});

  constexpr int dx[] = {1, -1, 0, 0, 1, 1, -1, -1};
  constexpr int dy[] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    const Node n = open.top();
    open.pop();
    const std::size_t ni = idx(n.x, n.y);
    if (closed[ni]) continue;
    closed[ni] = 1;
    if (n.x == goal.x && n.y == goal.y) break;
    for (int k = 0; k < 8; ++k) {
      const int mx = n.x + dx[k], my = n.y + dy[k];
      if (grid.blocked(mx, my)) continue;
      if (k >= 4 && (grid.blocked(n.x + dx[k], n.y) || grid.blocked(n.x, n.y + dy[k]))) continue;
      const std::size_t mi = idx(mx, my);
      if (closed[mi]) continue;
      const std::int64_t cand = g[ni] + (k < 4 ? kStraightCost : kDiagonalCost);
      if (cand < g[mi]) {
        g[mi] = cand;
        parent[mi] = static_cast<int>(ni);
        const std::int64_t hm = heuristic(mx, my);
        open.push({cand + hm, hm, order++, mx, my});
      }
    }
  }
  const std::size_t gi = idx(goal.x, goal.y);
  if (g[gi] == kInf) throw NoPath("no path to goal");
  GridPath path;
  path.cost = g[gi];
  for (int c = static_cast<int>(gi); c >= 0; c = parent[static_cast<std::size_t>(c)]) {
    path.cells.push_back({c % w, c / w});
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

double Path::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    s += (poses[i].position() - poses[i - 1].position()).norm();
  }
  return s;
}

Path resample(const std::vector<Vec2>& points, double spacing, PathSource source) {
  Path out;
  out.source = source;
  if (points.empty()) return out;
  std::vector<Vec2> pts{points.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1], b = points[i];
    const double len = (b - a).norm();
    if (len < 1e-12) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 1; k <= n; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }
  out.poses.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double th = 0.0;
    if (i + 1 < pts.size()) {
      th = std::atan2(pts[i + 1].y() - pts[i].y(), pts[i + 1].x() - pts[i].x());
    } else if (i > 0) {
      th = std::atan2(pts[i].y() - pts[i - 1].y(), pts[i].x() - pts[i - 1].x());
    }
    out.poses.push_back({pts[i].x(), pts[i].y(), th});
  }
  return out;
}

Path plan_global(const PlanningGrid& grid, const Vec2& start, const Vec2& goal) {
  const GridPath gp = astar(grid, grid.cell_of(start), grid.cell_of(goal));
  std::vector<Vec2> pts;
  pts.reserve(gp.cells.size() + 1);
  pts.push_back(start);
  for (std::size_t i = 1; i + 1 < gp.cells.size(); ++i) pts.push_back(grid.cell_center(gp.cells[i]));
  pts.push_back(goal);

  // Greedy line-of-sight shortcutting.
  std::vector<Vec2> smooth{pts.front()};
  std::size_t anchor = 0;
  while (anchor + 1 < pts.size()) {
    std::size_t best = anchor + 1;
    for (std::size_t j = anchor + 2; j < pts.size(); ++j) {
      if (!grid.line_free(pts[anchor], pts[j])) break;
      best = j;
    }
    smooth.push_back(pts[best]);
    anchor = best;
  }
  return resample(smooth, grid.resolution(), PathSource::Global);
}

}  // namespace socnav
