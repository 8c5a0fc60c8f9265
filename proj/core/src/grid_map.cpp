#include "socnav/grid_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace socnav {

namespace {

constexpr std::array<std::string_view, kCellTagCount> kTagNames = {
    "free",  "wall", "tree",      "table",    "chair",
    "shelf", "rack", "separator", "obstacle",
};

// One row/column of the separable transform. `f` holds squared distances
// (or +inf); result written to `d`.
void lower_envelope_1d(std::span<const double> f, std::span<double> d,
                       std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) /
          (2.0 * q - 2.0 * p);
      // z[0] is -inf, so k never drops below zero.
      if (s <= z[k]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

std::string_view tag_name(CellTag t) {
  return kTagNames[static_cast<std::size_t>(t)];
}

std::optional<CellTag> tag_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<CellTag>(i);
  }
  return std::nullopt;
}

GridMap::GridMap(int width, int height, double resolution, CellTag fill)
    : width_(width), height_(height), resolution_(resolution) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  cells_.assign(static_cast<std::size_t>(width) * height, fill);
}

void GridMap::fill(const CellRect& r, CellTag t) {
  for (int y = std::max(r.y0, 0); y <= std::min(r.y1, height_ - 1); ++y) {
    for (int x = std::max(r.x0, 0); x <= std::min(r.x1, width_ - 1); ++x) {
      set(x, y, t);
    }
  }
}

CellIndex GridMap::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)),
          static_cast<int>(std::floor(p.y() / resolution_))};
}

bool GridMap::occupied_at(const Vec2& p) const {
  const auto c = cell_of(p);
  return occupied(c.x, c.y);
}

std::size_t GridMap::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(
      cells_.begin(), cells_.end(), [](CellTag t) { return t != CellTag::Free; }));
}

std::uint64_t GridMap::content_hash() const {
  Hasher h;
  h.add(static_cast<std::int64_t>(width_));
  h.add(static_cast<std::int64_t>(height_));
  h.add(resolution_);
  h.bytes(cells_.data(), cells_.size());
  return h.value();
}

DistanceMap::DistanceMap(int width, int height, double resolution,
                         std::vector<double> squared_cells)
    : width_(width),
      height_(height),
      resolution_(resolution),
      sq_(std::move(squared_cells)) {
  dist_.resize(sq_.size());
  for (std::size_t i = 0; i < sq_.size(); ++i) {
    dist_[i] = std::sqrt(sq_[i]) * resolution_;
  }
}

double DistanceMap::interpolate(const Vec2& p) const {
  if (dist_.empty()) return std::numeric_limits<double>::infinity();
  const double fx = std::clamp(p.x() / resolution_ - 0.5, 0.0, width_ - 1.0);
  const double fy = std::clamp(p.y() / resolution_ - 0.5, 0.0, height_ - 1.0);
  const int x0 = std::min(static_cast<int>(fx), width_ - 1);
  const int y0 = std::min(static_cast<int>(fy), height_ - 1);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double tx = fx - x0;
  const double ty = fy - y0;
  const double a = at(x0, y0), b = at(x1, y0), c = at(x0, y1), d = at(x1, y1);
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) ||
      !std::isfinite(d)) {
    return std::min({a, b, c, d});
  }
  return (a * (1.0 - tx) + b * tx) * (1.0 - ty) + (c * (1.0 - tx) + d * tx) * ty;
}

Vec2 DistanceMap::gradient(const Vec2& p) const {
  const double h = resolution_;
  const double xp = interpolate(p + Vec2(h, 0.0));
  const double xm = interpolate(p - Vec2(h, 0.0));
  const double yp = interpolate(p + Vec2(0.0, h));
  const double ym = interpolate(p - Vec2(0.0, h));
  if (!std::isfinite(xp) || !std::isfinite(xm) || !std::isfinite(yp) ||
      !std::isfinite(ym)) {
    return Vec2::Zero();
  }
  Vec2 g((xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h));
  const double n = g.norm();
  if (n > 1.0) g /= n;
  return g;
}

DistanceMap distance_transform(const GridMap& map) {
  const int w = map.width();
  const int h = map.height();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> sq(static_cast<std::size_t>(w) * h, inf);

  // Rows: exact integer distance to the nearest occupied cell in the row.
  for (int y = 0; y < h; ++y) {
    double* row = sq.data() + static_cast<std::size_t>(y) * w;
    int last = -1;
    for (int x = 0; x < w; ++x) {
      if (map.occupied(x, y)) last = x;
      if (last >= 0) row[x] = x - last;
    }
    last = -1;
    for (int x = w - 1; x >= 0; --x) {
      if (map.occupied(x, y)) last = x;
      if (last >= 0) row[x] = std::min(row[x], double(last - x));
    }
    for (int x = 0; x < w; ++x) row[x] = row[x] * row[x];
  }

  // Columns: lower envelope of parabolas.
  std::vector<double> col(h), out(h), z;
  std::vector<int> v;
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = sq[static_cast<std::size_t>(y) * w + x];
    lower_envelope_1d(col, out, v, z);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = out[y];
  }
  return DistanceMap(w, h, map.resolution(), std::move(sq));
}

int label_components(int width, int height,
                     const std::function<bool(int, int)>& passable,
                     std::vector<int>& labels) {
  labels.assign(static_cast<std::size_t>(width) * height, -1);
  int count = 0;
  std::queue<CellIndex> frontier;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto idx = static_cast<std::size_t>(y) * width + x;
      if (labels[idx] >= 0 || !passable(x, y)) continue;
      labels[idx] = count;
      frontier.push({x, y});
      while (!frontier.empty()) {
        const auto c = frontier.front();
        frontier.pop();
        constexpr int dx[] = {1, -1, 0, 0};
        constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = c.x + dx[k];
          const int ny = c.y + dy[k];
          if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
          const auto nidx = static_cast<std::size_t>(ny) * width + nx;
          if (labels[nidx] >= 0 || !passable(nx, ny)) continue;
          labels[nidx] = count;
          frontier.push({nx, ny});
        }
      }
      ++count;
    }
  }
  return count;
}

ConnectivityReport validate_connectivity(const GridMap& map) {
  std::vector<int> labels;
  const int n = label_components(
      map.width(), map.height(),
      [&](int x, int y) { return !map.occupied(x, y); }, labels);
  ConnectivityReport report;
  report.components = n;
  report.connected = n == 1;
  if (n == 0) return report;
  std::vector<std::size_t> sizes(n, 0);
  std::size_t total = 0;
  for (int l : labels) {
    if (l >= 0) {
      ++sizes[l];
      ++total;
    }
  }
  report.largest_fraction =
      static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) /
      static_cast<double>(total);
  return report;
}

}  // namespace socnav
