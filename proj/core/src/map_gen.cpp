#include "socnav/map_gen.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace socnav {

namespace {

struct ParamRange {
  const char* key;
  double default_value;
  double lo;
  double hi;
  bool integer;
};

constexpr double kNoMax = 1e9;

std::vector<ParamRange> param_ranges(MapAlgorithm a) {
  switch (a) {
    case MapAlgorithm::Barn:
      return {{"fill_pct", 0.25, 0.0, 1.0, false},
              {"smooth_iter", 4, 0, kNoMax, true}};
    case MapAlgorithm::RosmapOutdoor:
    case MapAlgorithm::RosnavOutdoor:
      return {{"obstacle_num", 15, 0, kNoMax, true},
              {"obstacle_extra_radius", 2, 0, kNoMax, true}};
    case MapAlgorithm::RosmapIndoor:
      return {{"corridor_radius", 2, 0, kNoMax, true},
              {"iterations", 8, 1, kNoMax, true}};
    case MapAlgorithm::Canteen:
      return {{"obstacle_num", 12, 0, kNoMax, true},
              {"obstacle_extra_radius", 3, 1, kNoMax, true},
              {"chair_chance", 0.5, 0.0, 1.0, false}};
    case MapAlgorithm::Warehouse:
      return {{"obstacle_num", 12, 0, kNoMax, true},
              {"rack_chance", 0.5, 0.0, 1.0, false}};
    case MapAlgorithm::Office:
      return {{"obstacle_num", 12, 0, kNoMax, true}};
  }
  return {};
}

constexpr std::array<std::pair<MapAlgorithm, std::string_view>, 7> kNames = {{
    {MapAlgorithm::Barn, "barn"},
    {MapAlgorithm::RosmapOutdoor, "rosmap_outdoor"},
    {MapAlgorithm::RosmapIndoor, "rosmap_indoor"},
    {MapAlgorithm::RosnavOutdoor, "rosnav_outdoor"},
    {MapAlgorithm::Canteen, "canteen"},
    {MapAlgorithm::Warehouse, "warehouse"},
    {MapAlgorithm::Office, "office"},
}};

void outline(GridMap& g) {
  for (int x = 0; x < g.width(); ++x) {
    g.set(x, 0, CellTag::Wall);
    g.set(x, g.height() - 1, CellTag::Wall);
  }
  for (int y = 0; y < g.height(); ++y) {
    g.set(0, y, CellTag::Wall);
    g.set(g.width() - 1, y, CellTag::Wall);
  }
}

/// Interior cells (inside the one-cell border).
CellRect interior(const GridMap& g) {
  return {1, 1, g.width() - 2, g.height() - 2};
}

/// Uniform top-left corner so that a w x h box lies within `area`.
bool random_box(Rng& rng, const CellRect& area, int w, int h, CellRect& out) {
  if (area.width() < w || area.height() < h) return false;
  const int x0 = static_cast<int>(rng.uniform_int(area.x0, area.x1 - w + 1));
  const int y0 = static_cast<int>(rng.uniform_int(area.y0, area.y1 - h + 1));
  out = {x0, y0, x0 + w - 1, y0 + h - 1};
  return true;
}

bool overlaps_any(const CellRect& r, const std::vector<CellRect>& taken) {
  return std::any_of(taken.begin(), taken.end(),
                     [&](const CellRect& t) { return t.overlaps(r); });
}

void barn(GeneratedMap& out, const GeneratorParams& p, Rng& rng) {
  GridMap& g = out.grid;
  outline(g);
  const double fill = p.get("fill_pct");
  const int rounds = p.get_int("smooth_iter");
  const CellRect in = interior(g);
  std::vector<CellIndex> cells;
  for (int y = in.y0; y <= in.y1; ++y)
    for (int x = in.x0; x <= in.x1; ++x) cells.push_back({x, y});
  const auto n_fill =
      static_cast<std::size_t>(std::llround(fill * static_cast<double>(cells.size())));
  // Partial Fisher-Yates: the first n_fill cells become walls.
  for (std::size_t i = 0; i < n_fill; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i),
                        static_cast<std::int64_t>(cells.size()) - 1));
    std::swap(cells[i], cells[j]);
    g.set(cells[i].x, cells[i].y, CellTag::Wall);
  }
  // 5-of-9 majority vote; the border stays walled.
  for (int r = 0; r < rounds; ++r) {
    GridMap next = g;
    for (int y = in.y0; y <= in.y1; ++y) {
      for (int x = in.x0; x <= in.x1; ++x) {
        int count = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) count += g.occupied(x + dx, y + dy);
        next.set(x, y, count >= 5 ? CellTag::Wall : CellTag::Free);
      }
    }
    g = std::move(next);
  }
}

void squares(GeneratedMap& out, const GeneratorParams& p, Rng& rng,
             bool allow_overlap, CellTag tag, FeatureKind kind) {
  GridMap& g = out.grid;
  outline(g);
  const int n = p.get_int("obstacle_num");
  const int r = p.get_int("obstacle_extra_radius");
  const int edge = 1 + 2 * r;
  const CellRect in = interior(g);
  std::vector<CellRect> taken;
  int attempts = kPlacementAttemptsPerObstacle * n;
  while (static_cast<int>(taken.size()) < n) {
    if (attempts-- <= 0) {
      throw PlacementExhausted(std::string(algorithm_name(p.algorithm)) +
                                   ": placed " + std::to_string(taken.size()) +
                                   " of " + std::to_string(n),
                               "obstacle_num");
    }
    CellRect box;
    if (!random_box(rng, in, edge, edge, box)) continue;
    if (!allow_overlap && overlaps_any(box, taken)) continue;
    taken.push_back(box);
    g.fill(box, tag);
    out.features.push_back({kind, box});
  }
}

CellIndex room_center(const CellRect& r) {
  return {r.x0 + r.width() / 2, r.y0 + r.height() / 2};
}

// Fits [lo, hi] into [min, max]: shifted when it fits, clipped otherwise.
// Strips are padded by the corridor radius on every side, so a shift of at
// most that radius still covers the leg.
void fit_span(int& lo, int& hi, int min, int max) {
  if (hi - lo <= max - min) {
    const int shift = lo < min ? min - lo : hi > max ? max - hi : 0;
    lo += shift;
    hi += shift;
  } else {
    lo = std::max(lo, min);
    hi = std::min(hi, max);
  }
}

void carve(GeneratedMap& out, const CellRect& r) {
  CellRect clipped = r;
  const CellRect in = interior(out.grid);
  fit_span(clipped.x0, clipped.x1, in.x0, in.x1);
  fit_span(clipped.y0, clipped.y1, in.y0, in.y1);
  if (clipped.empty()) return;
  out.grid.fill(clipped, CellTag::Free);
  out.features.push_back({FeatureKind::Corridor, clipped});
}

void rosmap_indoor(GeneratedMap& out, const GeneratorParams& p, Rng& rng) {
  GridMap& g = out.grid;
  const int rooms = p.get_int("iterations");
  const int cr = p.get_int("corridor_radius");
  const CellRect in = interior(g);
  const int max_w = std::max(4, g.width() / 3);
  const int max_h = std::max(4, g.height() / 3);
  if (in.width() < 4 || in.height() < 4) {
    throw PlacementExhausted("rosmap_indoor: map too small for a room",
                             "iterations");
  }
  std::vector<CellRect> placed;
  for (int i = 0; i < rooms; ++i) {
    const int w = static_cast<int>(rng.uniform_int(4, std::min(max_w, in.width())));
    const int h = static_cast<int>(rng.uniform_int(4, std::min(max_h, in.height())));
    CellRect room;
    random_box(rng, in, w, h, room);
    g.fill(room, CellTag::Free);
    out.features.push_back({FeatureKind::Room, room});

    if (!placed.empty()) {
      const CellIndex c = room_center(room);
      std::size_t best = 0;
      long best_d = -1;
      for (std::size_t j = 0; j < placed.size(); ++j) {
        const CellIndex o = room_center(placed[j]);
        const long d = long(o.x - c.x) * (o.x - c.x) + long(o.y - c.y) * (o.y - c.y);
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = j;
        }
      }
      const CellIndex t = room_center(placed[best]);
      const bool horizontal_first = rng.bernoulli(0.5);
      const CellIndex corner = horizontal_first ? CellIndex{t.x, c.y}
                                                : CellIndex{c.x, t.y};
      // Leg 1: c -> corner, leg 2: corner -> t. Each carved 1+2r wide.
      auto leg = [&](CellIndex a, CellIndex b) {
        if (a == b) return;
        carve(out, {std::min(a.x, b.x) - cr, std::min(a.y, b.y) - cr,
                    std::max(a.x, b.x) + cr, std::max(a.y, b.y) + cr});
      };
      leg(c, corner);
      leg(corner, t);
    }
    placed.push_back(room);
  }
  outline(g);
}

void canteen(GeneratedMap& out, const GeneratorParams& p, Rng& rng) {
  GridMap& g = out.grid;
  outline(g);
  const int n = p.get_int("obstacle_num");
  const int r = p.get_int("obstacle_extra_radius");
  const double chair_chance = p.get("chair_chance");
  const int edge = 1 + 2 * r;
  const int table_half = r >= 3 ? 1 : 0;
  const CellRect in = interior(g);
  std::vector<CellRect> taken;
  int attempts = kPlacementAttemptsPerObstacle * n;
  while (static_cast<int>(taken.size()) < n) {
    if (attempts-- <= 0) {
      throw PlacementExhausted("canteen: placed " + std::to_string(taken.size()) +
                                   " of " + std::to_string(n) + " tables",
                               "obstacle_num");
    }
    CellRect square;
    if (!random_box(rng, in, edge, edge, square)) continue;
    if (overlaps_any(square, taken)) continue;
    taken.push_back(square);
    const CellIndex c = room_center(square);
    const CellRect table = CellRect::centered(c.x, c.y, table_half);
    g.fill(table, CellTag::Table);
    const int table_index = static_cast<int>(out.features.size());
    out.features.push_back({FeatureKind::Table, table});
    const int off = table_half + 1;
    const std::array<CellIndex, 4> seats = {
        CellIndex{c.x, c.y + off}, CellIndex{c.x + off, c.y},
        CellIndex{c.x, c.y - off}, CellIndex{c.x - off, c.y}};
    for (const auto& s : seats) {
      if (!rng.bernoulli(chair_chance)) continue;
      g.set(s.x, s.y, CellTag::Chair);
      out.features.push_back({FeatureKind::Chair, {s.x, s.y, s.x, s.y}, table_index});
    }
  }
}

void warehouse(GeneratedMap& out, const GeneratorParams& p, Rng& rng) {
  GridMap& g = out.grid;
  outline(g);
  const int n = p.get_int("obstacle_num");
  const double rack_chance = p.get("rack_chance");
  // Footprint leaves one cell of clearance to the border.
  const CellRect area = interior(g).inflated(-1);
  std::vector<CellRect> reserved;
  int attempts = kPlacementAttemptsPerObstacle * n;
  while (static_cast<int>(reserved.size()) < n) {
    if (attempts-- <= 0) {
      throw PlacementExhausted("warehouse: placed " +
                                   std::to_string(reserved.size()) + " of " +
                                   std::to_string(n) + " shelves",
                               "obstacle_num");
    }
    const bool horizontal = rng.bernoulli(0.5);
    // Shelf is 1x4; rack slots line both long sides.
    const int bw = horizontal ? 4 : 3;
    const int bh = horizontal ? 3 : 4;
    CellRect box;
    if (!random_box(rng, area, bw, bh, box)) continue;
    const CellRect keep_out = box.inflated(1);
    if (overlaps_any(keep_out, reserved)) continue;
    reserved.push_back(keep_out);
    const CellRect shelf = horizontal
                               ? CellRect{box.x0, box.y0 + 1, box.x1, box.y0 + 1}
                               : CellRect{box.x0 + 1, box.y0, box.x0 + 1, box.y1};
    g.fill(shelf, CellTag::Shelf);
    const int shelf_index = static_cast<int>(out.features.size());
    out.features.push_back({FeatureKind::Shelf, shelf});
    for (int side = -1; side <= 1; side += 2) {
      for (int k = 0; k < 4; ++k) {
        if (!rng.bernoulli(rack_chance)) continue;
        const int x = horizontal ? shelf.x0 + k : shelf.x0 + side;
        const int y = horizontal ? shelf.y0 + side : shelf.y0 + k;
        g.set(x, y, CellTag::Rack);
        out.features.push_back({FeatureKind::Rack, {x, y, x, y}, shelf_index});
      }
    }
  }
}

void office(GeneratedMap& out, const GeneratorParams& p, Rng& rng) {
  GridMap& g = out.grid;
  outline(g);
  const int n = p.get_int("obstacle_num");
  const CellRect area = interior(g).inflated(-1);
  std::vector<CellRect> reserved;
  int attempts = kPlacementAttemptsPerObstacle * n;
  while (static_cast<int>(reserved.size()) < n) {
    if (attempts-- <= 0) {
      throw PlacementExhausted("office: placed " + std::to_string(reserved.size()) +
                                   " of " + std::to_string(n) + " workplaces",
                               "obstacle_num");
    }
    const bool horizontal = rng.bernoulli(0.5);
    const bool flipped = rng.bernoulli(0.5);
    CellRect box;
    if (!random_box(rng, area, 3, 3, box)) continue;
    const CellRect keep_out = box.inflated(1);
    if (overlaps_any(keep_out, reserved)) continue;
    reserved.push_back(keep_out);
    const int wp = static_cast<int>(out.features.size());
    out.features.push_back({FeatureKind::Workplace, box});
    // Separator | table | chair, stacked across the line direction.
    const int sep_off = flipped ? 2 : 0;
    const int chair_off = flipped ? 0 : 2;
    CellRect separator, table, chair;
    if (horizontal) {
      separator = {box.x0, box.y0 + sep_off, box.x1, box.y0 + sep_off};
      table = {box.x0, box.y0 + 1, box.x1, box.y0 + 1};
      chair = {box.x0 + 1, box.y0 + chair_off, box.x0 + 1, box.y0 + chair_off};
    } else {
      separator = {box.x0 + sep_off, box.y0, box.x0 + sep_off, box.y1};
      table = {box.x0 + 1, box.y0, box.x0 + 1, box.y1};
      chair = {box.x0 + chair_off, box.y0 + 1, box.x0 + chair_off, box.y0 + 1};
    }
    g.fill(separator, CellTag::Separator);
    g.fill(table, CellTag::Table);
    g.fill(chair, CellTag::Chair);
    out.features.push_back({FeatureKind::Separator, separator, wp});
    out.features.push_back({FeatureKind::Table, table, wp});
    out.features.push_back({FeatureKind::Chair, chair, wp});
  }
}

}  // namespace

std::string_view algorithm_name(MapAlgorithm a) {
  for (const auto& [alg, name] : kNames)
    if (alg == a) return name;
  return "unknown";
}

std::optional<MapAlgorithm> algorithm_from_name(std::string_view name) {
  for (const auto& [alg, n] : kNames)
    if (n == name) return alg;
  // Alias used in benchmark staging.
  if (name == "industrial_hall") return MapAlgorithm::Warehouse;
  return std::nullopt;
}

std::vector<MapAlgorithm> all_algorithms() {
  std::vector<MapAlgorithm> out;
  for (const auto& [alg, name] : kNames) out.push_back(alg);
  return out;
}

std::string_view feature_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Tree: return "tree";
    case FeatureKind::Block: return "block";
    case FeatureKind::Room: return "room";
    case FeatureKind::Corridor: return "corridor";
    case FeatureKind::Table: return "table";
    case FeatureKind::Chair: return "chair";
    case FeatureKind::Shelf: return "shelf";
    case FeatureKind::Rack: return "rack";
    case FeatureKind::Workplace: return "workplace";
    case FeatureKind::Separator: return "separator";
  }
  return "unknown";
}

GeneratorParams GeneratorParams::defaults(MapAlgorithm a) {
  GeneratorParams p;
  p.algorithm = a;
  for (const auto& r : param_ranges(a)) p.values[r.key] = r.default_value;
  return p;
}

GeneratorParams& GeneratorParams::set(const std::string& key, double value) {
  if (!values.contains(key)) {
    throw ConfigError("", 0, key,
                      "not a parameter of " +
                          std::string(algorithm_name(algorithm)));
  }
  values[key] = value;
  return *this;
}

double GeneratorParams::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    throw ConfigError("", 0, key,
                      "missing for " + std::string(algorithm_name(algorithm)));
  }
  return it->second;
}

int GeneratorParams::get_int(const std::string& key) const {
  return static_cast<int>(std::llround(get(key)));
}

void GeneratorParams::validate() const {
  const auto ranges = param_ranges(algorithm);
  for (const auto& [key, value] : values) {
    const auto it = std::find_if(ranges.begin(), ranges.end(),
                                 [&](const ParamRange& r) { return r.key == key; });
    if (it == ranges.end()) {
      throw ConfigError("", 0, key,
                        "not a parameter of " +
                            std::string(algorithm_name(algorithm)));
    }
    if (!std::isfinite(value) || value < it->lo || value > it->hi) {
      throw ConfigError("", 0, key,
                        "value " + std::to_string(value) + " outside [" +
                            std::to_string(it->lo) + ", " +
                            std::to_string(it->hi) + "]");
    }
    if (it->integer && value != std::floor(value)) {
      throw ConfigError("", 0, key, "must be an integer");
    }
  }
  for (const auto& r : ranges) {
    if (!values.contains(r.key)) throw ConfigError("", 0, r.key, "missing");
  }
}

GeneratedMap generate_map(const GeneratorParams& params, const MapSize& size,
                          std::uint64_t seed) {
  params.validate();
  if (size.width < 5 || size.height < 5) {
    throw PlacementExhausted("map must be at least 5x5 cells", "size");
  }
  GeneratedMap out{GridMap(size.width, size.height, size.resolution), {}};
  Rng rng(mix_seed(seed));
  switch (params.algorithm) {
    case MapAlgorithm::Barn: barn(out, params, rng); break;
    case MapAlgorithm::RosmapOutdoor:
      squares(out, params, rng, false, CellTag::Tree, FeatureKind::Tree);
      break;
    case MapAlgorithm::RosnavOutdoor:
      squares(out, params, rng, true, CellTag::Wall, FeatureKind::Block);
      break;
    case MapAlgorithm::RosmapIndoor:
      out.grid = GridMap(size.width, size.height, size.resolution, CellTag::Wall);
      rosmap_indoor(out, params, rng);
      break;
    case MapAlgorithm::Canteen: canteen(out, params, rng); break;
    case MapAlgorithm::Warehouse: warehouse(out, params, rng); break;
    case MapAlgorithm::Office: office(out, params, rng); break;
  }
  out.grid.provenance = {std::string(algorithm_name(params.algorithm)),
                         params.values, seed};
  return out;
}

GeneratedMap regenerate(const Provenance& provenance, const MapSize& size) {
  const auto alg = algorithm_from_name(provenance.algorithm);
  if (!alg) {
    throw ConfigError("", 0, "algorithm",
                      "unknown map algorithm '" + provenance.algorithm + "'");
  }
  GeneratorParams p = GeneratorParams::defaults(*alg);
  for (const auto& [k, v] : provenance.params) p.set(k, v);
  return generate_map(p, size, provenance.seed);
}

}  // namespace socnav
