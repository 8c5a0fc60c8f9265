#include "socnav/map_io.hpp"

#include "socnav/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace socnav {

namespace fs = std::filesystem;

namespace {

struct Run {
  bool horizontal;
  int x, y, length;
  auto key() const { return std::tie(horizontal, y, x, length); }
  bool operator<(const Run& o) const { return key() < o.key(); }
};

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

/// Reads the next PGM token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw Error("truncated PGM file");
}

}  // namespace

int palette_value(CellTag t) {
  switch (t) {
    case CellTag::Free: return 254;
    case CellTag::Wall: return 0;
    default: return 10 * static_cast<int>(t) - 10;
  }
}

WorldDescriptor export_world(const GridMap& map) {
  WorldDescriptor w;
  w.width = map.width();
  w.height = map.height();
  w.resolution = map.resolution();
  const double res = map.resolution();
  const int W = map.width(), H = map.height();
  auto is_wall = [&](int x, int y) {
    return map.in_bounds(x, y) && map.at(x, y) == CellTag::Wall;
  };

  // Each wall cell is covered by its longer maximal run (horizontal on ties).
  std::set<Run> runs;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!is_wall(x, y)) continue;
      int hx = x;
      while (is_wall(hx - 1, y)) --hx;
      int hlen = 0;
      while (is_wall(hx + hlen, y)) ++hlen;
      int vy = y;
      while (is_wall(x, vy - 1)) --vy;
      int vlen = 0;
      while (is_wall(x, vy + vlen)) ++vlen;
      if (hlen >= vlen) {
        runs.insert({true, hx, y, hlen});
      } else {
        runs.insert({false, x, vy, vlen});
      }
    }
  }
  for (const auto& r : runs) {
    WallSegment s;
    s.thickness = res;
    if (r.horizontal) {
      s.start = {r.x * res, (r.y + 0.5) * res};
      s.end = {(r.x + r.length) * res, (r.y + 0.5) * res};
    } else {
      s.start = {(r.x + 0.5) * res, r.y * res};
      s.end = {(r.x + 0.5) * res, (r.y + r.length) * res};
    }
    w.walls.push_back(s);
  }

  // Furniture: greedy disjoint rectangle cover per tag.
  std::vector<char> used(static_cast<std::size_t>(W) * H, 0);
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * W + x; };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const CellTag t = map.at(x, y);
      if (t == CellTag::Free || t == CellTag::Wall || used[idx(x, y)]) continue;
      int x1 = x;
      while (x1 + 1 < W && map.at(x1 + 1, y) == t && !used[idx(x1 + 1, y)]) ++x1;
      int y1 = y;
      while (y1 + 1 < H) {
        bool ok = true;
        for (int xx = x; xx <= x1 && ok; ++xx)
          ok = map.at(xx, y1 + 1) == t && !used[idx(xx, y1 + 1)];
        if (!ok) break;
        ++y1;
      }
      for (int yy = y; yy <= y1; ++yy)
        for (int xx = x; xx <= x1; ++xx) used[idx(xx, yy)] = 1;
      FurniturePrimitive f;
      f.tag = t;
      f.center = {(x + x1 + 1) * 0.5 * res, (y + y1 + 1) * 0.5 * res};
      f.size = {(x1 - x + 1) * res, (y1 - y + 1) * res};
      w.furniture.push_back(f);
    }
  }
  return w;
}

GridMap rasterize(const WorldDescriptor& world) {
  GridMap g(world.width, world.height, world.resolution);
  const double res = world.resolution;
  auto fill_box = [&](double xmin, double ymin, double xmax, double ymax,
                      CellTag tag) {
    // Cells whose centers lie inside the closed box.
    const int cx0 = static_cast<int>(std::ceil(xmin / res - 0.5));
    const int cx1 = static_cast<int>(std::floor(xmax / res - 0.5));
    const int cy0 = static_cast<int>(std::ceil(ymin / res - 0.5));
    const int cy1 = static_cast<int>(std::floor(ymax / res - 0.5));
    g.fill({cx0, cy0, cx1, cy1}, tag);
  };
  for (const auto& s : world.walls) {
    const double h = s.thickness * 0.5;
    fill_box(std::min(s.start.x(), s.end.x()) - (s.start.x() == s.end.x() ? h : 0.0),
             std::min(s.start.y(), s.end.y()) - (s.start.y() == s.end.y() ? h : 0.0),
             std::max(s.start.x(), s.end.x()) + (s.start.x() == s.end.x() ? h : 0.0),
             std::max(s.start.y(), s.end.y()) + (s.start.y() == s.end.y() ? h : 0.0),
             CellTag::Wall);
  }
  for (const auto& f : world.furniture) {
    const Vec2 lo = f.center - 0.5 * f.size;
    const Vec2 hi = f.center + 0.5 * f.size;
    fill_box(lo.x(), lo.y(), hi.x(), hi.y(), f.tag);
  }
  return g;
}

void write_pgm(const GridMap& map, const fs::path& path) {
  auto out = open_out(path);
  out << "P2\n# socnav occupancy grid, resolution " << map.resolution()
      << " m/cell\n"
      << map.width() << ' ' << map.height() << "\n255\n";
  // PGM rows run top to bottom; map y grows upward.
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) {
      if (x) out << ' ';
      out << palette_value(map.at(x, y));
    }
    out << '\n';
  }
}

GridMap read_pgm(const fs::path& path, double resolution) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  if (pgm_token(in) != "P2") throw Error(path.string() + ": not an ASCII PGM");
  const int w = std::stoi(pgm_token(in));
  const int h = std::stoi(pgm_token(in));
  (void)pgm_token(in);  // maxval
  GridMap g(w, h, resolution);
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      const int v = std::stoi(pgm_token(in));
      CellTag tag = CellTag::Wall;
      for (int t = 0; t < kCellTagCount; ++t) {
        if (palette_value(static_cast<CellTag>(t)) == v) tag = static_cast<CellTag>(t);
      }
      g.set(x, y, tag);
    }
  }
  return g;
}

void write_distance_pgm(const DistanceMap& dmap, const fs::path& path) {
  auto out = open_out(path);
  out << "P2\n# socnav distance map, millimeters\n"
      << dmap.width() << ' ' << dmap.height() << "\n65535\n";
  for (int y = dmap.height() - 1; y >= 0; --y) {
    for (int x = 0; x < dmap.width(); ++x) {
      if (x) out << ' ';
      const double mm = dmap.at(x, y) * 1000.0;
      out << (std::isfinite(mm) ? std::min<long>(65535, std::lround(mm)) : 65535);
    }
    out << '\n';
  }
}

void write_map_metadata(const GridMap& map, const fs::path& path,
                        const std::string& image, const std::string& distance,
                        const std::string& world) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "schema" << YAML::Value << "map/1";
  e << YAML::Key << "image" << YAML::Value << image;
  e << YAML::Key << "resolution" << YAML::Value << map.resolution();
  e << YAML::Key << "origin" << YAML::Value << YAML::Flow << YAML::BeginSeq
    << 0.0 << 0.0 << 0.0 << YAML::EndSeq;
  e << YAML::Key << "width" << YAML::Value << map.width();
  e << YAML::Key << "height" << YAML::Value << map.height();
  e << YAML::Key << "palette" << YAML::Value << YAML::BeginMap;
  for (int t = 0; t < kCellTagCount; ++t) {
    e << YAML::Key << std::string(tag_name(static_cast<CellTag>(t)))
      << YAML::Value << palette_value(static_cast<CellTag>(t));
  }
  e << YAML::EndMap;
  e << YAML::Key << "provenance" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "algorithm" << YAML::Value << map.provenance.algorithm;
  e << YAML::Key << "seed" << YAML::Value << map.provenance.seed;
  e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : map.provenance.params) e << YAML::Key << k << YAML::Value << v;
  e << YAML::EndMap << YAML::EndMap;
  e << YAML::Key << "distance_map" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "image" << YAML::Value << distance;
  e << YAML::Key << "meters_per_unit" << YAML::Value << 0.001;
  e << YAML::EndMap;
  e << YAML::Key << "world" << YAML::Value << world;
  e << YAML::EndMap;
  auto out = open_out(path);
  out << e.c_str() << '\n';
}

GridMap load_map(const fs::path& metadata_path) {
  YAML::Node meta;
  try {
    meta = YAML::LoadFile(metadata_path.string());
  } catch (const YAML::Exception& ex) {
    throw ConfigError(metadata_path.string(), ex.mark.line + 1, "", ex.msg);
  }
  const auto res = meta["resolution"].as<double>();
  const auto image = meta["image"].as<std::string>();
  GridMap g = read_pgm(metadata_path.parent_path() / image, res);
  if (const auto prov = meta["provenance"]) {
    g.provenance.algorithm = prov["algorithm"].as<std::string>("");
    g.provenance.seed = prov["seed"].as<std::uint64_t>(0);
    if (const auto params = prov["params"]) {
      for (const auto& kv : params)
        g.provenance.params[kv.first.as<std::string>()] = kv.second.as<double>();
    }
  }
  return g;
}

void write_world(const WorldDescriptor& world, const fs::path& path) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "schema" << YAML::Value << "world/1";
  e << YAML::Key << "width" << YAML::Value << world.width;
  e << YAML::Key << "height" << YAML::Value << world.height;
  e << YAML::Key << "resolution" << YAML::Value << world.resolution;
  e << YAML::Key << "walls" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : world.walls) {
    e << YAML::Flow << YAML::BeginSeq << s.start.x() << s.start.y() << s.end.x()
      << s.end.y() << s.thickness << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "furniture" << YAML::Value << YAML::BeginSeq;
  for (const auto& f : world.furniture) {
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "tag" << YAML::Value
      << std::string(tag_name(f.tag)) << YAML::Key << "center" << YAML::Value
      << YAML::Flow << YAML::BeginSeq << f.center.x() << f.center.y()
      << YAML::EndSeq << YAML::Key << "size" << YAML::Value << YAML::Flow
      << YAML::BeginSeq << f.size.x() << f.size.y() << YAML::EndSeq
      << YAML::EndMap;
  }
  e << YAML::EndSeq << YAML::EndMap;
  auto out = open_out(path);
  out << e.c_str() << '\n';
}

WorldDescriptor read_world(const fs::path& path) {
  YAML::Node n;
  try {
    n = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& ex) {
    throw ConfigError(path.string(), ex.mark.line + 1, "", ex.msg);
  }
  WorldDescriptor w;
  w.width = n["width"].as<int>();
  w.height = n["height"].as<int>();
  w.resolution = n["resolution"].as<double>();
  for (const auto& s : n["walls"]) {
    w.walls.push_back({{s[0].as<double>(), s[1].as<double>()},
                       {s[2].as<double>(), s[3].as<double>()},
                       s[4].as<double>()});
  }
  for (const auto& f : n["furniture"]) {
    FurniturePrimitive p;
    const auto tag = tag_from_name(f["tag"].as<std::string>());
    if (!tag) {
      throw ConfigError(path.string(), f.Mark().line + 1, "tag",
                        "unknown furniture tag");
    }
    p.tag = *tag;
    p.center = {f["center"][0].as<double>(), f["center"][1].as<double>()};
    p.size = {f["size"][0].as<double>(), f["size"][1].as<double>()};
    w.furniture.push_back(p);
  }
  return w;
}

std::vector<fs::path> write_map_bundle(const GridMap& map, const fs::path& stem) {
  const std::string base = stem.filename().string();
  const fs::path dir = stem.parent_path();
  const fs::path image = dir / (base + ".pgm");
  const fs::path dist = dir / (base + ".dist.pgm");
  const fs::path meta = dir / (base + ".yaml");
  const fs::path world = dir / (base + ".world.yaml");
  write_pgm(map, image);
  write_distance_pgm(distance_transform(map), dist);
  write_world(export_world(map), world);
  write_map_metadata(map, meta, image.filename().string(),
                     dist.filename().string(), world.filename().string());
  return {image, dist, meta, world};
}

}  // namespace socnav
