#include <socnav/errors.hpp>
#include <socnav/map_gen.hpp>
#include <socnav/map_io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

using namespace socnav;
namespace fs = std::filesystem;

namespace {

GeneratedMap gen(MapAlgorithm a, std::uint64_t seed,
                 std::initializer_list<std::pair<const char*, double>> kv = {},
                 MapSize size = {}) {
  GeneratorParams p = GeneratorParams::defaults(a);
  for (const auto& [k, v] : kv) p.set(k, v);
  return generate_map(p, size, seed);
}

bool border_walled(const GridMap& g) {
  for (int x = 0; x < g.width(); ++x) {
    if (!g.occupied(x, 0) || !g.occupied(x, g.height() - 1)) return false;
  }
  for (int y = 0; y < g.height(); ++y) {
    if (!g.occupied(0, y) || !g.occupied(g.width() - 1, y)) return false;
  }
  return true;
}

std::vector<double> brute_force_sq(const GridMap& g) {
  std::vector<CellIndex> occ;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      if (g.occupied(x, y)) occ.push_back({x, y});
  std::vector<double> out(static_cast<std::size_t>(g.width()) * g.height(),
                          std::numeric_limits<double>::infinity());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& o : occ) {
        const double dx = x - o.x, dy = y - o.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      out[static_cast<std::size_t>(y) * g.width() + x] = best;
    }
  }
  return out;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("socnav_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(GeneratorParams, DefaultsValidateAndUnknownKeyRejected) {
  for (auto a : all_algorithms()) {
    EXPECT_NO_THROW(GeneratorParams::defaults(a).validate()) << algorithm_name(a);
  }
  GeneratorParams p = GeneratorParams::defaults(MapAlgorithm::Barn);
  EXPECT_THROW(p.set("chair_chance", 0.5), ConfigError);
  p.set("fill_pct", 1.5);
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fill_pct"), std::string::npos);
  }
}

TEST(GeneratorParams, NamesRoundTrip) {
  for (auto a : all_algorithms()) EXPECT_EQ(algorithm_from_name(algorithm_name(a)), a);
  EXPECT_FALSE(algorithm_from_name("hospital"));
}

TEST(GenerateMap, SeedDeterminism) {
  for (auto a : all_algorithms()) {
    const auto m1 = gen(a, 17), m2 = gen(a, 17), m3 = gen(a, 18);
    EXPECT_EQ(m1.grid, m2.grid) << algorithm_name(a);
    EXPECT_NE(m1.grid.content_hash(), m3.grid.content_hash()) << algorithm_name(a);
  }
}

TEST(GenerateMap, ProvenanceRegenerates) {
  for (auto a : all_algorithms()) {
    const MapSize size{80, 60, 0.25};
    const auto m = gen(a, 99, {}, size);
    EXPECT_EQ(m.grid.provenance.algorithm, algorithm_name(a));
    EXPECT_EQ(m.grid.provenance.seed, 99u);
    EXPECT_EQ(regenerate(m.grid.provenance, size).grid, m.grid) << algorithm_name(a);
  }
}

TEST(GenerateMap, OutlinedByWalls) {
  for (auto a : all_algorithms()) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      EXPECT_TRUE(border_walled(gen(a, s).grid)) << algorithm_name(a) << " seed " << s;
    }
  }
}

TEST(Barn, FillBoundaries) {
  const auto empty = gen(MapAlgorithm::Barn, 1, {{"fill_pct", 0.0}, {"smooth_iter", 0}});
  const auto full = gen(MapAlgorithm::Barn, 1, {{"fill_pct", 1.0}, {"smooth_iter", 0}});
  const auto& e = empty.grid;
  for (int y = 1; y < e.height() - 1; ++y) {
    for (int x = 1; x < e.width() - 1; ++x) {
      ASSERT_FALSE(e.occupied(x, y));
      ASSERT_TRUE(full.grid.occupied(x, y));
    }
  }
}

TEST(Barn, FillRatioBeforeSmoothing) {
  for (double f : {0.1, 0.25, 0.4, 0.7}) {
    const auto m = gen(MapAlgorithm::Barn, 5, {{"fill_pct", f}, {"smooth_iter", 0}});
    const double interior = (m.grid.width() - 2.0) * (m.grid.height() - 2.0);
    const double border = 2.0 * m.grid.width() + 2.0 * (m.grid.height() - 2);
    const double ratio = (m.grid.occupied_count() - border) / interior;
    EXPECT_NEAR(ratio, f, 0.02);
  }
}

TEST(Barn, SmoothingIsMajorityVote) {
  const auto raw = gen(MapAlgorithm::Barn, 8, {{"fill_pct", 0.45}, {"smooth_iter", 0}});
  const auto one = gen(MapAlgorithm::Barn, 8, {{"fill_pct", 0.45}, {"smooth_iter", 1}});
  const auto& g = raw.grid;
  for (int y = 1; y < g.height() - 1; ++y) {
    for (int x = 1; x < g.width() - 1; ++x) {
      int c = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) c += g.occupied(x + dx, y + dy);
      ASSERT_EQ(one.grid.occupied(x, y), c >= 5);
    }
  }
}

TEST(RosmapIndoor, CorridorWidthRadiusOne) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::RosmapIndoor, s, {{"corridor_radius", 1}});
    int corridors = 0;
    for (const auto& f : m.features) {
      if (f.kind != FeatureKind::Corridor) continue;
      ++corridors;
      EXPECT_EQ(std::min(f.rect.width(), f.rect.height()), 3);
    }
    EXPECT_GT(corridors, 0);
  }
}

TEST(RosmapIndoor, RoomsShareOneComponent) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto m = gen(MapAlgorithm::RosmapIndoor, s);
    std::vector<int> labels;
    label_components(m.grid.width(), m.grid.height(),
                     [&](int x, int y) { return !m.grid.occupied(x, y); }, labels);
    std::set<int> room_labels;
    for (const auto& f : m.features) {
      if (f.kind != FeatureKind::Room) continue;
      const int cx = f.rect.x0 + f.rect.width() / 2, cy = f.rect.y0 + f.rect.height() / 2;
      room_labels.insert(labels[static_cast<std::size_t>(cy) * m.grid.width() + cx]);
    }
    EXPECT_EQ(room_labels.size(), 1u) << "seed " << s;
    EXPECT_TRUE(validate_connectivity(m.grid).connected) << "seed " << s;
  }
}

TEST(RosmapOutdoor, TreesDoNotOverlap) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::RosmapOutdoor, s, {{"obstacle_num", 20}, {"obstacle_extra_radius", 2}});
    std::vector<CellRect> trees;
    for (const auto& f : m.features) {
      if (f.kind == FeatureKind::Tree) trees.push_back(f.rect);
    }
    ASSERT_EQ(trees.size(), 20u);
    for (std::size_t i = 0; i < trees.size(); ++i)
      for (std::size_t j = i + 1; j < trees.size(); ++j) EXPECT_FALSE(trees[i].overlaps(trees[j]));
    std::size_t tree_cells = 0;
    for (auto t : m.grid.cells()) tree_cells += t == CellTag::Tree;
    EXPECT_EQ(tree_cells, 20u * 25u);
  }
}

TEST(RosnavOutdoor, OverlapPermitted) {
  // Enough blocks on a small map that some seeds overlap; none may throw.
  bool any_overlap = false;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::RosnavOutdoor, s, {{"obstacle_num", 30}, {"obstacle_extra_radius", 3}},
                       {40, 40, 0.25});
    std::vector<CellRect> blocks;
    for (const auto& f : m.features) {
      if (f.kind == FeatureKind::Block) blocks.push_back(f.rect);
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = i + 1; j < blocks.size(); ++j) any_overlap |= blocks[i].overlaps(blocks[j]);
  }
  EXPECT_TRUE(any_overlap);
}

TEST(Canteen, ChairCountIsBinomial) {
  std::array<int, 5> counts{};
  int tables = 0;
  for (std::uint64_t s = 0; tables < 10000; ++s) {
    const auto m = gen(MapAlgorithm::Canteen, s, {{"chair_chance", 0.5}});
    std::vector<int> per(m.features.size(), 0);
    for (const auto& f : m.features) {
      if (f.kind == FeatureKind::Chair) ++per[static_cast<std::size_t>(f.parent)];
    }
    for (std::size_t i = 0; i < m.features.size(); ++i) {
      if (m.features[i].kind != FeatureKind::Table) continue;
      ++counts[static_cast<std::size_t>(per[i])];
      ++tables;
    }
  }
  const double four = static_cast<double>(counts[4]) / tables;
  EXPECT_NEAR(four, 0.0625, 0.01);
  const std::array<double, 5> p{1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  double chi2 = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double e = p[k] * tables;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  EXPECT_LT(chi2, 13.277);  // 4 dof, p = 0.01
}

TEST(Canteen, TableSquaresReservedWithoutOverlap) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::Canteen, s, {{"obstacle_extra_radius", 3}});
    std::vector<CellRect> reserved;
    for (const auto& f : m.features) {
      if (f.kind != FeatureKind::Table) continue;
      const int cx = f.rect.x0 + f.rect.width() / 2, cy = f.rect.y0 + f.rect.height() / 2;
      reserved.push_back(CellRect::centered(cx, cy, 3));
    }
    for (std::size_t i = 0; i < reserved.size(); ++i)
      for (std::size_t j = i + 1; j < reserved.size(); ++j)
        EXPECT_FALSE(reserved[i].overlaps(reserved[j]));
  }
}

TEST(Warehouse, ShelvesOnLines) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::Warehouse, s);
    for (const auto& f : m.features) {
      if (f.kind == FeatureKind::Shelf) {
        EXPECT_TRUE((f.rect.width() == 4 && f.rect.height() == 1) ||
                    (f.rect.width() == 1 && f.rect.height() == 4));
      }
      if (f.kind == FeatureKind::Rack) {
        const CellRect& shelf = m.features[static_cast<std::size_t>(f.parent)].rect;
        EXPECT_TRUE(shelf.inflated(1).contains(f.rect.x0, f.rect.y0));
        EXPECT_FALSE(shelf.contains(f.rect.x0, f.rect.y0));
      }
    }
  }
}

TEST(Office, WorkplacesKeepClearance) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = gen(MapAlgorithm::Office, s);
    std::vector<CellRect> wps;
    int parts = 0;
    for (const auto& f : m.features) {
      if (f.kind == FeatureKind::Workplace) wps.push_back(f.rect);
      if (f.parent >= 0) ++parts;
    }
    EXPECT_EQ(parts, 3 * static_cast<int>(wps.size()));
    for (std::size_t i = 0; i < wps.size(); ++i)
      for (std::size_t j = i + 1; j < wps.size(); ++j)
        EXPECT_FALSE(wps[i].inflated(1).overlaps(wps[j]));
  }
}

TEST(GenerateMap, PlacementExhaustedNamesParameter) {
  for (auto a : {MapAlgorithm::RosmapOutdoor, MapAlgorithm::Canteen, MapAlgorithm::Warehouse,
                 MapAlgorithm::Office}) {
    try {
      gen(a, 1, {{"obstacle_num", 500}}, {30, 30, 0.25});
      FAIL() << algorithm_name(a);
    } catch (const PlacementExhausted& e) {
      EXPECT_EQ(e.parameter, "obstacle_num");
    }
  }
}

TEST(GenerateMap, ZeroObstaclesIsBareOutline) {
  const auto m = gen(MapAlgorithm::Canteen, 1, {{"obstacle_num", 0}});
  EXPECT_EQ(m.grid.occupied_count(), 2u * 120 + 2u * 118);
}

TEST(DistanceTransform, FullyOccupiedIsZero) {
  const GridMap g(10, 7, 0.25, CellTag::Wall);
  const auto d = distance_transform(g);
  for (double v : d.values()) EXPECT_EQ(v, 0.0);
}

TEST(DistanceTransform, Pythagoras) {
  GridMap g(10, 10, 1.0);
  g.set(0, 0, CellTag::Wall);
  const auto d = distance_transform(g);
  EXPECT_EQ(d.at(3, 4), 5.0);
  EXPECT_EQ(d.squared_cells(3, 4), 25.0);
}

TEST(DistanceTransform, NoObstacleIsInfinite) {
  const auto d = distance_transform(GridMap(5, 5, 1.0));
  EXPECT_TRUE(std::isinf(d.at(2, 2)));
}

TEST(DistanceTransform, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    GridMap g(50, 50, 0.25);
    const double density = rng.uniform(0.005, 0.3);
    for (int y = 0; y < 50; ++y)
      for (int x = 0; x < 50; ++x)
        if (rng.bernoulli(density)) g.set(x, y, CellTag::Wall);
    g.set(static_cast<int>(rng.uniform_int(0, 49)), static_cast<int>(rng.uniform_int(0, 49)),
          CellTag::Wall);
    const auto d = distance_transform(g);
    const auto bf = brute_force_sq(g);
    for (int y = 0; y < 50; ++y)
      for (int x = 0; x < 50; ++x)
        ASSERT_EQ(d.squared_cells(x, y), bf[static_cast<std::size_t>(y) * 50 + x])
            << "seed " << s << " cell " << x << "," << y;
  }
}

TEST(DistanceTransform, LipschitzOnGeneratorOutputs_Property) {
  for (auto a : all_algorithms()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto m = gen(a, s);
      const auto d = distance_transform(m.grid);
      const double res = m.grid.resolution();
      for (int y = 0; y < m.grid.height(); ++y) {
        for (int x = 0; x < m.grid.width(); ++x) {
          if (m.grid.occupied(x, y)) ASSERT_EQ(d.at(x, y), 0.0);
          if (x + 1 < m.grid.width()) ASSERT_LE(std::abs(d.at(x, y) - d.at(x + 1, y)), res + 1e-12);
          if (y + 1 < m.grid.height()) ASSERT_LE(std::abs(d.at(x, y) - d.at(x, y + 1)), res + 1e-12);
          if (x + 1 < m.grid.width() && y + 1 < m.grid.height())
            ASSERT_LE(std::abs(d.at(x, y) - d.at(x + 1, y + 1)), res * std::sqrt(2.0) + 1e-12);
        }
      }
    }
  }
}

TEST(Connectivity, EmptyBarnIsConnected) {
  const auto m = gen(MapAlgorithm::Barn, 1, {{"fill_pct", 0.0}});
  const auto r = validate_connectivity(m.grid);
  EXPECT_TRUE(r.connected);
  EXPECT_EQ(r.components, 1);
  EXPECT_DOUBLE_EQ(r.largest_fraction, 1.0);
}

TEST(Connectivity, FullWidthWallSplits) {
  GridMap g(20, 20, 0.25);
  g.fill({0, 10, 19, 10}, CellTag::Wall);
  const auto r = validate_connectivity(g);
  EXPECT_FALSE(r.connected);
  EXPECT_EQ(r.components, 2);
}

TEST(ExportWorld, StraightWallIsOneSegment) {
  GridMap g(20, 20, 0.25);
  g.fill({3, 5, 12, 5}, CellTag::Wall);
  const auto w = export_world(g);
  ASSERT_EQ(w.walls.size(), 1u);
  EXPECT_DOUBLE_EQ(w.walls[0].length(), 10 * 0.25);
  EXPECT_TRUE(w.furniture.empty());
}

TEST(ExportWorld, TableBlockIsOnePrimitive) {
  GridMap g(20, 20, 0.25);
  g.fill({4, 4, 6, 6}, CellTag::Table);
  const auto w = export_world(g);
  ASSERT_EQ(w.furniture.size(), 1u);
  EXPECT_EQ(w.furniture[0].tag, CellTag::Table);
  EXPECT_DOUBLE_EQ(w.furniture[0].size.x(), 0.75);
  EXPECT_DOUBLE_EQ(w.furniture[0].size.y(), 0.75);
  EXPECT_NEAR((w.furniture[0].center - Vec2(1.375, 1.375)).norm(), 0.0, 1e-12);
}

TEST(ExportWorld, RasterRoundTrip) {
  int n = 0;
  for (std::uint64_t s = 0; n < 100; ++s) {
    for (auto a : all_algorithms()) {
      if (n >= 100) break;
      const auto m = gen(a, s, {}, {64, 48, 0.25});
      const GridMap back = rasterize(export_world(m.grid));
      ASSERT_EQ(back, m.grid) << algorithm_name(a) << " seed " << s;
      ++n;
    }
  }
}

TEST(MapIo, PgmRoundTrip) {
  const auto dir = temp_dir("pgm");
  const auto m = gen(MapAlgorithm::Office, 4, {}, {50, 40, 0.2});
  write_pgm(m.grid, dir / "m.pgm");
  EXPECT_EQ(read_pgm(dir / "m.pgm", 0.2), m.grid);
}

TEST(MapIo, BundleAndWorldFileRoundTrip) {
  const auto dir = temp_dir("bundle");
  const auto m = gen(MapAlgorithm::Canteen, 4, {}, {60, 50, 0.25});
  const auto files = write_map_bundle(m.grid, dir / "canteen");
  EXPECT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
  const GridMap loaded = load_map(dir / "canteen.yaml");
  EXPECT_EQ(loaded, m.grid);
  EXPECT_EQ(loaded.provenance.algorithm, "canteen");
  EXPECT_EQ(loaded.provenance.seed, 4u);
  EXPECT_EQ(loaded.provenance.params, m.grid.provenance.params);
  const auto w = read_world(dir / "canteen.world.yaml");
  EXPECT_EQ(rasterize(w), m.grid);
}

TEST(MapIo, PaletteDistinctPerTag) {
  std::set<int> values;
  for (int t = 0; t < kCellTagCount; ++t) values.insert(palette_value(static_cast<CellTag>(t)));
  EXPECT_EQ(values.size(), static_cast<std::size_t>(kCellTagCount));
  EXPECT_EQ(palette_value(CellTag::Free), 254);
  EXPECT_EQ(palette_value(CellTag::Wall), 0);
}
