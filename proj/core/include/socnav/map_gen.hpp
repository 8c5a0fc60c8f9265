#pragma once

#include "socnav/grid_map.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socnav {

enum class MapAlgorithm {
  Barn,
  RosmapOutdoor,
  RosmapIndoor,
  RosnavOutdoor,
  Canteen,
  Warehouse,
  Office,
};

std::string_view algorithm_name(MapAlgorithm a);
std::optional<MapAlgorithm> algorithm_from_name(std::string_view name);
std::vector<MapAlgorithm> all_algorithms();

/// Per-algorithm parameter bundle. Keys and ranges are fixed per algorithm:
///
///   barn            fill_pct [0,1], smooth_iter >= 0
///   rosmap_outdoor  obstacle_num >= 0, obstacle_extra_radius >= 0
///   rosmap_indoor   corridor_radius >= 0, iterations >= 1
///   rosnav_outdoor  obstacle_num >= 0, obstacle_extra_radius >= 0
///   canteen         obstacle_num >= 0, obstacle_extra_radius >= 1,
///                   chair_chance [0,1]
///   warehouse       obstacle_num >= 0, rack_chance [0,1]
///   office          obstacle_num >= 0
///
/// Radii and counts are integers in cell units.
struct GeneratorParams {
  MapAlgorithm algorithm = MapAlgorithm::Barn;
  std::map<std::string, double> values;

  static GeneratorParams defaults(MapAlgorithm a);

  /// Overrides a key; throws ConfigError for a key the algorithm does not
  /// take.
  GeneratorParams& set(const std::string& key, double value);
  double get(const std::string& key) const;
  int get_int(const std::string& key) const;

  /// Range checks; throws ConfigError naming the field.
  void validate() const;
};

struct MapSize {
  int width = 120;
  int height = 120;
  double resolution = 0.25;
};

enum class FeatureKind {
  Tree,
  Block,
  Room,
  Corridor,
  Table,
  Chair,
  Shelf,
  Rack,
  Workplace,
  Separator,
};

std::string_view feature_name(FeatureKind k);

/// A placed element, in cell coordinates. Children (chairs, racks) point at
/// their parent feature by index.
struct MapFeature {
  FeatureKind kind;
  CellRect rect;
  int parent = -1;
};

struct GeneratedMap {
  GridMap grid;
  std::vector<MapFeature> features;
};

/// Attempts allowed per requested placement before PlacementExhausted.
inline constexpr int kPlacementAttemptsPerObstacle = 100;

/// Generates a map; identical arguments give identical grids.
GeneratedMap generate_map(const GeneratorParams& params, const MapSize& size,
                          std::uint64_t seed);

/// Regenerates from a map's provenance.
GeneratedMap regenerate(const Provenance& provenance, const MapSize& size);

}  // namespace socnav
