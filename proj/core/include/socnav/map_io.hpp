#pragma once

#include "socnav/grid_map.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace socnav {

/// Axis-aligned wall run, `thickness` wide, from `start` to `end` along its
/// centerline (meters).
struct WallSegment {
  Vec2 start;
  Vec2 end;
  double thickness = 0.0;

  double length() const { return (end - start).norm(); }
};

/// Axis-aligned furniture/obstacle box.
struct FurniturePrimitive {
  CellTag tag = CellTag::Obstacle;
  Vec2 center;
  Vec2 size;
};

/// Primitive world description: walls as merged runs, everything else as
/// tagged boxes. Rasterizing it at `resolution` gives back the grid.
struct WorldDescriptor {
  int width = 0;
  int height = 0;
  double resolution = 0.25;
  std::vector<WallSegment> walls;
  std::vector<FurniturePrimitive> furniture;
};

WorldDescriptor export_world(const GridMap& map);
GridMap rasterize(const WorldDescriptor& world);

/// PGM pixel value for each tag (free 254, wall 0, others spaced by 10).
int palette_value(CellTag t);

void write_pgm(const GridMap& map, const std::filesystem::path& path);
/// Reads a grid written by write_pgm; tags are decoded via the palette.
GridMap read_pgm(const std::filesystem::path& path, double resolution);

void write_distance_pgm(const DistanceMap& dmap,
                        const std::filesystem::path& path);

/// Metadata sidecar: resolution, dimensions, palette, provenance and the
/// sibling file names.
void write_map_metadata(const GridMap& map, const std::filesystem::path& path,
                        const std::string& image, const std::string& distance,
                        const std::string& world);

/// Loads a map from its metadata sidecar (and the PGM it names).
GridMap load_map(const std::filesystem::path& metadata_path);

void write_world(const WorldDescriptor& world,
                 const std::filesystem::path& path);
WorldDescriptor read_world(const std::filesystem::path& path);

/// Writes <stem>.pgm, <stem>.dist.pgm, <stem>.yaml and <stem>.world.yaml.
/// Returns the written paths.
std::vector<std::filesystem::path> write_map_bundle(
    const GridMap& map, const std::filesystem::path& stem);

}  // namespace socnav
