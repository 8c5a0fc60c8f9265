#pragma once

#include "socnav/config.hpp"
#include "socnav/global_planner.hpp"
#include "socnav/world.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace socnav {

/// Obstacles and pedestrians produced by one placement pass.
struct Placement {
  std::vector<StaticObstacle> statics;
  std::vector<AgentState> agents;
};

/// Initial conditions of one episode.
struct EpisodeSetup {
  std::string stage;
  int episode = 0;
  std::uint64_t seed = 0;
  WorldState world;
  /// Map before static obstacles were rasterized.
  std::shared_ptr<const GridMap> base_map;
  Pose2 start;
  Vec2 goal = Vec2::Zero();
  std::vector<Zone> forbidden;
  /// Hash of static obstacles and initial pedestrians.
  std::uint64_t obstacle_hash = 0;
};

/// Random static obstacles and pedestrians. Every placement lands on a free
/// cell outside `forbidden`, clear of the others. Throws PlacementExhausted.
Placement spawn_random_obstacles(const ObstacleMode& mode, const GridMap& map,
                                 std::span<const Zone> forbidden, double pedestrian_radius,
                                 const SocialStateParams& social, Rng& rng);

/// Builds the stage map for a seed.
GridMap build_map(const MapSpec& spec, std::uint64_t seed);

/// Hash of a placement (statics, then agent spawn data).
std::uint64_t placement_hash(const std::vector<StaticObstacle>& statics,
                             std::span<const AgentState> agents);

/// Episode factory for one stage. reset() is const and may be called from
/// several threads.
class TaskGenerator {
 public:
  TaskGenerator(StageSpec stage, std::uint64_t seed_base, RobotConfig robot);

  EpisodeSetup reset(int episode_index) const;

  const StageSpec& stage() const { return stage_; }
  std::uint64_t seed_base() const { return seed_base_; }
  std::uint64_t episode_seed(int episode_index) const {
    return seed_base_ + static_cast<std::uint64_t>(episode_index);
  }

 private:
  struct Task {
    Pose2 start;
    Vec2 goal;
  };
  std::shared_ptr<const GridMap> map_for(int episode_index) const;
  Task robot_task(int episode_index, const GridMap& map, const Task* previous,
                  std::span<const Vec2> avoid) const;

  StageSpec stage_;
  std::uint64_t seed_base_;
  RobotConfig robot_;
  std::shared_ptr<const GridMap> static_map_;
};

}  // namespace socnav
