#pragma once

#include "socnav/geometry.hpp"
#include "socnav/robot.hpp"
#include "socnav/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace socnav {

struct AgentSample {
  std::int32_t id = 0;
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double heading = 0.0;
  SocialState state = SocialState::Walking;

  friend bool operator==(const AgentSample&, const AgentSample&) = default;
};

/// Behavior flags recorded per tick.
enum TickFlags : std::uint8_t {
  kFlagTriggered = 1,  // intermediate planner behavior active
  kFlagFallback = 2,   // behavior geometry infeasible, neutral used
  kFlagStopped = 4,    // controller found no safe sample
};

struct TraceTick {
  double time = 0.0;
  Pose2 robot;
  double robot_vx = 0.0, robot_vy = 0.0, robot_omega = 0.0;
  VelocityCommand command;
  std::uint8_t flags = 0;
  std::vector<AgentSample> agents;

  friend bool operator==(const TraceTick& a, const TraceTick& b) {
    return a.time == b.time && a.robot.x == b.robot.x && a.robot.y == b.robot.y &&
           a.robot.theta == b.robot.theta && a.robot_vx == b.robot_vx &&
           a.robot_vy == b.robot_vy && a.robot_omega == b.robot_omega &&
           a.command == b.command && a.flags == b.flags && a.agents == b.agents;
  }
};

enum class CollisionKind : std::uint8_t { Pedestrian = 0, Static = 1 };

struct CollisionEvent {
  double time = 0.0;
  CollisionKind kind = CollisionKind::Pedestrian;
  std::int32_t other = -1;  // agent id, -1 for static geometry

  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

enum class EndReason : std::uint8_t { GoalReached, Timeout, CollisionAbort, Running };

std::string_view end_reason_name(EndReason r);

struct TraceHeader {
  std::string stage;
  std::string planner;
  std::string robot;
  std::int64_t episode = 0;
  std::uint64_t seed = 0;
  double dt = 0.1;
  Vec2 start = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  double goal_tolerance = 0.5;
  double footprint_radius = 0.3;
  double pedestrian_radius = 0.3;
  double timeout = 180.0;
  std::string config_hash;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct EpisodeTrace {
  TraceHeader header;
  std::vector<TraceTick> ticks;
  std::vector<CollisionEvent> collisions;
  EndReason end = EndReason::Running;

  /// FNV-1a over every tick and collision event.
  std::uint64_t trajectory_hash() const;
  double duration() const { return static_cast<double>(ticks.size()) * header.dt; }
};

/// Length-prefixed binary records with a checksum trailer.
std::vector<unsigned char> encode_trace(const EpisodeTrace& trace);
/// Throws TraceCorrupt on bad magic, truncation or checksum mismatch.
EpisodeTrace decode_trace(std::span<const unsigned char> bytes);

void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path);
EpisodeTrace read_trace(const std::filesystem::path& path);

/// Debounced contact tracker: an event fires on contact entry while armed;
/// the contact re-arms after `rearm` seconds of continuous separation.
class CollisionMonitor {
 public:
  explicit CollisionMonitor(double rearm = 1.0) : rearm_(rearm) {}

  struct Contact {
    CollisionKind kind;
    std::int32_t other;
  };

  /// `contacts` lists everything touching the robot at `time`.
  std::vector<CollisionEvent> update(double time, const std::vector<Contact>& contacts);

 private:
  struct Key {
    CollisionKind kind;
    std::int32_t other;
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  struct Status {
    bool touching = false;
    bool armed = true;
    double separated_since = 0.0;
  };
  double rearm_;
  std::map<Key, Status> status_;
};

}  // namespace socnav
