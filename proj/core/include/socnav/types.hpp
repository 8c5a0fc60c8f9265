#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace socnav {

/// Pedestrian social state. Ordinals are part of the semantic-layer encoding
/// and the trace format; do not reorder.
enum class SocialState : std::uint8_t {
  Standing = 0,
  Walking = 1,
  Running = 2,
  RobotAvoidance = 3,
  Texting = 4,
  GroupTalking = 5,
  InterestedInRobot = 6,
  PhoneTalking = 7,
};

inline constexpr int kSocialStateCount = 8;

std::string_view state_name(SocialState s);
std::optional<SocialState> state_from_name(std::string_view name);

/// Built-in force models; Custom refers to a plugin registered by name.
enum class PluginKind : std::uint8_t {
  Passthrough,
  Spinny,
  PySocial,
  Evacuation,
  Bonding,
  Orca,
  Custom,
};

std::string_view plugin_name(PluginKind k);
std::optional<PluginKind> plugin_from_name(std::string_view name);

enum class Kinematics : std::uint8_t { Holonomic, Differential, Ackermann };

std::string_view kinematics_name(Kinematics k);
std::optional<Kinematics> kinematics_from_name(std::string_view name);

}  // namespace socnav
