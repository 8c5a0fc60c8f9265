#include "socnav/types.hpp"

#include <array>

namespace socnav {

namespace {

constexpr std::array<std::string_view, kSocialStateCount> kStateNames = {
    "standing", "walking",      "running",             "robot_avoidance",
    "texting",  "group_talking", "interested_in_robot", "phone_talking",
};

constexpr std::array<std::string_view, 7> kPluginNames = {
    "passthrough", "spinny", "pysocial", "evacuation",
    "bonding",     "orca",   "custom",
};

constexpr std::array<std::string_view, 3> kKinematicsNames = {
    "holonomic", "differential", "ackermann"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names,
                        std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view state_name(SocialState s) {
  return kStateNames[static_cast<std::size_t>(s)];
}
std::optional<SocialState> state_from_name(std::string_view name) {
  return lookup<SocialState>(kStateNames, name);
}

std::string_view plugin_name(PluginKind k) {
  return kPluginNames[static_cast<std::size_t>(k)];
}
std::optional<PluginKind> plugin_from_name(std::string_view name) {
  auto k = lookup<PluginKind>(kPluginNames, name);
  if (k == PluginKind::Custom) return std::nullopt;
  return k;
}

std::string_view kinematics_name(Kinematics k) {
  return kKinematicsNames[static_cast<std::size_t>(k)];
}
std::optional<Kinematics> kinematics_from_name(std::string_view name) {
  return lookup<Kinematics>(kKinematicsNames, name);
}

}  // namespace socnav
