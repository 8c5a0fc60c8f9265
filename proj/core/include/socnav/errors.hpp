#pragma once

#include <stdexcept>
#include <string>

namespace socnav {

/// Base of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A force plugin produced NaN or infinity.
class NonFiniteForce : public Error {
 public:
  explicit NonFiniteForce(int agent_id)
      : Error("non-finite force for agent " + std::to_string(agent_id)),
        agent_id(agent_id) {}
  int agent_id;
};

class MissingLeader : public Error {
 public:
  explicit MissingLeader(int group_id)
      : Error("group " + std::to_string(group_id) + " has no leader"),
        group_id(group_id) {}
  int group_id;
};

class PlacementExhausted : public Error {
 public:
  PlacementExhausted(std::string what_failed, std::string parameter)
      : Error("placement exhausted: " + what_failed + " (parameter '" +
              parameter + "')"),
        parameter(std::move(parameter)) {}
  std::string parameter;
};

class StaleFrame : public Error {
 public:
  using Error::Error;
};

class UnreachableGoal : public Error {
 public:
  using Error::Error;
};

class SpawnCollision : public Error {
 public:
  using Error::Error;
};

class StageOutOfRange : public Error {
 public:
  using Error::Error;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

class TraceCorrupt : public Error {
 public:
  using Error::Error;
};

/// Config validation failure with the offending location.
class ConfigError : public Error {
 public:
  ConfigError(std::string file, int line, std::string field,
              std::string message)
      : Error(format(file, line, field, message)),
        file(std::move(file)),
        line(line),
        field(std::move(field)) {}

  std::string file;
  int line;  // 1-based, 0 when unknown
  std::string field;

 private:
  static std::string format(const std::string& file, int line,
                            const std::string& field,
                            const std::string& message) {
    std::string s = file.empty() ? std::string("<config>") : file;
    if (line > 0) s += ":" + std::to_string(line);
    if (!field.empty()) s += ": field '" + field + "'";
    return s + ": " + message;
  }
};

/// A plugin or planner name that is not registered. Raised while loading
/// configs, so it carries the config location when known.
class UnknownPlugin : public ConfigError {
 public:
  explicit UnknownPlugin(const std::string& name, std::string file = "", int line = 0,
                         std::string field = "plugin")
      : ConfigError(std::move(file), line, std::move(field), "unknown plugin '" + name + "'"),
        name(name) {}
  std::string name;
};

}  // namespace socnav
