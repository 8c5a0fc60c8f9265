#include "socnav/orca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socnav {

namespace {

constexpr double kEps = 1e-5;

double det(const Vec2& a, const Vec2& b) { return cross2(a, b); }

bool linear_program1(std::span<const OrcaLine> lines, std::size_t line_no,
                     double radius, const Vec2& opt, bool direction_opt,
                     Vec2& result) {
  const OrcaLine& line = lines[line_no];
  const double dot = line.point.dot(line.direction);
  const double disc = dot * dot + radius * radius - line.point.squaredNorm();
  if (disc < 0.0) return false;
  const double sqrt_disc = std::sqrt(disc);
  double t_left = -dot - sqrt_disc;
  double t_right = -dot + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denom = det(line.direction, lines[i].direction);
    const double numer = det(lines[i].direction, line.point - lines[i].point);
    if (std::abs(denom) <= kEps) {
      if (numer < 0.0) return false;
      continue;
    }
    const double t = numer / denom;
    if (denom >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = opt.dot(line.direction) > 0.0 ? Vec2(line.point + t_right * line.direction)
                                            : Vec2(line.point + t_left * line.direction);
  } else {
    const double t = line.direction.dot(opt - line.point);
    if (t < t_left) {
      result = line.point + t_left * line.direction;
    } else if (t > t_right) {
      result = line.point + t_right * line.direction;
    } else {
      result = line.point + t * line.direction;
    }
  }
  return true;
}

std::size_t linear_program2(std::span<const OrcaLine> lines, double radius,
                            const Vec2& opt, bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else if (opt.squaredNorm() > radius * radius) {
    result = opt.normalized() * radius;
  } else {
    result = opt;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 temp = result;
      if (!linear_program1(lines, i, radius, opt, direction_opt, result)) {
        result = temp;
        return i;
      }
    }
  }
  return lines.size();
}

void linear_program3(std::span<const OrcaLine> lines, std::size_t begin_line,
                     double radius, Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin_line; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) <= distance) continue;
    std::vector<OrcaLine> proj;
    proj.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      OrcaLine line;
      const double determinant = det(lines[i].direction, lines[j].direction);
      if (std::abs(determinant) <= kEps) {
        if (lines[i].direction.dot(lines[j].direction) > 0.0) continue;
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (det(lines[j].direction, lines[i].point - lines[j].point) /
                      determinant) *
                         lines[i].direction;
      }
      line.direction = (lines[j].direction - lines[i].direction).normalized();
      proj.push_back(line);
    }
    const Vec2 temp = result;
    const Vec2 opt(-lines[i].direction.y(), lines[i].direction.x());
    if (linear_program2(proj, radius, opt, true, result) < proj.size()) {
      // Only numerical issues land here; keep the previous result.
      result = temp;
    }
    distance = det(lines[i].direction, lines[i].point - result);
  }
}

}  // namespace

std::vector<OrcaLine> orca_constraints(const OrcaAgent& agent,
                                       std::span<const OrcaNeighbor> neighbors,
                                       double horizon, double dt) {
  std::vector<const OrcaNeighbor*> sorted;
  sorted.reserve(neighbors.size());
  for (const auto& n : neighbors) sorted.push_back(&n);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });

  const double inv_horizon = 1.0 / horizon;
  std::vector<OrcaLine> lines;
  lines.reserve(sorted.size());
  for (const OrcaNeighbor* other : sorted) {
    const Vec2 rel_pos = other->position - agent.position;
    const Vec2 rel_vel = agent.velocity - other->velocity;
    const double dist_sq = rel_pos.squaredNorm();
    const double combined = agent.radius + other->radius;
    const double combined_sq = combined * combined;

    OrcaLine line;
    Vec2 u;
    if (dist_sq > combined_sq) {
      const Vec2 w = rel_vel - inv_horizon * rel_pos;
      const double w_len_sq = w.squaredNorm();
      const double dot1 = w.dot(rel_pos);
      if (dot1 < 0.0 && dot1 * dot1 > combined_sq * w_len_sq) {
        // Cut-off circle.
        const double w_len = std::sqrt(w_len_sq);
        const Vec2 unit_w = w / w_len;
        line.direction = Vec2(unit_w.y(), -unit_w.x());
        u = (combined * inv_horizon - w_len) * unit_w;
      } else {
        const double leg = std::sqrt(dist_sq - combined_sq);
        if (det(rel_pos, w) > 0.0) {
          line.direction = Vec2(rel_pos.x() * leg - rel_pos.y() * combined,
                                rel_pos.x() * combined + rel_pos.y() * leg) /
                           dist_sq;
        } else {
          line.direction = -Vec2(rel_pos.x() * leg + rel_pos.y() * combined,
                                 -rel_pos.x() * combined + rel_pos.y() * leg) /
                           dist_sq;
        }
        u = rel_vel.dot(line.direction) * line.direction - rel_vel;
      }
    } else {
      // Already overlapping: resolve within one step.
      const double inv_dt = 1.0 / dt;
      const Vec2 w = rel_vel - inv_dt * rel_pos;
      const double w_len = w.norm();
      const Vec2 unit_w = w_len > 0.0 ? Vec2(w / w_len) : Vec2(1.0, 0.0);
      line.direction = Vec2(unit_w.y(), -unit_w.x());
      u = (combined * inv_dt - w_len) * unit_w;
    }
    const double share = other->reciprocal ? 0.5 : 1.0;
    line.point = agent.velocity + share * u;
    lines.push_back(line);
  }
  return lines;
}

Vec2 orca_velocity(const OrcaAgent& agent,
                   std::span<const OrcaNeighbor> neighbors, double horizon,
                   double dt) {
  const auto lines = orca_constraints(agent, neighbors, horizon, dt);
  Vec2 result = Vec2::Zero();
  const std::size_t fail =
      linear_program2(lines, agent.max_speed, agent.preferred, false, result);
  if (fail < lines.size()) linear_program3(lines, fail, agent.max_speed, result);
  const double n = result.norm();
  if (n > agent.max_speed) result *= agent.max_speed / n;
  return result;
}

}  // namespace socnav
