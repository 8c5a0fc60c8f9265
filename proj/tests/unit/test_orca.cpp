#include <socnav/orca.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace socnav;

namespace {

// Truncated velocity obstacle: moving at v from the origin touches the
// disc of radius r around p within the horizon.
bool in_vo(const Vec2& v, const Vec2& p, double r, double horizon) {
  const double vv = v.squaredNorm();
  double t = vv > 0.0 ? std::clamp(v.dot(p) / vv, 0.0, horizon) : 0.0;
  return (t * v - p).norm() < r;
}

}  // namespace

TEST(Orca, NoNeighborsReturnsPreferred) {
  OrcaAgent a;
  a.preferred = Vec2(1.1, -0.4);
  EXPECT_EQ(orca_velocity(a, {}, 2.0, 0.1), a.preferred);
}

TEST(Orca, PreferredClampedToMaxSpeed) {
  OrcaAgent a;
  a.preferred = Vec2(3.0, 4.0);
  a.max_speed = 2.0;
  const Vec2 v = orca_velocity(a, {}, 2.0, 0.1);
  EXPECT_NEAR(v.norm(), 2.0, 1e-12);
}

TEST(Orca, HeadOnSymmetry) {
  OrcaAgent a, b;
  a.position = Vec2(-2.0, 0.05);
  b.position = Vec2(2.0, -0.05);
  a.velocity = a.preferred = Vec2(1.3, 0.0);
  b.velocity = b.preferred = Vec2(-1.3, 0.0);
  const OrcaNeighbor na{1, b.position, b.velocity, b.radius, true};
  const OrcaNeighbor nb{0, a.position, a.velocity, a.radius, true};
  const Vec2 va = orca_velocity(a, std::span(&na, 1), 2.0, 0.1);
  const Vec2 vb = orca_velocity(b, std::span(&nb, 1), 2.0, 0.1);
  EXPECT_GT(std::abs(va.y()), 1e-3);
  EXPECT_NEAR(va.y(), -vb.y(), 1e-12);
  EXPECT_NEAR(va.x(), -vb.x(), 1e-12);
}

TEST(Orca, StaticNeighborMatchesBruteForce) {
  OrcaAgent a;
  a.radius = 0.3;
  a.preferred = Vec2(1.3, 0.0);
  a.velocity = a.preferred;
  const OrcaNeighbor n{1, Vec2(1.0, 0.0), Vec2::Zero(), 0.3, false};
  const double horizon = 2.0;
  const Vec2 v = orca_velocity(a, std::span(&n, 1), horizon, 0.1);

  // Coarse 100x100 scan of the speed disc, then a fine 100x100 scan around
  // the best coarse candidate.
  const double r = 0.6;
  auto best_in = [&](Vec2 lo, double span) {
    Vec2 best = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) {
        const Vec2 c = lo + Vec2(i, j) * (span / 99.0);
        if (c.norm() > a.max_speed || in_vo(c, n.position, r, horizon)) continue;
        const double d = (c - a.preferred).norm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
    }
    return best;
  };
  const Vec2 coarse = best_in(Vec2(-2.0, -2.0), 4.0);
  const Vec2 fine = best_in(coarse - Vec2(0.05, 0.05), 0.1);
  ASSERT_TRUE(is_finite(fine));
  EXPECT_LT((v - fine).norm(), 1e-2) << v.transpose() << " vs " << fine.transpose();
  EXPECT_FALSE(in_vo(v * (1.0 + 1e-6), n.position, r - 1e-6, horizon));
}

TEST(Orca, DeterministicUnderNeighborOrder) {
  OrcaAgent a;
  a.preferred = a.velocity = Vec2(1.0, 0.2);
  std::vector<OrcaNeighbor> ns{{3, {1.2, 0.4}, {-0.5, 0}, 0.3, true},
                               {1, {0.9, -0.5}, {0, 0.4}, 0.3, true},
                               {2, {2.0, 0.0}, {-1, 0}, 0.3, true}};
  const Vec2 v1 = orca_velocity(a, ns, 2.0, 0.1);
  std::reverse(ns.begin(), ns.end());
  EXPECT_EQ(orca_velocity(a, ns, 2.0, 0.1), v1);
}

TEST(Orca, InfeasibleStaysBounded) {
  OrcaAgent a;
  a.preferred = Vec2(1.0, 0.0);
  std::vector<OrcaNeighbor> ns;
  for (int k = 0; k < 8; ++k) {
    const double t = k * kPi / 4.0;
    ns.push_back({k, Vec2(0.55 * std::cos(t), 0.55 * std::sin(t)), Vec2::Zero(), 0.3, false});
  }
  const Vec2 v = orca_velocity(a, ns, 2.0, 0.1);
  EXPECT_TRUE(is_finite(v));
  EXPECT_LE(v.norm(), a.max_speed + 1e-9);
}
