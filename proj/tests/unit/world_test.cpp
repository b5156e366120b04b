#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rico/tactile.hpp"
#include "rico/world.hpp"

using namespace rico;

namespace {

WorldState at_pose(double x, double y, double th) {
  WorldState w;
  w.robot = {x, y, th};
  return w;
}

}  // namespace

TEST(Step, ZeroCommandOnlyAdvancesClock) {
  WorldState w = at_pose(1, 2, 0.5);
  WorldState n = step(w, 0.1);
  EXPECT_EQ(n.robot, w.robot);
  EXPECT_DOUBLE_EQ(n.clock, 0.1);
  n.clock = w.clock;
  EXPECT_EQ(n, w);
}

TEST(Step, StraightLine) {
  WorldState w = command_base(at_pose(0, 0, 0), 1.0, 0.0);
  // dt is capped at 0.1, so half a second takes five steps.
  for (int i = 0; i < 5; ++i) w = step(w, 0.1);
  EXPECT_NEAR(w.robot.x, 0.5, 1e-12);
  EXPECT_NEAR(w.robot.y, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(w.robot.theta, 0.0);
}

TEST(Step, MatchesFineStepIntegration) {
  WorldState w = command_base(at_pose(0, 0, 0), 0.5, 1.0);
  for (int i = 0; i < 100; ++i) w = step(w, 0.01);
  const Pose fine = oracle::integrate({0, 0, 0}, 0.5, 1.0, 0.01, 100, 10);
  // Forward Euler is first order: the gap to the fine solution after one
  // second is about v * w * dt / 2.
  EXPECT_NEAR(w.robot.x, fine.x, 5e-3);
  EXPECT_NEAR(w.robot.y, fine.y, 5e-3);
  EXPECT_NEAR(w.robot.theta, fine.theta, 1e-9);
}

TEST(Step, RejectsBadDtWithoutSideEffects) {
  const WorldState w = command_base(at_pose(0, 0, 0), 0.3, 0.0);
  EXPECT_THROW(step(w, 0.0), WorldError);
  EXPECT_THROW(step(w, 0.2), WorldError);
  EXPECT_THROW(step(w, std::nan("")), WorldError);
  EXPECT_THROW(step(w, INFINITY), WorldError);
  WorldState bad = w;
  bad.base_cmd.v = std::nan("");
  EXPECT_THROW(step(bad, 0.1), WorldError);
}

TEST(Step, ThetaStaysNormalized) {
  WorldState w = command_base(at_pose(0, 0, 3.1), 0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    w = step(w, 0.1);
    ASSERT_GT(w.robot.theta, -std::numbers::pi);
    ASSERT_LE(w.robot.theta, std::numbers::pi);
  }
  w = command_base(w, 0.0, -1.5);
  for (int i = 0; i < 500; ++i) {
    w = step(w, 0.1);
    ASSERT_GT(w.robot.theta, -std::numbers::pi);
    ASSERT_LE(w.robot.theta, std::numbers::pi);
  }
}

TEST(Step, ClampsAtObstacleAndFlagsCollision) {
  WorldState w = at_pose(0, 0, 0);
  w.obstacles.push_back({{1.0, -1.0}, {2.0, 1.0}});
  w = command_base(w, 1.0, 0.0);
  bool collided = false;
  for (int i = 0; i < 30; ++i) {
    w = step(w, 0.1);
    collided |= w.collided;
    ASSERT_TRUE(disc_free(w, w.robot.position()));
  }
  EXPECT_TRUE(collided);
  EXPECT_NEAR(w.robot.x, 1.0 - w.limits.radius, 1e-6);
}

TEST(Step, RandomDrivingNeverOverlapsObstacles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(-1.0, 1.0), om(-1.5, 1.5);
  WorldState w = at_pose(0, 0, 0);
  w.obstacles = {{{0.8, -0.5}, {1.4, 0.5}}, {{-2, 1}, {2, 1.3}}, {{-1.5, -2}, {-1.0, -0.6}}};
  for (int i = 0; i < 5000; ++i) {
    if (i % 20 == 0) w = command_base(w, v(rng), om(rng));
    w = step(w, 0.05);
    // Sample the robot boundary against every rectangle's interior.
    for (int k = 0; k < 64; ++k) {
      const double a = 2 * std::numbers::pi * k / 64;
      const Vec2 p = w.robot.position() + Vec2{std::cos(a), std::sin(a)} * (w.limits.radius - 1e-9);
      for (const Rect& r : w.obstacles) ASSERT_FALSE(r.contains_strict(p)) << "step " << i;
    }
  }
}

TEST(Step, Deterministic) {
  auto run = [] {
    WorldState w = at_pose(0, 0, 0);
    w.obstacles = {{{1, -1}, {1.5, 1}}};
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
      w = command_base(w, (rng() % 200) / 100.0 - 1.0, (rng() % 300) / 100.0 - 1.5);
      w = step(w, 0.1);
    }
    return w;
  };
  EXPECT_EQ(run(), run());
}

TEST(Command, BaseClamps) {
  const WorldState w;
  EXPECT_EQ(command_base(w, 0.3, 0.0).base_cmd, (BaseCommand{0.3, 0.0}));
  EXPECT_EQ(command_base(w, 99, 0).base_cmd, (BaseCommand{1.0, 0.0}));
  EXPECT_EQ(command_base(w, -2.0, -9.0).base_cmd, (BaseCommand{-1.0, -1.5}));
  EXPECT_THROW(command_base(w, INFINITY, 0), WorldError);
}

TEST(Command, HeadClamps) {
  const WorldState w;
  EXPECT_EQ(command_head(w, 0, 0).head, (HeadPose{0, 0}));
  EXPECT_EQ(command_head(w, 5.0, 0).head, (HeadPose{1.3, 0}));
  EXPECT_EQ(command_head(w, -5.0, -5.0).head, (HeadPose{-1.3, -0.98}));
  EXPECT_EQ(command_head(w, 0, 5.0).head, (HeadPose{0, 0.72}));
  EXPECT_THROW(command_head(w, std::nan(""), 0), WorldError);
}

TEST(Inject, PersonFallAndRespond) {
  WorldState w;
  w.persons.push_back({"p1", {1, 1}});
  w = inject_event(w, PersonFall{"p1"});
  EXPECT_TRUE(w.find_person("p1")->fallen);
  w = inject_event(w, PersonRespond{"p1", false});
  EXPECT_FALSE(w.find_person("p1")->responsive);
  EXPECT_THROW(inject_event(w, PersonFall{"ghost"}), WorldError);
}

TEST(Inject, PlaceOnTableChangesTactileReading) {
  WorldState w;
  const PressureGrid before = read_tactile(w);
  PlaceObject e;
  e.object.id = "mug";
  e.object.kind = ObjectKind::Mug;
  e.object.mass = 0.3;
  e.object.footprint_radius = 0.03;
  e.on_table = TileCoord{7, 7};
  w = inject_event(w, e);
  ASSERT_TRUE(w.find_object("mug")->on_table());
  EXPECT_EQ(*w.find_object("mug")->table_position, w.table.tile_center(7, 7));
  const PressureGrid after = read_tactile(step(w, 0.1));
  EXPECT_NE(after.forces, before.forces);
  // Oracle: the object's mass, spread over the tiles whose centres are in its disc.
  int covered = 0;
  for (int r = 0; r < w.table.rows; ++r)
    for (int c = 0; c < w.table.cols; ++c)
      if (distance(w.table.tile_center(r, c), w.table.tile_center(7, 7)) <= 0.03) ++covered;
  for (int r = 0; r < w.table.rows; ++r)
    for (int c = 0; c < w.table.cols; ++c) {
      const bool in = distance(w.table.tile_center(r, c), w.table.tile_center(7, 7)) <= 0.03;
      EXPECT_NEAR(after.at(r, c), in ? 0.3 * 9.80665 / covered : 0.0, 1e-12);
    }
}

TEST(Inject, RejectsBadObjects) {
  WorldState w;
  PlaceObject e;
  e.object.id = "x";
  EXPECT_THROW(inject_event(w, e), WorldError);  // neither location
  e.at_position = Vec2{1, 1};
  e.object.mass = -1;
  EXPECT_THROW(inject_event(w, e), WorldError);
  e.object.mass = 0.1;
  e.object.surface_temperature = -41;
  EXPECT_THROW(inject_event(w, e), WorldError);
  e.object.surface_temperature = 20;
  w = inject_event(w, e);
  EXPECT_THROW(inject_event(w, e), WorldError);  // duplicate id
}

TEST(Inject, RemoveUnknownLeavesStateUnchanged) {
  WorldState w;
  SimObject cup;
  cup.id = "cup";
  w.objects.push_back(cup);
  const WorldState copy = w;
  EXPECT_THROW(inject_event(w, RemoveObject{"nope"}), WorldError);
  EXPECT_EQ(w, copy);
  EXPECT_TRUE(inject_event(w, RemoveObject{"cup"}).objects.empty());
}

TEST(Inject, SpeakQueuesUtterance) {
  WorldState w;
  w.clock = 3.0;
  w.persons.push_back({"anna", {1, 0}});
  w = inject_event(w, Speak{"anna", "hello"});
  ASSERT_EQ(w.pending_speech.size(), 1u);
  EXPECT_EQ(w.pending_speech[0], (Utterance{"anna", "hello", 3.0}));
}

TEST(Geometry, NormalizeAngle) {
  EXPECT_DOUBLE_EQ(normalize_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(normalize_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
}

TEST(Geometry, SegmentRectAgreesWithEdgeOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  int touching = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const Rect r{{-1, -0.5}, {0.7, 1.2}};
    const bool expect = oracle::segment_touches_rect(a, b, r);
    EXPECT_EQ(segment_rect_distance(a, b, r) == 0.0, expect) << a.x << "," << a.y << " " << b.x << "," << b.y;
    touching += expect;
  }
  EXPECT_GT(touching, 1000);
}
