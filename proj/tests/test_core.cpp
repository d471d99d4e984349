#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "swarmlab/core.hpp"

using namespace swarmlab;

namespace {

TrajectoryLog sampled(double dt, int frames, Vec2 (*p)(double)) {
  std::vector<double> t;
  std::vector<Frame> f;
  for (int k = 0; k < frames; ++k) {
    t.push_back(k * dt);
    f.push_back({{p(k * dt), std::nullopt, 0.0}});
  }
  return TrajectoryLog(t, f, dt);
}

Vec2 unit_circle(double t) { return {std::cos(t), std::sin(t)}; }
Vec2 line(double t) { return {t, 2.0 * t}; }
Vec2 wiggle(double t) { return {std::sin(t), std::cos(2.0 * t)}; }

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3.0 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(2.5 * std::numbers::pi) == doctest::Approx(0.5 * std::numbers::pi));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(u(rng));
    CHECK(w > -std::numbers::pi);
    CHECK(w <= std::numbers::pi);
  }
}

TEST_CASE("AgentState validation") {
  CHECK_NOTHROW(AgentState{{1.0, 2.0}, std::numbers::pi, 0.0}.validate());
  CHECK_NOTHROW(AgentState{{1.0, 2.0}, std::nullopt, 0.3}.validate());
  CHECK_THROWS_AS(AgentState({{NAN, 0.0}, std::nullopt, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(AgentState({{0.0, INFINITY}, std::nullopt, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(AgentState({{0.0, 0.0}, -std::numbers::pi, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(AgentState({{0.0, 0.0}, 4.0, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(AgentState({{0.0, 0.0}, std::nullopt, -0.1}).validate(), ValidationError);
}

TEST_CASE("TrajectoryLog enforces its invariants") {
  const Frame one = {{{0, 0}, std::nullopt, 0.0}};
  const Frame two = {{{0, 0}, std::nullopt, 0.0}, {{1, 0}, std::nullopt, 0.0}};
  CHECK_NOTHROW(TrajectoryLog({0.0, 0.1, 0.2}, {one, one, one}, 0.1));
  CHECK_THROWS_AS(TrajectoryLog({}, {}, 0.1), ValidationError);
  CHECK_THROWS_AS(TrajectoryLog({0.0}, {one, one}, 0.1), ValidationError);
  CHECK_THROWS_AS(TrajectoryLog({0.0, 0.1}, {one, two}, 0.1), ValidationError);
  CHECK_THROWS_AS(TrajectoryLog({0.0, 0.0}, {one, one}, 0.0), ValidationError);
  CHECK_THROWS_AS(TrajectoryLog({0.0, 0.2, 0.1}, {one, one, one}, 0.0), ValidationError);
  CHECK_THROWS_AS(TrajectoryLog({0.0, 0.1, 0.25}, {one, one, one}, 0.1), ValidationError);
  CHECK_NOTHROW(TrajectoryLog({0.0, 0.1, 0.25}, {one, one, one}, 0.0));
  CHECK_THROWS_AS(TrajectoryLog({0.0}, {Frame{}}, 0.0), ValidationError);
}

TEST_CASE("finite differences: single frame is rejected") {
  const TrajectoryLog log({0.0}, {{{{0, 0}, std::nullopt, 0.0}}}, 0.0);
  CHECK_THROWS_WITH_AS(finite_difference_velocities(log), "insufficient frames for kinematics", ValidationError);
}

TEST_CASE("finite differences: unit circle velocity at t = 0") {
  const auto vel = finite_difference_velocities(sampled(1e-3, 50, unit_circle));
  CHECK(std::abs(vel[0][0].x - 0.0) <= 1e-5);
  CHECK(std::abs(vel[0][0].y - 1.0) <= 1e-5);
  CHECK(vel.size() == 50);
}

TEST_CASE("finite differences: constant positions give exact zeros") {
  std::vector<double> t = {0.0, 0.013, 0.1, 0.37, 0.5};
  std::vector<Frame> f(t.size(), Frame{{{0.3, -7.1}, std::nullopt, 0.0}, {{1e6, 1e-6}, std::nullopt, 0.0}});
  for (const auto& frame : finite_difference_velocities(TrajectoryLog(t, f, 0.0))) {
    for (const auto& v : frame) {
      CHECK(v.x == 0.0);
      CHECK(v.y == 0.0);
    }
  }
}

TEST_CASE("finite differences: linear motion is reproduced exactly on a dyadic grid") {
  for (const auto& frame : finite_difference_velocities(sampled(0.125, 20, line))) {
    CHECK(frame[0].x == 1.0);
    CHECK(frame[0].y == 2.0);
  }
  for (const auto& frame : finite_difference_velocities(sampled(0.1, 20, line))) {
    CHECK(frame[0].x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(frame[0].y == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("finite differences: two frames fall back to the forward difference") {
  const auto vel = finite_difference_velocities(sampled(0.5, 2, line));
  CHECK(vel[0][0] == Vec2{1.0, 2.0});
  CHECK(vel[1][0] == Vec2{1.0, 2.0});
}

TEST_CASE("finite differences: interior error shrinks as dt^2") {
  // Same physical instant t = 1 on both grids.
  auto error_at_one = [](double dt) {
    const int k = static_cast<int>(std::lround(1.0 / dt));
    const auto vel = finite_difference_velocities(sampled(dt, 2 * k + 1, wiggle));
    const Vec2 exact{std::cos(1.0), -2.0 * std::sin(2.0)};
    return (vel[k][0] - exact).norm();
  };
  for (double dt : {0.1, 0.05, 0.02}) {
    const double ratio = error_at_one(dt) / error_at_one(dt / 2.0);
    CHECK(ratio >= 4.0 / 1.5);
    CHECK(ratio <= 4.0 * 1.5);
  }
}

TEST_CASE("finite differences: end estimates are second order too") {
  auto end_error = [](double dt) {
    const auto vel = finite_difference_velocities(sampled(dt, 40, wiggle));
    return (vel[0][0] - Vec2{1.0, 0.0}).norm();
  };
  const double ratio = end_error(0.02) / end_error(0.01);
  CHECK(ratio >= 4.0 / 1.5);
  CHECK(ratio <= 4.0 * 1.5);
}

TEST_CASE("finite differences commute with translation exactly") {
  // Dyadic coordinates keep every sum exact, so equality is bitwise.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cell(-4096, 4096);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t;
    std::vector<Frame> a, b;
    const Vec2 shift{cell(rng) / 64.0, cell(rng) / 64.0};
    for (int k = 0; k < 12; ++k) {
      t.push_back(k * 0.25);
      Frame fa, fb;
      for (int i = 0; i < 4; ++i) {
        const Vec2 p{cell(rng) / 1024.0, cell(rng) / 1024.0};
        fa.push_back({p, std::nullopt, 0.0});
        fb.push_back({p + shift, std::nullopt, 0.0});
      }
      a.push_back(fa);
      b.push_back(fb);
    }
    const auto va = finite_difference_velocities(TrajectoryLog(t, a, 0.25));
    const auto vb = finite_difference_velocities(TrajectoryLog(t, b, 0.25));
    CHECK(va == vb);
  }
}

TEST_CASE("coupling names round-trip") {
  for (auto c : {Coupling::rigid_single_body, Coupling::none_feedforward, Coupling::local_feedback,
                 Coupling::global_information}) {
    CHECK(coupling_from_string(to_string(c)) == c);
  }
  CHECK_THROWS_AS(coupling_from_string("telepathy"), ValidationError);
}

TEST_CASE("context JSON: round trip, normalization, rejection") {
  ContextDescriptor ctx;
  ctx.n_components = 12;
  ctx.scope_label = "tank";
  ctx.resolution_label = "fish";
  ctx.coupling = Coupling::local_feedback;
  ctx.has_control_input = true;
  ctx.dynamics_family = "dubins_binary_sensor";
  ctx.dynamics_params = {{"speed", 1.0}, {"agent.0.speed", 1.0}};
  CHECK(context_from_json(context_to_json(ctx)) == ctx);

  auto j = context_to_json(ctx);
  CHECK(j.size() == 11);
  for (const char* key : {"n_components", "scope_label", "resolution_label", "coupling", "has_control_input",
                          "uses_latent_state", "group_goal_aware", "leader_present", "time_varying_context",
                          "dynamics_family", "dynamics_params"}) {
    CHECK(j.contains(key));
  }

  auto rigid = j;
  rigid["coupling"] = "rigid_single_body";
  CHECK(context_from_json(rigid).n_components == 1);

  auto extra = j;
  extra["leader"] = true;
  CHECK_THROWS_AS(context_from_json(extra), ValidationError);
  auto bad_family = j;
  bad_family["dynamics_family"] = "boids";
  CHECK_THROWS_AS(context_from_json(bad_family), ValidationError);
  auto zero = j;
  zero["n_components"] = 0;
  CHECK_THROWS_AS(context_from_json(zero), ValidationError);
  auto missing = j;
  missing.erase("coupling");
  CHECK_THROWS_AS(context_from_json(missing), ValidationError);
  auto wrong_type = j;
  wrong_type["has_control_input"] = "yes";
  CHECK_THROWS_AS(context_from_json(wrong_type), ValidationError);
}

TEST_CASE("shipped context files load") {
  const std::string dir = std::string(SWARMLAB_DATA_DIR) + "/contexts/";
  for (const char* name : {"merry_go_round", "feedforward_field", "dubins_binary_sensor", "distributed_formation",
                           "ducky_derby", "drone_show", "murmuration"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_context(dir + name + ".json"));
  }
  CHECK(load_context(dir + "merry_go_round.json").effective_components() == 1);
  CHECK_THROWS_AS(load_context(dir + "does_not_exist.json"), ValidationError);
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(NAN) == "nan");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("trajectory CSV round trip") {
  std::mt19937_64 rng(9);
  std::vector<double> t;
  std::vector<Frame> frames;
  for (int k = 0; k < 10; ++k) {
    t.push_back(k * 0.01);
    frames.push_back(oracle::random_frame(rng, 5));
  }
  frames[3][2].heading.reset();
  const TrajectoryLog log(t, frames, 0.01);

  std::stringstream ss;
  write_trajectory_csv(ss, log);
  const std::string text = ss.str();
  CHECK(text.rfind("t,agent_id,x,y,heading,body_radius\n", 0) == 0);
  CHECK(text.find("0.03,2,") != std::string::npos);

  std::istringstream in(text);
  const TrajectoryLog back = read_trajectory_csv(in);
  CHECK(back.frames() == log.frames());
  CHECK(back.timestamps() == log.timestamps());
  CHECK(back.dt() == doctest::Approx(0.01));

  std::stringstream again;
  write_trajectory_csv(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("trajectory CSV: irregular steps read back as variable-step") {
  std::istringstream in("t,agent_id,x,y,heading,body_radius\n0,0,0,0,,0\n0.1,0,1,0,,0\n0.3,0,2,0,,0\n");
  const TrajectoryLog log = read_trajectory_csv(in);
  CHECK(log.dt() == 0.0);
  CHECK(log.frame_count() == 3);
  CHECK_FALSE(log.frames()[0][0].heading.has_value());
}

TEST_CASE("trajectory CSV: malformed input") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_trajectory_csv(in);
  };
  CHECK_THROWS_AS(parse(""), ValidationError);
  CHECK_THROWS_AS(parse("t,id,x,y\n"), ValidationError);
  CHECK_THROWS_AS(parse("t,agent_id,x,y,heading,body_radius\n"), ValidationError);
  CHECK_THROWS_AS(parse("t,agent_id,x,y,heading,body_radius\n0,0,1,2\n"), ValidationError);
  CHECK_THROWS_AS(parse("t,agent_id,x,y,heading,body_radius\n0,0,abc,2,,0\n"), ValidationError);
  CHECK_THROWS_AS(parse("t,agent_id,x,y,heading,body_radius\n0,1,0,0,,0\n"), ValidationError);
  CHECK_THROWS_AS(parse("t,agent_id,x,y,heading,body_radius\n0,0,0,0,,-1\n"), ValidationError);
}
