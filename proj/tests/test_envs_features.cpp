#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "stlfd/envs.hpp"
#include "stlfd/features.hpp"
#include "stlfd/record.hpp"
#include "stlfd/stl/parser.hpp"
#include "stlfd/stl/robustness.hpp"

using namespace stlfd;

namespace {

// Smallest k such that some k-action sequence that never enters a blocked
// cell ends at `goal`, by expanding the set of states reachable in exactly
// k steps; -1 when no such k exists.
int layered_search(const Environment& env, StateId start, StateId goal) {
  std::set<StateId> frontier{start};
  for (int k = 0; k <= env.num_states(); ++k) {
    if (frontier.count(goal) != 0) return k;
    std::set<StateId> next;
    for (StateId s : frontier) {
      for (ActionId a = 0; a < env.num_actions(); ++a) {
        const StateId n = env.step(s, a);
        if (!env.is_blocked(n)) next.insert(n);
      }
    }
    frontier = std::move(next);
  }
  return -1;
}

GridEnv random_grid(std::mt19937_64& rng) {
  const int rows = std::uniform_int_distribution<int>(2, 7)(rng);
  const int cols = std::uniform_int_distribution<int>(2, 7)(rng);
  std::uniform_int_distribution<int> r(0, rows - 1);
  std::uniform_int_distribution<int> c(0, cols - 1);
  const Cell start{r(rng), c(rng)};
  Cell goal{r(rng), c(rng)};
  while (goal == start) goal = {r(rng), c(rng)};
  std::vector<Cell> obstacles;
  for (int i = 0; i < rows * cols / 3; ++i) {
    const Cell o{r(rng), c(rng)};
    if (o != start && o != goal) obstacles.push_back(o);
  }
  std::sort(obstacles.begin(), obstacles.end());
  obstacles.erase(std::unique(obstacles.begin(), obstacles.end()), obstacles.end());
  return GridEnv("random", rows, cols, start, {goal}, obstacles);
}

Trace cells_trace(const GridEnv& g, const std::vector<Cell>& cells) {
  Trace t;
  t.env_id = g.id();
  for (const Cell& c : cells) t.steps.push_back(Step{g.to_state(c), std::nullopt});
  return t;
}

}  // namespace

TEST_CASE("grid dynamics") {
  const auto env = make_environment("grid5");
  const auto& g = dynamic_cast<const GridEnv&>(*env);
  CHECK(g.rows() == 5);
  CHECK(g.start_cell() == Cell{4, 0});
  CHECK(g.goal_cells() == std::vector<Cell>{{0, 4}});
  const StateId s = g.start();
  CHECK(g.step(s, kDown) == s);
  CHECK(g.step(s, kLeft) == s);
  CHECK(g.step(s, kUp) == g.to_state({3, 0}));
  CHECK(g.is_blocked(g.to_state({3, 0})));
  CHECK(g.step(s, kRight) == g.to_state({4, 1}));
  for (StateId x = 0; x < g.num_states(); ++x) {
    for (ActionId a = 0; a < 4; ++a) CHECK(g.step(x, a) == g.step(x, a));
  }
  CHECK(g.exact_dynamics());
  CHECK_FALSE(g.with_slip(0.2).exact_dynamics());
}

TEST_CASE("slip rollouts only move to neighbours and nominal rollouts follow step") {
  const auto env = make_environment("grid7", 0.3);
  Rng rng(1);
  auto world = env->rollout(env->start());
  auto nominal = env->nominal_rollout(env->start());
  StateId s = env->start();
  int slipped = 0;
  for (int i = 0; i < 500; ++i) {
    const ActionId a = static_cast<ActionId>(i % 4);
    const StateId prev = world->state();
    const StateId next = world->advance(a, rng);
    bool neighbour = false;
    for (ActionId b = 0; b < 4; ++b) neighbour = neighbour || env->step(prev, b) == next;
    CHECK(neighbour);
    slipped += next != env->step(prev, a) ? 1 : 0;
    const StateId n2 = nominal->advance(a, rng);
    CHECK(n2 == env->step(s, a));
    s = n2;
  }
  CHECK(slipped > 0);
}

TEST_CASE("map text round trip and errors") {
  const GridEnv g = load_map("S . #\n. . G\n", "tiny");
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 3);
  CHECK(load_map(g.to_text(), "again").to_text() == g.to_text());
  const GridEnv multi = load_map("S.G2\n..G1\n", "multi");
  CHECK(multi.goal_cells() == std::vector<Cell>{{1, 2}, {0, 2}});
  CHECK(load_map(multi.to_text(), "m").goal_cells() == multi.goal_cells());
  CHECK(load_map("SFH\nFFG\n", "lake").is_blocked(2));
  CHECK_THROWS_AS(load_map("S..\n..\n", "ragged"), ValidationError);
  CHECK_THROWS_AS(load_map("...\n..G\n", "nostart"), ValidationError);
  CHECK_THROWS_AS(load_map("S..\n...\n", "nogoal"), ValidationError);
  CHECK_THROWS_AS(load_map("S.x\n..G\n", "bad"), ValidationError);
  for (const auto& id : builtin_environment_ids()) {
    const auto env = make_environment(id);
    CHECK(env->id() == id);
    if (auto text = builtin_map(id)) {
      CHECK(load_map(*text, id).to_text() == dynamic_cast<const GridEnv&>(*env).to_text());
    }
  }
  CHECK_THROWS_AS(make_environment("no-such-env"), ValidationError);
}

TEST_CASE("mountain car discretisation is a partition") {
  const MountainCarEnv car("mc", 50, 50);
  for (StateId s = 0; s < car.num_states(); ++s) REQUIRE(car.bin_of(car.center(s)) == s);
  CHECK(car.bin_of({MountainCarEnv::kMaxPosition, MountainCarEnv::kMaxSpeed}) == car.num_states() - 1);
  CHECK(car.bin_of({MountainCarEnv::kMinPosition, -MountainCarEnv::kMaxSpeed}) == 0);
  CHECK(car.is_goal(car.bin_of({0.5, 0.0})));
  CHECK_FALSE(car.is_goal(car.bin_of({0.45, 0.0})));
}

TEST_CASE("mountain car physics") {
  // One frame from rest at the valley floor with a right push.
  const CarState c = MountainCarEnv::integrate({-0.5, 0.0}, kPushRight);
  const double v = 0.001 - 0.0025 * std::cos(3 * -0.5);
  CHECK(c.velocity == doctest::Approx(v).epsilon(1e-15));
  CHECK(c.position == doctest::Approx(-0.5 + v).epsilon(1e-15));
  // Left wall stops the car.
  const CarState wall = MountainCarEnv::integrate({-1.2, -0.05}, kPushLeft);
  CHECK(wall.position == -1.2);
  CHECK(wall.velocity == 0.0);

  const MountainCarEnv car("mc", 50, 50);
  const StateId valley = car.bin_of({-0.5, 0.0});
  for (ActionId a = 0; a < 3; ++a) {
    const StateId n = car.step(valley, a);
    CHECK(n == car.step(valley, a));
    if (a != kNoPush) CHECK(n != valley);
  }
  CHECK(car.vel_bin(car.step(valley, kPushRight)) > car.vel_bin(valley));
  CHECK(car.vel_bin(car.step(valley, kPushLeft)) < car.vel_bin(valley));
  const MountainCarEnv single("mc1", 50, 50, {-0.5, 0.0}, 1);
  const CarState one = single.advance({-0.5, 0.0}, kPushRight);
  CHECK(one.position == c.position);
  CHECK(one.velocity == c.velocity);
}

TEST_CASE("scripted pumping reaches the flag") {
  const auto env = make_environment("mountaincar50");
  const auto& car = dynamic_cast<const MountainCarEnv&>(*env);
  for (double x0 : {-0.6, -0.5, -0.4}) {
    const Trace t = pumping_demo(car, {x0, 0.0});
    CHECK(car.is_goal(t.steps.back().state));
    CHECK(t.length() < 200);
  }
}

TEST_CASE("obstacle distance channel") {
  for (const char* id : {"grid5", "grid7", "frozenlake8", "example6"}) {
    const auto env = make_environment(id);
    const auto& g = dynamic_cast<const GridEnv&>(*env);
    for (StateId s = 0; s < g.num_states(); ++s) {
      int best = g.rows() + g.cols();
      for (const Cell& o : g.obstacle_cells()) {
        best = std::min(best, std::abs(o.row - g.to_cell(s).row) + std::abs(o.col - g.to_cell(s).col));
      }
      CHECK(g.obstacle_distance(s) == best);
      CHECK(g.obstacle_distance(s) >= 0);
      CHECK((g.obstacle_distance(s) == 0) == g.is_blocked(s));
    }
  }
}

TEST_CASE("bfs bound matches exhaustive layered search") {
  std::mt19937_64 rng(21);
  int reachable = 0;
  for (int i = 0; i < 300; ++i) {
    const GridEnv g = random_grid(rng);
    const StateId goal = g.goals().front();
    const int expected = layered_search(g, g.start(), goal);
    if (expected < 0) {
      CHECK_THROWS_AS(bfs_time_bound(g, g.start(), goal), UnreachableError);
    } else {
      ++reachable;
      CHECK(bfs_time_bound(g, g.start(), goal) == expected);
    }
  }
  CHECK(reachable > 100);
  const auto g5 = make_environment("grid5");
  CHECK(bfs_time_bound(*g5, g5->start(), g5->goals().front()) == 8);
}

TEST_CASE("multi-goal bounds") {
  const auto env = make_environment("grid7multi");
  const auto goals = env->goals();
  REQUIRE(goals.size() == 2);
  const int a = bfs_time_bound(*env, env->start(), goals[0]) + bfs_time_bound(*env, goals[0], goals[1]);
  const int b = bfs_time_bound(*env, env->start(), goals[1]) + bfs_time_bound(*env, goals[1], goals[0]);
  CHECK(bfs_chain_bound(*env, env->start(), goals) == a);
  CHECK(bfs_best_order_bound(*env, env->start(), goals) == std::min(a, b));
  CHECK(task_parameters(*env).at("T_goal") == std::min(a, b));
  CHECK(task_parameters(*make_environment("mountaincar50")).empty());
}

TEST_CASE("extracted signals have one sample per step") {
  const auto env = make_environment("grid7multi");
  const Trace t = trace_from_moves(*env, env->start(), "UUURRRR");
  const auto fs = standard_features(*env);
  const stl::Signal sig = extract_signal(*env, t, fs);
  CHECK(sig.names() == fs.names());
  for (const auto& n : sig.names()) CHECK(sig.channel(n).size() == t.length());
  CHECK(sig.channel("t") == std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(sig.channel("goals_left").back() == 2);
  const Trace g1 = trace_from_moves(*env, env->start(), "RRRUUUUUU");
  CHECK(extract_signal(*env, g1, fs).channel("goals_left").back() == 1);
  CHECK(extract_signal(*env, g1, fs).channel("d_goal_1").back() == 0);

  const auto car = make_environment("mountaincar50");
  const auto& mc = dynamic_cast<const MountainCarEnv&>(*car);
  const Trace ct = pumping_demo(mc, mc.initial());
  const stl::Signal cs = extract_signal(*car, ct, standard_features(*car));
  CHECK(cs.channel("d_flag").front() > 0);
  CHECK(cs.channel("d_flag").back() <= 0.5);
  CHECK(cs.channel("pos_bin").back() >= mc.goal_bin());
}

TEST_CASE("example 1 policies on the 6x6 grid") {
  const auto env = make_environment("example6");
  const auto& g = dynamic_cast<const GridEnv&>(*env);
  const Trace green = cells_trace(g, {{4, 0}, {4, 1}, {4, 2}, {3, 2}, {2, 2}, {1, 2}, {0, 2}, {0, 3}, {0, 4}});
  const Trace yellow = cells_trace(g, {{4, 0}, {3, 0}, {2, 0}, {1, 0}, {0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto phi1 = stl::parse_formula("F[0,9](d_goal < 1)");
  const auto phi2 = stl::parse_formula("G[0,9](dist_red >= 1)");
  const auto fs = standard_features(*env);
  const auto gs = extract_signal(*env, green, fs);
  const auto ys = extract_signal(*env, yellow, fs);
  CHECK(gs.channel("dist_red")[4] == 0);
  CHECK(stl::robustness(phi1, gs, 0).value > 0);
  CHECK(stl::robustness(phi2, gs, 0).value < 0);
  CHECK(stl::robustness(phi1, ys, 0).value > 0);
  CHECK(stl::robustness(phi2, ys, 0).value > 0);
}

TEST_CASE("trace validation names the step") {
  const auto env = make_environment("grid5");
  Trace t = trace_from_moves(*env, env->start(), "RR");
  validate_trace(*env, t);
  t.steps[1].state = 99;
  try {
    validate_trace(*env, t);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_trace(*env, Trace{}), ValidationError);
  CHECK_THROWS_AS(trace_from_moves(*env, env->start(), "RRX"), ValidationError);
  CHECK(trace_from_moves(*env, env->start(), "r, u\n").length() == 3);
}
