#include <doctest.h>

#include <algorithm>
#include <random>

#include "stlfd/inference.hpp"
#include "stlfd/kernels.hpp"
#include "stlfd/qstl.hpp"
#include "stlfd/stl/robustness.hpp"
#include "support/fixtures.hpp"

using namespace stlfd;

namespace {

RewardMap grid5_reward(const Environment& env) {
  const std::vector<std::string> names = {"grid5_good_1", "grid5_good_2", "grid5_bad"};
  return infer_learner_reward(fixtures::specs("single_goal"), env, fixtures::demos(env, names),
                              standard_features(env), task_parameters(env))
      .reward;
}

// Plain epsilon-greedy Q-learning on the same random stream: a uniform
// draw decides exploration, a second draw picks the random action.
QTable textbook_q(const Environment& env, const RewardMap& reward, StateId goal, const TrainConfig& cfg,
                  int cap) {
  std::vector<double> q(static_cast<std::size_t>(env.num_states() * env.num_actions()), 0.0);
  auto Q = [&](StateId s, ActionId a) -> double& {
    return q[static_cast<std::size_t>(s * env.num_actions() + a)];
  };
  auto best = [&](StateId s) {
    ActionId b = 0;
    for (ActionId a = 1; a < env.num_actions(); ++a) {
      if (Q(s, a) > Q(s, b)) b = a;
    }
    return b;
  };
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<ActionId> pick(0, env.num_actions() - 1);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    StateId s = env.start();
    for (int k = 0; k < cap; ++k) {
      const ActionId a = coin(rng) < cfg.epsilon ? pick(rng) : best(s);
      const StateId n = env.step(s, a);
      const double r = reward.at(n);
      const double target = n == goal ? r : r + cfg.gamma * Q(n, best(n));
      Q(s, a) += cfg.alpha * (target - Q(s, a));
      s = n;
      if (n == goal) break;
    }
  }
  QTable out(env.num_states(), env.num_actions());
  for (StateId s = 0; s < env.num_states(); ++s) {
    for (ActionId a = 0; a < env.num_actions(); ++a) out.at(s, a) = Q(s, a);
  }
  return out;
}

}  // namespace

TEST_CASE("mode names round trip and auto resolution") {
  for (auto m : {DemoRewardMode::Auto, DemoRewardMode::State, DemoRewardMode::Shaped, DemoRewardMode::Offset}) {
    CHECK(parse_demo_reward_mode(to_string(m)) == m);
  }
  for (auto m : {FeedbackMode::Additive, FeedbackMode::Shaped, FeedbackMode::Penalty}) {
    CHECK(parse_feedback_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_demo_reward_mode("nope"), ValidationError);
  CHECK_THROWS_AS(parse_feedback_mode("nope"), ValidationError);
  CHECK(resolve(DemoRewardMode::Auto, fixtures::specs("single_goal")) == DemoRewardMode::Shaped);
  CHECK(resolve(DemoRewardMode::Auto, fixtures::specs("mountaincar")) == DemoRewardMode::Offset);
  CHECK(resolve(DemoRewardMode::State, fixtures::specs("mountaincar")) == DemoRewardMode::State);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.validate();
  cfg.alpha = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.episodes = -1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("greedy ties go to the lowest action") {
  QTable q(2, 4);
  CHECK(q.greedy(0) == 0);
  q.at(1, 2) = 1.0;
  q.at(1, 3) = 1.0;
  CHECK(q.greedy(1) == 2);
  CHECK(q.max_value(1) == 1.0);
}

TEST_CASE("default step cap") {
  const auto g5 = make_environment("grid5");
  CHECK(default_max_steps(*g5, g5->start(), g5->goals()) == 32);
  CHECK(default_max_steps(*make_environment("mountaincar50"), 0, {1}) == 200);
  const GridEnv walled = load_map("S#G\n.#.\n", "walled");
  CHECK_THROWS_AS(default_max_steps(walled, walled.start(), walled.goals()), UnreachableError);
}

TEST_CASE("without hard specs the update reduces to textbook Q-learning") {
  const auto env = make_environment("grid5");
  const RewardMap reward = grid5_reward(*env);
  TrainConfig cfg;
  cfg.episodes = 400;
  cfg.seed = 9;
  cfg.reward_mode = DemoRewardMode::State;
  const SpecGraph empty = SpecGraph::build({}, {});
  for (FeedbackMode fb : {FeedbackMode::Additive, FeedbackMode::Shaped, FeedbackMode::Penalty}) {
    cfg.feedback = fb;
    const TrainRun run = q_stl_learn(*env, empty, reward, env->start(), env->goals(), cfg);
    CHECK(run.q == textbook_q(*env, reward, env->goals().front(), cfg, 32));
  }
}

TEST_CASE("identical seeds give identical tables") {
  const auto env = make_environment("grid7");
  const auto graph = fixtures::specs("single_goal");
  const auto reward = infer_learner_reward(graph, *env, fixtures::demos(*env, {"grid7_good_1", "grid7_bad"}),
                                           standard_features(*env), task_parameters(*env))
                          .reward;
  TrainConfig cfg;
  cfg.episodes = 300;
  cfg.seed = 4;
  const auto a = q_stl_learn(*env, graph, reward, env->start(), env->goals(), cfg, task_parameters(*env));
  const auto b = q_stl_learn(*env, graph, reward, env->start(), env->goals(), cfg, task_parameters(*env));
  CHECK(a.q == b.q);
  CHECK(a.stats == b.stats);
  cfg.seed = 5;
  const auto c = q_stl_learn(*env, graph, reward, env->start(), env->goals(), cfg, task_parameters(*env));
  CHECK_FALSE(a.q == c.q);
}

TEST_CASE("episodes end at the goal, on a violation, or at the cap") {
  const auto env = make_environment("grid5");
  const auto graph = fixtures::specs("single_goal");
  RewardMap zero{"grid5", std::vector<double>(25, 0.0)};
  TrainConfig cfg;
  cfg.episodes = 300;
  cfg.epsilon = 1.0;
  const auto run = q_stl_learn(*env, graph, zero, env->start(), env->goals(), cfg, task_parameters(*env));
  int violations = 0;
  for (const auto& rec : run.stats) {
    CHECK(rec.steps >= 1);
    CHECK(rec.steps <= run.max_steps);
    if (rec.cause == Termination::Cap) CHECK(rec.steps == run.max_steps);
    if (rec.cause == Termination::Violation) {
      ++violations;
      CHECK(rec.reward < 0);
    }
  }
  CHECK(violations > 100);
  // Stepping onto an obstacle is the only way to violate d_obs >= 1 here.
  CHECK(run.q.at(env->start(), kUp) < 0);
}

TEST_CASE("training input errors") {
  const auto env = make_environment("grid5");
  const auto graph = fixtures::specs("single_goal");
  TrainConfig cfg;
  CHECK_THROWS_AS(q_stl_learn(*env, graph, RewardMap{"grid5", {1.0}}, env->start(), env->goals(), cfg,
                              task_parameters(*env)),
                  ValidationError);
  CHECK_THROWS_AS(q_stl_learn(*env, graph, RewardMap{"grid5", std::vector<double>(25)}, env->start(), {},
                              cfg, task_parameters(*env)),
                  ValidationError);
  cfg.episodes = 0;
  CHECK_THROWS_AS(q_stl_train(*env, graph, RewardMap{"grid5", std::vector<double>(25)}, env->start(),
                              env->goals(), cfg, task_parameters(*env)),
                  NonConvergenceError);
}

TEST_CASE("trained grid5 policy is shortest and safe") {
  const auto env = make_environment("grid5");
  const auto graph = fixtures::specs("single_goal");
  TrainConfig cfg;
  cfg.seed = 1;
  const auto res = q_stl_train(*env, graph, grid5_reward(*env), env->start(), env->goals(), cfg,
                               task_parameters(*env));
  CHECK(res.policy.length() - 1 == 8);
  CHECK(res.policy.steps.back().state == env->goals().front());
  CHECK_FALSE(res.policy.steps.back().action.has_value());
  for (std::size_t i = 0; i + 1 < res.policy.length(); ++i) {
    CHECK(env->step(res.policy.steps[i].state, *res.policy.steps[i].action) == res.policy.steps[i + 1].state);
    CHECK_FALSE(env->is_blocked(res.policy.steps[i].state));
  }
  CHECK(mean_exploration_steps(res.stats, 10) > 0);
  CHECK(mean_exploration_steps({}, 10) == 0);
}

TEST_CASE("multi-goal composition") {
  const auto env = make_environment("grid7multi");
  const auto graph = fixtures::specs("multi_goal");
  const auto params = task_parameters(*env);
  const auto reward = infer_learner_reward(graph, *env,
                                           fixtures::demos(*env, {"grid7multi_good_1", "grid7multi_good_2"}),
                                           standard_features(*env), params)
                          .reward;
  TrainConfig cfg;
  cfg.seed = 2;
  const auto res = multi_goal_policy(*env, graph, reward, env->start(), env->goals(), cfg, params);
  REQUIRE(res.candidates.size() == 2);
  const auto sig = extract_signal(*env, res.best, standard_features(*env));
  stl::ParamMap full = params;
  full["T"] = static_cast<double>(res.best.length());
  for (const auto& c : res.candidates) {
    if (!c.feasible) continue;
    const auto csig = extract_signal(*env, c.policy, standard_features(*env));
    stl::ParamMap p = params;
    p["T"] = static_cast<double>(c.policy.length());
    for (std::size_t i : graph.hard_indices()) {
      CHECK(stl::robustness(graph.node(i).formula.bind(p), csig, 0).value >= 0);
    }
  }
  CHECK(sig.channel("goals_left").back() == 0);
  CHECK(static_cast<double>(res.best.length() - 1) <= params.at("T_goal") + 2);
  for (const auto& c : res.candidates) {
    if (c.feasible) CHECK(res.candidates[res.best_index].soft_score >= c.soft_score);
  }

  // A fixed order yields exactly one candidate in that order.
  const std::vector<StateId> order = {env->goals()[1], env->goals()[0]};
  const auto fixed = multi_goal_policy(*env, graph, reward, env->start(), env->goals(), cfg, params, order);
  REQUIRE(fixed.candidates.size() == 1);
  CHECK(fixed.candidates[0].order == order);
  CHECK_THROWS_AS(multi_goal_policy(*env, graph, reward, env->start(), env->goals(), cfg, params,
                                    std::vector<StateId>{env->goals()[0]}),
                  ValidationError);

  // One goal reduces to single-goal training.
  const auto one = multi_goal_policy(*env, graph, reward, env->start(), {env->goals()[0]}, cfg, params);
  REQUIRE(one.candidates.size() == 1);
  const auto single = q_stl_train(*env, graph, reward, env->start(), {env->goals()[0]}, cfg, params);
  CHECK(one.best.steps == single.policy.steps);

  const auto serial = multi_goal_policy(*env, graph, reward, env->start(), env->goals(), cfg, params, {}, false);
  CHECK(serial.best.steps == res.best.steps);
}

TEST_CASE("serial and parallel seed sweeps agree") {
  const auto env = make_environment("grid5");
  const auto graph = fixtures::specs("single_goal");
  TrainConfig cfg;
  cfg.episodes = 200;
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  const auto reward = grid5_reward(*env);
  const auto a = kernels::train_seeds_serial(*env, graph, reward, env->start(), env->goals(), cfg, seeds,
                                             task_parameters(*env));
  const auto b = kernels::train_seeds_omp(*env, graph, reward, env->start(), env->goals(), cfg, seeds,
                                          task_parameters(*env));
  REQUIRE(a.size() == seeds.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == seeds[i]);
    CHECK(a[i].failure == b[i].failure);
    REQUIRE(a[i].result.has_value() == b[i].result.has_value());
    if (a[i].result) {
      CHECK(a[i].result->q == b[i].result->q);
      CHECK(a[i].result->policy.steps == b[i].result->policy.steps);
    }
  }
}
