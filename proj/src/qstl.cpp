#include "stlfd/qstl.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "stlfd/stl/robustness.hpp"

namespace stlfd {

std::string_view to_string(DemoRewardMode m) {
  switch (m) {
    case DemoRewardMode::Auto: return "auto";
    case DemoRewardMode::State: return "state";
    case DemoRewardMode::Shaped: return "shaped";
    case DemoRewardMode::Offset: return "offset";
  }
  return "?";
}

DemoRewardMode resolve(DemoRewardMode m, const SpecGraph& graph) {
  if (m != DemoRewardMode::Auto) return m;
  return graph.hard_indices().empty() ? DemoRewardMode::Offset : DemoRewardMode::Shaped;
}
std::string_view to_string(FeedbackMode m) {
  switch (m) {
    case FeedbackMode::Additive: return "additive";
    case FeedbackMode::Shaped: return "shaped";
    case FeedbackMode::Penalty: return "penalty";
  }
  return "?";
}

DemoRewardMode parse_demo_reward_mode(std::string_view s) {
  if (s == "auto") return DemoRewardMode::Auto;
  if (s == "state") return DemoRewardMode::State;
  if (s == "shaped") return DemoRewardMode::Shaped;
  if (s == "offset") return DemoRewardMode::Offset;
  throw ValidationError("unknown reward mode '" + std::string(s) + "' (auto|state|shaped|offset)");
}

FeedbackMode parse_feedback_mode(std::string_view s) {
  if (s == "additive") return FeedbackMode::Additive;
  if (s == "shaped") return FeedbackMode::Shaped;
  if (s == "penalty") return FeedbackMode::Penalty;
  throw ValidationError("unknown feedback mode '" + std::string(s) + "' (additive|shaped|penalty)");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Goal: return "goal";
    case Termination::Violation: return "violation";
    case Termination::Cap: return "cap";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (episodes < 0) throw ValidationError("episodes must be non-negative");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  if (max_steps < 0) throw ValidationError("max_steps must be non-negative");
}

ActionId QTable::greedy(StateId s) const {
  ActionId best = 0;
  for (ActionId a = 1; a < actions_; ++a) {
    if (at(s, a) > at(s, best)) best = a;
  }
  return best;
}

double QTable::max_value(StateId s) const { return at(s, greedy(s)); }

int default_max_steps(const Environment& env, StateId start, const std::vector<StateId>& goal) {
  if (dynamic_cast<const GridEnv*>(&env) == nullptr) return 200;
  int best = std::numeric_limits<int>::max();
  for (StateId g : goal) {
    try {
      best = std::min(best, bfs_time_bound(env, start, g));
    } catch (const UnreachableError&) {
    }
  }
  if (best == std::numeric_limits<int>::max()) {
    throw UnreachableError("no goal reachable from state " + std::to_string(start) + " in '" +
                           env.id() + "'");
  }
  return std::max(1, 4 * best);
}

namespace {

struct HardMonitors {
  FeatureSet features;
  std::vector<stl::PrefixMonitor> monitors;
};

HardMonitors make_monitors(const Environment& env, const SpecGraph& graph, const stl::ParamMap& params,
                           double cap) {
  std::vector<stl::Formula> hard;
  std::set<std::string> channels;
  for (std::size_t i : graph.hard_indices()) {
    hard.push_back(graph.node(i).formula.bind(params));
    channels.merge(hard.back().channels());
  }
  HardMonitors out;
  std::vector<std::string> names(channels.begin(), channels.end());
  out.features = standard_features(env).subset(names);
  for (auto& f : hard) out.monitors.emplace_back(std::move(f), names, cap);
  return out;
}

}  // namespace

TrainRun q_stl_learn(const Environment& env, const SpecGraph& graph, const RewardMap& reward,
                     StateId start, const std::vector<StateId>& goal, const TrainConfig& cfg,
                     const stl::ParamMap& params) {
  cfg.validate();
  if (reward.values.size() != static_cast<std::size_t>(env.num_states())) {
    throw ValidationError("reward map has " + std::to_string(reward.values.size()) +
                          " states, environment '" + env.id() + "' has " +
                          std::to_string(env.num_states()));
  }
  if (goal.empty()) throw ValidationError("training needs at least one goal state");
  if (!env.valid(start)) throw ValidationError("start state outside environment");

  TrainRun run;
  run.max_steps = cfg.max_steps > 0 ? cfg.max_steps : default_max_steps(env, start, goal);
  if (cfg.max_steps > 0 && dynamic_cast<const GridEnv*>(&env) != nullptr) {
    default_max_steps(env, start, goal);  // reachability check
  }

  stl::ParamMap bound_params = params;
  bound_params["T"] = static_cast<double>(run.max_steps);
  HardMonitors hm = make_monitors(env, graph, bound_params, cfg.cap);
  FeatureContext ctx;
  if (goal.size() == 1) ctx.target = goal.front();

  std::vector<char> is_goal(static_cast<std::size_t>(env.num_states()), 0);
  for (StateId g : goal) is_goal[static_cast<std::size_t>(g)] = 1;

  const DemoRewardMode mode = resolve(cfg.reward_mode, graph);
  const double reward_max = *std::max_element(reward.values.begin(), reward.values.end());

  const int actions = env.num_actions();
  run.q = QTable(env.num_states(), actions);
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<ActionId> any_action(0, actions - 1);
  run.stats.reserve(static_cast<std::size_t>(cfg.episodes));

  std::vector<Step> partial;
  partial.reserve(static_cast<std::size_t>(run.max_steps) + 1);
  struct Observation {
    double psi = 0.0;      // sum of hard prefix robustness
    double penalty = 0.0;  // sum of its negative parts
    bool violated = false;
  };
  auto observe = [&]() {
    const auto sample = hm.features.sample(env, partial, ctx);
    Observation obs;
    for (auto& m : hm.monitors) {
      const double v = m.push(sample);
      obs.psi += v;
      obs.penalty += std::min(0.0, v);
      obs.violated = obs.violated || v < 0.0;
    }
    return obs;
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps =
        cfg.epsilon_decay ? cfg.epsilon * (1.0 - static_cast<double>(ep) / cfg.episodes) : cfg.epsilon;
    auto world = env.rollout(start);
    partial.assign(1, Step{start, std::nullopt});
    for (auto& m : hm.monitors) m.reset();
    double psi_prev = observe().psi;

    EpisodeRecord rec;
    rec.episode = ep;
    StateId s = start;
    while (rec.steps < run.max_steps) {
      const ActionId a = coin(rng) < eps ? any_action(rng) : run.q.greedy(s);
      const StateId next = world->advance(a, rng);
      ++rec.steps;
      partial.back().action = a;
      partial.push_back(Step{next, std::nullopt});
      const Observation obs = observe();

      double r = 0.0;
      switch (mode) {
        case DemoRewardMode::State: r = reward.at(next); break;
        case DemoRewardMode::Offset: r = reward.at(next) - reward_max; break;
        default: r = cfg.gamma * reward.at(next) - reward.at(s); break;
      }
      switch (cfg.feedback) {
        case FeedbackMode::Additive: r += obs.psi; break;
        case FeedbackMode::Shaped: r += cfg.gamma * obs.psi - psi_prev; break;
        case FeedbackMode::Penalty: r += obs.penalty; break;
      }

      const bool at_goal = is_goal[static_cast<std::size_t>(next)] != 0;
      const bool terminal = at_goal || obs.violated;
      const double target = r + (terminal ? 0.0 : cfg.gamma * run.q.max_value(next));
      double& q = run.q.at(s, a);
      q += cfg.alpha * (target - q);

      rec.reward += r;
      psi_prev = obs.psi;
      s = next;
      if (at_goal) {
        rec.cause = Termination::Goal;
        break;
      }
      if (obs.violated) {
        rec.cause = Termination::Violation;
        break;
      }
    }
    run.stats.push_back(rec);
  }
  return run;
}

std::optional<Trace> greedy_policy(const Environment& env, const QTable& q, StateId start,
                                   const std::vector<StateId>& goal, int cap) {
  Trace policy;
  policy.env_id = env.id();
  policy.steps.push_back(Step{start, std::nullopt});
  auto world = env.nominal_rollout(start);
  Rng unused(0);
  auto done = [&](StateId s) { return std::find(goal.begin(), goal.end(), s) != goal.end(); };
  StateId s = start;
  for (int k = 0; k < cap && !done(s); ++k) {
    const ActionId a = q.greedy(s);
    policy.steps.back().action = a;
    s = world->advance(a, unused);
    policy.steps.push_back(Step{s, std::nullopt});
  }
  if (!done(s)) return std::nullopt;
  return policy;
}

TrainResult q_stl_train(const Environment& env, const SpecGraph& graph, const RewardMap& reward,
                        StateId start, const std::vector<StateId>& goal, const TrainConfig& cfg,
                        const stl::ParamMap& params) {
  TrainRun run = q_stl_learn(env, graph, reward, start, goal, cfg, params);
  auto policy = greedy_policy(env, run.q, start, goal, run.max_steps);
  if (!policy) {
    std::size_t reached = 0;
    for (const auto& rec : run.stats) reached += rec.cause == Termination::Goal ? 1 : 0;
    std::ostringstream msg;
    msg << "greedy policy does not reach the goal within " << run.max_steps << " steps after "
        << run.stats.size() << " episodes (" << reached << " training episodes reached it)";
    throw NonConvergenceError(msg.str(), std::move(run.stats));
  }
  return TrainResult{std::move(run.q), std::move(*policy), std::move(run.stats), run.max_steps};
}

MultiGoalResult multi_goal_policy(const Environment& env, const SpecGraph& graph,
                                  const RewardMap& reward, StateId start,
                                  const std::vector<StateId>& goals, const TrainConfig& cfg,
                                  const stl::ParamMap& params,
                                  const std::optional<std::vector<StateId>>& explicit_order,
                                  bool parallel) {
  if (goals.empty()) throw ValidationError("multi-goal planning needs at least one goal");
  std::vector<std::vector<StateId>> orders;
  if (explicit_order) {
    auto sorted_given = *explicit_order;
    auto sorted_goals = goals;
    std::sort(sorted_given.begin(), sorted_given.end());
    std::sort(sorted_goals.begin(), sorted_goals.end());
    if (sorted_given != sorted_goals) {
      throw ValidationError("explicit goal order must be a permutation of the goals");
    }
    orders.push_back(*explicit_order);
  } else {
    std::vector<std::size_t> idx(goals.size());
    std::iota(idx.begin(), idx.end(), 0);
    do {
      std::vector<StateId> order;
      for (std::size_t i : idx) order.push_back(goals[i]);
      orders.push_back(std::move(order));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }

  const FeatureSet features = standard_features(env);
  const std::size_t k = goals.size();
  std::vector<PolicyCandidate> candidates(orders.size());

  auto build = [&](std::size_t i) {
    PolicyCandidate& cand = candidates[i];
    cand.order = orders[i];
    cand.policy.env_id = env.id();
    try {
      StateId from = start;
      for (std::size_t j = 0; j < k; ++j) {
        TrainConfig seg = cfg;
        seg.seed = cfg.seed + 7919ULL * (i * k + j);
        TrainResult res = q_stl_train(env, graph, reward, from, {cand.order[j]}, seg, params);
        if (cand.policy.steps.empty()) {
          cand.policy.steps = std::move(res.policy.steps);
        } else {
          cand.policy.steps.back().action = res.policy.steps.front().action;
          cand.policy.steps.insert(cand.policy.steps.end(), res.policy.steps.begin() + 1,
                                   res.policy.steps.end());
        }
        from = cand.order[j];
      }
      stl::ParamMap full = params;
      full["T"] = static_cast<double>(cand.policy.length());
      const SpecGraph bound = graph.bind(full);
      const stl::Signal sig = extract_signal(env, cand.policy, features);
      cand.feasible = true;
      for (std::size_t n = 0; n < bound.size(); ++n) {
        const double r = stl::robustness(bound.node(n).formula, sig, 0, {stl::WindowPolicy::Clip, cfg.cap}).value;
        cand.rob.push_back(r);
        if (bound.node(n).kind == SpecKind::Hard) {
          cand.feasible = cand.feasible && r >= 0.0;
        } else {
          cand.soft_score += r;
        }
      }
      if (!cand.feasible) cand.failure = "violates a hard specification";
    } catch (const std::exception& e) {
      cand.feasible = false;
      cand.failure = e.what();
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(orders.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) build(static_cast<std::size_t>(i));

  MultiGoalResult out;
  bool found = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].feasible) continue;
    if (!found || candidates[i].soft_score > candidates[out.best_index].soft_score) {
      out.best_index = i;
      found = true;
    }
  }
  if (!found) {
    std::string why = candidates.empty() ? "" : candidates.front().failure;
    throw NonConvergenceError("no goal order yields a policy satisfying the hard specifications: " + why, {});
  }
  out.best = candidates[out.best_index].policy;
  out.candidates = std::move(candidates);
  return out;
}

double mean_exploration_steps(const std::vector<EpisodeRecord>& stats, std::size_t window) {
  if (stats.empty()) return 0.0;
  const std::size_t n = std::min(window, stats.size());
  double sum = 0.0;
  for (std::size_t i = stats.size() - n; i < stats.size(); ++i) sum += stats[i].steps;
  return sum / static_cast<double>(n);
}

}  // namespace stlfd
