#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stlfd/envs.hpp"
#include "stlfd/features.hpp"
#include "stlfd/inference.hpp"
#include "stlfd/specgraph.hpp"

namespace stlfd {

// How the demonstration reward R_fb enters the per-step reward.
//   State  - r = R_fb(s')
//   Shaped - r = gamma * R_fb(s') - R_fb(s)   (potential form)
//   Offset - r = R_fb(s') - max R_fb          (never positive)
//   Auto   - Offset when there are no hard specs, Shaped otherwise. With
//            violation termination a per-step cost makes ending the episode
//            early attractive, so Offset is only used without it.
enum class DemoRewardMode { Auto, State, Shaped, Offset };

// How prefix robustness of the hard specs enters the per-step reward, with
// Psi = sum over hard specs of the prefix robustness after the step.
//   Additive - r += Psi
//   Shaped   - r += gamma * Psi - Psi_prev
//   Penalty  - r += sum over hard specs of min(0, rho); nonzero only on the
//              violating step, which also ends the episode
enum class FeedbackMode { Additive, Shaped, Penalty };

std::string_view to_string(DemoRewardMode m);
DemoRewardMode resolve(DemoRewardMode m, const SpecGraph& graph);
std::string_view to_string(FeedbackMode m);
DemoRewardMode parse_demo_reward_mode(std::string_view s);
FeedbackMode parse_feedback_mode(std::string_view s);

struct TrainConfig {
  int episodes = 3000;
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon = 0.4;
  // 0 picks the default: 4 x BFS bound on grids, 200 otherwise.
  int max_steps = 0;
  std::uint64_t seed = 0;
  // Linear decay of epsilon to 0 over the run.
  bool epsilon_decay = false;
  DemoRewardMode reward_mode = DemoRewardMode::Auto;
  FeedbackMode feedback = FeedbackMode::Penalty;
  double cap = stl::kDefaultRobustnessCap;

  void validate() const;
};

class QTable {
 public:
  QTable() = default;
  QTable(int states, int actions)
      : states_(states), actions_(actions), q_(static_cast<std::size_t>(states * actions), 0.0) {}

  double& at(StateId s, ActionId a) { return q_[index(s, a)]; }
  double at(StateId s, ActionId a) const { return q_[index(s, a)]; }
  // Highest-valued action; ties go to the lowest action id.
  ActionId greedy(StateId s) const;
  double max_value(StateId s) const;
  int num_states() const { return states_; }
  int num_actions() const { return actions_; }
  const std::vector<double>& values() const { return q_; }
  bool operator==(const QTable&) const = default;

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) +
           static_cast<std::size_t>(a);
  }
  int states_ = 0;
  int actions_ = 0;
  std::vector<double> q_;
};

enum class Termination { Goal, Violation, Cap };

std::string_view to_string(Termination t);

struct EpisodeRecord {
  int episode = 0;
  int steps = 0;
  double reward = 0.0;
  Termination cause = Termination::Cap;
  bool operator==(const EpisodeRecord&) const = default;
};

struct TrainResult {
  QTable q;
  Trace policy;  // greedy rollout from start; last step has no action
  std::vector<EpisodeRecord> stats;
  int max_steps = 0;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string message, std::vector<EpisodeRecord> stats)
      : Error(std::move(message)), stats_(std::move(stats)) {}
  const std::vector<EpisodeRecord>& stats() const { return stats_; }

 private:
  std::vector<EpisodeRecord> stats_;
};

// Training output without the final greedy-rollout check.
struct TrainRun {
  QTable q;
  std::vector<EpisodeRecord> stats;
  int max_steps = 0;
};

// Q-learning with the hard specs monitored on the partial episode: their
// prefix robustness feeds the reward, and an episode ends on reaching any
// state in `goal`, on the first hard violation, or at max_steps.
// `params` binds every spec parameter except T, which is the episode cap.
// When `goal` holds a single state the d_goal channel points at it.
TrainRun q_stl_learn(const Environment& env, const SpecGraph& graph, const RewardMap& reward,
                     StateId start, const std::vector<StateId>& goal, const TrainConfig& cfg,
                     const stl::ParamMap& params = {});

// Greedy rollout from `start` (nominal dynamics) until a goal state or `cap`
// steps. Returns nullopt if no goal is reached.
std::optional<Trace> greedy_policy(const Environment& env, const QTable& q, StateId start,
                                   const std::vector<StateId>& goal, int cap);

// q_stl_learn followed by greedy extraction. Throws UnreachableError when the
// goal cannot be reached at all and NonConvergenceError when the greedy
// policy misses the goal.
TrainResult q_stl_train(const Environment& env, const SpecGraph& graph, const RewardMap& reward,
                        StateId start, const std::vector<StateId>& goal, const TrainConfig& cfg,
                        const stl::ParamMap& params = {});

int default_max_steps(const Environment& env, StateId start, const std::vector<StateId>& goal);

struct PolicyCandidate {
  std::vector<StateId> order;
  Trace policy;
  bool feasible = false;
  double soft_score = 0.0;  // sum of soft-spec robustness over the whole policy
  std::vector<double> rob;  // per spec, graph order
  std::string failure;
};

struct MultiGoalResult {
  Trace best;
  std::size_t best_index = 0;
  std::vector<PolicyCandidate> candidates;
};

// Trains start -> g1 -> ... -> gk segment by segment for every goal order
// (or only `explicit_order`) and returns the concatenated policy with the
// largest soft-spec robustness among those that satisfy every hard spec.
// T_goal in `params` should be the best-order BFS bound.
MultiGoalResult multi_goal_policy(const Environment& env, const SpecGraph& graph,
                                  const RewardMap& reward, StateId start,
                                  const std::vector<StateId>& goals, const TrainConfig& cfg,
                                  const stl::ParamMap& params = {},
                                  const std::optional<std::vector<StateId>>& explicit_order = {},
                                  bool parallel = true);

// Mean episode length over the last `window` episodes (all if fewer).
double mean_exploration_steps(const std::vector<EpisodeRecord>& stats, std::size_t window);

}  // namespace stlfd
